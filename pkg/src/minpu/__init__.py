"""Bicriteria solvers for Minimum-p-Union and Densest-k-Subhypergraph on unit squares.

Points and open unit squares in the plane form a hypergraph (each square is a
hyperedge holding the points inside it).  The package solves single blocks
exactly with a sweep-line configuration DP, assembles blocks with the shifting
technique, and turns the resulting DkSH solver into a MinpU solver.  Brute-force
oracles in :mod:`minpu.oracle` check every guarantee at desk scale.
"""

from .assembly import AssemblyResult, ShiftingSolver, SolverConfig, build_partitions, solve_dksh_us, solve_partition
from .blockdp import BlockContext, StateBudgetExceeded, max_weight_paths, validate_path
from .geometry import (
    GenericityError,
    Instance,
    UnitSquare,
    check_genericity,
    contains,
    covered_points,
    grid_point_of,
    perturb,
)
from .oracle import brute_block, brute_dksh, brute_minpu
from .reduction import solve_minpu_us, threshold

__version__ = "0.1.0"

__all__ = [
    "AssemblyResult",
    "BlockContext",
    "GenericityError",
    "Instance",
    "ShiftingSolver",
    "SolverConfig",
    "StateBudgetExceeded",
    "UnitSquare",
    "brute_block",
    "brute_dksh",
    "brute_minpu",
    "build_partitions",
    "check_genericity",
    "contains",
    "covered_points",
    "grid_point_of",
    "max_weight_paths",
    "perturb",
    "solve_dksh_us",
    "solve_minpu_us",
    "solve_partition",
    "threshold",
    "validate_path",
]
