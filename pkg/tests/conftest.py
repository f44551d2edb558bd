import random

import pytest
from hypothesis import settings

from minpu.blockdp import BEGIN, END, BlockContext, Configuration
from minpu.geometry import Instance
from minpu.verify import random_block_instance

settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")

# Seven squares around grid point (1, 1) and eight points placed so that the
# sweep of the single-grid-point example visits the token rows below with
# the counter 4, 7, 7, 7, 8, 8, 8, 8.  Square i here is s_{i+1} in the usual
# one-based naming.
WORKED_SQUARES = [
    ("0.2", "0.8"),
    ("0.36", "0.48"),
    ("0.44", "0.56"),
    ("0.52", "0.64"),
    ("0.68", "0.32"),
    ("0.84", "0.16"),
    ("0.92", "0.72"),
]
WORKED_POINTS = [
    ("1.851", "1.123"),
    ("0.861", "0.283"),
    ("1.811", "1.593"),
    ("1.651", "1.083"),
    ("0.721", "0.473"),
    ("0.611", "0.723"),
    ("0.391", "1.413"),
    ("1.301", "0.903"),
]
B, E = BEGIN, END
WORKED_ROWS = [
    (B, B, 0, 5, 0),  # (s^b, s^b, s1, s6; s1)
    (0, 0, 6, 5, 1),  # (s1, s1, s7, s6; s2)
    (0, 1, 6, 5, 2),
    (0, 1, 6, 5, 3),
    (0, 1, 6, 5, 4),
    (0, 4, 6, 5, 5),
    (0, 5, 6, 6, 6),
    (0, 5, E, E, E),  # (s1, s6, s^e, s^e; s^e)
]
WORKED_K = [4, 7, 7, 7, 8, 8, 8, 8]


def worked_example():
    inst = Instance.from_coords(WORKED_POINTS, WORKED_SQUARES)
    ctx = BlockContext(inst, range(inst.m))
    path = [
        Configuration((row,), k, ctx.position_of((row,), i == 0))
        for i, (row, k) in enumerate(zip(WORKED_ROWS, WORKED_K))
    ]
    return inst, ctx, path


@pytest.fixture
def worked():
    return worked_example()


def block_instances(count, seed, max_m=7, max_n=12, sides=(1, 2)):
    rng = random.Random(seed)
    for _ in range(count):
        a = rng.choice(sides)
        yield random_block_instance(rng, a, rng.randint(1, max_m), rng.randint(0, max_n))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
