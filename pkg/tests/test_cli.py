import json

import pytest

from minpu.bench import parse_schedule, run_ladder
from minpu.cli import main
from minpu.geometry import Instance, check_genericity
from minpu.io import check_solution, read_instance, read_solution, write_instance
from minpu.verify import VerifyConfig, run_suite


@pytest.fixture
def one_one(tmp_path):
    path = tmp_path / "one.json"
    path.write_text('{"points": [["0.5", "0.5"]], "squares": [["0.1", "0.1"]]}')
    return path


# gen


def test_gen_empty(tmp_path):
    out = tmp_path / "e.json"
    assert main(["gen", "--n", "0", "--m", "0", "--seed", "1", "--output", str(out)]) == 0
    assert json.loads(out.read_text()) == {"points": [], "squares": []}


def test_gen_deterministic_and_generic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        main(["gen", "--n", "15", "--m", "9", "--extent", "3", "--seed", "42", "--output", str(path)])
    assert a.read_bytes() == b.read_bytes()
    inst = read_instance(a)
    assert (inst.n, inst.m) == (15, 9)
    assert check_genericity(inst).ok


def test_gen_to_stdout(capsys):
    main(["gen", "--n", "1", "--m", "1", "--seed", "3"])
    data = json.loads(capsys.readouterr().out)
    assert len(data["points"]) == 1 and len(data["squares"]) == 1


# solve


def test_solve_dksh_one_square(tmp_path, one_one, capsys):
    out = tmp_path / "s.json"
    assert main(["solve-dksh", "--input", str(one_one), "--k", "1", "--output", str(out)]) == 0
    sol = read_solution(out)
    assert sol["selected_squares"] == [0] and sol["covered_points"] == [0]
    assert list(sol)[:6] == ["problem", "k", "epsilon", "a", "selected_squares", "covered_points"]
    for key in ("shift_r", "K_t", "cost_c", "stats"):
        assert key in sol
    text = capsys.readouterr().out
    assert "runtime" in text and "states explored" in text


def test_solve_minpu_p_equals_m(tmp_path):
    inst_path = tmp_path / "i.json"
    main(["gen", "--n", "10", "--m", "6", "--extent", "3", "--seed", "2", "--output", str(inst_path)])
    out = tmp_path / "m.json"
    assert main(["solve-minpu", "--input", str(inst_path), "--p", "6", "--output", str(out)]) == 0
    sol = read_solution(out)
    assert len(sol["selected_squares"]) >= 3
    assert sol["threshold"] == "3"
    assert sol["trace"][-1]["count"] >= 3
    assert check_solution(sol, read_instance(inst_path)) is None


def test_solve_twice_is_byte_identical(tmp_path):
    inst_path = tmp_path / "i.json"
    main(["gen", "--n", "12", "--m", "8", "--extent", "3", "--seed", "5", "--output", str(inst_path)])
    outs = [tmp_path / "1.json", tmp_path / "2.json"]
    for out in outs:
        main(["solve-dksh", "--input", str(inst_path), "--k", "4", "--epsilon", "1.5", "--output", str(out)])
    assert outs[0].read_bytes() == outs[1].read_bytes()
    assert read_solution(outs[0])["epsilon"] == "1.5"


def test_solve_writes_trace(tmp_path, one_one):
    trace = tmp_path / "t.txt"
    main(["solve-dksh", "--input", str(one_one), "--k", "1", "--a", "1", "--output", str(tmp_path / "s.json"), "--trace", str(trace)])
    lines = trace.read_text().splitlines()
    assert lines[0].startswith("# shift 0 block")
    assert lines[1].split("\t")[:2] == ["Start", "*"]
    assert lines[-1] == "Sink\t-\t-\t0\t0"


def test_solve_reports_genericity(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    write_instance(Instance.from_coords([("1.1", "0.5")], [("1", "0.3"), ("0.2", "0.1"), ("1.2", "0.7")]), bad)
    assert main(["solve-dksh", "--input", str(bad), "--k", "1"]) == 2
    err = capsys.readouterr().err
    assert "IntegerSquareCoordinate [0]" in err
    assert "DuplicateSquareXFraction [1, 2]" in err


def test_solve_reports_state_budget(tmp_path, capsys):
    inst_path = tmp_path / "i.json"
    main(["gen", "--n", "10", "--m", "8", "--extent", "2", "--seed", "3", "--output", str(inst_path)])
    assert main(["solve-dksh", "--input", str(inst_path), "--k", "2", "--max-states", "2"]) == 3
    assert "block" in capsys.readouterr().err


def test_bad_epsilon(one_one):
    with pytest.raises(SystemExit):
        main(["solve-dksh", "--input", str(one_one), "--k", "1", "--epsilon", "0"])
    with pytest.raises(SystemExit):
        main(["solve-dksh", "--input", str(one_one), "--k", "1", "--epsilon", "1/2"])


def test_bad_k_is_usage_error(one_one):
    assert main(["solve-dksh", "--input", str(one_one), "--k", "5"]) == 2
    assert main(["solve-minpu", "--input", str(one_one), "--p", "2"]) == 2


# verify


def test_verify_block_mode_passes(capsys):
    assert main(["verify", "--suite", "block", "--trials", "50", "--seed", "1"]) == 0
    assert capsys.readouterr().out.startswith("PASS\tblock")


def test_verify_all_suites_pass(capsys):
    assert main(["verify", "--trials", "5", "--seed", "2"]) == 0
    assert capsys.readouterr().out.count("PASS") == 5


def test_verify_fault_injection_fails_with_counterexample():
    cfg = VerifyConfig(trials=30, seed=1, arc_weight_hook=lambda u, v, w: w + 1 if w else w)
    res = run_suite("block", cfg)
    assert not res.ok
    f = res.failures[0]
    assert "dp weight" in f.message
    assert f.minimized.m <= f.instance.m and f.minimized.n <= f.instance.n
    # the minimized dump replays
    replay = Instance.from_dict(f.to_dict()["minimized"])
    from minpu.verify import check_block

    assert check_block(replay, cfg) is not None


def test_verify_cli_failure_exit_and_dump(tmp_path, monkeypatch, capsys):
    import minpu.verify as verify

    original = verify.check_dksh
    monkeypatch.setattr(verify, "check_dksh", lambda inst, cfg, solver=None: "forced" if inst.m >= 2 else None)
    report = tmp_path / "fail.json"
    assert main(["verify", "--suite", "dksh", "--trials", "10", "--seed", "1", "--output", str(report)]) == 1
    data = json.loads(report.read_text())
    f = data["failures"][0]
    assert f["suite"] == "dksh" and f["message"] == "forced"
    assert len(f["minimized"]["squares"]) == 2 and f["minimized"]["points"] == []
    assert "counterexample" in capsys.readouterr().err
    monkeypatch.setattr(verify, "check_dksh", original)


def test_verify_zero_trials_warns(capsys):
    assert main(["verify", "--trials", "0"]) == 0
    assert "warning" in capsys.readouterr().err


# render


def test_render_empty_and_deterministic(tmp_path):
    inst_path = tmp_path / "e.json"
    write_instance(Instance(), inst_path)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["render", "--input", str(inst_path), "--output", str(a)]) == 0
    main(["render", "--input", str(inst_path), "--output", str(b)])
    text = a.read_text()
    assert text.startswith("<?xml") and "<svg" in text
    assert "<dc:date>" not in text
    assert a.read_bytes() == b.read_bytes()


def test_render_with_solution(tmp_path, one_one):
    sol = tmp_path / "s.json"
    main(["solve-dksh", "--input", str(one_one), "--k", "1", "--output", str(sol)])
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for out in (a, b):
        assert main(["render", "--input", str(one_one), "--solution", str(sol), "--output", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    plain = tmp_path / "p.svg"
    main(["render", "--input", str(one_one), "--output", str(plain)])
    assert plain.read_bytes() != a.read_bytes()
    assert "1 squares, 1 points covered" not in plain.read_text()


# bench


def test_parse_schedule():
    assert parse_schedule("4") == [4]
    assert parse_schedule("2..6") == [2, 3, 4, 5, 6]
    assert parse_schedule("2,4") == [2, 4]
    with pytest.raises(ValueError):
        parse_schedule("6..2")
    with pytest.raises(ValueError):
        parse_schedule("a")


def test_bench_single_row(capsys):
    assert main(["bench", "--m", "3", "--n", "5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n\tm\ta\tstates\ttime"
    assert len(lines) == 2 and lines[1].startswith("5\t3\t1\t")


def test_bench_ladder_states_non_decreasing_and_repeatable():
    rows = run_ladder([2, 3, 4, 5, 6], n=10, a=1, seed=4)
    states = [r.states for r in rows]
    assert states == sorted(states)
    assert [r.states for r in run_ladder([2, 3, 4, 5, 6], n=10, a=1, seed=4)] == states


# io


def test_instance_roundtrip(tmp_path):
    inst = Instance.from_coords([("0.125", "-1.5")], [("0.3", "0.7")])
    path = tmp_path / "i.json"
    write_instance(inst, path)
    assert read_instance(path) == inst


def test_check_solution_detects_tampering(tmp_path, one_one):
    sol_path = tmp_path / "s.json"
    main(["solve-dksh", "--input", str(one_one), "--k", "1", "--output", str(sol_path)])
    sol = read_solution(sol_path)
    inst = read_instance(one_one)
    assert check_solution(sol, inst) is None
    sol["covered_points"] = []
    assert check_solution(sol, inst) is not None
