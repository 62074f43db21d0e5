import json

import pytest

from lockstep import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exact_small(capsys):
    code, out, _ = run(capsys, "exact", "--N", "2", "--k", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# lockstep ")
    assert lines[1] == "l,phi_hankel,phi_opuc,route_gap,tol,conditional_cdf_exact,x"
    row1 = lines[2].split(",")
    assert row1[0] == "1" and row1[5] == "3/4"
    assert abs(float(row1[1]) - 2 / 3) < 1e-15  # t^2 = 1/3 at k=2, N=2
    row2 = lines[3].split(",")
    assert row2[1] == "" and row2[5] == "1"


def test_exact_l_list_and_t(capsys):
    code, out, _ = run(capsys, "exact", "--N", "8", "--t", "0.5", "--l", "1,3,5")
    assert code == 0
    rows = [r.split(",") for r in out.splitlines()[2:]]
    assert [r[0] for r in rows] == ["1", "3", "5"]
    assert all(r[5] == "" for r in rows)  # k beyond the enumeration budget
    assert abs(float(rows[0][1]) - 0.75 ** 28) < 1e-15


def test_exact_budget_exit(capsys):
    code, _, err = run(capsys, "exact", "--N", "3", "--k", "20")
    assert code == cli.EXIT_BUDGET
    assert "budget" in err


def test_exact_usage_errors(capsys):
    assert run(capsys, "exact", "--k", "3")[0] == cli.EXIT_USAGE
    assert run(capsys, "exact", "--N", "3")[0] == cli.EXIT_USAGE
    assert run(capsys, "exact", "--N", "3", "--t", "0.5", "--l", "3:1")[0] == cli.EXIT_USAGE
    assert run(capsys, "exact", "--N", "3", "--t", "1.5")[0] == cli.EXIT_USAGE


def test_argparse_error_exit(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["nope"])
    assert exc.value.code == cli.EXIT_USAGE


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"N": 2, "k": 2, "l": "1:1"}))
    code, out, _ = run(capsys, "exact", "--config", str(cfg))
    assert code == 0 and len(out.splitlines()) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("[1]")
    assert run(capsys, "exact", "--config", str(bad))[0] == cli.EXIT_USAGE


def test_tw1_grid_validation(capsys):
    assert run(capsys, "tw1", "--x-min", "-1.03")[0] == cli.EXIT_USAGE
    assert run(capsys, "tw1", "--x-max", "9")[0] == cli.EXIT_USAGE
    assert run(capsys, "tw1", "--x-min", "2", "--x-max", "1")[0] == cli.EXIT_USAGE


def test_tw1_default_grid(tmp_path, capsys):
    out = tmp_path / "tw1.csv"
    code, _, _ = run(capsys, "tw1", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# lockstep 0.1.0 tw1")
    assert lines[1] == "x,u,v,F1,F1_prime"
    rows = [list(map(float, r.split(","))) for r in lines[2:]]
    assert len(rows) == 321
    assert rows[0][0] == -10.0 and rows[-1][0] == 6.0
    F = [r[3] for r in rows]
    assert all(a < b for a, b in zip(F, F[1:]))


def test_montecarlo(tmp_path, capsys):
    base = tmp_path / "mc"
    code, _, _ = run(capsys, "montecarlo", "--N", "20", "--samples", "200", "--seed", "4", "--out", str(base))
    assert code == 0
    summary = json.loads((tmp_path / "mc.json").read_text())
    assert summary["N"] == 20 and summary["n_samples"] == 200 and summary["seed"] == 4
    assert len((tmp_path / "mc.csv").read_text().splitlines()) == 202
    code, out, _ = run(capsys, "montecarlo", "--N", "20", "--samples", "200", "--seed", "4")
    assert json.loads(out) == summary


def test_verify_unknown_suite(capsys):
    assert run(capsys, "verify", "--suite", "bogus")[0] == cli.EXIT_USAGE


def test_verify_counting(capsys):
    code, out, err = run(capsys, "verify", "--suite", "counting")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] and report["suites"][0]["suite"] == "counting"
    assert "[PASS]" in err
