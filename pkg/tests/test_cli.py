import math
import subprocess
import sys

import numpy as np
import pytest

from lppgrowth._validation import ModelParams
from lppgrowth.asymptotics import edge_constants
from lppgrowth.cli import EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_VALIDATION, main
from lppgrowth.ensemble import brute_force_cdf, meixner_cdf_table
from lppgrowth.io import read_csv, read_json
from lppgrowth.stats import dkw_epsilon, ks_integer


def test_simulate_writes_csv_and_sidecar(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["simulate", "--q", "0.5", "--n", "6", "--samples", "50", "--seed", "9",
                 "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert list(rows[0]) == ["sample_index", "raw", "rescaled"]
    assert [int(r["sample_index"]) for r in rows] == list(range(50))
    meta = read_json(tmp_path / "g.json")
    c = edge_constants(1.0, 0.5)
    assert meta["center"] == 6 * c.omega and meta["seed"] == 9
    for r in rows:
        assert abs(float(r["rescaled"]) - (int(r["raw"]) - meta["center"]) / meta["scale"]) <= 1e-12


def test_simulate_replay_is_byte_identical(tmp_path):
    a = tmp_path / "a.csv"
    assert main(["simulate", "--n", "8", "--samples", "300", "--seed", "5", "--jobs", "3",
                 "--out", str(a)]) == EXIT_OK
    argv = read_json(tmp_path / "a.json")["manifest"]["argv"]
    b = tmp_path / "b.csv"
    argv[argv.index("--out") + 1] = str(b)
    argv[argv.index("--jobs") + 1] = "1"
    assert main(argv) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_simulate_zero_samples(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["simulate", "--samples", "0", "--out", str(out)]) == EXIT_OK
    assert out.read_text() == "sample_index,raw,rescaled\n"


def test_simulate_matches_exact_law(tmp_path):
    out = tmp_path / "s.csv"
    n = 20_000
    assert main(["simulate", "--q", "0.5", "--n", "20", "--samples", str(n), "--seed", "3",
                 "--out", str(out)]) == EXIT_OK
    raw = np.array([int(r["raw"]) for r in read_csv(out)])
    table = {v.t: v.p for v in meixner_cdf_table(ModelParams(0.5, 20, 20), range(0, 200))}
    cdf = lambda ks: np.array([table.get(int(k), 0.0 if k < 0 else 1.0) for k in ks])
    assert ks_integer(raw, cdf) <= dkw_epsilon(n, 0.01)


def test_exact_single_site_closed_form(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["exact", "--q", "0.5", "--n", "1", "--m", "1", "--t-min", "0", "--t-max", "6",
                 "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert list(rows[0]) == ["t", "p", "err", "method"]
    for r in rows:
        assert abs(float(r["p"]) - (1 - 0.5 ** (int(r["t"]) + 1))) <= 1e-10
        assert float(r["err"]) >= 0


def test_exact_matches_brute_force_and_is_monotone(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["exact", "--q", "0.4", "--n", "2", "--m", "3", "--t-min", "0", "--t-max", "12",
                 "--rescaled", "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    ps = [float(r["p"]) for r in rows]
    assert all(b >= a for a, b in zip(ps, ps[1:]))
    for r in rows:
        assert abs(float(r["p"]) - brute_force_cdf(ModelParams(0.4, 3, 2), int(r["t"])).p) <= 1e-10
    resc = read_csv(tmp_path / "x_rescaled.csv")
    assert len(resc) == len(rows) and list(resc[0]) == ["s", "t", "p"]


def test_exact_exponential_grid(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["exact", "--exp", "--n", "1", "--m", "2", "--t-min", "0.5", "--t-max", "2",
                 "--t-step", "0.5", "--out", str(out)]) == EXIT_OK
    for r in read_csv(out):
        t = float(r["t"])
        assert abs(float(r["p"]) - (1 - math.exp(-t) * (1 + t))) <= 1e-8


def test_tw_table(tmp_path):
    out = tmp_path / "tw.csv"
    assert main(["tw", "--s-grid=-2,0,1", "--method", "both", "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    assert list(rows[0]) == ["s", "F", "method", "est_err"]
    assert [r["method"] for r in rows[:2]] == ["AiryFredholm", "Painleve2"]
    assert abs(float(rows[0]["F"]) - float(rows[1]["F"])) <= 1e-8


def test_asymp_constants_and_ladder(tmp_path):
    out = tmp_path / "c.json"
    assert main(["asymp", "--gamma", "1", "--q", "0.25", "--out", str(out)]) == EXIT_OK
    rep = read_json(out)
    assert abs(rep["omega"] - 2.0) <= 1e-14 and abs(rep["a"] - 1 / 3) <= 1e-14
    conv = tmp_path / "conv.csv"
    assert main(["asymp", "--ladder", "50,100", "--out", str(conv)]) == EXIT_OK
    rows = read_csv(conv)
    assert list(rows[0]) == ["N", "sup_dist", "grid_lo", "grid_hi"]
    assert float(rows[1]["sup_dist"]) < float(rows[0]["sup_dist"])


def test_tasep_output(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["tasep", "--u", "0.3", "--t", "50", "--samples", "20", "--seed", "1",
                 "--out", str(out)]) == EXIT_OK
    rows = read_csv(out)
    meta = read_json(tmp_path / "t.json")
    assert len(rows) == 20 and meta["scale"] > 0
    assert all(int(r["raw"]) >= 0 for r in rows)


@pytest.mark.parametrize("argv", [
    ["simulate", "--q", "1.5", "--out", "x.csv"],
    ["simulate", "--gamma", "0.5", "--out", "x.csv"],
    ["simulate", "--samples", "-1", "--out", "x.csv"],
    ["exact", "--t-min", "5", "--t-max", "1", "--out", "x.csv"],
    ["tw", "--s-grid=-20,0", "--out", "x.csv"],
    ["tw", "--s-grid", "oops", "--out", "x.csv"],
    ["tasep", "--u", "1.0", "--out", "x.csv"],
    ["validate", "--tol", "nonsense"],
    ["nosuchcommand"],
    ["simulate"],
])
def test_domain_and_usage_errors(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(argv) == EXIT_DOMAIN


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["tw", "--s-grid=0", "--out", str(blocker / "x.csv")]) == EXIT_IO


def test_validate_subset_and_failure(tmp_path):
    rep = tmp_path / "r.json"
    assert main(["validate", "--criteria", "2,3", "--out", str(rep)]) == EXIT_OK
    first = read_json(rep)
    assert first["passed"] and [r["number"] for r in first["results"]] == [2, 3]
    assert main(["validate", "--criteria", "2,3", "--out", str(rep)]) == EXIT_OK
    again = read_json(rep)
    strip = lambda d: [{k: v for k, v in r.items() if k != "seconds"} for r in d["results"]]
    assert strip(first) == strip(again)
    assert main(["validate", "--criteria", "3", "--tol", "kernel=1e-20"]) == EXIT_VALIDATION


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "lppgrowth.cli", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
    res = subprocess.run([sys.executable, "-m", "lppgrowth.cli", "tw", "--s-grid=99",
                          "--out", "/dev/null"], capture_output=True, text=True)
    assert res.returncode == EXIT_DOMAIN and "error" in res.stderr
