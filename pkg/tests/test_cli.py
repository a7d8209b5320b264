import csv
import io
import json

import numpy as np
import pytest

from papr_vlc import cli
from papr_vlc.ofdm_signal import ensemble_variance
from papr_vlc.papr_stats import peak_triple
from papr_vlc.ofdm_signal import TimeSymbol


def read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return header, rows


def run(argv):
    return cli.main([str(a) for a in argv])


def test_ccdf_file_schema(tmp_path):
    out = tmp_path / "c.csv"
    assert run(["--command", "ccdf", "--n", "64", "--qam", "4,256", "--symbols", "3000",
                "--thresholds-db", "5:10:1", "--out", out]) == 0
    header, rows = read_csv(out)
    assert header[0] == "# tool: papr-vlc 0.1.0"
    assert header[1] == "# schema: ccdf/1"
    config = json.loads(header[3][len("# config: "):])
    assert config["n_subcarriers"] == [64] and config["symbols"] == 3000
    assert len(rows) == 12
    assert set(rows[0]) >= {"ccdf_upapr_emp", "ccdf_lpapr_emp", "ccdf_papr_emp",
                            "ccdf_upapr_theory", "ccdf_papr_theory", "se_upapr"}
    assert float(rows[0]["threshold"]) == pytest.approx(10 ** 0.5)
    b = out.read_bytes()
    assert b"\r\n" not in b


def test_json_mirrors_csv(tmp_path):
    args = ["--command", "violation", "--n", "64", "--symbols", "2000",
            "--biasing-ratios", "0.2,0.5", "--backoff-db", "8:12:2"]
    assert run(args + ["--out", tmp_path / "v.csv"]) == 0
    assert run(args + ["--out", tmp_path / "v.json", "--format", "json"]) == 0
    _, rows = read_csv(tmp_path / "v.csv")
    doc = json.loads((tmp_path / "v.json").read_text())
    assert doc["schema"] == "violation/1" and doc["seed"] == 2024
    assert len(doc["rows"]) == len(rows) == 6
    for r, j in zip(rows, doc["rows"]):
        assert [r[c] for c in doc["columns"]] == [cli.fmt(v) for v in j]


def test_violation_analytic_only_and_tail(tmp_path):
    out = tmp_path / "v.csv"
    assert run(["--command", "violation", "--n", "1024", "--symbols", "0",
                "--biasing-ratios", "0.1,0.3,0.5", "--backoff-db", "10:40:10", "--out", out]) == 0
    _, rows = read_csv(out)
    assert all(r["prob_mc"] == "" for r in rows)
    last = [float(r["prob_theory"]) for r in rows if r["backoff_db"] == "40.0"]
    assert max(last) < 1e-6


def test_variance_output(tmp_path):
    out = tmp_path / "var.csv"
    assert run(["--command", "variance", "--n", "128,1024", "--symbols", "5000",
                "--biasing-ratios", "0.1,0.3,0.5", "--out", out]) == 0
    _, rows = read_csv(out)
    q = {(int(r["n"]), float(r["varsigma"])): float(r["variance_quad"]) for r in rows}
    for s in (0.1, 0.3, 0.5):
        assert q[(1024, s)] < q[(128, s)]
    assert q[(128, 0.1)] < q[(128, 0.3)] < q[(128, 0.5)]
    assert all(r["variance_mc"] for r in rows)


def test_gen_roundtrip_and_determinism(tmp_path):
    a = tmp_path / "a.csv"
    args = ["--command", "gen", "--n", "64", "--qam", "64", "--symbols", "3", "--seed", "5",
            "--out", a]
    assert run(args) == 0
    first = a.read_bytes()
    assert run(args) == 0
    assert a.read_bytes() == first
    _, rows = read_csv(a)
    for r in rows:
        x = np.array([float(r[f"x{n}"]) for n in range(64)])
        p = peak_triple(TimeSymbol(x, ensemble_variance(64)))
        assert abs(p.upapr - float(r["upapr"])) <= 1e-12
        assert abs(p.lpapr - float(r["lpapr"])) <= 1e-12
        assert abs(p.papr - float(r["papr"])) <= 1e-12


def test_gen_batch_variance(tmp_path):
    out = tmp_path / "g.csv"
    assert run(["--command", "gen", "--n", "256", "--qam", "4", "--symbols", "400", "--out", out]) == 0
    _, rows = read_csv(out)
    x = np.array([[float(r[f"x{n}"]) for n in range(256)] for r in rows])
    v = np.mean(x**2)
    se = np.sqrt((np.mean(x**4) - v * v) / x.size)
    assert abs(v - 254 / 256) <= 3 * se


@pytest.mark.parametrize("argv", [
    ["--command", "ccdf", "--symbols", "0"],
    ["--command", "nope"],
    ["--n", "100", "--symbols", "10"],
    ["--qam", "16"],
    ["--thresholds-db", "4-14"],
    ["--command", "violation", "--biasing-ratios", "0.7"],
    ["--preset", "fig9"],
    ["--unknown-flag"],
    ["--out", "/nonexistent-dir/x.csv"],
])
def test_config_errors_exit_1(argv, capsys):
    assert run(argv) == 1
    assert "config error" in capsys.readouterr().err


def test_config_file_and_precedence(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"command": "ccdf", "n_subcarriers": [64], "symbols": 500,
                                    "thresholds-db": "5:6:1", "seed": 3}))
    args = cli.make_parser().parse_args(["--preset", "fig1", "--config", str(cfg_file), "--seed", "8"])
    cfg = cli.build_config(args)
    assert cfg.n_subcarriers == (64,)       # config file beats preset
    assert cfg.qam_order == (4, 64, 256)    # preset beats default
    assert cfg.seed == 8                    # flag beats config file
    bad = tmp_path / "bad.json"
    bad.write_text('{"symbols": 10,\n "oops"}')
    assert run(["--config", bad]) == 1


def test_presets_resolve():
    for name in cli.PRESETS:
        cfg = cli.build_config(cli.make_parser().parse_args(["--preset", name]))
        assert cfg.symbols == 100_000
    fig4 = cli.build_config(cli.make_parser().parse_args(["--preset", "fig4"]))
    assert fig4.n_subcarriers == (128, 1024) and fig4.biasing_ratios[-1] == 0.5


def test_quadrature_failure_exit_2(monkeypatch, tmp_path, capsys):
    from papr_vlc.quadrature import QuadratureError

    def boom(*a, **k):
        raise QuadratureError("quadrature did not converge", 0.1, 0.5)

    monkeypatch.setattr(cli.an, "symbol_variant_variance", boom)
    assert run(["--command", "variance", "--n", "64", "--symbols", "0",
                "--biasing-ratios", "0.3", "--out", tmp_path / "v.csv"]) == 2
    assert "varsigma=0.3, N=64" in capsys.readouterr().err
    assert not (tmp_path / "v.csv").exists()
    assert [p.name for p in tmp_path.iterdir()] == []


def test_selftest_exit_codes(monkeypatch, capsys):
    assert run(["--command", "selftest"]) == 0
    assert "15/15 checks passed" in capsys.readouterr().out
    from papr_vlc.selftest import CheckResult
    monkeypatch.setattr(cli, "run_selftest", lambda: [CheckResult("x", 1.0, 0.0, False)])
    assert run(["--command", "selftest"]) == 3


def test_stdout_output(capsys):
    assert run(["--command", "violation", "--n", "64", "--symbols", "0",
                "--biasing-ratios", "0.5", "--backoff-db", "10:10:1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# tool: papr-vlc")
