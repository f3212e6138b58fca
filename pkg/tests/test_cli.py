import json

from ultinet.cli import build_config, main, make_parser


def parse(*argv):
    return make_parser().parse_args(list(argv))


def test_only_fs_splits_the_rest():
    c = build_config(parse("simulate", "--fs", "0.3"))
    assert c.frac_fs == 0.3 and c.frac_dsh == c.frac_dsr == 0.35


def test_flags_override_config_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"n": 30, "rewiring": True, "lam": 0.05}))
    c = build_config(parse("simulate", "--config", str(p), "--n", "40", "--no-rewiring"))
    assert c.n == 40 and not c.rewiring and c.lam == 0.05


def test_simulate_writes_csv(tmp_path, capsys):
    rc = main(["simulate", "--n", "12", "--reps", "2", "--iterations-per-agent", "20",
               "--workers", "1", "--out", str(tmp_path), "--trace"])
    assert rc == 0
    header = (tmp_path / "runs.csv").read_text().splitlines()[0]
    assert header.startswith("run_id,seed,n,frac_fs")
    assert (tmp_path / "trace.csv").exists()


def test_sweep_json(tmp_path):
    rc = main(["sweep", "--axis", "population-size", "--values", "10,14", "--reps", "1",
               "--iterations-per-agent", "10", "--workers", "1", "--format", "json",
               "--out", str(tmp_path)])
    doc = json.loads((tmp_path / "results.json").read_text())
    assert rc == 0 and [d["axis_value"] for d in doc] == [10, 14]


def test_bad_config_reports_error(capsys):
    assert main(["simulate", "--fs", "0.5", "--dsh", "0.9", "--out", "/tmp/unused"]) == 2
    assert "error" in capsys.readouterr().err


def test_verify_suite(capsys):
    assert main(["verify", "--suite", "game"]) == 0
    assert "PASS" in capsys.readouterr().out
