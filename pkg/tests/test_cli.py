import json

import numpy as np
import pytest

from minimaxfcm.cli import InputError, main, parse_range
from minimaxfcm.dataset import MultiViewDataset, ViewMatrix, write_manifest


@pytest.fixture
def synth_dir(tmp_path):
    out = tmp_path / "ds"
    assert main(["synth", "--output", str(out), "--k", "2", "--n-per-cluster", "40", "--views",
                 "informative,informative,noise", "--normalization", "unit_variance_inv_sqrt_dim", "--seed", "3"]) == 0
    return out


def _read(path):
    return json.loads(path.read_text())


def test_synth_file_contract(tmp_path):
    out = tmp_path / "d"
    assert main(["synth", "--output", str(out), "--k", "2", "--n-per-cluster", "100"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["labels.csv", "manifest.json", "view0.csv", "view1.csv"]
    assert len((out / "labels.csv").read_text().split()) == 200


def test_synth_byte_identical(tmp_path):
    for name in ("a", "b"):
        main(["synth", "--output", str(tmp_path / name), "--seed", "9", "--views", "informative,noise"])
    for f in ("manifest.json", "view0.csv", "view1.csv", "labels.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_synth_invalid_spec(tmp_path, capsys):
    assert main(["synth", "--output", str(tmp_path / "x"), "--views", "noise"]) == 2
    assert "informative" in capsys.readouterr().err


def test_fit_with_labels(synth_dir, tmp_path):
    out = tmp_path / "r.json"
    assert main(["fit", "--manifest", str(synth_dir / "manifest.json"), "--k", "2", "--output", str(out)]) == 0
    rec = _read(out)
    assert {"accuracy", "nmi", "f_measure"} <= set(rec["metrics"])
    assert len(rec["result"]["labels"]) == 80
    assert abs(sum(rec["result"]["alpha"]) - 1) < 1e-12
    assert "memberships" not in rec["result"]
    assert rec["config"]["dataset_hash"] and rec["config"]["k"] == 2
    assert "wall_time_s" in _read(tmp_path / "r.json.timing.json")


def test_fit_without_labels_emits_memberships(tmp_path, rng):
    ds = MultiViewDataset(views=(ViewMatrix(rng.standard_normal((20, 2))),))
    manifest = write_manifest(ds, tmp_path / "nolab")
    out = tmp_path / "r.json"
    assert main(["fit", "--manifest", str(manifest), "--k", "3", "--emit-memberships", "--output", str(out)]) == 0
    rec = _read(out)
    assert "metrics" not in rec
    u = np.array(rec["result"]["memberships"])
    assert u.shape == (3, 20)
    np.testing.assert_allclose(u.sum(axis=0), 1.0, atol=1e-10)


def test_fit_k_exceeds_n(synth_dir, capsys):
    assert main(["fit", "--manifest", str(synth_dir / "manifest.json"), "--k", "1000"]) == 2
    assert "K exceeds N" in capsys.readouterr().err


def test_fit_bad_inputs(tmp_path, synth_dir):
    assert main(["fit", "--manifest", str(tmp_path / "missing.json"), "--k", "2"]) == 2
    assert main(["fit", "--manifest", str(synth_dir / "manifest.json"), "--k", "2", "--gamma", "1.0"]) == 2


def test_fit_deterministic(synth_dir, tmp_path):
    args = ["fit", "--manifest", str(synth_dir / "manifest.json"), "--k", "2", "--emit-memberships"]
    main(args + ["--output", str(tmp_path / "a.json")])
    main(args + ["--output", str(tmp_path / "b.json")])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_baseline_single(synth_dir, tmp_path):
    out = tmp_path / "b.json"
    assert main(["baseline", "--manifest", str(synth_dir / "manifest.json"), "--k", "2", "--mode", "single", "--output", str(out)]) == 0
    rec = _read(out)
    assert len(rec["views"]) == 3
    accs = [v["metrics"]["accuracy"] for v in rec["views"]]
    assert rec["summary"]["best"]["accuracy"] == max(accs)
    assert rec["summary"]["worst"]["accuracy"] == min(accs)


def test_baseline_concat_single_view_matches_fit(tmp_path, rng):
    X = np.vstack([rng.standard_normal((15, 2)), rng.standard_normal((15, 2)) + 6])
    ds = MultiViewDataset(views=(ViewMatrix(X),), labels=[0] * 15 + [1] * 15)
    manifest = str(write_manifest(ds, tmp_path / "one"))
    main(["baseline", "--manifest", manifest, "--k", "2", "--mode", "concat", "--output", str(tmp_path / "c.json")])
    main(["fit", "--manifest", manifest, "--k", "2", "--output", str(tmp_path / "f.json")])
    assert _read(tmp_path / "c.json")["result"]["labels"] == _read(tmp_path / "f.json")["result"]["labels"]


def test_parse_range():
    assert len(parse_range("0.1:0.9:0.1")) == 9
    grid = parse_range("1.1:2.0:0.05")
    assert len(grid) == 19 and grid[0] == 1.1 and grid[-1] == 2.0
    assert parse_range("0.5:0.5:0.1") == [0.5]
    for bad in ("0.9:0.1:0.1", "0.1:0.9:0", "abc", "1:2"):
        with pytest.raises(InputError):
            parse_range(bad)


def test_sweep_gamma(synth_dir, tmp_path):
    out = tmp_path / "s.json"
    assert main(["sweep", "--manifest", str(synth_dir / "manifest.json"), "--k", "2", "--param", "gamma",
                 "--range", "0.1:0.9:0.1", "--output", str(out)]) == 0
    rec = _read(out)
    assert len(rec["records"]) == 9
    assert [r["config"]["gamma"] for r in rec["records"]] == rec["grid"]
    lines = (tmp_path / "s.csv").read_text().strip().splitlines()
    assert lines[0] == "gamma,accuracy,nmi,f_measure" and len(lines) == 10
    nmis = [r["metrics"]["nmi"] for r in rec["records"]]
    assert rec["best_by_nmi"]["nmi"] == max(nmis)


def test_sweep_point_equals_fit(synth_dir, tmp_path):
    manifest = str(synth_dir / "manifest.json")
    main(["sweep", "--manifest", manifest, "--k", "2", "--param", "m", "--range", "1.3:1.3:0.05", "--gamma", "0.4",
          "--output", str(tmp_path / "s.json")])
    main(["fit", "--manifest", manifest, "--k", "2", "--m", "1.3", "--gamma", "0.4", "--output", str(tmp_path / "f.json")])
    sweep = _read(tmp_path / "s.json")
    assert len(sweep["records"]) == 1
    assert sweep["records"][0] == _read(tmp_path / "f.json")


def test_sweep_parallel_matches_serial(synth_dir, tmp_path):
    base = ["sweep", "--manifest", str(synth_dir / "manifest.json"), "--k", "2", "--param", "m", "--range", "1.1:1.3:0.1"]
    main(base + ["--output", str(tmp_path / "a.json")])
    main(base + ["--workers", "2", "--output", str(tmp_path / "b.json")])
    assert _read(tmp_path / "a.json") == _read(tmp_path / "b.json")


def test_sweep_invalid(synth_dir):
    manifest = str(synth_dir / "manifest.json")
    assert main(["sweep", "--manifest", manifest, "--k", "2", "--param", "gamma", "--range", "0.9:0.1:0.1"]) == 2
    assert main(["sweep", "--manifest", manifest, "--k", "2", "--param", "m", "--range", "0.5:1.5:0.5"]) == 2


def test_eval_recomputes(synth_dir, tmp_path):
    res = tmp_path / "r.json"
    main(["fit", "--manifest", str(synth_dir / "manifest.json"), "--k", "2", "--output", str(res)])
    out = tmp_path / "e.json"
    assert main(["eval", "--result", str(res), "--labels", str(synth_dir / "labels.csv"), "--output", str(out)]) == 0
    assert _read(out)["metrics"] == _read(res)["metrics"]
    out2 = tmp_path / "e2.json"
    assert main(["eval", "--result", str(res), "--manifest", str(synth_dir / "manifest.json"), "--output", str(out2)]) == 0
    assert _read(out2)["metrics"] == _read(res)["metrics"]
    assert main(["eval", "--result", str(res)]) == 2
