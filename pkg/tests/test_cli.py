import numpy as np
import pytest

from splnc.cli import main
from splnc.dataset import read_dataset, read_label_map


def test_pipeline(tmp_path, capsys):
    scene = tmp_path / "scene.csv"
    truth = tmp_path / "truth.txt"
    assert main(["synth", "--seed", "3", "--width", "20", "--height", "16", "--classes", "3",
                 "--out", str(scene), "--truth", str(truth)]) == 0
    ds = read_dataset(scene)
    assert ds.width == 20 and np.array_equal(read_label_map(truth), ds.labels)

    feats = tmp_path / "feat.csv"
    assert main(["features", str(scene), "--out", str(feats)]) == 0
    assert read_dataset(feats).features.shape == (16, 20, 7)

    for method in ("svm", "wc", "svm_spl", "svm_splnc"):
        model = tmp_path / f"{method}.json"
        trace = tmp_path / f"{method}.trace.csv"
        args = ["train", str(scene), "--method", method, "--seed", "1", "--model", str(model),
                "--trace", str(trace), "--c", "10", "--gamma", "0.5"]
        assert main(args) == 0
        pred = tmp_path / f"{method}.txt"
        ppm = tmp_path / f"{method}.ppm"
        assert main(["predict", str(model), str(scene), "--out", str(pred), "--ppm", str(ppm)]) == 0
        assert ppm.read_bytes().startswith(b"P6\n20 16\n255\n")
        assert trace.exists() == method.startswith("svm_")
        conf = tmp_path / f"{method}.conf.csv"
        capsys.readouterr()
        assert main(["eval", str(pred), str(scene), "--confusion", str(conf)]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0].startswith("oa,") and out[1].startswith("aa,")
        assert conf.read_text().startswith("true,pred_1,pred_2,pred_3\n")


def test_seed_is_required(tmp_path, capsys):
    with pytest.raises(SystemExit) as err:
        main(["synth", "--out", str(tmp_path / "x.csv")])
    assert err.value.code == 2


def test_lambda0_flag(tmp_path):
    scene = tmp_path / "scene.csv"
    main(["synth", "--seed", "0", "--width", "16", "--height", "16", "--classes", "2", "--out", str(scene)])
    trace = tmp_path / "t.csv"
    args = ["train", str(scene), "--seed", "0", "--model", str(tmp_path / "m.json"), "--trace", str(trace),
            "--lambda0", "0.1", "--regularizer", "linear", "--entropy-mode", "literal", "--max-iters", "5"]
    assert main(args) == 0
    assert len(trace.read_text().splitlines()) > 1


def test_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[experiment]\nmethods = svm\nseeds = 0\ncolour = red\n")
    assert main(["run", str(cfg)]) == 2
    assert "line 4" in capsys.readouterr().err
    assert main(["predict", str(tmp_path / "missing.json"), str(cfg), "--out", str(tmp_path / "o")]) == 1
    feats = tmp_path / "f.csv"
    main(["synth", "--seed", "0", "--width", "8", "--height", "8", "--classes", "2", "--out", str(tmp_path / "s.csv")])
    main(["features", str(tmp_path / "s.csv"), "--out", str(feats)])
    assert main(["features", str(feats), "--out", str(tmp_path / "g.csv")]) == 1


def test_run_command(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("[experiment]\nmethods = wc\nseeds = 0\noutput = out\n[data]\nwidth = 16\nheight = 16\nclasses = 2\n")
    assert main(["run", str(cfg)]) == 0
    assert "wc seed 0: oa" in capsys.readouterr().out
    assert (tmp_path / "out" / "summary.csv").exists()
