import hashlib
import json

import numpy as np
import pytest

from radardepth import cli
from radardepth.metrics import read_report
from radardepth.training import select_best_checkpoint


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def cli_workspace(tmp_path_factory):
    """One synth + train round shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cli_ws")
    train_dir = root / "train_ds"
    val_dir = root / "val_ds"
    assert run(["synth", "-o", train_dir, "--scenes", 2, "--samples-per-scene", 3,
                "--image-size", "32x32", "--seed", 10]) == 0
    assert run(["synth", "-o", val_dir, "--scenes", 1, "--samples-per-scene", 3,
                "--image-size", "32x32", "--seed", 20]) == 0
    run_dir = root / "run"
    assert run(["train", "--dataset", train_dir, "--val-dataset", val_dir,
                "-o", run_dir, "--preset", "toy-S", "--variant", "ours",
                "--epochs", 2, "--steps-per-epoch", 2, "--batch-size", 2,
                "--base-lr", "1e-4", "--seed", 3]) == 0
    return root


class TestSynth:
    def test_deterministic_manifests(self, tmp_path):
        args = ["--scenes", 1, "--samples-per-scene", 2, "--image-size", "32x32",
                "--seed", 4]
        assert run(["synth", "-o", tmp_path / "a"] + args) == 0
        assert run(["synth", "-o", tmp_path / "b"] + args) == 0
        assert sha(tmp_path / "a" / "manifest.json") == sha(tmp_path / "b" / "manifest.json")

    def test_sample_count(self, tmp_path):
        assert run(["synth", "-o", tmp_path / "ds", "--scenes", 1,
                    "--samples-per-scene", 2, "--image-size", "32x32", "--seed", 0]) == 0
        manifest = json.loads((tmp_path / "ds" / "manifest.json").read_text())
        assert len(manifest["samples"]) == 2

    def test_default_image_size_is_vga(self):
        parser = cli.build_parser()
        args = parser.parse_args(["synth", "-o", "x"])
        assert args.image_size == "640x480"

    def test_bad_image_size_is_config_error(self, tmp_path, capsys):
        code = run(["synth", "-o", tmp_path / "ds", "--image-size", "banana"])
        assert code == 2
        err = capsys.readouterr().err
        assert err.startswith("error:") and err.count("\n") == 1

    def test_output_root_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUTPUT_ROOT_ENV, str(tmp_path))
        assert run(["synth", "-o", "nested/ds", "--scenes", 1, "--samples-per-scene", 1,
                    "--image-size", "32x32", "--seed", 0]) == 0
        assert (tmp_path / "nested" / "ds" / "manifest.json").exists()


class TestTrain:
    def test_outputs_written(self, cli_workspace):
        run_dir = cli_workspace / "run"
        assert (run_dir / "metrics.log").exists()
        assert (run_dir / "checkpoint_epoch000.npz").exists()
        assert (run_dir / "checkpoint_epoch001.npz").exists()
        record = json.loads((run_dir / "best_checkpoint.json").read_text())
        assert record["variant"] == "ours"

    def test_metrics_log_format(self, cli_workspace):
        lines = (cli_workspace / "run" / "metrics.log").read_text().splitlines()
        assert lines[0] == ("epoch,train_loss_mean,val_absrel,val_delta1,"
                            "val_rmse,lr_pretrained,lr_new")
        assert len(lines) == 3  # header + 2 epochs

    def test_best_record_matches_history(self, cli_workspace):
        record = json.loads((cli_workspace / "run" / "best_checkpoint.json").read_text())
        absrels = [h["val_absrel"] for h in record["history"]]
        best_epoch = int(np.argmin(absrels))
        assert record["best_checkpoint"].endswith(f"checkpoint_epoch{best_epoch:03d}.npz")

    def test_missing_dataset_is_config_error(self, tmp_path, capsys):
        code = run(["train", "--dataset", tmp_path / "nope", "--val-dataset",
                    tmp_path / "nope", "-o", tmp_path / "out"])
        assert code == 2
        assert "does not exist" in capsys.readouterr().err

    def test_config_file_with_flag_override(self, cli_workspace, tmp_path):
        cfg = tmp_path / "train.cfg"
        cfg.write_text("epochs = 5\nsteps_per_epoch = 1\nbatch_size = 1\nbase_lr = 1e-4\n")
        out = tmp_path / "run_cfg"
        assert run(["train", "--dataset", cli_workspace / "train_ds",
                    "--val-dataset", cli_workspace / "val_ds", "-o", out,
                    "--config", cfg, "--epochs", 1, "--seed", 0]) == 0
        # flag wins: only one epoch record
        lines = (out / "metrics.log").read_text().splitlines()
        assert len(lines) == 2


class TestEval:
    def best_checkpoint(self, cli_workspace):
        record = json.loads((cli_workspace / "run" / "best_checkpoint.json").read_text())
        return record["best_checkpoint"]

    def test_all_three_variants(self, cli_workspace, tmp_path):
        ckpt = self.best_checkpoint(cli_workspace)
        reports = {}
        for variant in ("ours", "metric-baseline", "naive"):
            out = tmp_path / f"eval_{variant}"
            assert run(["eval", "--dataset", cli_workspace / "val_ds",
                        "--checkpoint", ckpt, "--variant", variant,
                        "-o", out, "--subsample", 1]) == 0
            doc = read_report(out / f"report_{variant}.json")
            reports[variant] = doc
            assert doc["n_frames"] == 3
            assert (out / f"error_vs_depth_{variant}.csv").exists()
            assert (out / f"report_{variant}.txt").exists()
        assert set(reports) == {"ours", "metric-baseline", "naive"}

    def test_dump_predictions(self, cli_workspace, tmp_path):
        ckpt = self.best_checkpoint(cli_workspace)
        out = tmp_path / "eval_dump"
        assert run(["eval", "--dataset", cli_workspace / "val_ds", "--checkpoint", ckpt,
                    "--variant", "ours", "-o", out, "--dump-predictions"]) == 0
        assert (out / "s000_f000_d0.npy").exists()
        assert (out / "s000_f000_w.npy").exists()
        assert (out / "s000_f000_fused.npy").exists()

    def test_missing_checkpoint_is_config_error(self, cli_workspace, tmp_path):
        code = run(["eval", "--dataset", cli_workspace / "val_ds",
                    "--checkpoint", tmp_path / "nope.npz", "-o", tmp_path / "out"])
        assert code == 2


class TestCompareAndPlot:
    def test_compare_table(self, cli_workspace, tmp_path, capsys):
        ckpt = json.loads((cli_workspace / "run" / "best_checkpoint.json").read_text())
        ckpt = ckpt["best_checkpoint"]
        outs = []
        for variant in ("ours", "naive"):
            out = tmp_path / f"ev_{variant}"
            run(["eval", "--dataset", cli_workspace / "val_ds", "--checkpoint", ckpt,
                 "--variant", variant, "-o", out])
            outs.append(out / f"report_{variant}.json")
        table_path = tmp_path / "table.txt"
        assert run(["compare", *outs, "--output", table_path]) == 0
        text = table_path.read_text()
        assert "ours" in text and "naive" in text and "AbsRel" in text

    def test_plot_writes_png(self, cli_workspace, tmp_path):
        ckpt = json.loads((cli_workspace / "run" / "best_checkpoint.json").read_text())
        out = tmp_path / "ev"
        run(["eval", "--dataset", cli_workspace / "val_ds",
             "--checkpoint", ckpt["best_checkpoint"], "--variant", "ours", "-o", out])
        png = tmp_path / "fig.png"
        assert run(["plot", out / "error_vs_depth_ours.csv", "-o", png]) == 0
        assert png.stat().st_size > 0
