"""End-to-end exercises of the command-line harness on tiny problems."""

import numpy as np
import pytest

from qreservoir.cli import main
from qreservoir.data import load_mnist_idx


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("idx")
    rc = main(
        [
            "synth-data",
            "--out-dir",
            str(d),
            "--train-count",
            "300",
            "--test-count",
            "100",
            "--seed",
            "5",
        ]
    )
    assert rc == 0
    return d


def _base_args(data_dir, tmp_path, **extra):
    sets = {
        "num_qubits": "3",
        "periods": "5",
        "data_dir": str(data_dir),
        "train_subsample": "200",
        "test_subsample": "60",
        "epochs": "12",
        "epoch_window": "8:12",
        "cache_dir": str(tmp_path / "cache"),
        "out_dir": str(tmp_path / "runs"),
    }
    sets.update({k: str(v) for k, v in extra.items()})
    args = []
    for k, v in sets.items():
        args += ["--set", f"{k}={v}"]
    return args


class TestSynthData:
    def test_files_loadable(self, data_dir):
        ds = load_mnist_idx(
            data_dir / "train-images-idx3-ubyte", data_dir / "train-labels-idx1-ubyte"
        )
        assert len(ds) == 300
        assert set(np.unique(ds.labels)) == set(range(10))

    def test_deterministic(self, data_dir, tmp_path):
        rc = main(
            ["synth-data", "--out-dir", str(tmp_path), "--train-count", "300",
             "--test-count", "100", "--seed", "5"]
        )
        assert rc == 0
        a = (data_dir / "train-images-idx3-ubyte").read_bytes()
        b = (tmp_path / "train-images-idx3-ubyte").read_bytes()
        assert a == b


class TestNetworkCommand:
    def test_dimer_summary(self, tmp_path):
        rc = main(
            [
                "network",
                "--set", "num_qubits=6",
                "--set", "epsilon_sweep=0,0.03",
                "--set", f"out_dir={tmp_path}",
                "--run-name", "net",
            ]
        )
        assert rc == 0
        out = tmp_path / "net"
        summary = (out / "network_summary.csv").read_text().splitlines()
        assert summary[0].startswith("# config ")
        assert summary[1] == "epsilon,edges,max_degree,slope,r_squared"
        row0 = summary[2].split(",")
        assert float(row0[0]) == 0.0
        assert int(row0[1]) == 32  # 2^6 nodes paired into 32 dimers
        assert int(row0[2]) == 1
        hist = (out / "degree_hist_eps0.csv").read_text().splitlines()
        assert hist[1] == "k,count" and hist[2] == "1,64"
        edges = (out / "edges_eps0.csv").read_text().splitlines()[2:]
        assert len(edges) == 32

    def test_empty_sweep_is_usage_error(self, tmp_path, capsys):
        rc = main(
            ["network", "--set", "epsilon_sweep=", "--set", f"out_dir={tmp_path}"]
        )
        assert rc == 2
        assert "epsilon_sweep" in capsys.readouterr().err


class TestTrainCommand:
    def test_metrics_and_checkpoint(self, data_dir, tmp_path):
        rc = main(["train"] + _base_args(data_dir, tmp_path) + ["--run-name", "t1"])
        assert rc == 0
        out = tmp_path / "runs" / "t1"
        lines = (out / "metrics.csv").read_text().splitlines()
        assert lines[1] == "epoch,train_acc,test_acc,train_loss"
        assert len(lines) == 2 + 12
        assert (out / "checkpoint.bin").exists()
        assert (out / "checkpoint.bin.txt").exists()
        assert (out / "train_summary.csv").exists()

    def test_identical_seeds_identical_outputs(self, data_dir, tmp_path):
        args = _base_args(data_dir, tmp_path)
        assert main(["train"] + args + ["--run-name", "r1"]) == 0
        assert main(["train"] + args + ["--run-name", "r2"]) == 0
        base = tmp_path / "runs"
        for name in ("metrics.csv", "train_summary.csv", "checkpoint.bin"):
            assert (base / "r1" / name).read_bytes() == (base / "r2" / name).read_bytes()

    def test_missing_dataset_fails(self, tmp_path):
        rc = main(
            ["train", "--set", f"data_dir={tmp_path}/nope", "--set", f"cache_dir={tmp_path}/c",
             "--set", f"out_dir={tmp_path}/r"]
        )
        assert rc == 1

    def test_classical_baseline_runs(self, data_dir, tmp_path):
        rc = main(
            ["train"]
            + _base_args(data_dir, tmp_path, baseline="onn_784")
            + ["--run-name", "base784"]
        )
        assert rc == 0
        metrics = (tmp_path / "runs" / "base784" / "metrics.csv").read_text()
        assert len(metrics.splitlines()) == 14

    def test_epsilon_zero_baseline_runs(self, data_dir, tmp_path):
        rc = main(
            ["train"]
            + _base_args(data_dir, tmp_path, baseline="epsilon_zero")
            + ["--run-name", "eps0"]
        )
        assert rc == 0


class TestFeaturesCommand:
    def test_creates_caches(self, data_dir, tmp_path):
        rc = main(["features"] + _base_args(data_dir, tmp_path))
        assert rc == 0
        cache = tmp_path / "cache"
        assert list(cache.glob("features_train_*.bin"))
        assert list(cache.glob("features_test_*.bin"))
        assert list(cache.glob("prop_N3_*.bin"))
        assert list(cache.glob("pca_6_*.bin"))

    def test_csv_export(self, data_dir, tmp_path):
        rc = main(
            ["features"]
            + _base_args(data_dir, tmp_path, features_csv="true", train_subsample=40, test_subsample=20)
            + ["--run-name", "fx"]
        )
        assert rc == 0
        csv = (tmp_path / "runs" / "fx" / "features_train.csv").read_text().splitlines()
        assert csv[1].startswith("label,x0,")
        assert len(csv) == 2 + 40


class TestSweepCommand:
    def test_dropout_axis(self, data_dir, tmp_path):
        rc = main(
            ["sweep", "--axis", "dropout"]
            + _base_args(data_dir, tmp_path, dropout_sweep="0,0.1")
            + ["--run-name", "sw"]
        )
        assert rc == 0
        lines = (tmp_path / "runs" / "sw" / "sweep_dropout.csv").read_text().splitlines()
        assert lines[1] == "dropout,train_acc_mean,train_acc_std,test_acc_mean,test_acc_std"
        assert len(lines) == 4

    def test_qubit_axis(self, data_dir, tmp_path):
        rc = main(
            ["sweep", "--axis", "qubits"]
            + _base_args(data_dir, tmp_path, qubit_sweep="2,3")
            + ["--run-name", "swq"]
        )
        assert rc == 0
        lines = (tmp_path / "runs" / "swq" / "sweep_qubits.csv").read_text().splitlines()
        assert len(lines) == 4

    def test_empty_axis_usage_error(self, data_dir, tmp_path):
        rc = main(
            ["sweep", "--axis", "periods"]
            + _base_args(data_dir, tmp_path, period_sweep="")
        )
        assert rc == 2

    def test_single_point_sweep_degenerates_to_train(self, data_dir, tmp_path):
        args = _base_args(data_dir, tmp_path, epsilon_sweep="0.03", epsilon="0.03")
        assert main(["sweep", "--axis", "epsilon"] + args + ["--run-name", "sw1"]) == 0
        assert main(["train"] + args + ["--run-name", "tr1"]) == 0
        base = tmp_path / "runs"
        sweep_lines = (base / "sw1" / "sweep_epsilon.csv").read_text().splitlines()
        train_lines = (base / "tr1" / "train_summary.csv").read_text().splitlines()
        # same window statistics from both paths
        assert sweep_lines[2].split(",")[1:] == train_lines[2].split(",")[1:]


class TestConfigHandling:
    def test_config_file_and_override(self, data_dir, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "num_qubits = 3\n"
            "periods = 5  # short drive\n"
            f"data_dir = {data_dir}\n"
            "train_subsample = 150\n"
            "test_subsample = 50\n"
            "epochs = 5\n"
            "epoch_window = 3:5\n"
            f"cache_dir = {tmp_path}/cache\n"
            f"out_dir = {tmp_path}/runs\n"
        )
        rc = main(
            ["train", "--config", str(cfg), "--set", "epochs=7", "--run-name", "cfgd"]
        )
        assert rc == 0
        lines = (tmp_path / "runs" / "cfgd" / "metrics.csv").read_text().splitlines()
        assert len(lines) == 2 + 7  # override wins over the file value

    def test_unknown_key_rejected(self, tmp_path):
        rc = main(["train", "--set", "learning_rat=0.1", "--set", f"out_dir={tmp_path}"])
        assert rc == 1

    def test_malformed_override(self, tmp_path):
        rc = main(["train", "--set", "epochs", "--set", f"out_dir={tmp_path}"])
        assert rc == 1
