"""Command-line experiment harness.

Subcommands:

    network     effective-network degree statistics per rotation error
    features    extract and cache feature matrices for train/test splits
    train       train the softmax readout from cached features
    sweep       one-axis parameter sweep (epsilon, periods, qubits, dropout)
    synth-data  write a procedural digit corpus in IDX format

Every subcommand takes ``--config FILE`` (flat key = value lines) and
repeatable ``--set key=value`` overrides.  Outputs are CSV files under a
run directory; each CSV starts with a ``# config <hash>`` provenance
line.  Exit status is nonzero on any error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _kernels, cache, network, pipeline
from .config import ExperimentConfig, load_config, with_values
from .data import ImageDataset, fit_pca, load_mnist_idx, stratified_subsample
from .dynamics import floquet_operator
from .onn import init_model, train, window_stats


class UsageError(ValueError):
    """Bad invocation that argparse cannot catch (e.g. empty sweep list)."""


def _write_csv(path: Path, cfg_hash: str, header: str, rows) -> None:
    with open(path, "w") as f:
        f.write(f"# config {cfg_hash}\n")
        f.write(header + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _run_dir(cfg: ExperimentConfig, name: str, run_name: str | None) -> Path:
    d = Path(cfg.out_dir) / (run_name or f"{name}_{cfg.hash()}")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _dataset_digest(ds: ImageDataset) -> str:
    return cache.dataset_hash(ds.images, ds.labels)[:16]


def load_datasets(cfg: ExperimentConfig) -> tuple[ImageDataset, ImageDataset]:
    """Load the IDX files and apply the stratified subsampling, if any."""
    paths = cfg.dataset_paths()
    train_ds = load_mnist_idx(paths["train_images"], paths["train_labels"])
    test_ds = load_mnist_idx(paths["test_images"], paths["test_labels"])
    if 0 < cfg.train_subsample < len(train_ds):
        train_ds = train_ds.subset(
            stratified_subsample(train_ds.labels, cfg.train_subsample, cfg.subsample_seed)
        )
    if 0 < cfg.test_subsample < len(test_ds):
        test_ds = test_ds.subset(
            stratified_subsample(test_ds.labels, cfg.test_subsample, cfg.subsample_seed + 1)
        )
    return train_ds, test_ds


def fit_pca_cached(cfg: ExperimentConfig, train_ds: ImageDataset, num_components: int | None):
    cache_dir = Path(cfg.cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    tag = "full" if num_components is None else str(num_components)
    path = cache_dir / f"pca_{tag}_{_dataset_digest(train_ds)}.bin"
    if path.exists():
        return cache.load_pca(path)
    pca = fit_pca(train_ds, num_components)
    cache.save_pca(path, pca)
    return pca


def build_features(cfg: ExperimentConfig, quiet: bool = False):
    """Shared path for ``features``/``train``/``sweep``: caches all stages.

    Returns (train_features, train_labels, test_features, test_labels).
    The quantum stage is task-agnostic, so these caches are reusable
    across every downstream training configuration.
    """
    train_ds, test_ds = load_datasets(cfg)
    if cfg.baseline == "onn_784":
        # full classical input: every informative component (rank-capped 784)
        pca = fit_pca_cached(cfg, train_ds, None)
        xtr = pipeline.classical_pca_features(train_ds, pca, cfg.standardize_axis)
        xte = pipeline.classical_pca_features(test_ds, pca, cfg.standardize_axis)
        return xtr, train_ds.labels, xte, test_ds.labels
    params = cfg.drive_parameters(
        epsilon=0.0 if cfg.baseline == "epsilon_zero" else cfg.epsilon
    )
    pca = fit_pca_cached(cfg, train_ds, cfg.resolved_pca_components())
    shots = cfg.shot_config()
    xtr, ytr, path_tr = pipeline.features_cached(
        train_ds, pca, params, shots, cfg.cache_dir, "train", cfg.standardize_axis
    )
    xte, yte, path_te = pipeline.features_cached(
        test_ds, pca, params, shots, cfg.cache_dir, "test", cfg.standardize_axis
    )
    if not quiet:
        print(f"features: train {xtr.shape} ({path_tr}), test {xte.shape} ({path_te})")
    return xtr, ytr, xte, yte


def cmd_network(cfg: ExperimentConfig, run_name: str | None) -> int:
    if not cfg.epsilon_sweep:
        raise UsageError("network needs a nonempty epsilon_sweep")
    out = _run_dir(cfg, "network", run_name)
    summary = []
    for eps in cfg.epsilon_sweep:
        params = cfg.drive_parameters(epsilon=eps)
        f = floquet_operator(params)
        heff = network.effective_hamiltonian(f)
        net = network.percolation_network(heff)
        hist = network.degree_distribution(net)
        tag = f"eps{eps:g}"
        _write_csv(
            out / f"degree_hist_{tag}.csv",
            cfg.hash(),
            "k,count",
            zip(hist.ks.tolist(), hist.counts.tolist()),
        )
        _write_csv(
            out / f"edges_{tag}.csv",
            cfg.hash(),
            "i,j,weight",
            zip(net.edge_i.tolist(), net.edge_j.tolist(), net.edge_weight.tolist()),
        )
        try:
            slope, r2 = network.powerlaw_diagnostic(hist)
        except network.DegreeFitError:
            slope, r2 = float("nan"), float("nan")
        max_degree = int(hist.ks.max()) if len(hist.ks) else 0
        summary.append((eps, net.num_edges, max_degree, slope, r2))
        print(
            f"epsilon={eps:g}: edges={net.num_edges} max_degree={max_degree} "
            f"slope={slope:.3f} r2={r2:.3f}"
        )
    _write_csv(
        out / "network_summary.csv",
        cfg.hash(),
        "epsilon,edges,max_degree,slope,r_squared",
        summary,
    )
    print(f"wrote {out}/network_summary.csv")
    return 0


def cmd_features(cfg: ExperimentConfig, run_name: str | None) -> int:
    xtr, ytr, xte, yte = build_features(cfg)
    if cfg.features_csv:
        out = _run_dir(cfg, "features", run_name)
        cache.export_features_csv(out / "features_train.csv", xtr, ytr, f"config {cfg.hash()}")
        cache.export_features_csv(out / "features_test.csv", xte, yte, f"config {cfg.hash()}")
        print(f"wrote {out}/features_train.csv and features_test.csv")
    return 0


def _train_once(cfg: ExperimentConfig, features, run_dir: Path | None, tag: str = ""):
    xtr, ytr, xte, yte = features
    tcfg = cfg.train_config()
    rng = np.random.default_rng(tcfg.seed)
    model = init_model(xtr.shape[1], tcfg, rng)
    result = train(model, xtr, ytr, tcfg, xte, yte)
    train_acc, test_acc = result.accuracy_arrays()
    lo, hi = cfg.window()
    tr_mean, tr_std = window_stats(train_acc, (lo, hi))
    te_mean, te_std = window_stats(test_acc, (lo, hi))
    if run_dir is not None:
        suffix = f"_{tag}" if tag else ""
        _write_csv(
            run_dir / f"metrics{suffix}.csv",
            cfg.hash(),
            "epoch,train_acc,test_acc,train_loss",
            ((m.epoch, m.train_acc, m.test_acc, m.train_loss) for m in result.metrics),
        )
        sidecar = "\n".join(
            [
                f"config_hash = {cfg.hash()}",
                f"kernel_backend = {_kernels.BACKEND}",
                f"num_features = {xtr.shape[1]}",
                f"train_config = {tcfg}",
                "",
            ]
        )
        cache.save_checkpoint(run_dir / f"checkpoint{suffix}.bin", result.model, sidecar)
    return result, (tr_mean, tr_std, te_mean, te_std)


def cmd_train(cfg: ExperimentConfig, run_name: str | None) -> int:
    try:
        features = build_features(cfg)
    except cache.CacheMismatchError as exc:
        raise RuntimeError(
            f"{exc}\nrun the 'features' subcommand (or clear the cache) first"
        ) from exc
    out = _run_dir(cfg, "train", run_name)
    result, (tr_mean, tr_std, te_mean, te_std) = _train_once(cfg, features, out)
    lo, hi = cfg.window()
    _write_csv(
        out / "train_summary.csv",
        cfg.hash(),
        "window,train_acc_mean,train_acc_std,test_acc_mean,test_acc_std",
        [(f"{lo}:{hi}", tr_mean, tr_std, te_mean, te_std)],
    )
    last = result.metrics[-1]
    print(
        f"trained {len(result.metrics)} epochs: final train_acc={last.train_acc:.4f} "
        f"test_acc={last.test_acc:.4f}; window {lo}:{hi} test {te_mean:.4f}+-{te_std:.4f}"
    )
    print(f"wrote {out}/metrics.csv and checkpoint.bin")
    return 0


_SWEEP_AXES = {
    "epsilon": ("epsilon_sweep", "epsilon"),
    "periods": ("period_sweep", "periods"),
    "qubits": ("qubit_sweep", "num_qubits"),
    "dropout": ("dropout_sweep", "dropout"),
}


def cmd_sweep(cfg: ExperimentConfig, axis: str, run_name: str | None) -> int:
    sweep_field, cfg_field = _SWEEP_AXES[axis]
    values = getattr(cfg, sweep_field)
    if not values:
        raise UsageError(f"sweep over {axis} needs a nonempty {sweep_field}")
    out = _run_dir(cfg, f"sweep_{axis}", run_name)
    rows = []
    for value in values:
        point = with_values(cfg, **{cfg_field: value})
        if cfg_field == "num_qubits":
            point = with_values(point, pca_components=0)
        features = build_features(point, quiet=True)
        _, (tr_mean, tr_std, te_mean, te_std) = _train_once(
            point, features, out, tag=f"{axis}{value:g}"
        )
        rows.append((value, tr_mean, tr_std, te_mean, te_std))
        print(
            f"{axis}={value:g}: train {tr_mean:.4f}+-{tr_std:.4f} "
            f"test {te_mean:.4f}+-{te_std:.4f}"
        )
    _write_csv(
        out / f"sweep_{axis}.csv",
        cfg.hash(),
        f"{axis},train_acc_mean,train_acc_std,test_acc_mean,test_acc_std",
        rows,
    )
    print(f"wrote {out}/sweep_{axis}.csv")
    return 0


def cmd_synth_data(cfg: ExperimentConfig, out_dir: str, train_count: int, test_count: int, seed: int) -> int:
    from .synthdata import write_synthetic_idx

    paths = write_synthetic_idx(out_dir or cfg.data_dir or "data", train_count, test_count, seed)
    for key, path in paths.items():
        print(f"{key}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qreservoir", description="quantum-reservoir digit-recognition experiments"
    )
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="flat key = value file")
        p.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override one config key (repeatable)",
        )
        p.add_argument("--run-name", default=None, help="output subdirectory name")

    common(sub.add_parser("network", help="degree statistics of the effective network"))
    common(sub.add_parser("features", help="extract and cache feature matrices"))
    common(sub.add_parser("train", help="train the softmax readout"))
    p_sweep = sub.add_parser("sweep", help="one-axis parameter sweep")
    common(p_sweep)
    p_sweep.add_argument("--axis", choices=sorted(_SWEEP_AXES), required=True)
    p_synth = sub.add_parser("synth-data", help="write a procedural digit corpus (IDX)")
    common(p_synth)
    p_synth.add_argument("--out-dir", default="")
    p_synth.add_argument("--train-count", type=int, default=12000)
    p_synth.add_argument("--test-count", type=int, default=2000)
    p_synth.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides)
        if args.command == "network":
            return cmd_network(cfg, args.run_name)
        if args.command == "features":
            return cmd_features(cfg, args.run_name)
        if args.command == "train":
            return cmd_train(cfg, args.run_name)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.axis, args.run_name)
        if args.command == "synth-data":
            return cmd_synth_data(cfg, args.out_dir, args.train_count, args.test_count, args.seed)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # surface errors with a nonzero exit, not a traceback
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
