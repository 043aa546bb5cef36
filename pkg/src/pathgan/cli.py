"""Command-line pipeline harness.

Subcommands: ``synth-data``, ``train``, ``plan``, ``eval``, ``render``,
``rate``. Every command takes an explicit seed (no wall-clock seeding) and
embeds it in output filenames so differently-seeded runs never clobber
each other. Exit codes: 0 success, 2 usage/config error, 3 typed domain
error.

Options may also come from a flat ``key = value`` config file via
``--config``; command-line flags win over config values.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import gan as gan_mod
from . import gridworld as gw
from . import localization as loc_mod
from . import pathclassifier as pc
from . import planner as pl
from . import neuralcore as nc
from .errors import PathGanError

USAGE_ERROR = 2
DOMAIN_ERROR = 3

EVAL_STUDIES = ("deviation_vs_epochs", "error_vs_batchsize", "localization_cdf", "timing")
DTYPES = {"float64": np.float64, "float32": np.float32}


class ConfigError(Exception):
    pass


def load_config(path: str | None) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment; unknown keys rejected
    by the commands that consume them."""
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(p.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = stripped.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _apply_config(args: argparse.Namespace, config: dict[str, str]) -> None:
    """Fill argparse values that the user left at None from the config file."""
    for key, raw in config.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            raise ConfigError(f"unknown config key: {key}")
        if getattr(args, attr) is None:
            setattr(args, attr, raw)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("PATHGAN_OUT") or "runs"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_grid_and_table(args) -> tuple[gw.GridMap, gw.PathClassTable]:
    if args.map is None:
        grid = gw.default_map()
    else:
        if not Path(args.map).exists():
            raise ConfigError(f"map file not found: {args.map}")
        grid = gw.load_map(args.map)
    if args.classes is None:
        table = gw.default_class_table(grid)
    else:
        if not Path(args.classes).exists():
            raise ConfigError(f"class table file not found: {args.classes}")
        table = gw.read_class_table(args.classes, grid)
    return grid, table


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


# ---------------------------------------------------------------------------
# synth-data
# ---------------------------------------------------------------------------

def cmd_synth_data(args) -> int:
    grid, table = _load_grid_and_table(args)
    seed = int(args.seed)
    out = _out_dir(args)
    data_dir = out / f"dataset_seed{seed}"
    data_dir.mkdir(parents=True, exist_ok=True)

    dataset = gw.build_dataset(
        grid, table, int(args.samples_per_class), seed, float(args.detour_rate)
    )
    per_class: dict[int, int] = {}
    manifest = ["file,class\n"]
    for frame, label in zip(dataset.frames, dataset.labels):
        n = per_class.get(label, 0)
        per_class[label] = n + 1
        name = f"class{label}_{n}.csv"
        gw.write_path_frame(frame, data_dir / name)
        manifest.append(f"{name},{label}\n")
    with open(data_dir / "labels.csv", "w", newline="") as fh:
        fh.writelines(manifest)

    layout = loc_mod.default_beacon_layout(grid)
    params = loc_mod.PropagationParams(
        reference_power=float(args.reference_power),
        exponent=float(args.exponent),
        sigma=float(args.sigma),
    )
    fingerprints = loc_mod.build_fingerprint_dataset(
        grid, layout, int(args.fingerprint_samples), params, seed
    )
    loc_mod.write_fingerprints(fingerprints, data_dir / "fingerprints.csv")

    print(f"wrote {len(dataset)} path frames and {len(fingerprints)} fingerprints to {data_dir}")
    return 0


def read_dataset_dir(data_dir: Path, grid: gw.GridMap, table: gw.PathClassTable) -> gw.PathDataset:
    manifest = data_dir / "labels.csv"
    if not manifest.exists():
        raise ConfigError(f"no labels.csv in {data_dir}")
    frames, labels = [], []
    with open(manifest, newline="") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != "file,class":
        raise ConfigError(f"{manifest}: expected header 'file,class'")
    for line in lines[1:]:
        if not line:
            continue
        name, label = line.rsplit(",", 1)
        frames.append(gw.read_path_frame(data_dir / name, grid))
        labels.append(int(label))
    return gw.PathDataset(frames, labels, table)


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def cmd_train(args) -> int:
    grid, table = _load_grid_and_table(args)
    seed = int(args.seed)
    out = _out_dir(args)
    dtype = DTYPES[args.dtype or "float64"]

    if args.target in ("gan", "classifier"):
        data_dir = Path(args.data_dir) if args.data_dir else out / f"dataset_seed{seed}"
        _require(data_dir.exists(), f"dataset directory not found: {data_dir}")
        dataset = read_dataset_dir(data_dir, grid, table)

    ckpt_dir = out / "checkpoints"

    if args.target == "gan":
        epochs = int(args.epochs if args.epochs is not None else 5000)
        _require(epochs >= 1, "--epochs must be >= 1")
        batch = int(args.batch_size if args.batch_size is not None else 32)
        _require(batch >= 1, "--batch-size must be >= 1")
        snapshots = tuple(
            int(e) for e in str(args.snapshot_epochs).split(",") if e
        ) if args.snapshot_epochs else ()
        cfg = gan_mod.GanTrainConfig(
            epochs=epochs,
            batch_size=batch,
            seed=seed,
            generator_objective=args.objective or "nonsaturating",
            learning_rate=float(args.learning_rate or 2e-4),
            snapshot_epochs=snapshots,
        )
        model = gan_mod.build_gan(grid, seed=seed, dtype=dtype)
        started = time.time()
        try:
            gan_mod.train_gan(model, dataset, cfg)
        finally:
            # keep whatever state exists, even when training aborts
            gan_mod.save_gan(model, ckpt_dir / f"gan_seed{seed}.npz", {"seed": seed})
            for epoch, snap in model.snapshots.items():
                gan_mod.save_gan(
                    snap, ckpt_dir / f"gan_seed{seed}_ep{epoch}.npz", {"seed": seed}
                )
            gan_mod.write_training_log(
                model.training_log, out / f"gan_train_log_seed{seed}.csv"
            )
        print(
            f"trained gan for {epochs} epochs in {time.time() - started:.1f}s; "
            f"checkpoint {ckpt_dir / f'gan_seed{seed}.npz'}"
        )
        return 0

    if args.target == "classifier":
        epochs = int(args.epochs if args.epochs is not None else 200)
        _require(epochs >= 1, "--epochs must be >= 1")
        batch = int(args.batch_size if args.batch_size is not None else 10)
        _require(batch >= 1, "--batch-size must be >= 1")
        split = float(args.split or 0.7)
        classifier, test = pc.train_classifier(
            dataset, batch, epochs, split, seed, dtype=dtype
        )
        test_error = pc.error_rate(classifier, test)
        path = ckpt_dir / f"classifier_seed{seed}.npz"
        save_classifier(classifier, path)
        with open(out / f"classifier_metrics_seed{seed}.csv", "w", newline="") as fh:
            fh.write("seed,batch_size,epochs,test_error\n")
            fh.write(f"{seed},{batch},{epochs},{test_error:.6f}\n")
        print(f"classifier test error {test_error:.4f}; checkpoint {path}")
        return 0

    # localizer
    data_dir = Path(args.data_dir) if args.data_dir else out / f"dataset_seed{seed}"
    fp_path = data_dir / "fingerprints.csv"
    _require(fp_path.exists(), f"fingerprint CSV not found: {fp_path}")
    layout = loc_mod.default_beacon_layout(grid)
    dataset = loc_mod.read_fingerprints(fp_path, layout)
    k = int(args.k if args.k is not None else 3)
    split = float(args.split or 0.7)
    localizer, test = loc_mod.train_localizer(dataset, split, k, seed)
    path = ckpt_dir / f"localizer_seed{seed}.npz"
    save_localizer(localizer, test, path)
    cdf = loc_mod.distance_error_cdf(localizer, test)
    print(
        f"localizer trained (k={k}); mean test error {cdf.mean_error:.3f} cells; "
        f"checkpoint {path}"
    )
    return 0


def save_classifier(classifier: pc.PathClassifier, dest) -> None:
    table = np.asarray(
        [
            (e.class_id, *e.source, *e.destination)
            for e in classifier.class_table
        ],
        dtype=np.int64,
    )
    nc.save_network(
        classifier.net,
        dest,
        extra={
            "class_table": table,
            "batch_size": classifier.config.batch_size,
            "epochs": classifier.config.epochs,
            "split": classifier.config.split,
            "seed": classifier.config.seed,
        },
    )


def load_classifier(source) -> pc.PathClassifier:
    net, meta = nc.load_network(source)
    entries = tuple(
        gw.PathClassEntry(int(row[0]), (int(row[1]), int(row[2])), (int(row[3]), int(row[4])))
        for row in meta["class_table"]
    )
    config = pc.ClassifierConfig(
        batch_size=int(meta["batch_size"]),
        epochs=int(meta["epochs"]),
        split=float(meta["split"]),
        seed=int(meta["seed"]),
    )
    return pc.PathClassifier(net, gw.PathClassTable(entries), config)


def save_localizer(localizer: loc_mod.Localizer, test: loc_mod.FingerprintDataset, dest) -> None:
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    np.savez(
        dest,
        format_version=np.asarray(nc.CHECKPOINT_FORMAT_VERSION),
        k=np.asarray(localizer.k),
        train_rssi=localizer.model_x.features,
        train_x=localizer.model_x.values,
        train_y=localizer.model_y.values,
        test_rssi=test.rssi,
        test_labels=test.labels,
    )


def load_localizer(source, layout: loc_mod.BeaconLayout) -> tuple[loc_mod.Localizer, loc_mod.FingerprintDataset]:
    with np.load(source, allow_pickle=False) as data:
        k = int(data["k"])
        localizer = loc_mod.Localizer(
            model_x=loc_mod.KnnCoordinateModel(data["train_rssi"].copy(), data["train_x"].copy(), k),
            model_y=loc_mod.KnnCoordinateModel(data["train_rssi"].copy(), data["train_y"].copy(), k),
            k=k,
        )
        test = loc_mod.FingerprintDataset(data["test_rssi"], data["test_labels"], layout)
    return localizer, test


# ---------------------------------------------------------------------------
# plan / render
# ---------------------------------------------------------------------------

def render_frame(
    grid: gw.GridMap,
    frame: gw.PathFrame | None = None,
    entry: gw.PathClassEntry | None = None,
) -> str:
    """ASCII map: '#' non-public, '.' public, '*' path, S/D endpoints."""
    rows = []
    for x in range(grid.rows):
        line = []
        for y in range(grid.cols):
            ch = "." if grid.cells[x, y] else "#"
            if frame is not None and frame.cells[x, y]:
                ch = "*"
            if entry is not None:
                if (x, y) == entry.source:
                    ch = "S"
                elif (x, y) == entry.destination:
                    ch = "D"
            line.append(ch)
        rows.append("".join(line))
    return "\n".join(rows)


def cmd_plan(args) -> int:
    grid, table = _load_grid_and_table(args)
    seed = int(args.seed)
    out = _out_dir(args)

    _require(args.gan is not None, "--gan checkpoint is required")
    _require(Path(args.gan).exists(), f"gan checkpoint not found: {args.gan}")
    _require(args.classifier is not None, "--classifier checkpoint is required")
    _require(
        Path(args.classifier).exists(),
        f"classifier checkpoint not found: {args.classifier}",
    )
    model = gan_mod.load_gan(args.gan)
    classifier = load_classifier(args.classifier)

    class_id = None
    if args.class_id is not None:
        class_id = int(args.class_id)
        _require(
            0 <= class_id < len(table),
            f"invalid class {class_id}; valid classes: "
            + ", ".join(str(e.class_id) for e in table),
        )
    source = _parse_cell(args.source) if args.source else None
    destination = _parse_cell(args.dest) if args.dest else None
    _require(
        class_id is not None or (source is not None and destination is not None),
        "give --class or both --source and --dest",
    )

    request = pl.PathRequest(
        class_id=class_id,
        source=source,
        destination=destination,
        max_attempts=int(args.max_attempts),
        denoise=bool(args.denoise),
    )
    result = pl.plan_path(model, classifier, grid, request, seed)
    entry = request.resolve(table)

    plan_dir = out / f"plan_seed{seed}_class{entry.class_id}"
    plan_dir.mkdir(parents=True, exist_ok=True)
    gw.write_path_frame(result.frame, plan_dir / "frame.csv")
    with open(plan_dir / "meta.csv", "w", newline="") as fh:
        fh.write("class,attempts,confidence,deviation\n")
        fh.write(
            f"{entry.class_id},{result.attempts_used},"
            f"{result.classifier_confidence:.6f},{result.deviation:.6f}\n"
        )
    if result.ordered_waypoints is not None:
        with open(plan_dir / "waypoints.csv", "w", newline="") as fh:
            for x, y in result.ordered_waypoints:
                fh.write(f"{x},{y}\n")
    if args.render:
        print(render_frame(grid, result.frame, entry))
    print(
        f"planned class {entry.class_id} in {result.attempts_used} attempts "
        f"(confidence {result.classifier_confidence:.3f}, "
        f"deviation {result.deviation:.6f}); wrote {plan_dir}"
    )
    return 0


def _parse_cell(text: str) -> tuple[int, int]:
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"expected 'x,y' integers, got {text!r}") from None
    return x, y


def cmd_render(args) -> int:
    grid, table = _load_grid_and_table(args)
    frame = None
    if args.frame:
        _require(Path(args.frame).exists(), f"frame file not found: {args.frame}")
        frame = gw.read_path_frame(args.frame, grid)
    entry = table.entry(int(args.class_id)) if args.class_id is not None else None
    print(render_frame(grid, frame, entry))
    return 0


# ---------------------------------------------------------------------------
# eval studies
# ---------------------------------------------------------------------------

def cmd_eval(args) -> int:
    grid, table = _load_grid_and_table(args)
    seed = int(args.seed)
    out = _out_dir(args)

    if args.study == "deviation_vs_epochs":
        return _eval_deviation(args, grid, table, seed, out)
    if args.study == "error_vs_batchsize":
        return _eval_batchsize(args, grid, table, seed, out)
    if args.study == "localization_cdf":
        return _eval_localization(args, grid, seed, out)
    return _eval_timing(args, grid, table, seed, out)


def _eval_deviation(args, grid, table, seed, out) -> int:
    epochs_list = sorted(
        int(e) for e in (args.epochs_list or "100,500,1000,5000,15000").split(",")
    )
    samples = int(args.samples or 100)
    dtype = DTYPES[args.dtype or "float64"]

    data_dir = Path(args.data_dir) if args.data_dir else out / f"dataset_seed{seed}"
    _require(data_dir.exists(), f"dataset directory not found: {data_dir}")
    dataset = read_dataset_dir(data_dir, grid, table)

    model = gan_mod.build_gan(grid, seed=seed, dtype=dtype)
    cfg = gan_mod.GanTrainConfig(
        epochs=max(epochs_list),
        batch_size=int(args.batch_size or 32),
        seed=seed,
        snapshot_epochs=tuple(epochs_list),
    )
    gan_mod.train_gan(model, dataset, cfg)

    path = out / f"deviation_vs_epochs_seed{seed}.csv"
    with open(path, "w", newline="") as fh:
        fh.write("epochs,mean_deviation,max_deviation,zero_fraction\n")
        for epochs in epochs_list:
            snap = model.snapshots[epochs]
            rng = np.random.default_rng(seed + 1)
            devs = []
            for _ in range(samples):
                frame, _ = gan_mod.generate_frame(
                    snap, rng.uniform(-1.0, 1.0, size=snap.noise_dim)
                )
                devs.append(gw.deviation_score(frame, grid))
            devs = np.asarray(devs)
            fh.write(
                f"{epochs},{devs.mean():.6f},{devs.max():.6f},"
                f"{float((devs == 0).mean()):.6f}\n"
            )
    print(f"wrote {path}")
    return 0


def _eval_batchsize(args, grid, table, seed, out) -> int:
    batch_sizes = [int(b) for b in (args.batch_sizes or "5,10,20,50,100,200").split(",")]
    n_seeds = int(args.seeds or 5)
    data_dir = Path(args.data_dir) if args.data_dir else out / f"dataset_seed{seed}"
    _require(data_dir.exists(), f"dataset directory not found: {data_dir}")
    dataset = read_dataset_dir(data_dir, grid, table)

    path = out / f"error_vs_batchsize_seed{seed}.csv"
    with open(path, "w", newline="") as fh:
        fh.write("batch_size,error_rate,seed\n")
        for batch in batch_sizes:
            for s in range(seed, seed + n_seeds):
                classifier, test = pc.train_classifier(
                    dataset, batch_size=batch, epochs=int(args.epochs or 200), seed=s
                )
                err = pc.error_rate(classifier, test)
                fh.write(f"{batch},{err:.6f},{s}\n")
    print(f"wrote {path}")
    return 0


def _eval_localization(args, grid, seed, out) -> int:
    layout = loc_mod.default_beacon_layout(grid)
    params = loc_mod.PropagationParams(sigma=float(args.sigma or 2.0))
    dataset = loc_mod.build_fingerprint_dataset(
        grid, layout, int(args.fingerprint_samples or 1420), params, seed
    )
    localizer, test = loc_mod.train_localizer(
        dataset, float(args.split or 0.7), int(args.k or 3), seed
    )
    cdf = loc_mod.distance_error_cdf(localizer, test, float(args.cell_size or 1.0))
    path = out / f"localization_cdf_seed{seed}.csv"
    loc_mod.write_cdf(cdf, path)
    print(f"mean error: {cdf.mean_error:.4f}; wrote {path}")
    return 0


def _eval_timing(args, grid, table, seed, out) -> int:
    calls = int(args.calls or 10000)
    _require(args.gan is not None and Path(args.gan).exists(), "--gan checkpoint required")
    _require(
        args.classifier is not None and Path(args.classifier).exists(),
        "--classifier checkpoint required",
    )
    model = gan_mod.load_gan(args.gan)
    classifier = load_classifier(args.classifier)
    rng = np.random.default_rng(seed)

    gen_times = np.empty(calls)
    cls_times = np.empty(calls)
    for i in range(calls):
        z = rng.uniform(-1.0, 1.0, size=model.noise_dim)
        t0 = time.perf_counter()
        _, raw = gan_mod.generate_frame(model, z)
        t1 = time.perf_counter()
        pc.classify(classifier, raw)
        t2 = time.perf_counter()
        gen_times[i] = t1 - t0
        cls_times[i] = t2 - t1

    path = out / f"timing_seed{seed}.csv"
    with open(path, "w", newline="") as fh:
        fh.write("metric,calls,mean_ms,p50_ms,p95_ms\n")
        for name, times in (("generation", gen_times), ("classification", cls_times)):
            fh.write(
                f"{name},{calls},{times.mean() * 1e3:.4f},"
                f"{np.percentile(times, 50) * 1e3:.4f},"
                f"{np.percentile(times, 95) * 1e3:.4f}\n"
            )
    print(
        f"generation mean {gen_times.mean() * 1e3:.3f} ms, "
        f"classification mean {cls_times.mean() * 1e3:.3f} ms over {calls} calls; "
        f"wrote {path}"
    )
    return 0


# ---------------------------------------------------------------------------
# rate (manual path-quality scoring helper; records, asserts nothing)
# ---------------------------------------------------------------------------

def cmd_rate(args) -> int:
    grid, table = _load_grid_and_table(args)
    frames_dir = Path(args.frames_dir)
    _require(frames_dir.exists(), f"frames directory not found: {frames_dir}")
    out = _out_dir(args)
    scores_path = out / "mos_scores.csv"
    new_file = not scores_path.exists()
    frame_files = sorted(frames_dir.glob("*.csv"))
    _require(bool(frame_files), f"no frame CSVs in {frames_dir}")

    with open(scores_path, "a", newline="") as fh:
        if new_file:
            fh.write("file,score\n")
        for path in frame_files:
            frame = gw.read_path_frame(path, grid)
            print(f"\n{path.name}:")
            print(render_frame(grid, frame))
            while True:
                try:
                    answer = input("score 1-5 (s=skip, q=quit): ").strip().lower()
                except EOFError:
                    answer = "q"
                if answer == "q":
                    print(f"scores in {scores_path}")
                    return 0
                if answer == "s":
                    break
                if answer in {"1", "2", "3", "4", "5"}:
                    fh.write(f"{path.name},{answer}\n")
                    break
                print("please answer 1-5, s, or q")
    print(f"scores in {scores_path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--map", help="occupancy map CSV (default: packaged map)")
    parser.add_argument("--classes", help="class table CSV (default: packaged table)")
    parser.add_argument("--out", help="output directory (default: $PATHGAN_OUT or ./runs)")
    parser.add_argument("--seed", default=None, help="RNG seed (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathgan",
        description="GAN-based path planning pipeline: synthesize data, train, plan, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-data", help="synthesize the path and fingerprint datasets")
    _add_common(p)
    p.add_argument("--samples-per-class", default=None, help="default 52")
    p.add_argument("--detour-rate", default=None, help="default 0.1")
    p.add_argument("--fingerprint-samples", default=None, help="default 1420")
    p.add_argument("--sigma", default=None, help="shadowing sigma in dB, default 2")
    p.add_argument("--reference-power", default=None, help="dBm at 1 cell, default -60")
    p.add_argument("--exponent", default=None, help="path-loss exponent, default 1.8")
    p.set_defaults(func=cmd_synth_data)

    p = sub.add_parser("train", help="train the gan, classifier, or localizer")
    p.add_argument("target", choices=("gan", "classifier", "localizer"))
    _add_common(p)
    p.add_argument("--data-dir", default=None, help="synth-data output directory")
    p.add_argument("--epochs", default=None)
    p.add_argument("--batch-size", default=None)
    p.add_argument("--objective", choices=gan_mod.GENERATOR_OBJECTIVES, default=None)
    p.add_argument("--learning-rate", default=None)
    p.add_argument("--snapshot-epochs", default=None, help="comma list, e.g. 100,500,1000")
    p.add_argument("--split", default=None, help="train fraction, default 0.7")
    p.add_argument("--k", default=None, help="localizer neighbors, default 3")
    p.add_argument("--dtype", choices=tuple(DTYPES), default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("plan", help="generate a path for a class or endpoint pair")
    _add_common(p)
    p.add_argument("--gan", default=None, help="gan checkpoint (.npz)")
    p.add_argument("--classifier", default=None, help="classifier checkpoint (.npz)")
    p.add_argument("--class", dest="class_id", default=None)
    p.add_argument("--source", default=None, help="x,y")
    p.add_argument("--dest", default=None, help="x,y")
    p.add_argument("--max-attempts", default=1000)
    p.add_argument("--denoise", action="store_true")
    p.add_argument("--render", action="store_true")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("eval", help="run an evaluation study, writing CSV artifacts")
    p.add_argument("study", choices=EVAL_STUDIES)
    _add_common(p)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--epochs-list", default=None, help="deviation study epochs")
    p.add_argument("--samples", default=None, help="frames per deviation cell")
    p.add_argument("--batch-size", default=None)
    p.add_argument("--batch-sizes", default=None, help="classifier study sweep")
    p.add_argument("--seeds", default=None, help="seeds per sweep cell")
    p.add_argument("--epochs", default=None)
    p.add_argument("--sigma", default=None)
    p.add_argument("--fingerprint-samples", default=None)
    p.add_argument("--split", default=None)
    p.add_argument("--k", default=None)
    p.add_argument("--cell-size", default=None)
    p.add_argument("--calls", default=None, help="timing study call count")
    p.add_argument("--gan", default=None)
    p.add_argument("--classifier", default=None)
    p.add_argument("--dtype", choices=tuple(DTYPES), default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="print an ASCII view of the map or a frame")
    _add_common(p)
    p.add_argument("--frame", default=None, help="path frame CSV")
    p.add_argument("--class", dest="class_id", default=None, help="mark S/D of a class")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("rate", help="interactively score generated frames to CSV")
    _add_common(p)
    p.add_argument("--frames-dir", required=True)
    p.set_defaults(func=cmd_rate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(getattr(args, "config", None))
        _apply_config(args, config)
        if args.seed is None:
            args.seed = 0
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except PathGanError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
