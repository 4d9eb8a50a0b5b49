"""Command-line experiment runner.

Subcommands: ``fit``, ``baseline``, ``sweep``, ``synth``, ``eval``. Results are
JSON; sweeps additionally write a CSV of (value, accuracy, nmi, f_measure)
rows for plotting. Exit status is 0 on success, 1 on runtime failure and 2
on invalid input.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import fcm_concatenated, fcm_fit
from .dataset import DatasetError, Normalization, concatenate_views, load_manifest, normalize, write_manifest
from .initialization import initial_state, select_initial_centroids
from .metrics import evaluate
from .solver import NumericalError, SolverConfig, fit
from .synth import SynthSpec, generate

RUN_SCHEMA = "minimaxfcm.run/1"
SWEEP_SCHEMA = "minimaxfcm.sweep/1"
BASELINE_SCHEMA = "minimaxfcm.baseline/1"

log = logging.getLogger("minimaxfcm")


class InputError(Exception):
    """Invalid user input; maps to exit status 2."""


def _floats(a):
    return [float(x) for x in np.asarray(a).ravel()]


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_timing(output, seconds):
    # kept out of the result file so that reruns are byte-identical
    if output is None or str(output) == "-":
        log.info("wall time %.3f s", seconds)
        return
    _write_json(Path(str(output) + ".timing.json"), {"wall_time_s": seconds})


def _load(manifest):
    try:
        return normalize(load_manifest(manifest))
    except DatasetError as exc:
        raise InputError(str(exc)) from None


def _config(args, dataset, **override):
    params = dict(
        n_clusters=args.k,
        gamma=args.gamma,
        m=args.m,
        epsilon=args.epsilon,
        max_iter=args.max_iter,
        measure=dataset.distance,
    )
    params.update(override)
    try:
        config = SolverConfig(**params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if config.n_clusters > dataset.n_objects:
        raise InputError(f"K exceeds N ({config.n_clusters} > {dataset.n_objects})")
    return config


def _config_echo(config, manifest, dataset):
    return {
        "k": config.n_clusters,
        "gamma": config.gamma,
        "m": config.m,
        "epsilon": config.epsilon,
        "max_iter": config.max_iter,
        "distance": config.measure.manifest_name,
        "manifest": str(manifest),
        "dataset_hash": dataset.content_hash(),
    }


def run_record(dataset, config, manifest, emit_memberships=False):
    """Fit MinimaxFCM and return the JSON-ready record (without timing)."""
    init = initial_state(dataset, config.n_clusters, config.measure)
    result = fit(dataset, config, init)
    body = {
        "labels": [int(x) for x in result.labels],
        "alpha": _floats(result.alpha),
        "effective_weights": _floats(result.effective_weights),
        "view_costs": _floats(result.view_costs),
        "objective_trace": _floats(result.objective_trace),
        "iterations": result.iterations,
        "converged": result.converged,
        "degenerate_clusters": list(result.degenerate_clusters),
    }
    if emit_memberships:
        body["memberships"] = [_floats(row) for row in result.memberships]
    record = {
        "schema": RUN_SCHEMA,
        "algorithm": "minimaxfcm",
        "algorithm_version": __version__,
        "config": _config_echo(config, manifest, dataset),
        "result": body,
    }
    if dataset.labels is not None:
        record["metrics"] = evaluate(result.labels, dataset.labels).as_dict()
    return record


def _fcm_record(res, dataset, emit_memberships):
    body = {
        "labels": [int(x) for x in res.labels],
        "objective_trace": _floats(res.objective_trace),
        "iterations": res.iterations,
        "converged": res.converged,
    }
    if emit_memberships:
        body["memberships"] = [_floats(row) for row in res.memberships]
    out = {"result": body}
    if dataset.labels is not None:
        out["metrics"] = evaluate(res.labels, dataset.labels).as_dict()
    return out


# -- commands -----------------------------------------------------------------

def cmd_fit(args):
    dataset = _load(args.manifest)
    config = _config(args, dataset)
    start = time.perf_counter()
    record = run_record(dataset, config, args.manifest, args.emit_memberships)
    _write_json(args.output, record)
    _write_timing(args.output, time.perf_counter() - start)
    return 0


def cmd_baseline(args):
    dataset = _load(args.manifest)
    config = _config(args, dataset)
    start = time.perf_counter()
    payload = {
        "schema": BASELINE_SCHEMA,
        "algorithm_version": __version__,
        "mode": args.mode,
        "config": _config_echo(config, args.manifest, dataset),
    }
    if args.mode == "concat":
        view = concatenate_views(dataset)
        init = select_initial_centroids(view, config.n_clusters, config.measure)
        payload.update(_fcm_record(fcm_concatenated(dataset, config, init), dataset, args.emit_memberships))
    else:
        per_view = []
        for view in dataset.views:
            init = select_initial_centroids(view, config.n_clusters, config.measure)
            rec = _fcm_record(fcm_fit(view, config, init), dataset, args.emit_memberships)
            rec["view"] = view.view_name
            per_view.append(rec)
        payload["views"] = per_view
        if dataset.labels is not None:
            keys = ("accuracy", "nmi", "f_measure")
            payload["summary"] = {
                "worst": {k: min(v["metrics"][k] for v in per_view) for k in keys},
                "best": {k: max(v["metrics"][k] for v in per_view) for k in keys},
            }
    _write_json(args.output, payload)
    _write_timing(args.output, time.perf_counter() - start)
    return 0


def parse_range(text):
    """``START:STOP:STEP`` -> inclusive grid, e.g. ``0.1:0.9:0.1`` gives 9 values."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise InputError(f"range must be START:STOP:STEP, got {text!r}") from None
    if not step > 0:
        raise InputError("range step must be positive")
    if stop < start:
        raise InputError("range is inverted (STOP < START)")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def _sweep_point(job):
    dataset, config, manifest = job
    return run_record(dataset, config, manifest)


def cmd_sweep(args):
    dataset = _load(args.manifest)
    grid = parse_range(args.range)
    configs = [_config(args, dataset, **{args.param: value}) for value in grid]
    start = time.perf_counter()
    jobs = [(dataset, config, args.manifest) for config in configs]
    if args.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(_sweep_point, jobs))
    else:
        records = [_sweep_point(job) for job in jobs]

    rows = []
    for value, rec in zip(grid, records):
        metrics = rec.get("metrics", {})
        rows.append([value] + [metrics.get(k) for k in ("accuracy", "nmi", "f_measure")])
    best = None
    if dataset.labels is not None:
        i = int(np.argmax([row[2] for row in rows]))
        best = {"index": i, args.param: grid[i], **{k: records[i]["metrics"][k] for k in ("accuracy", "nmi", "f_measure")}}
    payload = {
        "schema": SWEEP_SCHEMA,
        "algorithm_version": __version__,
        "param": args.param,
        "grid": grid,
        "records": records,
        "best_by_nmi": best,
    }
    _write_json(args.output, payload)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([args.param, "accuracy", "nmi", "f_measure"])
    for row in rows:
        writer.writerow(["" if x is None else repr(x) for x in row])
    plot_path = args.plot_data
    if plot_path is None and args.output not in (None, "-"):
        plot_path = str(Path(args.output).with_suffix(".csv"))
    if plot_path is not None:
        Path(plot_path).write_text(buf.getvalue())
    _write_timing(args.output, time.perf_counter() - start)
    return 0


def cmd_synth(args):
    try:
        dims = [int(x) for x in str(args.dim).split(",")]
        kinds = tuple(x.strip() for x in args.views.split(","))
        spec = SynthSpec(
            n_per_cluster=args.n_per_cluster,
            n_clusters=args.k,
            dims=dims[0] if len(dims) == 1 else dims,
            separation=args.separation,
            views=kinds,
            seed=args.seed,
            sigma=args.sigma,
            normalization=Normalization(args.normalization),
            name=args.name,
        )
        dataset = generate(spec)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    path = write_manifest(dataset, args.output)
    print(path)
    return 0


def cmd_eval(args):
    try:
        record = json.loads(Path(args.result).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read result file: {exc}") from None
    labels = record.get("result", {}).get("labels")
    if labels is None:
        raise InputError("result file holds no labels")
    if args.labels:
        try:
            truth = np.loadtxt(args.labels, dtype=np.int64, delimiter=",", ndmin=1, skiprows=1 if args.header else 0)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read labels: {exc}") from None
    elif args.manifest:
        truth = _load(args.manifest).labels
        if truth is None:
            raise InputError("manifest has no labels")
    else:
        raise InputError("eval needs --labels or --manifest")
    if len(truth) != len(labels):
        raise InputError(f"length mismatch: {len(labels)} labels vs {len(truth)} classes")
    _write_json(args.output, {"result": str(args.result), "metrics": evaluate(labels, truth).as_dict()})
    return 0


# -- parser -------------------------------------------------------------------

def _solver_flags(p):
    p.add_argument("--manifest", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--m", type=float, default=1.5)
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--output", default=None, help="result path (stdout if omitted)")
    p.add_argument("--emit-memberships", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="minimaxfcm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="run MinimaxFCM on a manifest")
    _solver_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("baseline", help="single-view or concatenated-view FCM")
    _solver_flags(p)
    p.add_argument("--mode", choices=("single", "concat"), default="single")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("sweep", help="grid over gamma or m")
    _solver_flags(p)
    p.add_argument("--param", choices=("gamma", "m"), required=True)
    p.add_argument("--range", required=True, help="START:STOP:STEP, inclusive")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plot-data", default=None, help="CSV path (default: output with .csv suffix)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="write a synthetic dataset as manifest + CSV")
    p.add_argument("--output", required=True, help="target directory")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n-per-cluster", type=int, default=100)
    p.add_argument("--dim", default="5", help="one dimension, or a comma list per view")
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--views", default="informative,informative", help="comma list of informative|noise|copy:J")
    p.add_argument("--normalization", choices=[n.value for n in Normalization], default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default="synthetic")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="recompute metrics for a result file")
    p.add_argument("--result", required=True)
    p.add_argument("--labels", default=None, help="one integer per line")
    p.add_argument("--header", action="store_true", help="labels file has a header row")
    p.add_argument("--manifest", default=None, help="take ground truth from this manifest")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
