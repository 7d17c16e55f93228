"""Command line entry point: ``rwhull list | run | trace``.

Run configs are single JSON documents::

    {"experiment": "exp_degenerate",
     "dist": {"type": "degenerate_diag"},
     "n_grid": [256, 1024, 4096], "trials": 200000, "seed": 20240501,
     "grids": {"hausdorff_m": 4096}, "params": {"mean_tol": 0.02},
     "out": "results/degenerate", "formats": ["csv", "json"], "threads": 4}

``--config`` takes a path or the name of a packaged config; ``--set a.b=v``
overrides a dotted key (``v`` is parsed as JSON, else kept as a string).

Outputs of ``run`` (all in ``--out``):

* ``result.json`` -- rows, assertions with their bounds, metadata including the
  resolved config; keys sorted, UTF-8.
* ``result.csv`` -- RFC 4180, header ``n,statistic,value,se``, floats with 17
  significant digits, empty ``se`` when not applicable.
* ``timing.json`` -- wall time, kept apart so the result files replay
  byte-for-byte.
* ``result.gp`` -- gnuplot script (with ``--format gnuplot``).

Exit codes: 0 all assertions pass, 2 some assertion failed, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import functionals as fn
from . import geom2d, walk
from .rng import RandomStream

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2
FORMATS = ("csv", "json", "gnuplot")
RUN_KEYS = {"experiment", "dist", "n_grid", "trials", "seed", "grids", "params",
            "out", "formats", "threads"}


class ConfigError(Exception):
    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


# --- config handling ---------------------------------------------------------

def builtin_configs() -> list[str]:
    root = resources.files("rwhull") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def _read_config(ref: str) -> tuple[str, str]:
    path = Path(ref)
    if path.is_file():
        return str(path), path.read_text(encoding="utf-8")
    if ref in builtin_configs():
        res = resources.files("rwhull") / "configs" / f"{ref}.json"
        return f"<builtin {ref}>", res.read_text(encoding="utf-8")
    raise ConfigError(f"no such config file or builtin config: {ref}")


def _line_of(text: str, key: str | None) -> int:
    if not key:
        return 1
    leaf = key.split(".")[-1]
    needle = f'"{leaf}"'
    for k, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return k
    return 1


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(cfg: dict, item: str) -> None:
    if "=" not in item:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    key, raw = item.split("=", 1)
    parts = key.strip().split(".")
    if not all(parts):
        raise ConfigError(f"bad override key {key!r}")
    node = cfg
    for p in parts[:-1]:
        nxt = node.get(p)
        if nxt is None:
            nxt = node[p] = {}
        if not isinstance(nxt, dict):
            raise ConfigError(f"cannot set {key!r}: {p!r} is not an object", key)
        node = nxt
    node[parts[-1]] = _parse_value(raw)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def validate_run_config(cfg) -> dict:
    """Check the RunConfig keys and numeric fields; returns a resolved copy."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    extra = sorted(set(cfg) - RUN_KEYS)
    if extra:
        raise ConfigError(f"unknown key {extra[0]!r}", extra[0])
    for key in ("experiment", "dist", "n_grid", "trials", "seed"):
        if key not in cfg:
            raise ConfigError(f"missing key {key!r}")
    if cfg["experiment"] not in ex.REGISTRY:
        raise ConfigError(f"unknown experiment {cfg['experiment']!r}", "experiment")
    if not _is_int(cfg["trials"]) or cfg["trials"] < 1:
        raise ConfigError(f"trials must be a positive integer, got {cfg['trials']!r}", "trials")
    if not _is_int(cfg["seed"]) or not 0 <= cfg["seed"] < 1 << 64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {cfg['seed']!r}", "seed")
    grid = cfg["n_grid"]
    if (not isinstance(grid, list) or not grid or not all(_is_int(n) and n >= 1 for n in grid)):
        raise ConfigError("n_grid must be a non-empty list of positive integers", "n_grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("n_grid must be strictly increasing", "n_grid")
    if "threads" in cfg and (not _is_int(cfg["threads"]) or cfg["threads"] < 1):
        raise ConfigError("threads must be a positive integer", "threads")
    formats = cfg.get("formats", ["csv", "json"])
    if isinstance(formats, str):
        formats = [f for f in formats.split(",") if f]
    if not isinstance(formats, list) or not set(formats) <= set(FORMATS):
        raise ConfigError(f"formats must be a subset of {list(FORMATS)}", "formats")
    for key in ("grids", "params"):
        if key in cfg and not isinstance(cfg[key], dict):
            raise ConfigError(f"{key} must be an object", key)
    for key, v in (cfg.get("grids") or {}).items():
        if key != "hausdorff_m":
            raise ConfigError(f"unknown grid {key!r}", key)
        if not _is_int(v) or v < 16:
            raise ConfigError("hausdorff_m must be an integer >= 16", key)
    spec_cfg = {k: cfg[k] for k in ("experiment", "dist", "n_grid", "trials", "seed",
                                    "grids", "params") if k in cfg}
    try:
        walk.from_dict(cfg["dist"])
    except (walk.DistributionError, TypeError, ValueError) as e:
        raise ConfigError(f"dist: {e}", "dist") from None
    try:
        ex.resolve_params(cfg["experiment"], dict(cfg.get("params") or {}))
    except ex.ExperimentError as e:
        raise ConfigError(str(e), "params") from None
    out = dict(cfg)
    out["formats"] = sorted(set(formats), key=FORMATS.index)
    out["spec"] = spec_cfg
    return out


def load_run_config(ref: str, overrides=()) -> tuple[dict, str, str]:
    source, text = _read_config(ref)
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    for item in overrides:
        apply_override(cfg, item)
    return cfg, source, text


# --- output ----------------------------------------------------------------

def _num(v):
    """JSON-safe number: non-finite floats become null."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, dict):
        return {str(k): _num(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    return v


def dumps_json(obj) -> str:
    return json.dumps(_num(obj), sort_keys=True, indent=2, ensure_ascii=False,
                      allow_nan=False) + "\n"


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    return format(v, ".17g")


def result_csv(result: ex.ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["n", "statistic", "value", "se"])
    for r in result.rows:
        w.writerow([r.n, r.statistic, fmt(r.value), fmt(r.se)])
    return buf.getvalue()


def result_gnuplot(result: ex.ExperimentResult, csv_name: str = "result.csv") -> str:
    stats = list(dict.fromkeys(r.statistic for r in result.rows))
    lines = [
        f"# {result.name}: each statistic against n",
        'set datafile separator ","',
        "set logscale x",
        "set xlabel 'n'",
        "set key outside",
        "set terminal pngcairo size 900,600",
    ]
    for s in stats:
        lines += [f"set output '{result.name}_{s}.png'",
                  f"set title '{s}'",
                  f"plot '{csv_name}' skip 1 using (strcol(2) eq \"{s}\" ? $1 : NaN):3 "
                  f"with linespoints title '{s}'"]
    return "\n".join(lines) + "\n"


def write_outputs(result: ex.ExperimentResult, out: Path, formats) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        p = out / name
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        written.append(p)

    if "json" in formats:
        put("result.json", dumps_json(result.to_dict()))
    if "csv" in formats:
        put("result.csv", result_csv(result))
    if "gnuplot" in formats:
        put("result.gp", result_gnuplot(result))
    put("timing.json", dumps_json({"wall_time_seconds": round(result.wall_time, 3)}))
    return written


def summary_table(result: ex.ExperimentResult) -> str:
    lines = [f"{result.name}: {'PASS' if result.passed else 'FAIL'}"]
    w = max((len(a.name) for a in result.assertions), default=4)
    for a in result.assertions:
        lo = "-inf" if a.lower is None else f"{a.lower:.6g}"
        hi = "inf" if a.upper is None else f"{a.upper:.6g}"
        lines.append(f"  {'ok  ' if a.passed else 'FAIL'} {a.name:<{w}}  {a.value:.6g}  "
                     f"in [{lo}, {hi}]")
    return "\n".join(lines)


# --- commands ----------------------------------------------------------------

def cmd_list(args) -> int:
    w = max(len(k) for k in ex.REGISTRY)
    for name, e in ex.REGISTRY.items():
        print(f"{name:<{w}}  [{e.reference}]  {e.summary}")
    return EXIT_OK


def cmd_run(args) -> int:
    text = ""
    source = args.config
    try:
        cfg, source, text = load_run_config(args.config, args.set or [])
        if args.format:
            cfg["formats"] = args.format
        if args.threads:
            cfg["threads"] = args.threads
        cfg = validate_run_config(cfg)
        spec = ex.spec_from_config(cfg["spec"])
    except ConfigError as e:
        msg = str(e)
        if e.key is not None or not msg.startswith(source):
            msg = f"{source}:{_line_of(text, e.key)}: {msg}"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_ERROR
    except (ex.ExperimentError, walk.DistributionError) as e:
        print(f"error: {source}:1: {e}", file=sys.stderr)
        return EXIT_ERROR
    fn.set_threads(cfg.get("threads"))
    try:
        result = ex.run_experiment(spec)
    except ex.ExperimentError as e:
        print(f"error: {source}:{_line_of(text, 'experiment')}: {e}", file=sys.stderr)
        return EXIT_ERROR
    out = Path(args.out or cfg.get("out") or os.path.join("results", spec.name))
    write_outputs(result, out, cfg["formats"])
    print(summary_table(result))
    print(f"wrote {out}/ ({result.wall_time:.1f} s)")
    return EXIT_OK if result.passed else EXIT_FAILED


def _load_dist(ref: str) -> walk.IncrementDistribution:
    p = Path(ref)
    text = p.read_text(encoding="utf-8") if p.is_file() else ref
    data = json.loads(text)
    if isinstance(data, dict) and "dist" in data and "type" not in data:
        data = data["dist"]
    return walk.from_dict(data)


def trace_csv(tr: fn.FunctionalTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["n", "L", "D", "r", "s_norm", "x_proj", "ratio"])
    for row in tr.rows():
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def shape_csv(checkpoints, path: walk.Path, hausdorff_m: int) -> str:
    """Hausdorff distance of the unit-diameter prefix hull to each target."""
    targets = [ex.TargetShape("segment"), ex.TargetShape("disc"), ex.TargetShape("square")]
    grid = geom2d.DirectionGrid(hausdorff_m)
    tsup = np.array([geom2d.support_values(t.polygon(), grid) for t in targets])
    hd = fn.shape_distances(path, checkpoints, tsup, grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["n"] + [f"hausdorff_{t.label}" for t in targets])
    for k, row in zip(checkpoints, hd):
        w.writerow([int(k)] + [fmt(v) for v in row])
    return buf.getvalue()


def trace_gnuplot(trace_name: str, shape_name: str) -> str:
    return "\n".join([
        "# L/D and Hausdorff distances to unit-diameter targets against n",
        'set datafile separator ","',
        "set logscale x",
        "set xlabel 'n'",
        "set key outside",
        "set terminal pngcairo size 900,600",
        f"set output '{Path(trace_name).stem}_ratio.png'",
        "set ylabel 'L/D'",
        "set yrange [1.9:3.2]",
        f"plot '{trace_name}' skip 1 using 1:7 with lines title 'L/D', 2 title 'segment', "
        "pi title 'disc'",
        f"set output '{Path(trace_name).stem}_hausdorff.png'",
        "set ylabel 'Hausdorff distance'",
        "set autoscale y",
        f"plot '{shape_name}' skip 1 using 1:2 with lines title 'segment', "
        "'' skip 1 using 1:3 with lines title 'disc', "
        "'' skip 1 using 1:4 with lines title 'square'",
    ]) + "\n"


def cmd_trace(args) -> int:
    try:
        dist = _load_dist(args.dist)
        if args.n < 0:
            raise ValueError("n must be non-negative")
        if not 0 <= args.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if args.hausdorff_m < 16:
            raise ValueError("hausdorff_m must be >= 16")
    except (OSError, json.JSONDecodeError, walk.DistributionError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    path = walk.sample_path(dist, args.n, RandomStream(args.seed, args.stream))
    ds = dist.moments()
    cp = fn.default_checkpoints(args.n)
    tr = fn.trace(path, cp, ds.mu_hat)
    out = Path(args.out)
    if out.suffix != ".csv":
        out = out / "trace.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    shape_path = out.with_name(out.stem + "_shape.csv")
    formats = args.format or list(FORMATS)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(trace_csv(tr))
    if "gnuplot" in formats:
        with open(shape_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(shape_csv(cp, path, args.hausdorff_m))
        with open(out.with_suffix(".gp"), "w", encoding="utf-8", newline="") as fh:
            fh.write(trace_gnuplot(out.name, shape_path.name))
    bad = tr.check_invariants()
    print(f"wrote {out} ({cp.size} checkpoints)")
    for b in bad:
        print(f"invariant violated: {b}", file=sys.stderr)
    return EXIT_FAILED if bad else EXIT_OK


def _formats(text: str) -> list[str]:
    items = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in items if f not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}; choose from {list(FORMATS)}")
    return items


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rwhull",
                                 description="Convex hulls of planar random walks: "
                                             "Monte Carlo experiments and traces.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list registered experiments")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("run", help="run one experiment from a JSON config")
    p.add_argument("--config", required=True, help="config path or builtin config name")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="dotted-path override, value parsed as JSON (repeatable)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", type=int, help="worker threads")
    p.add_argument("--format", type=_formats, help="comma list of csv,json,gnuplot")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("trace", help="dump the functionals of one trajectory")
    p.add_argument("--dist", required=True,
                   help="distribution as JSON text, or a JSON file (a run config works too)")
    p.add_argument("--n", type=int, required=True, help="number of steps")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0, help="stream id within the seed")
    p.add_argument("--out", required=True, help="CSV path (or directory for trace.csv)")
    p.add_argument("--hausdorff-m", type=int, default=geom2d.DEFAULT_HAUSDORFF_M)
    p.add_argument("--format", type=_formats, help="csv,gnuplot (default both)")
    p.set_defaults(func=cmd_trace)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
