"""Command line interface: ``simulate``, ``validate`` and ``sweep``.

Exit codes: 0 when the run converged (``validate``: always on a valid
config), 2 when a run stopped for any other reason, 1 on configuration
errors. ``CAPFLOW_OUT`` overrides the output directory of the config.
"""
from __future__ import annotations

import argparse
import copy
import csv
import itertools
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import yaml

from . import __version__
from .classify import volume_matched_radius
from .config import ConfigError, SimConfig, config_to_dict, from_dict, load_config
from .io import fmt, write_profile, write_timeseries
from .scenarios import build, validate
from .stepper import Status, run

__all__ = ["cmd_simulate", "cmd_validate", "cmd_sweep", "expand_grid", "main"]

logger = logging.getLogger("capflow")

EXIT_OK, EXIT_CONFIG, EXIT_STOPPED = 0, 1, 2
ENV_OUT = "CAPFLOW_OUT"


def _clean(x):
    # JSON has no NaN/inf
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def output_dir(cfg: SimConfig, override=None) -> Path:
    if override is not None:
        return Path(override)
    return Path(os.environ.get(ENV_OUT) or cfg.output.dir)


def cmd_simulate(cfg: SimConfig, out_dir=None) -> int:
    """Run one simulation and write its time series, snapshots and summary."""
    out = output_dir(cfg, out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    result = run(cfg)
    wall = time.perf_counter() - start

    if cfg.output.csv:
        write_timeseries(out / "timeseries.csv", result.ledger)
    snaps = result.snapshots or [(0, 0.0, build(cfg.scenario)), (result.steps, result.t, result.profile)]
    names = []
    for i, (_, _, p) in enumerate(snaps):
        name = f"profile_{i:04d}.csv"
        write_profile(out / name, p)
        names.append(name)

    code = EXIT_OK if result.status is Status.CONVERGED else EXIT_STOPPED
    b = result.bounds
    p0 = snaps[0][2]
    summary = {
        "status": result.status.value,
        "exit_code": code,
        "verdict": result.classification.verdict.value,
        "classification": result.classification.as_dict(),
        "radii": {
            "limit": result.classification.limit_radius,
            "area_matched": result.classification.predicted_radius,
            "volume_matched": volume_matched_radius(b.volume, p0.n, p0.grid.d),
            "R_bound": b.R_bound,
        },
        "initial": validate(p0).as_dict(),
        "t_final": result.t,
        "steps": result.steps,
        "violations": [v._asdict() for v in result.ledger.violations],
        "snapshots": [
            {"file": name, "step": s, "t": t} for name, (s, t, _) in zip(names, snaps)
        ],
        "final_profile": names[-1],
        "config": config_to_dict(cfg),
    }
    if cfg.output.json_summary:
        _write_json(out / "summary.json", summary)
        # kept apart so that summary.json is reproducible bit for bit
        _write_json(out / "timing.json", {"wall_time_s": wall})
    logger.info("%s: %s after %d steps (t=%.6g)", out, result.status.value, result.steps, result.t)
    return code


def cmd_validate(cfg: SimConfig, stream=None) -> int:
    report = validate(build(cfg.scenario)).as_dict()
    print(json.dumps(_clean(report), indent=2, sort_keys=True), file=stream or sys.stdout)
    return EXIT_OK


def _set_dotted(raw: dict, dotted: str, value) -> None:
    node = raw
    parts = dotted.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(dotted, "cannot override inside a scalar")
    node[parts[-1]] = value


def expand_grid(grid: dict) -> list[dict]:
    """Cartesian product of ``{dotted.key: [values]}`` as a list of override mappings."""
    if not isinstance(grid, dict) or not grid:
        raise ConfigError("<grid>", "expected a non-empty mapping of dotted keys to value lists")
    keys = list(grid)
    lists = []
    for k in keys:
        values = grid[k]
        if not isinstance(values, list) or not values:
            raise ConfigError(k, "grid entries must be non-empty lists")
        lists.append(values)
    return [dict(zip(keys, combo)) for combo in itertools.product(*lists)]


def _sweep_one(args):
    raw, run_dir = args
    cfg = from_dict(raw)
    code = cmd_simulate(cfg, run_dir)
    summary = json.loads((Path(run_dir) / "summary.json").read_text())
    return code, summary


def cmd_sweep(template: dict, grid: dict, out_dir=None, jobs: int = 1) -> int:
    """One run per grid point in ``run_XXXX`` subdirectories, indexed by ``sweep.csv``.

    Every run is validated before any of them starts.
    """
    if not isinstance(template, dict):
        raise ConfigError("<config>", "expected a mapping")
    if out_dir is None:
        out_dir = os.environ.get(ENV_OUT) or (template.get("output") or {}).get("dir", "capflow_out")
    base = Path(out_dir)
    overrides = expand_grid(grid)
    tasks = []
    for i, ov in enumerate(overrides):
        raw = copy.deepcopy(template)
        for k, v in ov.items():
            _set_dotted(raw, k, v)
        raw.setdefault("output", {})["json_summary"] = True
        from_dict(raw)
        tasks.append((raw, str(base / f"run_{i:04d}")))
    base.mkdir(parents=True, exist_ok=True)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, tasks))
    else:
        results = [_sweep_one(t) for t in tasks]

    keys = list(overrides[0])
    with open(base / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", "dir", *keys, "status", "verdict", "limit_radius", "area_matched_radius", "exit_code"])
        for i, (ov, (code, s)) in enumerate(zip(overrides, results)):
            lim = s["radii"]["limit"]
            w.writerow(
                [
                    i,
                    f"run_{i:04d}",
                    *(ov[k] for k in keys),
                    s["status"],
                    s["verdict"],
                    "" if lim is None else fmt(lim),
                    fmt(s["radii"]["area_matched"]),
                    code,
                ]
            )
    return EXIT_OK if all(code == EXIT_OK for code, _ in results) else EXIT_STOPPED


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capflow", description="Area-preserving curvature flow between two slabs")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one configured simulation")
    p.add_argument("--config", required=True)

    p = sub.add_parser("validate", help="report mean convexity and the area/volume hypothesis")
    p.add_argument("--config", required=True)

    p = sub.add_parser("sweep", help="run the cartesian product of parameter overrides")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", required=True, help="YAML mapping of dotted keys to value lists")
    p.add_argument("--jobs", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "sweep":
            with open(args.config, encoding="utf-8") as fh:
                template = yaml.safe_load(fh)
            with open(args.grid, encoding="utf-8") as fh:
                grid = yaml.safe_load(fh)
            return cmd_sweep(template, grid, jobs=args.jobs)
        cfg = load_config(args.config)
        if args.command == "validate":
            return cmd_validate(cfg)
        return cmd_simulate(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
