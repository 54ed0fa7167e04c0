"""Command-line entry point: ``run``, ``tables``, ``verify`` and ``t2``.

Exit codes: 0 success, 2 bad configuration or validation failure, 3 numerical
failure, 4 I/O failure, 5 verification thresholds not met.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .analytic import field_snapshot
from .config import BUNDLED, RunConfig, load_config
from .dispatch import activation_time_closed, activation_time_root, build_timeline, dispatch_report
from .errors import DomainError, NumericalError, ValidationError
from .reproduce import atomic_write, dump_json, field_csv, reproduce_tables, verify_states

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO, EXIT_VERIFY = 0, 2, 3, 4, 5


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _section_fields(rc: RunConfig, pair, states):
    with ThreadPoolExecutor(max_workers=len(states)) as pool:
        jobs = [pool.submit(field_snapshot, rc.validated, pair, rc.series, (st,)) for st in states]
        return [job.result()[0] for job in jobs]


def run_scenario(config_path: str, out_dir: str, si: bool = False) -> dict:
    """Evaluate a scenario and write its section CSVs, timeline, dispatch report and manifest."""
    rc = load_config(config_path)
    si = si or rc.si
    pair = rc.pair()
    states = rc.states()
    fields = _section_fields(rc, pair, states)
    timeline = build_timeline(rc.validated, pair, states[0], rc.series)
    report = dispatch_report(rc.validated, pair, states, rc.series, with_root=True)

    os.makedirs(out_dir, exist_ok=True)
    offsets = np.asarray(rc.scenario.t_grid, dtype=float)
    written = []
    for f in fields:
        name = f"section{f.section}.csv"
        atomic_write(os.path.join(out_dir, name), field_csv(f.x, offsets, f.p, si=si))
        written.append(name)
    atomic_write(os.path.join(out_dir, "timeline.json"), dump_json(timeline.to_dict()))
    dispatch = {**report.to_dict(), "ell1": pair.ell1, "ell3": pair.ell3, "connector": pair.n}
    atomic_write(os.path.join(out_dir, "dispatch.json"), dump_json(_jsonable(dispatch)))
    written += ["timeline.json", "dispatch.json"]
    manifest = {
        "tool": "gasleak",
        "version": __version__,
        "input_sha256": rc.sha256,
        "config_sha256": hashlib.sha256(dump_json(rc.document).encode()).hexdigest(),
        "config": rc.document,
        "outputs": written,
    }
    atomic_write(os.path.join(out_dir, "manifest.json"), dump_json(manifest))
    return dispatch


def verify(config_path: str, out_dir=None) -> dict:
    rc = load_config(config_path)
    report = verify_states(rc.params, rc.states(), rc.series, rc.fd)
    report = _jsonable(report)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        atomic_write(os.path.join(out_dir, "verify.json"), dump_json(report))
    return report


def activation(config_path: str, method: str = "closed") -> dict:
    rc = load_config(config_path)
    s1 = rc.states()[0]
    t1 = rc.scenario.t1
    out = {"t1": t1}
    if method in ("closed", "both"):
        t2 = activation_time_closed(rc.params, s1)
        out.update(t2_closed=t2, t2_closed_offset=t2 - t1)
    if method in ("root", "both"):
        t2 = activation_time_root(rc.params, s1, rc.series)
        out.update(t2_root=t2, t2_root_offset=t2 - t1)
    if method == "both":
        out["relative_gap"] = (out["t2_root_offset"] - out["t2_closed_offset"]) / out["t2_closed_offset"]
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gasleak",
        description="Leak isolation transients on a parallel main gas pipeline.")
    parser.add_argument("--version", action="version", version=f"gasleak {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evaluate a scenario file")
    run.add_argument("--config", required=True, help=f"scenario JSON ({BUNDLED} for the bundled example)")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--si", action="store_true", help="write x in m and pressures in Pa")

    tables = sub.add_parser("tables", help="regenerate the worked example's tables")
    tables.add_argument("--out", required=True)
    tables.add_argument("--tolerance", type=float, default=0.03,
                        help="relative error above which a cell is flagged")
    tables.add_argument("--si", action="store_true")

    ver = sub.add_parser("verify", help="compare series fields with the finite-difference oracle")
    ver.add_argument("--config", required=True)
    ver.add_argument("--out", help="directory for verify.json")

    t2 = sub.add_parser("t2", help="connector activation time")
    t2.add_argument("--config", required=True)
    t2.add_argument("--method", choices=("closed", "root", "both"), default="closed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            result = run_scenario(args.config, args.out, si=args.si)
            print(f"t2 = {result['t2']:.1f} s; outputs in {args.out}")
        elif args.command == "tables":
            report = reproduce_tables(args.out, tolerance=args.tolerance, si=args.si)
            print(json.dumps(report["summary"], sort_keys=True))
        elif args.command == "verify":
            report = verify(args.config, args.out)
            print(dump_json(report), end="")
            if not report["passed"]:
                print("verification thresholds not met", file=sys.stderr)
                return EXIT_VERIFY
        elif args.command == "t2":
            print(dump_json(activation(args.config, args.method)), end="")
    except (ValidationError, DomainError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK
