"""Regenerate the worked example's tables and cross-check analytic fields against the FD oracle."""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile

import numpy as np

from . import presets
from .analytic import preclosure_profile, preclosure_state, section_field
from .dispatch import activation_time_closed, activation_time_root
from .domain import SeriesConfig, ValidatedScenario, km, to_km, to_table_units
from .errors import NumericalError
from .oracle import FDConfig, convergence_order, fd_solve, mass_balance_residual

#: Early times excluded from analytic-vs-FD comparisons (s after closure).
EARLY_WINDOW = 10.0


def fmt(value: float) -> str:
    return f"{value:.6g}"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def field_csv(x, offsets, p, si: bool = False) -> str:
    """Table-style CSV: first column position, one column per offset since closure."""
    head = "x_m" if si else "x_km"
    lines = [",".join([head] + [f"t_{fmt(t)}" for t in offsets])]
    xs = np.asarray(x, dtype=float) if si else to_km(np.asarray(x, dtype=float))
    vals = p if si else to_table_units(p)
    for xi, row in zip(np.atleast_1d(xs), np.atleast_2d(vals)):
        lines.append(",".join([fmt(float(xi))] + [fmt(float(v)) for v in row]))
    return "\n".join(lines) + "\n"


def _fd_at(state, x, t_abs, fd: FDConfig):
    run = dataclasses.replace(fd, horizon=float(t_abs[-1] - state.t_start))
    field = fd_solve(state, run, t_out=t_abs)
    idx = [int(np.argmin(np.abs(field.x - xi))) for xi in x]
    return field.p[idx, :], field


def table1(vs: ValidatedScenario, cfg: SeriesConfig = SeriesConfig(),
           fd: FDConfig = FDConfig()) -> list:
    """Pre-closure profile at ``t1``: published, series and whole-line FD values (Pa)."""
    xs = km(presets.TABLE1_X_KM)
    t1 = vs.scenario.t1
    analytic = preclosure_profile(xs, t1, vs, cfg)
    whole = preclosure_state(vs)
    fd_vals, _ = _fd_at(whole, xs, np.array([t1]), fd)
    rows = []
    for xk, paper, a, f in zip(presets.TABLE1_X_KM, presets.TABLE1_P, analytic, fd_vals[:, 0]):
        paper_pa = paper * 1e4
        rows.append({"x_km": float(xk), "paper": paper_pa, "analytic": float(a), "fd": float(f),
                     "rel_err": float((a - paper_pa) / paper_pa),
                     "fd_rel_err": float((f - paper_pa) / paper_pa)})
    return rows


def section_tables(states=None, cfg: SeriesConfig = SeriesConfig(),
                   fd: FDConfig = FDConfig()) -> dict:
    """Series and FD values on the grids of the three transient tables (Pa)."""
    states = presets.paper_fit_states() if states is None else states
    out = {}
    for st in states:
        x_km, paper = presets.SECTION_TABLES[st.id]
        xs = km(x_km)
        t_abs = st.t_start + presets.TABLE_TIMES
        analytic = section_field(xs, t_abs, st, cfg)
        fd_vals, _ = _fd_at(st, xs, t_abs, fd)
        out[st.id] = {"x_km": x_km, "paper": paper * 1e4, "analytic": analytic, "fd": fd_vals}
    return out


def table_diff(tables: dict, tolerance: float = 0.03, fd_tolerance: float = 0.01) -> dict:
    cells = []
    for sid, tab in sorted(tables.items()):
        for i, xk in enumerate(tab["x_km"]):
            for j, t in enumerate(presets.TABLE_TIMES):
                paper, got, ref = tab["paper"][i, j], tab["analytic"][i, j], tab["fd"][i, j]
                rel = (got - paper) / paper
                fd_dev = (got - ref) / ref
                cells.append({
                    "table": sid + 1, "x_km": float(xk), "t_s": float(t),
                    "paper": float(paper), "computed": float(got), "fd": float(ref),
                    "rel_err": float(rel), "fd_rel_dev": float(fd_dev),
                    "flagged": bool(abs(rel) > tolerance),
                    "fd_agrees": bool(abs(fd_dev) <= fd_tolerance),
                })
    within = sum(not c["flagged"] for c in cells)
    outliers = [c for c in cells if c["flagged"]]
    return {
        "tolerance": tolerance,
        "cells": cells,
        "summary": {
            "cells": len(cells),
            "within_tolerance": within,
            "fraction_within": within / len(cells) if cells else 1.0,
            "outliers": len(outliers),
            "outliers_explained_by_fd": all(c["fd_agrees"] for c in outliers),
            "max_abs_rel_err": max((abs(c["rel_err"]) for c in cells), default=0.0),
        },
    }


def reproduce_tables(out_dir, tolerance: float = 0.03, si: bool = False,
                     cfg: SeriesConfig = SeriesConfig(), fd: FDConfig = FDConfig()) -> dict:
    """Write ``table1.csv`` .. ``table4.csv`` and ``table_diff.json`` for the paper-fit preset."""
    os.makedirs(out_dir, exist_ok=True)
    vs = presets.paper_validated()
    rows = table1(vs, cfg, fd)
    scale = 1.0 if si else 1e-4
    lines = ["x_km,paper,analytic,fd"]
    for r in rows:
        lines.append(",".join(fmt(v) for v in (r["x_km"], r["paper"] * scale,
                                                 r["analytic"] * scale, r["fd"] * scale)))
    atomic_write(os.path.join(out_dir, "table1.csv"), "\n".join(lines) + "\n")

    tabs = section_tables(cfg=cfg, fd=fd)
    for sid, tab in tabs.items():
        text = field_csv(km(tab["x_km"]), presets.TABLE_TIMES, tab["analytic"], si=si)
        atomic_write(os.path.join(out_dir, f"table{sid + 1}.csv"), text)
    report = table_diff(tabs, tolerance)
    report["table1"] = rows
    report["table1_max_abs_rel_err"] = {
        "analytic": max(abs(r["rel_err"]) for r in rows),
        "fd": max(abs(r["fd_rel_err"]) for r in rows),
    }
    atomic_write(os.path.join(out_dir, "table_diff.json"), dump_json(report))
    return report


def smooth_probe(state):
    """A compatible-data variant of a section for order studies: closure source only."""
    return dataclasses.replace(state, flux_lo=0.0, flux_hi=0.0, leak=None, leak_at=None,
                               g_lo=-0.5, g_hi=0.0, t_start=2.0)


def verify_states(params, states, cfg: SeriesConfig, fd: FDConfig,
                  max_dev: float = 0.01, max_residual: float = 1e-8,
                  order_band: tuple = (1.8, 2.2)) -> dict:
    """Analytic-vs-FD deviations, mass balance, observed order and both activation times."""
    sections = []
    for st in states:
        field = fd_solve(st, fd)
        late = field.t - st.t_start >= EARLY_WINDOW
        entry = {"section": st.id, "residual": mass_balance_residual(field, st)}
        if late.any():
            ref = section_field(field.x, field.t[late], st, cfg)
            dev = np.abs(ref - field.p[:, late]) / np.abs(ref)
            entry.update(max_rel_dev=float(dev.max()), mean_rel_dev=float(dev.mean()))
        else:
            entry.update(max_rel_dev=0.0, mean_rel_dev=0.0)
        entry["passed"] = entry["max_rel_dev"] <= max_dev and entry["residual"] < max_residual
        sections.append(entry)

    probe = smooth_probe(states[0])
    try:
        order = convergence_order(probe, dataclasses.replace(fd, horizon=min(fd.horizon, 600.0)))
    except NumericalError:
        order = None
    # An order study needs the probe grid to nest; when it does not, it is skipped.
    order_ok = order is None or order_band[0] <= order <= order_band[1]
    t2 = {"closed": None, "root": None}
    try:
        t2["closed"] = activation_time_closed(params, states[0])
    except NumericalError as exc:
        t2["closed_error"] = type(exc).__name__
    try:
        t2["root"] = activation_time_root(params, states[0], cfg)
    except NumericalError as exc:
        t2["root_error"] = type(exc).__name__
    return {
        "sections": sections,
        "convergence_order": order,
        "t2": t2,
        "thresholds": {"max_rel_dev": max_dev, "max_residual": max_residual,
                       "early_window_s": EARLY_WINDOW, "order_band": list(order_band)},
        "passed": all(s["passed"] for s in sections) and order_ok,
    }
