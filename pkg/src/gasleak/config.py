"""JSON scenario files: parsing, defaults, and conversion to domain values.

A scenario file is a JSON object with the sections ``line``, ``leak``,
``series``, ``fd``, ``fit`` and ``outputs``.  Everything is SI (m, s, Pa,
Pa*s/m); ``outputs.t_grid`` holds offsets since closure.  Unknown keys are
rejected with the dotted path of the offending key.  A run manifest is also
accepted: its embedded ``config`` is used.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Union

import numpy as np

from . import presets
from .analytic import closure_states
from .domain import LeakFluxModel, LeakScenario, LineParams, SeriesConfig, ValidatedScenario, validate
from .errors import ValidationError
from .oracle import FDConfig
from .placement import TIE_BREAKS, ValvePair, locate_isolation_valves

#: ``--config`` value that selects the bundled worked-example scenario.
BUNDLED = "@paper"

_LINE_KEYS = ("c", "two_a", "L", "step", "Pb", "Ps", "G0", "Gs", "eps")
_META_KEYS = ("d", "rho_avg", "v_avg", "lambda_hyd")


class ConfigError(ValidationError):
    """Malformed scenario file: bad JSON, unknown or missing key, wrong type."""


@dataclass(frozen=True)
class RunConfig:
    validated: ValidatedScenario
    series: SeriesConfig
    fd: FDConfig
    fit: Union[str, dict]
    si: bool
    document: dict
    sha256: str

    @property
    def params(self) -> LineParams:
        return self.validated.params

    @property
    def scenario(self) -> LeakScenario:
        return self.validated.scenario

    def pair(self) -> ValvePair:
        p, s = self.params, self.scenario
        return locate_isolation_valves(s.ell2, p.step, p.L, tie_break=self.validated.tie_break)

    def gradients(self) -> tuple:
        if self.fit == "paper-fit":
            return presets.PAPER_FIT.g_lo, presets.PAPER_FIT.g_hi
        if self.fit == "none":
            return 0.0, 0.0
        return self.fit["g_lo"], self.fit["g_hi"]

    def states(self) -> tuple:
        """Closure states: published-profile seeds for ``paper-fit``, series seeds otherwise."""
        pair = self.pair()
        g_lo, g_hi = self.gradients()
        if self.fit == "paper-fit":
            return presets.seeded_states(self.params, self.scenario, pair, g_lo, g_hi)
        return closure_states(self.validated, pair, self.series, g_lo, g_hi)


def _reject_unknown(obj: dict, allowed, where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key '{where}{key}'")


def _section(doc: dict, name: str, required: bool = True) -> dict:
    if name not in doc:
        if required:
            raise ConfigError(f"missing key '{name}'")
        return {}
    value = doc[name]
    if not isinstance(value, dict):
        raise ConfigError(f"'{name}' must be an object")
    return value


def _number(obj: dict, key: str, where: str, default=None) -> float:
    if key not in obj:
        if default is None:
            raise ConfigError(f"missing key '{where}{key}'")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"'{where}{key}' must be a finite number, got {v!r}")
    return float(v)


def _numbers(obj: dict, key: str, where: str, default=()) -> tuple:
    v = obj.get(key, default)
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"'{where}{key}' must be a list of numbers")
    return tuple(_number({key: x}, key, where) for x in v)


def _line(doc: dict) -> LineParams:
    sec = _section(doc, "line")
    _reject_unknown(sec, _LINE_KEYS + ("meta",), "line.")
    values = {k: _number(sec, k, "line.") for k in _LINE_KEYS}
    meta = sec.get("meta", {})
    if not isinstance(meta, dict):
        raise ConfigError("'line.meta' must be an object")
    _reject_unknown(meta, _META_KEYS, "line.meta.")
    meta_items = tuple(sorted((k, _number(meta, k, "line.meta.")) for k in meta))
    return LineParams(meta=meta_items, **values)


def _flux(sec: dict) -> LeakFluxModel:
    spec = sec.get("flux")
    if spec is None:
        raise ConfigError("missing key 'leak.flux'")
    if not isinstance(spec, dict):
        raise ConfigError("'leak.flux' must be an object")
    _reject_unknown(spec, ("kind", "values", "times"), "leak.flux.")
    kind = spec.get("kind", "constant")
    if kind not in ("constant", "piecewise-linear"):
        raise ConfigError(f"'leak.flux.kind' must be constant or piecewise-linear, got {kind!r}")
    values = _numbers(spec, "values", "leak.flux.")
    times = _numbers(spec, "times", "leak.flux.")
    model = LeakFluxModel(kind, values, times)
    model.check()
    return model


def _default_t_grid(t1: float, horizon: float) -> tuple:
    return tuple(np.linspace(0.0, horizon - t1, 11).tolist())


def _default_x_grid(line: LineParams, ell2: float) -> tuple:
    n = max(int(round(2 * line.L / line.step)), 1)
    xs = np.union1d(np.linspace(0.0, line.L, n + 1), [ell2])
    return tuple(xs.tolist())


def _fit(doc: dict):
    fit = doc.get("fit", "none")
    if isinstance(fit, str):
        if fit not in ("paper-fit", "none"):
            raise ConfigError(f"'fit' must be 'paper-fit', 'none' or an object, got {fit!r}")
        return fit
    if not isinstance(fit, dict):
        raise ConfigError("'fit' must be a string or an object")
    _reject_unknown(fit, ("g_lo", "g_hi"), "fit.")
    return {"g_lo": _number(fit, "g_lo", "fit.", 0.0), "g_hi": _number(fit, "g_hi", "fit.", 0.0)}


def parse_config(doc: dict, sha256: str = "") -> RunConfig:
    """Turn a decoded scenario document into validated run settings."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario file must hold a JSON object")
    if "config" in doc and "input_sha256" in doc:
        return parse_config(doc["config"], sha256)
    _reject_unknown(doc, ("line", "leak", "series", "fd", "fit", "outputs"), "")
    line = _line(doc)

    leak = _section(doc, "leak")
    _reject_unknown(leak, ("ell2", "t1", "horizon", "flux", "tie_break"), "leak.")
    ell2 = _number(leak, "ell2", "leak.")
    t1 = _number(leak, "t1", "leak.")
    horizon = _number(leak, "horizon", "leak.", t1 + 600.0)
    tie_break = leak.get("tie_break", "reject")
    if tie_break not in TIE_BREAKS:
        raise ConfigError(f"'leak.tie_break' must be one of {TIE_BREAKS}, got {tie_break!r}")
    flux = _flux(leak)

    series = _section(doc, "series", required=False)
    _reject_unknown(series, ("n_max", "tail_tol"), "series.")
    n_max = _number(series, "n_max", "series.", 500.0)
    if n_max != int(n_max):
        raise ConfigError("'series.n_max' must be an integer")
    scfg = SeriesConfig(int(n_max), _number(series, "tail_tol", "series.", 1e-12))
    scfg.check()

    fd = _section(doc, "fd", required=False)
    _reject_unknown(fd, ("dx", "dt", "theta", "horizon"), "fd.")
    fcfg = FDConfig(_number(fd, "dx", "fd.", 100.0), _number(fd, "dt", "fd.", 1.0),
                    _number(fd, "theta", "fd.", 0.5), _number(fd, "horizon", "fd.", horizon - t1))
    fcfg.check()

    fit = _fit(doc)

    out = _section(doc, "outputs", required=False)
    _reject_unknown(out, ("x_grid", "t_grid", "si"), "outputs.")
    x_grid = _numbers(out, "x_grid", "outputs.") if "x_grid" in out else _default_x_grid(line, ell2)
    t_grid = (_numbers(out, "t_grid", "outputs.") if "t_grid" in out
              else _default_t_grid(t1, horizon))
    si = out.get("si", False)
    if not isinstance(si, bool):
        raise ConfigError("'outputs.si' must be true or false")

    scenario = LeakScenario(ell2, t1, flux, horizon, x_grid, t_grid)
    vs = validate(line, scenario, tie_break=tie_break)
    if fit == "paper-fit":
        pair = locate_isolation_valves(ell2, line.step, line.L, tie_break)
        ends = (0.0, pair.ell1, pair.ell3, line.L)
        if not all(presets.table1_covers(a, b) for a, b in zip(ends[:-1], ends[1:])):
            raise ConfigError("'fit': paper-fit seeds sections from the published profile, "
                              "which has no samples at these valve positions")

    document = {
        "line": {**{k: getattr(line, k) for k in _LINE_KEYS}, "meta": dict(line.meta)},
        "leak": {"ell2": ell2, "t1": t1, "horizon": horizon, "tie_break": tie_break,
                 "flux": {"kind": flux.kind, "values": list(flux.values),
                          "times": list(flux.times)}},
        "series": {"n_max": scfg.n_max, "tail_tol": scfg.tail_tol},
        "fd": {"dx": fcfg.dx, "dt": fcfg.dt, "theta": fcfg.theta, "horizon": fcfg.horizon},
        "fit": fit,
        "outputs": {"x_grid": list(x_grid), "t_grid": list(t_grid), "si": si},
    }
    return RunConfig(vs, scfg, fcfg, fit, si, document, sha256)


def bundled_text() -> bytes:
    return resources.files("gasleak").joinpath("data/paper.json").read_bytes()


def load_config(path: str) -> RunConfig:
    """Read and parse a scenario file (``@paper`` selects the bundled example)."""
    raw = bundled_text() if path == BUNDLED else open(path, "rb").read()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return parse_config(doc, hashlib.sha256(raw).hexdigest())
