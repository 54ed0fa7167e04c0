"""Parameter model: line constants, leak scenario, section states and fields.

All quantities are SI internally: metres, seconds, pascals, and mass fluxes
in Pa*s/m (which is the same as kg/(m^2 s)).  Kilometres and MPa only appear
at the I/O boundary, through the helpers at the bottom of this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import GeometryError, ThresholdError, UnitError, ValidationError

#: Euler's constant as printed in the source method (rounded to six digits).
EULER_C = 0.577215

METRES_PER_KM = 1000.0
PA_PER_MPA = 1.0e6
#: The tables quote pressures in units of 1e-2 MPa.
PA_PER_TABLE_UNIT = 1.0e4


@dataclass(frozen=True)
class LineParams:
    """Constants of the damaged line of a parallel main gas pipeline.

    ``two_a`` is the linearised dissipation coefficient ``2a`` (1/s).  The
    optional ``meta`` mapping may carry descriptive values (``d``,
    ``rho_avg``, ``v_avg``, ``lambda_hyd``) that the linear model ignores.
    """

    c: float
    two_a: float
    L: float
    step: float
    Pb: float
    Ps: float
    G0: float
    Gs: float
    eps: float
    meta: tuple = ()

    @property
    def diffusivity(self) -> float:
        return self.c**2 / self.two_a

    @property
    def meta_dict(self) -> dict:
        return dict(self.meta)

    def pipe_area(self) -> Optional[float]:
        d = self.meta_dict.get("d")
        return None if d is None else math.pi * d**2 / 4.0


@dataclass(frozen=True)
class LeakFluxModel:
    """Leak mass flux history ``G_ut(t)``; ``t`` is time since leak onset.

    A piecewise-linear model holds its first/last value outside the sampled
    window.
    """

    kind: str
    values: tuple
    times: tuple = ()

    @classmethod
    def constant(cls, value: float) -> "LeakFluxModel":
        return cls("constant", (float(value),))

    @classmethod
    def piecewise_linear(cls, times: Sequence[float], values: Sequence[float]) -> "LeakFluxModel":
        return cls("piecewise-linear", tuple(float(v) for v in values),
                   tuple(float(t) for t in times))

    def check(self) -> None:
        if self.kind not in ("constant", "piecewise-linear"):
            raise ValidationError(f"unknown leak flux kind {self.kind!r}")
        vals = np.asarray(self.values, dtype=float)
        if vals.size == 0 or not np.all(np.isfinite(vals)):
            raise ValidationError("leak flux needs finite values")
        if np.any(vals < 0):
            raise ValidationError("leak flux values must be >= 0")
        if self.kind == "constant":
            if vals.size != 1:
                raise ValidationError("constant leak flux takes exactly one value")
            return
        times = np.asarray(self.times, dtype=float)
        if times.size != vals.size:
            raise ValidationError("leak flux times and values differ in length")
        if np.any(np.diff(times) <= 0):
            raise ValidationError("leak flux sample times must be strictly increasing")

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def _knots(self):
        if self.kind == "constant":
            return np.array([0.0]), np.array(self.values, dtype=float)
        return np.asarray(self.times, dtype=float), np.asarray(self.values, dtype=float)

    def rate(self, t):
        """Flux at time(s) ``t``."""
        tk, vk = self._knots()
        if tk.size == 1:
            return np.full(np.shape(t), vk[0]) if np.ndim(t) else float(vk[0])
        out = np.interp(t, tk, vk)
        return out if np.ndim(t) else float(out)

    def slopes(self, lo: float, hi: float) -> list:
        """Non-zero slope pieces ``(a, b, dG/dt)`` clipped to ``[lo, hi]``."""
        tk, vk = self._knots()
        pieces = []
        for i in range(tk.size - 1):
            a, b = max(tk[i], lo), min(tk[i + 1], hi)
            if b <= a:
                continue
            s = (vk[i + 1] - vk[i]) / (tk[i + 1] - tk[i])
            if s != 0.0:
                pieces.append((a, b, s))
        return pieces

    def integral(self, lo: float, hi: float) -> float:
        """Exact integral of the flux over ``[lo, hi]``."""
        if hi <= lo:
            return 0.0
        tk, _ = self._knots()
        inner = tk[(tk > lo) & (tk < hi)]
        pts = np.concatenate(([lo], inner, [hi]))
        g = np.asarray(self.rate(pts), dtype=float)
        return float(np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(pts)))


@dataclass(frozen=True)
class LeakScenario:
    """Leak at ``ell2`` with isolation valves closing ``t1`` seconds after onset.

    ``t_grid`` holds output times as offsets since closure; ``horizon`` is the
    total simulated time since leak onset.
    """

    ell2: float
    t1: float
    leak_flux: LeakFluxModel
    horizon: float
    x_grid: tuple = ()
    t_grid: tuple = ()


@dataclass(frozen=True)
class SeriesConfig:
    n_max: int = 500
    tail_tol: float = 1e-12

    def check(self) -> None:
        if int(self.n_max) < 1:
            raise ValidationError("n_max must be >= 1")
        if not self.tail_tol > 0:
            raise ValidationError("tail_tol must be > 0")


@dataclass(frozen=True)
class SectionState:
    """One isolated stretch of the damaged line after closure at ``t_start``.

    The pre-closure profile ``(init_x, init_p)`` is carried as a stationary
    background; transients from the boundary fluxes, the interior leak and the
    closure gradient terms are superposed on it.  ``flux_lo`` enters at
    ``x_lo`` and ``flux_hi`` leaves at ``x_hi`` (both in Pa*s/m).
    """

    id: int
    x_lo: float
    x_hi: float
    init_x: tuple
    init_p: tuple
    c: float
    two_a: float
    t_start: float
    flux_lo: float = 0.0
    flux_hi: float = 0.0
    g_lo: float = 0.0
    g_hi: float = 0.0
    leak_at: Optional[float] = None
    leak: Optional[LeakFluxModel] = None

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise GeometryError("section needs x_lo < x_hi")
        if len(self.init_x) != len(self.init_p) or len(self.init_x) < 1:
            raise ValidationError("initial profile samples are malformed")
        ix = np.asarray(self.init_x, dtype=float)
        if ix.size > 1 and np.any(np.diff(ix) <= 0):
            raise ValidationError("initial profile positions must increase")
        tol = 1e-9 * (self.x_hi - self.x_lo)
        if ix[0] > self.x_lo + tol or ix[-1] < self.x_hi - tol:
            raise GeometryError("initial profile does not cover the section")
        if self.leak_at is not None and not self.x_lo < self.leak_at < self.x_hi:
            raise GeometryError("leak must lie strictly inside its section")

    @property
    def length(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def diffusivity(self) -> float:
        return self.c**2 / self.two_a

    def initial(self, x):
        out = np.interp(x, np.asarray(self.init_x, float), np.asarray(self.init_p, float))
        return out if np.ndim(x) else float(out)

    def leak_rate(self, t):
        if self.leak is None:
            return np.zeros(np.shape(t)) if np.ndim(t) else 0.0
        return self.leak.rate(t)


@dataclass(eq=False)
class PressureField:
    """Pressures ``p[i, j]`` at ``x[i]`` and absolute time ``t[j]``."""

    section: int
    x: np.ndarray
    t: np.ndarray
    p: np.ndarray
    source: str
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.t = np.asarray(self.t, dtype=float)
        self.p = np.asarray(self.p, dtype=float).reshape(self.x.size, self.t.size)
        if self.source not in ("analytic", "fd"):
            raise ValueError(f"unknown field source {self.source!r}")


@dataclass(frozen=True)
class ValidatedScenario:
    params: LineParams
    scenario: LeakScenario
    tie_break: str = "reject"


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise UnitError(f"{name} must be a positive finite number, got {value!r}")


def _check_params(p: LineParams) -> None:
    for name in ("c", "two_a", "L", "step", "Pb", "Ps"):
        _positive(name, getattr(p, name))
    for name in ("G0", "Gs"):
        v = getattr(p, name)
        if not (math.isfinite(v) and v >= 0):
            raise UnitError(f"{name} must be >= 0, got {v!r}")
    if not p.Pb > p.Ps:
        raise ValidationError("inlet pressure Pb must exceed outlet pressure Ps")
    if not (math.isfinite(p.eps) and p.eps > 1):
        raise ThresholdError(f"compressor ratio limit eps must exceed 1, got {p.eps!r}")
    if p.step > p.L:
        raise GeometryError("connector step exceeds the line length")


def _check_grid(name, values, lo, hi):
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return
    if not np.all(np.isfinite(arr)) or np.any(np.diff(arr) <= 0):
        raise ValidationError(f"{name} must be finite and strictly increasing")
    span = max(abs(hi), 1.0) * 1e-12
    if arr[0] < lo - span or arr[-1] > hi + span:
        raise GeometryError(f"{name} leaves the domain [{lo}, {hi}]")


def validate(params: LineParams, scenario: LeakScenario,
             tie_break: str = "reject") -> ValidatedScenario:
    """Check every invariant of the line and the scenario.

    Raises UnitError, GeometryError (including OnConnectorError) or
    ThresholdError; otherwise returns an immutable ValidatedScenario.
    Validating the parts of a ValidatedScenario again yields an equal value.
    """
    from .placement import locate_isolation_valves

    _check_params(params)
    s = scenario
    if not (math.isfinite(s.ell2) and 0 < s.ell2 < params.L):
        raise GeometryError(f"leak position {s.ell2!r} m is outside (0, {params.L})")
    _positive("t1", s.t1)
    if not s.horizon > s.t1:
        raise ValidationError("horizon must exceed the closure time t1")
    s.leak_flux.check()
    _check_grid("x_grid", s.x_grid, 0.0, params.L)
    _check_grid("t_grid", s.t_grid, 0.0, s.horizon - s.t1)
    locate_isolation_valves(s.ell2, params.step, params.L, tie_break=tie_break)
    return ValidatedScenario(params, scenario, tie_break)


def km(x):
    """Kilometres to metres."""
    return np.asarray(x, dtype=float) * METRES_PER_KM if np.ndim(x) else x * METRES_PER_KM


def to_km(x):
    return np.asarray(x, dtype=float) / METRES_PER_KM if np.ndim(x) else x / METRES_PER_KM


def to_table_units(p):
    """Pascals to the tables' 1e-2 MPa."""
    return np.asarray(p, dtype=float) / PA_PER_TABLE_UNIT if np.ndim(p) else p / PA_PER_TABLE_UNIT


def from_table_units(p):
    return np.asarray(p, dtype=float) * PA_PER_TABLE_UNIT if np.ndim(p) else p * PA_PER_TABLE_UNIT
