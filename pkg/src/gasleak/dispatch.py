"""Emergency-mode decisions: connector activation time, lost gas, delivery shortfall."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import bisect

from .analytic import closure_states, inlet_pressure, section3_pressure, section_field
from .domain import EULER_C, LineParams, SectionState, SeriesConfig, ValidatedScenario
from .errors import AlreadyViolated, NoRoot
from .oracle import FDConfig, fd_solve, linepack
from .placement import ValvePair

#: Smallest admissible gap between closure and connector opening (s).
MIN_ACTIVATION_GAP = 1.0


@dataclass(frozen=True)
class ValveEvent:
    time: float
    valve: str
    position: float
    action: str
    reason: str


@dataclass(frozen=True)
class ValveTimeline:
    events: tuple

    def to_dict(self) -> dict:
        return {"events": [asdict(e) for e in self.events]}


@dataclass(frozen=True)
class LeakedMass:
    """Gas lost through the leak between closure and ``t_end``.

    ``flux_integral`` and ``linepack`` are per pipe cross-section (kg/m^2,
    numerically Pa*s/m); ``kg`` is filled in when a pipe area is known.
    """

    flux_integral: float
    linepack: float
    kg: Optional[float] = None


@dataclass(frozen=True)
class DispatchReport:
    t1: float
    t2: float
    t2_offset: float
    t2_root: Optional[float]
    leaked_mass_integral: float
    leaked_mass_linepack: float
    leaked_mass_kg: Optional[float]
    supply_deficit: float
    deficit_time: float
    epsilon_used: float

    def to_dict(self) -> dict:
        return asdict(self)


def activation_time_closed(params: LineParams, state: SectionState) -> float:
    """Connector opening time from the closed-form rule (absolute seconds).

    ``t2 = t1 + l1 / (c^2 G0 (2 - C)) * (eps Pb - P(0, t1) - 2a l1 G0 (1/3 - 1/pi^2))``
    """
    l1, t1 = state.length, state.t_start
    p0 = state.initial(state.x_lo)
    limit = params.eps * params.Pb
    if p0 >= limit:
        raise AlreadyViolated(f"inlet pressure {p0:.6g} Pa already at or above {limit:.6g} Pa")
    G0 = params.G0
    if G0 <= 0:
        raise NoRoot("without inflow the inlet pressure never reaches the limit")
    head = limit - p0 - params.two_a * l1 * G0 * (1 / 3 - 1 / math.pi**2)
    delta = l1 / (params.c**2 * G0 * (2 - EULER_C)) * head
    if delta <= 0:
        raise AlreadyViolated(f"no pressure headroom left at closure (gap {delta:.3g} s)")
    return t1 + max(delta, MIN_ACTIVATION_GAP)


def activation_time_root(params: LineParams, state: SectionState,
                         cfg: SeriesConfig = SeriesConfig(), horizon: Optional[float] = None,
                         xtol: float = 0.1) -> float:
    """First time the series inlet pressure reaches ``eps * Pb``, by bisection.

    ``horizon`` is the latest absolute time searched (default one hour after
    closure).
    """
    t1 = state.t_start
    horizon = t1 + 3600.0 if horizon is None else horizon
    limit = params.eps * params.Pb

    def excess(t):
        return inlet_pressure(t, state, cfg) - limit

    if excess(t1) >= 0:
        raise AlreadyViolated("inlet pressure already at the compressor limit at closure")
    if excess(horizon) < 0:
        raise NoRoot(f"inlet pressure stays below {limit:.6g} Pa until t={horizon} s")
    return bisect(excess, t1, horizon, xtol=xtol)


def compute_activation_time(params: LineParams, state: SectionState, form: str = "closed",
                            cfg: SeriesConfig = SeriesConfig(), horizon: Optional[float] = None):
    """``t2`` by ``"closed"`` form, ``"root"``-finding, or ``"both"`` (a pair)."""
    if form == "closed":
        return activation_time_closed(params, state)
    if form == "root":
        return activation_time_root(params, state, cfg, horizon)
    if form == "both":
        return (activation_time_closed(params, state),
                activation_time_root(params, state, cfg, horizon))
    raise ValueError(f"unknown activation-time form {form!r}")


def leaked_mass(state: SectionState, t_end: float, area: Optional[float] = None,
                source: str = "analytic", cfg: SeriesConfig = SeriesConfig(),
                fd: Optional[FDConfig] = None, samples: int = 2001) -> LeakedMass:
    """Leak loss as the flux integral and, independently, as the linepack drop of section 2.

    ``source`` picks how the linepack is measured: quadrature of the series
    field or a finite-difference run (``fd`` sets its grid).
    """
    leak = state.leak
    flux = 0.0 if leak is None else leak.integral(state.t_start, t_end)
    if t_end <= state.t_start:
        return LeakedMass(0.0, 0.0, 0.0 if area else None)
    if source == "analytic":
        xs = np.linspace(state.x_lo, state.x_hi, samples)
        if state.leak_at is not None:
            xs = np.union1d(xs, [state.leak_at])
        p = section_field(xs, np.array([state.t_start, t_end]), state, cfg)
        drop = trapezoid(p[:, 0] - p[:, 1], xs) / state.c**2
    elif source == "fd":
        fd = FDConfig() if fd is None else fd
        level = FDConfig(fd.dx, fd.dt, fd.theta, t_end - state.t_start)
        field = fd_solve(state, level, t_out=[state.t_start, t_end])
        m = linepack(field, state.c)
        drop = m[0] - m[-1]
    else:
        raise ValueError(f"unknown linepack source {source!r}")
    return LeakedMass(flux, float(drop), None if area is None else flux * area)


def supply_deficit(t: float, state: SectionState, params: LineParams,
                   cfg: SeriesConfig = SeriesConfig()) -> float:
    """Relative shortfall of delivery pressure against the nominal outlet pressure."""
    return 1.0 - section3_pressure(state.x_hi, t, state, cfg) / params.Ps


def build_timeline(vs: ValidatedScenario, pair: ValvePair, state1: Optional[SectionState] = None,
                   cfg: SeriesConfig = SeriesConfig()) -> ValveTimeline:
    """Isolation closures at ``t1`` followed by connector openings at ``t2``."""
    if state1 is None:
        state1 = closure_states(vs, pair, cfg)[0]
    t1 = vs.scenario.t1
    t2 = activation_time_closed(vs.params, state1)
    events = (
        ValveEvent(t1, "4.2", pair.ell1, "close", "isolate-leak"),
        ValveEvent(t1, "4.1", pair.ell3, "close", "isolate-leak"),
        ValveEvent(t2, "5", pair.ell1, "open", "protect-compressor"),
        ValveEvent(t2, "5", pair.ell3, "open", "restore-supply"),
    )
    return ValveTimeline(events)


def dispatch_report(vs: ValidatedScenario, pair: ValvePair, states=None,
                    cfg: SeriesConfig = SeriesConfig(), with_root: bool = False) -> DispatchReport:
    params, sc = vs.params, vs.scenario
    if states is None:
        states = closure_states(vs, pair, cfg)
    s1, s2, s3 = states
    t2 = activation_time_closed(params, s1)
    root = None
    if with_root:
        try:
            root = activation_time_root(params, s1, cfg)
        except NoRoot:
            root = None
    lost = leaked_mass(s2, sc.horizon, area=params.pipe_area(), cfg=cfg)
    return DispatchReport(
        t1=sc.t1, t2=t2, t2_offset=t2 - sc.t1, t2_root=root,
        leaked_mass_integral=lost.flux_integral, leaked_mass_linepack=lost.linepack,
        leaked_mass_kg=lost.kg, supply_deficit=supply_deficit(sc.horizon, s3, params, cfg),
        deficit_time=sc.horizon, epsilon_used=params.eps)
