"""Closed-form modal series for the pressure transients of the damaged line.

Every field here is built from one kernel: the response of a sealed stretch
of length ``lam`` (zero-gradient ends) to a mass sink of strength ``q(t)``
at local position ``s``,

    u(xi, t) = -(c^2/lam) * int_{t0}^{t} q(tau) [1 + 2 sum_n cos(n pi xi/lam)
               cos(n pi s/lam) exp(-alpha_n (t - tau))] dtau,

with ``alpha_n = pi^2 n^2 c^2 / (2a lam^2)``.  Boundary inflow is a negative
sink at ``s = 0``, outlet offtake a sink at ``s = lam``, the leak a sink at
its own position.  The slowly converging part ``q(t)/alpha_n`` is summed in
closed form, as is the ``1/alpha_n^2`` part of a ramp still running at the
evaluation time, so the remaining modal sum decays like ``exp(-alpha_n dt)``.
"""

from __future__ import annotations

import math

import numpy as np

from .domain import (
    LeakFluxModel,
    PressureField,
    SectionState,
    SeriesConfig,
    ValidatedScenario,
)
from .errors import DomainError, TruncationError
from .placement import ValvePair

PI = math.pi
_XTOL = 1e-9


def _rate(n, span, c, two_a):
    return (PI * n * c / span) ** 2 / two_a


def decay_rate(kind: int, n, params, pair: ValvePair):
    """Modal decay rate (1/s) of the whole line (1) or of section 1, 2, 3 (3, 4, 5)."""
    spans = {1: params.L, 3: pair.ell1, 4: pair.ell3 - pair.ell1, 5: params.L - pair.ell3}
    if kind not in spans:
        raise ValueError(f"decay rate kind must be one of 1, 3, 4, 5, got {kind}")
    if np.any(np.asarray(n) < 1):
        raise ValueError("modal index n starts at 1")
    span = spans[kind]
    if span <= 0:
        raise DomainError(f"section for kind {kind} has zero length")
    return _rate(np.asarray(n, dtype=float) if np.ndim(n) else float(n), span, params.c, params.two_a)


def _cos_sq_sum(theta):
    # sum_{n>=1} cos(n theta)/n^2 for 0 <= theta <= 2 pi
    return PI**2 / 6 - PI * theta / 2 + theta**2 / 4


def _cos_quartic_sum(theta):
    # sum_{n>=1} cos(n theta)/n^4 for 0 <= theta <= 2 pi
    return PI**4 / 90 - PI**2 * theta**2 / 12 + PI * theta**3 / 12 - theta**4 / 48


def neumann_quartic(xi, s, lam):
    """``sum_n 2 cos(n pi xi/lam) cos(n pi s/lam) / n^4`` in closed form."""
    xi = np.asarray(xi, dtype=float)
    return _cos_quartic_sum(PI * np.abs(xi - s) / lam) + _cos_quartic_sum(PI * (xi + s) / lam)


def neumann_shape(xi, s, lam):
    """``sum_n 2 cos(n pi xi/lam) cos(n pi s/lam) / (n pi/lam)^2`` in closed form."""
    xi = np.asarray(xi, dtype=float)
    return lam**2 / PI**2 * (_cos_sq_sum(PI * np.abs(xi - s) / lam)
                             + _cos_sq_sum(PI * (xi + s) / lam))


def _exp_tail(alpha1, dt, N):
    """Upper bound of ``sum_{n>N} exp(-alpha1 n^2 dt) / (alpha1 n^2)``."""
    m = N + 1.0
    with np.errstate(over="ignore", divide="ignore"):
        return np.exp(-alpha1 * m * m * dt) / (alpha1 * m * m * -np.expm1(-2 * alpha1 * m * dt))


def _pick_terms(bound, limit, cfg: SeriesConfig):
    """Smallest N whose tail bound is within ``limit``; TruncationError otherwise."""
    ok = np.nonzero(bound <= limit)[0]
    if ok.size == 0:
        raise TruncationError(
            f"series tail {bound[-1]:.3g} Pa exceeds {limit:.3g} Pa at n_max={cfg.n_max}")
    return int(ok[0]) + 1


def _point_sink(xi, t, s, lam, c, two_a, t0, flux: LeakFluxModel, cfg, scale):
    """Pressure change at local positions ``xi`` and time ``t`` due to a sink at ``s``."""
    xi = np.asarray(xi, dtype=float)
    dt = t - t0
    if dt <= 0:
        return np.zeros_like(xi)
    pieces = flux.slopes(t0, t)
    q0 = float(flux.rate(t0))
    qt = float(flux.rate(t))
    if q0 == 0.0 and not pieces:
        return np.zeros_like(xi)
    D = c * c / two_a
    total = flux.integral(t0, t)
    steady = (two_a / lam) * qt * neumann_shape(xi, s, lam)

    alpha1 = D * (PI / lam) ** 2
    Ns = np.arange(1, cfg.n_max + 1, dtype=float)
    # A ramp still running at t contributes slope/alpha_n^2, which only decays
    # like 1/n^4; that part is summed in closed form, the rest decays exponentially.
    running = sum(p[2] for p in pieces if p[1] >= t)
    bound = abs(q0) * _exp_tail(alpha1, dt, Ns)
    for a, b, slope in pieces:
        bound = bound + abs(slope) / alpha1 * _exp_tail(alpha1, t - a, Ns)
        if b < t:
            bound = bound + abs(slope) / alpha1 * _exp_tail(alpha1, t - b, Ns)
    N = _pick_terms(2 * c * c / lam * bound, cfg.tail_tol * scale, cfg)

    n = np.arange(1, N + 1, dtype=float)
    an = alpha1 * n * n
    R = -q0 * np.exp(-an * dt) / an
    for a, b, slope in pieces:
        tail_b = 0.0 if b >= t else np.exp(-an * (t - b))
        R -= slope * (tail_b - np.exp(-an * (t - a))) / an**2
    weights = 2 * np.cos(n * PI * s / lam) * R
    modal = np.cos(np.multiply.outer(xi, n) * PI / lam) @ weights
    if running:
        modal = modal - running / alpha1**2 * neumann_quartic(xi, s, lam)
    return -(c * c / lam) * (total + modal) - steady


def _gradient_term(xi, t, s, lam, c, two_a, t0, K, cfg, scale):
    """``K * int_{t0}^{t} [1 + 2 sum cos cos exp(-alpha_n tau)] dtau`` (tau absolute)."""
    xi = np.asarray(xi, dtype=float)
    if K == 0.0 or t <= t0:
        return np.zeros_like(xi)
    D = c * c / two_a
    alpha1 = D * (PI / lam) ** 2
    Ns = np.arange(1, cfg.n_max + 1, dtype=float)
    out = np.full_like(xi, K * (t - t0))
    if t0 > 0:
        bound = 2 * abs(K) * _exp_tail(alpha1, t0, Ns)
        N = _pick_terms(bound, cfg.tail_tol * scale, cfg)
        n = np.arange(1, N + 1, dtype=float)
        an = alpha1 * n * n
        coef = (np.exp(-an * t0) - np.exp(-an * t)) / an
    else:
        # exp(0) part summed in closed form
        out += K * neumann_shape(xi, s, lam) / D
        bound = 2 * abs(K) * _exp_tail(alpha1, t, Ns)
        N = _pick_terms(bound, cfg.tail_tol * scale, cfg)
        n = np.arange(1, N + 1, dtype=float)
        an = alpha1 * n * n
        coef = -np.exp(-an * t) / an
    weights = 2 * np.cos(n * PI * s / lam) * coef
    return out + K * (np.cos(np.multiply.outer(xi, n) * PI / lam) @ weights)


def _as_points(x, t):
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    return xs, ts


def _shape_output(out, x, t):
    if np.ndim(x) == 0 and np.ndim(t) == 0:
        return float(out[0, 0])
    if np.ndim(t) == 0:
        return out[:, 0]
    if np.ndim(x) == 0:
        return out[0, :]
    return out


def section_field(x, t, state: SectionState, cfg: SeriesConfig = SeriesConfig()):
    """Pressure of an isolated section at positions ``x`` and absolute times ``t``.

    Array inputs give an array of shape ``(len(x), len(t))``.
    """
    cfg.check()
    xs, ts = _as_points(x, t)
    tol = _XTOL * state.length
    if np.any(xs < state.x_lo - tol) or np.any(xs > state.x_hi + tol):
        raise DomainError(f"x outside section {state.id} [{state.x_lo}, {state.x_hi}]")
    if np.any(ts < state.t_start):
        raise DomainError(f"t precedes the closure time {state.t_start} s")
    xs = np.clip(xs, state.x_lo, state.x_hi)
    lam, c, two_a, t0 = state.length, state.c, state.two_a, state.t_start
    xi = xs - state.x_lo
    base = np.asarray(state.initial(xs), dtype=float)
    scale = float(np.max(np.abs(state.init_p)))
    sinks = []
    if state.flux_lo:
        sinks.append((0.0, LeakFluxModel.constant(-state.flux_lo)))
    if state.flux_hi:
        sinks.append((lam, LeakFluxModel.constant(state.flux_hi)))
    if state.leak is not None and state.leak_at is not None and not state.leak.is_zero:
        sinks.append((state.leak_at - state.x_lo, state.leak))
    k_lo = c * c * state.g_lo / (two_a * lam)
    k_hi = -c * c * state.g_hi / (two_a * lam)

    out = np.empty((xs.size, ts.size))
    for j, tj in enumerate(ts):
        col = base.copy()
        for s, flux in sinks:
            col += _point_sink(xi, tj, s, lam, c, two_a, t0, flux, cfg, scale)
        col += _gradient_term(xi, tj, 0.0, lam, c, two_a, t0, k_lo, cfg, scale)
        col += _gradient_term(xi, tj, lam, lam, c, two_a, t0, k_hi, cfg, scale)
        out[:, j] = col
    return _shape_output(out, x, t)


def _expect_section(state, ident):
    if state.id != ident:
        raise DomainError(f"expected a section {ident} state, got section {state.id}")


def section1_pressure(x, t, state: SectionState, cfg: SeriesConfig = SeriesConfig()):
    """Filling section ``[0, ell1]``: inlet flux ``G0`` against the closed valve 4.2."""
    _expect_section(state, 1)
    return section_field(x, t, state, cfg)


def section2_pressure(x, t, state: SectionState, cfg: SeriesConfig = SeriesConfig()):
    """Sealed leaking section ``[ell1, ell3]`` venting through the leak."""
    _expect_section(state, 2)
    return section_field(x, t, state, cfg)


def section3_pressure(x, t, state: SectionState, cfg: SeriesConfig = SeriesConfig()):
    """Delivery section ``[ell3, L]`` drained by consumer offtake ``Gs``."""
    _expect_section(state, 3)
    return section_field(x, t, state, cfg)


def inlet_pressure(t, state: SectionState, cfg: SeriesConfig = SeriesConfig(),
                   form: str = "series"):
    """Pressure at the compressor-station end of section 1.

    ``form="series"`` evaluates the full modal sum at ``x = 0``.
    ``form="simplified"`` keeps only the slowest mode of each transient, scaled
    so that it is exact at closure and at late times::

        P0 + c^2 (G0 + g/2a) dt / l1 + (2a l1 G0 / 3)(1 - e^{-a1 dt})
           + (2 l1 g / pi^2)(e^{-a1 t1} - e^{-a1 t})
    """
    _expect_section(state, 1)
    if form == "series":
        return section_field(state.x_lo, t, state, cfg)
    if form != "simplified":
        raise ValueError(f"unknown inlet law form {form!r}")
    ts = np.asarray(t, dtype=float)
    if np.any(ts < state.t_start):
        raise DomainError("t precedes the closure time")
    lam, c, two_a, t1 = state.length, state.c, state.two_a, state.t_start
    G0, g = state.flux_lo, state.g_lo
    a1 = _rate(1, lam, c, two_a)
    dt = ts - t1
    p = (state.initial(state.x_lo)
         + c * c * (G0 + g / two_a) * dt / lam
         - (two_a * lam * G0 / 3) * np.expm1(-a1 * dt)
         + (2 * lam * g / PI**2) * (np.exp(-a1 * t1) - np.exp(-a1 * ts)))
    return float(p) if np.ndim(t) == 0 else p


def _g0_series_pair(x, t, params, n_terms):
    """The two through-flow series of the full pre-closure law (they cancel identically)."""
    L, two_a, G0 = params.L, params.two_a, params.G0
    a1 = _rate(1, L, params.c, two_a)
    k = 2 * np.arange(1, n_terms + 1, dtype=float) - 1
    first = (4 * two_a * L / PI**2) * G0 * (
        np.cos(np.multiply.outer(x, k) * PI / L) @ (np.exp(-a1 * k * k * t) / k**2))
    n = np.arange(1, 2 * n_terms, dtype=float)
    parity = 1 - (-1.0) ** n
    second = (2 * two_a * L / PI**2) * G0 * (
        np.cos(np.multiply.outer(x, n) * PI / L) @ (parity * np.exp(-a1 * n * n * t) / n**2))
    return first - second


def preclosure_profile(x, t, vs: ValidatedScenario, cfg: SeriesConfig = SeriesConfig(),
                       form: str = "simplified"):
    """Pressure of the still-connected damaged line while the leak vents, ``0 <= t <= t1``.

    Steady through-flow ``Pb - 2a G0 x`` plus the response to the leak at
    ``ell2`` and to any mismatch ``Gs - G0`` of the outlet offtake.  The
    upstream and downstream branches are the same expression, with the
    bracket continuation ``2a G_ut (x - ell2)`` folded into the closed-form
    kernel.  ``form="full"`` also sums the pair of through-flow series that
    cancel term by term.
    """
    params, sc = vs.params, vs.scenario
    if form not in ("full", "simplified"):
        raise ValueError(f"unknown pre-closure form {form!r}")
    xs, ts = _as_points(x, t)
    tol = _XTOL * params.L
    if np.any(xs < -tol) or np.any(xs > params.L + tol):
        raise DomainError("x outside the line")
    if np.any(ts < 0) or np.any(ts > sc.t1 * (1 + 1e-12)):
        raise DomainError("pre-closure profile is defined for 0 <= t <= t1")
    xs = np.clip(xs, 0.0, params.L)
    L, c, two_a = params.L, params.c, params.two_a
    base = params.Pb - two_a * params.G0 * xs
    mismatch = LeakFluxModel.constant(params.Gs - params.G0)
    out = np.empty((xs.size, ts.size))
    for j, tj in enumerate(ts):
        col = base + _point_sink(xs, tj, sc.ell2, L, c, two_a, 0.0, sc.leak_flux, cfg, params.Pb)
        if params.Gs != params.G0:
            col += _point_sink(xs, tj, L, L, c, two_a, 0.0, mismatch, cfg, params.Pb)
        if form == "full":
            col += _g0_series_pair(xs, tj, params, cfg.n_max)
        out[:, j] = col
    return _shape_output(out, x, t)


def closure_states(vs: ValidatedScenario, pair: ValvePair, cfg: SeriesConfig = SeriesConfig(),
                   g_lo: float = 0.0, g_hi: float = 0.0, samples: int = 201) -> tuple:
    """Section states at ``t1`` seeded from the pre-closure profile."""
    params, sc = vs.params, vs.scenario
    bounds = ((0.0, pair.ell1), (pair.ell1, pair.ell3), (pair.ell3, params.L))
    if bounds[0][1] <= 0:
        raise DomainError("leak in the first bay: no section remains upstream of the isolation")
    if bounds[2][0] >= params.L:
        raise DomainError("leak in the last bay: no section remains downstream of the isolation")
    states = []
    for ident, (lo, hi) in enumerate(bounds, start=1):
        xs = np.linspace(lo, hi, samples)
        ps = preclosure_profile(xs, sc.t1, vs, cfg)
        kw = dict(id=ident, x_lo=lo, x_hi=hi, init_x=tuple(xs), init_p=tuple(ps),
                  c=params.c, two_a=params.two_a, t_start=sc.t1)
        if ident == 1:
            kw.update(flux_lo=params.G0, g_lo=g_lo)
        elif ident == 2:
            kw.update(leak_at=sc.ell2, leak=sc.leak_flux)
        else:
            kw.update(flux_hi=params.Gs, g_hi=g_hi)
        states.append(SectionState(**kw))
    return tuple(states)


def field_snapshot(vs: ValidatedScenario, pair: ValvePair, cfg: SeriesConfig = SeriesConfig(),
                   states=None) -> list:
    """Analytic fields of the three sections on the scenario's output grids."""
    sc = vs.scenario
    if states is None:
        states = closure_states(vs, pair, cfg)
    xg = np.asarray(sc.x_grid, dtype=float)
    tg = sc.t1 + np.asarray(sc.t_grid, dtype=float)
    fields = []
    for st in states:
        tol = _XTOL * st.length
        xs = xg[(xg >= st.x_lo - tol) & (xg <= st.x_hi + tol)]
        if xs.size and tg.size:
            p = section_field(xs, tg, st, cfg).reshape(xs.size, tg.size)
        else:
            p = np.empty((xs.size, tg.size))
        fields.append(PressureField(st.id, xs, tg, p, "analytic"))
    return fields


def preclosure_state(vs: ValidatedScenario) -> SectionState:
    """The whole line before closure as a section: through-flow background, leak, offtake mismatch."""
    p, sc = vs.params, vs.scenario
    return SectionState(
        id=0, x_lo=0.0, x_hi=p.L, init_x=(0.0, p.L),
        init_p=(p.Pb, p.Pb - p.two_a * p.G0 * p.L), c=p.c, two_a=p.two_a, t_start=0.0,
        flux_hi=p.Gs - p.G0, leak_at=sc.ell2, leak=sc.leak_flux)
