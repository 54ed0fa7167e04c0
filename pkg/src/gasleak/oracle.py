"""Finite-difference reference solver for the linearised line equations.

Solves ``u_t = (c^2/2a) u_xx + sources`` for the departure ``u`` from the
section's stationary background profile with a theta-weighted two-level
scheme.  Flux ends use ghost points (``u_x = -2a G``), the leak is a
single-node source of weight ``1/w_j`` where ``w`` are the trapezoid
weights, and the closure gradient terms become the distributed source they
are the exact solution of.  With these choices the trapezoid linepack
``(1/c^2) sum w_i P_i`` changes by exactly the theta-weighted net flux every
step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from .domain import PressureField, SectionState, ValidationError
from .errors import GridError, StabilityError

PI = math.pi


@dataclass(frozen=True)
class FDConfig:
    """Grid spacing ``dx`` (m), step ``dt`` (s), weight ``theta`` and run length ``horizon`` (s after the state's start)."""

    dx: float = 100.0
    dt: float = 1.0
    theta: float = 0.5
    horizon: float = 600.0

    def check(self) -> None:
        if not (self.dx > 0 and self.dt > 0 and self.horizon > 0):
            raise ValidationError("dx, dt and horizon must be positive")
        if not 0.0 <= self.theta <= 1.0:
            raise ValidationError("theta must lie in [0, 1]")


def _count(span, h, what):
    n = round(span / h)
    if n < 1 or abs(n * h - span) > 1e-9 * span:
        raise GridError(f"{what} {span} is not an integer multiple of {h}")
    return int(n)


def trapezoid_weights(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    w = np.zeros_like(x)
    d = np.diff(x)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def _closure_gradient_source(state: SectionState, xi, n_cap):
    lam, c, two_a, t0 = state.length, state.c, state.two_a, state.t_start
    k_lo = c * c * state.g_lo / (two_a * lam)
    k_hi = -c * c * state.g_hi / (two_a * lam)
    src = np.full_like(xi, k_lo + k_hi)
    if k_lo == 0 and k_hi == 0:
        return src
    if t0 <= 0:
        w = trapezoid_weights(xi)
        src[0] += k_lo * lam / w[0] - k_lo
        src[-1] += k_hi * lam / w[-1] - k_hi
        return src
    alpha1 = (PI / lam) ** 2 * c * c / two_a
    n = np.arange(1, n_cap + 1, dtype=float)
    decay = np.exp(-alpha1 * n * n * t0)
    n, decay = n[decay > 1e-18], decay[decay > 1e-18]
    if n.size:
        cosx = np.cos(np.multiply.outer(xi, n) * PI / lam)
        src += cosx @ (2 * decay * (k_lo + k_hi * (-1.0) ** n))
    return src


def fd_solve(state: SectionState, cfg: FDConfig, leak=None, t_out=None,
             background: str = "frozen") -> PressureField:
    """Integrate one section from ``state.t_start`` over ``cfg.horizon`` seconds.

    ``leak`` overrides the state's own leak model.  ``t_out`` (absolute times
    on the step grid) selects which steps are recorded; by default all are.
    With ``background="frozen"`` the initial profile is a fixed background, as
    in the series solutions; ``"evolving"`` treats it as an ordinary initial
    condition that diffuses under the boundary conditions.
    """
    cfg.check()
    if background not in ("frozen", "evolving"):
        raise ValueError(f"unknown background mode {background!r}")
    leak = state.leak if leak is None else leak
    c2, two_a = state.c**2, state.two_a
    D = c2 / two_a
    lam = state.length
    N = _count(lam, cfg.dx, "section length")
    steps = _count(cfg.horizon, cfg.dt, "horizon")
    dx, dt, th = lam / N, cfg.horizon / steps, cfg.theta
    if th < 0.5 and dt > dx * dx / (2 * D * (1 - 2 * th)):
        raise StabilityError(
            f"dt={dt} s exceeds the stability bound {dx * dx / (2 * D * (1 - 2 * th)):.3g} s")

    x = state.x_lo + dx * np.arange(N + 1)
    xi = x - state.x_lo
    w = trapezoid_weights(x)

    fixed = _closure_gradient_source(state, xi, N)
    fixed[0] += 2 * c2 * state.flux_lo / dx
    fixed[-1] -= 2 * c2 * state.flux_hi / dx
    leak_node = None
    if leak is not None and state.leak_at is not None and not leak.is_zero:
        pos = (state.leak_at - state.x_lo) / dx
        leak_node = round(pos)
        if abs(leak_node - pos) > 1e-6 or not 0 < leak_node < N:
            raise GridError(f"leak at {state.leak_at} m does not fall on an interior node")
        leak_scale = c2 / w[leak_node]

    def source(t):
        if leak_node is None:
            return fixed
        b = fixed.copy()
        b[leak_node] -= leak_scale * leak.rate(t)
        return b

    r = dt * D / dx**2
    ab = np.zeros((3, N + 1))
    ab[1, :] = 1 + 2 * th * r
    ab[0, 1:] = -th * r
    ab[2, :-1] = -th * r
    ab[0, 1] = -2 * th * r
    ab[2, -2] = -2 * th * r

    def lap(u):
        out = np.empty_like(u)
        out[1:-1] = u[2:] - 2 * u[1:-1] + u[:-2]
        out[0] = 2 * (u[1] - u[0])
        out[-1] = 2 * (u[-2] - u[-1])
        return out

    times = state.t_start + dt * np.arange(steps + 1)
    if t_out is None:
        keep = np.arange(steps + 1)
    else:
        rel = (np.asarray(t_out, dtype=float) - state.t_start) / dt
        keep = np.rint(rel).astype(int)
        if np.any(np.abs(keep - rel) > 1e-6) or np.any(keep < 0) or np.any(keep > steps):
            raise GridError("requested output times are not on the step grid")
    want = np.zeros(steps + 1, dtype=bool)
    want[keep] = True

    base = np.asarray(state.initial(x), dtype=float)
    if background == "evolving":
        u, base = base, np.zeros_like(base)
    else:
        u = np.zeros(N + 1)
    record = {}
    if want[0]:
        record[0] = u.copy()
    b_old = source(times[0])
    for k in range(1, steps + 1):
        b_new = source(times[k])
        rhs = u + (1 - th) * r * lap(u) + dt * (th * b_new + (1 - th) * b_old)
        u = solve_banded((1, 1), ab, rhs, check_finite=False)
        b_old = b_new
        if want[k]:
            record[k] = u.copy()

    idx = np.asarray(keep)
    p = base[:, None] + np.column_stack([record[k] for k in idx]) if idx.size else np.empty((x.size, 0))
    return PressureField(state.id, x, times[idx], p, "fd",
                         info={"dx": dx, "dt": dt, "theta": th, "background": background})


def linepack(field: PressureField, c: float) -> np.ndarray:
    """Per-area linepack ``(1/c^2) int P dx`` at each recorded time (kg/m^2)."""
    w = trapezoid_weights(field.x)
    return (w @ field.p) / c**2


def mass_balance_residual(field: PressureField, state: SectionState, leak=None) -> float:
    """Relative mismatch between linepack change and the net boundary/leak flux.

    ``|dM - (inflow - outflow - leak + closure source) dt| / M`` over the
    whole recorded window.
    """
    leak = state.leak if leak is None else leak
    if field.t.size < 2:
        return 0.0
    M = linepack(field, state.c)
    ta, tb = float(field.t[0]), float(field.t[-1])
    net = (state.flux_lo - state.flux_hi) * (tb - ta)
    net += (state.g_lo - state.g_hi) / state.two_a * (tb - ta)
    if leak is not None and state.leak_at is not None:
        net -= leak.integral(ta, tb)
    return abs((M[-1] - M[0]) - net) / abs(M[-1])


def convergence_order(state: SectionState, cfg: FDConfig, refinements: int = 3, leak=None) -> float:
    """Observed order from successive halvings of ``dx`` and ``dt``.

    Differences between consecutive levels are taken at the final time on the
    coarse nodes; the estimate uses the last three levels.
    """
    if refinements < 3:
        raise ValueError("a convergence estimate needs at least three grid levels")
    finals = []
    for k in range(refinements):
        f = 2**k
        level = replace(cfg, dx=cfg.dx / f, dt=cfg.dt / f)
        field = fd_solve(state, level, leak=leak, t_out=[state.t_start + cfg.horizon])
        finals.append(field.p[::f, -1])
    diffs = [np.max(np.abs(finals[k] - finals[k + 1])) for k in range(refinements - 1)]
    return math.log2(diffs[-2] / diffs[-1])
