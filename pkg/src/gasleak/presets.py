"""Published data for the 30 km worked example and the ``paper-fit`` preset.

The worked example gives the line constants but not the leak flux, the
offtake, or the closure gradient terms.  They are recovered by
:func:`backfit_section`, which is linear least squares: for a fixed initial
profile every section field is affine in its fluxes and gradient terms.
Rounded fit results are frozen in :data:`PAPER_FIT`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import section_field
from .domain import (
    LeakFluxModel,
    LeakScenario,
    LineParams,
    SectionState,
    SeriesConfig,
    ValidatedScenario,
    from_table_units,
    km,
    validate,
)
from .placement import ValvePair, locate_isolation_valves

#: Offsets since closure (s) used by the transient tables.
TABLE_TIMES = np.arange(0.0, 601.0, 60.0)

#: Pre-closure profile at t1 = 300 s; x in km, pressure in 1e-2 MPa.
TABLE1_X_KM = np.array([0.0, 5.0, 10.0, 14.5, 20.0, 25.0, 30.0])
TABLE1_P = np.array([13.36, 12.82, 12.19, 11.56, 11.24, 10.86, 10.40])

TABLE2_X_KM = np.array([0.0, 5.0, 10.0])
TABLE2_P = np.array([
    [13.36, 14.13, 14.58, 15.02, 15.46, 15.91, 16.35, 16.79, 17.24, 17.68, 18.13],
    [12.82, 13.22, 13.67, 14.11, 14.55, 15.0, 15.44, 15.89, 16.33, 16.77, 17.22],
    [12.19, 12.47, 12.91, 13.36, 13.8, 14.24, 14.69, 15.13, 15.57, 16.02, 16.46],
])

TABLE3_X_KM = np.array([10.0, 14.5, 20.0])
TABLE3_P = np.array([
    [12.19, 11.77, 11.32, 10.87, 10.43, 9.98, 9.54, 9.1, 8.65, 8.21, 7.77],
    [11.56, 11.03, 10.59, 10.15, 9.7, 9.26, 8.81, 8.37, 7.93, 7.48, 7.04],
    [11.24, 10.86, 10.42, 9.97, 9.53, 9.09, 8.64, 8.2, 7.75, 7.31, 6.87],
])

TABLE4_X_KM = np.array([20.0, 25.0, 30.0])
TABLE4_P = np.array([
    [11.24, 10.96, 10.52, 10.08, 9.63, 9.19, 8.74, 8.3, 7.86, 7.41, 6.97],
    [10.86, 10.46, 10.01, 9.57, 9.13, 8.68, 8.24, 7.8, 7.35, 6.91, 6.46],
    [10.4, 9.63, 9.19, 8.74, 8.3, 7.85, 7.41, 6.97, 6.52, 6.08, 5.63],
])

SECTION_TABLES = {1: (TABLE2_X_KM, TABLE2_P), 2: (TABLE3_X_KM, TABLE3_P),
                  3: (TABLE4_X_KM, TABLE4_P)}

#: Ratios quoted alongside the tables: ``P(t=600)/P(t=60)`` growth for section 1,
#: ``P(t=60)/P(t=600)`` reduction for sections 2 and 3.  Each value is keyed by
#: the table row whose own entries reproduce it; the prose attaches some of
#: them to the neighbouring row.
QUOTED_RATIOS = {
    1: {0.0: 1.28, 5.0: 1.30, 10.0: 1.32},
    2: {10.0: 1.51, 14.5: 1.57, 20.0: 1.58},
    3: {20.0: 1.57, 30.0: 1.93},
}

#: Activation time and delivery shortfall quoted for the worked example.
QUOTED_T2 = 555.0
QUOTED_T2_OFFSET = 255.0
QUOTED_DEFICIT = 0.48


@dataclass(frozen=True)
class FitParams:
    """Effective fluxes (Pa*s/m) and closure gradient terms (Pa/m)."""

    G0: float
    g_lo: float
    G_ut: float
    Gs: float
    g_hi: float


#: Rounded least-squares fit to the transient tables.
PAPER_FIT = FitParams(G0=10.0, g_lo=-0.5, G_ut=5.0, Gs=10.0, g_hi=-0.5)


def paper_params(fit: FitParams = PAPER_FIT) -> LineParams:
    return LineParams(c=383.3, two_a=0.1, L=3.0e4, step=1.0e4, Pb=14.0e4, Ps=11.0e4,
                      G0=fit.G0, Gs=fit.Gs, eps=1.35)


def paper_scenario(fit: FitParams = PAPER_FIT) -> LeakScenario:
    return LeakScenario(ell2=1.45e4, t1=300.0, leak_flux=LeakFluxModel.constant(fit.G_ut),
                        horizon=900.0, x_grid=tuple(km(TABLE1_X_KM)),
                        t_grid=tuple(TABLE_TIMES))


def paper_validated(fit: FitParams = PAPER_FIT) -> ValidatedScenario:
    return validate(paper_params(fit), paper_scenario(fit))


def paper_pair() -> ValvePair:
    s = paper_scenario()
    p = paper_params()
    return locate_isolation_valves(s.ell2, p.step, p.L)


def _table1_samples(lo, hi):
    xs = km(TABLE1_X_KM)
    keep = (xs >= lo - 1e-6) & (xs <= hi + 1e-6)
    return tuple(xs[keep].tolist()), tuple(from_table_units(TABLE1_P[keep]).tolist())


def table1_covers(lo: float, hi: float) -> bool:
    """Whether the published profile has samples at both ends of ``[lo, hi]``."""
    xs = km(TABLE1_X_KM)
    return bool(np.any(np.isclose(xs, lo)) and np.any(np.isclose(xs, hi)))


def seeded_states(params: LineParams, scenario: LeakScenario, pair: ValvePair,
                  g_lo: float, g_hi: float) -> tuple:
    """Section states at ``t1`` whose initial profiles are the published pre-closure samples."""
    common = dict(c=params.c, two_a=params.two_a, t_start=scenario.t1)
    s1 = SectionState(1, 0.0, pair.ell1, *_table1_samples(0.0, pair.ell1),
                      flux_lo=params.G0, g_lo=g_lo, **common)
    s2 = SectionState(2, pair.ell1, pair.ell3, *_table1_samples(pair.ell1, pair.ell3),
                      leak_at=scenario.ell2, leak=scenario.leak_flux, **common)
    s3 = SectionState(3, pair.ell3, params.L, *_table1_samples(pair.ell3, params.L),
                      flux_hi=params.Gs, g_hi=g_hi, **common)
    return s1, s2, s3


def paper_fit_states(fit: FitParams = PAPER_FIT) -> tuple:
    """Section states at t1 seeded with the published pre-closure profile."""
    return seeded_states(paper_params(fit), paper_scenario(fit), paper_pair(), fit.g_lo, fit.g_hi)


_FIT_KNOBS = {1: ("flux_lo", "g_lo"), 2: ("leak",), 3: ("flux_hi", "g_hi")}


def _unit_response(state: SectionState, knob: str, xs, ts, cfg):
    zero = dict(flux_lo=0.0, flux_hi=0.0, g_lo=0.0, g_hi=0.0, leak=None)
    if knob == "leak":
        zero["leak"] = LeakFluxModel.constant(1.0)
    else:
        zero[knob] = 1.0
    kw = {**state.__dict__, **zero}
    probe = SectionState(**kw)
    return section_field(xs, ts, probe, cfg) - state.initial(xs)[:, None]


def backfit_section(state: SectionState, x_km, table, t_offsets=TABLE_TIMES,
                    cfg: SeriesConfig = SeriesConfig(), skip_first: bool = True) -> dict:
    """Least-squares estimate of a section's fluxes/gradient terms from a table.

    ``table`` is in 1e-2 MPa with rows at ``x_km`` and columns at
    ``t_offsets`` seconds after closure.  The closure column is skipped by
    default because it only repeats the initial profile.
    """
    xs = km(np.asarray(x_km, dtype=float))
    cols = slice(1, None) if skip_first else slice(None)
    ts = state.t_start + np.asarray(t_offsets, dtype=float)[cols]
    rhs = (from_table_units(np.asarray(table, dtype=float))[:, cols]
           - state.initial(xs)[:, None]).ravel()
    knobs = _FIT_KNOBS[state.id]
    design = np.column_stack([_unit_response(state, k, xs, ts, cfg).ravel() for k in knobs])
    coef, *_ = np.linalg.lstsq(design, rhs, rcond=None)
    names = {"flux_lo": "G0", "g_lo": "g_lo", "leak": "G_ut", "flux_hi": "Gs", "g_hi": "g_hi"}
    return {names[k]: float(v) for k, v in zip(knobs, coef)}
