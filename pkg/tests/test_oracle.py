import dataclasses

import numpy as np
import pytest

from gasleak.analytic import section_field
from gasleak.domain import LeakFluxModel, SectionState
from gasleak.errors import GridError, StabilityError, ValidationError
from gasleak.oracle import (
    FDConfig,
    convergence_order,
    fd_solve,
    linepack,
    mass_balance_residual,
    trapezoid_weights,
)
from gasleak.reproduce import smooth_probe


def sealed(p_init=(1e5, 1e5), **kw):
    base = dict(init_x=(0.0, 1e4), init_p=p_init, c=383.3, two_a=0.1, t_start=0.0)
    base.update(kw)
    return SectionState(2, 0.0, 1e4, **base)


def test_uniform_sealed_equilibrium():
    field = fd_solve(sealed(), FDConfig(dx=250, dt=5, horizon=300))
    assert field.source == "fd"
    assert np.max(np.abs(field.p - 1e5)) < 1e-8


def test_linear_profile_with_matching_fluxes_is_stationary():
    G = 10.0
    st = sealed((1e5, 1e5 - 0.1 * G * 1e4), flux_lo=G, flux_hi=G)
    field = fd_solve(st, FDConfig(dx=250, dt=5, horizon=600), background="evolving")
    np.testing.assert_allclose(field.p, field.p[:, :1].repeat(field.t.size, axis=1), rtol=1e-12)


@pytest.mark.parametrize("theta", [0.5, 1.0])
def test_mass_balance_residual_is_round_off(states, theta):
    for st in states:
        field = fd_solve(st, FDConfig(dx=100, dt=2, theta=theta, horizon=600))
        assert mass_balance_residual(field, st) < 1e-8


def test_residual_flags_a_flipped_flux_sign(states):
    s3 = states[2]
    field = fd_solve(s3, FDConfig(dx=100, dt=2, horizon=600))
    wrong = dataclasses.replace(s3, flux_hi=-s3.flux_hi)
    expected = 2 * s3.flux_hi * 600 / linepack(field, s3.c)[-1]
    assert mass_balance_residual(field, wrong) == pytest.approx(expected, rel=1e-6)


def test_residual_zero_for_sealed_run():
    st = sealed((1e5, 0.9e5))
    field = fd_solve(st, FDConfig(dx=200, dt=4, horizon=400), background="evolving")
    assert mass_balance_residual(field, st) < 1e-13


@pytest.mark.parametrize("section", [0, 1, 2])
def test_matches_series_after_early_window(states, section):
    st = states[section]
    field = fd_solve(st, FDConfig(dx=100, dt=1, horizon=600))
    late = field.t - st.t_start >= 10
    ref = section_field(field.x, field.t[late], st)
    assert np.max(np.abs(field.p[:, late] - ref) / ref) <= 0.01


def test_order_on_smooth_probe(states):
    order = convergence_order(smooth_probe(states[0]), FDConfig(dx=200, dt=2, horizon=600))
    assert order == pytest.approx(2.0, abs=0.2)


def test_order_with_point_leak(states):
    s2 = dataclasses.replace(states[1], init_x=(1e4, 2e4), init_p=(1.2e5, 1.2e5))
    order = convergence_order(s2, FDConfig(dx=500, dt=4, horizon=600))
    assert order >= 1.0


def test_order_needs_three_levels(states):
    with pytest.raises(ValueError):
        convergence_order(states[0], FDConfig(), refinements=2)


def test_maximum_principle_without_sources():
    st = sealed((1.2e5, 0.8e5))
    field = fd_solve(st, FDConfig(dx=100, dt=10, theta=1.0, horizon=2000), background="evolving")
    assert field.p.max() <= 1.2e5 + 1e-9
    assert field.p.min() >= 0.8e5 - 1e-9
    spread = field.p.max(axis=0) - field.p.min(axis=0)
    assert np.all(np.diff(spread) <= 1e-9)


def test_explicit_stability_bound():
    st = sealed()
    with pytest.raises(StabilityError):
        fd_solve(st, FDConfig(dx=100, dt=1, theta=0.0, horizon=10))
    field = fd_solve(st, FDConfig(dx=1000, dt=0.25, theta=0.0, horizon=5))
    assert np.max(np.abs(field.p - 1e5)) < 1e-8


def test_grid_must_fit(states):
    with pytest.raises(GridError):
        fd_solve(states[0], FDConfig(dx=300, dt=1, horizon=10))
    with pytest.raises(GridError):
        fd_solve(states[1], FDConfig(dx=200, dt=1, horizon=10))
    with pytest.raises(GridError):
        fd_solve(states[0], FDConfig(dx=100, dt=2, horizon=10), t_out=[301.0])


def test_frozen_background_matches_series_for_tilted_profile():
    st = sealed((1.1e5, 0.9e5), flux_lo=5.0, t_start=100.0)
    field = fd_solve(st, FDConfig(dx=100, dt=1, horizon=300), t_out=[400.0])
    ref = section_field(field.x, 400.0, st)
    assert np.max(np.abs(field.p[:, 0] - ref) / ref) < 1e-3
    with pytest.raises(ValueError):
        fd_solve(st, FDConfig(dx=100, dt=1, horizon=10), background="thawed")


def test_config_check():
    with pytest.raises(ValidationError):
        FDConfig(theta=1.5).check()
    with pytest.raises(ValidationError):
        FDConfig(dx=0).check()


def test_leak_override_and_linepack_drop(states):
    s2 = states[1]
    ramp = LeakFluxModel.piecewise_linear([300.0, 900.0], [0.0, 10.0])
    field = fd_solve(s2, FDConfig(dx=100, dt=1, horizon=600), leak=ramp, t_out=[300.0, 900.0])
    m = linepack(field, s2.c)
    assert m[0] - m[1] == pytest.approx(ramp.integral(300.0, 900.0), rel=1e-10)
    assert mass_balance_residual(field, s2, leak=ramp) < 1e-12


def test_trapezoid_weights_sum_to_length():
    x = np.linspace(2.0, 7.0, 11)
    assert trapezoid_weights(x).sum() == pytest.approx(5.0)
