import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gasleak.errors import GeometryError, OnConnectorError
from gasleak.placement import ValvePair, connector_positions, locate_isolation_valves


def brute_force(ell2, step, L):
    k = 1
    while k * step <= ell2:
        k += 1
    return k


def test_paper_leak():
    assert locate_isolation_valves(14500, 10000, 30000) == ValvePair(10000, 20000, 2)


def test_matches_brute_force_scan():
    pair = locate_isolation_valves(3200, 2000, 30000)
    assert pair == ValvePair(2000, 4000, 2)
    assert pair.n == brute_force(3200, 2000, 30000)


def test_leak_on_connector():
    with pytest.raises(OnConnectorError):
        locate_isolation_valves(10000, 10000, 30000)
    assert locate_isolation_valves(10000, 10000, 30000, "bracket-upstream") == ValvePair(0, 10000, 1)


def test_unknown_tie_break():
    with pytest.raises(ValueError):
        locate_isolation_valves(14500, 10000, 30000, "nearest")


def test_leak_beyond_last_bay():
    with pytest.raises(GeometryError):
        locate_isolation_valves(31000, 10000, 30000)


def test_complement_is_fractional():
    pair = locate_isolation_valves(14500, 10000, 30000)
    assert pair.complement(14500) == pytest.approx(0.55)
    assert pair.span == 10000


def test_connector_positions():
    assert connector_positions(10000, 30000) == [10000, 20000]
    assert connector_positions(30000, 30000) == []
    with pytest.raises(GeometryError):
        connector_positions(7000, 30000)


@settings(max_examples=1000, deadline=None)
@given(bays=st.integers(1, 60), step=st.integers(1, 50_000), frac=st.floats(0.0, 1.0))
def test_valves_bracket_the_leak(bays, step, frac):
    L = bays * step
    ell2 = frac * L
    ratio = ell2 / step
    if not 0 < ell2 < L or abs(ratio - round(ratio)) <= 1e-9 * max(1.0, ratio):
        return
    pair = locate_isolation_valves(ell2, step, L)
    assert pair.ell1 < ell2 < pair.ell3
    assert pair.ell3 - pair.ell1 == step
    assert pair.ell3 <= L
    assert pair.n == brute_force(ell2, step, L)


@settings(max_examples=200, deadline=None)
@given(k=st.integers(0, 9), a=st.floats(0.01, 0.99), b=st.floats(0.01, 0.99))
def test_piecewise_constant_within_a_bay(k, a, b):
    step, L = 1000.0, 10_000.0
    assert locate_isolation_valves((k + a) * step, step, L) == locate_isolation_valves((k + b) * step, step, L)
