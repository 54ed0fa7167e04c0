import dataclasses

import numpy as np
import pytest

from gasleak import presets
from gasleak.analytic import section_field
from gasleak.domain import km


def test_table_shapes():
    assert presets.TABLE_TIMES.size == 11
    for x_km, table in presets.SECTION_TABLES.values():
        assert table.shape == (x_km.size, 11)


def test_tables_open_on_the_published_profile():
    for x_km, table in presets.SECTION_TABLES.values():
        idx = [list(presets.TABLE1_X_KM).index(x) for x in x_km]
        np.testing.assert_array_equal(table[:, 0], presets.TABLE1_P[idx])


def test_paper_pair():
    assert (presets.paper_pair().ell1, presets.paper_pair().ell3) == (1e4, 2e4)


def test_seeded_states_cover_sections(states):
    for st in states:
        assert st.init_x[0] == st.x_lo and st.init_x[-1] == st.x_hi
    assert presets.table1_covers(1e4, 2e4)
    assert not presets.table1_covers(1e4, 1.2e4)


def test_backfit_recovers_planted_values(states):
    planted = dataclasses.replace(states[0], flux_lo=7.5, g_lo=-0.3)
    xs = km(presets.TABLE2_X_KM)
    table = section_field(xs, planted.t_start + presets.TABLE_TIMES, planted) / 1e4
    fit = presets.backfit_section(planted, presets.TABLE2_X_KM, table)
    assert fit["G0"] == pytest.approx(7.5, rel=1e-8)
    assert fit["g_lo"] == pytest.approx(-0.3, rel=1e-8)


def test_backfit_on_published_tables(states):
    raw = {}
    for st in states:
        x_km, table = presets.SECTION_TABLES[st.id]
        raw.update(presets.backfit_section(st, x_km, table))
    fit = presets.PAPER_FIT
    assert raw["G0"] == pytest.approx(fit.G0, rel=0.05)
    assert raw["g_lo"] == pytest.approx(fit.g_lo, rel=0.05)
    assert raw["G_ut"] == pytest.approx(fit.G_ut, rel=0.05)
    assert raw["Gs"] == pytest.approx(fit.Gs, rel=0.05)
    assert raw["g_hi"] == pytest.approx(fit.g_hi, rel=0.05)
