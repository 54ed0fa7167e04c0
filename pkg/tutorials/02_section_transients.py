"""Pressure in the three isolated sections after the valves close.

Section 1 keeps receiving gas from the compressor station and fills up;
section 2 is sealed and vents through the leak; section 3 keeps feeding
consumers and drains.  The ``paper-fit`` preset seeds each section with the
published pre-closure profile and uses effective fluxes recovered by least
squares from the published transients.
"""

import numpy as np

from gasleak import presets
from gasleak.analytic import preclosure_profile, section_field
from gasleak.domain import km, to_table_units

vs = presets.paper_validated()
states = presets.paper_fit_states()

print("pre-closure profile at t1 = 300 s (1e-2 MPa):")
xs = km(presets.TABLE1_X_KM)
for x, paper, got in zip(presets.TABLE1_X_KM, presets.TABLE1_P,
                         to_table_units(preclosure_profile(xs, 300.0, vs))):
    print(f"  x={x:5.1f} km  published {paper:6.2f}  series {got:6.2f}")

offsets = presets.TABLE_TIMES
for st in states:
    x_km, table = presets.SECTION_TABLES[st.id]
    p = to_table_units(section_field(km(x_km), st.t_start + offsets, st))
    err = np.abs(p - table) / table
    print(f"\nsection {st.id} [{st.x_lo / 1e3:g}, {st.x_hi / 1e3:g}] km, worst cell error {err.max():.2%}")
    print("   x_km " + " ".join(f"{t:6.0f}" for t in offsets))
    for x, row in zip(x_km, p):
        print(f"  {x:5.1f} " + " ".join(f"{v:6.2f}" for v in row))

# Where do the effective fluxes come from?  Refit them from the tables.
print("\nleast-squares refit of the effective parameters:")
for st in states:
    x_km, table = presets.SECTION_TABLES[st.id]
    print(f"  section {st.id}:", {k: round(v, 3) for k, v in presets.backfit_section(st, x_km, table).items()})
print("rounded preset:", presets.PAPER_FIT)
