"""Cross-checking the series against the finite-difference oracle.

The oracle integrates the same linear diffusion problem with a
Crank-Nicolson scheme.  Its trapezoid linepack is conserved to round-off,
and on smooth data it converges at second order.
"""

import dataclasses

import numpy as np

from gasleak import presets
from gasleak.analytic import section_field
from gasleak.domain import LeakFluxModel
from gasleak.oracle import FDConfig, convergence_order, fd_solve, mass_balance_residual
from gasleak.reproduce import smooth_probe

states = presets.paper_fit_states()

for st in states:
    field = fd_solve(st, FDConfig(dx=100.0, dt=1.0))
    late = field.t - st.t_start >= 10.0
    ref = section_field(field.x, field.t[late], st)
    dev = np.abs(field.p[:, late] - ref) / ref
    print(f"section {st.id}: max deviation {dev.max():.2e}, "
          f"mass balance residual {mass_balance_residual(field, st):.1e}")

probe = smooth_probe(states[0])
for dx, dt in ((400.0, 4.0), (200.0, 2.0)):
    order = convergence_order(probe, FDConfig(dx=dx, dt=dt, horizon=600.0))
    print(f"observed order starting from dx={dx:g} m, dt={dt:g} s: {order:.3f}")

# A time-varying leak: the series integrates the ramp exactly, the oracle by steps.
ramp = LeakFluxModel.piecewise_linear([300.0, 500.0, 700.0], [0.0, 12.0, 2.0])
s2 = dataclasses.replace(states[1], leak=ramp)
for dx in (100.0, 50.0, 25.0):
    f = fd_solve(s2, FDConfig(dx=dx, dt=dx / 100.0), t_out=[500.0, 900.0])
    err = np.abs(section_field(f.x, f.t, s2) - f.p).max()
    print(f"ramp leak, dx={dx:5.1f} m: max |series - fd| = {err:.4f} Pa")

# A coarse time step is caught by the comparison.
coarse = fd_solve(states[0], FDConfig(dx=100.0, dt=120.0))
ref = section_field(coarse.x, coarse.t[1:], states[0])
print(f"dt=120 s: max deviation {np.max(np.abs(coarse.p[:, 1:] - ref) / ref):.2%}")
