"""Which valves close when a leak is reported?

Connectors join the two parallel lines every ``step`` metres.  Once the leak
position is known, the damaged bay is sealed by the automatic valves at the
connectors on either side of it.
"""

import numpy as np

from gasleak.errors import OnConnectorError
from gasleak.placement import connector_positions, locate_isolation_valves

L, step = 30_000.0, 10_000.0
print("connectors:", connector_positions(step, L))

# The worked example: leak at 14.5 km.
pair = locate_isolation_valves(14_500.0, step, L)
print(f"leak at 14.5 km -> close valves at {pair.ell1 / 1e3:g} km and {pair.ell3 / 1e3:g} km "
      f"(connector n={pair.n}, fractional position in bay {pair.complement(14_500.0):.2f})")

# Any leak inside a bay maps to that bay's valves.
for ell2 in np.linspace(500.0, 29_500.0, 7):
    p = locate_isolation_valves(ell2, step, L)
    print(f"  leak {ell2 / 1e3:5.2f} km -> [{p.ell1 / 1e3:g}, {p.ell3 / 1e3:g}] km")

# A leak right on a connector is ambiguous; by default it is refused.
try:
    locate_isolation_valves(10_000.0, step, L)
except OnConnectorError as exc:
    print("on a connector:", exc)
upstream = locate_isolation_valves(10_000.0, step, L, tie_break="bracket-upstream")
print(f"with bracket-upstream: [{upstream.ell1:g}, {upstream.ell3:g}] m")
