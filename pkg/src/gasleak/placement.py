"""Connector layout and the isolation-valve pair that brackets a leak."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GeometryError, OnConnectorError

TIE_BREAKS = ("reject", "bracket-upstream")

_RTOL = 1e-9


@dataclass(frozen=True)
class ValvePair:
    """Left valve (4.2) at ``ell1`` and right valve (4.1) at ``ell3 = n * step``."""

    ell1: float
    ell3: float
    n: int

    @property
    def span(self) -> float:
        return self.ell3 - self.ell1

    def complement(self, ell2: float) -> float:
        """The fraction ``a`` with ``ell2/step + a = n``."""
        return self.n - ell2 / self.span


def _bays(step: float, L: float) -> int:
    if not (step > 0 and L > 0):
        raise GeometryError("step and line length must be positive")
    if step > L:
        raise GeometryError("connector step exceeds the line length")
    ratio = L / step
    m = round(ratio)
    if abs(ratio - m) > _RTOL * max(1.0, ratio):
        raise GeometryError(f"line length {L} m is not a multiple of the step {step} m")
    return int(m)


def connector_positions(step: float, L: float) -> list:
    """Interior connector positions ``[step, 2*step, ..., L - step]``.

    The line ends are compressor stations, not connectors.
    """
    m = _bays(step, L)
    return [k * step for k in range(1, m)]


def locate_isolation_valves(ell2: float, step: float, L: float,
                            tie_break: str = "reject") -> ValvePair:
    """Valves closest to the leak on either side.

    ``n`` is the smallest integer with ``n * step > ell2``; the pair is
    ``(n*step - step, n*step)``.  A leak exactly on a connector raises
    OnConnectorError under ``tie_break="reject"``; ``"bracket-upstream"``
    closes the bay upstream of it, so the leak sits on the right valve.
    """
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"unknown tie-break policy {tie_break!r}")
    m = _bays(step, L)
    if not 0 < ell2 < L:
        raise GeometryError(f"leak position {ell2} m is outside (0, {L})")
    ratio = ell2 / step
    k = round(ratio)
    if abs(ratio - k) <= _RTOL * max(1.0, ratio):
        if k == 0 or k == m:
            raise GeometryError(f"leak at {ell2} m is indistinguishable from a station")
        if tie_break == "reject":
            raise OnConnectorError(f"leak at {ell2} m coincides with connector {k}")
        n = int(k)
    else:
        n = math.floor(ratio) + 1
    if n > m:
        raise GeometryError("right isolation valve would lie beyond the line end")
    return ValvePair(ell1=(n - 1) * step, ell3=n * step, n=n)
