"""Transient pressures, gas loss and valve dispatch after a leak on a parallel gas main."""

__version__ = "0.1.0"

from .analytic import (
    closure_states,
    decay_rate,
    field_snapshot,
    inlet_pressure,
    preclosure_profile,
    section1_pressure,
    section2_pressure,
    section3_pressure,
)
from .dispatch import (
    build_timeline,
    compute_activation_time,
    dispatch_report,
    leaked_mass,
    supply_deficit,
)
from .domain import (
    LeakFluxModel,
    LeakScenario,
    LineParams,
    PressureField,
    SectionState,
    SeriesConfig,
    ValidatedScenario,
    validate,
)
from .oracle import FDConfig, convergence_order, fd_solve, mass_balance_residual
from .placement import ValvePair, connector_positions, locate_isolation_valves
