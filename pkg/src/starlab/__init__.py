"""Numerical laboratory for expanding configurations of radiation gaseous stars."""

from .profiles import (
    GridSpec,
    IsentropicProfile,
    ThermoProfile,
    profile_mass_moments,
    solve_isentropic_profile,
    solve_thermo_profile,
)
from .expansion import (
    ExpansionParams,
    ExpansionPath,
    classify_expansion,
    integrate_alpha,
    linear_clock,
    linear_clock_inverse,
    self_similar_clock,
    thermo_expansion_gate,
)
from .homogeneous import (
    PhaseState,
    PhaseTrajectory,
    curve_phi_s,
    energy_homogeneous,
    integrate_phase,
    phase_rhs,
)

__version__ = "0.1.0"
