"""dc-field control of cavity-enhanced spontaneous emission of a two-level atom."""

from .dynamics import (
    InvariantBreach,
    ModelTier,
    StepSizeError,
    SystemParams,
    Trajectory,
    compare_tiers,
    integrate,
    rhs_averaged,
    rhs_full,
)
from .effective import (
    DriveStark,
    EffectiveRates,
    PolarizabilityStark,
    adiabatic_population,
    damped_rabi_oracle,
    effective_detuning,
    eta,
    kappa_from_q,
    rates,
    significance_estimate,
)
from .hilbert import OperatorSet, SpaceSpec, build_space, expectation, pure_state
from .timeavg import OscillatingTerm, effective_hamiltonian, numeric_average_check

__version__ = "0.1.0"
