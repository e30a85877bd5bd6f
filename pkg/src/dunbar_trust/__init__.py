"""Trust-gated information diffusion across Dunbar hierarchy layers."""

from .dunbar import (
    DEFAULT_LAYERS,
    CutoffResult,
    SweepTable,
    alpha_cutoff_curve,
    beta_independence_check,
    cutoff_for_layer,
    cutoff_vs_population,
    sweep_cutoffs,
)
from .dynamics import (
    InfeasibleStateError,
    ModelParams,
    PopulationFractions,
    Trajectory,
    UnreachableLevelError,
    closed_form_r,
    closed_form_r_no_ignorant,
    informed_count,
    integrate,
    time_to_level,
)
from .montecarlo import EnsembleResult, assign_trust, simulate_ensemble
from .trust import InputRange, Kind, TrustDistribution, power_law, uniform

__version__ = "0.1.0"
