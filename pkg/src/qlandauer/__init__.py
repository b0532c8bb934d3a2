"""Exact two-qubit simulator for nonequilibrium Landauer bounds."""

from qlandauer.analysis import (
    AveragedRecord,
    CouplingEnsemble,
    MaxPointResult,
    RegionLabel,
    averaged_bounds,
    b_max,
    boundary_curve,
    clausius_threshold,
    classify_averaged,
    classify_max_point,
    ds_max,
    max_point,
)
from qlandauer.engine import (
    BoundsRecord,
    KrausSet,
    bounds_at,
    bounds_series,
    dissipated_heat,
    entropic_bound,
    evolve,
    kraus_set,
    thermodynamic_bound,
)
from qlandauer.model import (
    EnvironmentParams,
    InteractionModel,
    ModelKind,
    SystemStateParams,
    system_state,
    thermal_state,
    total_hamiltonian,
)

__version__ = "0.1.0"
