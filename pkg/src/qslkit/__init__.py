"""Energy-time speed limits for isolated quantum systems.

Works entirely with the energy distribution of a pure state: validated
spectra, the elementary evolution-time bounds and their Lp relatives,
regime classification, a certified envelope on the overlap angle, and a
falsification harness that stress-tests every advertised inequality.
"""

from .bounds import (
    BOUNDARY,
    DEFAULT_P_GRID,
    DUAL_ML,
    FORBIDDEN,
    ML,
    MT,
    BoundSet,
    RegimeReport,
    bound_set,
    bounds_from_moments,
    classify_point,
    classify_regime,
    crossover_times,
    envelope_angle,
    envelope_angle_from_taus,
    ml_angle_term,
    mt_angle_term,
    popoviciu,
    xi,
)
from .figures import (
    RegimeGrid,
    TraceDataset,
    fig1_dataset,
    fig2_dataset,
    fig3_dataset,
    grid_to_csv,
    grid_to_json,
    trace_dataset,
    trace_to_csv,
    trace_to_json,
)
from .states import (
    EnergyMoments,
    OverlapSample,
    SpectralState,
    dual_state,
    energy_moments,
    load_state,
    make_qubit,
    overlap,
    qutrit_from_moments,
    sample_random_state,
    save_state,
    state_from_json,
    state_to_json,
    validate_state,
)
from .verify import (
    FalsificationReport,
    SweepConfig,
    TangencySolution,
    Violation,
    a_of_q,
    check_envelope,
    falsification_sweep,
    find_orthogonalization_time,
    xi_comparison,
    xi_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY",
    "DEFAULT_P_GRID",
    "DUAL_ML",
    "FORBIDDEN",
    "ML",
    "MT",
    "BoundSet",
    "EnergyMoments",
    "FalsificationReport",
    "OverlapSample",
    "RegimeGrid",
    "RegimeReport",
    "SpectralState",
    "SweepConfig",
    "TangencySolution",
    "TraceDataset",
    "Violation",
    "a_of_q",
    "bound_set",
    "bounds_from_moments",
    "check_envelope",
    "classify_point",
    "classify_regime",
    "crossover_times",
    "dual_state",
    "energy_moments",
    "envelope_angle",
    "envelope_angle_from_taus",
    "falsification_sweep",
    "fig1_dataset",
    "fig2_dataset",
    "fig3_dataset",
    "find_orthogonalization_time",
    "grid_to_csv",
    "grid_to_json",
    "load_state",
    "make_qubit",
    "ml_angle_term",
    "mt_angle_term",
    "overlap",
    "popoviciu",
    "qutrit_from_moments",
    "sample_random_state",
    "save_state",
    "state_from_json",
    "state_to_json",
    "trace_dataset",
    "trace_to_csv",
    "trace_to_json",
    "validate_state",
    "xi",
    "xi_comparison",
    "xi_oracle",
    "__version__",
]
