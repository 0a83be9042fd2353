"""SPAM-robust context-independence tests and unitarity estimation for quantum gates.

The package simulates noisy gate sequences on a tested qubit coupled to a
memory, builds tomographic probability matrices, runs three tests whose
null hypotheses hold for context-independent gates regardless of state
preparation and measurement errors, and turns the decay of log |det P_m|
into a gate-unitarity estimate with rigorous uncertainty.
"""

__version__ = "0.1.0"

from .errors import ConfigError, NumericalError
from .liouville import (
    MapMatrix,
    OperatorBasis,
    UnitalDecomposition,
    change_basis,
    compose,
    is_trace_preserving,
    liouville_of_unitary,
    pauli_basis,
    spectral_radius,
    spectrum,
    unital_decomposition,
    unitarity_det,
    unitarity_frobenius,
)
from .lindblad import (
    Dissipator,
    GateModel,
    ZZModelParams,
    build_gate,
    build_qubit_gate,
    dissipator_matrix,
    dissipator_trace,
    matrix_exp,
    qubit_relaxation_map,
    stationary_state,
    zz_context,
)
from .tomography import (
    ProbMatrix,
    SpamConfig,
    StateSet,
    frobenius_bound,
    ideal_prob_matrix,
    logdet_variance,
    mixed_sic_variance,
    probability_matrix,
    raw_map,
    sic_set,
    sic_tensor_variance,
    sic_variance_closed_form,
    standard_set,
    tensor_set,
)
from .context_tests import (
    GateSequence,
    TestObservations,
    cp_witness_det_monotone,
    cp_witness_radius,
    cycle_test,
    id_test,
    pd_test,
    toy_model,
    toy_probability,
)
from .sampling import bootstrap_variance, sample_probmatrix, substream
from .stats import (
    FitResult,
    PowerSweepResult,
    UnitarityEstimate,
    chi2_survival,
    f_survival,
    f_test_nested,
    power_sweep,
    slope_sd_bounds,
    unitarity_from_fit,
    wls_fit,
)
from .mc_frames import Frame, SearchRecord, frame_search, random_frame, sic_frame
