"""Wave-particle duality and triality measures for n-path interference with a path detector."""

__version__ = "0.1.0"

from .identities import (
    BatchVerdict,
    IdentityResiduals,
    check_identities,
    check_mixed_inequality,
    run_batch,
    transition_sweep,
)
from .interferometer import (
    FringeScan,
    PhaseConfig,
    coherence_from_pairwise_scans,
    fringe_scan_two_path,
    output_intensity,
)
from .measures import (
    ConsistencyError,
    MeasureReport,
    coherence,
    distinguishability,
    distinguishability_q,
    entanglement_q,
    entanglement_sq,
    full_report,
    generalized_polarization,
    i_concurrence,
    predictability,
    predictability_q,
    uqsd_bound_two_path,
)
from .scenarios import ResultTable, canonical_scenarios, emit_table, parse_scenario
from .state import (
    DensityMatrix,
    DetectorGram,
    DetectorVectors,
    PathAmplitudes,
    QuantonDetectorState,
    ValidationError,
    bare_density,
    gram_from_vectors,
    random_mixed_density,
    random_state,
    reduced_density,
    validate_gram,
)
