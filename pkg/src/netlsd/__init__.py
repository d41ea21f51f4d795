"""Multi-scale heat and wave trace signatures for comparing graphs."""

__version__ = "0.1.0"

from .compare import EvalReport, SignatureCollection, evaluate_1nn, knn_query, roc_auc, signature_distance
from .errors import (
    ConvergenceError,
    IncompatibleSignaturesError,
    InconsistentEndsError,
    NetLSDError,
    ParseError,
    SizeError,
    UnsupportedCombinationError,
)
from .graph import (
    ComponentLabeling,
    Graph,
    connected_components,
    gen_erdos_renyi,
    gen_named,
    gen_sbm,
    load_edge_list,
    read_edge_list,
    rewire_degree_preserving,
    sbm_probabilities,
)
from .signature import (
    Signature,
    TimeGrid,
    compute_signature,
    compute_spectrum,
    heat_trace,
    make_time_grid,
    normalization_trace,
    signature_from_spectrum,
    taylor_heat_trace,
    wave_time_grid,
    wave_trace,
)
from .spectral import (
    NormalizedLaplacian,
    Spectrum,
    approximate_spectrum,
    build_laplacian,
    extreme_eigenvalues,
    full_spectrum,
)
