"""Local unitary equivalence of multipartite mixed states via matrix realignment."""

from .equivalence import (
    CheckConfig,
    EquivalenceVerdict,
    Verdict,
    check_equivalence,
    pt_select,
    verify_witness,
)
from .gauge_search import GaugeUnitary, SearchConfig, assemble_gauge, gauge_objective, search_gauge
from .io import haar_unitary, parse_state, random_pair, write_state
from .realign_factor import (
    LocalUnitaryFactorization,
    RankError,
    RealignmentSVD,
    factor_local_unitary,
    nearest_kron_factors,
    realignment_svd,
)
from .spectral import GaugeBlockStructure, Spectrum, eig_hermitian, group_spectrum, invariant_screens, spectra_compatible
from .tensor_core import (
    DimensionError,
    MultipartiteState,
    StateMode,
    StateValidationError,
    partial_trace,
    partial_transpose,
    realign,
    realign_bipartition,
    tensor_product,
    unvec,
    vec,
)

__version__ = "0.1.0"
