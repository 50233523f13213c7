"""Complete reducibility of bipartite states: decision, constructions and probes."""

from .bipartite import (
    SitesDescriptor,
    compress,
    flip_operator,
    max_ent_projector,
    max_ent_vector,
    partial_trace,
    partial_transpose,
    realignment,
    shuffle,
    shuffle_matrices,
)
from .constructors import (
    TypeFlags,
    classify,
    counterexample_delta,
    diag_pair,
    maxent,
    new_type_state,
    power,
    root,
    support_state,
    werner,
)
from .probe import ProbeReport, probe, rank2_span_value
from .reducibility import (
    ReducibilityCertificate,
    Verdict,
    ZeroBlock,
    certify_pair,
    decompose,
    invariant_partner,
    is_completely_reducible,
    perron_psd,
    verify_certificate,
)
from .state import (
    DEFAULT_TOL,
    BipartiteState,
    DimensionError,
    DomainError,
    ParameterError,
    PreconditionError,
    ToleranceConfig,
    is_psd,
    random_state,
    support_projection,
)
from .superoperators import SuperOperator, f_apply, fg_superop, g_apply, g_superop

__version__ = "0.1.0"

__all__ = [
    "BipartiteState",
    "DEFAULT_TOL",
    "DimensionError",
    "DomainError",
    "ParameterError",
    "PreconditionError",
    "ProbeReport",
    "ReducibilityCertificate",
    "SitesDescriptor",
    "SuperOperator",
    "ToleranceConfig",
    "TypeFlags",
    "Verdict",
    "ZeroBlock",
    "certify_pair",
    "classify",
    "compress",
    "counterexample_delta",
    "decompose",
    "diag_pair",
    "f_apply",
    "fg_superop",
    "flip_operator",
    "g_apply",
    "g_superop",
    "invariant_partner",
    "is_completely_reducible",
    "is_psd",
    "max_ent_projector",
    "max_ent_vector",
    "maxent",
    "new_type_state",
    "partial_trace",
    "partial_transpose",
    "perron_psd",
    "power",
    "probe",
    "random_state",
    "rank2_span_value",
    "realignment",
    "root",
    "shuffle",
    "shuffle_matrices",
    "support_projection",
    "support_state",
    "verify_certificate",
    "werner",
]
