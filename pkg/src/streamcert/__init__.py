"""Streaming strong-connectivity certificates and their applications."""

from .certify_k import (
    InfeasibleBranchingError,
    PromiseViolationError,
    SampleScheme,
    extract_disjoint_branchings,
    k_arc_cert_peeling,
    k_arc_cert_sampled,
    k_node_cert,
    residual_independence_check,
)
from .certify_one import (
    Certificate,
    OneCertReport,
    OneCertRun,
    RecursionPlan,
    one_cert_stream,
    tc_preserving_prune,
    validate_one_cert,
)
from .digraph import (
    Branching,
    BudgetError,
    ChainCover,
    CoverageError,
    Digraph,
    GraphFormatError,
    chain_cover_minimum,
    degeneracy,
    grow_branching,
    independence_number_exact,
    reachable,
    scc_ids,
    scc_tarjan,
    transitive_closure,
)
from .exact import (
    CertValidationReport,
    ConnReport,
    connectivity,
    kappa_st,
    lambda_st,
    minimal_certificates_exhaustive,
    validate_certificate,
)
from .streams import (
    INSERTION_ONLY,
    TURNSTILE,
    ArcStream,
    SpaceBudgetError,
    SpaceLedger,
    StreamFormatError,
    StreamIntegrityError,
    StreamStats,
    final_multiplicity,
    mp_min_select,
    run_passes,
)

__version__ = "0.1.0"

__all__ = [
    "ArcStream",
    "Branching",
    "BudgetError",
    "CertValidationReport",
    "Certificate",
    "ChainCover",
    "ConnReport",
    "CoverageError",
    "Digraph",
    "GraphFormatError",
    "INSERTION_ONLY",
    "InfeasibleBranchingError",
    "OneCertReport",
    "OneCertRun",
    "PromiseViolationError",
    "RecursionPlan",
    "SampleScheme",
    "SpaceBudgetError",
    "SpaceLedger",
    "StreamFormatError",
    "StreamIntegrityError",
    "StreamStats",
    "TURNSTILE",
    "chain_cover_minimum",
    "connectivity",
    "degeneracy",
    "extract_disjoint_branchings",
    "final_multiplicity",
    "grow_branching",
    "independence_number_exact",
    "k_arc_cert_peeling",
    "k_arc_cert_sampled",
    "k_node_cert",
    "kappa_st",
    "lambda_st",
    "minimal_certificates_exhaustive",
    "mp_min_select",
    "one_cert_stream",
    "reachable",
    "residual_independence_check",
    "run_passes",
    "scc_ids",
    "scc_tarjan",
    "tc_preserving_prune",
    "transitive_closure",
    "validate_certificate",
    "validate_one_cert",
]
