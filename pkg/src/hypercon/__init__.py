"""Analytic connectivity of k-uniform hypergraphs.

The quantity computed here is the smallest value of the hypergraph
Laplacian form over the nonnegative unit k-sphere with one vertex weight
pinned to zero, minimized over the pinned vertex. It is positive exactly
when the hypergraph is connected, which makes it a quantitative
connectivity measure. The solver runs a feasible trust-region iteration
per pinned vertex with many seeded restarts; `oracle` holds independent
ground-truth machinery used by the test suite.
"""

from .ftr import (
    ConnectivityResult,
    FTRConfig,
    RestartStats,
    SolverError,
    SolverTrace,
    TraceRecord,
    VertexResult,
    compute_alpha,
    ftr_solve_vertex,
    init_point,
    kkt_certificate,
    multiplier,
    project_sphere,
)
from .hypergraph import (
    DegreeProfile,
    Hypergraph,
    HypergraphFormatError,
    complete,
    complete_minus,
    degrees,
    generate,
    hypercycle,
    is_connected,
    loose_path,
    parse_hypergraph,
    s_path,
    squid,
    sunflower,
    write_hypergraph,
)
from .oracle import (
    GridSpec,
    beta_two_path,
    closed_form_alpha,
    edge_connectivity_small,
    grid_alpha_j,
    qp_enum_oracle,
    upper_bound_vertex_cut,
)
from .reduction import STRATEGIES, CandidateSet, candidate_vertices, dominance_prune
from .subproblem import StepResult, TRSubproblem, cauchy_point, solve_tr_qp
from .tensor import (
    EdgeForm,
    PinnedPoint,
    SparseSymMatrix,
    lagrangian_parts,
    lap_grad,
    lap_hess,
    lap_value,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateSet",
    "ConnectivityResult",
    "DegreeProfile",
    "EdgeForm",
    "FTRConfig",
    "GridSpec",
    "Hypergraph",
    "HypergraphFormatError",
    "PinnedPoint",
    "RestartStats",
    "STRATEGIES",
    "SolverError",
    "SolverTrace",
    "SparseSymMatrix",
    "StepResult",
    "TRSubproblem",
    "TraceRecord",
    "VertexResult",
    "beta_two_path",
    "candidate_vertices",
    "cauchy_point",
    "closed_form_alpha",
    "complete",
    "complete_minus",
    "compute_alpha",
    "degrees",
    "dominance_prune",
    "edge_connectivity_small",
    "ftr_solve_vertex",
    "generate",
    "grid_alpha_j",
    "hypercycle",
    "init_point",
    "is_connected",
    "kkt_certificate",
    "lagrangian_parts",
    "lap_grad",
    "lap_hess",
    "lap_value",
    "loose_path",
    "multiplier",
    "parse_hypergraph",
    "project_sphere",
    "qp_enum_oracle",
    "s_path",
    "squid",
    "sunflower",
    "upper_bound_vertex_cut",
    "write_hypergraph",
    "__version__",
]
