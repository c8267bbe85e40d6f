"""Bipartite incidence graphs, their spectra, and key agreement on graph-correlated inputs."""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    ConvergenceError,
    InvariantViolation,
    ResourceBudgetError,
    SkagraphError,
    UsageError,
)
from .field import FieldElem, FieldSpec, field_add, field_mul, field_square_roots
from .graphs import (
    Edge,
    GraphSpec,
    Side,
    VertexId,
    complete_bipartite,
    euclidean,
    hamming,
    hamming_theta,
    is_edge,
    neighbors,
    point_line,
    sample_edge,
    tensor_with_complete,
)
from .info import log_binomial, prefix_distance_check, profile_proxy, solve_entropy
from .mixing import SubsetPair, density_bound_check, edge_count, mixing_check
from .newman import choose_k, delta_precise_check, derandomize_protocol, sampling_failure_rate
from .ska import HammingPrefixConfig, ProtocolConfig, batch_stats, eavesdrop_audit, hamming_prefix_protocol, run_agreement
from .spectral import closed_form_lambda2, numeric_spectrum, tensor_spectrum_check

__all__ = [
    "ConfigurationError",
    "ConvergenceError",
    "Edge",
    "FieldElem",
    "FieldSpec",
    "GraphSpec",
    "HammingPrefixConfig",
    "InvariantViolation",
    "ProtocolConfig",
    "ResourceBudgetError",
    "Side",
    "SkagraphError",
    "SubsetPair",
    "UsageError",
    "VertexId",
    "__version__",
    "batch_stats",
    "choose_k",
    "closed_form_lambda2",
    "complete_bipartite",
    "delta_precise_check",
    "density_bound_check",
    "derandomize_protocol",
    "eavesdrop_audit",
    "edge_count",
    "euclidean",
    "field_add",
    "field_mul",
    "field_square_roots",
    "hamming",
    "hamming_prefix_protocol",
    "hamming_theta",
    "is_edge",
    "log_binomial",
    "mixing_check",
    "neighbors",
    "numeric_spectrum",
    "point_line",
    "prefix_distance_check",
    "profile_proxy",
    "run_agreement",
    "sample_edge",
    "sampling_failure_rate",
    "solve_entropy",
    "tensor_spectrum_check",
    "tensor_with_complete",
]
