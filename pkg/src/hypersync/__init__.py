"""Synchrony, quotients and admissible dynamics on weighted directed hypergraphs."""

__version__ = "0.1.0"

from .exceptions import *  # noqa: F401,F403
from .hypergraph import (
    Hyperedge,
    Hypergraph,
    IncidenceDigraph,
    as_fraction,
    backward_star,
    build_hypergraph,
    combine_edges,
    constituent,
    forward_star,
    incidence_digraph,
    is_connected,
    normalize_heads,
    split_edge_head,
    tail_cardinalities,
)
from .partition import Partition, iter_partitions, iter_refinements, parse_partition_literal
from .synchrony import (
    BalanceResult,
    BalanceWitness,
    balanced_via_incidence,
    check_cluster_symmetry,
    coarsest_balanced,
    coarsest_equitable,
    enumerate_balanced,
    enumerate_equitable,
    input_equivalence,
    is_balanced,
    lift_partition,
    matrix_synchrony_check,
    pattern_of,
    pattern_weights,
    project_partition,
    quotient,
)
from .linalg import eig_dense, hessenberg
from .dynamics import (
    CouplingSystem,
    custom_coupling,
    eval_field,
    flow_invariance_check,
    integrate,
    jacobian_fd,
    linear_coupling,
    product_coupling,
    restriction_equals_quotient,
    rk4,
    trajectory_invariance,
)
from .replicator import (
    ReplicatorSystem,
    replicator_field,
    replicator_hypergraph,
    replicator_jacobian,
    replicator_synchrony,
    simplex_drift,
    stability_report,
)
from .fileformat import HypergraphDocument, parse_hypergraph_file, print_document
from .datasets import list_examples, load_example
from .estimators import BalancedPartition, QuotientReducer
