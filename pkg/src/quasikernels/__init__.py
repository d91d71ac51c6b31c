"""Quasi-kernels in digraphs: constructions, exact oracles and scans."""
from .digraph import (
    CompositionSpec,
    Digraph,
    NeighborhoodPartition,
    compose,
    delete,
    distance_partition,
    in_neighborhood,
    induced,
    is_independent,
    is_sink_free,
    parse_digraph,
    parse_labels,
    second_in_neighborhood,
    serialize_digraph,
    sinks,
    sources,
    to_dot,
)
from .errors import (
    InvalidInputError,
    InvariantError,
    ParseError,
    PreconditionError,
    QkError,
    ResourceLimitError,
    SearchCapExceeded,
)
from .generators import enumerate_digraphs, random_dag_partitioned, random_digraph, random_semicomplete, random_split, random_tournament
from .qk import (
    is_good_quasi_kernel,
    is_kernel_perfect_exact,
    jacob_meyniel_refine,
    kernel_dag,
    kernel_exact,
    maximalize_qk,
    minimalize_qk,
    minimum_quasi_kernel_exact,
    quasi_kernel_cl,
    quasi_kernel_forced,
    verify_kernel,
    verify_quasi_kernel,
)
from .recognition import (
    ForbiddenWitness,
    MatchingDecomposition,
    find_forbidden,
    is_semicomplete,
    is_tournament,
    matching_decomposition,
    max_matching,
    recognize_one_way_split,
    verify_witness,
)
from .scan import ScanConfig, ScanReport, reproduce_sharpness_table, run_scan
from .small import (
    SmallQkOutcome,
    lift_good_qk_composition,
    small_qk_anti_claw_free,
    small_qk_good,
    small_qk_k41_free,
    small_qk_partitioned,
    small_qk_via_kernel_of_n2,
    theorem3_predicate,
)
from .split import (
    AuxDigraphH,
    OneWaySplitPartition,
    build_aux,
    construct_d_k,
    construct_dstar,
    split_min_qk_exact,
    split_small_qk,
)
