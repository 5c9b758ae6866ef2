"""Random induced subposets of the subset lattice: thresholds and Ramsey tools.

The package computes the certified containment exponent of a finite poset
(the constant governing when a random subset family starts containing it),
classifies which weightings attain it, bounds the corresponding Ramsey
exponents, decides small arrow relations exactly, reduces copy avoidance to
CNF, and verifies the asymptotics by Monte Carlo sampling.
"""

from .posets import (
    AntichainFamily,
    CapacityError,
    DslError,
    OrderCycleError,
    Poset,
    PosetError,
    antichain_count,
    antichain_poset,
    antichains,
    automorphisms,
    binary_tree_2,
    blowup,
    boolean_lattice,
    catalog,
    chain,
    connected_components,
    contains_copy,
    diamond,
    disjoint_union,
    double_diamond,
    fish,
    induced_subposet,
    is_isomorphic,
    layered,
    lex_product,
    load_poset,
    parse_dsl,
    parse_poset_arg,
    reverse,
    reverse_automorphisms,
    tower,
    vee,
    wedge,
    wedge_prime,
    y_double_prime,
    y_poset,
    y_prime,
)
from .correspondence import (
    CopyMap,
    Partition,
    ShadowMap,
    copy_of_partition,
    count_copies,
    count_weighted_partitions,
    iter_copy_images,
    partition_of_copy,
    shadow_antichain,
    shadow_partition,
    shadow_weighting,
    starred_count,
    surjection_count,
)
from .threshold import (
    BalancedSolution,
    Classification,
    CriticalExponentReport,
    ExponentTable,
    balanced_solve,
    binary_entropy,
    blowup_bounds,
    bounded_upper_bound,
    c_star,
    chain_threshold,
    classify,
    critical_exponent_wrt,
    entropy,
    lift_bound,
    star_threshold,
    trivial_upper_bound,
    two_point_weighting,
    universality_band,
    wide_diamond_threshold,
)
from .ramsey import (
    CnfFormula,
    RamseyBoundsReport,
    SatResult,
    arrows,
    assignment_to_colouring,
    encode_avoidance,
    enumerate_pattern_copies,
    exponent_bounds,
    parse_dimacs,
    ramsey_number,
    solve_cnf,
    verify_colouring,
)
from .simulate import (
    Sample,
    SweepReport,
    contains_pattern,
    copy_weighting,
    find_pattern,
    sample_pnp,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AntichainFamily",
    "BalancedSolution",
    "CapacityError",
    "Classification",
    "CnfFormula",
    "CopyMap",
    "CriticalExponentReport",
    "DslError",
    "ExponentTable",
    "OrderCycleError",
    "Partition",
    "Poset",
    "PosetError",
    "RamseyBoundsReport",
    "Sample",
    "SatResult",
    "ShadowMap",
    "SweepReport",
    "antichain_count",
    "antichain_poset",
    "antichains",
    "arrows",
    "assignment_to_colouring",
    "automorphisms",
    "balanced_solve",
    "binary_entropy",
    "binary_tree_2",
    "blowup",
    "blowup_bounds",
    "boolean_lattice",
    "bounded_upper_bound",
    "c_star",
    "catalog",
    "chain",
    "chain_threshold",
    "classify",
    "connected_components",
    "contains_copy",
    "contains_pattern",
    "copy_of_partition",
    "copy_weighting",
    "count_copies",
    "count_weighted_partitions",
    "critical_exponent_wrt",
    "diamond",
    "disjoint_union",
    "double_diamond",
    "encode_avoidance",
    "entropy",
    "enumerate_pattern_copies",
    "exponent_bounds",
    "find_pattern",
    "fish",
    "induced_subposet",
    "is_isomorphic",
    "iter_copy_images",
    "layered",
    "lex_product",
    "lift_bound",
    "load_poset",
    "parse_dimacs",
    "parse_dsl",
    "parse_poset_arg",
    "partition_of_copy",
    "ramsey_number",
    "reverse",
    "reverse_automorphisms",
    "sample_pnp",
    "shadow_antichain",
    "shadow_partition",
    "shadow_weighting",
    "solve_cnf",
    "star_threshold",
    "starred_count",
    "surjection_count",
    "sweep",
    "tower",
    "trivial_upper_bound",
    "two_point_weighting",
    "universality_band",
    "vee",
    "verify_colouring",
    "wedge",
    "wedge_prime",
    "wide_diamond_threshold",
    "y_double_prime",
    "y_poset",
    "y_prime",
]
