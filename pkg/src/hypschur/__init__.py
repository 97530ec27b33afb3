"""Corridor combinatorics and Schur multiplier certificates on hyperbolic graphs."""

from hypschur.graphs import (
    DistanceOracle,
    GeodesicSet,
    Graph,
    GraphError,
    HyperbolicityProfile,
    Ray,
    RayConstructionError,
    ThinnessReport,
    bfs_distances,
    build_base_ray,
    build_ray,
    enumerate_geodesics,
    gromov_product,
    hyperbolicity_profile,
    thinness_check,
)
from hypschur.providers import (
    EdgeListParseError,
    ProviderSpec,
    build_graph,
    gen_cycle,
    gen_free_group_ball,
    gen_line,
    gen_regular_tree,
    load_edge_list,
)
from hypschur.subsets import (
    BinomialSuiteReport,
    SubsetCapError,
    SubsetVector,
    XiFactor,
    binomial_suite,
    delta_empty,
    subset_key,
    xi_inner,
    xi_vector,
)
from hypschur.corridor import (
    CorridorParams,
    CorridorSet,
    CorridorStats,
    CoveringReport,
    EmpiricalScan,
    PairRelation,
    PairScan,
    PartitionReport,
    TruncationError,
    corridor_set,
    corridor_stats,
    covering_check,
    empirical_R1,
    empirical_params,
    pair_level_scan,
    paper_params,
    read_bit_matrix,
    relation_W,
    relation_Z,
    verify_partition,
    write_bit_matrix,
)
from hypschur.factorization import (
    KernelMatrix,
    KernelValue,
    NormCertificate,
    RadialFunction,
    ScheduleStep,
    TensorVector,
    WeakAmenabilityWitness,
    ZetaKernelTable,
    ball_kernel,
    c0_exact,
    c0_exponent,
    constants_summary,
    custom_kernel,
    encode_big_int,
    eta,
    eta_inner,
    eta_inner_table,
    holomorphy_profile,
    holomorphy_residual,
    k_max_for,
    kernel_ready_params,
    power_kernel,
    radial_kernel,
    radial_multiplier,
    radial_schedule,
    read_certificate,
    read_kernel,
    relation_kernel,
    sphere_certificate,
    sphere_kernel,
    theta_certificate,
    weak_amenability_witness,
    write_certificate,
    write_kernel,
    z_relation_certificate,
    zeta,
    zeta_kernel,
    zeta_kernel_table,
)
from hypschur.normlab import (
    CbNormResult,
    LowerBoundResult,
    SandwichError,
    SandwichReport,
    cb_norm_sdp,
    lower_bound,
    psd_min_eig,
    sandwich_report,
    schur_apply,
    spectral_norm,
)

__version__ = "0.1.0"

__all__ = [
    "BinomialSuiteReport",
    "CbNormResult",
    "CorridorParams",
    "CorridorSet",
    "CorridorStats",
    "CoveringReport",
    "DistanceOracle",
    "EdgeListParseError",
    "EmpiricalScan",
    "GeodesicSet",
    "Graph",
    "GraphError",
    "HyperbolicityProfile",
    "KernelMatrix",
    "KernelValue",
    "LowerBoundResult",
    "NormCertificate",
    "PairRelation",
    "PairScan",
    "PartitionReport",
    "ProviderSpec",
    "RadialFunction",
    "Ray",
    "RayConstructionError",
    "SandwichError",
    "SandwichReport",
    "ScheduleStep",
    "SubsetCapError",
    "SubsetVector",
    "TensorVector",
    "ThinnessReport",
    "TruncationError",
    "WeakAmenabilityWitness",
    "XiFactor",
    "ZetaKernelTable",
    "ball_kernel",
    "bfs_distances",
    "binomial_suite",
    "build_base_ray",
    "build_graph",
    "build_ray",
    "c0_exact",
    "c0_exponent",
    "cb_norm_sdp",
    "constants_summary",
    "corridor_set",
    "corridor_stats",
    "delta_empty",
    "covering_check",
    "custom_kernel",
    "empirical_R1",
    "empirical_params",
    "encode_big_int",
    "enumerate_geodesics",
    "eta",
    "eta_inner",
    "eta_inner_table",
    "gen_cycle",
    "gen_free_group_ball",
    "gen_line",
    "gen_regular_tree",
    "gromov_product",
    "holomorphy_profile",
    "holomorphy_residual",
    "hyperbolicity_profile",
    "k_max_for",
    "kernel_ready_params",
    "load_edge_list",
    "lower_bound",
    "pair_level_scan",
    "paper_params",
    "power_kernel",
    "psd_min_eig",
    "radial_kernel",
    "radial_multiplier",
    "radial_schedule",
    "read_bit_matrix",
    "read_certificate",
    "read_kernel",
    "relation_W",
    "relation_Z",
    "relation_kernel",
    "sandwich_report",
    "schur_apply",
    "spectral_norm",
    "sphere_certificate",
    "sphere_kernel",
    "subset_key",
    "theta_certificate",
    "thinness_check",
    "verify_partition",
    "weak_amenability_witness",
    "write_bit_matrix",
    "write_certificate",
    "write_kernel",
    "xi_inner",
    "xi_vector",
    "z_relation_certificate",
    "zeta",
    "zeta_kernel",
    "zeta_kernel_table",
    "__version__",
]
