"""Multiscale analysis of Zygmund-class functions and measures.

The package measures how far a function (or measure) sampled at dyadic
resolution is from the smoother subspaces characterised by square-type
functionals: it computes second-difference seminorms, level-set densities over
box and tree lattices, builds near-optimal approximants by truncating the
jumps of the associated dyadic martingale, and numerically checks the
quantitative inequalities that drive those constructions.
"""

from zygdist.approximation import (
    ContinuousDecomposition,
    DistanceReport,
    DyadicDecomposition,
    bmo_translation_average,
    continuous_decompose,
    distance_report,
    dyadic_decompose,
    martingale_difference,
    translation_average,
    truncate_jumps,
)
from zygdist.dyadic import (
    DyadicInterval,
    RealInterval,
    ShiftedDyadicGrid,
    box_lattice,
    common_predecessor,
    containing_dyadic,
    dyadic_cover,
    dyadic_distance,
    interval_of,
    mesh_shift,
    paired_coverings,
)
from zygdist.generators import (
    cascade_measure,
    function_suite,
    hat_function,
    lacunary_function,
    linear_function,
    martingale_suite,
    one_split_measure,
    parabola_function,
    random_jump_martingale,
    random_martingale,
    single_branch_martingale,
    weierstrass_function,
)
from zygdist.functionals import (
    DepthProfile,
    ThresholdEstimate,
    box_square_energy,
    cone_levelset_count,
    cone_square_energy,
    default_eps_grid,
    density_profile,
    estimate_threshold,
    exceeds_level,
    first_difference,
    levelset_box_density,
    levelset_tree_density,
    lp_norm,
    second_difference,
    zygmund_seminorm,
)
from zygdist.martingale import (
    DyadicMartingale,
    SampledFunction,
    average_growth,
    bmo_norm,
    dyadic_zygmund_seminorm,
    integrate,
    maximal_function,
    quadratic_characteristic,
    second_difference_dyadic,
    star_norm,
    thresholded_jump_count,
    window_parseval,
)
from zygdist.measures import (
    GridMeasure,
    delta1,
    delta2,
    delta2_dyadic,
    delta2_max,
    density_martingale,
    measure_box_levelset_density,
    measure_box_square_energy,
    measure_tree_levelset_density,
    measure_truncate,
    measure_zygmund_norm,
)
from zygdist.verification import (
    PredecessorReport,
    RatioReport,
    check_equal_centre,
    check_equal_step,
    check_first_difference,
    check_measure_modulus,
    check_second_difference_modulus,
    lemma_function_family,
    lemma_measure_family,
    run_lemma_suite,
    stability_factor,
    verify_bdg,
    verify_dyadic_distance_bound,
    verify_predecessor_measure,
    verify_strichartz_consistency,
)

__all__ = [
    "ContinuousDecomposition",
    "DepthProfile",
    "DistanceReport",
    "DyadicDecomposition",
    "DyadicInterval",
    "DyadicMartingale",
    "GridMeasure",
    "PredecessorReport",
    "RatioReport",
    "RealInterval",
    "SampledFunction",
    "ShiftedDyadicGrid",
    "ThresholdEstimate",
    "average_growth",
    "bmo_norm",
    "bmo_translation_average",
    "box_lattice",
    "box_square_energy",
    "cascade_measure",
    "check_equal_centre",
    "check_equal_step",
    "check_first_difference",
    "check_measure_modulus",
    "check_second_difference_modulus",
    "common_predecessor",
    "cone_levelset_count",
    "cone_square_energy",
    "containing_dyadic",
    "continuous_decompose",
    "default_eps_grid",
    "delta1",
    "delta2",
    "delta2_dyadic",
    "delta2_max",
    "density_martingale",
    "density_profile",
    "distance_report",
    "dyadic_cover",
    "dyadic_decompose",
    "dyadic_distance",
    "dyadic_zygmund_seminorm",
    "estimate_threshold",
    "exceeds_level",
    "first_difference",
    "function_suite",
    "hat_function",
    "integrate",
    "interval_of",
    "lacunary_function",
    "lemma_function_family",
    "lemma_measure_family",
    "levelset_box_density",
    "levelset_tree_density",
    "linear_function",
    "lp_norm",
    "martingale_difference",
    "martingale_suite",
    "maximal_function",
    "measure_box_levelset_density",
    "measure_box_square_energy",
    "measure_tree_levelset_density",
    "measure_truncate",
    "measure_zygmund_norm",
    "mesh_shift",
    "one_split_measure",
    "paired_coverings",
    "parabola_function",
    "quadratic_characteristic",
    "random_jump_martingale",
    "random_martingale",
    "run_lemma_suite",
    "second_difference",
    "second_difference_dyadic",
    "single_branch_martingale",
    "stability_factor",
    "star_norm",
    "thresholded_jump_count",
    "translation_average",
    "truncate_jumps",
    "weierstrass_function",
    "verify_bdg",
    "verify_dyadic_distance_bound",
    "verify_predecessor_measure",
    "verify_strichartz_consistency",
    "window_parseval",
    "zygmund_seminorm",
]

__version__ = "0.1.0"
