"""Numerical verification of the quantitative regularity estimates.

Each check either sweeps a configuration space exhaustively or samples it
log-uniformly at grid resolution, evaluates both sides of an inequality and
reports the largest ratio observed together with the witnessing
configuration.  Estimates with an unknown absolute constant are judged by
depth stability instead: doubling the grid depth must not grow the maximum
sampled ratio materially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from zygdist.functionals import (
    _gather,
    box_square_energy,
    cone_levelset_count,
    levelset_tree_density,
    lp_norm,
    zygmund_seminorm,
)
from zygdist.generators import function_suite, random_martingale
from zygdist.martingale import (
    DyadicMartingale,
    SampledFunction,
    maximal_function,
    quadratic_characteristic,
    star_norm,
)
from zygdist.measures import GridMeasure, measure_zygmund_norm

__all__ = [
    "PredecessorReport",
    "RatioReport",
    "check_equal_centre",
    "check_equal_step",
    "check_first_difference",
    "check_measure_modulus",
    "check_second_difference_modulus",
    "lemma_function_family",
    "lemma_measure_family",
    "run_lemma_suite",
    "stability_factor",
    "verify_bdg",
    "verify_dyadic_distance_bound",
    "verify_predecessor_measure",
    "verify_strichartz_consistency",
]


@dataclass
class RatioReport:
    """Largest observed left/right ratio of an inequality over a sample set."""

    name: str
    max_ratio: float
    argmax: dict
    samples: int
    seed: int
    stability_factor: float | None = None


def stability_factor(shallow: RatioReport, deep: RatioReport) -> float:
    """Growth of the maximum ratio when the grid depth doubles."""
    if shallow.max_ratio == 0.0:
        return 1.0 if deep.max_ratio == 0.0 else math.inf
    return deep.max_ratio / shallow.max_ratio


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([seed, tag], dtype=np.uint64))
    )


def _log_uniform(rng: np.random.Generator, lo: int, hi: int, size: int) -> np.ndarray:
    """Integers in ``[lo, hi]`` with roughly log-uniform mass."""
    if hi < lo:
        raise ValueError("empty range")
    a = rng.uniform(math.log(lo), math.log(hi + 1), size)
    return np.minimum(np.floor(np.exp(a)).astype(np.int64), hi)


def _d2_field(f: SampledFunction, ix: np.ndarray, u: np.ndarray):
    """Vectorised second differences ``(x, h) = (ix, u)`` in grid units."""
    v = f.values
    sp = float(f.spacing)
    c, okc = _gather(v, ix, f.compact)
    l, okl = _gather(v, ix - u, f.compact)
    r, okr = _gather(v, ix + u, f.compact)
    return ((r - c) - (c - l)) / (u * sp), okc & okl & okr


def _report(name, ratios, ok, config, samples, seed) -> RatioReport:
    ratios = np.where(ok, ratios, -np.inf)
    j = int(np.argmax(ratios))
    if not np.isfinite(ratios[j]):
        return RatioReport(name, 0.0, {}, samples, seed)
    return RatioReport(
        name,
        float(ratios[j]),
        {key: float(val[j]) for key, val in config.items()},
        int(np.count_nonzero(ok)),
        seed,
    )


def check_second_difference_modulus(
    f: SampledFunction, samples: int = 10000, seed: int = 0
) -> RatioReport:
    """Joint modulus: moving both the centre and the step of a second
    difference changes it by at most the seminorm times

    ``((h'-h)/h') (1 + log(h'/(h'-h))) + (|x-t|/h') log(h'/|x-t| + 1)``

    for ``0 < h < h'`` and ``|x - t| < h'/2``.
    """
    rng = _rng(seed, 11)
    M = f.values.size - 1
    norm = zygmund_seminorm(f)
    u = _log_uniform(rng, 1, M // 4, samples)
    g = _log_uniform(rng, 1, M // 4, samples)
    up = u + g
    s = _log_uniform(rng, 1, M // 2, samples)
    s = np.where(2 * s < up, s, 0)  # keep |x - t| < h'/2, else collapse to x = t
    sign = rng.integers(0, 2, samples) * 2 - 1
    ix = rng.integers(0, M + 1, samples)
    it = ix + sign * s
    d2a, oka = _d2_field(f, ix, u)
    d2b, okb = _d2_field(f, it, up)
    ok = oka & okb & (up * 2 <= M)
    if norm == 0.0:
        return RatioReport("second-difference-modulus", 0.0, {}, samples, seed)
    with np.errstate(divide="ignore", invalid="ignore"):
        term1 = (g / up) * (1.0 + np.log(up / g))
        term2 = np.where(s > 0, (s / up) * np.log(up / np.maximum(s, 1) + 1.0), 0.0)
        ratios = np.abs(d2a - d2b) / (norm * (term1 + term2))
    sp = float(f.spacing)
    config = {"x": ix * sp, "t": it * sp, "h": u * sp, "hp": up * sp}
    return _report("second-difference-modulus", ratios, ok, config, samples, seed)


def check_equal_step(
    f: SampledFunction, samples: int = 10000, seed: int = 0
) -> RatioReport:
    """Centre-translation modulus at a fixed step:
    ``|d2(x, h) - d2(t, h)| <= norm (|x-t|/h) log(h/|x-t| + 1)`` for
    ``0 < |x - t| < h/2``.
    """
    rng = _rng(seed, 12)
    M = f.values.size - 1
    norm = zygmund_seminorm(f)
    u = _log_uniform(rng, 3, M // 2, samples)
    s = _log_uniform(rng, 1, M // 2, samples)
    ok_geom = 2 * s < u
    sign = rng.integers(0, 2, samples) * 2 - 1
    ix = rng.integers(0, M + 1, samples)
    it = ix + sign * s
    d2a, oka = _d2_field(f, ix, u)
    d2b, okb = _d2_field(f, it, u)
    ok = oka & okb & ok_geom
    if norm == 0.0:
        return RatioReport("equal-step-modulus", 0.0, {}, samples, seed)
    ratios = np.abs(d2a - d2b) / (norm * (s / u) * np.log(u / s + 1.0))
    sp = float(f.spacing)
    config = {"x": ix * sp, "t": it * sp, "h": u * sp}
    return _report("equal-step-modulus", ratios, ok, config, samples, seed)


def check_equal_centre(
    f: SampledFunction, samples: int = 10000, seed: int = 0
) -> RatioReport:
    """Step-change modulus at a fixed centre:
    ``|d2(x, h) - d2(x, h')| <= norm ((h'-h)/h') (1 + log(h'/(h'-h)))`` for
    ``0 < h < h'``.
    """
    rng = _rng(seed, 13)
    M = f.values.size - 1
    norm = zygmund_seminorm(f)
    u = _log_uniform(rng, 1, M // 4, samples)
    g = _log_uniform(rng, 1, M // 4, samples)
    up = u + g
    ix = rng.integers(0, M + 1, samples)
    d2a, oka = _d2_field(f, ix, u)
    d2b, okb = _d2_field(f, ix, up)
    ok = oka & okb & (up * 2 <= M)
    if norm == 0.0:
        return RatioReport("equal-centre-modulus", 0.0, {}, samples, seed)
    ratios = np.abs(d2a - d2b) / (norm * (g / up) * (1.0 + np.log(up / g)))
    sp = float(f.spacing)
    config = {"x": ix * sp, "h": u * sp, "hp": up * sp}
    return _report("equal-centre-modulus", ratios, ok, config, samples, seed)


def check_first_difference(
    f: SampledFunction, samples: int = 10000, seed: int = 0
) -> RatioReport:
    """Distant-translation bound for slopes:
    ``|d1(x, h) - d1(t, h)| <= norm log(|x-t|/h + 1)`` for ``|x - t| > h/2``.
    """
    rng = _rng(seed, 14)
    M = f.values.size - 1
    norm = zygmund_seminorm(f)
    u = _log_uniform(rng, 1, M // 4, samples)
    s = _log_uniform(rng, 1, M // 2, samples)
    ok_geom = 2 * s > u
    sign = rng.integers(0, 2, samples) * 2 - 1
    ix = rng.integers(0, M + 1, samples)
    it = ix + sign * s
    v = f.values
    sp = float(f.spacing)
    a0, ok0 = _gather(v, ix, f.compact)
    a1, ok1 = _gather(v, ix + u, f.compact)
    b0, ok2 = _gather(v, it, f.compact)
    b1, ok3 = _gather(v, it + u, f.compact)
    d1a = (a1 - a0) / (u * sp)
    d1b = (b1 - b0) / (u * sp)
    ok = ok0 & ok1 & ok2 & ok3 & ok_geom
    if norm == 0.0:
        return RatioReport("first-difference-modulus", 0.0, {}, samples, seed)
    ratios = np.abs(d1a - d1b) / (norm * np.log(s / u + 1.0))
    config = {"x": ix * sp, "t": it * sp, "h": u * sp}
    return _report("first-difference-modulus", ratios, ok, config, samples, seed)


def _delta1_samples(mu: GridMeasure, centers: np.ndarray, half: np.ndarray):
    """Vectorised clipped box averages; ``centers`` is (n, dim) in grid units."""
    side = 1 << mu.depth
    n = centers.shape[0]
    total = np.zeros(n)
    for corner in range(1 << mu.dim):
        idx = []
        parity = 0
        for a in range(mu.dim):
            if corner >> a & 1:
                parity += 1
                idx.append(np.clip(centers[:, a] + half, 0, side))
            else:
                idx.append(np.clip(centers[:, a] - half, 0, side))
        total += (-1) ** (mu.dim - parity) * mu._table[tuple(idx)]
    vol = (2.0 * half / side) ** mu.dim
    return total / vol


def check_measure_modulus(
    mu: GridMeasure, samples: int = 10000, seed: int = 0
) -> RatioReport:
    """Joint modulus for box-average second differences of a measure:

    ``|d2(x, h) - d2(t, h')| <= norm [ ((h'-h)/h)(1 + log(h/(h'-h) + 1))
    + (|x-t|/h) log(h/|x-t| + 1) ]`` for ``h < h' <= 2h``, ``|x-t| < h/2``,
    with ``t`` an axis translate of ``x``.
    """
    rng = _rng(seed, 15)
    side = 1 << mu.depth
    norm = measure_zygmund_norm(mu, mode="dyadic")
    w = _log_uniform(rng, 1, side // 4, samples)  # h = 2w cells
    gp = _log_uniform(rng, 1, side // 2, samples)
    gp = np.minimum(gp, w)  # h' = 2(w + gp) <= 2h
    s = _log_uniform(rng, 1, side // 2, samples)
    s = np.where(s < w, s, 0)  # |x - t| < h/2, else collapse
    centers = rng.integers(0, side + 1, size=(samples, mu.dim))
    axis = rng.integers(0, mu.dim, samples)
    sign = rng.integers(0, 2, samples) * 2 - 1
    translated = centers.copy()
    translated[np.arange(samples), axis] += sign * s
    d2a = _delta1_samples(mu, centers, w) - _delta1_samples(mu, centers, 2 * w)
    wp = w + gp
    d2b = _delta1_samples(mu, translated, wp) - _delta1_samples(mu, translated, 2 * wp)
    if norm == 0.0:
        return RatioReport("measure-modulus", 0.0, {}, samples, seed)
    h = 2.0 * w
    dh = 2.0 * gp
    term1 = (dh / h) * (1.0 + np.log(h / dh + 1.0))
    term2 = np.where(s > 0, (s / h) * np.log(h / np.maximum(s, 1) + 1.0), 0.0)
    ratios = np.abs(d2a - d2b) / (norm * (term1 + term2))
    ok = np.ones(samples, dtype=bool)
    config = {
        "x": centers[:, 0] / side,
        "h": h / side,
        "hp": 2.0 * wp / side,
        "shift": s / side,
    }
    return _report("measure-modulus", ratios, ok, config, samples, seed)


# ---------------------------------------------------------------------------
# exhaustive martingale-distance bound


def _unit_tree_cells(max_generation: int):
    return [(n, j) for n in range(max_generation + 1) for j in range(1 << n)]


def _unit_tree_distance(max_generation: int) -> np.ndarray:
    """Tree distances between all dyadic cells of [0, 1) up to a generation.

    The distance counts refinement steps from each cell up to the pair's
    finest common ancestor inside the unit interval.
    """
    cells = _unit_tree_cells(max_generation)
    count = len(cells)
    dist = np.zeros((count, count), dtype=np.int64)
    for a, (n, j) in enumerate(cells):
        for b, (m, k) in enumerate(cells):
            p = min(n, m)
            while j >> (n - p) != k >> (m - p):
                p -= 1
            dist[a, b] = (n - p) + (m - p)
    return dist


def verify_dyadic_distance_bound(
    count: int = 20, depth: int = 8, max_generation: int = 6, seed: int = 0
) -> RatioReport:
    """Exhaustive check that martingale values differ by at most the sup
    jump size times the tree distance between their cells, normalised so the
    seminorm (twice the sup jump) makes the bound hold with ratio <= 1.
    """
    cells = _unit_tree_cells(max_generation)
    dist = _unit_tree_distance(max_generation)
    off_diag = dist > 0
    best = -1.0
    argmax: dict = {}
    pairs = 0
    for i in range(count):
        S = random_martingale(depth, seed=seed + i)
        vals = np.concatenate([S.levels[n] for n in range(max_generation + 1)])
        norm = 2.0 * star_norm(S)
        if norm == 0.0:
            continue
        gaps = np.abs(vals[:, None] - vals[None, :])
        with np.errstate(invalid="ignore"):
            ratios = np.where(off_diag, gaps / (norm * np.maximum(dist, 1)), 0.0)
        j = int(np.argmax(ratios))
        pairs += int(np.count_nonzero(off_diag))
        if float(ratios.flat[j]) > best:
            best = float(ratios.flat[j])
            a, b = divmod(j, len(cells))
            argmax = {
                "seed": float(seed + i),
                "cell_a": float(a),
                "generation_a": float(cells[a][0]),
                "cell_b": float(b),
                "generation_b": float(cells[b][0]),
            }
    return RatioReport("dyadic-distance-bound", best, argmax, pairs, seed)


# ---------------------------------------------------------------------------
# predecessor generation of translated grids (Monte Carlo)


@dataclass
class PredecessorReport:
    """Per-level statistics for the translated-grid ancestor generation."""

    R: int
    samples: int
    seed: int
    empirical: list = field(default_factory=list)  # measure per level offset k
    bounds: list = field(default_factory=list)
    level_ok: list = field(default_factory=list)
    total: float = 0.0
    total_ok: bool = False


def verify_predecessor_measure(
    R: int,
    samples: int = 100000,
    k_max: int = 10,
    seed: int = 0,
    generation: int = 20,
) -> PredecessorReport:
    """Distribution of the common-ancestor generation under grid shifts.

    A fixed cell ``[0, 2^-N)`` and its left neighbour are viewed in the
    dyadic grid shifted by a uniform ``alpha`` in ``[-R, R)``; the smallest
    shifted cell containing both lies ``k`` generations up with shift-set
    measure about ``2^(1-k) * 2R``.  Checks the per-``k`` measure against
    ``2^(M+1) 2^(2-k)`` (with ``2^(M-1) < R <= 2^M``) inflated by three
    standard errors, and that levels ``1..k_max`` capture the whole measure
    to within one percent.
    """
    if R < 1:
        raise ValueError("R must be a positive integer")
    if generation <= k_max + 1:
        raise ValueError("generation must exceed k_max + 1")
    M_exp = (R - 1).bit_length()
    lattice = 40
    rng = _rng(seed, 16 + R)
    a_int = rng.integers(-(R << lattice), R << lattice, size=samples, dtype=np.int64)
    alpha = (a_int.astype(np.float64) + 0.5) * 2.0**-lattice
    lo = alpha - 2.0**-generation
    hi = alpha + 2.0**-generation
    k_arr = np.full(samples, k_max + 1, dtype=np.int64)
    for k in range(k_max, 0, -1):
        scale = 2.0 ** (generation - k)
        contained = np.floor(lo * scale) == np.floor(hi * scale)
        k_arr[contained] = k
    report = PredecessorReport(R=R, samples=samples, seed=seed)
    covered = 0
    for k in range(1, k_max + 1):
        count = int(np.count_nonzero(k_arr == k))
        covered += count
        empirical = 2.0 * R * count / samples
        bound = 2.0 ** (M_exp + 1) * 2.0 ** (2 - k)
        se = 1.0 / math.sqrt(count) if count else 0.0
        report.empirical.append(empirical)
        report.bounds.append(bound)
        report.level_ok.append(count == 0 or empirical <= bound * (1.0 + 3.0 * se))
    report.total = 2.0 * R * covered / samples
    report.total_ok = abs(report.total - 2.0 * R) <= 0.01 * 2.0 * R
    return report


# ---------------------------------------------------------------------------
# square-function two-sided bound


def verify_bdg(count: int = 100, depth: int = 10, seed: int = 0) -> dict:
    """Ratio of the maximal function to the quadratic characteristic in L2.

    The terminal increment gives the lower bound 1 (orthogonality of the
    jumps); the running maximum of an L2 martingale is at most twice the
    terminal value in L2, giving the upper bound 2.
    """
    ratios = []
    for i in range(count):
        S = random_martingale(depth, seed=seed + i)
        qc = lp_norm(quadratic_characteristic(S), 2.0)
        if qc == 0.0:
            continue
        ratios.append(lp_norm(maximal_function(S), 2.0) / qc)
    ratios = np.array(ratios)
    return {
        "count": int(ratios.size),
        "min": float(ratios.min()),
        "max": float(ratios.max()),
        "in_range": bool(np.all((ratios >= 1.0) & (ratios <= 2.0))),
        "seed": seed,
    }


# ---------------------------------------------------------------------------
# bundled estimate suites


def lemma_function_family(depth: int, seed: int = 0):
    """Grid-quantised functions spanning the regularity spectrum, used to
    sample the modulus estimates at a given depth."""
    from zygdist.generators import (
        hat_function,
        lacunary_function,
        parabola_function,
        random_jump_martingale,
    )
    from zygdist.martingale import integrate

    walk = random_martingale(depth, seed=seed)
    recentred = DyadicMartingale(
        [lvl - walk.root_value for lvl in walk.levels], root=walk.root
    )
    return [
        ("hat", hat_function(depth)),
        ("parabola", parabola_function(depth)),
        ("lacunary", lacunary_function(depth)),
        ("random-jumps", integrate(random_jump_martingale(depth, seed=seed))),
        ("random-walk", integrate(recentred)),
    ]


def lemma_measure_family(seed: int = 0, doubled: bool = False):
    """Cascade measures (two one-dimensional, one planar) for the measure
    modulus; ``doubled`` selects grids twice as deep."""
    from zygdist.generators import cascade_measure

    scale = 2 if doubled else 1
    return [
        ("cascade-1d-a", GridMeasure(cascade_measure(1, 5 * scale, seed=seed))),
        ("cascade-1d-b", GridMeasure(cascade_measure(1, 5 * scale, seed=seed + 1))),
        ("cascade-2d", GridMeasure(cascade_measure(2, 4 * scale, seed=seed))),
    ]


_FUNCTION_CHECKS = (
    check_second_difference_modulus,
    check_equal_step,
    check_equal_centre,
    check_first_difference,
)


def run_lemma_suite(seed: int = 0, samples: int = 10000) -> dict:
    """Sample every modulus estimate on the standard families at two grid
    depths and collect max ratios with their depth-doubling factors."""
    reports = []
    passed = True
    shallow_fns = lemma_function_family(6, seed=seed)
    deep_fns = dict(lemma_function_family(12, seed=seed))
    for check in _FUNCTION_CHECKS:
        for name, f in shallow_fns:
            low = check(f, samples=samples, seed=seed + 1)
            high = check(deep_fns[name], samples=samples, seed=seed + 2)
            factor = stability_factor(low, high)
            high.name = f"{low.name}[{name}]"
            high.stability_factor = factor
            reports.append(high)
            passed &= math.isfinite(high.max_ratio) and factor <= 1.5
    deep_mus = dict(lemma_measure_family(seed=seed, doubled=True))
    for name, mu in lemma_measure_family(seed=seed):
        low = check_measure_modulus(mu, samples=samples, seed=seed + 1)
        high = check_measure_modulus(deep_mus[name], samples=samples, seed=seed + 2)
        factor = stability_factor(low, high)
        high.name = f"{low.name}[{name}]"
        high.stability_factor = factor
        reports.append(high)
        passed &= math.isfinite(high.max_ratio) and factor <= 1.5
    distance = verify_dyadic_distance_bound(count=20, depth=8, seed=seed)
    reports.append(distance)
    passed &= distance.max_ratio <= 1.0
    return {"reports": reports, "passed": bool(passed), "seed": seed}


# ---------------------------------------------------------------------------
# boundedness consistency of the three functionals


def _bounded(shallow: float, deep: float, tau: float) -> bool:
    if deep == 0.0:
        return True
    if shallow == 0.0:
        return False
    return deep / shallow <= 1.0 + tau


def _consistency_grid(norm: float) -> list:
    if norm == 0.0:
        return [0.0]
    return [norm * 2.0 ** (j / 2.0) for j in range(-12, 3)]


def verify_strichartz_consistency(
    depth: int = 12, seed: int = 0, tau: float = 0.1
) -> dict:
    """Boundedness of square energy, cone counts and tree density must agree.

    For each suite function, three verdicts are computed with the same
    depth-growth rule: the windowed square energy profile is bounded; the L2
    size of the cone count field is bounded for every grid level; the tree
    level-set density is bounded for every grid level.  The three verdicts
    characterise the same smoothness class, so they must coincide function
    by function.
    """
    from zygdist.martingale import dyadic_zygmund_seminorm

    d_shallow, d_deep = depth - 4, depth - 2
    results = {}
    mismatches = 0
    for name, f in function_suite(depth, seed=seed):
        if name == "weierstrass":
            continue  # not grid-quantised; excluded from exact suite checks
        norm = dyadic_zygmund_seminorm(f)
        grid = _consistency_grid(norm)
        energy_ok = _bounded(
            box_square_energy(f, depth=d_shallow),
            box_square_energy(f, depth=d_deep),
            tau,
        )
        cone_ok = all(
            _bounded(
                lp_norm(cone_levelset_count(f, e, d_shallow), 2.0),
                lp_norm(cone_levelset_count(f, e, d_deep), 2.0),
                tau,
            )
            for e in grid
        )
        tree_ok = all(
            _bounded(
                levelset_tree_density(f, e, depth=d_shallow),
                levelset_tree_density(f, e, depth=d_deep),
                tau,
            )
            for e in grid
        )
        results[name] = {
            "energy_bounded": energy_ok,
            "cone_bounded": cone_ok,
            "tree_bounded": tree_ok,
        }
        if not (energy_ok == cone_ok == tree_ok):
            mismatches += 1
    return {"verdicts": results, "mismatches": mismatches, "tau": tau, "seed": seed}
