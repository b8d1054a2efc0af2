"""Oracle and property tests for second-difference functionals."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zygdist.dyadic import RealInterval, box_lattice
from zygdist.functionals import (
    DepthProfile,
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
from zygdist.generators import (
    function_suite,
    hat_function,
    lacunary_function,
    linear_function,
    parabola_function,
    random_jump_martingale,
    random_martingale,
    single_branch_martingale,
    weierstrass_function,
)
from zygdist.martingale import (
    average_growth,
    dyadic_zygmund_seminorm,
    integrate,
    second_difference_dyadic,
)


def _window(f, generation, index):
    length = f.span.length / (1 << generation)
    left = f.span.left + index * length
    return RealInterval(left, left + length)


# ---------------------------------------------------------------------------
# pointwise differences


def test_first_difference_linear_slope():
    f = linear_function(6, slope=3.0)
    assert first_difference(f, Fraction(1, 4), Fraction(1, 8)) == 3.0
    with pytest.raises(ValueError):
        first_difference(f, Fraction(1, 4), 0)


def test_second_difference_parabola_equals_twice_h():
    f = parabola_function(8)
    for u in (1, 2, 16, 64):
        h = Fraction(u, 256)
        x = Fraction(128, 256)
        assert second_difference(f, x, h) == 2.0 * float(h)


def test_second_difference_compact_zero_extension():
    f = integrate(random_jump_martingale(5, delta=1 / 16, seed=3))
    assert f.compact
    # x at the right endpoint: x + h leaves the support and reads as zero.
    val = second_difference(f, 1, Fraction(1, 4))
    expected = (0.0 - f.values[-1]) - (f.values[-1] - f.values[f.index_of(Fraction(3, 4))])
    assert val == expected / 0.25


def test_second_difference_noncompact_outside_raises():
    f = parabola_function(6)
    with pytest.raises(ValueError):
        second_difference(f, 0, Fraction(1, 4))


def test_exceeds_level_strict():
    f = hat_function(6)
    # At the peak the second difference is exactly -2.
    assert exceeds_level(f, Fraction(1, 2), Fraction(1, 2), 1.9)
    assert not exceeds_level(f, Fraction(1, 2), Fraction(1, 2), 2.0)


# ---------------------------------------------------------------------------
# seminorm sweep


def test_zygmund_seminorm_oracles():
    assert zygmund_seminorm(linear_function(8, slope=2.5)) == 0.0
    assert zygmund_seminorm(hat_function(8)) == 2.0
    assert zygmund_seminorm(parabola_function(8)) == 1.0


def test_zygmund_seminorm_scaling():
    f = integrate(random_martingale(7, seed=11))
    g = type(f)(4.0 * f.values, left=f.left, log2_spacing=f.log2_spacing)
    assert zygmund_seminorm(g) == 4.0 * zygmund_seminorm(f)


def test_dyadic_seminorm_below_full_sweep():
    for _, f in function_suite(8, seed=5):
        assert dyadic_zygmund_seminorm(f) <= zygmund_seminorm(f) * (1 + 1e-12)


# ---------------------------------------------------------------------------
# box functionals


def _brute_box_energy(f, interval, depth):
    total = 0.0
    for x, h, w in box_lattice(interval, depth):
        try:
            d2 = second_difference(f, x, h)
        except ValueError:
            continue
        total += w * d2 * d2
    return total / float(interval.length)


def test_box_energy_matches_lattice_reference():
    for _, f in function_suite(6, seed=2):
        for interval in (_window(f, 0, 0), _window(f, 1, 1), _window(f, 2, 1)):
            fast = box_square_energy(f, interval, depth=4)
            brute = _brute_box_energy(f, interval, depth=4)
            assert fast == pytest.approx(brute, rel=1e-12, abs=1e-15)


def test_box_energy_zero_for_linear():
    assert box_square_energy(linear_function(8, slope=1.0), depth=6) == 0.0


def _brute_box_density(f, eps, depth):
    N = f.depth
    best = 0.0
    for g in range(min(depth, N - 2) + 1):
        for k in range(1 << g):
            interval = _window(f, g, k)
            total = 0.0
            for n in range(min(depth - 1, N - g - 2) + 1):
                cellw = interval.length / (1 << (n + 1))
                h = 3 * cellw / 2
                for j in range(1 << (n + 1)):
                    x = interval.left + (2 * j + 1) * cellw / 2
                    try:
                        hit = abs(second_difference(f, x, h)) > eps
                    except ValueError:
                        continue
                    total += float(cellw) * np.log(2.0) * hit
            best = max(best, total / float(interval.length))
    return best


def test_box_density_matches_brute_force():
    for _, f in function_suite(6, seed=4):
        norm = max(dyadic_zygmund_seminorm(f), 0.25)
        for eps in (0.3 * norm, 0.9 * norm):
            fast = levelset_box_density(f, eps, depth=4)
            brute = _brute_box_density(f, eps, depth=4)
            assert fast == pytest.approx(brute, rel=1e-12, abs=1e-15)


def test_box_density_chebyshev():
    depth = 5
    for _, f in function_suite(7, seed=9):
        norm = max(dyadic_zygmund_seminorm(f), 0.25)
        for eps in (0.25 * norm, 0.75 * norm):
            density = levelset_box_density(f, eps, depth)
            energy = max(
                box_square_energy(f, _window(f, g, k), depth)
                for g in range(min(depth, f.depth - 2) + 1)
                for k in range(1 << g)
            )
            assert eps * eps * density <= energy * (1 + 1e-9) + 1e-15


@settings(max_examples=20)
@given(seed=st.integers(0, 500), shift=st.integers(0, 3))
def test_box_density_monotone(seed, shift):
    f = integrate(random_martingale(6, seed=seed))
    norm = dyadic_zygmund_seminorm(f)
    e1, e2 = 0.2 * norm * 2.0**-shift, 0.6 * norm
    lo, hi = min(e1, e2), max(e1, e2)
    assert levelset_box_density(f, lo, 4) >= levelset_box_density(f, hi, 4)
    assert levelset_box_density(f, lo, 4) >= levelset_box_density(f, lo, 2)


# ---------------------------------------------------------------------------
# tree functional


def _brute_tree_density(S, eps, depth):
    best = 0.0
    for g in range(depth + 1):
        for k in range(1 << g):
            total = 0.0
            for m in range(g, depth):
                width = 1 << (m - g)
                jumps = S.jumps(m + 1)[0::2][k * width : (k + 1) * width]
                total += np.count_nonzero(2.0 * np.abs(jumps) > eps) * 2.0**-m
            best = max(best, total * 2.0**g)
    return best


def test_tree_density_matches_brute_force():
    for _, f in function_suite(6, seed=7):
        S = average_growth(f)
        norm = max(dyadic_zygmund_seminorm(f), 0.25)
        for eps in (0.3 * norm, 0.9 * norm, 1.5 * norm):
            assert levelset_tree_density(S, eps, depth=5) == _brute_tree_density(S, eps, 5)


def test_tree_density_random_jumps_exact_profile():
    delta = 1 / 16
    for depth in (6, 8):
        f = integrate(random_jump_martingale(depth, delta=delta, seed=21))
        for eps in (0.0, delta, 2 * delta * (1 - 1e-9)):
            assert levelset_tree_density(f, eps, depth=depth) == float(depth)
        for eps in (2 * delta, 3 * delta):
            assert levelset_tree_density(f, eps, depth=depth) == 0.0


def test_tree_density_hat():
    f = hat_function(8)
    assert levelset_tree_density(f, 1.5, depth=8) == 1.0
    assert levelset_tree_density(f, 2.0, depth=8) == 0.0


def test_tree_density_single_branch_bounded():
    for depth in (4, 8, 10):
        S = single_branch_martingale(depth, delta=1 / 2)
        assert levelset_tree_density(S, 0.5, depth=depth) == 2.0 - 2.0 ** (1 - depth)


def test_tree_density_lacunary_all_generations():
    f = lacunary_function(8)
    assert levelset_tree_density(f, 0.9, depth=8) == 8.0
    assert levelset_tree_density(f, 1.0, depth=8) == 0.0


@settings(max_examples=25)
@given(seed=st.integers(0, 500))
def test_tree_density_monotone(seed):
    S = random_martingale(7, seed=seed)
    norm = 2.0 * max(float(np.abs(S.jumps(n)).max()) for n in range(1, 8))
    values = [levelset_tree_density(S, t * norm, depth=7) for t in (0.1, 0.4, 0.8, 1.1)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert levelset_tree_density(S, 0.3 * norm, depth=7) >= levelset_tree_density(
        S, 0.3 * norm, depth=4
    )


# ---------------------------------------------------------------------------
# profiles and threshold estimation


def test_estimate_threshold_picks_first_stable_level():
    profile = DepthProfile(
        depths=[8, 12],
        eps=[0.1, 0.2, 0.4, 0.8],
        values=[[8.0, 8.0, 0.0, 0.0], [12.0, 8.4, 0.0, 0.0]],
    )
    est = estimate_threshold(profile, tau=0.1)
    assert est.eps == 0.2
    assert est.ratios[0] == pytest.approx(1.5)
    assert est.stable == [False, True, True, True]
    assert est.method == "depth-ratio"


def test_estimate_threshold_inconclusive_and_growth_from_zero():
    profile = DepthProfile(
        depths=[4, 8],
        eps=[0.1, 0.2],
        values=[[4.0, 0.0], [8.0, 1.0]],
    )
    est = estimate_threshold(profile)
    assert est.eps is None
    assert est.ratios[1] == np.inf


def test_density_profile_random_jumps_threshold():
    delta = 1 / 16
    f = integrate(random_jump_martingale(8, delta=delta, seed=2))
    grid = default_eps_grid(f)
    profile = density_profile(f, grid, depths=[6, 8])
    est = estimate_threshold(profile)
    assert est.eps == 2 * delta


# ---------------------------------------------------------------------------
# cone functionals


def test_cone_zero_for_linear():
    f = linear_function(7, slope=2.0)
    assert np.all(cone_levelset_count(f, 0.0, 5) == 0.0)
    assert np.all(cone_square_energy(f, 5) == 0.0)


def test_cone_count_bound_and_chebyshev():
    depth = 5
    for _, f in function_suite(7, seed=13):
        norm = max(dyadic_zygmund_seminorm(f), 0.25)
        eps = 0.4 * norm
        counts = cone_levelset_count(f, eps, depth)
        energy = cone_square_energy(f, depth)
        assert counts.shape == (2**7,)
        assert np.all(counts**2 <= (4.0 / 3.0) * depth + 1e-12)
        assert np.all(eps * counts <= energy * (1 + 1e-12) + 1e-15)


def test_cone_count_single_sample_weight():
    # A pure hat has |d2| = 2 at configurations straddling the peak only;
    # each qualifying lattice cell contributes exactly 4/9.
    f = hat_function(6)
    counts = cone_levelset_count(f, 1.9, depth=1)
    assert set(np.round(counts**2 * 9 / 4).astype(int)) <= {0, 1, 2, 3}


# ---------------------------------------------------------------------------
# norms and grids


def test_lp_norm_constant_and_errors():
    field = np.full(16, 0.75)
    for p in (1.5, 2.0, 3.0):
        assert lp_norm(field, p) == pytest.approx(0.75, rel=1e-12)
    with pytest.raises(ValueError):
        lp_norm(field, 1.0)


def test_lp_norm_two_dimensional():
    field = np.zeros((4, 4))
    field[0, 0] = 2.0
    assert lp_norm(field, 2.0, dim=2) == pytest.approx(2.0 / 4.0, rel=1e-12)


def test_default_eps_grid_contains_seminorm():
    f = hat_function(8)
    grid = default_eps_grid(f)
    assert len(grid) == 23
    assert grid == sorted(grid)
    assert 2.0 in grid
    assert grid[0] == pytest.approx(2.0 * 2.0**-10)
    assert grid[-1] == pytest.approx(4.0)
    assert default_eps_grid(linear_function(6)) == [0.0]


def test_second_difference_matches_dyadic_form():
    f = integrate(random_martingale(7, seed=31))
    S = average_growth(f)
    for n in (0, 2, 5):
        for j in (0, (1 << n) - 1):
            cell = S.cell_interval(n, j)
            h = cell.length / 2
            d2 = second_difference(f, cell.left + h, h)
            assert d2 == second_difference_dyadic(f, cell)
            assert d2 == 2.0 * S.jumps(n + 1)[2 * j + 1]
