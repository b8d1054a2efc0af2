"""Martingale construction, jump identities, norms and roundtrips."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zygdist.dyadic import RealInterval, interval_of
from zygdist.generators import (
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


def test_average_growth_hat_oracle():
    S = average_growth(hat_function(4))
    assert S.root_value == 0.0
    assert np.array_equal(S.levels[1], [1.0, -1.0])
    assert np.array_equal(S.jumps(1), [1.0, -1.0])
    # below the break the slopes are already resolved: no further jumps
    for n in range(2, 5):
        assert np.all(S.jumps(n) == 0.0)
    assert star_norm(S) == 1.0
    assert dyadic_zygmund_seminorm(hat_function(6)) == 2.0


def test_average_growth_linear_is_constant():
    S = average_growth(linear_function(6, slope=Fraction(3, 4)))
    for level in S.levels:
        assert np.all(level == 0.75)
    assert star_norm(S) == 0.0
    assert dyadic_zygmund_seminorm(linear_function(6)) == 0.0


def test_sibling_jumps_are_opposite():
    S = random_martingale(8, seed=5)
    for n in range(1, S.depth + 1):
        dj = S.jumps(n)
        assert np.array_equal(dj[0::2], -dj[1::2])


def test_second_difference_matches_twice_the_jump():
    f = integrate(random_jump_martingale(8, seed=3))
    S = average_growth(f)
    for n in range(0, 8):
        for j in sorted({0, (2**n) // 2, 2**n - 1}):
            cell = S.cell_interval(n, j)
            d2 = second_difference_dyadic(f, cell)
            right_child_jump = S.jumps(n + 1)[2 * j + 1]
            assert d2 == 2.0 * right_child_jump


def test_second_difference_dyadic_hat():
    assert second_difference_dyadic(hat_function(5), interval_of(0, 0)) == -2.0


def test_averaging_property_validates():
    for S in [random_martingale(7, seed=1), random_jump_martingale(7, seed=2)]:
        S.validate()
    bad = DyadicMartingale([np.array([0.0]), np.array([1.0, 0.5])])
    with pytest.raises(ValueError):
        bad.validate()


def test_integrate_roundtrips_with_average_growth():
    for seed in range(5):
        S = random_martingale(9, seed=seed)
        f = integrate(S)
        T = average_growth(f)
        # pinning f(0) = 0 shifts values, not slopes: the martingale returns intact
        for n in range(S.depth + 1):
            assert np.array_equal(T.levels[n], S.levels[n])


def test_integrate_on_offset_root():
    levels = [np.array([1.0]), np.array([2.0, 0.0])]
    S = DyadicMartingale(levels, root=RealInterval(-1, 3))
    f = integrate(S)
    assert f.left == -1
    assert f.values[0] == 0.0
    assert f.values[-1] == pytest.approx(4.0)  # mean slope 1 over length 4


def test_star_norm_random_jumps_exact():
    S = random_jump_martingale(10, delta=Fraction(1, 8), seed=11)
    assert star_norm(S) == 0.125
    f = integrate(S)
    assert dyadic_zygmund_seminorm(f) == 0.25


def test_bmo_norm_hat():
    S = average_growth(hat_function(6))
    # only the two generation-1 jumps contribute: density (1+1)/2 at the root
    assert bmo_norm(S, squared=True) == 1.0
    assert bmo_norm(S) == 1.0


def test_bmo_norm_all_jumps():
    depth = 8
    S = random_jump_martingale(depth, delta=Fraction(1, 4), seed=0)
    # every generation contributes jump^2 at full density: depth * delta^2
    expected = depth * 0.25**2
    assert bmo_norm(S, squared=True) == expected


def test_bmo_norm_windows_see_local_bursts():
    # jumps only inside [0, 1/4): the density at that window is 4x the root's
    depth = 6
    levels = [np.zeros(1), np.zeros(2), np.zeros(4)]
    rng = np.random.Generator(np.random.Philox(key=np.array([7, 1], dtype=np.uint64)))
    for n in range(2, depth):
        parent = levels[-1]
        child = np.repeat(parent, 2)
        block = 2 ** (n + 1 - 2)  # children under [0, 1/4)
        signs = rng.integers(0, 2, size=block // 2).astype(np.float64) * 2.0 - 1.0
        child[0:block:2] += signs * 0.25
        child[1:block:2] -= signs * 0.25
        levels.append(child)
    S = DyadicMartingale(levels)
    density_root = sum(
        float((S.jumps(n) ** 2 * 2.0 ** (-n)).sum()) for n in range(1, S.depth + 1)
    )
    assert bmo_norm(S, squared=True) == pytest.approx(4.0 * density_root)


def test_quadratic_characteristic_and_counts():
    depth = 7
    S = random_jump_martingale(depth, delta=Fraction(1, 16), seed=9)
    qc = quadratic_characteristic(S)
    assert np.allclose(qc, math.sqrt(depth) / 16.0)
    counts = thresholded_jump_count(S, 0.0)
    assert np.all(counts == math.sqrt(depth))
    assert np.all(thresholded_jump_count(S, 1.0 / 16.0) == 0.0)


def test_maximal_function_single_branch():
    depth = 9
    S = single_branch_martingale(depth, delta=1)
    m = maximal_function(S)
    assert m[0] == depth
    assert m.max() == depth
    # the deepest sibling rode the branch to depth-1 before stepping off
    assert m[1] == depth - 1
    qc = quadratic_characteristic(S)
    assert qc[0] == math.sqrt(depth)


def test_window_parseval_identity():
    for S in [random_martingale(8, seed=2), average_growth(weierstrass_function(8))]:
        for gen, idx in [(0, 0), (1, 1), (3, 5), (5, 17)]:
            energy, osc = window_parseval(S, gen, idx)
            assert energy == pytest.approx(osc, rel=1e-12, abs=1e-300)


def test_window_parseval_dim2():
    rng = np.random.Generator(np.random.Philox(key=np.array([3, 1], dtype=np.uint64)))
    leaf = rng.integers(-8, 9, size=(8, 8)).astype(np.float64) / 16.0
    S = DyadicMartingale.from_leaf(leaf, dim=2, root=None)
    for gen, idx in [(0, (0, 0)), (1, (1, 0)), (2, (2, 3))]:
        energy, osc = window_parseval(S, gen, idx)
        assert energy == pytest.approx(osc, rel=1e-12, abs=1e-300)


@given(st.integers(min_value=0, max_value=50))
def test_random_martingale_reproducible(seed):
    a = random_martingale(6, seed=seed)
    b = random_martingale(6, seed=seed)
    for la, lb in zip(a.levels, b.levels):
        assert np.array_equal(la, lb)


def test_sampled_function_grid_bookkeeping():
    f = hat_function(5)
    assert f.depth == 5
    assert f.span == RealInterval(0, 1)
    assert f.compact
    assert f.index_of(Fraction(1, 2)) == 16
    with pytest.raises(ValueError):
        f.index_of(Fraction(1, 3))
    assert f.value_at_index(-4) == 0.0
    g = parabola_function(5)
    assert not g.compact
    with pytest.raises(IndexError):
        g.value_at_index(1000)


def test_lacunary_every_generation_jumps():
    depth = 8
    f = lacunary_function(depth, coefficient=Fraction(1, 2), ratio=Fraction(1, 2))
    S = average_growth(f)
    for n in range(1, depth + 1):
        assert np.abs(S.jumps(n)).max() == 0.5
    assert dyadic_zygmund_seminorm(f) == 1.0
