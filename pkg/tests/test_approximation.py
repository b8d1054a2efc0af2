"""Oracle and property tests for truncation and translation averaging."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zygdist.approximation import (
    bmo_translation_average,
    continuous_decompose,
    distance_report,
    dyadic_decompose,
    martingale_difference,
    translation_average,
    truncate_jumps,
)
from zygdist.functionals import levelset_tree_density, zygmund_seminorm
from zygdist.generators import (
    hat_function,
    lacunary_function,
    random_jump_martingale,
    random_martingale,
)
from zygdist.martingale import (
    SampledFunction,
    average_growth,
    bmo_norm,
    dyadic_zygmund_seminorm,
    integrate,
    star_norm,
)

# ---------------------------------------------------------------------------
# jump truncation


def test_truncate_keeps_large_jumps_bitwise():
    S = random_martingale(8, seed=5)
    thr = 0.5 * star_norm(S)
    B = truncate_jumps(S, thr)
    for n in range(1, 9):
        dj_s, dj_b = S.jumps(n), B.jumps(n)
        kept = np.repeat(np.abs(dj_s[0::2]) > thr, 2)
        assert np.array_equal(dj_b[kept], dj_s[kept])
        assert np.all(dj_b[~kept] == 0.0)
    B.validate()


def test_truncate_residual_star_bound_exact():
    for seed in range(10):
        S = random_martingale(7, seed=seed)
        for thr in (0.0, 0.25 * star_norm(S), star_norm(S)):
            resid = martingale_difference(S, truncate_jumps(S, thr))
            assert star_norm(resid) <= thr
            resid.validate()


def test_truncate_extremes():
    S = random_martingale(6, seed=1)
    everything = truncate_jumps(S, -1.0)  # every jump exceeds -1
    for n in range(7):
        assert np.array_equal(everything.levels[n], S.levels[n])
    nothing = truncate_jumps(S, star_norm(S))
    for n in range(1, 7):
        assert np.all(nothing.jumps(n) == 0.0)


def test_dyadic_decompose_identity_and_bound():
    f = integrate(random_martingale(8, seed=9))
    for eps in (0.05, 0.2, 1.0):
        dec = dyadic_decompose(f, eps)
        assert np.array_equal(dec.rough.values + dec.small.values, f.values)
        assert dyadic_zygmund_seminorm(dec.small) <= eps
        assert 2.0 * star_norm(dec.dropped) <= eps


def test_truncation_consistent_with_tree_density():
    # Kept parents are exactly the qualifying parents of the tree functional,
    # so the windowed jump energy of the rough part is controlled by the
    # density, with the squared sup jump as the unit.
    for seed in range(5):
        S = random_martingale(8, seed=seed)
        f = integrate(S)
        eps = star_norm(S)  # mid-range level
        B = truncate_jumps(S, eps / 2.0)
        lhs = bmo_norm(B, squared=True)
        rhs = star_norm(S) ** 2 * levelset_tree_density(f, eps, depth=8)
        assert lhs <= rhs


# ---------------------------------------------------------------------------
# distance report


def test_distance_report_bounds_and_estimate():
    delta = 1 / 16
    f = integrate(random_jump_martingale(9, delta=delta, seed=4))
    rep = distance_report(f, depths=[7, 9])
    for eps, dist in zip(rep.eps, rep.measured_distance):
        assert dist <= eps
    assert rep.estimate.eps == 2 * delta
    assert rep.estimate.method == "depth-ratio"


# ---------------------------------------------------------------------------
# translation averaging


def _brute_translation_average(members, R, N):
    points = (1 + 2 * R) * (1 << N) + 1
    out = np.zeros(points)
    M = R << N
    for k in range(points):
        x = Fraction(-R) + Fraction(k, 1 << N)
        total = 0.0
        for i in range(M):
            alpha = Fraction(-R) + Fraction(2 * i + 1, 1 << N)
            y = x + alpha
            if 0 <= y <= 1:
                total += members[i].values[int(y * (1 << N))]
        out[k] = total / M
    return out


def test_translation_average_matches_brute_force():
    N, R = 4, 2
    members = [integrate(random_jump_martingale(N, seed=i)) for i in range(R << N)]
    avg = translation_average(members, R)
    brute = _brute_translation_average(members, R, N)
    assert avg.span.left == -R and avg.span.right == 1 + R
    assert np.array_equal(avg.values, brute)


def test_translation_average_constant_member_mass():
    # Every member the same hat: averaging preserves total mass exactly.
    N, R = 5, 1
    member = hat_function(N)
    avg = translation_average(lambda i, a: member, R)
    member_mass = np.trapezoid(member.values, dx=2.0**-N)
    avg_mass = np.trapezoid(avg.values, dx=2.0**-N)
    assert avg_mass == pytest.approx(member_mass, rel=1e-12)
    assert avg.values[0] == 0.0 and avg.values[-1] == 0.0


def test_translation_average_rejects_bad_members():
    f = hat_function(4)
    g = SampledFunction(np.zeros(9), left=0, log2_spacing=-3)
    with pytest.raises(ValueError):
        translation_average([f] * 3 + [g] * 61, R=4)
    with pytest.raises(ValueError):
        translation_average([f] * 64, R=0)


def test_translation_average_seminorm_stays_bounded():
    # Members with dyadic seminorm exactly 1; the averaged function has a
    # continuous-grid seminorm of the same order.
    N, R = 6, 1
    members = [
        integrate(random_jump_martingale(N, delta=1 / 2, seed=100 + i))
        for i in range(R << N)
    ]
    for m in members:
        assert dyadic_zygmund_seminorm(m) == 1.0
    avg = translation_average(members, R)
    assert zygmund_seminorm(avg) < 8.0


# ---------------------------------------------------------------------------
# BMO field averaging


def test_bmo_translation_average_zero_and_errors():
    N, R = 3, 1
    fields = [np.zeros(1 << N) for _ in range(R << N)]
    out, norm = bmo_translation_average(fields, R)
    assert norm == 0.0
    assert out.size == (1 + 2 * R) << N
    with pytest.raises(ValueError):
        bmo_translation_average([np.ones(1 << N)] * (R << N), R)
    with pytest.raises(ValueError):
        bmo_translation_average(fields[:-1], R)


def test_bmo_translation_average_single_bump():
    # One member carries a +-1 split in its two halves, the rest are zero;
    # the averaged field has a single +-1/M step pair whose best window is
    # the one enclosing the step.
    N, R = 3, 1
    M = R << N
    fields = [np.zeros(1 << N) for _ in range(M)]
    fields[0][: 1 << (N - 1)] = 1.0
    fields[0][1 << (N - 1) :] = -1.0
    out, norm = bmo_translation_average(fields, R)
    assert np.count_nonzero(out) == 1 << N
    # The tight window sees half +1/M and half -1/M: rms oscillation 1/M.
    assert norm == pytest.approx(1.0 / M, rel=1e-12)


# ---------------------------------------------------------------------------
# continuous decomposition


def test_continuous_decompose_exact_identity():
    f = integrate(random_jump_martingale(6, seed=8))
    dec = continuous_decompose(f, eps=0.05, count=16)
    assert np.array_equal(dec.rough.values + dec.small.values, f.values)
    assert dec.window_small_seminorms.shape == (16,)
    assert np.all(dec.window_small_seminorms <= 0.05)


def test_continuous_decompose_full_count_bound():
    f = integrate(random_jump_martingale(5, delta=1 / 8, seed=3))
    dec = continuous_decompose(f, eps=0.1)
    assert dec.count == 32
    assert np.all(dec.window_small_seminorms <= 0.1)
    assert np.array_equal(dec.rough.values + dec.small.values, f.values)


def test_continuous_decompose_large_eps_keeps_nothing():
    # Above twice the sup jump nothing is kept: rough part is identically
    # zero (every window truncation drops all jumps, integrates to zero).
    f = integrate(random_jump_martingale(5, delta=1 / 16, seed=2))
    dec = continuous_decompose(f, eps=1.0, count=8)
    assert np.all(dec.rough.values == 0.0)
    assert np.array_equal(dec.small.values, f.values)


def test_continuous_decompose_small_eps_recovers_function():
    # Below the smallest nonzero jump scale everything is kept: each window
    # rough part reproduces the translate, so the average returns f.
    f = integrate(random_jump_martingale(5, delta=1 / 4, seed=7))
    dec = continuous_decompose(f, eps=1e-9, count=8)
    assert np.allclose(dec.rough.values, f.values, rtol=0, atol=1e-15)
    assert np.all(np.abs(dec.small.values) <= 1e-15)


def test_continuous_decompose_rejects_bad_input():
    with pytest.raises(ValueError):
        continuous_decompose(hat_function(5), eps=0.1, count=3)
    with pytest.raises(ValueError):
        continuous_decompose(SampledFunction(np.arange(9.0)), eps=0.1)


@settings(max_examples=15)
@given(seed=st.integers(0, 300))
def test_continuous_decompose_seminorm_never_worse_than_eps(seed):
    S = random_martingale(5, seed=seed)
    recentred = type(S)([lvl - S.root_value for lvl in S.levels], root=S.root)
    f = integrate(recentred)
    eps = 0.5 * dyadic_zygmund_seminorm(f)
    if eps == 0.0:
        return
    dec = continuous_decompose(f, eps, count=8)
    assert np.all(dec.window_small_seminorms <= eps)


def test_lacunary_average_smoother_than_member():
    # Averaging translated truncations should not inflate the measured
    # continuous seminorm of the small part by more than a bounded factor.
    f = lacunary_function(6)
    eps = 0.5
    dec = continuous_decompose(f, eps, count=64)
    assert zygmund_seminorm(dec.small) <= 4.0 * eps
