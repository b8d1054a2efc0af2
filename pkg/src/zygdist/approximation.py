"""Approximants built by jump truncation and grid-translation averaging.

The rough/small splitting of a sampled function works on its slope
martingale: jumps whose magnitude exceeds a threshold are kept (they form
the rough part, of bounded mean oscillation), the rest are dropped, so the
remainder has dyadic Zygmund seminorm at most twice the threshold.

Dyadic truncation is grid-biased; averaging the small parts produced on a
family of translated grids removes the bias.  ``translation_average``
averages a family of unit-interval functions over midpoint-sampled shifts,
and ``continuous_decompose`` runs the full pipeline: translate, truncate on
an enlarged window, integrate back and average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from zygdist.dyadic import RealInterval
from zygdist.functionals import (
    DepthProfile,
    ThresholdEstimate,
    default_eps_grid,
    density_profile,
    estimate_threshold,
)
from zygdist.martingale import (
    DyadicMartingale,
    SampledFunction,
    _expand,
    average_growth,
    integrate,
    star_norm,
)

__all__ = [
    "ContinuousDecomposition",
    "DistanceReport",
    "bmo_translation_average",
    "continuous_decompose",
    "distance_report",
    "dyadic_decompose",
    "martingale_difference",
    "translation_average",
    "truncate_jumps",
]


def truncate_jumps(S: DyadicMartingale, threshold: float) -> DyadicMartingale:
    """Keep exactly the jumps with magnitude above ``threshold``.

    The decision for a sibling pair is taken on the left child's jump and
    applied to both, so the result is again a martingale (sibling jumps of a
    valid martingale cancel).  Kept jumps are copied bit for bit; dropped
    ones are zeroed, which bounds every jump of ``S - B`` by ``threshold``.
    """
    if S.dim != 1:
        raise ValueError("jump truncation is one-dimensional; see measure truncation")
    levels = [S.levels[0].copy()]
    for n in range(1, S.depth + 1):
        dj = S.jumps(n)
        keep = np.repeat(np.abs(dj[0::2]) > threshold, 2)
        levels.append(_expand(levels[-1], S.dim) + keep * dj)
    return DyadicMartingale(levels, root=S.root, dim=S.dim)


def martingale_difference(S: DyadicMartingale, B: DyadicMartingale) -> DyadicMartingale:
    """Levelwise difference ``S - B`` (a martingale when both are)."""
    if S.depth != B.depth or S.dim != B.dim:
        raise ValueError("martingales must share depth and dimension")
    return DyadicMartingale(
        [a - b for a, b in zip(S.levels, B.levels)], root=S.root, dim=S.dim
    )


@dataclass
class DyadicDecomposition:
    """Splitting ``f = rough + small`` on the function's own dyadic grid."""

    rough: SampledFunction
    small: SampledFunction
    kept: DyadicMartingale
    dropped: DyadicMartingale
    eps: float


def dyadic_decompose(f: SampledFunction, eps: float) -> DyadicDecomposition:
    """Split ``f`` so the small part has dyadic Zygmund seminorm <= ``eps``.

    Jumps above ``eps / 2`` go to the rough part; the seminorm of the small
    part is twice the largest surviving jump, hence at most ``eps``.
    """
    S = average_growth(f)
    kept = truncate_jumps(S, eps / 2.0)
    rough = integrate(kept)
    small = SampledFunction(
        f.values - rough.values, left=f.left, log2_spacing=f.log2_spacing
    )
    return DyadicDecomposition(
        rough=rough,
        small=small,
        kept=kept,
        dropped=martingale_difference(S, kept),
        eps=eps,
    )


@dataclass
class DistanceReport:
    """Measured truncation distances and level-set profile for one function."""

    eps: list[float]
    measured_distance: list[float]
    profile: DepthProfile
    estimate: ThresholdEstimate


def distance_report(
    f: SampledFunction,
    eps_grid=None,
    depths=None,
    tau: float = 0.1,
) -> DistanceReport:
    """Distance-to-smooth report over a level grid.

    For each level the measured distance is the dyadic seminorm of the small
    part left by truncation at that level; alongside, the tree level-set
    density is profiled over ``depths`` and the stability threshold
    estimated.
    """
    if eps_grid is None:
        eps_grid = default_eps_grid(f)
    N = average_growth(f).depth
    if depths is None:
        depths = [max(1, N - 4), N]
    eps_grid = [float(e) for e in eps_grid]
    S = average_growth(f)
    measured = []
    for eps in eps_grid:
        B = truncate_jumps(S, eps / 2.0)
        measured.append(2.0 * star_norm(martingale_difference(S, B)))
    profile = density_profile(f, eps_grid, depths, kind="tree")
    return DistanceReport(
        eps=eps_grid,
        measured_distance=measured,
        profile=profile,
        estimate=estimate_threshold(profile, tau=tau),
    )


def _family_member(family, i: int, alpha: Fraction) -> SampledFunction:
    if callable(family):
        return family(i, alpha)
    return family[i]


def translation_average(family, R: int, depth: int | None = None) -> SampledFunction:
    """Average of translated unit-interval functions over shifts in [-R, R).

    The shift range is split into midpoint bins two grid cells wide; member
    ``i`` is evaluated at ``x + alpha_i`` (zero off its support) and the
    results averaged, giving a function sampled on ``[-R, 1 + R]`` at the
    members' spacing.
    """
    if R < 1:
        raise ValueError("R must be a positive integer")
    probe = _family_member(family, 0, Fraction(0))
    N = probe.depth if depth is None else depth
    if probe.span != RealInterval(0, 1):
        raise ValueError("family members must live on the unit interval")
    M = R << N
    points = ((1 + 2 * R) << N) + 1
    acc = np.zeros(points)
    for i in range(M):
        alpha = Fraction(-R) + Fraction(2 * i + 1, 1 << N)
        member = _family_member(family, i, alpha)
        if member.values.size != (1 << N) + 1 or member.span != RealInterval(0, 1):
            raise ValueError("family members must share the unit-interval grid")
        base = (2 * R << N) - 2 * i - 1
        acc[base : base + (1 << N) + 1] += member.values
    acc /= M
    return SampledFunction(acc, left=-R, log2_spacing=-N)


def bmo_translation_average(family, R: int) -> tuple[np.ndarray, float]:
    """Average mean-zero leaf fields over translated grids and measure BMO.

    ``family`` is a sequence of per-cell fields on the unit interval, each
    with mean zero (up to 1e-10).  Returns the averaged field on the cells
    of ``[-R, 1 + R]`` and the largest root-mean-square oscillation over
    dyadic windows of every generation that meets the support (the field is
    extended by zero outside).
    """
    fields = [np.asarray(b, dtype=np.float64) for b in family]
    cells = fields[0].size
    N = cells.bit_length() - 1
    if cells != 1 << N:
        raise ValueError("fields must have a power-of-two number of cells")
    M = R << N
    if len(fields) != M:
        raise ValueError(f"family must have R * 2^N = {M} members")
    for b in fields:
        if abs(float(b.mean())) > 1e-10:
            raise ValueError("fields must have mean zero")
    out = np.zeros((1 + 2 * R) << N)
    for i, b in enumerate(fields):
        base = (2 * R << N) - 2 * i - 1
        out[base : base + cells] += b
    out /= M

    s1 = np.concatenate(([0.0], np.cumsum(out)))
    s2 = np.concatenate(([0.0], np.cumsum(out * out)))
    total = out.size  # cells spanning [-R, 1 + R], measure 2^-N each
    best = 0.0
    n = N
    while True:
        width = 1 << (N - n) if n >= 0 else (1 << N) << (-n)
        lo_k = -(R << n) if n >= 0 else -math.ceil(R / (1 << (-n)))
        hi_k = ((1 + R) << n) if n >= 0 else math.ceil((1 + R) / (1 << (-n)))
        for k in range(lo_k, hi_k):
            a = max(k * width + (R << N), 0)
            b_idx = min(k * width + width + (R << N), total)
            if b_idx <= a:
                continue
            mass = s1[b_idx] - s1[a]
            energy = s2[b_idx] - s2[a]
            osc = energy / width - (mass / width) ** 2
            best = max(best, osc)
        if width >= total:
            break
        n -= 1
    return out, math.sqrt(max(best, 0.0))


@dataclass
class ContinuousDecomposition:
    """Grid-translation-averaged splitting ``f = rough + small``."""

    rough: SampledFunction
    small: SampledFunction
    eps: float
    count: int
    window_small_seminorms: np.ndarray


def continuous_decompose(
    f: SampledFunction, eps: float, count: int | None = None
) -> ContinuousDecomposition:
    """Split ``f`` by averaging dyadic truncations over translated grids.

    Each translate of ``f`` is placed on the enlarged window ``[-1, 3)``,
    its slope martingale truncated at ``eps / 2`` and integrated back; the
    rough parts are read off at the translated points and averaged.  The
    small part is ``f - rough`` exactly; every windowed small part has
    dyadic Zygmund seminorm at most ``eps``, recorded per translate.
    """
    if f.span != RealInterval(0, 1):
        raise ValueError("decomposition expects a function on the unit interval")
    if not f.compact:
        raise ValueError("decomposition expects a compactly supported function")
    N = f.depth
    if count is None:
        count = 1 << N
    if count < 1 or ((1 << N) % count):
        raise ValueError("count must divide the number of grid cells")
    stride = (1 << N) // count
    if stride & (stride - 1):
        raise ValueError("count must be a power of two")

    window_points = (4 << N) + 1
    acc = np.zeros((1 << N) + 1)
    seminorms = np.empty(count)
    for i in range(count):
        offset = stride * (2 * i + 1)
        g_vals = np.zeros(window_points)
        g_vals[offset : offset + (1 << N) + 1] = f.values
        g = SampledFunction(g_vals, left=-1, log2_spacing=f.log2_spacing)
        W = average_growth(g)
        B = truncate_jumps(W, eps / 2.0)
        resid = martingale_difference(W, B)
        seminorms[i] = 2.0 * star_norm(resid)
        b_window = integrate(B)
        acc += b_window.values[offset : offset + (1 << N) + 1]
    acc /= count
    rough = SampledFunction(acc, left=f.left, log2_spacing=f.log2_spacing)
    small = SampledFunction(
        f.values - rough.values, left=f.left, log2_spacing=f.log2_spacing
    )
    return ContinuousDecomposition(
        rough=rough,
        small=small,
        eps=eps,
        count=count,
        window_small_seminorms=seminorms,
    )
