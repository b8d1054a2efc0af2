"""Second-difference functionals and level-set densities at dyadic resolution.

Three families of quantities measure how far a sampled function is from the
smooth subspace:

* pointwise first/second differences and their grid supremum (the Zygmund
  seminorm over resolvable configurations);
* box functionals: weighted integrals over ``I x (0, |I|]`` of the squared
  second difference (square energy) or of the indicator that it exceeds a
  level ``eps`` (level-set density), maximised over dyadic windows;
* tree functionals: the measure of cells whose dyadic second difference
  exceeds ``eps``, again maximised over windows, plus per-point cone counts.

Limits in depth are replaced by depth profiles: a profile is judged bounded
when its deepest value is within a factor ``1 + tau`` of its shallowest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from zygdist.dyadic import RealInterval
from zygdist.martingale import (
    DyadicMartingale,
    SampledFunction,
    average_growth,
    dyadic_zygmund_seminorm,
)

__all__ = [
    "DepthProfile",
    "ThresholdEstimate",
    "box_square_energy",
    "cone_levelset_count",
    "cone_square_energy",
    "default_eps_grid",
    "density_profile",
    "estimate_threshold",
    "exceeds_level",
    "first_difference",
    "levelset_box_density",
    "levelset_tree_density",
    "lp_norm",
    "second_difference",
    "zygmund_seminorm",
]

_LN2 = math.log(2.0)


def first_difference(f: SampledFunction, x, h) -> float:
    """Forward slope ``(f(x + h) - f(x)) / h`` at exact grid points."""
    i = f.index_of(x)
    u = f.index_of(Fraction(x) + Fraction(h)) - i
    if u == 0:
        raise ValueError("h must be at least one grid step")
    return (f.value_at_index(i + u) - f.value_at_index(i)) / float(Fraction(h))


def second_difference(f: SampledFunction, x, h) -> float:
    """Symmetric second difference ``(f(x+h) - 2 f(x) + f(x-h)) / h``.

    ``x`` and ``h`` must be grid-resolvable.  Compact functions are extended
    by zero beyond their support; for others, off-range samples raise.
    """
    i = f.index_of(x)
    u = f.index_of(Fraction(x) + Fraction(h)) - i
    if u <= 0:
        raise ValueError("h must be at least one grid step")
    try:
        vl = f.value_at_index(i - u)
        vc = f.value_at_index(i)
        vr = f.value_at_index(i + u)
    except IndexError as exc:
        raise ValueError(str(exc)) from None
    return ((vr - vc) - (vc - vl)) / float(Fraction(h))


def exceeds_level(f: SampledFunction, x, h, eps: float) -> bool:
    """Whether ``(x, h)`` lies in the level set ``|second difference| > eps``."""
    return abs(second_difference(f, x, h)) > eps


def zygmund_seminorm(f: SampledFunction) -> float:
    """Largest ``|second difference|`` over all interior grid pairs ``(x, h)``.

    The sweep runs over every grid point ``x`` and step ``h = u * spacing``
    with both ``x - h`` and ``x + h`` inside the sampled span.
    """
    v = f.values
    spacing = float(f.spacing)
    best = 0.0
    for u in range(1, (v.size - 1) // 2 + 1):
        d2 = (v[2 * u :] - v[u:-u]) - (v[u:-u] - v[: -2 * u])
        if d2.size:
            best = max(best, float(np.abs(d2).max()) / (u * spacing))
    return best


def _gather(values: np.ndarray, idx: np.ndarray, compact: bool):
    """Samples at integer indices with zero extension or a validity mask."""
    valid = (idx >= 0) & (idx < values.size)
    out = values[np.clip(idx, 0, values.size - 1)]
    if compact:
        return np.where(valid, out, 0.0), np.ones_like(valid)
    return np.where(valid, out, 0.0), valid


def _window_cells(f: SampledFunction, interval) -> tuple[int, int]:
    """(left index, cell count) of a grid-aligned window, cells a power of two."""
    iv = f.span if interval is None else interval
    if isinstance(iv, RealInterval):
        left = f.index_of(iv.left)
        cells = f.index_of(iv.right) - left
    else:
        raise TypeError("interval must be a RealInterval or None")
    if cells <= 0 or cells & (cells - 1):
        raise ValueError("window must span a power-of-two number of grid cells")
    return left, cells


def box_square_energy(
    f: SampledFunction, interval: RealInterval | None = None, depth: int | None = None
) -> float:
    """Normalised square energy of second differences over a box lattice.

    Sums ``weight * d2(x, h)^2`` over the midpoint lattice of
    ``I x (0, |I|]`` down to ``depth`` layers and divides by ``|I|``.  Layers
    whose sample step falls under the grid resolution are not representable
    and stop the sum (profiles deeper than the grid saturate).
    """
    left, cells = _window_cells(f, interval)
    if depth is None:
        depth = max(cells.bit_length() - 2, 1)
    spacing = float(f.spacing)
    v = f.values
    total = 0.0
    for n in range(depth):
        if cells >> (n + 2) == 0 or cells % (1 << (n + 2)):
            break
        q = cells >> (n + 2)
        centers = left + (2 * np.arange(1 << (n + 1), dtype=np.int64) + 1) * q
        vl, okl = _gather(v, centers - 3 * q, f.compact)
        vr, okr = _gather(v, centers + 3 * q, f.compact)
        vc = v[centers]
        d2 = ((vr - vc) - (vc - vl)) / (3 * q * spacing)
        ok = okl & okr
        weight = 2 * q * spacing * _LN2
        total += weight * float((d2 * d2 * ok).sum())
    return total / (cells * spacing)


def _layer_indicators(f: SampledFunction, eps: float):
    """Per-step-size prefix sums of ``|d2| > eps`` on the global box lattice.

    For each ``q = 2^p`` the lattice evaluates the second difference at
    ``x = (2i + 1) q`` grid units with ``h = 3 q`` grid units; every dyadic
    window's layer needs a contiguous slice of exactly these samples.
    """
    v = f.values
    M = v.size - 1
    N = M.bit_length() - 1
    spacing = float(f.spacing)
    prefixes = []
    for p in range(N - 1):
        q = 1 << p
        centers = (2 * np.arange(M >> (p + 1), dtype=np.int64) + 1) * q
        vl, okl = _gather(v, centers - 3 * q, f.compact)
        vr, okr = _gather(v, centers + 3 * q, f.compact)
        vc = v[centers]
        d2 = ((vr - vc) - (vc - vl)) / (3 * q * spacing)
        hit = (np.abs(d2) > eps) & okl & okr
        prefixes.append(np.concatenate(([0], np.cumsum(hit))))
    return prefixes


def levelset_box_density(f: SampledFunction, eps: float, depth: int) -> float:
    """Largest windowed box mass of the level set ``|d2| > eps``.

    For every dyadic window ``I`` of generation ``0..depth`` in the sampled
    span, integrates the level-set indicator over the box lattice of ``I``
    (down to ``depth`` layers or the grid floor) with ``dx dh/h`` weights and
    divides by ``|I|``; returns the maximum over windows.
    """
    N = f.depth
    spacing = float(f.spacing)
    span_length = float(f.span.length)
    prefixes = _layer_indicators(f, eps)
    best = 0.0
    for g in range(min(depth, N - 2) + 1):
        acc = np.zeros(1 << g)
        edges = np.arange((1 << g) + 1, dtype=np.int64)
        for n in range(min(depth - 1, N - g - 2) + 1):
            p = N - g - n - 2
            cuts = edges * (1 << (n + 1))
            counts = prefixes[p][cuts[1:]] - prefixes[p][cuts[:-1]]
            acc += counts * (2.0 ** (p + 1) * spacing * _LN2)
        best = max(best, float(acc.max()) * 2.0**g / span_length)
    return best


def levelset_tree_density(source, eps: float, depth: int | None = None) -> float:
    """Largest windowed measure of cells with large dyadic second difference.

    A parent cell qualifies when its centred second difference (twice the
    child jump of the slope martingale) exceeds ``eps``.  For each window
    cell ``I`` of generation ``0..depth``, the lengths of qualifying parents
    ``P`` with ``P`` inside ``I`` and ``generation(P) < depth`` are summed
    and divided by ``|I|``; returns the maximum over windows, computed
    bottom-up in one pass.
    """
    S = source if isinstance(source, DyadicMartingale) else average_growth(source)
    if depth is None:
        depth = S.depth
    if not 1 <= depth <= S.depth:
        raise ValueError(f"depth must be in [1, {S.depth}]")
    best = 0.0
    acc = np.zeros(1 << depth)
    for m in range(depth - 1, -1, -1):
        child_sum = acc[0::2] + acc[1::2]
        left_jumps = S.jumps(m + 1)[0::2]
        qualifies = 2.0 * np.abs(left_jumps) > eps
        acc = child_sum + qualifies * 2.0 ** (-m)
        best = max(best, float(acc.max()) * 2.0**m)
    return best


@dataclass
class DepthProfile:
    """Functional values tabulated over depths (rows) and levels (columns)."""

    depths: list[int]
    eps: list[float]
    values: list[list[float]] = field(default_factory=list)

    def column(self, j: int) -> list[float]:
        return [row[j] for row in self.values]


@dataclass
class ThresholdEstimate:
    """Smallest stable level of a depth profile, with the decision data."""

    eps: float | None
    ratios: list[float]
    stable: list[bool]
    tau: float
    method: str = "depth-ratio"


def density_profile(
    f: SampledFunction,
    eps_grid,
    depths,
    kind: str = "tree",
) -> DepthProfile:
    """Tabulate a level-set density over a level grid and several depths."""
    eps_grid = [float(e) for e in eps_grid]
    depths = list(depths)
    S = average_growth(f) if kind == "tree" else None
    profile = DepthProfile(depths=depths, eps=eps_grid)
    for d in depths:
        if kind == "tree":
            row = [levelset_tree_density(S, e, depth=d) for e in eps_grid]
        elif kind == "box":
            row = [levelset_box_density(f, e, depth=d) for e in eps_grid]
        else:
            raise ValueError(f"unknown profile kind {kind!r}")
        profile.values.append(row)
    return profile


def _growth_ratio(shallow: float, deep: float) -> float:
    if deep == 0.0:
        return 1.0
    if shallow == 0.0:
        return math.inf
    return deep / shallow


def estimate_threshold(profile: DepthProfile, tau: float = 0.1) -> ThresholdEstimate:
    """Smallest grid level whose profile no longer grows with depth.

    A level is stable when value[deepest] / value[shallowest] <= 1 + tau
    (0/0 counts as stable, growth from zero as unstable).  Returns the first
    stable level of the ascending grid, or ``None`` when every level still
    grows — the finite-depth data is then inconclusive.
    """
    order = sorted(range(len(profile.eps)), key=lambda j: profile.eps[j])
    shallow_row = profile.values[profile.depths.index(min(profile.depths))]
    deep_row = profile.values[profile.depths.index(max(profile.depths))]
    ratios = [0.0] * len(order)
    stable = [False] * len(order)
    chosen = None
    for j in order:
        r = _growth_ratio(shallow_row[j], deep_row[j])
        ratios[j] = r
        stable[j] = r <= 1.0 + tau
        if stable[j] and chosen is None:
            chosen = profile.eps[j]
    return ThresholdEstimate(eps=chosen, ratios=ratios, stable=stable, tau=tau)


def _cone_samples(f: SampledFunction, depth: int):
    """Per-layer second differences on the three-cell cone lattice.

    Layer ``n`` represents aperture heights ``[2^-(n+1), 2^-n)`` by
    ``t = 3u`` grid units with ``u = 2^(N-n-2)``; for an apex at grid index
    ``a`` the slab ``|x - s| < t`` is covered by three cells of width ``2u``
    centred at ``a - 2u, a, a + 2u``, each carrying ``ds dt/t^2`` mass 4/9.
    """
    N = f.depth
    v = f.values
    spacing = float(f.spacing)
    for n in range(min(depth, N - 1)):
        u = 1 << (N - n - 2) if N - n - 2 >= 0 else 0
        if u == 0:
            return
        s = np.arange(v.size, dtype=np.int64)
        vl, okl = _gather(v, s - 3 * u, f.compact)
        vr, okr = _gather(v, s + 3 * u, f.compact)
        d2 = ((vr - v) - (v - vl)) / (3 * u * spacing)
        yield u, d2, okl & okr


def _cone_accumulate(f: SampledFunction, depth: int, per_sample) -> np.ndarray:
    N = f.depth
    acc = np.zeros(1 << N)
    apex = np.arange(1 << N, dtype=np.int64)
    for u, d2, ok in _cone_samples(f, depth):
        for offset in (-2 * u, 0, 2 * u):
            s = apex + offset
            inside = (s >= 0) & (s < d2.size)
            s = np.clip(s, 0, d2.size - 1)
            val = per_sample(d2[s]) * ok[s] * inside
            acc += (4.0 / 9.0) * val
    return acc


def cone_levelset_count(f: SampledFunction, eps: float, depth: int) -> np.ndarray:
    """Per-leaf sqrt of the cone mass of the level set ``|d2| > eps``."""
    counts = _cone_accumulate(f, depth, lambda d2: (np.abs(d2) > eps).astype(np.float64))
    return np.sqrt(counts)


def cone_square_energy(f: SampledFunction, depth: int) -> np.ndarray:
    """Per-leaf sqrt of the cone integral of the squared second difference."""
    energy = _cone_accumulate(f, depth, lambda d2: d2 * d2)
    return np.sqrt(energy)


def lp_norm(leaf_field: np.ndarray, p: float, dim: int = 1) -> float:
    """``L^p`` norm of a per-leaf field over the unit cell, ``1 < p < inf``."""
    if not 1.0 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    field = np.asarray(leaf_field, dtype=np.float64)
    if dim > 1 and field.shape != (field.shape[0],) * dim:
        raise ValueError("field shape does not match dim")
    return float((np.abs(field) ** p).mean() ** (1.0 / p))


def default_eps_grid(f: SampledFunction, points_per_octave: int = 2) -> list[float]:
    """Ascending geometric level grid tied to the dyadic seminorm of ``f``.

    Runs from ``2^-10`` times to twice the seminorm in ``sqrt(2)`` steps (so
    the seminorm itself is a grid point).  A function with zero seminorm gets
    the single level 0, where every density already vanishes.
    """
    norm = dyadic_zygmund_seminorm(f)
    if norm == 0.0:
        return [0.0]
    steps = 10 * points_per_octave
    top = points_per_octave
    return [norm * 2.0 ** (j / points_per_octave) for j in range(-steps, top + 1)]
