"""Sampled functions and the dyadic averaging martingales they generate.

A continuous function sampled on a power-of-two grid over a dyadic root
interval induces a martingale whose value on a cell is the average growth
(slope) of the function there.  Jumps of that martingale encode second-order
differences of the function: the second difference across a parent cell
equals twice the jump picked up by either child, with opposite signs on the
two siblings.  The functionals below (star norm, dyadic BMO norm, quadratic
characteristic, maximal function, thresholded jump counts) are all read off
the jump field.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from zygdist.dyadic import DyadicInterval, RealInterval

__all__ = [
    "DyadicMartingale",
    "SampledFunction",
    "average_growth",
    "bmo_norm",
    "dyadic_zygmund_seminorm",
    "integrate",
    "maximal_function",
    "quadratic_characteristic",
    "second_difference_dyadic",
    "star_norm",
    "thresholded_jump_count",
    "window_parseval",
]


def _coerce(value) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def _log2_exact(fr: Fraction) -> int:
    """Exponent e with fr == 2**e, or raise if fr is not a power of two."""
    num, den = fr.numerator, fr.denominator
    if num <= 0 or num & (num - 1) or den & (den - 1):
        raise ValueError(f"{fr} is not a power of two")
    return num.bit_length() - den.bit_length()


class SampledFunction:
    """Uniform samples of a continuous function, with exact grid geometry.

    ``values[i]`` is the function at ``left + i * 2**log2_spacing``.  A
    function flagged ``compact`` is understood to vanish outside the sampled
    range, so sample lookups beyond the ends return 0 exactly.
    """

    __slots__ = ("values", "left", "log2_spacing", "compact")

    def __init__(self, values, left=0, log2_spacing: int | None = None, compact=None):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise ValueError("values must be a 1-d array with at least 2 samples")
        if log2_spacing is None:
            cells = values.size - 1
            if cells & (cells - 1):
                raise ValueError("log2_spacing required for non power-of-two grids")
            log2_spacing = -(cells.bit_length() - 1)
        self.values = values
        self.left = _coerce(left)
        self.log2_spacing = int(log2_spacing)
        if compact is None:
            compact = values[0] == 0.0 and values[-1] == 0.0
        self.compact = bool(compact)

    @property
    def spacing(self) -> Fraction:
        return Fraction(2) ** self.log2_spacing

    @property
    def right(self) -> Fraction:
        return self.left + (self.values.size - 1) * self.spacing

    @property
    def span(self) -> RealInterval:
        return RealInterval(self.left, self.right)

    @property
    def depth(self) -> int:
        """Number of halvings from the full span down to one grid cell."""
        cells = self.values.size - 1
        if cells & (cells - 1):
            raise ValueError("span is not a power-of-two number of cells")
        return cells.bit_length() - 1

    def index_of(self, x) -> int:
        """Exact grid index of a point (raises if off-grid)."""
        ratio = (_coerce(x) - self.left) / self.spacing
        if ratio.denominator != 1:
            raise ValueError(f"{x} is not on the sample grid")
        return int(ratio)

    def value_at_index(self, i: int) -> float:
        if 0 <= i < self.values.size:
            return float(self.values[i])
        if self.compact:
            return 0.0
        raise IndexError(f"sample {i} outside range and function not compact")

    def __repr__(self):
        return (
            f"SampledFunction({self.values.size} samples on "
            f"[{self.left}, {self.right}], spacing 2**{self.log2_spacing})"
        )


def _expand(arr: np.ndarray, dim: int, factor: int = 2) -> np.ndarray:
    """Repeat each entry ``factor`` times along every axis."""
    if factor == 1:
        return arr
    for axis in range(dim):
        arr = np.repeat(arr, factor, axis=axis)
    return arr


def _block_sum(arr: np.ndarray, dim: int) -> np.ndarray:
    """Sum over 2x...x2 blocks, halving every axis."""
    for axis in range(dim):
        shape = arr.shape
        arr = arr.reshape(
            shape[:axis] + (shape[axis] // 2, 2) + shape[axis + 1 :]
        ).sum(axis=axis + 1)
    return arr


class DyadicMartingale:
    """Averaging martingale on the dyadic subdivisions of a root cell.

    ``levels[n]`` holds the value on each generation-``n`` cell (shape
    ``(2^n,) * dim``); the value on a cell is the mean of its ``2^dim``
    children.  ``root`` records the real footprint of the root cell for
    1-d function martingales; d-dim measure martingales use the unit cube.
    """

    __slots__ = ("levels", "dim", "root")

    def __init__(self, levels, root: RealInterval | None = None, dim: int = 1):
        levels = [np.asarray(a, dtype=np.float64) for a in levels]
        for n, level in enumerate(levels):
            if level.shape != (2**n,) * dim:
                raise ValueError(f"level {n} has shape {level.shape}")
        if root is None and dim == 1:
            root = RealInterval(0, 1)
        self.levels = levels
        self.dim = dim
        self.root = root

    @classmethod
    def from_leaf(cls, leaf, root: RealInterval | None = None, dim: int = 1):
        """Build the full martingale whose deepest level is ``leaf``."""
        leaf = np.asarray(leaf, dtype=np.float64)
        levels = [leaf]
        scale = float(2**dim)
        while levels[0].size > 1:
            levels.insert(0, _block_sum(levels[0], dim) / scale)
        return cls(levels, root=root, dim=dim)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def root_value(self) -> float:
        return float(self.levels[0].flat[0])

    @property
    def leaf(self) -> np.ndarray:
        return self.levels[-1]

    def jumps(self, n: int) -> np.ndarray:
        """Jump field at generation ``n >= 1``: value minus parent value."""
        if not 1 <= n <= self.depth:
            raise ValueError(f"no jumps at generation {n}")
        return self.levels[n] - _expand(self.levels[n - 1], self.dim)

    def validate(self, rtol: float = 1e-9, atol: float = 1e-12) -> None:
        """Check the averaging property on every generation."""
        scale = float(2**self.dim)
        for n in range(1, self.depth + 1):
            mean = _block_sum(self.levels[n], self.dim) / scale
            if not np.allclose(mean, self.levels[n - 1], rtol=rtol, atol=atol):
                raise ValueError(f"averaging property fails at generation {n}")

    def cell_interval(self, n: int, j: int) -> RealInterval:
        """Real footprint of 1-d cell ``j`` at generation ``n``."""
        if self.dim != 1 or self.root is None:
            raise ValueError("cell_interval is for rooted 1-d martingales")
        width = self.root.length / (1 << n)
        return RealInterval(self.root.left + j * width, self.root.left + (j + 1) * width)

    def __repr__(self):
        return f"DyadicMartingale(depth={self.depth}, dim={self.dim})"


def average_growth(f: SampledFunction) -> DyadicMartingale:
    """Martingale of mean slopes of ``f`` over the dyadic cells of its span."""
    depth = f.depth
    span = f.span
    levels = []
    for n in range(depth + 1):
        stride = 1 << (depth - n)
        pts = f.values[::stride]
        width = float(span.length / (1 << n))
        levels.append((pts[1:] - pts[:-1]) / width)
    return DyadicMartingale(levels, root=span)


def integrate(S: DyadicMartingale) -> SampledFunction:
    """Primitive of the leaf field, pinned to 0 at the left end of the root.

    Inverts :func:`average_growth` for functions vanishing at the root's left
    endpoint: increments across leaf cells are leaf value times leaf width.
    """
    if S.dim != 1 or S.root is None:
        raise ValueError("integrate needs a rooted 1-d martingale")
    leaf_width = S.root.length / (1 << S.depth)
    increments = S.leaf * float(leaf_width)
    values = np.concatenate(([0.0], np.cumsum(increments)))
    return SampledFunction(values, left=S.root.left, log2_spacing=_log2_exact(leaf_width))


def second_difference_dyadic(f: SampledFunction, cell) -> float:
    """Second difference of ``f`` centred on a cell, at half the cell length.

    For the cell ``[a, b)`` with midpoint ``m`` and ``h = (b - a)/2`` this is
    ``(f(b) - 2 f(m) + f(a)) / h``, evaluated as a difference of one-sided
    slopes so it matches the jump arithmetic bit for bit: it equals twice the
    jump of :func:`average_growth` on the right child (minus twice the left).
    """
    if isinstance(cell, DyadicInterval):
        cell = cell.as_real()
    a, b, m = cell.left, cell.right, cell.midpoint
    va = f.value_at_index(f.index_of(a))
    vm = f.value_at_index(f.index_of(m))
    vb = f.value_at_index(f.index_of(b))
    h = float((b - a) / 2)
    return ((vb - vm) - (vm - va)) / h


def star_norm(S: DyadicMartingale) -> float:
    """Largest absolute jump over all generations."""
    best = 0.0
    for n in range(1, S.depth + 1):
        best = max(best, float(np.abs(S.jumps(n)).max()))
    return best


def dyadic_zygmund_seminorm(f: SampledFunction) -> float:
    """Largest dyadic second difference: twice the slope-martingale star norm."""
    return 2.0 * star_norm(average_growth(f))


def bmo_norm(S: DyadicMartingale, squared: bool = False) -> float:
    """Windowed L2 jump density, maximised over all dyadic windows.

    For each cell ``I`` of any generation the energy of the jumps strictly
    inside ``I`` (cells ``J`` with ``J`` a proper descendant of ``I``) is
    summed as ``jump^2 * |J|`` and divided by ``|I|``; the norm is the square
    root of the largest such density.  Computed bottom-up in one pass.
    """
    dim = S.dim
    best = 0.0
    U = np.zeros_like(S.levels[-1])
    for n in range(S.depth, 0, -1):
        dj = S.jumps(n)
        U = _block_sum(U + dj * dj * 2.0 ** (-dim * n), dim)
        best = max(best, float(U.max()) * 2.0 ** (dim * (n - 1)))
    return best if squared else math.sqrt(best)


def quadratic_characteristic(S: DyadicMartingale) -> np.ndarray:
    """Per-leaf square function: sqrt of the summed squared jumps above the leaf."""
    acc = np.zeros_like(S.levels[-1])
    for n in range(1, S.depth + 1):
        dj = S.jumps(n)
        acc += _expand(dj * dj, S.dim, 1 << (S.depth - n))
    return np.sqrt(acc)


def maximal_function(S: DyadicMartingale) -> np.ndarray:
    """Per-leaf maximal deviation ``max_n |S_n - S_0|`` of the value sequence."""
    acc = np.zeros_like(S.levels[-1])
    for n in range(1, S.depth + 1):
        dev = np.abs(S.levels[n] - S.root_value)
        np.maximum(acc, _expand(dev, S.dim, 1 << (S.depth - n)), out=acc)
    return acc


def thresholded_jump_count(S: DyadicMartingale, eps: float) -> np.ndarray:
    """Per-leaf sqrt of the number of generations whose jump exceeds ``eps``."""
    counts = np.zeros(S.levels[-1].shape, dtype=np.int64)
    for n in range(1, S.depth + 1):
        counts += _expand(
            (np.abs(S.jumps(n)) > eps).astype(np.int64), S.dim, 1 << (S.depth - n)
        )
    return np.sqrt(counts.astype(np.float64))


def window_parseval(S: DyadicMartingale, generation: int, index) -> tuple[float, float]:
    """Orthogonality check data for one window cell.

    Returns ``(jump_energy, oscillation)`` where ``jump_energy`` sums
    ``jump^2 * |J|`` over cells strictly inside the window and
    ``oscillation`` is the integral over the window of the squared deviation
    of the leaf field from the window value.  The two agree exactly in
    arithmetic without rounding.
    """
    dim = S.dim
    if isinstance(index, int):
        index = (index,) * dim
    depth = S.depth
    energy = 0.0
    for n in range(generation + 1, depth + 1):
        factor = 1 << (n - generation)
        sl = tuple(slice(k * factor, (k + 1) * factor) for k in index)
        dj = S.jumps(n)[sl]
        energy += float((dj * dj).sum()) * 2.0 ** (-dim * n)
    factor = 1 << (depth - generation)
    sl = tuple(slice(k * factor, (k + 1) * factor) for k in index)
    dev = S.leaf[sl] - S.levels[generation][index]
    oscillation = float((dev * dev).sum()) * 2.0 ** (-dim * depth)
    return energy, oscillation
