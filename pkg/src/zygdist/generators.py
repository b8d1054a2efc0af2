"""Seeded generators for functions, martingales and measures used in tests.

Every stochastic generator quantises its draws to the 2^-16 dyadic lattice
(or coarser), so sums, differences and power-of-two rescalings of generated
data are exact in IEEE-754 arithmetic and bit-level identities can be
asserted downstream.  Randomness comes from counter-based Philox streams
keyed by ``(seed, field tag)`` with a fixed draw order, so every object is
reproducible from its seed alone.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from zygdist.martingale import DyadicMartingale, SampledFunction, integrate

__all__ = [
    "cascade_measure",
    "function_suite",
    "hat_function",
    "lacunary_function",
    "linear_function",
    "martingale_suite",
    "one_split_measure",
    "parabola_function",
    "random_jump_martingale",
    "random_martingale",
    "single_branch_martingale",
    "weierstrass_function",
]

_TAG_JUMP_SIGNS = 1
_TAG_JUMP_SIZES = 2
_TAG_CASCADE_SIGNS = 3
_TAG_CASCADE_THETAS = 4


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, tag], dtype=np.uint64)))


def linear_function(depth: int, slope=1) -> SampledFunction:
    """``f(x) = slope * x`` on [0, 1]: all second differences vanish."""
    x = np.arange(2**depth + 1, dtype=np.float64) * 2.0 ** (-depth)
    return SampledFunction(float(Fraction(slope)) * x)


def hat_function(depth: int) -> SampledFunction:
    """``f(x) = min(x, 1 - x)``: one slope break of size 2 at the midpoint."""
    x = np.arange(2**depth + 1, dtype=np.float64) * 2.0 ** (-depth)
    return SampledFunction(np.minimum(x, 1.0 - x))


def parabola_function(depth: int) -> SampledFunction:
    """``f(x) = x^2``: second difference identically ``2h``."""
    i = np.arange(2**depth + 1, dtype=np.float64)
    return SampledFunction(i * i * 2.0 ** (-2 * depth))


def weierstrass_function(depth: int, levels: int | None = None) -> SampledFunction:
    """Lacunary cosine sum ``sum 2^-n cos(2 pi 2^n x)``: a classical rough case.

    Values are irrational; this generator is for tolerance-based checks only.
    """
    if levels is None:
        levels = max(1, min(depth - 1, 12))
    x = np.arange(2**depth + 1, dtype=np.float64) * 2.0 ** (-depth)
    values = np.zeros_like(x)
    for n in range(1, levels + 1):
        values += 2.0 ** (-n) * np.cos(2.0 * np.pi * (2.0**n) * x)
    return SampledFunction(values, compact=False)


def lacunary_function(
    depth: int, coefficient=Fraction(1, 2), ratio=Fraction(1, 2), levels: int | None = None
) -> SampledFunction:
    """Triangle-wave series ``sum c r^n tri(2^n x)`` with dyadic ``c`` and ``r``.

    ``tri`` is the distance to the nearest integer.  Each scale adds slope
    breaks of one size, so with ``r = 1/2`` every generation carries jumps of
    the same magnitude ``c`` (star norm ``c``, all grid values exact).
    """
    coefficient = Fraction(coefficient)
    ratio = Fraction(ratio)
    for fr in (coefficient, ratio):
        if fr.denominator & (fr.denominator - 1):
            raise ValueError("coefficient and ratio must be dyadic rationals")
    if levels is None:
        levels = depth
    levels = min(levels, depth)
    size = 2**depth
    i = np.arange(size + 1, dtype=np.int64)
    values = np.zeros(size + 1, dtype=np.float64)
    for n in range(levels):
        pos = (i << n) & (size - 1)  # 2^n x mod 1, in grid units
        tri = np.minimum(pos, size - pos).astype(np.float64) * 2.0 ** (-depth)
        values += float(coefficient * ratio**n) * tri
    return SampledFunction(values)


def random_jump_martingale(depth: int, delta=Fraction(1, 16), seed: int = 0) -> DyadicMartingale:
    """Martingale whose every parent splits by ``+-delta`` with a random sign.

    Jumps have magnitude exactly ``delta`` at every cell of every generation,
    so the star norm is ``delta`` and the primitive has dyadic second
    differences of size ``2 delta`` across every parent cell.
    """
    delta = Fraction(delta)
    if (delta * 2**16).denominator != 1:
        raise ValueError("delta must be a multiple of 2^-16")
    d = float(delta)
    rng = _rng(seed, _TAG_JUMP_SIGNS)
    levels = [np.zeros(1)]
    for n in range(depth):
        signs = rng.integers(0, 2, size=2**n).astype(np.float64) * 2.0 - 1.0
        parent = levels[-1]
        child = np.empty(2 ** (n + 1))
        child[0::2] = parent + signs * d
        child[1::2] = parent - signs * d
        levels.append(child)
    return DyadicMartingale(levels)


def random_martingale(depth: int, seed: int = 0, max_jump=Fraction(1, 4)) -> DyadicMartingale:
    """Martingale with quantised random jump sizes (multiples of 2^-14).

    Each parent draws one magnitude uniformly from the lattice
    ``{0, 2^-14, ..., max_jump}`` and a sign; the two children move by
    opposite amounts, preserving the averaging property exactly.
    """
    max_jump = Fraction(max_jump)
    steps = int(max_jump * 2**14)
    if steps < 1 or (max_jump * 2**14).denominator != 1:
        raise ValueError("max_jump must be a positive multiple of 2^-14")
    rng = _rng(seed, _TAG_JUMP_SIZES)
    root = float(rng.integers(-(2**8), 2**8 + 1) * Fraction(1, 256))
    levels = [np.full(1, root)]
    for n in range(depth):
        magnitude = rng.integers(0, steps + 1, size=2**n).astype(np.float64) * 2.0**-14
        signs = rng.integers(0, 2, size=2**n).astype(np.float64) * 2.0 - 1.0
        jump = magnitude * signs
        parent = levels[-1]
        child = np.empty(2 ** (n + 1))
        child[0::2] = parent + jump
        child[1::2] = parent - jump
        levels.append(child)
    return DyadicMartingale(levels)


def single_branch_martingale(depth: int, delta=Fraction(1, 2)) -> DyadicMartingale:
    """Martingale that climbs by ``delta`` along the leftmost branch only.

    The branch child gains ``+delta``, its sibling ``-delta`` (forced by the
    averaging property), and everything off the branch stays constant.  The
    maximal function equals ``depth * delta`` on the leftmost leaf.
    """
    d = float(Fraction(delta))
    levels = [np.zeros(1)]
    for n in range(depth):
        parent = levels[-1]
        child = np.repeat(parent, 2)
        child[0] = parent[0] + d
        child[1] = parent[0] - d
        levels.append(child)
    return DyadicMartingale(levels)


def function_suite(depth: int, seed: int = 0) -> list[tuple[str, SampledFunction]]:
    """Named sample functions covering smooth, kink, rough and random cases."""
    return [
        ("linear", linear_function(depth)),
        ("hat", hat_function(depth)),
        ("parabola", parabola_function(depth)),
        ("lacunary", lacunary_function(depth)),
        ("weierstrass", weierstrass_function(depth)),
        ("random-jumps", integrate(random_jump_martingale(depth, seed=seed))),
    ]


def martingale_suite(depth: int, count: int, seed: int = 0) -> list[DyadicMartingale]:
    """``count`` independent quantised random martingales."""
    return [random_martingale(depth, seed=seed + i) for i in range(count)]


def _interleave(blocks: np.ndarray, dim: int) -> np.ndarray:
    """Merge shape ``(s,)*dim + (2,)*dim`` child blocks into ``(2s,)*dim``."""
    side = blocks.shape[0]
    order = []
    for axis in range(dim):
        order += [axis, dim + axis]
    return blocks.transpose(order).reshape((2 * side,) * dim)


def cascade_measure(
    dim: int, depth: int, thetas=None, seed: int = 0
):
    """Multiplicative cascade mass field on the unit cube.

    At generation ``n`` every cell splits its mass among its ``2^dim``
    children with factors ``(1 +- theta_n) / 2^dim``, signs balanced so mass
    is conserved; ``theta_n`` are multiples of 1/16 (drawn in
    ``{1/16..8/16}`` when not given), keeping all masses exact dyadic
    rationals.  Returns masses as an array of shape ``(2^depth,) * dim``.
    """
    if thetas is None:
        draws = _rng(seed, _TAG_CASCADE_THETAS).integers(1, 9, size=depth)
        thetas = [Fraction(int(k), 16) for k in draws]
    thetas = [Fraction(t) for t in thetas]
    if len(thetas) != depth:
        raise ValueError("need one theta per generation")
    for t in thetas:
        if (t * 16).denominator != 1 or not 0 <= t < 1:
            raise ValueError("thetas must be multiples of 1/16 in [0, 1)")
    rng = _rng(seed, _TAG_CASCADE_SIGNS)
    masses = np.ones((1,) * dim)
    half = 2 ** (dim - 1)
    base = np.array([1.0] * half + [-1.0] * half)
    for n in range(depth):
        parents = masses.size
        signs = rng.permuted(np.tile(base, (parents, 1)), axis=1)
        factors = (1.0 + signs * float(thetas[n])) / float(2**dim)
        blocks = masses[..., None] * factors.reshape(masses.shape + (2**dim,))
        blocks = blocks.reshape(masses.shape + (2,) * dim)
        masses = _interleave(blocks, dim)
    return masses


def one_split_measure(dim: int, depth: int, theta=Fraction(1, 4)) -> np.ndarray:
    """Mass field that splits unevenly at the root only, uniform below.

    The first child of the root gets ``(1 + theta)/2^dim`` of the mass, the
    last gets ``(1 - theta)/2^dim`` (other children, if any, stay even), and
    every deeper split is uniform.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    theta = Fraction(theta)
    children = np.full((2,) * dim, 1.0 / 2**dim)
    children[(0,) * dim] = float(Fraction(1 + theta, 2**dim))
    children[(1,) * dim] = float(Fraction(1 - theta, 2**dim))
    sub = 2 ** (depth - 1)  # cells per axis below the first split
    uniform = np.full((sub,) * dim, 1.0 / float(sub) ** dim)
    return np.kron(children, uniform)
