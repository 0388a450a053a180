"""Delta functions, the two lifted colorings, recursive composition and bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

import mpmath
import numpy as np

from . import basegen
from ._rng import derive_seed
from .core import (
    BinaryStepUp,
    ExplicitLeaf,
    ExplicitTripleColoring,
    LiftedColoring,
    MixedStepUp,
    PairColoring,
    TripleColoring,
    VertexCode,
    as_lifted,
)
from .errors import (
    DepthExceeded,
    EqualVertices,
    InternalInvariantViolation,
    OutOfUniverse,
)

Real = Union[Fraction, mpmath.mpf]

MAX_DEPTH = 64
# largest universe evaluated with float64-backed numpy arithmetic
VECTOR_LIMIT = 1 << 52
_DPS = 60


def delta(u: VertexCode, v: VertexCode) -> int:
    """Largest digit position at which ``u`` and ``v`` differ."""
    if (u.radix, u.num_digits) != (v.radix, v.num_digits):
        raise ValueError("vertex codes live in different universes")
    if u.value == v.value:
        raise EqualVertices(f"delta undefined for equal vertices ({u.value})")
    if u.radix == 2:
        return (u.value ^ v.value).bit_length() - 1
    powers = [u.radix**i for i in range(u.num_digits + 1)]
    return _delta_powers(u.value, v.value, powers, u.num_digits)


def _delta_powers(u: int, v: int, powers, num_digits: int) -> int:
    # u // radix**i != v // radix**i holds exactly for i <= delta
    lo, hi = 0, num_digits
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if u // powers[mid] != v // powers[mid]:
            lo = mid
        else:
            hi = mid
    return lo


def _check_increasing(v1: int, v2: int, v3: int, size: int) -> None:
    if v1 == v2 or v2 == v3 or v1 == v3:
        raise EqualVertices(f"triple ({v1}, {v2}, {v3}) repeats a vertex")
    if not v1 < v2 < v3:
        raise ValueError(f"triple ({v1}, {v2}, {v3}) is not increasing")
    if v1 < 0 or v3 >= size:
        raise OutOfUniverse(f"triple ({v1}, {v2}, {v3}) outside a universe of size {size}")


def chi_binary(base: PairColoring | BinaryStepUp, v1, v2, v3) -> int:
    """Color of ``v1 < v2 < v3`` in the binary step-up of ``base``."""
    if isinstance(base, BinaryStepUp):
        base = base.base
    v1, v2, v3 = int(v1), int(v2), int(v3)
    _check_increasing(v1, v2, v3, 1 << base.num_vertices)
    d1 = (v1 ^ v2).bit_length() - 1
    d2 = (v2 ^ v3).bit_length() - 1
    if d1 == d2:
        raise InternalInvariantViolation(f"equal consecutive deltas at ({v1}, {v2}, {v3})")
    return base.color(d1, d2)


def chi_mixed(lift: MixedStepUp, v1, v2, v3) -> int:
    """Color of ``v1 < v2 < v3`` in the mixed-radix step-up."""
    v1, v2, v3 = int(v1), int(v2), int(v3)
    _check_increasing(v1, v2, v3, lift.universe_size)
    return _chi_mixed(lift, v1, v2, v3)


def _chi_mixed(lift: MixedStepUp, v1: int, v2: int, v3: int) -> int:
    p, m = lift.powers, lift.num_digits
    d1 = _delta_powers(v1, v2, p, m)
    d2 = _delta_powers(v2, v3, p, m)
    if d1 > d2:
        return lift.pair_base.color(d2, d1)
    if d1 < d2:
        return 3 + lift.pair_base.color(d1, d2)
    r = lift.radix
    a, b, c = (v1 // p[d1]) % r, (v2 // p[d1]) % r, (v3 // p[d1]) % r
    if not a < b < c:
        raise InternalInvariantViolation(
            f"digits at repeated delta {d1} not increasing: ({a}, {b}, {c})")
    return 6 + _evaluate(lift.triple_base, a, b, c)


def _evaluate(node: LiftedColoring, v1: int, v2: int, v3: int) -> int:
    if isinstance(node, MixedStepUp):
        return _chi_mixed(node, v1, v2, v3)
    if isinstance(node, BinaryStepUp):
        d1 = (v1 ^ v2).bit_length() - 1
        d2 = (v2 ^ v3).bit_length() - 1
        if d1 == d2:
            raise InternalInvariantViolation(f"equal consecutive deltas at ({v1}, {v2}, {v3})")
        return node.base.color(d1, d2)
    return node.triple_coloring.color(v1, v2, v3)


def evaluate(coloring: TripleColoring, a, b, c) -> int:
    """Color of the unordered triple ``{a, b, c}``; arguments are sorted first."""
    v1, v2, v3 = sorted((int(a), int(b), int(c)))
    node = as_lifted(coloring)
    _check_increasing(v1, v2, v3, node.universe_size)
    return _evaluate(node, v1, v2, v3)


# Vectorized evaluation over int64 arrays of increasing triples.

def _bit_length(x: np.ndarray) -> np.ndarray:
    # exact for 0 < x < 2**53
    return np.frexp(x.astype(np.float64))[1].astype(np.int64)


def supports_vectorized(coloring: TripleColoring) -> bool:
    return as_lifted(coloring).universe_size <= VECTOR_LIMIT


def evaluate_many(coloring: TripleColoring, v1, v2, v3) -> np.ndarray:
    """Colors of the increasing triples ``(v1[i], v2[i], v3[i])`` as an int64 array.

    Only for universes of at most ``2**52`` vertices; no range checks beyond that.
    """
    node = as_lifted(coloring)
    if node.universe_size > VECTOR_LIMIT:
        raise ValueError("universe too large for vectorized evaluation")
    v1, v2, v3 = (np.asarray(x, dtype=np.int64) for x in (v1, v2, v3))
    return _evaluate_many(node, v1, v2, v3)


def _evaluate_many(node, v1, v2, v3) -> np.ndarray:
    if isinstance(node, ExplicitLeaf):
        rank = v3 * (v3 - 1) * (v3 - 2) // 6 + v2 * (v2 - 1) // 2 + v1
        return node.triple_coloring.colors[rank].astype(np.int64)
    if isinstance(node, BinaryStepUp):
        d1 = _bit_length(v1 ^ v2) - 1
        d2 = _bit_length(v2 ^ v3) - 1
        if np.any(d1 == d2):
            raise InternalInvariantViolation("equal consecutive deltas in binary step-up")
        lo, hi = np.minimum(d1, d2), np.maximum(d1, d2)
        return node.base.colors[hi * (hi - 1) // 2 + lo].astype(np.int64)
    radix, m = node.radix, node.num_digits
    digits = np.empty((3, m, v1.size), dtype=np.int64)
    rest = [v1.copy(), v2.copy(), v3.copy()]
    for i in range(m):
        for k in range(3):
            rest[k], digits[k, i] = np.divmod(rest[k], radix)
    d1 = np.full(v1.size, -1, dtype=np.int64)
    d2 = np.full(v1.size, -1, dtype=np.int64)
    for i in range(m):
        d1[digits[0, i] != digits[1, i]] = i
        d2[digits[1, i] != digits[2, i]] = i
    lo, hi = np.minimum(d1, d2), np.maximum(d1, d2)
    pair_colors = node.pair_base.colors
    if pair_colors.size:
        pc = pair_colors[np.where(hi > lo, hi * (hi - 1) // 2 + lo, 0)].astype(np.int64)
    else:
        pc = np.zeros(v1.size, dtype=np.int64)
    out = np.where(d1 > d2, pc, pc + 3)
    eq = np.nonzero(d1 == d2)[0]
    if eq.size:
        j = d1[eq]
        a, b, c = digits[0, j, eq], digits[1, j, eq], digits[2, j, eq]
        if not (np.all(a < b) and np.all(b < c)):
            raise InternalInvariantViolation("digits at a repeated delta are not increasing")
        out[eq] = 6 + _evaluate_many(node.triple_base, a, b, c)
    return out


# Composition.

@dataclass(frozen=True)
class GenPolicy:
    """How :func:`compose` sizes and generates its bases.

    ``pair_size`` and ``leaf_size`` override the size formulas for the
    pair-base universe (every level) and the leaf universe. Subset sizes are
    clamped to the overridden universe so the generated property stays
    meaningful.
    """

    seed: int = 0
    pair_size: int | None = None
    leaf_size: int | None = None
    max_attempts: int = 100_000
    budget: int = basegen.DEFAULT_BUDGET


@dataclass(frozen=True)
class PlanLevel:
    n: int
    q: int
    s: int | None = None
    r: int | None = None
    pair_size: int | None = None
    leaf_size_log2: Fraction | None = None

    @property
    def is_leaf(self) -> bool:
        return self.q < 9

    @property
    def exponent_condition(self) -> bool | None:
        """Whether ``pair_size >= n**(1/4) / 2``, i.e. ``16 * N2**4 >= n``."""
        if self.is_leaf:
            return None
        return 16 * self.pair_size**4 >= self.n

    def to_dict(self) -> dict:
        out = {"n": self.n, "q": self.q}
        if self.is_leaf:
            out["leaf_size_log2"] = str(self.leaf_size_log2)
        else:
            out.update(s=self.s, r=self.r, pair_size=self.pair_size,
                       exponent_condition_holds=self.exponent_condition)
        return out


def floor_log2(n: int) -> int:
    if n < 1:
        raise ValueError("log of a non-positive number")
    return n.bit_length() - 1


def floor_n_over_log2(n: int) -> int:
    """``floor(n / log2(n))`` for ``n >= 2``."""
    if n < 2:
        raise ValueError("n / log2(n) needs n >= 2")
    k = floor_log2(n)
    if n == 1 << k:
        return n // k
    # log2(n) is irrational here, so the quotient is never an integer
    with mpmath.workdps(len(str(n)) + 30):
        r = int(mpmath.floor(mpmath.mpf(n) / mpmath.log(n, 2)))
    if n <= 1 << 12:
        while n**(r + 1) <= 1 << n:
            r += 1
        while n**r > 1 << n:
            r -= 1
    return r


def plan(n: int, q: int) -> list[PlanLevel]:
    """Level-by-level parameters of the recursive construction, top first."""
    if q < 3:
        raise ValueError("the construction needs q >= 3")
    levels = []
    while q >= 9:
        if len(levels) >= MAX_DEPTH:
            raise DepthExceeded(f"more than {MAX_DEPTH} mixed step-up levels")
        if n < 2:
            raise DepthExceeded(f"subset size shrank to {n} before reaching the leaf")
        s = floor_log2(n)
        r = floor_n_over_log2(n)
        levels.append(PlanLevel(n, q, s=s, r=r, pair_size=basegen.iroot(1 << s, 4)))
        n, q = r, q - 6
    levels.append(PlanLevel(n, q, leaf_size_log2=Fraction(n * n, 24)))
    return levels


def nominal_universe_log2(levels: list[PlanLevel]) -> Fraction:
    """log2 of the formula-sized universe, using ``n**2/24`` for the leaf."""
    value = levels[-1].leaf_size_log2
    for level in reversed(levels[:-1]):
        value = level.pair_size * value
    return value


def compose(n: int, q: int, policy: GenPolicy | None = None) -> LiftedColoring:
    """Build and verify every level of the recursive construction for ``(n, q)``."""
    policy = policy or GenPolicy()
    levels = plan(n, q)
    return _build(levels, 0, policy)


def _build(levels: list[PlanLevel], depth: int, policy: GenPolicy) -> LiftedColoring:
    level = levels[depth]
    seed = derive_seed(policy.seed, depth)
    if level.is_leaf:
        size = policy.leaf_size
        if size is None:
            size = basegen.lemma31_universe_size(level.n)
        spec = basegen.GenSpec("triple", size, 3, min(level.n, size), 3, seed,
                               policy.max_attempts, budget=policy.budget)
        leaf = basegen.generate(spec)
        return ExplicitLeaf(leaf.with_palette(level.q))
    size = policy.pair_size if policy.pair_size is not None else level.pair_size
    spec = basegen.GenSpec("pair", size, 3, min(level.s, size), 3, seed,
                           policy.max_attempts, budget=policy.budget)
    pair = basegen.generate(spec)
    return MixedStepUp(pair, _build(levels, depth + 1, policy))


# Bounds.

def _fourth_root_exact(n: int) -> int | None:
    r = isqrt(isqrt(n))
    return r if r**4 == n else None


def _mpf(x: Real) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def bound_log2(n: int, q: int) -> Real:
    """log2 of the guaranteed universe size from the exact recurrence.

    ``n**2/24`` for ``3 <= q < 9``; otherwise ``(n**(1/4)/2) * bound_log2(r, q-6)``
    with ``r = floor(n / log2 n)``. Exact :class:`Fraction` whenever every
    factor is rational, else an ``mpmath.mpf`` at 60 digits.
    """
    if q < 3:
        raise ValueError("bound needs q >= 3")
    if q < 9 or n < 2:
        return Fraction(n * n, 24)
    inner = bound_log2(floor_n_over_log2(n), q - 6)
    root = _fourth_root_exact(n)
    if root is not None and isinstance(inner, Fraction):
        return Fraction(root, 2) * inner
    with mpmath.workdps(_DPS):
        return mpmath.root(n, 4) / 2 * _mpf(inner)


def bound_log2_simple(n: int, q: int, t: int, general: bool = False) -> Real:
    """``n**log2(q/(t-1)) / 4``; an exact Fraction when ``n`` is a power of two."""
    if not q >= t >= 2:
        raise ValueError("need q >= t >= 2")
    m = floor_log2(n)
    if n == 1 << m:
        return Fraction(q, t - 1) ** m / 4
    if not general:
        raise ValueError(f"n = {n} is not a power of two (pass general=True)")
    with mpmath.workdps(_DPS):
        return mpmath.power(n, mpmath.log(mpmath.mpf(q) / (t - 1), 2)) / 4


def effective_exponent(n: int, q: int) -> mpmath.mpf:
    """``log(log2 B(n, q)) / log n``, the exponent of n in the bound."""
    with mpmath.workdps(_DPS):
        return mpmath.log(_mpf(bound_log2(n, q))) / mpmath.log(n)


def format_real(x: Real, digits: int = 50) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return mpmath.nstr(x, digits)


def _colex_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Pairs ``i < j < n`` in colex order, as two arrays."""
    if n < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    js = np.arange(1, n, dtype=np.int64)
    lo = np.concatenate([np.arange(j, dtype=np.int64) for j in js])
    hi = np.repeat(js, js)
    return lo, hi


def tabulate(coloring: TripleColoring, block: int = 1 << 21) -> np.ndarray:
    """Colors of every triple of the universe, indexed by colex rank."""
    node = as_lifted(coloring)
    if isinstance(node, ExplicitLeaf):
        return node.triple_coloring.colors.astype(np.int64)
    size = node.universe_size
    if size > VECTOR_LIMIT:
        raise ValueError("universe too large to tabulate")
    lo, hi = _colex_pairs(size - 1)
    out = np.empty(size * (size - 1) * (size - 2) // 6, dtype=np.int64)
    k, filled = 2, 0
    while k < size:
        # gather whole k-blocks until the batch is big enough
        parts1, parts2, parts3, count = [], [], [], 0
        while k < size and (count == 0 or count + k * (k - 1) // 2 <= block):
            c = k * (k - 1) // 2
            parts1.append(lo[:c])
            parts2.append(hi[:c])
            parts3.append(np.full(c, k, dtype=np.int64))
            count += c
            k += 1
        v1, v2, v3 = (np.concatenate(p) for p in (parts1, parts2, parts3))
        out[filled:filled + count] = _evaluate_many(node, v1, v2, v3)
        filled += count
    return out
