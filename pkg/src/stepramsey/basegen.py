"""Base colorings by seeded rejection sampling, plus the first-moment numbers
that say how large a base universe random sampling can be expected to handle.

All sizes of the form ``floor(x ** (a/b))`` are computed with exact integer
roots; no floating point is involved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, isqrt

import mpmath
import numpy as np

from . import _subsets
from ._rng import SplitMix64, derive_seed
from .core import ExplicitTripleColoring, PairColoring, pair_rank, triple_rank
from .errors import AttemptsExhausted, BudgetExceeded, InfeasibleSpec

DEFAULT_BUDGET = 10**8


def iroot(x: int, k: int) -> int:
    """Largest integer ``K`` with ``K**k <= x``."""
    if x < 0 or k < 1:
        raise ValueError("iroot needs x >= 0 and k >= 1")
    if x < 2 or k == 1:
        return x
    hi = 1 << (x.bit_length() // k + 1)
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**k <= x:
            lo = mid
        else:
            hi = mid
    return lo


def pair_universe_size(q: int, t: int, m: int) -> int:
    """``floor((q/(t-1)) ** (m/4))``: the pair-base size sampling supports."""
    if not (q >= t >= 2 and m >= 1):
        raise ValueError("need q >= t >= 2 and m >= 1")
    return isqrt(isqrt(q**m // (t - 1) ** m))


def lemma31_universe_size(r: int) -> int:
    """``floor(2 ** (r*r/24))``, the 3-color triple-base size for subset size r."""
    if r <= 3:
        raise ValueError("triple-base size needs r > 3")
    return iroot(1 << (r * r), 24)


def lemma33_universe_size(s: int) -> int:
    """``floor(2 ** (s/4))``, the 3-color pair-base size for subset size s."""
    if s <= 3:
        raise ValueError("pair-base size needs s > 3")
    return iroot(1 << s, 4)


@dataclass(frozen=True)
class FirstMoment:
    """Expected number of bad m-subsets for a uniformly random q-coloring of pairs.

    ``exact`` is C(U, m) * C(q, t-1) * ((t-1)/q) ** C(m, 2). The closed form
    q**(t-1) * (q/(t-1)) ** (-m*m/4) is irrational in general, so it is kept
    as its exact fourth power.
    """

    q: int
    t: int
    m: int
    universe_size: int
    exact: Fraction
    bound_fourth_power: Fraction

    @property
    def bound(self) -> mpmath.mpf:
        with mpmath.workdps(50):
            return mpmath.root(mpmath.mpf(self.bound_fourth_power.numerator)
                               / self.bound_fourth_power.denominator, 4)

    @property
    def exact_within_bound(self) -> bool:
        return self.exact**4 <= self.bound_fourth_power


def expected_bad_subsets(q: int, t: int, m: int, universe_size: int) -> FirstMoment:
    if not (q >= t >= 2 and m >= 1 and universe_size >= 0):
        raise ValueError("need q >= t >= 2, m >= 1, universe_size >= 0")
    rho = Fraction(q, t - 1)
    exact = comb(universe_size, m) * comb(q, t - 1) * (1 / rho) ** comb(m, 2)
    bound4 = Fraction(q) ** (4 * (t - 1)) * rho ** (-m * m)
    return FirstMoment(q, t, m, universe_size, exact, bound4)


def _first_moment_at(q: int, t: int, m: int) -> Fraction:
    return expected_bad_subsets(q, t, m, pair_universe_size(q, t, m)).exact


def min_m_for_bound(q: int, t: int) -> int:
    """Smallest m0 with expected bad subsets below 1 for every m >= m0.

    The scan stops once C(q,t-1) * rho**(m/2 - m*m/4) / m!, an upper bound on
    the first moment that is decreasing in m, drops below 1.
    """
    if not q >= t >= 2:
        raise ValueError("need q >= t >= 2")
    rho = Fraction(q, t - 1)
    last_bad = 0
    m = 1
    while True:
        if _first_moment_at(q, t, m) >= 1:
            last_bad = m
        # (tail bound)**4 < 1, exactly
        if Fraction(comb(q, t - 1)) ** 4 * rho ** (2 * m - m * m) < factorial(m) ** 4:
            return last_bad + 1
        m += 1


@dataclass(frozen=True)
class GenSpec:
    """A request for a coloring in which every ``subset_size``-subset of the
    universe shows at least ``required_colors`` colors."""

    kind: str
    universe_size: int
    num_colors: int
    subset_size: int
    required_colors: int
    seed: int = 0
    max_attempts: int = 10_000
    budget: int = DEFAULT_BUDGET
    allow_vacuous: bool = False

    @property
    def arity(self) -> int:
        return 2 if self.kind == "pair" else 3

    def validate(self) -> None:
        if self.kind not in ("pair", "triple"):
            raise ValueError(f"kind must be 'pair' or 'triple', not {self.kind!r}")
        if self.num_colors < 1 or self.required_colors < 1 or self.subset_size < 0:
            raise ValueError(f"bad parameters in {self}")
        if self.required_colors > self.num_colors:
            raise InfeasibleSpec(
                f"{self.required_colors} colors required but only {self.num_colors} available")
        if self.required_colors > comb(self.subset_size, self.arity):
            raise InfeasibleSpec(
                f"a {self.subset_size}-subset has only {comb(self.subset_size, self.arity)} "
                f"{self.kind}s, fewer than {self.required_colors}")
        if self.universe_size < self.subset_size and not self.allow_vacuous:
            raise InfeasibleSpec(
                f"universe of {self.universe_size} has no {self.subset_size}-subsets "
                "(property would hold vacuously)")
        needed = comb(self.universe_size, self.subset_size)
        if needed > self.budget:
            raise BudgetExceeded(needed, self.budget, "subset evaluations per attempt")


@lru_cache(maxsize=32)
def _lex_to_colex(n: int, arity: int) -> np.ndarray:
    rank = pair_rank if arity == 2 else triple_rank
    return np.fromiter((rank(*c) for c in itertools.combinations(range(n), arity)),
                       dtype=np.int64, count=comb(n, arity))


def random_colors(n: int, arity: int, q: int, seed: int) -> np.ndarray:
    """Colors drawn from SplitMix64(seed) in lexicographic order, stored colex."""
    rng = SplitMix64(seed)
    size = comb(n, arity)
    drawn = np.fromiter((rng.below(q) for _ in range(size)), dtype=np.int64, count=size)
    out = np.empty(size, dtype=np.int64)
    out[_lex_to_colex(n, arity)] = drawn
    return out


def is_good(table: np.ndarray, spec: GenSpec) -> bool:
    n, m = spec.universe_size, spec.subset_size
    if n < m:
        return True
    batches = _subsets.combination_batches(n, m, _subsets.batch_rows(m, spec.arity))
    _, _, bad = _subsets.scan(table, spec.arity, spec.num_colors, spec.required_colors,
                              batches, stop_at_first=True)
    return bad is None


def _attempt(args) -> np.ndarray | None:
    spec, k = args
    table = random_colors(spec.universe_size, spec.arity, spec.num_colors,
                          derive_seed(spec.seed, k))
    return table if is_good(table, spec) else None


def generate(spec: GenSpec, workers: int = 1) -> PairColoring | ExplicitTripleColoring:
    """First attempt (by attempt index) whose random coloring has the property.

    Attempt ``k`` uses seed ``derive_seed(spec.seed, k)``, so the result only
    depends on ``spec``, never on ``workers``.
    """
    spec.validate()
    cls = PairColoring if spec.arity == 2 else ExplicitTripleColoring
    step = max(1, workers)
    for start in range(0, spec.max_attempts, step):
        ks = range(start, min(start + step, spec.max_attempts))
        for table in _subsets.map_ordered(_attempt, [(spec, k) for k in ks], workers):
            if table is not None:
                return cls(spec.universe_size, spec.num_colors, table)
    raise AttemptsExhausted(
        f"no valid coloring in {spec.max_attempts} attempts for {spec}")
