"""Subset color-count checks, delta property suites and witness extractors."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Sequence, Union

import numpy as np

from . import _subsets
from .core import (
    BinaryStepUp,
    ExplicitTripleColoring,
    MixedStepUp,
    PairColoring,
    TripleColoring,
    VerificationReport,
    VertexCode,
    as_lifted,
)
from .errors import (
    BudgetExceeded,
    ChainTooShort,
    InternalInvariantViolation,
    NotPowerOfTwo,
    OutOfUniverse,
    SubsetTooSmall,
)
from .stepup import (
    VECTOR_LIMIT,
    _delta_powers,
    _evaluate,
    chi_binary,
    evaluate_many,
    tabulate,
)

DEFAULT_BUDGET = 10**9
# full colex tables up to this many entries are built for sampling
TABLE_LIMIT = 1 << 25

Coloring = Union[TripleColoring, PairColoring]


def _arity(coloring: Coloring) -> int:
    return 2 if isinstance(coloring, PairColoring) else 3


def _size(coloring: Coloring) -> int:
    if isinstance(coloring, PairColoring):
        return coloring.num_vertices
    return coloring.universe_size


def _color_fn(coloring: Coloring):
    if isinstance(coloring, PairColoring):
        return coloring.color
    node = as_lifted(coloring)
    return lambda a, b, c: _evaluate(node, a, b, c)


def _check_subset(coloring: Coloring, subset: Sequence[int]) -> list[int]:
    vs = [int(v) for v in subset]
    arity = _arity(coloring)
    if len(vs) < arity:
        raise SubsetTooSmall(f"need at least {arity} vertices, got {len(vs)}")
    if any(a >= b for a, b in zip(vs, vs[1:])):
        raise ValueError("subset must be strictly increasing")
    if vs[0] < 0 or vs[-1] >= _size(coloring):
        raise OutOfUniverse(f"subset leaves the universe of size {_size(coloring)}")
    return vs


def min_colors(coloring: Coloring, subset: Sequence[int]) -> int:
    """Number of distinct colors on the pairs/triples inside ``subset``."""
    vs = _check_subset(coloring, subset)
    color = _color_fn(coloring)
    return len({color(*c) for c in itertools.combinations(vs, _arity(coloring))})


def induced_table(coloring: Coloring, vertices: Sequence[int]) -> np.ndarray:
    """Colex-ranked colors of the coloring restricted to ``vertices`` (sorted)."""
    arity = _arity(coloring)
    L = len(vertices)
    if isinstance(vertices, range) and vertices == range(_size(coloring)):
        if isinstance(coloring, PairColoring):
            return coloring.colors.astype(np.int64)
        if coloring.universe_size <= VECTOR_LIMIT:
            return tabulate(coloring)
    pos = np.array(list(itertools.combinations(range(L), arity)), dtype=np.int64).reshape(-1, arity)
    # combinations() is lexicographic; reorder to colex
    if arity == 2:
        ranks = pos[:, 1] * (pos[:, 1] - 1) // 2 + pos[:, 0]
    else:
        ranks = pos[:, 2] * (pos[:, 2] - 1) * (pos[:, 2] - 2) // 6 \
            + pos[:, 1] * (pos[:, 1] - 1) // 2 + pos[:, 0]
    out = np.empty(len(pos), dtype=np.int64)
    if _size(coloring) <= VECTOR_LIMIT:
        g = np.asarray([int(v) for v in vertices], dtype=np.int64)[pos]
        if arity == 2:
            a, b = g[:, 0], g[:, 1]
            out[ranks] = coloring.colors[b * (b - 1) // 2 + a]
        else:
            out[ranks] = evaluate_many(coloring, g[:, 0], g[:, 1], g[:, 2])
        return out
    vs = [int(v) for v in vertices]
    color = _color_fn(coloring)
    out[ranks] = [color(*(vs[i] for i in p)) for p in pos.tolist()]
    return out


def verify_exhaustive(coloring: Coloring, n: int, t: int,
                      universe_subset: Sequence[int] | None = None,
                      budget: int = DEFAULT_BUDGET, workers: int = 1,
                      stop_at_first: bool = False) -> VerificationReport:
    """Check that every n-subset of ``universe_subset`` shows at least t colors.

    Subsets are enumerated lexicographically, so the reported counterexample
    is the lexicographically smallest failing subset. Unless ``stop_at_first``
    is set every subset is checked and ``min_colors_seen`` is the true minimum.
    The budget counts color evaluations: C(L, n) * C(n, arity).
    """
    arity = _arity(coloring)
    if universe_subset is None:
        vertices = range(_size(coloring))
    else:
        vertices = sorted(int(v) for v in universe_subset)
        if len(set(vertices)) != len(vertices):
            raise ValueError("universe_subset has repeated vertices")
        if vertices and (vertices[0] < 0 or vertices[-1] >= _size(coloring)):
            raise OutOfUniverse("universe_subset leaves the universe")
    L = len(vertices)
    if n < arity:
        raise SubsetTooSmall(f"subset size {n} is below the arity {arity}")
    if L < n:
        raise ValueError(f"no {n}-subsets in {L} vertices")
    cost = comb(L, n) * comb(n, arity)
    if cost > budget:
        raise BudgetExceeded(cost, budget)
    table = induced_table(coloring, vertices)
    batches = _subsets.combination_batches(L, n, _subsets.batch_rows(n, arity))
    checked, low, bad = _subsets.scan(table, arity, coloring.num_colors, t, batches,
                                      workers=workers, stop_at_first=stop_at_first)
    cex = None if bad is None else tuple(vertices[i] for i in bad.tolist())
    return VerificationReport("exhaustive", checked, low, t, cex)


# Sampling.

def _sample_numpy(universe: int, n: int, rows: int, gen: np.random.Generator) -> np.ndarray:
    if n * n > universe and universe <= 1 << 16:
        # dense regime: rank random keys, rejection would rarely succeed
        keys = gen.random((rows, universe))
        return np.sort(np.argpartition(keys, n - 1, axis=1)[:, :n], axis=1).astype(np.int64)
    out = np.sort(gen.integers(0, universe, size=(rows, n), dtype=np.int64), axis=1)
    while True:
        dup = np.nonzero(np.any(out[:, 1:] == out[:, :-1], axis=1))[0]
        if dup.size == 0:
            return out
        out[dup] = np.sort(gen.integers(0, universe, size=(dup.size, n), dtype=np.int64), axis=1)


def _sample_python(universe: int, n: int, rng: random.Random) -> list[int]:
    while True:
        draw = [rng.randrange(universe) for _ in range(n)]
        if len(set(draw)) == n:
            return sorted(draw)


def _check_sampled_batch(args):
    coloring, table, subsets, t = args
    arity = _arity(coloring)
    if table is not None:
        counts = _subsets.count_colors(table, arity, subsets, coloring.num_colors)
    else:
        pos = _subsets._positions(subsets.shape[1], arity)
        tri = subsets[:, pos]
        colors = evaluate_many(coloring, tri[..., 0].ravel(), tri[..., 1].ravel(),
                               tri[..., 2].ravel()).reshape(len(subsets), -1)
        colors = np.sort(colors, axis=1)
        counts = 1 + np.count_nonzero(np.diff(colors, axis=1), axis=1)
    bad = np.nonzero(counts < t)[0]
    return len(subsets), int(counts.min()), int(bad[0]) if bad.size else None


def verify_sampled(coloring: Coloring, n: int, t: int, samples: int, seed: int,
                   workers: int = 1) -> VerificationReport:
    """Check ``samples`` uniformly random n-subsets; deterministic per seed.

    Subsets are drawn as n independent uniform vertices, redrawn whole when
    they collide, so every n-subset is equally likely.
    """
    universe = _size(coloring)
    arity = _arity(coloring)
    if n > universe:
        raise ValueError(f"cannot sample {n}-subsets of a {universe}-vertex universe")
    if n < arity:
        raise SubsetTooSmall(f"subset size {n} is below the arity {arity}")
    if samples < 1:
        raise ValueError("samples must be positive")

    table = None
    if comb(universe, arity) <= TABLE_LIMIT:
        table = induced_table(coloring, range(universe))
    if table is not None or universe <= VECTOR_LIMIT:
        gen = np.random.Generator(np.random.PCG64(seed))
        rows = _subsets.batch_rows(n, arity)

        def jobs():
            left = samples
            while left:
                k = min(rows, left)
                left -= k
                yield coloring, table, _sample_numpy(universe, n, k, gen), t

        return _collect(jobs(), workers, samples, t, seed)
    # big-integer universe: draw and evaluate one subset at a time
    rng = random.Random(seed)
    color = _color_fn(coloring)
    low, cex = None, None
    for _ in range(samples):
        sub = _sample_python(universe, n, rng)
        k = len({color(*c) for c in itertools.combinations(sub, arity)})
        low = k if low is None else min(low, k)
        if k < t and cex is None:
            cex = tuple(sub)
    return VerificationReport("sampled", samples, low, t, cex, seed)


def _collect(jobs, workers, samples, t, seed) -> VerificationReport:
    low, cex, kept = None, None, []

    def tracked():
        for job in jobs:
            kept.append(job[2])
            yield job

    for i, (rows, mn, bad) in enumerate(
            _subsets.map_ordered(_check_sampled_batch, tracked(), workers)):
        low = mn if low is None else min(low, mn)
        if bad is not None and cex is None:
            cex = tuple(int(v) for v in kept[i][bad])
        kept[i] = None
    return VerificationReport("sampled", samples, low, t, cex, seed)


# Chains and extractors.

@dataclass(frozen=True)
class Chain:
    """Strictly increasing vertices of one universe (radix ``radix``, ``num_digits`` digits)."""

    vertices: tuple[int, ...]
    radix: int = 2
    num_digits: int = 64

    def __post_init__(self):
        vs = tuple(int(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise ValueError("chain vertices must be strictly increasing")
        if vs and (vs[0] < 0 or vs[-1] >= self.radix**self.num_digits):
            raise OutOfUniverse("chain leaves the universe")

    @classmethod
    def of(cls, codes: Sequence[VertexCode]) -> "Chain":
        radix, digits = codes[0].radix, codes[0].num_digits
        return cls(tuple(c.value for c in codes), radix, digits)

    @classmethod
    def for_coloring(cls, vertices, lifted) -> "Chain":
        return cls(tuple(vertices), lifted.radix, lifted.num_digits)

    def __len__(self):
        return len(self.vertices)

    @cached_property
    def _powers(self) -> list[int]:
        return [self.radix**i for i in range(self.num_digits + 1)]

    def delta(self, i: int, j: int) -> int:
        """Delta of the vertices at positions ``i`` and ``j``."""
        u, v = self.vertices[i], self.vertices[j]
        if self.radix == 2:
            return (u ^ v).bit_length() - 1
        return _delta_powers(u, v, self._powers, self.num_digits)

    @cached_property
    def deltas(self) -> tuple[int, ...]:
        return tuple(self.delta(i, i + 1) for i in range(len(self.vertices) - 1))

    def reversed_view(self) -> "_Reversed":
        return _Reversed(self)


class _Reversed:
    """The chain read right to left; delta is symmetric so positions just flip."""

    def __init__(self, chain: Chain):
        self.chain = chain
        self.last = len(chain) - 1

    def __len__(self):
        return len(self.chain)

    def delta(self, i, j):
        return self.chain.delta(self.last - i, self.last - j)


@dataclass(frozen=True)
class StepdownResult:
    """Delta positions ``B`` and, per pair of their values, a realizing triple.

    ``witnesses`` maps ``(smaller delta, larger delta)`` to chain positions
    ``(i, j, k)`` with ``chi(v_i, v_j, v_k) = phi(pair)``.
    """

    chain: Chain
    positions: tuple[int, ...]
    witnesses: dict = field(default_factory=dict)

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(self.chain.deltas[p] for p in self.positions)


def stepdown_extract(chain: Chain, coloring: BinaryStepUp) -> StepdownResult:
    """For a chain of ``2**m`` vertices, find at least m deltas whose pairwise
    base colors are all realized by triples of the chain.

    Recurses on the side of the maximal delta holding more vertices (the left
    side on ties); every witness is checked against the lifted coloring.
    """
    L = len(chain)
    if L < 2 or L & (L - 1):
        raise NotPowerOfTwo(f"chain length {L} is not a power of two >= 2")
    if chain.radix != 2 or chain.num_digits != coloring.num_digits:
        raise ValueError("chain is not in the binary universe of this coloring")
    d = chain.deltas
    steps = []  # (position of the window maximum, witness layout for later positions)
    lo, hi = 0, L  # current vertex window [lo, hi)
    while hi - lo >= 2:
        window = d[lo:hi - 1]
        top = max(window)
        if window.count(top) != 1:
            raise InternalInvariantViolation(f"maximal delta {top} repeats in {window}")
        w = lo + window.index(top)
        if w - lo + 1 >= hi - w - 1:
            # keep v_lo..v_w; a later delta at r pairs with d[w] via (v_r, v_r+1, v_w+1)
            steps.append((w, lambda r, w=w: (r, r + 1, w + 1)))
            hi = w + 1
        else:
            steps.append((w, lambda r, w=w: (w, r, r + 1)))
            lo = w + 1
    positions = tuple(w for w, _ in steps)
    witnesses = {}
    for idx, (w, triple_of) in enumerate(steps):
        for r in positions[idx + 1:]:
            witnesses[tuple(sorted((d[w], d[r])))] = triple_of(r)
    base, vs = coloring.base, chain.vertices
    for (a, b), (i, j, k) in witnesses.items():
        if chi_binary(base, vs[i], vs[j], vs[k]) != base.color(a, b):
            raise InternalInvariantViolation(
                f"witness ({i}, {j}, {k}) does not realize the pair ({a}, {b})")
    return StepdownResult(chain, positions, witnesses)


def equal_delta_escape(chain, r: int, start: int = 0) -> int | None:
    """Smallest position ``w`` in ``start+1 .. start+r-1`` with
    ``delta(v_start, v_w) > delta(v_w, v_w+1)``; ``None`` when there is none.

    Positions are 0-based, so ``w`` is the (w-start+1)-th vertex of the block.
    """
    if len(chain) <= start + r:
        raise ChainTooShort(f"need more than {start + r} vertices, have {len(chain)}")
    for w in range(start + 1, start + r):
        if chain.delta(start, w) > chain.delta(w, w + 1):
            return w
    return None


@dataclass(frozen=True)
class FailureWitness:
    """Why a decreasing chain could not be extracted.

    ``reason`` is ``"no-escape"`` (``positions`` = the block with no escape,
    typically all deltas equal) or ``"not-decreasing"`` (``positions`` = the
    extracted subset whose delta sequence is not strictly decreasing).
    """

    reason: str
    positions: tuple[int, ...]


@dataclass(frozen=True)
class DecreasingChain:
    breakpoints: tuple[int, ...]
    subset_positions: tuple[int, ...]
    deltas: tuple[int, ...]


def decreasing_chain_extract(chain: Chain, r: int, s: int, mirrored: bool = False
                             ) -> DecreasingChain | FailureWitness:
    """Breakpoints ``w_1 < ... < w_{s-1}`` with strictly decreasing deltas
    ``delta(v_0, v_w1) > delta(v_w1, v_w2) > ... > delta(v_w{s-1}, v_w{s-1}+1)``.

    With ``mirrored`` the chain is read right to left, giving strictly
    increasing deltas instead. Positions in the result are 0-based indices
    into ``chain`` (sorted ascending).
    """
    L = len(chain)
    if s < 2 or r < 2:
        raise ValueError("need r >= 2 and s >= 2")
    if L < s * r:
        raise ChainTooShort(f"need {s * r} vertices, have {L}")
    view = chain.reversed_view() if mirrored else chain
    flip = (lambda p: L - 1 - p) if mirrored else (lambda p: p)
    ws, prev = [], 0
    for _ in range(s - 1):
        w = equal_delta_escape(view, r, start=prev)
        if w is None:
            block = sorted(flip(p) for p in range(prev, prev + r + 1))
            return FailureWitness("no-escape", tuple(block))
        ws.append(w)
        prev = w
    points = [0] + ws + [ws[-1] + 1]
    seq = tuple(view.delta(a, b) for a, b in zip(points, points[1:]))
    subset = tuple(sorted(flip(p) for p in points))
    if any(x <= y for x, y in zip(seq, seq[1:])):
        return FailureWitness("not-decreasing", subset)
    if mirrored:
        seq = seq[::-1]
    return DecreasingChain(tuple(sorted(flip(w) for w in ws)), subset, seq)


# Property suites.

def _universe_triples(size: int):
    for u in range(size):
        for v in range(u + 1, size):
            for w in range(v + 1, size):
                yield u, v, w


def _random_triple(rng: random.Random, size: int) -> tuple[int, int, int]:
    return tuple(_sample_python(size, 3, rng))


def property_suite(kind: str, radix: int, num_digits: int, mode: str = "exhaustive",
                   budget: int = DEFAULT_BUDGET, seed: int = 0, samples: int = 10**5,
                   max_chain: int = 32) -> VerificationReport:
    """Check Property I, II or III of the delta map; any violation fails.

    I: consecutive deltas of a triple differ (true in base 2 only).
    II: the delta of a chain's endpoints is the max of its consecutive deltas.
    III: a repeated delta position carries increasing digits.
    Exhaustive mode checks every triple (II reduces to triples by induction);
    sampled mode draws random triples, or random chains of length
    2..``max_chain`` for II.
    """
    if kind not in ("I", "II", "III"):
        raise ValueError(f"unknown property {kind!r}")
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if budget <= 0:
        raise ValueError("budget must be positive")
    size = radix**num_digits
    powers = [radix**i for i in range(num_digits + 1)]
    if radix == 2:
        def dl(a, b):
            return (a ^ b).bit_length() - 1
    else:
        def dl(a, b):
            return _delta_powers(a, b, powers, num_digits)

    def digit_at(v, i):
        return (v // powers[i]) % radix

    def bad_triple(u, v, w) -> bool:
        d1, d2 = dl(u, v), dl(v, w)
        if kind == "I":
            return d1 == d2
        if kind == "II":
            return dl(u, w) != max(d1, d2)
        return d1 == d2 and not digit_at(u, d1) < digit_at(v, d1) < digit_at(w, d1)

    label = f"property-{kind}"
    if mode == "exhaustive":
        total = comb(size, 3)
        if total > budget:
            raise BudgetExceeded(total, budget, "triples")
        if kind == "I" and radix == 2:
            checked, cex = _property_one_binary(size)
        else:
            checked, cex = 0, None
            for tri in _universe_triples(size):
                checked += 1
                if bad_triple(*tri):
                    cex = tri
                    break
        return VerificationReport("exhaustive", checked, None, None, cex, check=label)

    if samples > budget:
        raise BudgetExceeded(samples, budget, "samples")
    rng = random.Random(seed)
    cex = None
    for i in range(samples):
        if kind == "II":
            length = rng.randint(2, min(max_chain, size))
            chain = _sample_python(size, length, rng)
            consecutive = max(dl(a, b) for a, b in zip(chain, chain[1:]))
            if dl(chain[0], chain[-1]) != consecutive:
                cex = tuple(chain)
        else:
            tri = _random_triple(rng, size)
            if bad_triple(*tri):
                cex = tri
        if cex is not None:
            return VerificationReport("sampled", i + 1, None, None, cex, seed, label)
    return VerificationReport("sampled", samples, None, None, None, seed, label)


def _property_one_binary(size: int):
    checked = 0
    for u in range(size):
        for v in range(u + 1, size):
            duv = (u ^ v).bit_length()
            for w in range(v + 1, size):
                if (v ^ w).bit_length() == duv:
                    return checked + w - v, (u, v, w)
            checked += size - v - 1
    return checked, None
