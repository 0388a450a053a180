"""Ground truth at micro scale: tabulating lifted colorings and deciding small
instances of the subset color property by exhaustive backtracking."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .core import (
    ExplicitTripleColoring,
    LiftedColoring,
    PairColoring,
    as_lifted,
    pair_rank,
    triple_rank,
)
from .errors import BudgetExceeded, InternalInvariantViolation, UniverseTooLarge
from .stepup import _evaluate, tabulate
from .verify import verify_exhaustive

DEFAULT_LIMIT = 512


def materialize(lifted: LiftedColoring, limit: int = DEFAULT_LIMIT) -> ExplicitTripleColoring:
    """Explicit table of a lifted coloring, computed with the vectorized evaluator."""
    node = as_lifted(lifted)
    if node.universe_size > limit:
        raise UniverseTooLarge(f"universe of {node.universe_size} exceeds the limit {limit}")
    return ExplicitTripleColoring(node.universe_size, node.num_colors, tabulate(node))


def disagreements(lifted: LiftedColoring, explicit: ExplicitTripleColoring,
                  max_report: int = 10) -> tuple[int, list]:
    """Compare every triple of ``explicit`` against scalar evaluation of ``lifted``.

    Returns the number of mismatching triples and up to ``max_report`` of them.
    """
    node = as_lifted(lifted)
    if node.universe_size != explicit.num_vertices:
        raise ValueError("colorings live on different universes")
    colors = explicit.colors
    count, bad = 0, []
    for i, j, k in itertools.combinations(range(explicit.num_vertices), 3):
        got = _evaluate(node, i, j, k)
        if got != colors[triple_rank(i, j, k)]:
            count += 1
            if len(bad) < max_report:
                bad.append(((i, j, k), got, int(colors[triple_rank(i, j, k)])))
    return count, bad


@dataclass(frozen=True)
class SearchResult:
    status: str  # "sat" or "unsat"
    witness: PairColoring | ExplicitTripleColoring | None
    nodes: int

    @property
    def sat(self) -> bool:
        return self.status == "sat"


def brute_force_search(N: int, q: int, t: int, n: int, arity: int = 3,
                       budget: int = 10**7, color_order=None) -> SearchResult:
    """Decide whether some q-coloring of the ``arity``-sets of ``{0..N-1}``
    gives every n-subset at least t colors.

    Backtracking assigns colors to items in colex order and tests a subset as
    soon as its last item is colored. Color symmetry is broken by only ever
    opening the next unused color of ``color_order`` (default ``0..q-1``), so
    the first witness found is the least one in that order. ``budget`` caps
    the number of color assignments tried.
    """
    if arity not in (2, 3):
        raise ValueError("arity must be 2 or 3")
    order = list(range(q)) if color_order is None else list(color_order)
    if sorted(order) != list(range(q)):
        raise ValueError("color_order must be a permutation of range(q)")
    rank = pair_rank if arity == 2 else triple_rank
    cls = PairColoring if arity == 2 else ExplicitTripleColoring
    size = comb(N, arity)
    if n > N:
        return SearchResult("sat", cls(N, q, np.zeros(size, dtype=np.int64)), 0)

    # subsets grouped by the colex-last of their items
    closing: list[list[list[int]]] = [[] for _ in range(size)]
    for sub in itertools.combinations(range(N), n):
        items = [rank(*c) for c in itertools.combinations(sub, arity)]
        closing[max(items)].append(items)

    col = [0] * size
    nodes = 0

    def place(k: int, used: int) -> bool:
        nonlocal nodes
        if k == size:
            return True
        for slot in range(min(used + 1, q)):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(nodes, budget, "search nodes")
            col[k] = order[slot]
            if all(len({col[i] for i in items}) >= t for items in closing[k]):
                if place(k + 1, max(used, slot + 1)):
                    return True
        return False

    if not place(0, 0):
        return SearchResult("unsat", None, nodes)
    witness = cls(N, q, np.array(col, dtype=np.int64))
    if N >= n and not verify_exhaustive(witness, n, t).passed:
        raise InternalInvariantViolation("search witness failed re-verification")
    return SearchResult("sat", witness, nodes)


@dataclass(frozen=True)
class ExactF:
    """Largest Sat universe found by scanning N = n, n+1, ...

    ``first_unsat`` is None when the scan hit ``N_max`` first, in which case
    ``value`` is only a lower bound.
    """

    value: int
    witness: PairColoring | ExplicitTripleColoring | None
    first_unsat: int | None


def exact_f_micro(q: int, t: int, n: int, N_max: int, budget: int = 10**7,
                  arity: int = 3) -> ExactF:
    last = None
    for N in range(n, N_max + 1):
        res = brute_force_search(N, q, t, n, arity, budget)
        if not res.sat:
            return ExactF(N - 1, last, N)
        if last is not None:
            # monotone in N: the new witness restricted to N-1 vertices stays valid
            prefix = res.witness.colors[:comb(N - 1, arity)]
            cls = type(res.witness)
            if N - 1 >= n and not verify_exhaustive(cls(N - 1, q, prefix), n, t).passed:
                raise InternalInvariantViolation("restriction of a witness failed")
        last = res.witness
    return ExactF(N_max, last, None)
