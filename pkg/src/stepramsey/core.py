"""Domain types: vertex codes, explicit colorings and construction trees.

Vertices are plain Python ints throughout the hot paths; :class:`VertexCode`
is the explicit digit view used at API boundaries. Colors are 0-based.
Explicit colorings store one color per pair/triple, indexed by colex rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Callable, Iterator, Union

import numpy as np

from .errors import OutOfUniverse


def pair_rank(i: int, j: int) -> int:
    """Colex rank of the pair ``i < j``."""
    return j * (j - 1) // 2 + i


def triple_rank(i: int, j: int, k: int) -> int:
    """Colex rank of the triple ``i < j < k``."""
    return k * (k - 1) * (k - 2) // 6 + j * (j - 1) // 2 + i


def _color_dtype(q: int):
    if q <= 1 << 8:
        return np.uint8
    if q <= 1 << 16:
        return np.uint16
    return np.uint32


def _freeze(colors, size: int, q: int, what: str) -> np.ndarray:
    arr = np.asarray(colors)
    if arr.shape != (size,):
        raise ValueError(f"{what}: expected {size} colors, got shape {arr.shape}")
    if size and (arr.min() < 0 or arr.max() >= q):
        raise ValueError(f"{what}: colors must lie in [0, {q})")
    arr = arr.astype(_color_dtype(q), copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Params:
    """Instance parameters ``(n, q, t)``: every n-subset must show t colors."""

    n: int
    q: int
    t: int

    def __post_init__(self):
        if not (self.n > self.t >= 2 and self.q >= self.t):
            raise ValueError(f"need n > t >= 2 and q >= t, got {self}")

    @property
    def theorem_scope(self) -> bool:
        return self.n > self.q >= self.t >= 2

    def satisfiable_on(self, arity: int) -> bool:
        return self.t <= comb(self.n, arity)


@dataclass(frozen=True)
class VertexCode:
    """A natural number together with its base-``radix`` digit expansion."""

    value: int
    radix: int
    num_digits: int

    def __post_init__(self):
        if self.radix < 2:
            raise ValueError("radix must be at least 2")
        if self.num_digits < 0 or not 0 <= self.value < self.radix**self.num_digits:
            raise OutOfUniverse(
                f"{self.value} does not fit in {self.num_digits} base-{self.radix} digits"
            )

    def digit(self, i: int) -> int:
        return digit(self, i)

    def digits(self) -> list[int]:
        """Digits, least significant first."""
        out = []
        v = self.value
        for _ in range(self.num_digits):
            v, d = divmod(v, self.radix)
            out.append(d)
        return out

    @classmethod
    def from_digits(cls, digits, radix: int) -> "VertexCode":
        value = 0
        for d in reversed(digits):
            if not 0 <= d < radix:
                raise ValueError(f"digit {d} outside base {radix}")
            value = value * radix + d
        return cls(value, radix, len(digits))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value


def digit(v: VertexCode, i: int) -> int:
    """The ``i``-th base-``radix`` digit of ``v`` (0 = least significant)."""
    if not 0 <= i < v.num_digits:
        raise IndexError(f"digit index {i} outside [0, {v.num_digits})")
    return (v.value // v.radix**i) % v.radix


@dataclass(frozen=True, eq=False)
class PairColoring:
    """A ``num_colors``-coloring of the pairs of ``{0..num_vertices-1}``."""

    num_vertices: int
    num_colors: int
    colors: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.num_vertices < 0 or self.num_colors < 1:
            raise ValueError("need num_vertices >= 0 and num_colors >= 1")
        object.__setattr__(
            self, "colors",
            _freeze(self.colors, comb(self.num_vertices, 2), self.num_colors, "pair coloring"),
        )

    arity = 2

    def color(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError(f"pair coloring queried on the diagonal ({i}, {i})")
        if i > j:
            i, j = j, i
        if i < 0 or j >= self.num_vertices:
            raise OutOfUniverse(f"pair ({i}, {j}) outside {{0..{self.num_vertices - 1}}}")
        return int(self.colors[pair_rank(i, j)])

    @classmethod
    def from_function(cls, num_vertices: int, num_colors: int,
                      fn: Callable[[int, int], int]) -> "PairColoring":
        colors = np.empty(comb(num_vertices, 2), dtype=np.int64)
        for i, j in itertools.combinations(range(num_vertices), 2):
            colors[pair_rank(i, j)] = fn(i, j)
        return cls(num_vertices, num_colors, colors)

    @classmethod
    def constant(cls, num_vertices: int, num_colors: int, color: int = 0) -> "PairColoring":
        return cls(num_vertices, num_colors, np.full(comb(num_vertices, 2), color))

    def items(self) -> Iterator[tuple[tuple[int, int], int]]:
        """``((i, j), color)`` in lexicographic pair order."""
        for i, j in itertools.combinations(range(self.num_vertices), 2):
            yield (i, j), int(self.colors[pair_rank(i, j)])

    def __eq__(self, other):
        if not isinstance(other, PairColoring):
            return NotImplemented
        return (self.num_vertices, self.num_colors) == (other.num_vertices, other.num_colors) \
            and np.array_equal(self.colors, other.colors)

    def __hash__(self):
        return hash((2, self.num_vertices, self.num_colors, self.colors.tobytes()))


@dataclass(frozen=True, eq=False)
class ExplicitTripleColoring:
    """A ``num_colors``-coloring of the triples of ``{0..num_vertices-1}``."""

    num_vertices: int
    num_colors: int
    colors: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.num_vertices < 0 or self.num_colors < 1:
            raise ValueError("need num_vertices >= 0 and num_colors >= 1")
        object.__setattr__(
            self, "colors",
            _freeze(self.colors, comb(self.num_vertices, 3), self.num_colors, "triple coloring"),
        )

    arity = 3

    @property
    def universe_size(self) -> int:
        return self.num_vertices

    def color(self, a: int, b: int, c: int) -> int:
        i, j, k = sorted((a, b, c))
        if i == j or j == k:
            raise ValueError(f"triple ({a}, {b}, {c}) has repeated vertices")
        if i < 0 or k >= self.num_vertices:
            raise OutOfUniverse(f"triple ({a}, {b}, {c}) outside {{0..{self.num_vertices - 1}}}")
        return int(self.colors[triple_rank(i, j, k)])

    @classmethod
    def from_function(cls, num_vertices: int, num_colors: int,
                      fn: Callable[[int, int, int], int]) -> "ExplicitTripleColoring":
        colors = np.empty(comb(num_vertices, 3), dtype=np.int64)
        for i, j, k in itertools.combinations(range(num_vertices), 3):
            colors[triple_rank(i, j, k)] = fn(i, j, k)
        return cls(num_vertices, num_colors, colors)

    def items(self) -> Iterator[tuple[tuple[int, int, int], int]]:
        for i, j, k in itertools.combinations(range(self.num_vertices), 3):
            yield (i, j, k), int(self.colors[triple_rank(i, j, k)])

    def with_palette(self, num_colors: int) -> "ExplicitTripleColoring":
        """Same colors, declared over a larger palette."""
        return ExplicitTripleColoring(self.num_vertices, num_colors, self.colors)

    def __eq__(self, other):
        if not isinstance(other, ExplicitTripleColoring):
            return NotImplemented
        return (self.num_vertices, self.num_colors) == (other.num_vertices, other.num_colors) \
            and np.array_equal(self.colors, other.colors)

    def __hash__(self):
        return hash((3, self.num_vertices, self.num_colors, self.colors.tobytes()))


# Construction tree nodes.

@dataclass(frozen=True)
class ExplicitLeaf:
    triple_coloring: ExplicitTripleColoring

    @property
    def num_colors(self) -> int:
        return self.triple_coloring.num_colors

    @property
    def universe_size(self) -> int:
        return self.triple_coloring.num_vertices


@dataclass(frozen=True)
class BinaryStepUp:
    """Triples of ``{0..2^M-1}`` colored by the base color of their two deltas."""

    base: PairColoring

    @property
    def num_colors(self) -> int:
        return self.base.num_colors

    @property
    def num_digits(self) -> int:
        return self.base.num_vertices

    radix = 2

    @cached_property
    def universe_size(self) -> int:
        return 1 << self.base.num_vertices


@dataclass(frozen=True)
class MixedStepUp:
    """Triples of ``{0..N3^N2-1}``, digits in base ``N3 = triple_base.universe_size``.

    Colors 0-2 and 3-5 come from the 3-coloring ``pair_base`` of delta pairs
    (decreasing resp. increasing deltas); colors from 6 on are the triple-base
    color of the digits at a repeated delta position, shifted by 6.
    """

    pair_base: PairColoring
    triple_base: "LiftedColoring"

    def __post_init__(self):
        if self.pair_base.num_colors != 3:
            raise ValueError(
                f"mixed step-up needs a 3-color pair base, got {self.pair_base.num_colors}")
        if self.triple_base.num_colors < 3:
            raise ValueError("mixed step-up needs a triple base with at least 3 colors")
        if self.triple_base.universe_size < 2:
            raise ValueError("mixed step-up needs a triple base on at least 2 vertices")

    @property
    def num_colors(self) -> int:
        return self.triple_base.num_colors + 6

    @property
    def num_digits(self) -> int:
        return self.pair_base.num_vertices

    @property
    def radix(self) -> int:
        return self.triple_base.universe_size

    @cached_property
    def powers(self) -> tuple[int, ...]:
        """``radix**i`` for ``i`` in ``0..num_digits``."""
        p, out = 1, []
        for _ in range(self.num_digits + 1):
            out.append(p)
            p *= self.radix
        return tuple(out)

    @cached_property
    def universe_size(self) -> int:
        return self.radix**self.num_digits


LiftedColoring = Union[ExplicitLeaf, BinaryStepUp, MixedStepUp]
TripleColoring = Union[ExplicitLeaf, BinaryStepUp, MixedStepUp, ExplicitTripleColoring]


def universe_size(lifted: TripleColoring) -> int:
    """Exact number of vertices the coloring is defined on."""
    return lifted.universe_size


def as_lifted(coloring: TripleColoring) -> LiftedColoring:
    if isinstance(coloring, ExplicitTripleColoring):
        return ExplicitLeaf(coloring)
    return coloring


def tree_depth(lifted: LiftedColoring) -> int:
    if isinstance(lifted, MixedStepUp):
        return 1 + tree_depth(lifted.triple_base)
    return 0


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a subset or property check.

    ``counterexample`` holds vertex values (strictly increasing) of the first
    failing subset in enumeration/sampling order, or the violating tuple of a
    property check.
    """

    mode: str
    subsets_checked: int
    min_colors_seen: int | None
    required_colors: int | None = None
    counterexample: tuple[int, ...] | None = None
    seed: int | None = None
    check: str = "colors"

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def counterexample_codes(self, radix: int, num_digits: int) -> list[VertexCode]:
        return [VertexCode(v, radix, num_digits) for v in self.counterexample or ()]

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "mode": self.mode,
            "passed": self.passed,
            "subsets_checked": self.subsets_checked,
            "min_colors_seen": self.min_colors_seen,
            "required_colors": self.required_colors,
            "counterexample": None if self.counterexample is None
            else [str(v) for v in self.counterexample],
            "seed": self.seed,
        }
