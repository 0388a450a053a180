"""RLC1 coloring files and JSON construction-tree files.

RLC1 is line based ASCII with LF newlines::

    RLC1 <pair|triple> <N> <q>
    <i> <j> <c>            (pairs, lexicographic order)
    <i> <j> <k> <c>        (triples, lexicographic order)

A tree file is a JSON object with ``type`` in ``explicit``, ``binary_stepup``,
``mixed_stepup``. Explicit colorings are either inlined or referenced by path
(relative to the tree file) together with the SHA-256 of the referenced file,
so a tree can detect that its base was regenerated underneath it.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from math import comb
from pathlib import Path
from typing import Union

import numpy as np

from .core import (
    BinaryStepUp,
    ExplicitLeaf,
    ExplicitTripleColoring,
    LiftedColoring,
    MixedStepUp,
    PairColoring,
    pair_rank,
    triple_rank,
)
from .errors import FormatError

MAGIC = "RLC1"
TREE_FORMAT = "stepramsey-tree/1"

ExplicitColoring = Union[PairColoring, ExplicitTripleColoring]


def dumps_rlc1(coloring: ExplicitColoring) -> str:
    kind = "pair" if isinstance(coloring, PairColoring) else "triple"
    lines = [f"{MAGIC} {kind} {coloring.num_vertices} {coloring.num_colors}"]
    for verts, c in coloring.items():
        lines.append(" ".join(map(str, verts)) + f" {c}")
    return "\n".join(lines) + "\n"


def loads_rlc1(text: str) -> ExplicitColoring:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty RLC1 input")
    header = lines[0].split(" ")
    if len(header) != 4 or header[0] != MAGIC or header[1] not in ("pair", "triple"):
        raise FormatError(f"bad RLC1 header: {lines[0]!r}")
    kind = header[1]
    try:
        n, q = int(header[2]), int(header[3])
    except ValueError:
        raise FormatError(f"bad RLC1 header: {lines[0]!r}") from None
    if n < 0 or q < 1:
        raise FormatError(f"bad RLC1 header: {lines[0]!r}")
    arity = 2 if kind == "pair" else 3
    body = lines[1:]
    if len(body) != comb(n, arity):
        raise FormatError(f"expected {comb(n, arity)} {kind} lines, found {len(body)}")
    rank = pair_rank if arity == 2 else triple_rank
    colors = np.empty(len(body), dtype=np.int64)
    for lineno, (expected, line) in enumerate(
            zip(itertools.combinations(range(n), arity), body), start=2):
        parts = line.split(" ")
        if len(parts) != arity + 1 or not all(p.isdigit() for p in parts):
            raise FormatError(f"line {lineno}: malformed entry {line!r}")
        verts = tuple(int(p) for p in parts[:arity])
        if verts != expected:
            raise FormatError(f"line {lineno}: expected {expected}, found {verts}")
        c = int(parts[-1])
        if c >= q:
            raise FormatError(f"line {lineno}: color {c} >= q = {q}")
        colors[rank(*verts)] = c
    if arity == 2:
        return PairColoring(n, q, colors)
    return ExplicitTripleColoring(n, q, colors)


def write_rlc1(coloring: ExplicitColoring, path) -> str:
    """Write ``coloring`` to ``path``; returns the file's SHA-256."""
    data = dumps_rlc1(coloring).encode("ascii")
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def read_rlc1(path) -> ExplicitColoring:
    try:
        text = Path(path).read_bytes().decode("ascii")
    except UnicodeDecodeError:
        raise FormatError(f"{path}: not ASCII") from None
    return loads_rlc1(text)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# Tree files.

def _explicit_to_obj(coloring: ExplicitColoring) -> dict:
    return {
        "kind": "pair" if isinstance(coloring, PairColoring) else "triple",
        "num_vertices": coloring.num_vertices,
        "num_colors": coloring.num_colors,
        "colors": [c for _, c in coloring.items()],
    }


def _explicit_from_obj(obj: dict) -> ExplicitColoring:
    try:
        kind, n, q, lex = obj["kind"], obj["num_vertices"], obj["num_colors"], obj["colors"]
    except KeyError as e:
        raise FormatError(f"inline coloring missing field {e}") from None
    if kind not in ("pair", "triple"):
        raise FormatError(f"unknown coloring kind {kind!r}")
    arity = 2 if kind == "pair" else 3
    rank = pair_rank if arity == 2 else triple_rank
    if len(lex) != comb(n, arity):
        raise FormatError(f"inline {kind} coloring needs {comb(n, arity)} colors")
    colors = np.empty(len(lex), dtype=np.int64)
    for verts, c in zip(itertools.combinations(range(n), arity), lex):
        colors[rank(*verts)] = c
    try:
        if arity == 2:
            return PairColoring(n, q, colors)
        return ExplicitTripleColoring(n, q, colors)
    except ValueError as e:
        raise FormatError(str(e)) from None


def _load_ref(ref, base_dir: Path, want: str) -> ExplicitColoring:
    if isinstance(ref, str):
        ref = {"path": ref}
    if not isinstance(ref, dict):
        raise FormatError(f"bad coloring reference {ref!r}")
    if "path" in ref:
        path = base_dir / ref["path"]
        if not path.exists():
            raise FormatError(f"referenced file {path} does not exist")
        if "sha256" in ref and sha256_file(path) != ref["sha256"]:
            raise FormatError(f"{path}: content hash mismatch (stale base?)")
        coloring = read_rlc1(path)
    else:
        coloring = _explicit_from_obj(ref)
    got = "pair" if isinstance(coloring, PairColoring) else "triple"
    if got != want:
        raise FormatError(f"expected a {want} coloring, got {got}")
    return coloring


def tree_to_obj(lifted: LiftedColoring, refs: dict | None = None) -> dict:
    """JSON-compatible form of a construction tree.

    ``refs`` maps ``id()`` of explicit colorings to ``{"path", "sha256"}``
    references; anything not listed is inlined.
    """
    refs = refs or {}

    def ref(c):
        return refs.get(id(c)) or _explicit_to_obj(c)

    if isinstance(lifted, ExplicitLeaf):
        body = {"type": "explicit", "base": ref(lifted.triple_coloring)}
    elif isinstance(lifted, BinaryStepUp):
        body = {"type": "binary_stepup", "base": ref(lifted.base)}
    elif isinstance(lifted, MixedStepUp):
        body = {
            "type": "mixed_stepup",
            "pair_base": ref(lifted.pair_base),
            "triple_base": tree_to_obj(lifted.triple_base, refs),
        }
    else:
        raise TypeError(f"not a construction tree: {type(lifted).__name__}")
    body["num_colors"] = lifted.num_colors
    body["universe_size"] = str(lifted.universe_size)
    return body


def tree_from_obj(obj, base_dir=".") -> LiftedColoring:
    base_dir = Path(base_dir)
    if isinstance(obj, str) or (isinstance(obj, dict) and "type" not in obj):
        # a bare RLC1 reference stands for an explicit leaf
        return ExplicitLeaf(_load_ref(obj, base_dir, "triple"))
    if not isinstance(obj, dict):
        raise FormatError(f"bad tree node {obj!r}")
    kind = obj["type"]
    try:
        if kind == "explicit":
            node = ExplicitLeaf(_load_ref(obj["base"], base_dir, "triple"))
        elif kind == "binary_stepup":
            node = BinaryStepUp(_load_ref(obj["base"], base_dir, "pair"))
        elif kind == "mixed_stepup":
            node = MixedStepUp(_load_ref(obj["pair_base"], base_dir, "pair"),
                               tree_from_obj(obj["triple_base"], base_dir))
        else:
            raise FormatError(f"unknown tree node type {kind!r}")
    except KeyError as e:
        raise FormatError(f"tree node {kind!r} missing field {e}") from None
    except ValueError as e:
        raise FormatError(str(e)) from None
    if "num_colors" in obj and obj["num_colors"] != node.num_colors:
        raise FormatError(f"declared num_colors {obj['num_colors']} != {node.num_colors}")
    if "universe_size" in obj and int(obj["universe_size"]) != node.universe_size:
        raise FormatError("declared universe_size does not match the tree")
    return node


def dumps_tree(lifted: LiftedColoring, refs: dict | None = None) -> str:
    obj = {"format": TREE_FORMAT, **tree_to_obj(lifted, refs)}
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def loads_tree(text: str, base_dir=".") -> LiftedColoring:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"tree file is not valid JSON: {e}") from None
    return tree_from_obj(obj, base_dir)


def write_tree(lifted: LiftedColoring, path, refs: dict | None = None) -> None:
    Path(path).write_text(dumps_tree(lifted, refs), encoding="ascii", newline="\n")


def read_tree(path) -> LiftedColoring:
    path = Path(path)
    return loads_tree(path.read_text(encoding="ascii"), path.parent)


def read_coloring(path):
    """Load either an RLC1 file or a tree file, sniffing the first bytes."""
    path = Path(path)
    try:
        head = path.read_bytes()[:4]
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e}") from None
    if head == MAGIC.encode():
        return read_rlc1(path)
    return read_tree(path)
