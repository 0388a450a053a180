"""Stepping-up colorings of triples in which every n-subset shows many colors."""

from .core import (
    BinaryStepUp,
    ExplicitLeaf,
    ExplicitTripleColoring,
    MixedStepUp,
    PairColoring,
    Params,
    VerificationReport,
    VertexCode,
    digit,
    universe_size,
)

__version__ = "0.1.0"
