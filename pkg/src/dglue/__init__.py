"""Exact computation of Donaldson structure series and genus-2 fiber sums."""

from .exppoly import ExpElement, ExpMatrix, GaussRat, parse, render
from .kmseries import Lattice, ManifoldDescriptor, StructureSeries

__version__ = "0.1.0"

__all__ = [
    "ExpElement", "ExpMatrix", "GaussRat", "parse", "render",
    "Lattice", "ManifoldDescriptor", "StructureSeries",
]
