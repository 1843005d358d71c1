"""qforge: exact rational linear algebra, decidable sequence-space
geometry, certified almost-disjoint combinatorics and a finite forcing
poset that assembles verified block-diagonal matrices."""

__version__ = "0.1.0"
