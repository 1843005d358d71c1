"""Certified almost-disjoint set combinatorics."""
