#!/usr/bin/env python3
"""Geometry demo: norm-preserving functional extension and automorphism
extension on a small window, everything exact."""

import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from qforge.geometry import (
    LinMap,
    Subspace,
    extend_isomorphism,
    hahn_banach_extend,
    op_norm,
)
from qforge.linalg import WindowVector, op_norm_inf


def main():
    n = 6
    v1 = WindowVector(0, n, (1, 1, 0, 0, 0, 0))
    v2 = WindowVector(0, n, (0, 0, 1, Fraction(1, 2), 0, 0))
    y = Subspace(0, n, (v1, v2))

    u, value = hahn_banach_extend(y, [1, Fraction(1, 2)])
    print("functional extension representer:", u.coords)
    print("dual norm (exact):", value, "= l1 norm", u.l1_norm())

    images = (WindowVector(0, n, (0, 0, 0, 0, 1, 1)),
              WindowVector(0, n, (1, Fraction(1, 2), 0, 0, 0, 0)))
    t = LinMap(y, images)
    norm, witness = op_norm(t)
    print("map norm:", norm, "attained at", witness.coords)

    ext = extend_isomorphism(t)
    print("automorphism norms:", ext.norm_w, ext.norm_w_inv)
    print("independent recheck:", op_norm_inf(ext.w), op_norm_inf(ext.w_inv))
    return 0


if __name__ == "__main__":
    sys.exit(main())
