"""Exact vertex enumeration for symmetric polytopes {x : |r_j . x| <= 1}.

Every vertex is the unique solution of d active constraints at levels
+-1, so we enumerate d-subsets of the deduped rows and sign vectors.
This is exponential in the dimension, hence the hard cap; larger
problems should go through :func:`qforge.simplex.polyhedral_max`,
which reaches the optimal vertex by pivoting instead.
"""

from __future__ import annotations

from itertools import combinations, product

from .errors import DimensionCapError, UnboundedError
from .linalg import ONE, rank, solve_exact
from .simplex import _dedup_rows

DEFAULT_DIM_CAP = 6


def vertex_enumerate(constraint_rows, dim=None, cap=DEFAULT_DIM_CAP):
    """All vertices of {x : |row . x| <= 1 for each constraint row}.

    Returns a deterministically sorted list of coordinate tuples.
    Raises UnboundedError when the rows are rank deficient and
    DimensionCapError above the dimension cap.
    """
    rows = _dedup_rows(constraint_rows)
    if dim is None:
        if not rows:
            raise UnboundedError("no constraint rows")
        dim = len(rows[0])
    if dim > cap:
        raise DimensionCapError(
            "vertex enumeration capped at dimension %d (asked for %d)" % (cap, dim))
    if rank([list(r) for r in rows]) < dim:
        raise UnboundedError("constraint rows are rank deficient; the ball is unbounded")
    verts = set()
    for subset in combinations(range(len(rows)), dim):
        sub = [list(rows[i]) for i in subset]
        if rank(sub) < dim:
            continue
        # fixing the first active level to +1 halves the search; -x is
        # added alongside x below since the polytope is symmetric
        for signs in product((ONE, -ONE), repeat=dim - 1):
            sol = solve_exact(sub, [ONE] + list(signs))
            if sol is None:
                continue
            x = tuple(sol)
            if any(abs(sum(a * b for a, b in zip(r, x))) > 1 for r in rows):
                continue
            verts.add(x)
            verts.add(tuple(-v for v in x))
    return sorted(verts)
