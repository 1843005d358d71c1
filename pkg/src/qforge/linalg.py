"""Exact rational vectors and matrices on integer index windows.

Everything is a pure function over immutable values; scalars are
`fractions.Fraction` throughout and no operation ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ParameterError, SingularMatrixError

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints / strings like ``"3/4"`` to Fraction, exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise ParameterError("floats are not allowed; pass ints, Fractions or 'p/q' strings")
    return Fraction(x)


@dataclass(frozen=True)
class WindowVector:
    """Rational coordinates on a half-open window [lo, hi)."""

    lo: int
    hi: int
    coords: tuple

    def __post_init__(self):
        if self.hi < self.lo:
            raise ParameterError("window [%d, %d) is inverted" % (self.lo, self.hi))
        if len(self.coords) != self.hi - self.lo:
            raise ParameterError("coordinate count does not match window length")
        object.__setattr__(self, "coords", tuple(frac(c) for c in self.coords))

    @staticmethod
    def zero(lo: int, hi: int) -> "WindowVector":
        return WindowVector(lo, hi, (ZERO,) * (hi - lo))

    @staticmethod
    def unit(lo: int, hi: int, index: int) -> "WindowVector":
        coords = [ZERO] * (hi - lo)
        coords[index - lo] = ONE
        return WindowVector(lo, hi, tuple(coords))

    def value(self, i: int) -> Fraction:
        if self.lo <= i < self.hi:
            return self.coords[i - self.lo]
        return ZERO

    def sup_norm(self) -> Fraction:
        return max((abs(c) for c in self.coords), default=ZERO)

    def l1_norm(self) -> Fraction:
        return sum((abs(c) for c in self.coords), ZERO)

    def support(self) -> frozenset:
        return frozenset(i for i in range(self.lo, self.hi) if self.value(i) != 0)

    def restrict(self, lo: int, hi: int) -> "WindowVector":
        return WindowVector(lo, hi, tuple(self.value(i) for i in range(lo, hi)))

    def scale(self, s) -> "WindowVector":
        s = frac(s)
        return WindowVector(self.lo, self.hi, tuple(s * c for c in self.coords))

    def add(self, other: "WindowVector") -> "WindowVector":
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return WindowVector(lo, hi, tuple(self.value(i) + other.value(i) for i in range(lo, hi)))

    def sub(self, other: "WindowVector") -> "WindowVector":
        return self.add(other.scale(-1))

    def dot(self, other: "WindowVector") -> Fraction:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return sum((self.value(i) * other.value(i) for i in range(lo, hi)), ZERO)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


@dataclass(frozen=True)
class BlockLayout:
    """Strictly increasing cut points n_0 < ... < n_K."""

    cuts: tuple

    def __post_init__(self):
        cuts = tuple(int(c) for c in self.cuts)
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ParameterError("cut points must be strictly increasing")
        object.__setattr__(self, "cuts", cuts)

    def blocks(self):
        return list(zip(self.cuts, self.cuts[1:]))


@dataclass(frozen=True)
class RMatrix:
    """Sparse rational matrix on row window x column window.

    ``rows`` maps a row index to {col: nonzero Fraction}; missing entries
    are zero.  Instances are never mutated after construction.
    """

    row_lo: int
    row_hi: int
    col_lo: int
    col_hi: int
    rows: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for i, row in self.rows.items():
            if not (self.row_lo <= i < self.row_hi):
                raise ParameterError("row index %d outside window" % i)
            r = {}
            for j, v in row.items():
                if not (self.col_lo <= j < self.col_hi):
                    raise ParameterError("col index %d outside window" % j)
                v = frac(v)
                if v != 0:
                    r[j] = v
            if r:
                clean[i] = r
        object.__setattr__(self, "rows", clean)

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_dense(entries: Sequence[Sequence], row_lo=0, col_lo=0) -> "RMatrix":
        entries = [list(r) for r in entries]
        n = len(entries)
        m = len(entries[0]) if entries else 0
        rows = {}
        for i, r in enumerate(entries):
            if len(r) != m:
                raise ParameterError("ragged rows")
            rows[row_lo + i] = {col_lo + j: frac(v) for j, v in enumerate(r) if frac(v) != 0}
        return RMatrix(row_lo, row_lo + n, col_lo, col_lo + m, rows)

    @staticmethod
    def identity(lo: int, hi: int) -> "RMatrix":
        return RMatrix(lo, hi, lo, hi, {i: {i: ONE} for i in range(lo, hi)})

    @staticmethod
    def from_columns(cols: Sequence[WindowVector], col_lo=0) -> "RMatrix":
        if not cols:
            raise ParameterError("no columns")
        lo, hi = cols[0].lo, cols[0].hi
        rows = {}
        for j, c in enumerate(cols):
            if (c.lo, c.hi) != (lo, hi):
                raise ParameterError("column windows differ")
            for i in range(lo, hi):
                v = c.value(i)
                if v != 0:
                    rows.setdefault(i, {})[col_lo + j] = v
        return RMatrix(lo, hi, col_lo, col_lo + len(cols), rows)

    @staticmethod
    def from_rows_vectors(rws: Sequence[WindowVector], row_lo=0) -> "RMatrix":
        if not rws:
            raise ParameterError("no rows")
        lo, hi = rws[0].lo, rws[0].hi
        rows = {}
        for i, r in enumerate(rws):
            if (r.lo, r.hi) != (lo, hi):
                raise ParameterError("row windows differ")
            d = {j: r.value(j) for j in range(lo, hi) if r.value(j) != 0}
            if d:
                rows[row_lo + i] = d
        return RMatrix(row_lo, row_lo + len(rws), lo, hi, rows)

    # -- queries ------------------------------------------------------
    @property
    def n_rows(self) -> int:
        return self.row_hi - self.row_lo

    @property
    def n_cols(self) -> int:
        return self.col_hi - self.col_lo

    def get(self, i: int, j: int) -> Fraction:
        return self.rows.get(i, {}).get(j, ZERO)

    def row_vector(self, i: int) -> WindowVector:
        return WindowVector(self.col_lo, self.col_hi,
                            tuple(self.get(i, j) for j in range(self.col_lo, self.col_hi)))

    def col_vector(self, j: int) -> WindowVector:
        return WindowVector(self.row_lo, self.row_hi,
                            tuple(self.get(i, j) for i in range(self.row_lo, self.row_hi)))

    def to_dense(self):
        return [[self.get(i, j) for j in range(self.col_lo, self.col_hi)]
                for i in range(self.row_lo, self.row_hi)]

    def is_square(self) -> bool:
        return (self.row_lo, self.row_hi) == (self.col_lo, self.col_hi)

    # -- algebra ------------------------------------------------------
    def apply(self, v: WindowVector) -> WindowVector:
        coords = []
        for i in range(self.row_lo, self.row_hi):
            row = self.rows.get(i, {})
            coords.append(sum((a * v.value(j) for j, a in row.items()), ZERO))
        return WindowVector(self.row_lo, self.row_hi, tuple(coords))

    def matmul(self, other: "RMatrix") -> "RMatrix":
        if (self.col_lo, self.col_hi) != (other.row_lo, other.row_hi):
            raise ParameterError("inner windows do not match")
        rows = {}
        for i, row in self.rows.items():
            acc = {}
            for j, a in row.items():
                orow = other.rows.get(j)
                if not orow:
                    continue
                for k, b in orow.items():
                    acc[k] = acc.get(k, ZERO) + a * b
            acc = {k: v for k, v in acc.items() if v != 0}
            if acc:
                rows[i] = acc
        return RMatrix(self.row_lo, self.row_hi, other.col_lo, other.col_hi, rows)

    def add(self, other: "RMatrix") -> "RMatrix":
        if (self.row_lo, self.row_hi, self.col_lo, self.col_hi) != \
           (other.row_lo, other.row_hi, other.col_lo, other.col_hi):
            raise ParameterError("windows do not match")
        rows = {}
        for i in set(self.rows) | set(other.rows):
            acc = dict(self.rows.get(i, {}))
            for j, v in other.rows.get(i, {}).items():
                acc[j] = acc.get(j, ZERO) + v
            acc = {j: v for j, v in acc.items() if v != 0}
            if acc:
                rows[i] = acc
        return RMatrix(self.row_lo, self.row_hi, self.col_lo, self.col_hi, rows)

    def scale(self, s) -> "RMatrix":
        s = frac(s)
        if s == 0:
            return RMatrix(self.row_lo, self.row_hi, self.col_lo, self.col_hi, {})
        return RMatrix(self.row_lo, self.row_hi, self.col_lo, self.col_hi,
                       {i: {j: s * v for j, v in row.items()} for i, row in self.rows.items()})

    def sub(self, other: "RMatrix") -> "RMatrix":
        return self.add(other.scale(-1))

    def equals(self, other: "RMatrix") -> bool:
        return (self.row_lo, self.row_hi, self.col_lo, self.col_hi) == \
               (other.row_lo, other.row_hi, other.col_lo, other.col_hi) and \
               self.rows == other.rows


def op_norm_inf(m: RMatrix) -> Fraction:
    """l_inf -> l_inf operator norm: the max l1-norm over rows."""
    best = ZERO
    for row in m.rows.values():
        s = sum((abs(v) for v in row.values()), ZERO)
        if s > best:
            best = s
    return best


def invert(m: RMatrix) -> RMatrix:
    """Exact inverse by rational Gaussian elimination; raises SingularMatrixError."""
    if not m.is_square():
        raise ParameterError("invert requires a square window matrix")
    n = m.n_rows
    if n == 0:
        return RMatrix(m.row_lo, m.row_hi, m.col_lo, m.col_hi, {})
    a = m.to_dense()
    inv = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular at column %d" % col)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            inv[col], inv[piv] = inv[piv], inv[col]
        p = a[col][col]
        if p != 1:
            a[col] = [x / p for x in a[col]]
            inv[col] = [x / p for x in inv[col]]
        for r in range(n):
            if r == col or a[r][col] == 0:
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return RMatrix.from_dense(inv, row_lo=m.row_lo, col_lo=m.col_lo)


def block_compose(blocks: Sequence[RMatrix], layout: BlockLayout) -> RMatrix:
    """Assemble a block-diagonal matrix from square blocks on layout intervals."""
    intervals = layout.blocks()
    if len(blocks) != len(intervals):
        raise ParameterError("block count does not match layout")
    rows = {}
    for b, (lo, hi) in zip(blocks, intervals):
        if (b.row_lo, b.row_hi, b.col_lo, b.col_hi) != (lo, hi, lo, hi):
            raise ParameterError("block window does not match layout interval [%d, %d)" % (lo, hi))
        for i, row in b.rows.items():
            rows[i] = dict(row)
    lo, hi = layout.cuts[0], layout.cuts[-1]
    return RMatrix(lo, hi, lo, hi, rows)


# -- dense helpers on lists of Fraction lists -------------------------

def rref(rows: list) -> tuple:
    """Reduced row echelon form. Returns (rref_rows, pivot_columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(rows)) if rows[k][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [x - f * y for x, y in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(rows: list) -> int:
    return len(rref(rows)[1])


def nullspace(rows: list, ncols: int) -> list:
    """Basis (list of Fraction lists) of the nullspace of the row system."""
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [ZERO] * ncols
        vec[f] = ONE
        for r, p in enumerate(pivots):
            vec[p] = -red[r][f]
        basis.append(vec)
    return basis


def solve_exact(rows: list, rhs: list):
    """One exact solution of the row system (rows)x = rhs, or None."""
    if not rows:
        return [] if all(v == 0 for v in rhs) else None
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    for r in red:
        if all(x == 0 for x in r[:ncols]) and r[ncols] != 0:
            return None
    sol = [ZERO] * ncols
    for r, p in enumerate(pivots):
        if p == ncols:
            return None
        sol[p] = red[r][ncols]
    return sol
