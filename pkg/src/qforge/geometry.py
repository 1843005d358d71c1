"""Geometry of subspaces of finite-dimensional l_infty.

Norm quantities of maps between subspaces are exact: the sup of a
polyhedral convex function over a polyhedral unit ball is attained at a
vertex, and we reach that vertex with one exact LP per (deduped)
objective row instead of enumerating all vertices.  Every pipeline
output is verified before it is returned; no bound is claimed unchecked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from .errors import (
    ComplementNotFoundError,
    DimensionCapError,
    NormBudgetError,
    ParameterError,
    SingularMatrixError,
)
from .linalg import (
    ONE,
    ZERO,
    RMatrix,
    WindowVector,
    frac,
    invert,
    nullspace,
    op_norm_inf,
    rank,
    rref,
    solve_exact,
)
from .simplex import lp_min_l1, polyhedral_max

DEFAULT_DIM_CAP = 12


def _private_pivots(basis):
    """For each basis vector, a coordinate where it alone is nonzero, or
    None when no such system exists.  A full system certifies linear
    independence and yields a one-entry-per-row coefficient extractor
    without any elimination."""
    supports = [v.support() for v in basis]
    count = {}
    for s in supports:
        for i in s:
            count[i] = count.get(i, 0) + 1
    out = []
    for s in supports:
        priv = sorted(i for i in s if count[i] == 1)
        if not priv:
            return None
        out.append(priv[0])
    return out


def _disjoint_supports(vectors):
    seen = set()
    for v in vectors:
        s = v.support()
        if s & seen:
            return False
        seen |= s
    return True


@dataclass(frozen=True)
class Subspace:
    """Span of linearly independent vectors inside l_infty on [lo, hi)."""

    lo: int
    hi: int
    basis: tuple

    def __post_init__(self):
        basis = tuple(self.basis)
        for v in basis:
            if v.lo < self.lo or v.hi > self.hi:
                raise ParameterError("basis vector exceeds the ambient window")
        basis = tuple(v.restrict(self.lo, self.hi) for v in basis)
        if basis and _private_pivots(basis) is None:
            rows = [[v.value(i) for i in range(self.lo, self.hi)] for v in basis]
            if rank(rows) < len(basis):
                raise ParameterError("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def basis_matrix(self) -> RMatrix:
        """Columns are the basis vectors: coefficient space -> ambient."""
        return RMatrix.from_columns(list(self.basis))

    def combine(self, coeffs) -> WindowVector:
        out = WindowVector.zero(self.lo, self.hi)
        for c, v in zip(coeffs, self.basis):
            out = out.add(v.scale(c))
        return out

    def coefficients(self, v: WindowVector):
        """Coefficients of v in the basis, or None if v is outside the span."""
        rows = [[b.value(i) for b in self.basis] for i in range(self.lo, self.hi)]
        rhs = [v.value(i) for i in range(self.lo, self.hi)]
        return solve_exact(rows, rhs)

    def contains(self, v: WindowVector) -> bool:
        return self.coefficients(v) is not None

    def coordinate_rows(self):
        """Row i -> tuple of basis values at i; the coefficient-space
        constraint rows of the unit ball {x in span : |x|_inf <= 1}."""
        return [tuple(b.value(i) for b in self.basis)
                for i in range(self.lo, self.hi)]

    def coefficient_extractor(self) -> RMatrix:
        """A dim x n matrix E with E v = coefficients for every v in the span."""
        if not self.basis:
            return RMatrix(0, 0, self.lo, self.hi, {})
        pivots = _private_pivots(self.basis)
        if pivots is not None:
            rows = {k: {i: ONE / self.basis[k].value(i)}
                    for k, i in enumerate(pivots)}
            return RMatrix(0, self.dim, self.lo, self.hi, rows)
        bmat = self.basis_matrix()
        # pivot rows of the basis matrix give an invertible dim x dim minor
        _, pivots = rref([[b.value(i) for i in range(self.lo, self.hi)]
                          for b in self.basis])
        pivot_rows = [self.lo + c for c in pivots]
        sub = RMatrix.from_dense(
            [[bmat.get(i, k) for k in range(self.dim)] for i in pivot_rows])
        inv = invert(sub)
        rows = {}
        for k in range(self.dim):
            rows[k] = {i: inv.get(k, j) for j, i in enumerate(pivot_rows)
                       if inv.get(k, j) != 0}
        return RMatrix(0, self.dim, self.lo, self.hi, rows)


@dataclass(frozen=True)
class LinMap:
    """Linear map given by the images of the domain's basis vectors."""

    domain: Subspace
    images: tuple

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) != self.domain.dim:
            raise ParameterError("one image per domain basis vector required")
        if images:
            lohi = {(w.lo, w.hi) for w in images}
            if len(lohi) > 1:
                raise ParameterError("image windows differ")
        object.__setattr__(self, "images", images)

    @staticmethod
    def identity(space: Subspace) -> "LinMap":
        return LinMap(space, tuple(space.basis))

    def apply_coeffs(self, coeffs) -> WindowVector:
        if not self.images:
            return WindowVector.zero(0, 0)
        out = WindowVector.zero(self.images[0].lo, self.images[0].hi)
        for c, w in zip(coeffs, self.images):
            out = out.add(w.scale(c))
        return out

    def apply(self, v: WindowVector) -> WindowVector:
        coeffs = self.domain.coefficients(v)
        if coeffs is None:
            raise ParameterError("vector is outside the map's domain span")
        return self.apply_coeffs(coeffs)

    def image_rows(self):
        if not self.images:
            return []
        lo, hi = self.images[0].lo, self.images[0].hi
        return [tuple(w.value(i) for w in self.images) for i in range(lo, hi)]

    def image_subspace(self) -> Subspace:
        return Subspace(self.images[0].lo, self.images[0].hi, self.images)

    def scale(self, s) -> "LinMap":
        return LinMap(self.domain, tuple(w.scale(s) for w in self.images))

    def inverse(self) -> "LinMap":
        """The map sending image basis back; requires independent images."""
        return LinMap(self.image_subspace(), tuple(self.domain.basis))


@dataclass(frozen=True)
class ExtensionConfig:
    rho: Fraction = Fraction(4)
    c1: Fraction = Fraction(1)
    c2: Fraction = Fraction(64)
    delta: Fraction = Fraction(1, 100)
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        object.__setattr__(self, "rho", frac(self.rho))
        object.__setattr__(self, "c1", frac(self.c1))
        object.__setattr__(self, "c2", frac(self.c2))
        object.__setattr__(self, "delta", frac(self.delta))
        if self.rho <= 1:
            raise ParameterError("rho must exceed 1")
        if self.c2 < self.rho:
            raise ParameterError("c2 must be at least rho")
        if self.c1 <= 0 or self.delta <= 0:
            raise ParameterError("c1 and delta must be positive")


def _check_cap(dim, cap):
    if cap is not None and dim > cap:
        raise DimensionCapError("dimension %d exceeds cap %d" % (dim, cap))


def _ratio_extreme(t: LinMap, want_max: bool):
    """When both the basis and the images have pairwise disjoint supports
    the sup norm of any combination splits per basis vector, so the norm
    (resp. lower bound) is exactly the max (min) image/domain sup ratio."""
    best = None
    witness = None
    for v, w in zip(t.domain.basis, t.images):
        r = w.sup_norm() / v.sup_norm()
        if best is None or (r > best if want_max else r < best):
            best, witness = r, v.scale(ONE / v.sup_norm())
    return best, witness


def op_norm(t: LinMap, cap=DEFAULT_DIM_CAP):
    """(norm, witness vector in the domain attaining it)."""
    if t.domain.dim == 0:
        return ZERO, WindowVector.zero(t.domain.lo, t.domain.hi)
    if _disjoint_supports(t.domain.basis) and _disjoint_supports(t.images):
        return _ratio_extreme(t, want_max=True)
    _check_cap(t.domain.dim, cap)
    val, coeffs, _ = polyhedral_max(t.image_rows(), t.domain.coordinate_rows())
    return val, t.domain.combine(coeffs)


def lower_bound(t: LinMap, cap=DEFAULT_DIM_CAP):
    """(largest r with r|x| <= |Tx| on the domain, witness x attaining it).

    Equals 1 / max{|x|_inf : |Tx|_inf <= 1}; that max is a polyhedral
    sup over the image-coefficient unit ball, one exact LP per row.
    Returns 0 when T has a kernel.
    """
    d = t.domain.dim
    if d == 0:
        return ZERO, WindowVector.zero(t.domain.lo, t.domain.hi)
    if _disjoint_supports(t.domain.basis) and _disjoint_supports(t.images):
        return _ratio_extreme(t, want_max=False)
    _check_cap(d, cap)
    image_rows = t.image_rows()
    if rank([list(r) for r in image_rows]) < d:
        ker = nullspace([list(r) for r in image_rows], d)
        return ZERO, t.domain.combine(ker[0])
    val, coeffs, _ = polyhedral_max(t.domain.coordinate_rows(), image_rows)
    return ONE / val, t.domain.combine(coeffs)


def distortion(t: LinMap, cap=DEFAULT_DIM_CAP) -> Fraction:
    """|T| * |T^-1|; infinite (raises) only through lower_bound = 0."""
    up, _ = op_norm(t, cap)
    low, _ = lower_bound(t, cap)
    if low == 0:
        raise SingularMatrixError("map has a kernel; distortion is infinite")
    return up / low


def hahn_banach_extend(y: Subspace, phi_values, cap=None):
    """Norm-preserving extension of the functional phi given on y's basis.

    Returns (u, value): the l1 representer u on the ambient window with
    <u, v_k> = phi(v_k) exactly and |u|_1 equal to the dual norm of phi
    on y (LP duality for the l1-minimal interpolant).
    """
    _check_cap(y.dim, cap)
    phi_values = [frac(p) for p in phi_values]
    if len(phi_values) != y.dim:
        raise ParameterError("one value per basis vector required")
    if y.dim == 0:
        return WindowVector.zero(y.lo, y.hi), ZERO
    a = RMatrix.from_rows_vectors(list(y.basis))
    b = WindowVector(0, y.dim, tuple(phi_values))
    return lp_min_l1(a, b)


def dual_norm(y: Subspace, phi_values, vertex_cap=6) -> Fraction:
    """Independent dual-norm computation by vertex enumeration of the
    unit ball of y in coefficient space; used as a cross-check oracle."""
    from .polytope import vertex_enumerate

    phi_values = [frac(p) for p in phi_values]
    if y.dim == 0 or all(p == 0 for p in phi_values):
        return ZERO
    verts = vertex_enumerate(y.coordinate_rows(), dim=y.dim, cap=vertex_cap)
    return max(abs(sum(c * p for c, p in zip(v, phi_values))) for v in verts)


def build_projection(y: Subspace, s: LinMap | None = None) -> RMatrix:
    """Projection of the ambient l_infty^n onto y, as an n x n matrix.

    Built from norm-preserving extensions of the coordinates of the
    witness map s (default: v_k -> e_k); verified idempotent and
    identity on y before returning.
    """
    return _projection_parts(y, s)[0]


def _projection_parts(y: Subspace, s: LinMap | None = None):
    """(projection matrix, functional rows): the projection is
    B . S^-1 . Psi, and its kernel equals the joint kernel of the h rows
    of Psi, which is far cheaper to compute than a dense nullspace of
    the full n x n matrix."""
    h = y.dim
    if s is None:
        s = LinMap(y, tuple(WindowVector.unit(0, h, k) for k in range(h)))
    if s.domain is not y and s.domain.basis != y.basis:
        raise ParameterError("witness map must be defined on y's basis")
    if not s.images:
        return RMatrix(y.lo, y.hi, y.lo, y.hi, {}), []
    w_lo, w_hi = s.images[0].lo, s.images[0].hi
    if w_hi - w_lo != h:
        raise ParameterError("witness map must land in an h-dimensional window")
    smat = RMatrix.from_dense([[w.value(i) for w in s.images]
                               for i in range(w_lo, w_hi)])
    sinv = invert(smat)  # raises SingularMatrixError when s is not a witness
    # row j of psi is the l1-minimal extension of the j-th coordinate of s
    psi_rows = []
    for j in range(w_lo, w_hi):
        u, _ = hahn_banach_extend(y, [w.value(j) for w in s.images])
        psi_rows.append(u)
    psi = RMatrix.from_rows_vectors(psi_rows)
    bmat = y.basis_matrix()
    p = bmat.matmul(sinv).matmul(psi)
    if not p.matmul(p).equals(p):
        raise NormBudgetError("projection failed idempotence check")
    for v in y.basis:
        if p.apply(v).coords != v.restrict(y.lo, y.hi).coords:
            raise NormBudgetError("projection does not fix the subspace")
    return p, psi_rows


def kernel_subspace(p: RMatrix, lo: int, hi: int) -> Subspace:
    """Kernel of an idempotent matrix p on [lo, hi), as a Subspace."""
    rows = [[p.get(i, j) for j in range(lo, hi)] for i in range(lo, hi)]
    basis = [WindowVector(lo, hi, tuple(vec)) for vec in nullspace(rows, hi - lo)]
    return Subspace(lo, hi, tuple(basis))


def kernel_of_functionals(rows, lo: int, hi: int) -> Subspace:
    """Joint kernel of a few functionals on [lo, hi), as a Subspace."""
    dense = [[r.value(i) for i in range(lo, hi)] for r in rows]
    basis = [WindowVector(lo, hi, tuple(vec)) for vec in nullspace(dense, hi - lo)]
    return Subspace(lo, hi, tuple(basis))


def _canonical_basis_order(basis):
    return sorted(basis, key=lambda v: (min(v.support(), default=v.hi), v.coords))


def _verified(q: LinMap, budget, cap):
    up, _ = op_norm(q, cap)
    low, _ = lower_bound(q, cap)
    if low > 0 and up / low <= budget * budget:
        return q
    return None


def complement_iso(z1: Subspace, z2: Subspace, budget, cap=DEFAULT_DIM_CAP):
    """A verified isomorphism q: z1 -> z2 with |q| |q^-1| <= budget^2.

    Deterministic staged search: (0) equal spans -> identity; (1)
    disjointly supported bases -> sup-ratio matching, an exact isometry;
    (2) greedy sign-pattern matching of normalized bases; (3) exhaustive
    scaled bijections at small dimension.  Every candidate is verified
    exactly before acceptance.
    """
    budget = frac(budget)
    if z1.dim != z2.dim:
        raise ParameterError("complement dimensions differ")
    if z1.dim == 0:
        return LinMap(z1, ())
    _check_cap(z1.dim, cap)

    # stage 0: identical spans (containment solves a dense system per
    # vector, so only attempt it at small dimension)
    if z1.dim <= 12 and all(z2.contains(v) for v in z1.basis):
        q = _verified(LinMap.identity(z1), budget, cap)
        if q is not None:
            return q

    b1 = _canonical_basis_order(z1.basis)
    b2 = _canonical_basis_order(z2.basis)
    dom = Subspace(z1.lo, z1.hi, tuple(b1))

    def disjoint(basis):
        seen = set()
        for v in basis:
            s = v.support()
            if s & seen:
                return False
            seen |= s
        return True

    # stage 1: disjoint supports both sides -> isometric sup-ratio matching
    if disjoint(b1) and disjoint(b2):
        images = tuple(w.scale(v.sup_norm() / w.sup_norm())
                       for v, w in zip(b1, b2))
        q = _verified(LinMap(dom, images), budget, cap)
        if q is not None:
            return q

    # stage 2: greedy sign-pattern matching of sup-normalized bases
    def pattern(v):
        return tuple(1 if v.value(i) > 0 else (-1 if v.value(i) < 0 else 0)
                     for i in range(v.lo, v.hi))

    remaining = list(range(len(b2)))
    images = []
    for v in b1:
        pv = pattern(v)
        pick = None
        for idx in remaining:
            if pattern(b2[idx]) in (pv, tuple(-s for s in pv)):
                pick = idx
                break
        if pick is None:
            pick = remaining[0]
        remaining.remove(pick)
        w = b2[pick]
        sign = ONE if pattern(w) == pv or pv == tuple(0 for _ in pv) else -ONE
        images.append(w.scale(sign * v.sup_norm() / w.sup_norm()))
    q = _verified(LinMap(dom, tuple(images)), budget, cap)
    if q is not None:
        return q

    # stage 3: exhaustive scaled bijections (small dimension only)
    if z1.dim <= 4:
        from itertools import permutations, product
        for perm in permutations(range(len(b2))):
            for signs in product((ONE, -ONE), repeat=len(b2)):
                images = tuple(
                    b2[perm[k]].scale(signs[k] * b1[k].sup_norm()
                                      / b2[perm[k]].sup_norm())
                    for k in range(len(b1)))
                q = _verified(LinMap(dom, images), budget, cap)
                if q is not None:
                    return q
    raise ComplementNotFoundError(
        "no complement isomorphism within budget %s found" % budget)


def rational_sqrt_upper(x: Fraction, delta: Fraction) -> Fraction:
    """A rational s with sqrt(x) <= s <= (1 + delta) sqrt(x), verified."""
    x = frac(x)
    delta = frac(delta)
    if x < 0:
        raise ParameterError("negative argument")
    if x == 0:
        return ZERO
    p, q = x.numerator, x.denominator
    if isqrt(p) ** 2 == p and isqrt(q) ** 2 == q:
        return Fraction(isqrt(p), isqrt(q))
    k = 1
    while True:
        p, q = x.numerator, x.denominator
        s = Fraction(isqrt(p * q * k * k) + 1, q * k)
        if s * s <= (1 + delta) * (1 + delta) * x:
            return s
        k *= 2


def balanced_rescale(q: LinMap, delta=Fraction(1, 100), cap=DEFAULT_DIM_CAP):
    """Scale q so both |sq| and |(sq)^-1| are near sqrt(|q| |q^-1|).

    s is a rational upper approximation of sqrt(|q^-1| / |q|); the
    postcondition max(|sq|, |(sq)^-1|)^2 <= (1+delta)^2 |q| |q^-1| is
    verified exactly before returning.
    """
    a, _ = op_norm(q, cap)
    low, _ = lower_bound(q, cap)
    if a == 0 or low == 0:
        raise ParameterError("balanced_rescale requires an invertible map")
    b = ONE / low
    s = rational_sqrt_upper(b / a, delta)
    r = q.scale(s)
    ra, _ = op_norm(r, cap)
    rlow, _ = lower_bound(r, cap)
    bound = (1 + frac(delta)) ** 2 * a * b
    if ra * ra > bound or (ONE / rlow) ** 2 > bound:
        raise NormBudgetError("rescale verification failed", measured=(ra, ONE / rlow))
    return r


def _partial_matrix(image_cols, coeff_extractor, lo, hi) -> RMatrix:
    """(columns of images) . (coefficient extractor), as an n x n matrix."""
    if not image_cols:
        return RMatrix(lo, hi, lo, hi, {})
    bmat = RMatrix.from_columns(list(image_cols))
    m = bmat.matmul(coeff_extractor)
    return RMatrix(lo, hi, lo, hi, dict(m.rows))


@dataclass(frozen=True)
class ExtensionResult:
    w: RMatrix
    w_inv: RMatrix
    norm_w: Fraction
    norm_w_inv: Fraction
    report: dict = field(default_factory=dict)


def extend_isomorphism(t: LinMap, s1: LinMap | None = None,
                       s2: LinMap | None = None,
                       config: ExtensionConfig | None = None) -> ExtensionResult:
    """Extend the isomorphism t: y1 -> y2 to a verified automorphism of
    the ambient space: w = t on y1, |w|, |w^-1| <= c2, all entries
    rational, inverse returned alongside and checked by multiplication.
    """
    config = config or ExtensionConfig()
    y1 = t.domain
    h = y1.dim
    n = y1.hi - y1.lo
    if any(not (y1.lo <= i < y1.hi) for w in t.images for i in w.support()):
        raise ParameterError("domain and image must share the ambient window")
    t = LinMap(y1, tuple(w.restrict(y1.lo, y1.hi) for w in t.images))
    y2 = Subspace(y1.lo, y1.hi, t.images)  # raises if images are dependent
    if h * h > config.c1 * config.c1 * n:
        raise ParameterError("subspace dimension exceeds c1 * sqrt(n)")
    cap = config.dim_cap
    report = {}

    for name, m in (("T", t), ("S1", s1), ("S2", s2)):
        if m is None:
            continue
        d = distortion(m, cap)
        report["distortion_%s" % name] = d
        up, _ = op_norm(m, cap)
        low, _ = lower_bound(m, cap)
        if up >= config.rho or ONE / low >= config.rho:
            raise NormBudgetError(
                "%s norms must stay below rho" % name, measured=(up, ONE / low))

    p1, psi1 = _projection_parts(y1, s1)
    p2, psi2 = _projection_parts(y2, s2)
    report["norm_P1"] = op_norm_inf(p1)
    report["norm_P2"] = op_norm_inf(p2)
    eye = RMatrix.identity(y1.lo, y1.hi)
    # ker P = ker(S^-1 Psi) = ker Psi: h functionals instead of an n x n
    # elimination
    z1 = kernel_of_functionals(psi1, y1.lo, y1.hi)
    z2 = kernel_of_functionals(psi2, y1.lo, y1.hi)
    if z1.dim == 0:
        r = LinMap(z1, ())
    else:
        q = complement_iso(z1, z2, config.rho, cap)
        report["distortion_Q"] = distortion(q, cap)
        r = balanced_rescale(q, config.delta, cap)

    # w = t . P_{y1} + r . P_{z1}; P_{z1} = I - P_{y1}
    ext1 = y1.coefficient_extractor()
    extz1 = r.domain.coefficient_extractor()
    pz1 = eye.sub(p1)
    w = _partial_matrix(t.images, ext1.matmul(p1), y1.lo, y1.hi).add(
        _partial_matrix(r.images, extz1.matmul(pz1), y1.lo, y1.hi))

    # w^-1 = t^-1 . P_{y2} + r^-1 . P_{z2}, built symbolically
    ext_ty = Subspace(y1.lo, y1.hi, tuple(t.images)).coefficient_extractor()
    ext_rz = Subspace(y1.lo, y1.hi, tuple(r.images)).coefficient_extractor()
    pz2 = eye.sub(p2)
    w_inv = _partial_matrix(y1.basis, ext_ty.matmul(p2), y1.lo, y1.hi).add(
        _partial_matrix(r.domain.basis, ext_rz.matmul(pz2), y1.lo, y1.hi))

    if not w.matmul(w_inv).equals(eye) or not w_inv.matmul(w).equals(eye):
        raise NormBudgetError("extension inverse verification failed")
    for v, img in zip(y1.basis, t.images):
        if w.apply(v).coords != img.restrict(y1.lo, y1.hi).coords:
            raise NormBudgetError("extension does not agree with t on the basis")
    norm_w = op_norm_inf(w)
    norm_w_inv = op_norm_inf(w_inv)
    if norm_w > config.c2 or norm_w_inv > config.c2:
        raise NormBudgetError("extension norm exceeds c2",
                              measured=(norm_w, norm_w_inv))
    return ExtensionResult(w, w_inv, norm_w, norm_w_inv, report)
