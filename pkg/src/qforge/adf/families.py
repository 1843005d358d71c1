"""Almost-disjoint family constructors and certified family-level queries."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import NotAlmostDisjointError, ParameterError
from .certset import CertSet
from .ordinals import OrdinalIdx

MAX_COUNT = 512


@dataclass(frozen=True)
class FamilyGenerator:
    kind: str  # progression | branch | luzin | explicit
    count: int = 0
    depth: int = 4
    horizon: int = 1024
    seed: int = 0
    sets: tuple = ()

    def __post_init__(self):
        if self.kind not in ("progression", "branch", "luzin", "explicit"):
            raise ParameterError("unknown family kind %r" % self.kind)
        if self.kind != "explicit" and not (0 < self.count <= MAX_COUNT):
            raise ParameterError("count must be in [1, %d]" % MAX_COUNT)


@dataclass(frozen=True)
class Family:
    kind: str
    sets: tuple
    intersections: dict = field(default_factory=dict)  # (i, j) -> finite list
    luzin_bound: tuple = ()  # (check_horizon, L) with L(n) = n

    def __len__(self):
        return len(self.sets)

    def __getitem__(self, i):
        return self.sets[i]


def _pairwise_certificates(sets):
    certs = {}
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            certs[(i, j)] = sets[i].almost_disjoint(sets[j])
    return certs


def _progression_sets(count):
    """Dyadic valuation classes {n : v2(n) = i}, an exact partition of
    the positive naturals into progressions."""
    return [CertSet.ap(2 ** i, 2 ** (i + 1)) for i in range(count)]


def _branch_sets(count, depth):
    """Tree-branch style sets: the i-th set holds the prefix codes of the
    i-th length-`depth` binary word plus the arithmetic continuation of
    that word's residue class above the coding range."""
    if count > 2 ** depth:
        raise ParameterError("at most 2^depth branch words exist")
    sets = []
    for i in range(count):
        word = format(i, "0%db" % depth)
        prefixes = {2 ** (k + 1) + int(word[: k + 1], 2) for k in range(depth)}
        continuation = CertSet.ap(2 ** (depth + 1) + i, 2 ** depth)
        sets.append(continuation.union(CertSet.finite(prefixes)))
    return sets


def _luzin_sets(count):
    """Classical recursion: the alpha-th set is a fresh residue class plus
    one meeting point inside every earlier set, each pushed above the
    stage index so that meeting points below n exist for fewer than n
    earlier sets (the recorded bound L(n) = n)."""
    sets = []
    for alpha in range(count):
        picks = []
        prev = -1
        for beta in range(alpha):
            lo = max(alpha, beta, prev + 1)
            # least member of the beta-th base class at or above lo
            x = lo + ((beta - lo) % count)
            picks.append(x)
            prev = x
        base = CertSet.ap(alpha, count)
        sets.append(base.union(CertSet.finite(picks)))
    return sets


def make_family(gen: FamilyGenerator) -> Family:
    if gen.kind == "progression":
        sets = _progression_sets(gen.count)
    elif gen.kind == "branch":
        sets = _branch_sets(gen.count, gen.depth)
    elif gen.kind == "luzin":
        sets = _luzin_sets(gen.count)
    else:
        sets = [s if isinstance(s, CertSet) else CertSet.from_json_obj(s)
                for s in gen.sets]
    for s in sets:
        if not s.is_infinite():
            raise ParameterError("family members must be infinite")
    certs = _pairwise_certificates(sets)
    bound = ()
    if gen.kind == "luzin":
        horizon = min(gen.horizon, 64)
        verify_luzin_bound(sets, certs, horizon)
        bound = (horizon, "L(n) = n")
    return Family(gen.kind, tuple(sets), certs, bound)


def verify_luzin_bound(sets, certs, horizon):
    """Check the stage invariant: for every alpha and n <= horizon, at most
    n earlier sets meet the alpha-th set only below n."""
    from bisect import bisect_left

    for alpha in range(len(sets)):
        tops = sorted(max(certs[(beta, alpha)], default=-1)
                      for beta in range(alpha))
        for n in range(horizon + 1):
            if bisect_left(tops, n) > n:
                raise ParameterError(
                    "luzin invariant fails at stage %d, n=%d" % (alpha, n))


def almost_disjoint_check(a: CertSet, b: CertSet):
    """Exact finite intersection, or NotAlmostDisjointError with witness."""
    return a.almost_disjoint(b)


@dataclass(frozen=True)
class Separation:
    separator: CertSet
    inside_exceptions: tuple   # per B-family member: elements outside separator
    outside_exceptions: tuple  # per C-family member: elements inside separator


def separation_find(b_family, c_family) -> Separation:
    """A set almost containing every member of b_family and almost disjoint
    from every member of c_family, with both certificate directions."""
    v = CertSet.empty()
    for b in b_family:
        v = v.union(b)
    stray = CertSet.empty()
    for c in c_family:
        stray = stray.union(CertSet.finite(v.almost_disjoint(c)))
    v = v.diff(stray)
    inside = []
    for b in b_family:
        ok, exc = b.subset_star(v)
        if not ok:
            raise NotAlmostDisjointError("separator lost an infinite part")
        inside.append(tuple(exc))
    outside = []
    for c in c_family:
        outside.append(tuple(v.almost_disjoint(c)))
    return Separation(v, tuple(inside), tuple(outside))


@dataclass(frozen=True)
class MadCensus:
    infinite_meet: tuple       # indices with certified infinite intersection
    finite_meet: dict          # index -> exact finite intersection
    residual_finite: bool      # is X minus the union finite?
    residual: tuple            # the finite residual, when it is finite
    covering_indices: tuple    # minimal-by-scan subfamily almost covering X


def mad_census(family: Family, x: CertSet) -> MadCensus:
    infinite, finite = [], {}
    for i, a in enumerate(family.sets):
        try:
            finite[i] = tuple(a.almost_disjoint(x))
        except NotAlmostDisjointError:
            infinite.append(i)
    union = CertSet.empty()
    for a in family.sets:
        union = union.union(a)
    residual = x.diff(union)
    res_fin = not residual.is_infinite()
    # greedy scan: which members are needed to almost cover x
    covering = []
    rest = x
    for i in infinite:
        covering.append(i)
        rest = rest.diff(family.sets[i])
        if not rest.is_infinite():
            break
    if rest.is_infinite():
        covering = ()
    return MadCensus(tuple(infinite), finite, res_fin,
                     tuple(residual.finite_elements()) if res_fin else (),
                     tuple(covering))


class OrdinalProgressionFamily:
    """Closed-form family indexed by ordinals omega * q + r below
    omega * blocks: member (q, r) is the progression of points n with
    n = q mod cells whose quotient (n - q) / cells has dyadic valuation r.

    Designed so that the chain separators and the W-sets of the coherent
    recursion are exact: fibers A_xi minus W_xi equal A_xi on the nose.
    """

    def __init__(self, cells: int, blocks: int = 4, valuation_cap: int = 16):
        if cells < 1 or blocks < 1 or blocks > cells:
            raise ParameterError("need 1 <= blocks <= cells")
        self.cells = cells
        self.blocks = blocks
        self.valuation_cap = valuation_cap

    def _split(self, xi: OrdinalIdx, boundary=False):
        limit = self.blocks + (1 if boundary else 0)
        if xi.c2 > 0 or xi.c1 >= limit or (boundary and
                                           xi.c1 == self.blocks and xi.c0 > 0):
            raise ParameterError("index %s beyond the family window" % xi)
        return xi.c1, xi.c0  # (q, r)

    def member(self, xi: OrdinalIdx) -> CertSet:
        q, r = self._split(xi)
        if r > self.valuation_cap:
            raise ParameterError("valuation index beyond cap")
        k = self.cells
        return CertSet.ap(q + k * 2 ** r, k * 2 ** (r + 1))

    def fiber_set(self, xi: OrdinalIdx) -> CertSet:
        """A_xi minus W_xi; equal to A_xi exactly by construction."""
        return self.member(xi)

    def w_set(self, alpha: OrdinalIdx) -> CertSet:
        """Exact range of the coherent injection at stage alpha:
        full residue blocks below q, plus the first r valuation fibers."""
        q, r = self._split(alpha, boundary=True)
        k = self.cells
        w = CertSet.empty()
        for qq in range(q):
            w = w.union(CertSet.ap(k + qq, k))
        for i in range(r):
            w = w.union(self.member(OrdinalIdx(0, q, i)))
        return w

    def separator(self, alpha: OrdinalIdx) -> CertSet:
        """Chain set V_alpha: members below alpha are almost inside, members
        at or above alpha meet it finitely."""
        q, r = self._split(alpha, boundary=True)
        k = self.cells
        v = CertSet.empty()
        for qq in range(q):
            v = v.union(CertSet.ap(qq, k))
        for i in range(r):
            v = v.union(self.member(OrdinalIdx(0, q, i)))
        return v

    def index_of(self, value: int):
        """The unique xi with value in A_xi, or None."""
        q = value % self.cells
        if q >= self.blocks:
            return None
        m = (value - q) // self.cells
        if m <= 0:
            return None
        r = 0
        while m % 2 == 0:
            m //= 2
            r += 1
        if r > self.valuation_cap:
            return None
        return OrdinalIdx(0, q, r)
