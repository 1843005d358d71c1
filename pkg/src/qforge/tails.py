"""Decidable semantics for bounded sequences modulo vanishing sequences.

The certified class is "finite rational prefix + eventually periodic
tail".  It is closed under linear combinations (align prefixes, take the
lcm of periods), so limsup norms, eventual-equality classes and the
window searches below are all exact finite computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import NotInjectiveError, NotInvertibleError, ParameterError
from .linalg import ONE, ZERO, WindowVector, frac, rank
from .simplex import polyhedral_max


def _minimal_period(pattern):
    n = len(pattern)
    for p in range(1, n + 1):
        if n % p == 0 and all(pattern[i] == pattern[i % p] for i in range(n)):
            return pattern[:p]
    return pattern


@dataclass(frozen=True)
class TailVector:
    """prefix on [0, m), then the period pattern repeated forever.

    Canonical form: minimal period, shortest prefix (trailing prefix
    entries that already match the rotated pattern are absorbed), so
    structural equality coincides with pointwise equality.
    """

    prefix: tuple
    period: tuple

    def __post_init__(self):
        prefix = [frac(c) for c in self.prefix]
        period = [frac(c) for c in self.period]
        if not period:
            raise ParameterError("period pattern must be nonempty")
        period = list(_minimal_period(tuple(period)))
        while prefix and prefix[-1] == period[-1]:
            prefix.pop()
            period = [period[-1]] + period[:-1]
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "period", tuple(_minimal_period(tuple(period))))

    @staticmethod
    def constant(c) -> "TailVector":
        return TailVector((), (frac(c),))

    @staticmethod
    def from_window(v: WindowVector) -> "TailVector":
        """Finitely supported vector: v on [0, hi), then zeros."""
        if v.lo < 0:
            raise ParameterError("window must start at a nonnegative index")
        coords = [ZERO] * v.lo + list(v.coords)
        return TailVector(tuple(coords), (ZERO,))

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    @property
    def period_len(self) -> int:
        return len(self.period)

    def value(self, i: int) -> Fraction:
        if i < 0:
            raise ParameterError("negative index")
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def sup_norm(self) -> Fraction:
        vals = [abs(c) for c in self.prefix] + [abs(c) for c in self.period]
        return max(vals)

    def tail_sup(self, k: int) -> Fraction:
        """sup of |values| on [k, infinity)."""
        vals = [abs(c) for c in self.prefix[k:]] + [abs(c) for c in self.period]
        return max(vals)

    def restrict(self, lo: int, hi: int) -> WindowVector:
        return WindowVector(lo, hi, tuple(self.value(i) for i in range(lo, hi)))

    def scale(self, s) -> "TailVector":
        s = frac(s)
        return TailVector(tuple(s * c for c in self.prefix),
                          tuple(s * c for c in self.period))

    def add(self, other: "TailVector") -> "TailVector":
        m = max(len(self.prefix), len(other.prefix))
        p = lcm(len(self.period), len(other.period))
        prefix = tuple(self.value(i) + other.value(i) for i in range(m))
        period = tuple(self.value(m + j) + other.value(m + j) for j in range(p))
        return TailVector(prefix, period)

    def sub(self, other: "TailVector") -> "TailVector":
        return self.add(other.scale(-1))

    def is_vanishing(self) -> bool:
        """True iff the sequence converges to 0 (period identically 0)."""
        return all(c == 0 for c in self.period)

    def to_json_obj(self):
        return {"prefix": [str(c) for c in self.prefix],
                "period": [str(c) for c in self.period]}

    @staticmethod
    def from_json_obj(obj) -> "TailVector":
        return TailVector(tuple(frac(c) for c in obj["prefix"]),
                          tuple(frac(c) for c in obj["period"]))


def quotient_norm(f: TailVector) -> Fraction:
    """limsup |f| = the largest |value| over one tail period."""
    return max(abs(c) for c in f.period)


def eq_star(f: TailVector, g: TailVector):
    """(equal modulo finitely many indices?, exact exception set)."""
    d = f.sub(g)
    if not d.is_vanishing():
        return False, None
    exceptions = sorted(i for i in range(d.prefix_len) if d.prefix[i] != 0)
    return True, exceptions


@dataclass(frozen=True)
class QuotientClass:
    """Class of a bounded sequence modulo vanishing sequences."""

    representative: TailVector

    def __eq__(self, other):
        if not isinstance(other, QuotientClass):
            return NotImplemented
        return eq_star(self.representative, other.representative)[0]

    def __hash__(self):
        raise TypeError("quotient classes are not hashable")

    def norm(self) -> Fraction:
        return quotient_norm(self.representative)


@dataclass(frozen=True)
class LiftWindow:
    n: int
    epsilon: Fraction
    direction: str  # "tail-lift" | "prefix-restriction"
    verified_value: Fraction  # the exact polyhedral max certifying n


def _aligned(fs):
    if not fs:
        raise ParameterError("empty span")
    m = max(f.prefix_len for f in fs)
    p = lcm(*[f.period_len for f in fs])
    return m, p


def qnorm_rows(fs):
    """Coefficient-space rows whose sup of |row . c| is quotient_norm(sum c_k f_k)."""
    m, p = _aligned(fs)
    return [tuple(f.value(m + j) for f in fs) for j in range(p)]


def coordinate_rows(fs, lo, hi):
    return [tuple(f.value(i) for f in fs) for i in range(lo, hi)]


def check_pi_injective(fs):
    """Raise NotInjectiveError when a nonzero combination vanishes at infinity."""
    rows = qnorm_rows(fs)
    if rank([list(r) for r in rows]) < len(fs):
        from .linalg import nullspace
        witness = nullspace([list(r) for r in rows], len(fs))[0]
        raise NotInjectiveError(
            "combination with coefficients %s lies in the vanishing ideal"
            % (tuple(witness),))


def lifting_index(fs, epsilon=ZERO) -> LiftWindow:
    """Smallest N with (1 - eps) |y restricted to [N, inf)| <= quotient_norm(y)
    for every y in the span; N = max prefix length always works because
    the tail sup past every prefix equals the quotient norm exactly.
    """
    epsilon = frac(epsilon)
    if not (0 <= epsilon < 1):
        raise ParameterError("epsilon must lie in [0, 1)")
    check_pi_injective(fs)
    m, _ = _aligned(fs)
    constraints = qnorm_rows(fs)
    budget = ONE / (1 - epsilon)
    best = (m, ONE)
    for n in range(m):
        objectives = coordinate_rows(fs, n, m) + constraints
        val, _, _ = polyhedral_max(objectives, constraints)
        if val <= budget:
            best = (n, val)
            break
    return LiftWindow(best[0], epsilon, "tail-lift", best[1])


def restriction_index(fs, epsilon=ZERO) -> LiftWindow:
    """Smallest N with (1 - eps) |y| <= |y restricted to [0, N)| on the span;
    N = prefix length + one period always works.
    """
    epsilon = frac(epsilon)
    if not (0 <= epsilon < 1):
        raise ParameterError("epsilon must lie in [0, 1)")
    fs = [f if isinstance(f, TailVector) else TailVector.from_window(f) for f in fs]
    m, p = _aligned(fs)
    d = len(fs)
    full = coordinate_rows(fs, 0, m + p)
    budget = ONE / (1 - epsilon)
    for n in range(1, m + p + 1):
        constraints = coordinate_rows(fs, 0, n)
        if rank([list(r) for r in constraints]) < d:
            continue
        val, _, _ = polyhedral_max(full, constraints)
        if val <= budget:
            return LiftWindow(n, epsilon, "prefix-restriction", val)
    raise NotInvertibleError("no restriction window found; basis is dependent")


def pi_section_norm(fs, n: int) -> Fraction:
    """Norm of the section sending the class of y to y restricted to [n, inf),
    on the span of fs: max tail sup over the quotient-norm unit ball.
    """
    check_pi_injective(fs)
    m, _ = _aligned(fs)
    constraints = qnorm_rows(fs)
    if n >= m:
        # past every prefix the objective rows coincide with the
        # constraint rows, so the sup over the unit ball is exactly 1
        return ONE
    objectives = coordinate_rows(fs, n, m) + constraints
    val, _, _ = polyhedral_max(objectives, constraints)
    return val


def r_operator(fs, n: int, n_prime: int):
    """The composition (restrict to [n, n')) after (section from n), as a
    matrix from coefficient space to the window [n, n').
    """
    from .linalg import RMatrix

    if n_prime <= n:
        raise ParameterError("n' must exceed n")
    check_pi_injective(fs)
    entries = [[f.value(i) for f in fs] for i in range(n, n_prime)]
    return RMatrix.from_dense(entries, row_lo=n, col_lo=0)


def r_operator_norm(fs, n: int, n_prime: int) -> Fraction:
    """max over the quotient-norm unit ball of |y| on [n, n')."""
    check_pi_injective(fs)
    val, _, _ = polyhedral_max(coordinate_rows(fs, n, n_prime), qnorm_rows(fs))
    return val


def r_operator_inverse_norm(fs, n: int, n_prime: int) -> Fraction:
    """max quotient norm over {|y| <= 1 on [n, n')}; NotInvertible when the
    restriction window is too short to pin down coefficients.
    """
    check_pi_injective(fs)
    constraints = coordinate_rows(fs, n, n_prime)
    if rank([list(r) for r in constraints]) < len(fs):
        raise NotInvertibleError(
            "restriction to [%d, %d) is not injective on the span" % (n, n_prime))
    val, _, _ = polyhedral_max(qnorm_rows(fs), constraints)
    return val
