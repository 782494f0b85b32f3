"""Exact multivariate polynomial arithmetic over Q and the two-variable
Bernstein-Sato identity checks.

Polynomials live in the coordinates z_ij (i <= j) and y_ab, ordered as in
:func:`enhanced_zeta.linalg.coord_system`.  Coefficients are exact
(Python ints or Fractions); no floating point enters this module.

The dual of a polynomial in the paired coordinates (w, x) is the constant
coefficient operator obtained by w_ii -> d/dz_ii, w_ij -> (1/2) d/dz_ij for
i < j, and x_ab -> d/dy_ab.  This is the unique operator satisfying
``P*(d) exp(Tr zw + Tr y^T x) = P(w, x) exp(...)`` because differentiating
the trace pairing in an off-diagonal coordinate produces the weight 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ExactDivisionError, SizeLimitError

Exponent = tuple[int, ...]


# ---------------------------------------------------------------------------
# Variable rings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyRing:
    """Ordered variable set.  ``kinds[k]`` is ("z", i, j), ("y", a, b) or
    ("aux", name) describing variable k (indices 0-based)."""

    names: tuple[str, ...]
    kinds: tuple[tuple, ...]

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def pairing_weight(self, k: int) -> int:
        kind = self.kinds[k]
        if kind[0] == "z" and kind[1] != kind[2]:
            return 2
        return 1


@lru_cache(maxsize=None)
def matrix_ring(n: int, d: int) -> PolyRing:
    """Ring of the coordinates on W for given (n, d); d = 0 gives Sym_n only."""
    names, kinds = [], []
    for i in range(n):
        for j in range(i, n):
            names.append(f"z{i + 1}{j + 1}")
            kinds.append(("z", i, j))
    for a in range(n):
        for b in range(d):
            names.append(f"y{a + 1}{b + 1}")
            kinds.append(("y", a, b))
    return PolyRing(tuple(names), tuple(kinds))


def _grlex_key(e: Exponent) -> tuple:
    return (sum(e), e)


class RationalPoly:
    """Sparse exact polynomial: map from exponent tuple to rational coefficient.

    Zero coefficients are never stored; the canonical term order is graded
    lexicographic.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict[Exponent, object] | None = None):
        self.ring = ring
        self.terms = {e: c for e, c in (terms or {}).items() if c != 0}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(ring: PolyRing) -> "RationalPoly":
        return RationalPoly(ring, {})

    @staticmethod
    def constant(ring: PolyRing, c) -> "RationalPoly":
        zero = (0,) * ring.nvars
        return RationalPoly(ring, {zero: c})

    @staticmethod
    def variable(ring: PolyRing, k: int) -> "RationalPoly":
        e = [0] * ring.nvars
        e[k] = 1
        return RationalPoly(ring, {tuple(e): 1})

    # -- basic structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        if not self.terms:
            return True
        zero = (0,) * self.ring.nvars
        return set(self.terms) == {zero}

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return Fraction(next(iter(self.terms.values())))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def leading(self) -> tuple[Exponent, object]:
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self.ring is other.ring and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((id(self.ring), frozenset(self.terms.items())))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v == 0:
                out.pop(e, None)
            else:
                out[e] = v
        return RationalPoly(self.ring, out)

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __mul__(self, other) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            if other == 0:
                return RationalPoly.zero(self.ring)
            return RationalPoly(self.ring, {e: c * other for e, c in self.terms.items()})
        out: dict[Exponent, object] = {}
        a_items = list(self.terms.items())
        for eb, cb in other.terms.items():
            for ea, ca in a_items:
                e = tuple(x + y for x, y in zip(ea, eb))
                v = out.get(e, 0) + ca * cb
                if v == 0:
                    out.pop(e, None)
                else:
                    out[e] = v
        return RationalPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RationalPoly":
        if k < 0:
            raise ValueError("negative power")
        out = RationalPoly.constant(self.ring, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def evaluate(self, values) -> Fraction:
        """Exact evaluation; ``values`` is a sequence of rationals per variable."""
        total = Fraction(0)
        for e, c in self.terms.items():
            prod = Fraction(c)
            for k, ek in enumerate(e):
                if ek:
                    prod *= Fraction(values[k]) ** ek
            total += prod
        return total

    def evaluate_float(self, values) -> complex:
        total = 0.0 + 0.0j
        for e, c in self.terms.items():
            prod = complex(c)
            for k, ek in enumerate(e):
                if ek:
                    prod *= values[k] ** ek
            total += prod
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{self.ring.names[k]}^{p}" if p > 1 else self.ring.names[k]
                for k, p in enumerate(e) if p
            )
            if mono:
                parts.append(f"{c}*{mono}" if c != 1 else mono)
            else:
                parts.append(str(c))
        return " + ".join(parts)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Symbolic determinants
# ---------------------------------------------------------------------------

def _det_of_entries(ring: PolyRing, entry, size: int) -> RationalPoly:
    """Determinant by first-column Laplace expansion with minor memoization.

    ``entry(i, j)`` returns a variable index, or None for a zero entry.
    """
    cache: dict[tuple, dict[Exponent, object]] = {}

    def minor(rows: tuple[int, ...], cols: tuple[int, ...]) -> dict[Exponent, object]:
        if not rows:
            return {(0,) * ring.nvars: 1}
        key = (rows, cols)
        hit = cache.get(key)
        if hit is not None:
            return hit
        out: dict[Exponent, object] = {}
        j = cols[0]
        rest_cols = cols[1:]
        for pos, i in enumerate(rows):
            k = entry(i, j)
            if k is None:
                continue
            sub = minor(rows[:pos] + rows[pos + 1:], rest_cols)
            sign = 1 if pos % 2 == 0 else -1
            for e, c in sub.items():
                e2 = list(e)
                e2[k] += 1
                e2 = tuple(e2)
                v = out.get(e2, 0) + sign * c
                if v == 0:
                    out.pop(e2, None)
                else:
                    out[e2] = v
        cache[key] = out
        return out

    idx = tuple(range(size))
    return RationalPoly(ring, minor(idx, idx))


def expand_P1(n: int, d: int = 0) -> RationalPoly:
    """Symbolic det z in the (n, d) coordinate ring."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 6:
        raise SizeLimitError(f"expand_P1 refuses n = {n} > 6")
    ring = matrix_ring(n, d)
    zidx = {}
    pos = 0
    for i in range(n):
        for j in range(i, n):
            zidx[(i, j)] = pos
            pos += 1

    def entry(i, j):
        return zidx[(min(i, j), max(i, j))]

    return _det_of_entries(ring, entry, n)


def expand_P2(n: int, d: int) -> RationalPoly:
    """(-1)^d times the symbolic bordered determinant det [[z, y], [y^T, 0]].

    d > n is allowed; the result is then the zero polynomial.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if n + d > 8:
        raise SizeLimitError(f"expand_P2 refuses n + d = {n + d} > 8")
    ring = matrix_ring(n, d)
    zidx = {}
    pos = 0
    for i in range(n):
        for j in range(i, n):
            zidx[(i, j)] = pos
            pos += 1
    yidx = {}
    for a in range(n):
        for b in range(d):
            yidx[(a, b)] = pos
            pos += 1

    def entry(i, j):
        if i < n and j < n:
            return zidx[(min(i, j), max(i, j))]
        if i < n and j >= n:
            return yidx[(i, j - n)]
        if i >= n and j < n:
            return yidx[(j, i - n)]
        return None

    det = _det_of_entries(ring, entry, n + d)
    return det * ((-1) ** d)


# ---------------------------------------------------------------------------
# Dual differential operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiffOperator:
    """Constant coefficient operator: map derivative multi-index -> coefficient."""

    ring: PolyRing
    terms: dict

    def apply(self, f: RationalPoly) -> RationalPoly:
        return apply(self, f)

    def negated(self) -> "DiffOperator":
        """The operator with every d replaced by -d (formal adjoint sign)."""
        out = {}
        for mu, c in self.terms.items():
            out[mu] = c if sum(mu) % 2 == 0 else -c
        return DiffOperator(self.ring, out)

    def order(self) -> int:
        return max((sum(mu) for mu in self.terms), default=0)


def dual_operator(P: RationalPoly) -> DiffOperator:
    """Dual of a polynomial regarded in the paired (w, x) coordinates."""
    ring = P.ring
    out = {}
    for e, c in P.terms.items():
        coeff = Fraction(c)
        for k, ek in enumerate(e):
            if ek and ring.pairing_weight(k) == 2:
                coeff /= 2 ** ek
        out[e] = out.get(e, Fraction(0)) + coeff
    return DiffOperator(ring, {mu: c for mu, c in out.items() if c != 0})


def _falling(e: int, m: int) -> int:
    out = 1
    for t in range(m):
        out *= e - t
    return out


def apply(op: DiffOperator, f: RationalPoly) -> RationalPoly:
    """Exact application of a constant coefficient operator to a polynomial."""
    out: dict[Exponent, object] = {}
    for mu, cmu in op.terms.items():
        nz = [(k, m) for k, m in enumerate(mu) if m]
        for e, c in f.terms.items():
            fac = 1
            ok = True
            for k, m in nz:
                if e[k] < m:
                    ok = False
                    break
                fac *= _falling(e[k], m)
            if not ok:
                continue
            e2 = list(e)
            for k, m in nz:
                e2[k] -= m
            e2 = tuple(e2)
            v = out.get(e2, 0) + cmu * fac * c
            if v == 0:
                out.pop(e2, None)
            else:
                out[e2] = v
    return RationalPoly(f.ring, out)


def exact_divide(num: RationalPoly, den: RationalPoly) -> RationalPoly:
    """Exact polynomial division; raises ExactDivisionError if not exact."""
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    ring = num.ring
    q: dict[Exponent, object] = {}
    r = num
    de, dc = den.leading()
    while not r.is_zero():
        re, rc = r.leading()
        e = tuple(a - b for a, b in zip(re, de))
        if any(x < 0 for x in e):
            raise ExactDivisionError("leading term not divisible; division not exact")
        c = Fraction(rc) / Fraction(dc)
        q[e] = q.get(e, Fraction(0)) + c
        r = r - RationalPoly(ring, {e: c}) * den
    return RationalPoly(ring, q)


# ---------------------------------------------------------------------------
# b-functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BPolynomial:
    """Product of exact linear forms a*s1 + b*s2 + c in the exponent pair."""

    factors: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def eval_rational(self, m1, m2) -> Fraction:
        out = Fraction(1)
        for a, b, c in self.factors:
            out *= a * Fraction(m1) + b * Fraction(m2) + c
        return out

    def eval_complex(self, s1: complex, s2: complex) -> complex:
        out = 1.0 + 0.0j
        for a, b, c in self.factors:
            out *= float(a) * s1 + float(b) * s2 + float(c)
        return out

    def expanded(self) -> dict[tuple[int, int], Fraction]:
        """Coefficients of the expanded polynomial in (s1, s2)."""
        coeffs = {(0, 0): Fraction(1)}
        for a, b, c in self.factors:
            new: dict[tuple[int, int], Fraction] = {}
            for (i, j), v in coeffs.items():
                for (di, dj), f in (((1, 0), a), ((0, 1), b), ((0, 0), c)):
                    if f == 0:
                        continue
                    key = (i + di, j + dj)
                    new[key] = new.get(key, Fraction(0)) + v * f
            coeffs = {k: v for k, v in new.items() if v != 0}
        return coeffs

    def degree(self) -> int:
        return len(self.factors)

    def __str__(self) -> str:
        def form(a, b, c):
            parts = []
            if a:
                parts.append("s1" if a == 1 else f"{a}*s1")
            if b:
                parts.append("s2" if b == 1 else f"{b}*s2")
            if c:
                parts.append(str(c))
            return "(" + " + ".join(parts) + ")"

        return "".join(form(*f) for f in self.factors) or "1"


def b10_formula(n: int, d: int) -> BPolynomial:
    """b-polynomial of the first identity (degree n)."""
    _check_nd(n, d)
    factors = []
    for j in range(1, d + 1):
        factors.append((Fraction(1), Fraction(0), Fraction(d + 1, 2) - Fraction(j - 1, 2)))
    for k in range(1, n - d + 1):
        factors.append((Fraction(1), Fraction(1), Fraction(n + 1, 2) - Fraction(k - 1, 2)))
    return BPolynomial(tuple(factors))


def b01_formula(n: int, d: int) -> BPolynomial:
    """b-polynomial of the second identity (degree n + d)."""
    _check_nd(n, d)
    factors = []
    for j in range(1, d + 1):
        factors.append((Fraction(0), Fraction(1), Fraction(d + 1, 2) - Fraction(j - 1, 2)))
        factors.append((Fraction(0), Fraction(1), Fraction(n, 2) - Fraction(j - 1, 2)))
    for k in range(1, n - d + 1):
        factors.append((Fraction(1), Fraction(1), Fraction(n + 1, 2) - Fraction(k - 1, 2)))
    return BPolynomial(tuple(factors))


def _check_nd(n: int, d: int) -> None:
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got (n, d) = ({n}, {d})")


# ---------------------------------------------------------------------------
# Bernstein-Sato identity check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BsResult:
    """Outcome of one exact identity check at integer exponents."""

    n: int
    d: int
    m1: int
    m2: int
    which: str
    kappa: Fraction
    constant: Fraction
    ok: bool


@lru_cache(maxsize=64)
def _invariant_pair(n: int, d: int) -> tuple[RationalPoly, RationalPoly]:
    return expand_P1(n, d), expand_P2(n, d)


@lru_cache(maxsize=256)
def _invariant_power(n: int, d: int, a: int, b: int) -> RationalPoly:
    p1, p2 = _invariant_pair(n, d)
    if a > 0:
        return _invariant_power(n, d, a - 1, b) * p1
    if b > 0:
        return _invariant_power(n, d, a, b - 1) * p2
    return RationalPoly.constant(p1.ring, 1)


@lru_cache(maxsize=32)
def _int_scaled_dual(n: int, d: int, which: str) -> tuple[DiffOperator, int]:
    """Dual operator with denominators cleared; returns (2^m * P*, 2^m)."""
    p1, p2 = _invariant_pair(n, d)
    op = dual_operator(p1 if which == "first" else p2)
    denom = 1
    for c in op.terms.values():
        denom = denom * Fraction(c).denominator // _gcd(denom, Fraction(c).denominator)
    terms = {mu: int(Fraction(c) * denom) for mu, c in op.terms.items()}
    return DiffOperator(op.ring, terms), denom


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def bs_check(n: int, d: int, m1: int, m2: int, which: str) -> BsResult:
    """Verify one two-variable identity exactly at integer exponents.

    Computes L = P_i*(d) (P1^{m1 + d_i1} P2^{m2 + d_i2}), divides exactly by
    P1^{m1} P2^{m2}, and reports kappa = quotient / b_i(m1, m2).  ``ok`` is
    True iff the quotient is a constant polynomial.  A non-exact division
    raises ExactDivisionError (convention mismatch or bug).
    """
    if which not in ("first", "second"):
        raise ValueError("which must be 'first' or 'second'")
    _check_nd(n, d)
    if m1 < 0 or m2 < 0:
        raise ValueError("exponents must be nonnegative")
    a = m1 + (1 if which == "first" else 0)
    b = m2 + (1 if which == "second" else 0)
    target = _invariant_power(n, d, a, b)
    op, scale = _int_scaled_dual(n, d, which)
    applied = apply(op, target)
    divisor = _invariant_power(n, d, m1, m2)
    quotient = exact_divide(applied, divisor)
    ok = quotient.is_constant() and not quotient.is_zero()
    constant = quotient.constant_value() / scale if ok else Fraction(0)
    bval = (b10_formula if which == "first" else b01_formula)(n, d).eval_rational(m1, m2)
    kappa = constant / bval if bval != 0 else Fraction(0)
    return BsResult(n, d, m1, m2, which, kappa, constant, ok)


def bs_check_grid(n: int, d: int, mmax: int = 2) -> dict:
    """Run both identities over the exponent grid and test kappa stability."""
    out = {"n": n, "d": d, "results": [], "kappa": {}, "stable": {}, "ok": True}
    for which in ("first", "second"):
        kappas = set()
        for m1 in range(mmax + 1):
            for m2 in range(mmax + 1):
                res = bs_check(n, d, m1, m2, which)
                out["results"].append(res)
                out["ok"] &= res.ok
                kappas.add(res.kappa)
        stable = len(kappas) == 1
        out["stable"][which] = stable
        out["ok"] &= stable
        out["kappa"][which] = next(iter(kappas)) if stable else sorted(kappas)
    return out


def bs_kappa(n: int, d: int, which: str) -> Fraction:
    """The convention constant for (n, d, identity), verified at two exponent pairs."""
    r0 = bs_check(n, d, 0, 0, which)
    r1 = bs_check(n, d, 1, 1, which)
    if not (r0.ok and r1.ok and r0.kappa == r1.kappa):
        raise ExactDivisionError(f"kappa not stable for (n, d, {which}) = ({n}, {d})")
    return r0.kappa
