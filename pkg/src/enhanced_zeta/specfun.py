"""Closed-form special functions and constants: multiple gamma, the gamma
factor of the enhanced cone, the Gindikin-type gamma constant, the
functional-equation constant c(s), the orbit phases u_rho(s), and the
corollary prefactor in both displayed forms.

Pole detection is structural: each product of gamma factors knows its
linear forms in (s1, s2), so a pole is reported as (factor, linear form)
rather than as a floating overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import scipy.special

from .errors import GammaPoleError
from .invariants import ComplexPair, OrbitParam

#: Tolerance for deciding that a gamma argument sits on a pole.
POLE_TOL = 1e-12


def _is_nonpositive_integer(a: complex, tol: float = POLE_TOL) -> bool:
    if abs(a.imag) > tol:
        return False
    r = a.real
    return r < 0.5 and abs(r - round(r)) <= tol


def log_gamma(alpha: complex) -> complex:
    """Principal branch log Gamma; raises at nonpositive integers."""
    alpha = complex(alpha)
    if _is_nonpositive_integer(alpha):
        raise GammaPoleError(f"log_gamma pole at {alpha}")
    return complex(scipy.special.loggamma(alpha))


def gamma(alpha: complex) -> complex:
    return cmath.exp(log_gamma(alpha))


def multi_gamma_pole(k: int, alpha: complex) -> int | None:
    """Index j (1-based) of the first pole factor of Gamma_k at alpha, else None."""
    for j in range(1, k + 1):
        if _is_nonpositive_integer(complex(alpha) - (j - 1) / 2.0):
            return j
    return None


def multi_log_gamma(k: int, alpha: complex) -> complex:
    """log of Gamma_k(alpha) = prod_{j=1}^{k} Gamma(alpha - (j-1)/2); Gamma_0 = 1."""
    if k < 0:
        raise ValueError("k must be >= 0")
    j = multi_gamma_pole(k, alpha)
    if j is not None:
        raise GammaPoleError(
            f"Gamma_{k} pole: argument {alpha} - {(j - 1) / 2} is a nonpositive integer",
            poles=[(j, alpha - (j - 1) / 2.0)],
        )
    return sum((complex(scipy.special.loggamma(complex(alpha) - (j - 1) / 2.0))
                for j in range(1, k + 1)), 0j)


def multi_gamma(k: int, alpha: complex) -> complex:
    return cmath.exp(multi_log_gamma(k, alpha))


# ---------------------------------------------------------------------------
# The gamma factor of the enhanced cone
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaFactor:
    """The four-factor gamma of the enhanced cone for fixed (n, d).

    ``factors`` lists (k, a, b, c) meaning Gamma_k(a*s1 + b*s2 + c).
    """

    n: int
    d: int
    factors: tuple[tuple[int, float, float, float], ...]

    def arguments(self, s: ComplexPair) -> list[complex]:
        return [a * s.s1 + b * s.s2 + c for (_, a, b, c) in self.factors]

    def pole_info(self, s: ComplexPair) -> list[dict]:
        """Structural pole hits at s: factor index, inner index j, linear form."""
        hits = []
        for fi, (k, a, b, c) in enumerate(self.factors):
            arg = a * s.s1 + b * s.s2 + c
            j = multi_gamma_pole(k, arg)
            if j is not None:
                hits.append({
                    "factor": fi,
                    "j": j,
                    "linear_form": f"{a}*s1 + {b}*s2 + {c} - {(j - 1) / 2}",
                    "argument": arg - (j - 1) / 2.0,
                })
        return hits

    def log_value(self, s: ComplexPair) -> complex:
        hits = self.pole_info(s)
        if hits:
            raise GammaPoleError(f"gamma factor pole at s = {s}", poles=hits)
        return sum((multi_log_gamma(k, a * s.s1 + b * s.s2 + c)
                    for (k, a, b, c) in self.factors), 0j)

    def value(self, s: ComplexPair) -> complex:
        return cmath.exp(self.log_value(s))


def gamma_factor(n: int, d: int) -> GammaFactor:
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")
    return GammaFactor(n, d, (
        (d, 1.0, 0.0, (d + 1) / 2.0),
        (d, 0.0, 1.0, (d + 1) / 2.0),
        (d, 0.0, 1.0, n / 2.0),
        (n - d, 1.0, 1.0, (n + 1) / 2.0),
    ))


def gamma_tilde_omega(n: int, d: int, s: ComplexPair) -> complex:
    """Gamma_d(s1+(d+1)/2) Gamma_d(s2+(d+1)/2) Gamma_d(s2+n/2) Gamma_{n-d}(s1+s2+(n+1)/2)."""
    return gamma_factor(n, d).value(s)


def gindikin_gamma(n: int, d: int, alpha: complex, beta: complex) -> complex:
    """Closed form of the cone integral of e^{-Tr z} Delta_n^alpha Delta_d^beta.

    Value: (2 pi)^{n(n-1)/4} Gamma_d(alpha+beta+(n+1)/2) Gamma_{n-d}(alpha+(n-d+1)/2),
    with respect to the trace-form (self-dual) volume on the cone; see
    :func:`enhanced_zeta.zetanum.gamma_const_integral_mc` for the matching
    measure convention.
    """
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")
    lg = (n * (n - 1) / 4.0) * math.log(2 * math.pi)
    lg += multi_log_gamma(d, alpha + beta + (n + 1) / 2.0)
    lg += multi_log_gamma(n - d, alpha + (n - d + 1) / 2.0)
    return cmath.exp(lg)


def c_factor(n: int, d: int, s: ComplexPair) -> complex:
    """The entire constant (2 pi)^{n(n-1)/4} pi^{-2d(s2 + n/4)}."""
    expo = (n * (n - 1) / 4.0) * math.log(2 * math.pi) \
        - 2.0 * d * (s.s2 + n / 4.0) * math.log(math.pi)
    return cmath.exp(expo)


def u_rho(n: int, d: int, rho: OrbitParam, s: ComplexPair) -> complex:
    """Orbit phase (2 pi)^{n s1 + (n-d) s2} exp((pi i/2)((p-q)(s1+s2) - (p'-q') s2))."""
    rho.validate(n, d)
    expo = (n * s.s1 + (n - d) * s.s2) * math.log(2 * math.pi)
    expo += (1j * math.pi / 2.0) * ((rho.p - rho.q) * (s.s1 + s.s2) - (rho.pp - rho.qq) * s.s2)
    return cmath.exp(expo)


# ---------------------------------------------------------------------------
# Corollary prefactor
# ---------------------------------------------------------------------------

def _log_2pi_i(branch: str) -> complex:
    """Principal log of the oscillatory base: 2*pi*i or -2*pi*i."""
    if branch == "+2pi_i":
        return math.log(2 * math.pi) + 1j * math.pi / 2.0
    if branch == "-2pi_i":
        return math.log(2 * math.pi) - 1j * math.pi / 2.0
    raise ValueError("branch must be '+2pi_i' or '-2pi_i'")


def corollary_prefactor(n: int, d: int, s: ComplexPair, form: str = "gamma",
                        branch: str = "+2pi_i") -> complex:
    """Prefactor of the cone-supported functional equation.

    ``form='gamma'`` uses 1/(Gamma_d(s2+(d+1)/2) Gamma_d(-s2)); ``form='sine'``
    uses the equivalent product of sines with arguments pi*(s2 + (d-j)/2).
    ``branch`` selects the sign of the imaginary oscillatory base; the
    default is the branch validated by the one-dimensional functional
    equation; the opposite sign disagrees by a pure phase, which
    :func:`enhanced_zeta.functional_eq.corollary_check` reports.
    """
    expo = n * s.s1 + (n - d) * s.s2 + n * (n + 1) / 2.0
    base = cmath.exp(-expo * _log_2pi_i(branch))
    if form == "gamma":
        # The gammas sit in the denominator, so their poles are zeros here.
        if multi_gamma_pole(d, s.s2 + (d + 1) / 2.0) is not None \
                or multi_gamma_pole(d, -s.s2) is not None:
            return 0.0 + 0.0j
        den = multi_log_gamma(d, s.s2 + (d + 1) / 2.0) + multi_log_gamma(d, -s.s2)
        return c_factor(n, d, s) * base * cmath.exp(-den)
    if form == "sine":
        prod = 1.0 + 0.0j
        for j in range(1, d + 1):
            prod *= cmath.sin(math.pi * (s.s2 + (d - j) / 2.0))
        return c_factor(n, d, s) * base * prod / (-math.pi) ** d
    raise ValueError("form must be 'gamma' or 'sine'")


def corollary_reflected_parameters(n: int, d: int, s: ComplexPair) -> ComplexPair:
    """The reflected exponent pair -(s1 + (d+1)/2), -(s2 + n/2)."""
    return ComplexPair(-(s.s1 + (d + 1) / 2.0), -(s.s2 + n / 2.0))


def pos_pow(base: float, expo: complex) -> complex:
    """Principal power of a positive real base."""
    if base <= 0:
        raise ValueError("base must be positive")
    return cmath.exp(expo * math.log(base))
