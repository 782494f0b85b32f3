"""Numerical integration engine: zeta-kernel pairings over open orbits,
the cone Laplace integral behind the gamma constant, closed-form Fourier
transforms of Gaussian test functions, and the shift relation that drives
meromorphic continuation.

Measure conventions
-------------------
All W-integrals (zeta pairings, Fourier transforms) use plain Lebesgue
measure on the independent coordinates z_ij (i <= j) and y_ab; with the
trace pairing this forces the 2^{n(n-1)/2} factor in Fourier inversion.
The cone Laplace integral (:func:`gamma_const_integral_mc`) is the one
place where the trace-form (self-dual) volume is used instead, because
its closed form (:func:`enhanced_zeta.specfun.gindikin_gamma`) holds for
that normalization; the two volumes differ by 2^{n(n-1)/4}.

Two evaluation backends are used: separable log-substituted trapezoid
quadrature when n = d = 1 (every pairing factorizes through one-dimensional
moments), and importance-sampled Monte Carlo with Wishart / Gaussian
proposals otherwise.  Monte Carlo runs are bit-for-bit reproducible for a
fixed (seed, sample count) on a single thread.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import polyalg, specfun
from .errors import (
    ConvergenceError,
    NonFiniteSampleError,
    ShapeMismatchError,
    UnsupportedCaseError,
)
from .invariants import ComplexPair, OrbitParam, classify_batch, enumerate_orbits, \
    orbit_sign_p1, orbit_sign_p2
from .linalg import CoordSystem, EnhancedPoint, coord_system, sym_to_coords


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianTestFn:
    """phi(z, y) = amplitude * exp(-az Tr (z-z0)^2 - ay Tr (y-y0)^T (y-y0)).

    Strictly positive, rapidly decreasing; centers default to the origin.
    """

    n: int
    d: int
    az: float
    ay: float
    center_z: np.ndarray | None = None
    center_y: np.ndarray | None = None
    amplitude: float = 1.0

    def __post_init__(self):
        if self.az <= 0 or self.ay <= 0:
            raise ValueError("scales must be positive")
        for name, c, shape in (("center_z", self.center_z, (self.n, self.n)),
                               ("center_y", self.center_y, (self.n, self.d))):
            if c is not None and np.asarray(c).shape != shape:
                raise ShapeMismatchError(f"{name} must have shape {shape}")

    def eval(self, z: np.ndarray, y: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        y = np.asarray(y, dtype=float)
        dz = z - (self.center_z if self.center_z is not None else 0.0)
        dy = y - (self.center_y if self.center_y is not None else 0.0)
        qz = np.sum(dz * dz, axis=(-2, -1))
        qy = np.sum(dy * dy, axis=(-2, -1))
        return self.amplitude * np.exp(-self.az * qz - self.ay * qy)

    def eval_point(self, point: EnhancedPoint) -> float:
        return float(self.eval(point.z.data, point.y.data))

    def to_polygaussian(self) -> "PolyGaussian":
        cs = coord_system(self.n, self.d)
        weights = np.array(cs.weights)
        # Tr (z-z0)^2 = sum_diag (u-u0)^2 + 2 sum_offdiag (u-u0)^2 in coordinates.
        quad = np.where(weights == 2.0, 2.0 * self.az, self.az)
        quad[cs.dim_z:] = self.ay
        c0 = np.zeros(cs.dim)
        if self.center_z is not None:
            c0[:cs.dim_z] = sym_to_coords(np.asarray(self.center_z, dtype=float), self.n)
        if self.center_y is not None:
            c0[cs.dim_z:] = np.asarray(self.center_y, dtype=float).reshape(-1)
        betas = (2.0 * quad * c0).astype(complex)
        logconst = complex(math.log(self.amplitude) - np.sum(quad * c0 * c0))
        poly = {(0,) * cs.dim: 1.0 + 0.0j}
        return PolyGaussian(np.asarray(quad), betas, logconst, poly, weights, cs)


def smoothstep(u: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 on (-inf, 0], 1 on [1, inf)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    out[u >= 1.0] = 1.0
    mid = (u > 0.0) & (u < 1.0)
    um = u[mid]
    e1 = np.exp(-1.0 / um)
    e2 = np.exp(-1.0 / (1.0 - um))
    out[mid] = e1 / (e1 + e2)
    return out


@dataclass(frozen=True)
class ConeCutoffFn:
    """Gaussian tapered to vanish to all orders outside the closed cone.

    Multiplies the base Gaussian by smoothstep(lambda_min(z)/margin) times
    smoothstep(sigma_min(y)/margin), so the support lies in the closure of
    the enhanced positive cone.
    """

    base: GaussianTestFn
    margin: float = 0.5

    def __post_init__(self):
        if self.margin <= 0:
            raise ValueError("margin must be positive")

    def eval(self, z: np.ndarray, y: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        y = np.asarray(y, dtype=float)
        lam_min = np.linalg.eigvalsh(z)[..., 0]
        smin = np.linalg.svd(y, compute_uv=False)[..., -1]
        return (smoothstep(lam_min / self.margin)
                * smoothstep(smin / self.margin)
                * self.base.eval(z, y))

    # 1-d factor views used by the quadrature path (n = d = 1 only).

    def z_part(self, zv: np.ndarray) -> np.ndarray:
        self._require_scalar()
        zv = np.asarray(zv, dtype=float)
        c0 = 0.0 if self.base.center_z is None else float(self.base.center_z[0, 0])
        return smoothstep(zv / self.margin) * np.exp(-self.base.az * (zv - c0) ** 2)

    def y_part(self, yv: np.ndarray) -> np.ndarray:
        self._require_scalar()
        yv = np.asarray(yv, dtype=float)
        c0 = 0.0 if self.base.center_y is None else float(self.base.center_y[0, 0])
        return (self.base.amplitude * smoothstep(np.abs(yv) / self.margin)
                * np.exp(-self.base.ay * (yv - c0) ** 2))

    def _require_scalar(self):
        if not (self.base.n == 1 and self.base.d == 1):
            raise UnsupportedCaseError("factor views exist only for n = d = 1")


# ---------------------------------------------------------------------------
# Polynomial x Gaussian closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyGaussian:
    """Sum of monomials times exp(sum_k (-alphas[k] u_k^2 + betas[k] u_k) + logconst).

    The coordinates u_k follow :func:`enhanced_zeta.linalg.coord_system`;
    ``weights`` are the trace-pairing weights used by the Fourier transform.
    Derivatives and constant coefficient operators act in closed form, so
    the class is closed under the shift-relation machinery.
    """

    alphas: np.ndarray
    betas: np.ndarray
    logconst: complex
    poly: dict
    weights: np.ndarray
    cs: CoordSystem | None = None

    @property
    def dim(self) -> int:
        return len(self.alphas)

    def is_pure_gaussian(self) -> bool:
        return set(self.poly) == {(0,) * self.dim}

    # -- evaluation ---------------------------------------------------------

    def eval_coords(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        expo = pts @ self.betas - (pts * pts) @ self.alphas + self.logconst
        acc = np.zeros(pts.shape[:-1], dtype=complex)
        for e, c in self.poly.items():
            term = np.full(pts.shape[:-1], c, dtype=complex)
            for k, ek in enumerate(e):
                if ek:
                    term = term * pts[..., k] ** ek
            acc += term
        return acc * np.exp(expo)

    def eval_zy(self, z: np.ndarray, y: np.ndarray) -> np.ndarray:
        if self.cs is None:
            raise UnsupportedCaseError("this PolyGaussian carries no matrix coordinates")
        zc = sym_to_coords(np.asarray(z, dtype=float), self.cs.n)
        yc = np.asarray(y, dtype=float).reshape(np.asarray(y).shape[:-2] + (-1,))
        return self.eval_coords(np.concatenate([zc, yc], axis=-1))

    def value_at_zero(self) -> complex:
        zero = (0,) * self.dim
        return complex(self.poly.get(zero, 0.0)) * cmath.exp(self.logconst)

    # -- calculus -----------------------------------------------------------

    def derivative(self, k: int) -> "PolyGaussian":
        new: dict = {}

        def add(e, c):
            if c != 0:
                new[e] = new.get(e, 0.0 + 0.0j) + c

        for e, c in self.poly.items():
            if e[k] > 0:
                e2 = list(e)
                e2[k] -= 1
                add(tuple(e2), c * e[k])
            e3 = list(e)
            e3[k] += 1
            add(tuple(e3), -2.0 * self.alphas[k] * c)
            add(e, c * self.betas[k])
        return replace(self, poly={e: c for e, c in new.items() if c != 0})

    def apply_operator(self, op: polyalg.DiffOperator, negate: bool = False) -> "PolyGaussian":
        """Apply sum_mu c_mu d^mu (optionally with d -> -d) in closed form."""
        acc: dict = {}
        for mu, cmu in op.terms.items():
            g = self
            for k, m in enumerate(mu):
                for _ in range(m):
                    g = g.derivative(k)
            sign = -1.0 if (negate and sum(mu) % 2) else 1.0
            w = float(cmu) * sign
            for e, c in g.poly.items():
                v = acc.get(e, 0.0 + 0.0j) + w * c
                acc[e] = v
        return replace(self, poly={e: c for e, c in acc.items() if c != 0})

    def scaled(self, factor: complex) -> "PolyGaussian":
        return replace(self, logconst=self.logconst + cmath.log(factor))

    # -- Fourier ------------------------------------------------------------

    def fourier(self, inverse: bool = False) -> "PolyGaussian":
        """Closed-form transform with kernel exp(-2 pi i <u, v>) per the trace pairing.

        Only pure Gaussians (constant polynomial part) are supported.  The
        inverse carries the extra 2^{-n(n-1)/2} from the off-diagonal
        pairing weights.
        """
        if not self.is_pure_gaussian():
            raise UnsupportedCaseError("closed-form transform implemented for pure Gaussians")
        sign = 1.0 if inverse else -1.0
        w = self.weights
        alphas = (math.pi ** 2) * w * w / self.alphas
        betas = sign * 1j * math.pi * w * self.betas / self.alphas
        logconst = self.logconst + complex(
            np.sum(self.betas * self.betas / (4.0 * self.alphas))
            + 0.5 * np.sum(np.log(math.pi / self.alphas))
        )
        if inverse:
            # Each weight-2 coordinate contributes 1/2 to the bare double
            # transform, so inversion under coordinate Lebesgue measure
            # carries 2^{+n(n-1)/2} (not its reciprocal).
            n_off = int(np.sum(w == 2.0))
            logconst += n_off * math.log(2.0)
        zero = (0,) * self.dim
        return replace(self, alphas=alphas, betas=betas, logconst=logconst,
                       poly={zero: self.poly[zero]})

    def full_integral(self) -> complex:
        """Integral over all coordinates (Lebesgue)."""
        total = 0.0 + 0.0j
        for e, c in self.poly.items():
            prod = complex(c)
            for k, ek in enumerate(e):
                prod *= _full_moment(ek, float(self.alphas[k]), complex(self.betas[k]))
            total += prod
        return total * cmath.exp(self.logconst)


def fourier_gaussian(phi: GaussianTestFn) -> PolyGaussian:
    """Closed-form Fourier transform of a Gaussian test function."""
    return phi.to_polygaussian().fourier()


def inverse_fourier(pg: PolyGaussian) -> PolyGaussian:
    return pg.fourier(inverse=True)


# ---------------------------------------------------------------------------
# One-dimensional quadrature backbone
# ---------------------------------------------------------------------------

_MOMENT_CACHE: dict = {}


def half_moment(c: complex, alpha: float, beta: complex, rtol: float = 1e-11) -> complex:
    """integral_0^inf u^c exp(-alpha u^2 + beta u) du for Re c > -1, alpha > 0.

    Log-substituted trapezoid rule; spectrally accurate for these analytic
    integrands.  Results are cached.
    """
    key = (complex(c), float(alpha), complex(beta), rtol)
    hit = _MOMENT_CACHE.get(key)
    if hit is not None:
        return hit
    c = complex(c)
    if c.real <= -1.0:
        raise ConvergenceError(f"half_moment divergent: Re c = {c.real} <= -1")
    if alpha <= 0:
        raise ConvergenceError("half_moment needs alpha > 0")

    rc1 = c.real + 1.0
    rb = beta.real

    def g(t):
        u = np.exp(t)
        return rc1 * t - alpha * u * u + rb * u

    u_star = (rb + math.sqrt(rb * rb + 8.0 * alpha * rc1)) / (4.0 * alpha)
    t_star = math.log(u_star)
    g_max = g(t_star)
    drop = 46.0 + math.log1p(abs(c) + abs(beta))

    t_hi = t_star
    while g(t_hi) > g_max - drop:
        t_hi += 0.5
    t_lo = t_star
    step = 0.5
    while g(t_lo) > g_max - drop:
        t_lo -= step
        step = min(step * 1.5, 8.0)

    osc = abs(c.imag) + abs(beta.imag) * math.exp(t_hi)
    h = min(0.05, 2.0 * math.pi / (24.0 * (1.0 + osc)))

    def integrate(hh):
        t = np.arange(t_lo, t_hi + hh, hh)
        u = np.exp(t)
        expo = (c + 1.0) * t - alpha * u * u + beta * u - g_max
        return hh * np.sum(np.exp(expo))

    val = integrate(h)
    for _ in range(6):
        val2 = integrate(h / 2.0)
        if abs(val2 - val) <= rtol * max(abs(val2), 1e-300):
            val = val2
            break
        h /= 2.0
        val = val2
    out = complex(val * cmath.exp(g_max))
    _MOMENT_CACHE[key] = out
    return out


def _full_moment(k: int, alpha: float, beta: complex) -> complex:
    """integral_R u^k exp(-alpha u^2 + beta u) du."""
    return half_moment(k, alpha, beta) + (-1) ** k * half_moment(k, alpha, -beta)


def half_line_integral(fn, sigma: float, alpha: float, beta: float = 0.0,
                       rtol: float = 1e-10) -> complex:
    """integral_0^inf fn(u) du where |fn(u)| ~ u^sigma near 0 and decays like
    exp(-alpha u^2 + beta u); fn is evaluated vectorized."""
    if sigma <= -1.0:
        raise ConvergenceError(f"half_line_integral divergent: sigma = {sigma} <= -1")
    rc1 = sigma + 1.0

    def g(t):
        u = np.exp(t)
        return rc1 * t - alpha * u * u + beta * u

    u_star = (beta + math.sqrt(beta * beta + 8.0 * alpha * rc1)) / (4.0 * alpha)
    t_star = math.log(u_star)
    g_max = g(t_star)
    t_hi = t_star
    while g(t_hi) > g_max - 46.0:
        t_hi += 0.5
    t_lo = t_star
    step = 0.5
    while g(t_lo) > g_max - 46.0:
        t_lo -= step
        step = min(step * 1.5, 8.0)

    def integrate(hh):
        t = np.arange(t_lo, t_hi + hh, hh)
        u = np.exp(t)
        return hh * np.sum(fn(u) * u)

    h = 0.05
    val = integrate(h)
    for _ in range(7):
        val2 = integrate(h / 2.0)
        if abs(val2 - val) <= rtol * max(abs(val2), 1e-300):
            return complex(val2)
        h /= 2.0
        val = val2
    return complex(val)


# ---------------------------------------------------------------------------
# Estimates and configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MCEstimate:
    """Numerical integral together with its uncertainty proxy."""

    value: complex
    stderr: float
    n_samples: int
    method: str = "monte-carlo"

    def scaled(self, factor: complex) -> "MCEstimate":
        return MCEstimate(self.value * factor, self.stderr * abs(factor),
                          self.n_samples, self.method)


def combine_linear(coeffs, estimates) -> MCEstimate:
    """Linear combination sum c_i e_i with independent-error propagation."""
    value = sum(c * e.value for c, e in zip(coeffs, estimates))
    var = sum((abs(c) * e.stderr) ** 2 for c, e in zip(coeffs, estimates))
    n = max((e.n_samples for e in estimates), default=0)
    method = estimates[0].method if estimates else "monte-carlo"
    return MCEstimate(value, math.sqrt(var), n, method)


@dataclass(frozen=True)
class NumericConfig:
    """Budget and seeding for the numerical engines."""

    samples: int = 1_000_000
    seed: int = 2024
    block: int = 1 << 16
    quad_rtol: float = 1e-10


QUICK = NumericConfig(samples=120_000, seed=2024)
FULL = NumericConfig(samples=1_000_000, seed=2024)


@dataclass(frozen=True)
class CheckResult:
    """One verified identity: both sides, errors, and a pass flag."""

    name: str
    params: dict
    lhs: complex
    rhs: complex
    stderr: float
    tol: float
    passed: bool
    details: dict = field(default_factory=dict)

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def rel_err(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs), 1e-300)
        return self.abs_err / scale


def _tolerance_check(name, params, lhs, rhs, stderr, tol, details=None,
                     sigma_factor=3.0) -> CheckResult:
    """Pass if |lhs - rhs| <= max(sigma_factor * stderr, tol * scale)."""
    scale = max(abs(lhs), abs(rhs), 1e-300)
    ok = abs(lhs - rhs) <= max(sigma_factor * stderr, tol * scale)
    return CheckResult(name, params, lhs, rhs, stderr, tol, bool(ok), details or {})


# ---------------------------------------------------------------------------
# Convergence region
# ---------------------------------------------------------------------------

def region_constraints(n: int, d: int) -> list[tuple[float, float, float]]:
    """Linear forms (a, b, c): the pairing converges when a Re s1 + b Re s2 + c > 0.

    Derived from the weakest argument of each factor of the gamma factor of
    the cone; conservative for the other open orbits as well.
    """
    cons = [
        (1.0, 0.0, 1.0),
        (0.0, 1.0, 1.0),
        (0.0, 1.0, (n - d + 1) / 2.0),
    ]
    if n > d:
        cons.append((1.0, 1.0, (d + 2) / 2.0))
    return cons


def region_margin(n: int, d: int, s: ComplexPair) -> float:
    """Smallest slack among the convergence constraints (negative = outside)."""
    return min(a * s.s1.real + b * s.s2.real + c for a, b, c in region_constraints(n, d))


def require_convergent(n: int, d: int, s: ComplexPair, margin: float = 0.25) -> None:
    slack = region_margin(n, d, s)
    if slack < margin:
        raise ConvergenceError(
            f"s = {s} has convergence slack {slack:.3f} < required margin {margin}; "
            "pass a smaller margin to override if the integral is known to converge"
        )


# ---------------------------------------------------------------------------
# Monte Carlo proposals
# ---------------------------------------------------------------------------

LOG_2PI = math.log(2.0 * math.pi)


class ConeProposal:
    """Wishart(dof, sigma2 * I) on the positive cone via Bartlett, with the
    density taken with respect to Lebesgue measure on the independent entries."""

    def __init__(self, n: int, dof: float, sigma2: float):
        if dof <= n - 1:
            raise ConvergenceError(f"Wishart dof {dof} <= n - 1 = {n - 1}")
        self.n = n
        self.dof = float(dof)
        self.sigma2 = float(sigma2)
        lognorm = 0.5 * dof * n * math.log(2.0) + 0.5 * dof * n * math.log(sigma2)
        lognorm += (n * (n - 1) / 4.0) * math.log(math.pi)
        lognorm += float(specfun.multi_log_gamma(n, dof / 2.0).real)
        self.lognorm = lognorm

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        n = self.n
        a = np.zeros((m, n, n))
        for i in range(n):
            a[:, i, i] = np.sqrt(rng.chisquare(self.dof - i, size=m))
            for j in range(i):
                a[:, i, j] = rng.standard_normal(m)
        return self.sigma2 * (a @ np.swapaxes(a, -1, -2))

    def logpdf(self, z: np.ndarray) -> np.ndarray:
        sign, logdet = np.linalg.slogdet(z)
        tr = np.trace(z, axis1=-2, axis2=-1)
        return (0.5 * (self.dof - self.n - 1) * logdet
                - 0.5 * tr / self.sigma2 - self.lognorm)


class SymGaussianProposal:
    """Independent centered normals on the entries z_ij (i <= j)."""

    def __init__(self, n: int, sd_diag: float, sd_off: float):
        self.n = n
        self.sd_diag = sd_diag
        self.sd_off = sd_off

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        n = self.n
        z = np.zeros((m, n, n))
        for i in range(n):
            z[:, i, i] = self.sd_diag * rng.standard_normal(m)
            for j in range(i + 1, n):
                v = self.sd_off * rng.standard_normal(m)
                z[:, i, j] = v
                z[:, j, i] = v
        return z

    def logpdf(self, z: np.ndarray) -> np.ndarray:
        n = self.n
        iu = np.triu_indices(n)
        vals = z[..., iu[0], iu[1]]
        sds = np.where(iu[0] == iu[1], self.sd_diag, self.sd_off)
        return np.sum(-0.5 * (vals / sds) ** 2 - 0.5 * LOG_2PI - np.log(sds), axis=-1)


class MatGaussianProposal:
    """IID centered normals on all entries of y."""

    def __init__(self, n: int, d: int, sd: float):
        self.n = n
        self.d = d
        self.sd = sd

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        return self.sd * rng.standard_normal((m, self.n, self.d))

    def logpdf(self, y: np.ndarray) -> np.ndarray:
        k = self.n * self.d
        q = np.sum((y / self.sd) ** 2, axis=(-2, -1))
        return -0.5 * q - 0.5 * k * LOG_2PI - k * math.log(self.sd)


def mc_run(draw, integrand, n_samples: int, seed: int, block: int = 1 << 16,
           method: str = "monte-carlo") -> MCEstimate:
    """Blocked mean estimate of E[integrand(draw)] with deterministic seeding."""
    rng = np.random.default_rng(seed)
    total = 0.0 + 0.0j
    total_re2 = 0.0
    total_im2 = 0.0
    done = 0
    while done < n_samples:
        m = min(block, n_samples - done)
        vals = np.asarray(integrand(*draw(rng, m)), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSampleError("non-finite Monte Carlo sample detected")
        total += np.sum(vals)
        total_re2 += float(np.sum(vals.real ** 2))
        total_im2 += float(np.sum(vals.imag ** 2))
        done += m
    mean = total / n_samples
    var_re = max(total_re2 / n_samples - mean.real ** 2, 0.0) / n_samples
    var_im = max(total_im2 / n_samples - mean.imag ** 2, 0.0) / n_samples
    return MCEstimate(complex(mean), math.sqrt(var_re + var_im), n_samples, method)


# ---------------------------------------------------------------------------
# Kernel evaluation helpers (vectorized)
# ---------------------------------------------------------------------------

def _kernel_pow(z: np.ndarray, y: np.ndarray, s: ComplexPair,
                mask: np.ndarray) -> np.ndarray:
    """|P1|^{s1} |P2|^{s2} on masked points (0 elsewhere)."""
    out = np.zeros(z.shape[0], dtype=complex)
    if not np.any(mask):
        return out
    zm = z[mask]
    ym = y[mask]
    sign1, logd1 = np.linalg.slogdet(zm)
    gram = np.swapaxes(ym, -1, -2) @ np.linalg.solve(zm, ym)
    sign2, logd2 = np.linalg.slogdet((gram + np.swapaxes(gram, -1, -2)) / 2.0)
    logp2 = logd1 + logd2
    out[mask] = np.exp(s.s1 * logd1 + s.s2 * logp2)
    return out


def _phi_values(phi, z, y) -> np.ndarray:
    if isinstance(phi, PolyGaussian):
        return phi.eval_zy(z, y)
    return phi.eval(z, y)


def _phi_polygaussian(phi) -> PolyGaussian:
    if isinstance(phi, PolyGaussian):
        return phi
    if isinstance(phi, GaussianTestFn):
        return phi.to_polygaussian()
    raise UnsupportedCaseError(f"cannot convert {type(phi).__name__} to PolyGaussian")


def _scale_hints(pg: PolyGaussian, n: int, d: int) -> tuple[float, float]:
    dz = n * (n + 1) // 2
    az = float(np.min(pg.alphas[:dz].real)) if dz else 1.0
    ay = float(np.min(pg.alphas[dz:].real)) if n * d else 1.0
    return az, ay


# ---------------------------------------------------------------------------
# Orbit pairings
# ---------------------------------------------------------------------------

def _pair_quadrature_scalar(pg: PolyGaussian, s: ComplexPair, z_positive: bool,
                            rtol: float) -> complex:
    """Separable n = d = 1 pairing: sum over monomials of products of moments."""
    az, ay = float(pg.alphas[0].real), float(pg.alphas[1].real)
    bz, by = complex(pg.betas[0]), complex(pg.betas[1])
    total = 0.0 + 0.0j
    for (ez, ey), c in pg.poly.items():
        if z_positive:
            iz = half_moment(ez + s.s1, az, bz, rtol)
        else:
            iz = (-1) ** ez * half_moment(ez + s.s1, az, -bz, rtol)
        iy = half_moment(ey + 2 * s.s2, ay, by, rtol) \
            + (-1) ** ey * half_moment(ey + 2 * s.s2, ay, -by, rtol)
        total += c * iz * iy
    return total * cmath.exp(pg.logconst)


def _pair_orbit_raw(rho: OrbitParam, s: ComplexPair, phi, n: int, d: int,
                    cfg: NumericConfig, seed_offset: int = 0) -> MCEstimate:
    """Direct pairing over one open orbit (no descent); assumes convergence."""
    if n == 1 and d == 1:
        pg = _phi_polygaussian(phi)
        val = _pair_quadrature_scalar(pg, s, rho.p == 1, cfg.quad_rtol)
        return MCEstimate(val, abs(val) * cfg.quad_rtol * 10.0, 0, "tensor-quadrature")

    pg = _phi_polygaussian(phi)
    az, ay = _scale_hints(pg, n, d)
    tau = math.sqrt(1.0 / (2.0 * ay)) * 1.2
    y_prop = MatGaussianProposal(n, d, tau)
    orbits = enumerate_orbits(n, d)
    target = orbits.index(rho)

    positive = rho.p == n and rho.q == 0
    if positive:
        dof = max(n + 1 + 2 * (s.s1.real + s.s2.real), n - 1 + 0.5)
        sigma2 = 1.0 / (math.sqrt(az) * max(dof, 2.0))
        z_prop = ConeProposal(n, dof, sigma2)
    else:
        sd = math.sqrt(1.0 / (2.0 * az)) * 1.3
        z_prop = SymGaussianProposal(n, sd, sd / math.sqrt(2.0))

    def draw(rng, m):
        return z_prop.sample(rng, m), y_prop.sample(rng, m)

    def integrand(z, y):
        idx = classify_batch(z, y, orbits)
        mask = idx == target
        k = _kernel_pow(z, y, s, mask)
        vals = np.zeros(z.shape[0], dtype=complex)
        if np.any(mask):
            vals[mask] = (k[mask] * _phi_values(phi, z[mask], y[mask])
                          * np.exp(-z_prop.logpdf(z[mask]) - y_prop.logpdf(y[mask])))
        return vals

    return mc_run(draw, integrand, cfg.samples, cfg.seed + seed_offset, cfg.block)


def _variance_safe(n: int, d: int, s: ComplexPair, margin: float) -> bool:
    doubled = ComplexPair(2 * s.s1, 2 * s.s2)
    return region_margin(n, d, doubled) >= margin


def _descent_plan(n: int, d: int, s: ComplexPair, safe, max_steps: int = 3):
    """Shift steps (in s1 / s2) until ``safe(s)`` holds; returns the step list."""
    steps = []
    cur = s
    cons = region_constraints(n, d)
    while not safe(cur):
        if len(steps) >= max_steps:
            raise ConvergenceError(
                f"more than {max_steps} continuation steps needed from s = {s}")
        slacks = [(a * cur.s1.real + b * cur.s2.real + c, a, b) for a, b, c in cons]
        worst = min(slacks)
        step = "s1" if worst[1] >= worst[2] else "s2"
        steps.append(step)
        cur = cur + ((1, 0) if step == "s1" else (0, 1))
    return steps


def pair_orbit_continued(rho: OrbitParam, s: ComplexPair, phi, n: int, d: int,
                         cfg: NumericConfig, margin: float = 0.25,
                         seed_offset: int = 0) -> MCEstimate:
    """Orbit pairing with meromorphic normalization.

    When the raw integral at s diverges (or has unsafe Monte Carlo
    variance), the value is defined through the two-variable shift
    relation: each step raises one exponent by 1, replaces the test
    function by the dual operator with negated derivatives applied to it,
    and divides by the orbit sign times kappa times the b-polynomial.
    """
    quad = (n == 1 and d == 1)
    if quad:
        def safe(sp):
            return region_margin(n, d, sp) >= margin
    else:
        def safe(sp):
            return region_margin(n, d, sp) >= margin and _variance_safe(n, d, sp, margin)

    steps = _descent_plan(n, d, s, safe)
    pg = _phi_polygaussian(phi)
    denom = 1.0 + 0.0j
    cur = s
    for step in steps:
        which = "first" if step == "s1" else "second"
        p1, p2 = polyalg._invariant_pair(n, d)
        op = polyalg.dual_operator(p1 if which == "first" else p2)
        kappa = float(polyalg.bs_kappa(n, d, which))
        b = (polyalg.b10_formula if which == "first" else polyalg.b01_formula)(n, d)
        eps = orbit_sign_p1(rho) if which == "first" else orbit_sign_p2(rho)
        denom *= eps * kappa * b.eval_complex(cur.s1, cur.s2)
        pg = pg.apply_operator(op, negate=True)
        cur = cur + ((1, 0) if step == "s1" else (0, 1))

    est = _pair_orbit_raw(rho, cur, pg, n, d, cfg, seed_offset)
    return est.scaled(1.0 / denom)


def K_rho_pairing(rho: OrbitParam, s: ComplexPair, phi, n: int, d: int,
                  cfg: NumericConfig = FULL, margin: float = 0.25,
                  seed_offset: int = 0) -> MCEstimate:
    """Pairing of the orbit kernel |P1|^{s1} |P2|^{s2} 1_{O_rho} with phi."""
    rho.validate(n, d)
    return pair_orbit_continued(rho, s, phi, n, d, cfg, margin, seed_offset)


def zeta_integral(phi, s: ComplexPair, n: int, d: int,
                  cfg: NumericConfig = FULL, margin: float = 0.25,
                  extend: bool = False) -> MCEstimate:
    """The zeta integral over the enhanced positive cone.

    Tensor quadrature for n = d = 1, importance-sampled Monte Carlo with a
    Wishart x matrix-Gaussian proposal otherwise.  By default s must lie
    inside the convergence region with ``margin`` slack (ConvergenceError
    otherwise); with ``extend=True`` values outside the region are defined
    through shift-relation continuation steps.
    """
    if not extend:
        require_convergent(n, d, s, min(margin, 0.05))
    rho_plus = OrbitParam(n, 0, d, 0)
    return pair_orbit_continued(rho_plus, s, phi, n, d, cfg, margin)


# ---------------------------------------------------------------------------
# Cone Laplace integral and its covariance structure
# ---------------------------------------------------------------------------

def _cone_laplace_mc(n: int, d: int, alpha: float, beta: float, minor_fn,
                     cfg: NumericConfig, seed_offset: int = 0) -> MCEstimate:
    """E-step for integrals of e^{-Tr z} (det z)^alpha F(z)^beta over the cone,
    reported in the trace-form (self-dual) volume."""
    if alpha <= -1.0:
        raise ConvergenceError("need alpha > -1 for the Wishart proposal")
    dof = n + 1 + 2.0 * alpha
    prop = ConeProposal(n, dof, 0.5)
    lognorm = (n * (n - 1) / 4.0) * math.log(math.pi) \
        + float(specfun.multi_log_gamma(n, alpha + (n + 1) / 2.0).real)
    bridge = 2.0 ** (n * (n - 1) / 4.0)

    def draw(rng, m):
        return (prop.sample(rng, m),)

    def integrand(z):
        vals = minor_fn(z)
        if np.any(vals <= 0.0):
            raise NonFiniteSampleError("nonpositive cone functional under the proposal")
        return np.exp(beta * np.log(vals) + lognorm) * bridge

    return mc_run(draw, integrand, cfg.samples, cfg.seed + seed_offset, cfg.block)


def gamma_const_integral_mc(n: int, d: int, alpha: float, beta: float,
                            cfg: NumericConfig = FULL, seed_offset: int = 0) -> MCEstimate:
    """Monte Carlo value of the cone integral of e^{-Tr z} Delta_n^alpha Delta_d^beta.

    Reported in the trace-form volume so that the closed form
    :func:`enhanced_zeta.specfun.gindikin_gamma` is the exact oracle.  The
    Wishart proposal absorbs the (det z)^alpha factor, so at beta = 0 the
    estimate is exact up to roundoff.
    """
    if not 1 <= d <= n:
        raise ValueError("need 1 <= d <= n")
    if alpha + beta <= -(n + 1) / 2.0 + 0.75:
        raise ConvergenceError("(alpha, beta) too close to the divergence region")

    def minor(z):
        return np.linalg.det(z[:, :d, :d]) if d < n else np.linalg.det(z)

    return _cone_laplace_mc(n, d, alpha, beta, minor, cfg, seed_offset)


def phi_covariance_check(n: int, d: int, alpha: float, beta: float,
                         x: np.ndarray, cfg: NumericConfig = FULL,
                         tol: float = 0.05, rng_seed: int = 7) -> list[CheckResult]:
    """Covariance of Phi(x) = cone integral of e^{-Tr z} (det z)^alpha det(x^T z x)^beta.

    Verifies Phi(x a) = (det a)^{2 beta} Phi(x), invariance under left
    multiplication by an orthogonal u, and the reduction
    Phi(x) = det(x^T x)^beta * gamma(alpha, beta).
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (n, d):
        raise ShapeMismatchError(f"x must be {n} x {d}")
    if np.linalg.matrix_rank(x) < d:
        raise ShapeMismatchError("x must have full column rank")

    def phi_at(xm, off):
        def minor(z):
            return np.linalg.det(np.swapaxes(xm, 0, 1)[None] @ z @ xm[None])
        return _cone_laplace_mc(n, d, alpha, beta, minor, cfg, seed_offset=off)

    rng = np.random.default_rng(rng_seed)
    a = rng.normal(size=(d, d)) + 2.0 * np.eye(d)
    u = np.linalg.qr(rng.normal(size=(n, n)))[0]

    est_x = phi_at(x, 0)
    est_xa = phi_at(x @ a, 1)
    est_ux = phi_at(u @ x, 2)

    out = []
    det_a = float(np.linalg.det(a))
    out.append(_tolerance_check(
        "phi-right-covariance", {"n": n, "d": d, "alpha": alpha, "beta": beta},
        est_xa.value, det_a ** (2.0 * beta) * est_x.value,
        math.hypot(est_xa.stderr, abs(det_a ** (2.0 * beta)) * est_x.stderr), tol))
    out.append(_tolerance_check(
        "phi-left-orthogonal-invariance", {"n": n, "d": d, "alpha": alpha, "beta": beta},
        est_ux.value, est_x.value, math.hypot(est_ux.stderr, est_x.stderr), tol))
    gram = float(np.linalg.det(x.T @ x))
    closed = gram ** beta * specfun.gindikin_gamma(n, d, alpha, beta)
    out.append(_tolerance_check(
        "phi-gamma-reduction", {"n": n, "d": d, "alpha": alpha, "beta": beta},
        est_x.value, closed, est_x.stderr, tol))
    return out


# ---------------------------------------------------------------------------
# Shift relation (meromorphic continuation mechanism)
# ---------------------------------------------------------------------------

def shift_relation_check(n: int, d: int, phi, s: ComplexPair, which: str,
                         cfg: NumericConfig = FULL, tol: float = 1e-3,
                         margin: float = 0.25) -> CheckResult:
    """Verify the shift relation under the integral on the positive cone:

    pairing(K_{s + e_i}, P_i*(-d) phi) = kappa_i b_i(s) pairing(K_s, phi).
    """
    if which not in ("first", "second"):
        raise ValueError("which must be 'first' or 'second'")
    require_convergent(n, d, s, margin)
    shifted = s + ((1, 0) if which == "first" else (0, 1))

    p1, p2 = polyalg._invariant_pair(n, d)
    op = polyalg.dual_operator(p1 if which == "first" else p2)
    kappa = float(polyalg.bs_kappa(n, d, which))
    b = (polyalg.b10_formula if which == "first" else polyalg.b01_formula)(n, d)
    factor = kappa * b.eval_complex(s.s1, s.s2)
    pg = _phi_polygaussian(phi)
    psi = pg.apply_operator(op, negate=True)
    rho_plus = OrbitParam(n, 0, d, 0)
    params = {"n": n, "d": d, "s": str(s), "which": which}

    if n == 1 and d == 1:
        lhs = _pair_quadrature_scalar(psi, shifted, True, cfg.quad_rtol)
        rhs = factor * _pair_quadrature_scalar(pg, s, True, cfg.quad_rtol)
        return _tolerance_check("shift-relation", params, lhs, rhs, 0.0, tol)

    # Shared-sample difference estimate: far lower variance than two
    # independent estimates of nearly equal quantities.
    az, ay = _scale_hints(pg, n, d)
    dof = max(n + 1 + 2 * (s.s1.real + s.s2.real), n - 1 + 0.5)
    z_prop = ConeProposal(n, dof, 1.0 / (math.sqrt(az) * max(dof, 2.0)))
    y_prop = MatGaussianProposal(n, d, math.sqrt(1.0 / (2.0 * ay)) * 1.2)
    orbits = enumerate_orbits(n, d)
    target = orbits.index(rho_plus)

    def draw(rng, m):
        return z_prop.sample(rng, m), y_prop.sample(rng, m)

    def make_integrand(sp, fn):
        def integrand(z, y):
            idx = classify_batch(z, y, orbits)
            mask = idx == target
            k = _kernel_pow(z, y, sp, mask)
            vals = np.zeros(z.shape[0], dtype=complex)
            if np.any(mask):
                vals[mask] = (k[mask] * fn.eval_zy(z[mask], y[mask])
                              * np.exp(-z_prop.logpdf(z[mask]) - y_prop.logpdf(y[mask])))
            return vals
        return integrand

    f_lhs = make_integrand(shifted, psi)
    f_rhs = make_integrand(s, pg)

    def diff_integrand(z, y):
        return f_lhs(z, y) - factor * f_rhs(z, y)

    est_l = mc_run(draw, f_lhs, cfg.samples, cfg.seed, cfg.block)
    est_r = mc_run(draw, f_rhs, cfg.samples, cfg.seed, cfg.block)
    est_d = mc_run(draw, diff_integrand, cfg.samples, cfg.seed, cfg.block)
    return _tolerance_check("shift-relation", params, est_l.value,
                            factor * est_r.value, est_d.stderr, tol,
                            details={"diff": est_d.value})


# ---------------------------------------------------------------------------
# Fourier lemma on the representation space E
# ---------------------------------------------------------------------------

def _e_polygaussian(n: int, d: int, ay: float, center=None, amplitude=1.0) -> PolyGaussian:
    """Gaussian on E = M_{n,d} alone (no z block, all pairing weights 1)."""
    k = n * d
    alphas = np.full(k, float(ay))
    c0 = np.zeros(k) if center is None else np.asarray(center, dtype=float).reshape(k)
    betas = (2.0 * alphas * c0).astype(complex)
    logconst = complex(math.log(amplitude) - np.sum(alphas * c0 * c0))
    return PolyGaussian(alphas, betas, logconst, {(0,) * k: 1.0 + 0.0j},
                        np.ones(k), None)


def _radial_power_estimate(pg: PolyGaussian, expo: float, m_dim: int,
                           cfg: NumericConfig, seed_offset: int) -> MCEstimate:
    """MC of integral_{R^m} pg(y) ||y||^{2 expo} dy with the radial power
    absorbed into the proposal (finite variance through the origin)."""
    shape = expo + m_dim / 2.0
    if shape <= 0:
        raise ConvergenceError(f"radial exponent {expo} too negative for dimension {m_dim}")
    c = float(np.min(pg.alphas.real)) / 2.0
    # proposal density: C^{-1} ||y||^{2 expo} e^{-c ||y||^2}, C below.
    log_c_norm = (math.lgamma(shape) - shape * math.log(c)
                  + (m_dim / 2.0) * math.log(math.pi) - math.lgamma(m_dim / 2.0))

    def draw(rng, m):
        g = rng.gamma(shape, 1.0, size=m)
        r = np.sqrt(g / c)
        v = rng.standard_normal((m, m_dim))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        return (r[:, None] * v,)

    def integrand(y):
        vals = pg.eval_coords(y)
        r2 = np.sum(y * y, axis=-1)
        return vals * np.exp(c * r2 + log_c_norm)

    return mc_run(draw, integrand, cfg.samples, cfg.seed + seed_offset, cfg.block)


def _e_power_integral_quad(pg: PolyGaussian, expo: float, m_dim: int,
                           rtol: float) -> complex:
    """Quadrature of integral pg(y) ||y||^{2 expo} dy for m_dim in {1, 2, 3}."""
    if m_dim == 1:
        az = float(pg.alphas[0].real)
        b = complex(pg.betas[0])
        total = 0.0 + 0.0j
        for (e,), c in pg.poly.items():
            total += c * (half_moment(e + 2 * expo, az, b, rtol)
                          + (-1) ** e * half_moment(e + 2 * expo, az, -b, rtol))
        return total * cmath.exp(pg.logconst)
    # polar quadrature: smooth in the angles, power-weighted in the radius
    n_ang = 96
    if m_dim == 2:
        theta = (np.arange(n_ang) + 0.5) * (2.0 * math.pi / n_ang)
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        ang_w = np.full(n_ang, 2.0 * math.pi / n_ang)
    else:
        mu, wmu = np.polynomial.legendre.leggauss(48)
        theta = (np.arange(n_ang) + 0.5) * (2.0 * math.pi / n_ang)
        st = np.sqrt(1.0 - mu ** 2)
        dirs = np.stack(np.broadcast_arrays(
            st[:, None] * np.cos(theta)[None, :],
            st[:, None] * np.sin(theta)[None, :],
            mu[:, None] * np.ones_like(theta)[None, :]), axis=-1).reshape(-1, 3)
        ang_w = (wmu[:, None] * np.full(n_ang, 2.0 * math.pi / n_ang)[None, :]).reshape(-1)
    alpha = float(np.min(pg.alphas.real))
    bmax = float(np.max(np.abs(pg.betas)))

    def fn(r):
        pts = r[:, None, None] * dirs[None, :, :]
        vals = pg.eval_coords(pts)
        return (vals * ang_w[None, :]).sum(axis=1) * r ** (2.0 * expo + m_dim - 1)

    return half_line_integral(fn, 2.0 * expo + m_dim - 1, alpha, bmax, rtol)


def clerc_check(n: int, d: int, alpha: float, psi, cfg: NumericConfig = FULL,
                tol: float = 1e-4, method: str = "auto") -> CheckResult:
    """Fourier identity for the determinant of the quadratic map y -> y^T y:

    integral psi_hat(y) det(y^T y)^alpha dy
      = pi^{-2d(alpha + n/4)} Gamma_d(alpha + n/2)/Gamma_d(-alpha)
        * integral psi(x) det(x^T x)^{-alpha - n/2} dx.

    Implemented for d = 1 (n <= 3), where det(y^T y) = ||y||^2.  The Fourier
    convention matches the package-wide one (see module docstring); this
    differs from other normalizations in the literature.
    """
    if d != 1 or n > 3:
        raise UnsupportedCaseError("clerc_check implemented for d = 1, n <= 3")
    if not -n / 2.0 < alpha < 0.0:
        raise ConvergenceError(f"alpha = {alpha} outside the two-sided strip (-n/2, 0)")
    m_dim = n * d
    if isinstance(psi, GaussianTestFn):
        center = None if psi.center_y is None else psi.center_y
        pg = _e_polygaussian(n, d, psi.ay, center, psi.amplitude)
    elif isinstance(psi, PolyGaussian) and psi.cs is None:
        pg = psi
    else:
        raise UnsupportedCaseError("psi must be a Gaussian on E")
    pg_hat = pg.fourier()
    beta_exp = -alpha - n / 2.0
    gfac = cmath.exp(
        -2.0 * d * (alpha + n / 4.0) * math.log(math.pi)
        + specfun.multi_log_gamma(d, alpha + n / 2.0)
        - specfun.multi_log_gamma(d, -alpha))
    params = {"n": n, "d": d, "alpha": alpha}

    if method == "auto":
        method = "quadrature" if m_dim <= 3 else "monte-carlo"
    if method == "quadrature":
        lhs = _e_power_integral_quad(pg_hat, alpha, m_dim, cfg.quad_rtol)
        rhs = gfac * _e_power_integral_quad(pg, beta_exp, m_dim, cfg.quad_rtol)
        return _tolerance_check("clerc-lemma", params, lhs, rhs, 0.0, tol)
    est_l = _radial_power_estimate(pg_hat, alpha, m_dim, cfg, 0)
    est_r = _radial_power_estimate(pg, beta_exp, m_dim, cfg, 1)
    stderr = math.hypot(est_l.stderr, abs(gfac) * est_r.stderr)
    return _tolerance_check("clerc-lemma", params, est_l.value,
                            gfac * est_r.value, stderr, tol)
