"""Relative invariants P1, P2, open-orbit classification and enumeration.

P1(z, y) = det z and P2(z, y) = (-1)^d det [[z, y], [y^T, 0]] are the two
fundamental relative invariants on W; their characters under the group
action are (det g)^2 and (det g)^2 (det h)^2.  Open orbits are labelled by
the signature of z together with the signature of y^T z^{-1} y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotOpenOrbitError, ShapeMismatchError
from .linalg import EnhancedPoint, RANK_TOL, SymMatrix, signature


@dataclass(frozen=True)
class OrbitParam:
    """Open-orbit label (p, q; p', q'): p + q = n, p' + q' = d, p' <= p, q' <= q.

    Attribute names ``pp`` and ``qq`` stand for p' and q'.
    """

    p: int
    q: int
    pp: int
    qq: int

    def validate(self, n: int, d: int) -> None:
        ok = (
            self.p >= 0 and self.q >= 0 and self.pp >= 0 and self.qq >= 0
            and self.p + self.q == n
            and self.pp + self.qq == d
            and self.pp <= self.p
            and self.qq <= self.q
        )
        if not ok:
            raise ValueError(f"{self} is not a valid orbit label for (n, d) = ({n}, {d})")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.p, self.q, self.pp, self.qq)

    def __str__(self) -> str:
        return f"({self.p},{self.q};{self.pp},{self.qq})"


@dataclass(frozen=True)
class ComplexPair:
    """The exponent pair s = (s1, s2)."""

    s1: complex
    s2: complex

    def as_tuple(self) -> tuple[complex, complex]:
        return (self.s1, self.s2)

    def __add__(self, other) -> "ComplexPair":
        o1, o2 = other if isinstance(other, tuple) else (other.s1, other.s2)
        return ComplexPair(self.s1 + o1, self.s2 + o2)

    def __str__(self) -> str:
        return f"({self.s1}, {self.s2})"


def P1(point: EnhancedPoint) -> float:
    """det z."""
    return float(np.linalg.det(point.z.data))


def P2(point: EnhancedPoint) -> float:
    """(-1)^d times the bordered determinant det [[z, y], [y^T, 0]]."""
    n, d = point.n, point.d
    if d > n:
        raise ShapeMismatchError("P2 requires d <= n (it vanishes identically otherwise)")
    m = np.zeros((n + d, n + d))
    m[:n, :n] = point.z.data
    m[:n, n:] = point.y.data
    m[n:, :n] = point.y.data.T
    return float((-1) ** d * np.linalg.det(m))


def gram_via_solve(point: EnhancedPoint) -> np.ndarray:
    """y^T z^{-1} y via a symmetric-indefinite solve (no explicit inverse)."""
    zy = scipy.linalg.solve(point.z.data, point.y.data, assume_a="sym")
    m = point.y.data.T @ zy
    return (m + m.T) / 2.0


def P2_via_inverse(point: EnhancedPoint) -> float:
    """det z * det(y^T z^{-1} y); requires z regular.

    Agrees with :func:`P2` on regular points and exists only to cross-check
    the bordered-determinant route.
    """
    sig = signature(point.z)
    if not sig.is_regular(point.n):
        raise NotOpenOrbitError(f"z is singular within tolerance (signature {sig.as_tuple()})")
    return float(np.linalg.det(point.z.data) * np.linalg.det(gram_via_solve(point)))


def classify_orbit(point: EnhancedPoint, tol_scale: float = RANK_TOL) -> OrbitParam:
    """Open-orbit label of a point, or NotOpenOrbitError near the boundary.

    The label is (sgn z; sgn y^T z^{-1} y).  Classification refuses rather
    than guesses when either matrix is singular within tolerance.
    """
    n, d = point.n, point.d
    sig_z = signature(point.z, tol_scale)
    if not sig_z.is_regular(n):
        raise NotOpenOrbitError(f"z singular within tolerance: signature {sig_z.as_tuple()}")
    gram = SymMatrix(gram_via_solve(point))
    sig_m = signature(gram, tol_scale)
    if not sig_m.is_regular(d):
        raise NotOpenOrbitError(
            f"y^T z^-1 y singular within tolerance: signature {sig_m.as_tuple()}"
        )
    rho = OrbitParam(sig_z.p, sig_z.q, sig_m.p, sig_m.q)
    rho.validate(n, d)
    return rho


def enumerate_orbits(n: int, d: int) -> list[OrbitParam]:
    """All open-orbit labels for (n, d), ordered by increasing (q, q')."""
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got (n, d) = ({n}, {d})")
    out = []
    for q in range(n + 1):
        p = n - q
        for qq in range(d + 1):
            pp = d - qq
            if pp <= p and qq <= q:
                out.append(OrbitParam(p, q, pp, qq))
    return out


def orbit_representative(rho: OrbitParam, n: int, d: int) -> EnhancedPoint:
    """The standard representative (z0, y0) of the orbit O_rho.

    z0 = diag(1_p, -1_q); y0 carries a p' x p' identity block in its first
    rows and a q' x q' identity block in its last rows.
    """
    rho.validate(n, d)
    z0 = np.diag(np.concatenate([np.ones(rho.p), -np.ones(rho.q)]))
    y0 = np.zeros((n, d))
    for k in range(rho.pp):
        y0[k, k] = 1.0
    for k in range(rho.qq):
        y0[n - rho.qq + k, rho.pp + k] = 1.0
    return EnhancedPoint.of(z0, y0)


def orbit_sign_p1(rho: OrbitParam) -> int:
    """Sign of P1 on O_rho."""
    return -1 if rho.q % 2 else 1


def orbit_sign_p2(rho: OrbitParam) -> int:
    """Sign of P2 on O_rho."""
    return -1 if (rho.q + rho.qq) % 2 else 1


# ---------------------------------------------------------------------------
# Vectorized classification for the Monte Carlo engine
# ---------------------------------------------------------------------------

def classify_batch(z: np.ndarray, y: np.ndarray, orbits: list[OrbitParam],
                   tol_scale: float = RANK_TOL) -> np.ndarray:
    """Orbit index (into ``orbits``) for stacks of points; -1 if not open.

    ``z`` has shape (N, n, n) symmetric, ``y`` shape (N, n, d).
    """
    n = z.shape[-1]
    d = y.shape[-1]
    scale = np.max(np.abs(z), axis=(-2, -1))
    tol = tol_scale * scale
    wz = np.linalg.eigvalsh(z)
    p = np.sum(wz > tol[:, None], axis=-1)
    q = np.sum(wz < -tol[:, None], axis=-1)
    regular = (p + q) == n

    idx = np.full(z.shape[0], -1, dtype=np.int64)
    safe = np.where(regular[:, None, None], z, np.eye(n))
    gram = np.swapaxes(y, -1, -2) @ np.linalg.solve(safe, y)
    gram = (gram + np.swapaxes(gram, -1, -2)) / 2.0
    gscale = np.max(np.abs(gram), axis=(-2, -1))
    gtol = tol_scale * gscale
    wm = np.linalg.eigvalsh(gram)
    pp = np.sum(wm > gtol[:, None], axis=-1)
    qq = np.sum(wm < -gtol[:, None], axis=-1)
    open_pt = regular & ((pp + qq) == d)

    lookup = {rho.as_tuple(): k for k, rho in enumerate(orbits)}
    keys = np.stack([p, q, pp, qq], axis=-1)
    for i in np.nonzero(open_pt)[0]:
        idx[i] = lookup.get(tuple(int(v) for v in keys[i]), -1)
    return idx
