"""Dense real linear algebra on the space W = Sym_n(R) (+) M_{n,d}(R).

Value types are immutable wrappers around numpy arrays.  The supported
regime is desk scale (n <= 8); everything is stored dense.

Coordinates on W are the independent matrix entries z_ij (i <= j) followed
by y_ab in row-major order.  Under the trace pairing
``<(z, y), (w, x)> = Tr(z w) + Tr(y^T x)`` an off-diagonal coordinate of
the symmetric block carries weight 2; :func:`coord_system` records those
weights once so that Fourier and polynomial machinery elsewhere agree on
the convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotPositiveDefiniteError, ShapeMismatchError

#: Relative scale for treating an eigenvalue as zero in rank decisions.
RANK_TOL = 1e-10

#: Largest supported matrix size for the dense desk-scale routines.
MAX_N = 8


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric n x n matrix, symmetrized on construction."""

    data: np.ndarray

    def __init__(self, data):
        a = np.asarray(data, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeMismatchError(f"expected square matrix, got shape {a.shape}")
        object.__setattr__(self, "data", _frozen((a + a.T) / 2.0))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @staticmethod
    def identity(n: int) -> "SymMatrix":
        return SymMatrix(np.eye(n))

    @staticmethod
    def diag(values) -> "SymMatrix":
        return SymMatrix(np.diag(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class RectMatrix:
    """Real n x d matrix."""

    data: np.ndarray

    def __init__(self, data):
        a = np.asarray(data, dtype=float)
        if a.ndim != 2:
            raise ShapeMismatchError(f"expected 2-d array, got shape {a.shape}")
        object.__setattr__(self, "data", _frozen(a))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class EnhancedPoint:
    """A point (z, y) of W with consistent row dimension."""

    z: SymMatrix
    y: RectMatrix

    def __post_init__(self):
        if self.z.n != self.y.n:
            raise ShapeMismatchError(
                f"z is {self.z.n}x{self.z.n} but y has {self.y.n} rows"
            )

    @property
    def n(self) -> int:
        return self.z.n

    @property
    def d(self) -> int:
        return self.y.d

    @staticmethod
    def of(z, y) -> "EnhancedPoint":
        return EnhancedPoint(SymMatrix(z), RectMatrix(y))


@dataclass(frozen=True)
class Signature:
    """Counts of positive and negative eigenvalues."""

    p: int
    q: int

    def is_regular(self, n: int) -> bool:
        return self.p + self.q == n

    def as_tuple(self) -> tuple[int, int]:
        return (self.p, self.q)


@dataclass(frozen=True)
class GroupElement:
    """An element (g, h) of GL_n(R) x GL_d(R)."""

    g: np.ndarray
    h: np.ndarray

    def __init__(self, g, h):
        g = _frozen(g)
        h = _frozen(h)
        for name, m in (("g", g), ("h", h)):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ShapeMismatchError(f"{name} must be square, got {m.shape}")
            if abs(np.linalg.det(m)) < 1e-12:
                raise ShapeMismatchError(f"{name} is numerically singular")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "h", h)


def signature(z: SymMatrix, tol_scale: float = RANK_TOL) -> Signature:
    """Inertia (p, q) of a symmetric matrix by eigenvalue count.

    Eigenvalues within ``tol_scale * max|entry|`` of zero are counted in
    neither p nor q, so p + q < n flags a numerically singular matrix.
    """
    a = z.data
    scale = np.max(np.abs(a)) if a.size else 0.0
    tol = tol_scale * scale
    w = np.linalg.eigvalsh(a)
    p = int(np.sum(w > tol))
    q = int(np.sum(w < -tol))
    return Signature(p, q)


def principal_minor(z: SymMatrix, k: int) -> float:
    """Determinant of the top-left k x k block; k = 0 gives 1."""
    if not 0 <= k <= z.n:
        raise ValueError(f"minor order {k} out of range for n={z.n}")
    if k == 0:
        return 1.0
    return float(np.linalg.det(z.data[:k, :k]))


def inner_product(a: EnhancedPoint, b: EnhancedPoint) -> float:
    """Trace pairing Tr(z w) + Tr(y^T x) of two points."""
    if a.n != b.n or a.d != b.d:
        raise ShapeMismatchError("points live on different spaces")
    return float(np.sum(a.z.data * b.z.data) + np.sum(a.y.data * b.y.data))


def borel_factor(z: SymMatrix) -> np.ndarray:
    """Lower-triangular g with positive diagonal and z = g^T g.

    Requires z positive definite; the factor lives in the lower
    triangular Borel subgroup.  Computed as a reversed Cholesky:
    with J the anti-diagonal permutation, chol(J z J) = L gives
    g = (J L J)^T.
    """
    sig = signature(z)
    if not (sig.p == z.n and sig.q == 0):
        raise NotPositiveDefiniteError(sig)
    rev = np.array(z.data[::-1, ::-1])
    low = np.linalg.cholesky(rev)
    return low[::-1, ::-1].T.copy()


def sample_omega(n: int, rng: np.random.Generator) -> SymMatrix:
    """Draw a positive definite matrix from Wishart(n + 1, I).

    Uses the Bartlett construction so that the density with respect to
    Lebesgue measure on the independent entries is known in closed form
    (see :mod:`enhanced_zeta.zetanum` for the importance-sampling use).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = np.zeros((n, n))
    dof = n + 1
    for i in range(n):
        a[i, i] = np.sqrt(rng.chisquare(dof - i))
        for j in range(i):
            a[i, j] = rng.standard_normal()
    return SymMatrix(a @ a.T)


def group_action(elem: GroupElement, point: EnhancedPoint) -> EnhancedPoint:
    """The action (g, h) . (z, y) = (g z g^T, g y h^T)."""
    g, h = elem.g, elem.h
    if g.shape[0] != point.n or h.shape[0] != point.d:
        raise ShapeMismatchError("group element does not match the point's shape")
    return EnhancedPoint.of(g @ point.z.data @ g.T, g @ point.y.data @ h.T)


# ---------------------------------------------------------------------------
# Coordinate system on W
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoordSystem:
    """Flat coordinates on W: z_ij (i <= j) row-major, then y_ab row-major.

    ``weights[k]`` is the coefficient of coordinate k in the trace pairing
    (2 for off-diagonal z entries, 1 otherwise).
    """

    n: int
    d: int
    names: tuple[str, ...]
    weights: np.ndarray
    z_pairs: tuple[tuple[int, int], ...] = field(repr=False)

    @property
    def dim_z(self) -> int:
        return self.n * (self.n + 1) // 2

    @property
    def dim(self) -> int:
        return self.dim_z + self.n * self.d


def coord_system(n: int, d: int) -> CoordSystem:
    names = []
    weights = []
    z_pairs = []
    for i in range(n):
        for j in range(i, n):
            names.append(f"z{i + 1}{j + 1}")
            weights.append(1.0 if i == j else 2.0)
            z_pairs.append((i, j))
    for a in range(n):
        for b in range(d):
            names.append(f"y{a + 1}{b + 1}")
            weights.append(1.0)
    return CoordSystem(n, d, tuple(names), _frozen(np.array(weights)), tuple(z_pairs))


def sym_to_coords(z: np.ndarray, n: int) -> np.ndarray:
    """Upper-triangle coordinates of a (stack of) symmetric matrices."""
    iu = np.triu_indices(n)
    return np.asarray(z)[..., iu[0], iu[1]]


def coords_to_sym(c: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`sym_to_coords` (works on stacks)."""
    c = np.asarray(c)
    out = np.zeros(c.shape[:-1] + (n, n))
    iu = np.triu_indices(n)
    out[..., iu[0], iu[1]] = c
    il = np.tril_indices(n, -1)
    out[..., il[0], il[1]] = np.swapaxes(out, -1, -2)[..., il[0], il[1]]
    return out


def point_to_coords(point: EnhancedPoint) -> np.ndarray:
    z = sym_to_coords(point.z.data, point.n)
    return np.concatenate([z, point.y.data.reshape(-1)])


def coords_to_point(c: np.ndarray, n: int, d: int) -> EnhancedPoint:
    dz = n * (n + 1) // 2
    z = coords_to_sym(c[:dz], n)
    y = np.asarray(c[dz:]).reshape(n, d)
    return EnhancedPoint.of(z, y)
