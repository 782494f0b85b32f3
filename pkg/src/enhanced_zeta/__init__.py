"""Verification and computation toolkit for the two-variable zeta
distribution on the enhanced positive symmetric cone.

The package expands and checks the relative invariants and their
Bernstein-Sato identities exactly, evaluates the gamma factors and
constants in closed form, and numerically verifies the meromorphic
continuation and Fourier functional equations at desk scale.
"""

__version__ = "0.1.0"

from . import errors, functional_eq, polyalg, specfun, zetanum
from .linalg import (
    EnhancedPoint,
    GroupElement,
    RectMatrix,
    Signature,
    SymMatrix,
    borel_factor,
    group_action,
    inner_product,
    principal_minor,
    sample_omega,
    signature,
)
from .invariants import (
    ComplexPair,
    OrbitParam,
    P1,
    P2,
    P2_via_inverse,
    classify_orbit,
    enumerate_orbits,
    orbit_representative,
)
from .zetanum import (
    ConeCutoffFn,
    GaussianTestFn,
    K_rho_pairing,
    MCEstimate,
    NumericConfig,
    fourier_gaussian,
    gamma_const_integral_mc,
    zeta_integral,
)

__all__ = [
    "errors",
    "polyalg",
    "specfun",
    "zetanum",
    "functional_eq",
    "GaussianTestFn",
    "ConeCutoffFn",
    "MCEstimate",
    "NumericConfig",
    "fourier_gaussian",
    "zeta_integral",
    "K_rho_pairing",
    "gamma_const_integral_mc",
    "SymMatrix",
    "RectMatrix",
    "EnhancedPoint",
    "Signature",
    "GroupElement",
    "signature",
    "principal_minor",
    "inner_product",
    "borel_factor",
    "sample_omega",
    "group_action",
    "OrbitParam",
    "ComplexPair",
    "P1",
    "P2",
    "P2_via_inverse",
    "classify_orbit",
    "enumerate_orbits",
    "orbit_representative",
    "__version__",
]
