"""Branch-correct quartic coordinates and the boundary polynomial Omega.

Every spectral quantity of the half-line model is a rational function of the
fourth root zeta of the energy z, taken in the open first quadrant. This module
fixes that branch, describes the self-adjoint boundary-condition families at
x = 0 and builds the degree-four polynomial Omega(zeta) attached to each of them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BranchPointError, UnsupportedFamilyError

SQRT2 = math.sqrt(2.0)
EIGHTH_TURN = cmath.exp(0.25j * math.pi)  # e^{i pi/4}


class Edge(str, Enum):
    OFF_AXIS = "off_axis"
    UPPER = "upper_edge"
    LOWER = "lower_edge"


@dataclass(frozen=True)
class SpectralPoint:
    z: complex
    zeta: complex
    edge: Edge = Edge.OFF_AXIS

    @property
    def k(self) -> float:
        """|z|^{1/4}; equals zeta on the upper edge."""
        return abs(self.zeta)


def branch_zeta(z, edge: Edge | str = Edge.OFF_AXIS) -> SpectralPoint:
    """Fourth root of z with argument in [0, pi/2].

    The cut of the energy plane is [0, inf). Points on the cut need an explicit
    edge: the upper edge lambda + i0 maps to zeta = lambda^{1/4}, the lower edge
    lambda - i0 to zeta = i lambda^{1/4}.
    """
    edge = Edge(edge)
    z = complex(z)
    if z == 0:
        raise BranchPointError("z = 0 is the branch point of the quartic root")
    if edge is not Edge.OFF_AXIS:
        if z.imag != 0 or z.real <= 0:
            raise ValueError(f"edge evaluation requires real positive z, got {z!r}")
        k = z.real ** 0.25
        return SpectralPoint(z, complex(k, 0.0) if edge is Edge.UPPER else complex(0.0, k), edge)
    if z.imag == 0 and z.real > 0:
        raise ValueError("z lies on the cut [0, inf); pass edge='upper_edge' or 'lower_edge'")
    arg = cmath.phase(z)
    if arg < 0:
        arg += 2 * math.pi
    zeta = abs(z) ** 0.25 * cmath.exp(0.25j * arg)
    return SpectralPoint(z, zeta, edge)


def upper_edge(lam: float) -> SpectralPoint:
    return branch_zeta(lam, Edge.UPPER)


class Family(str, Enum):
    GENERIC = "Generic"
    THREE_PARAM = "ThreeParam"
    ONE_PARAM = "OneParam"
    CLAMPED = "Clamped"
    FREE = "Free"
    NAVIER = "NavierH00"


# parameters each family actually reads; the rest must stay zero
_USED_FIELDS = {
    Family.GENERIC: {"alpha", "alpha1", "alpha2"},
    Family.THREE_PARAM: {"alpha", "alpha2"},
    Family.ONE_PARAM: {"alpha1"},
    Family.CLAMPED: set(),
    Family.FREE: set(),
    Family.NAVIER: set(),
}


@dataclass(frozen=True)
class BoundaryConditionSpec:
    """Self-adjoint boundary condition at x = 0.

    Generic:    u'' = alpha u + alpha1 u',  u''' = -alpha2 u - conj(alpha) u'
    ThreeParam: u' = alpha u,  -u''' + conj(alpha) u'' = alpha2 u
    OneParam:   u = 0,  u'' = alpha1 u'
    Clamped:    u = u' = 0
    NavierH00:  u = u'' = 0
    Free:       u' = u''' = 0
    """

    family: Family = Family.GENERIC
    alpha: complex = 0j
    alpha1: float = 0.0
    alpha2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "alpha1", float(self.alpha1))
        object.__setattr__(self, "alpha2", float(self.alpha2))
        used = _USED_FIELDS[self.family]
        for name in ("alpha", "alpha1", "alpha2"):
            if name not in used and getattr(self, name) != 0:
                raise ValueError(f"{self.family.value} boundary condition does not use {name}")
        for name in used:
            if not cmath.isfinite(complex(getattr(self, name))):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def generic(cls, alpha=0j, alpha1=0.0, alpha2=0.0):
        return cls(Family.GENERIC, alpha, alpha1, alpha2)

    @property
    def alpha0(self) -> float:
        return self.alpha1 * self.alpha2 - abs(self.alpha) ** 2

    def conjugated(self) -> "BoundaryConditionSpec":
        """Condition of the complex-conjugate operator (alpha -> conj(alpha))."""
        return BoundaryConditionSpec(self.family, self.alpha.conjugate(), self.alpha1, self.alpha2)

    def boundary_rows(self) -> np.ndarray:
        """2x4 matrix M with M @ (u, u', u'', u''')(0) = 0 encoding the condition."""
        a, a1, a2 = self.alpha, self.alpha1, self.alpha2
        ac = a.conjugate()
        rows = {
            Family.GENERIC: [[-a, -a1, 1, 0], [a2, ac, 0, 1]],
            Family.THREE_PARAM: [[-a, 1, 0, 0], [-a2, 0, ac, -1]],
            Family.ONE_PARAM: [[1, 0, 0, 0], [0, -a1, 1, 0]],
            Family.CLAMPED: [[1, 0, 0, 0], [0, 1, 0, 0]],
            Family.NAVIER: [[1, 0, 0, 0], [0, 0, 1, 0]],
            Family.FREE: [[0, 1, 0, 0], [0, 0, 0, 1]],
        }[self.family]
        return np.array(rows, dtype=complex)

    def residuals(self, u, du, d2u, d3u):
        """Boundary residuals for given values of u and its derivatives at 0."""
        return self.boundary_rows() @ np.array([u, du, d2u, d3u], dtype=complex)


@dataclass(frozen=True)
class OmegaPolynomial:
    """Polynomial sum_j omega[j] zeta^j of degree at most four."""

    omega: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.omega)
        if len(coeffs) != 5:
            raise ValueError("OmegaPolynomial needs exactly five coefficients")
        object.__setattr__(self, "omega", coeffs)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array(self.omega, dtype=complex)

    def __call__(self, zeta):
        return omega_eval(self, zeta)

    def derivative(self, zeta):
        return omega_deriv_eval(self, zeta)

    def scale(self, k):
        """sum_j |omega_j| k^j, the natural magnitude of Omega near |zeta| = k."""
        k = np.abs(k)
        return sum(abs(c) * k ** j for j, c in enumerate(self.omega))


def omega_from_bc(bc: BoundaryConditionSpec) -> OmegaPolynomial:
    a, a1, a2 = bc.alpha, bc.alpha1, bc.alpha2
    fam = bc.family
    if fam is Family.GENERIC:
        c = (bc.alpha0, (1 - 1j) * a2, 2j * a.real, -(1 + 1j) * a1, -1)
    elif fam is Family.THREE_PARAM:
        c = (a2, (1 - 1j) * abs(a) ** 2, -2j * a.real, -(1 + 1j), 0)
    elif fam is Family.ONE_PARAM:
        c = (a1, 1 - 1j, 0, 0, 0)
    elif fam is Family.CLAMPED:
        c = (1, 0, 0, 0, 0)
    elif fam is Family.NAVIER:
        c = (0, 1 - 1j, 0, 0, 0)
    elif fam is Family.FREE:
        c = (0, 0, 0, -(1 + 1j), 0)
    else:  # pragma: no cover
        raise UnsupportedFamilyError(fam)
    return OmegaPolynomial(c)


def omega_eval(p: OmegaPolynomial, zeta):
    # np.polyval is Horner with highest degree first
    return np.polyval(p.coefficients[::-1], zeta)


def omega_deriv_eval(p: OmegaPolynomial, zeta):
    c = p.coefficients
    return np.polyval((c[1:] * np.arange(1, 5))[::-1], zeta)


def gamma_indices(p: OmegaPolynomial, rel_tol: float = 1e-12) -> tuple[int, int]:
    """Lowest and highest index of a coefficient that is numerically nonzero."""
    mags = np.abs(p.coefficients)
    top = mags.max()
    if top == 0:
        raise ValueError("gamma indices undefined for the zero polynomial")
    nz = np.nonzero(mags > rel_tol * top)[0]
    return int(nz[0]), int(nz[-1])


def interaction_matrix(bc: BoundaryConditionSpec) -> np.ndarray:
    """Hermitian matrix [[alpha2, conj(alpha)], [alpha, alpha1]]."""
    if bc.family is not Family.GENERIC:
        raise UnsupportedFamilyError("interaction matrix is defined for the Generic family only")
    return np.array([[bc.alpha2, bc.alpha.conjugate()], [bc.alpha, bc.alpha1]], dtype=complex)


def matrix_A_signature(bc: BoundaryConditionSpec) -> tuple[int, int, int]:
    """Inertia (n_neg, n_zero, n_pos) of the interaction matrix.

    An eigenvalue counts as zero only when it is below the rounding error of
    its own evaluation, so tiny but genuine eigenvalues keep their sign.
    """
    if bc.family is not Family.GENERIC:
        raise UnsupportedFamilyError("interaction matrix is defined for the Generic family only")
    eps = np.finfo(float).eps
    # signs are scale invariant; normalising keeps det from underflowing
    norm = max(abs(bc.alpha1), abs(bc.alpha2), abs(bc.alpha))
    if norm == 0:
        return (0, 2, 0)
    a1, a2, am = bc.alpha1 / norm, bc.alpha2 / norm, abs(bc.alpha) / norm
    tr = a1 + a2
    det = a1 * a2 - am * am
    disc = math.hypot(a2 - a1, 2 * am)
    big = 0.5 * (tr + math.copysign(disc, tr)) if (tr or disc) else 0.0
    small = det / big if big != 0 else 0.0
    big_err = 8 * eps * (abs(a1) + abs(a2) + 2 * am)
    small_err = 8 * eps * (abs(a1 * a2) + am * am) / abs(big) if big != 0 else 0.0
    counts = [0, 0, 0]
    for ev, err in ((big, big_err), (small, small_err)):
        counts[0 if ev < -err else (2 if ev > err else 1)] += 1
    return tuple(counts)


def ray_quartic(bc: BoundaryConditionSpec):
    """Real quartic coefficients (highest first) of Omega(e^{i pi/4} k) for Generic bc."""
    if bc.family is not Family.GENERIC:
        raise UnsupportedFamilyError("ray quartic is defined for the Generic family only")
    return np.array([1.0, SQRT2 * bc.alpha1, -2 * bc.alpha.real, SQRT2 * bc.alpha2, bc.alpha0])
