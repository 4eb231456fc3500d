"""Exact resolvent, spectrum and scattering data of D^4 on the half-line.

The resolvent of the operator with a boundary condition at 0 is the Navier
resolvent R00 (u(0) = u''(0) = 0) plus a rank-two correction

    P(x, y) = (p11 e^{i zeta x} + p12 e^{-zeta x}) e^{i zeta y}
            + (p21 e^{i zeta x} + p22 e^{-zeta x}) e^{-zeta y}

whose coefficients solve a 2x2 linear system. For the Generic family the
system is solved in closed form with the polynomial Omega as denominator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import ConsistencyError, NearEigenvalueError, UnsupportedFamilyError
from .quartic_core import (
    SQRT2,
    BoundaryConditionSpec,
    Family,
    SpectralPoint,
    branch_zeta,
    gamma_indices,
    matrix_A_signature,
    omega_deriv_eval,
    omega_eval,
    omega_from_bc,
    upper_edge,
)

KREIN_PREFACTOR = 2 ** -1.5 * cmath.exp(-0.25j * math.pi)
EIGEN_GUARD = 1e-10


@dataclass(frozen=True)
class KernelCoefficients:
    p11: complex
    p12: complex
    p21: complex
    p22: complex

    def as_matrix(self):
        return np.array([[self.p11, self.p12], [self.p21, self.p22]])


class EigenKind(str, Enum):
    NEGATIVE = "negative"
    POSITIVE_EMBEDDED = "positive_embedded"


@dataclass(frozen=True)
class EigenvalueRecord:
    lam: float
    k: float
    multiplicity: int
    kind: EigenKind


@dataclass(frozen=True)
class ScatteringPoint:
    lam: float
    s: complex
    b: complex


class Resonance(str, Enum):
    NONE = "None"
    QUARTER = "QuarterBound"
    THREE_QUARTER = "ThreeQuarterBound"
    BOTH = "Both"


_JUMP = {
    Resonance.NONE: Fraction(0),
    Resonance.QUARTER: Fraction(-1, 4),
    Resonance.THREE_QUARTER: Fraction(-3, 4),
    Resonance.BOTH: Fraction(-1),
}


@dataclass(frozen=True)
class ResonanceClass:
    kind: Resonance
    expected_ssf_jump: Fraction


def _zeta(sp) -> complex:
    return sp.zeta if isinstance(sp, SpectralPoint) else branch_zeta(sp).zeta


def omega_guard(bc: BoundaryConditionSpec, zeta: complex) -> complex:
    """Omega(zeta), raising when it is numerically zero."""
    poly = omega_from_bc(bc)
    val = complex(omega_eval(poly, zeta))
    if abs(val) < EIGEN_GUARD * poly.scale(zeta):
        raise NearEigenvalueError(f"Omega vanishes at zeta={zeta:.6g}: z={zeta ** 4:.6g} is an eigenvalue",
                                  eigenvalue=zeta ** 4)
    return val


# --- kernels -----------------------------------------------------------------

def r00_kernel(x, y, sp) -> complex:
    """Resolvent kernel of D^4 on (0, inf) with u(0) = u''(0) = 0."""
    zeta = _zeta(sp)
    d = np.abs(np.subtract(x, y))
    s = np.add(x, y)
    val = (1j * np.exp(1j * zeta * d) - np.exp(-zeta * d)
           - 1j * np.exp(1j * zeta * s) + np.exp(-zeta * s))
    return val / (4 * zeta ** 3)


def _navier_boundary_data(zeta):
    """Boundary values (u, u', u'', u''')(0) of R00 f per unit Q+ f and Q- f."""
    plus = np.array([0, 1 / (2 * zeta ** 2), 0, -0.5], dtype=complex)
    minus = np.array([0, -1 / (2 * zeta ** 2), 0, -0.5], dtype=complex)
    return plus, minus


def kernel_coefficients_linear(bc: BoundaryConditionSpec, sp) -> KernelCoefficients:
    """Correction coefficients from the boundary-value linear system (any family)."""
    return _linear_coefficients(bc, _zeta(sp))


def _linear_coefficients(bc, zeta):
    M = bc.boundary_rows()
    osc = np.array([1, 1j * zeta, -zeta ** 2, -1j * zeta ** 3])   # e^{i zeta x} at 0
    dec = np.array([1, -zeta, zeta ** 2, -zeta ** 3])             # e^{-zeta x} at 0
    G = np.column_stack([M @ osc, M @ dec])
    plus, minus = _navier_boundary_data(zeta)
    rhs = -np.column_stack([M @ plus, M @ minus])
    sol = np.linalg.solve(G, rhs)
    return KernelCoefficients(sol[0, 0], sol[1, 0], sol[0, 1], sol[1, 1])


def kernel_coefficients(bc: BoundaryConditionSpec, sp) -> KernelCoefficients:
    return _coefficients(bc, _zeta(sp))


def _coefficients(bc, zeta):
    fam = bc.family
    if fam is Family.NAVIER:
        return KernelCoefficients(0j, 0j, 0j, 0j)
    if fam is Family.CLAMPED:
        c = (1j - 1) / (4 * zeta ** 3)
        return KernelCoefficients(c, -c, -c, c)
    if fam is Family.FREE:
        return KernelCoefficients(1j / (2 * zeta ** 3), 0j, 0j, -1 / (2 * zeta ** 3))
    omega = omega_guard(bc, zeta)
    if fam is not Family.GENERIC:
        return _linear_coefficients(bc, zeta)
    a0, a1 = bc.alpha0, bc.alpha1
    re, im = bc.alpha.real, bc.alpha.imag
    z2, z3, z4 = zeta ** 2, zeta ** 3, zeta ** 4
    num = (
        -a0 - 2 * re * z2 + 2 * a1 * z3 + z4,
        a0 + 2j * im * z2 + z4,
        a0 - 2j * im * z2 + z4,
        -a0 + 2 * re * z2 + 2j * a1 * z3 + z4,
    )
    pref = KREIN_PREFACTOR / (z3 * omega)
    return KernelCoefficients(*(pref * n for n in num))


def correction_kernel(bc, x, y, sp) -> complex:
    zeta = _zeta(sp)
    p = _coefficients(bc, zeta)
    ox, dx = np.exp(1j * zeta * np.asarray(x)), np.exp(-zeta * np.asarray(x))
    oy, dy = np.exp(1j * zeta * np.asarray(y)), np.exp(-zeta * np.asarray(y))
    return (p.p11 * ox + p.p12 * dx) * oy + (p.p21 * ox + p.p22 * dx) * dy


def resolvent_kernel(bc, x, y, sp) -> complex:
    """Kernel R(x, y; z) of the resolvent of D^4 with boundary condition bc."""
    return r00_kernel(x, y, sp) + correction_kernel(bc, x, y, sp)


def trace_resolvent_diff(bc: BoundaryConditionSpec, sp) -> complex:
    """Tr(R(z) - R_clamped(z)) = -Omega'(zeta) / (4 zeta^3 Omega(zeta))."""
    zeta = _zeta(sp)
    omega = omega_guard(bc, zeta)
    return -complex(omega_deriv_eval(omega_from_bc(bc), zeta)) / (4 * zeta ** 3 * omega)


# --- eigenvalues -------------------------------------------------------------

def _require_generic(bc):
    if bc.family is not Family.GENERIC:
        raise UnsupportedFamilyError(f"{bc.family.value}: operation defined for the Generic family")


def double_eigenvalue_root(bc: BoundaryConditionSpec, tol: float = 1e-10):
    """k0 if the parameters sit on the double-eigenvalue family, else None."""
    k0 = -bc.alpha1 / SQRT2
    if k0 <= 0:
        return None
    # Compare in units of k0 so that tiny k0 cannot underflow to a trivial match.
    ok = (abs(bc.alpha / k0 / k0 + 1) <= tol
          and abs(bc.alpha2 / k0 / k0 / k0 + SQRT2) <= tol)
    return k0 if ok else None


def _polish(coeffs, k, steps=3):
    """Newton steps, kept only while they reduce the residual and stay positive."""
    dp = np.polyder(coeffs)
    best = abs(np.polyval(coeffs, k))
    for _ in range(steps):
        d = np.polyval(dp, k)
        if d == 0:
            break
        trial = k - np.polyval(coeffs, k) / d
        res = abs(np.polyval(coeffs, trial))
        if not (trial > 0 and res < best):
            break
        k, best = trial, res
    return k


def _scaled_roots(coeffs, invert=False):
    """np.roots after rescaling the variable so the largest root is O(1).

    Coefficients are handled through their logarithms so that ratios far
    outside the floating-point range do not overflow. With invert=True the
    reciprocals of the roots are returned.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    n = len(c) - 1
    if n < 1:
        return np.array([], dtype=complex)
    nz = [j for j in range(1, n + 1) if c[j] != 0]
    logs = {j: math.log(abs(c[j])) - math.log(abs(c[0])) for j in nz}
    log_scale = max((logs[j] / j for j in nz), default=0.0)
    scaled = [1.0] + [math.copysign(math.exp(logs[j] - j * log_scale), c[j] * c[0]) if j in logs else 0.0
                      for j in range(1, n + 1)]
    u = np.roots(scaled)
    if invert:
        return np.array([math.exp(-log_scale) / r if r != 0 else np.inf for r in u], dtype=complex)
    return u * math.exp(log_scale), math.exp(log_scale)


def _quartic_roots(coeffs):
    """Roots of a real polynomial with relative accuracy at every scale.

    Roots far below the largest one come from the reversed polynomial, where
    they are the large roots and are resolved relative to their own size.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    trimmed = np.trim_zeros(coeffs, "b")
    n_zero = len(coeffs) - len(trimmed)
    if len(trimmed) < 2:
        return np.zeros(n_zero, dtype=complex)
    with np.errstate(all="ignore"):
        forward, scale = _scaled_roots(trimmed)
        cut = 1e-4 * scale
        big = [r for r in forward if abs(r) >= cut]
        # The smallest reciprocals are the accurate ones; the rest is noise from the big roots.
        inverted = sorted(_scaled_roots(trimmed[::-1], invert=True), key=abs)
    small = inverted[:len(trimmed) - 1 - len(big)]
    return np.array(big + small + [0.0] * n_zero, dtype=complex)


def _scaled_ray_quartic(bc):
    """Ray quartic in t = k / tau, tau the natural scale of the parameters.

    alpha1, alpha and alpha2 carry the dimensions of k, k^2 and k^3, so the
    rescaled coefficients are O(1) and alpha0 cannot underflow.
    """
    tau = max(abs(bc.alpha1), abs(bc.alpha) ** 0.5, abs(bc.alpha2) ** (1 / 3))
    if tau == 0:
        return np.array([1.0, 0, 0, 0, 0]), 0.0
    a1, a, a2 = bc.alpha1 / tau, bc.alpha / tau / tau, bc.alpha2 / tau / tau / tau
    # A singular interaction matrix means an exact zero root; rounding must not shift it.
    singular = matrix_A_signature(bc)[1] > 0
    constant = 0.0 if singular else a1 * a2 - abs(a) ** 2
    if singular and a2 == 0:
        # alpha1 alpha2 = |alpha|^2 with alpha2 = 0 forces alpha = 0; |alpha|^2 may have underflowed.
        a = 0j
    return np.array([1.0, SQRT2 * a1, -2 * a.real, SQRT2 * a2, constant]), tau


def negative_eigenvalues(bc: BoundaryConditionSpec) -> list[EigenvalueRecord]:
    _require_generic(bc)
    k0 = double_eigenvalue_root(bc)
    if k0 is not None:
        records = [EigenvalueRecord(-k0 ** 4, k0, 2, EigenKind.NEGATIVE)]
    else:
        coeffs, tau = _scaled_ray_quartic(bc)
        records = []
        for root in (_quartic_roots(coeffs) if tau else ()):
            if root.real > 0 and abs(root.imag) <= 1e-6 * abs(root):
                k = tau * _polish(coeffs, root.real)
                records.append(EigenvalueRecord(-k ** 4, k, 1, EigenKind.NEGATIVE))
        records.sort(key=lambda r: r.lam)
    n_neg = matrix_A_signature(bc)[0]
    count = sum(r.multiplicity for r in records)
    if count != n_neg:
        raise ConsistencyError(f"{count} negative eigenvalues found but the interaction matrix has "
                               f"{n_neg} negative eigenvalues (bc={bc})")
    return records


def positive_eigenvalue(bc: BoundaryConditionSpec, tol: float = 1e-10):
    _require_generic(bc)
    if abs(bc.alpha.imag) > tol or bc.alpha0 >= 0:
        return None
    a = bc.alpha.real
    k = (-bc.alpha0) ** 0.25
    if (abs(bc.alpha1 - (a - k * k) / k) <= tol * (1 + abs(bc.alpha1))
            and abs(bc.alpha2 - (a + k * k) * k) <= tol * (1 + abs(bc.alpha2))):
        return EigenvalueRecord(k ** 4, k, 1, EigenKind.POSITIVE_EMBEDDED)
    return None


def embedded_eigenvalue_bc(k: float, alpha: float) -> BoundaryConditionSpec:
    """Generic condition with eigenvalue k^4 embedded in the continuous spectrum."""
    return BoundaryConditionSpec.generic(alpha, (alpha - k * k) / k, (alpha + k * k) * k)


def double_eigenvalue_bc(k0: float) -> BoundaryConditionSpec:
    """Generic condition with the double eigenvalue -k0^4."""
    return BoundaryConditionSpec.generic(-k0 ** 2, -SQRT2 * k0, -SQRT2 * k0 ** 3)


# --- scattering data ---------------------------------------------------------

def _near_zero(bc, k):
    poly = omega_from_bc(bc)
    val = complex(omega_eval(poly, k))
    return val, abs(val) < EIGEN_GUARD * poly.scale(k)


def _scattering_linear(bc, k):
    """(s, b) from imposing the boundary condition on the wave-function ansatz."""
    M = bc.boundary_rows()
    vec = lambda g: np.array([1, g, g ** 2, g ** 3])
    G = np.column_stack([M @ vec(1j * k), M @ vec(-k)])
    rhs = -0.5 * cmath.exp(-0.25j * math.pi) * (M @ vec(-1j * k))
    c1, c3 = np.linalg.solve(G, rhs)
    return 2 * c1 * cmath.exp(-0.25j * math.pi), -SQRT2 * c3


def scattering_amplitude(bc: BoundaryConditionSpec, lam: float) -> ScatteringPoint:
    if lam <= 0:
        raise ValueError("scattering data are defined for lambda > 0")
    k = lam ** 0.25
    omega, singular = _near_zero(bc, k)
    if bc.family is Family.GENERIC:
        if singular:
            a = bc.alpha.real
            s = (a + 1j * k * k) / (a - 1j * k * k)
            b = -2 * k * k / (a - 1j * k * k)
        else:
            s = omega.conjugate() / omega
            b = (bc.alpha0 + 2j * bc.alpha.imag * k * k + k ** 4) / omega
        return ScatteringPoint(lam, complex(s), complex(b))
    if not singular:
        s, b = _scattering_linear(bc, k)
        return ScatteringPoint(lam, complex(s), complex(b))
    # embedded eigenvalue of a non-Generic family: symmetric Richardson limit
    h = 1e-4 * k
    avg = lambda t: 0.5 * (np.array(_scattering_linear(bc, k + t)) + np.array(_scattering_linear(bc, k - t)))
    s, b = (4 * avg(h / 2) - avg(h)) / 3
    return ScatteringPoint(lam, complex(s), complex(b))


def eigenfunction(bc: BoundaryConditionSpec, x, lam: float):
    """Generalized eigenfunction normalized by its incoming wave e^{-ikx - i pi/4} / 2."""
    k = lam ** 0.25
    if _near_zero(bc, k)[1]:
        raise NearEigenvalueError(f"lambda={lam} is an embedded eigenvalue", eigenvalue=lam)
    sp = scattering_amplitude(bc, lam)
    x = np.asarray(x, dtype=float)
    q = cmath.exp(0.25j * math.pi)
    return 0.5 * (sp.s * np.exp(1j * k * x) * q + np.exp(-1j * k * x) / q) - sp.b * np.exp(-k * x) / SQRT2


def spectral_density(bc: BoundaryConditionSpec, x, y, lam: float):
    """Kernel of dE/d(lambda)."""
    k = lam ** 0.25
    return eigenfunction(bc, x, lam) * np.conj(eigenfunction(bc, y, lam)) / (2 * math.pi * k ** 3)


# --- threshold behaviour -----------------------------------------------------

_CLASS_BY_GAMMA0 = {0: Resonance.NONE, 1: Resonance.QUARTER, 3: Resonance.THREE_QUARTER, 4: Resonance.BOTH}


def resonance_classify(bc: BoundaryConditionSpec, tol: float = 1e-12) -> ResonanceClass:
    fam = bc.family
    zero = lambda v: abs(v) <= tol
    if fam is Family.CLAMPED:
        kind = Resonance.NONE
    elif fam is Family.NAVIER:
        kind = Resonance.QUARTER
    elif fam is Family.FREE:
        kind = Resonance.THREE_QUARTER
    elif fam is Family.ONE_PARAM:
        kind = Resonance.QUARTER if zero(bc.alpha1) else Resonance.NONE
    elif fam is Family.THREE_PARAM:
        if not zero(bc.alpha2):
            kind = Resonance.NONE
        else:
            kind = Resonance.THREE_QUARTER if zero(bc.alpha) else Resonance.QUARTER
    else:
        scale = 1 + abs(bc.alpha1 * bc.alpha2) + abs(bc.alpha) ** 2
        if not zero(bc.alpha0 / scale):
            kind = Resonance.NONE
        elif not zero(bc.alpha2):
            kind = Resonance.QUARTER
        elif not zero(bc.alpha1):
            kind = Resonance.THREE_QUARTER
        else:
            kind = Resonance.BOTH
    gamma0 = gamma_indices(omega_from_bc(bc))[0]
    if _CLASS_BY_GAMMA0.get(gamma0) is not kind:
        raise ConsistencyError(f"resonance class {kind.value} disagrees with gamma0={gamma0} for {bc}")
    return ResonanceClass(kind, _JUMP[kind])


# --- zero-energy expansion ---------------------------------------------------

@dataclass(frozen=True)
class ZeroEnergyTerm:
    """Singular term kernel(x, y) * (-z)^power of the resolvent as z -> 0.

    The kernel is a polynomial; coeffs[p, q] multiplies x^p y^q.
    """

    power: Fraction
    coeffs: np.ndarray

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape, dtype=complex)
        for (p, q), c in np.ndenumerate(self.coeffs):
            if c != 0:
                out = out + c * x ** p * y ** q
        return out


# exponents of the four correction products, as (coefficient of x, coefficient of y)
_PAIR_EXPONENTS = {"p11": (1j, 1j), "p12": (-1, 1j), "p21": (1j, -1), "p22": (-1, -1)}


def _correction_numerators(bc):
    """(C, numerators N_jl, Omega coefficients) with p_jl = C zeta^-3 N_jl / Omega."""
    fam = bc.family
    if fam is Family.CLAMPED:
        return (1j - 1) / 4, {"p11": [1], "p12": [-1], "p21": [-1], "p22": [1]}, [1]
    if fam is Family.FREE:
        return 0.5, {"p11": [1j], "p12": [0], "p21": [0], "p22": [-1]}, [1]
    if fam is Family.NAVIER:
        return 0.0, {key: [0] for key in _PAIR_EXPONENTS}, [1]
    if fam is not Family.GENERIC:
        raise UnsupportedFamilyError(f"no zero-energy expansion for the {fam.value} family")
    a0, a1, re, im = bc.alpha0, bc.alpha1, bc.alpha.real, bc.alpha.imag
    nums = {
        "p11": [-a0, 0, -2 * re, 2 * a1, 1],
        "p12": [a0, 0, 2j * im, 0, 1],
        "p21": [a0, 0, -2j * im, 0, 1],
        "p22": [-a0, 0, 2 * re, 2j * a1, 1],
    }
    return KREIN_PREFACTOR, nums, list(omega_from_bc(bc).omega)


def _series_inverse(c, order):
    c = np.asarray(c, dtype=complex)
    c = np.concatenate([c, np.zeros(max(0, order + 1 - len(c)))])
    inv = np.zeros(order + 1, dtype=complex)
    inv[0] = 1 / c[0]
    for n in range(1, order + 1):
        inv[n] = -np.dot(c[1:n + 1], inv[n - 1::-1]) / c[0]
    return inv


def _exp_polynomial(exps, n, size):
    """Coefficient array of (a x + b y)^n / n!."""
    a, b = exps
    out = np.zeros((size, size), dtype=complex)
    for p in range(n + 1):
        q = n - p
        out[p, q] = a ** p * b ** q / (math.factorial(p) * math.factorial(q))
    return out


def zero_energy_expansion(bc: BoundaryConditionSpec, tol: float = 1e-12) -> list[ZeroEnergyTerm]:
    """Singular part of R(x, y; z) as z -> 0, as powers (-z)^{-m/4}, m = 1, 2, 3.

    Uses zeta = e^{i pi/4} (-z)^{1/4}; the Navier part contributes
    2^{-1/2} x y (-z)^{-1/4} and is included.
    """
    pref, nums, omega = _correction_numerators(bc)
    poly = np.array(omega, dtype=complex)
    g0 = gamma_indices(omega_from_bc(bc))[0] if bc.family is Family.GENERIC else 0
    top = 3 + g0
    size = top + 1
    inv = _series_inverse(poly[g0:], top)
    laurent = {}  # m -> coefficient array of zeta^{-m}
    for key, num in nums.items():
        series = np.convolve(np.asarray(num, dtype=complex), inv)[: top + 1]
        # p_jl = pref * zeta^{-top} * series(zeta); times exp(mu zeta)
        for m in range(1, top + 1):
            acc = laurent.setdefault(m, np.zeros((size, size), dtype=complex))
            for n in range(0, top - m + 1):
                if series[top - m - n] != 0:
                    acc += pref * series[top - m - n] * _exp_polynomial(_PAIR_EXPONENTS[key], n, size)
    navier = np.zeros((size, size), dtype=complex)
    navier[1, 1] = (1 + 1j) / 2  # zeta^{-1} coefficient of R00
    laurent[1] = laurent.get(1, np.zeros((size, size), dtype=complex)) + navier
    scale = 1 + max(np.abs(c).max() for c in laurent.values())
    terms = []
    for m, coeffs in sorted(laurent.items(), reverse=True):
        coeffs = coeffs * cmath.exp(-0.25j * math.pi * m)
        coeffs[np.abs(coeffs) <= tol * scale] = 0
        if not coeffs.any():
            continue
        if m > 3:
            raise ConsistencyError(f"unexpected zeta^-{m} singularity for {bc}")
        terms.append(ZeroEnergyTerm(Fraction(-m, 4), coeffs))
    return terms
