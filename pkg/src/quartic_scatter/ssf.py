"""Perturbation determinant, spectral shift function and Levinson's identity.

The pair is (clamped operator, operator with boundary condition bc). Its
perturbation determinant is D(z) = Omega(zeta), and the spectral shift function
is xi(lambda) = arg D(lambda + i0) / pi with the branch fixed by
arg Omega(e^{i pi/4} k) = 0 for large k.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import NearEigenvalueError
from .halfline import (
    EigenKind,
    EigenvalueRecord,
    negative_eigenvalues,
    positive_eigenvalue,
    scattering_amplitude,
)
from .quartic_core import (
    BoundaryConditionSpec,
    Family,
    OmegaPolynomial,
    SpectralPoint,
    branch_zeta,
    gamma_indices,
    omega_deriv_eval,
    omega_eval,
    omega_from_bc,
)

ISOLATION_TOL = 1e-9
EMBEDDED_OFFSET = 1e-6


@dataclass(frozen=True)
class Jump:
    lam: float
    size: Fraction
    cause: str  # negative_eigenvalue | embedded_eigenvalue | threshold_zero


@dataclass
class SsfCurve:
    grid: np.ndarray
    xi: np.ndarray
    jumps: list = field(default_factory=list)


def perturbation_determinant(bc: BoundaryConditionSpec, sp) -> complex:
    zeta = sp.zeta if isinstance(sp, SpectralPoint) else branch_zeta(sp).zeta
    return complex(omega_eval(omega_from_bc(bc), zeta))


# --- eigenvalues of any family ----------------------------------------------

def _polynomial_zeros(poly: OmegaPolynomial, tol=1e-8):
    """Zeros of Omega on the ray arg = pi/4 (negative eigenvalues) and on (0, inf)."""
    c = poly.coefficients
    g1 = gamma_indices(poly)[1]
    roots = np.roots(c[: g1 + 1][::-1]) if g1 > 0 else np.array([])
    ray, real = [], []
    for r in roots:
        if abs(r) < 1e-10:
            continue
        ang = cmath.phase(r)
        if abs(ang - math.pi / 4) < tol:
            ray.append(abs(r))
        elif abs(ang) < tol:
            real.append(abs(r))
    return sorted(ray), sorted(real)


def eigenvalues(bc: BoundaryConditionSpec) -> list[EigenvalueRecord]:
    """All eigenvalues (negative ones and a possible embedded one), ascending."""
    if bc.family is Family.GENERIC:
        out = list(negative_eigenvalues(bc))
        pos = positive_eigenvalue(bc)
        if pos is not None:
            out.append(pos)
        return out
    ray, real = _polynomial_zeros(omega_from_bc(bc))
    out = [EigenvalueRecord(-k ** 4, k, 1, EigenKind.NEGATIVE) for k in reversed(ray)]
    out += [EigenvalueRecord(k ** 4, k, 1, EigenKind.POSITIVE_EMBEDDED) for k in real]
    return out


def eigenvalue_count(bc: BoundaryConditionSpec) -> int:
    return sum(r.multiplicity for r in eigenvalues(bc))


# --- phase tracking ----------------------------------------------------------

def _increment(f, a, b, fa, fb, depth=0):
    """Continuous change of arg f from a to b, bisecting until steps are safe."""
    whole = cmath.phase(fb / fa)
    mid = 0.5 * (a + b)
    fm = f(mid)
    left, right = cmath.phase(fm / fa), cmath.phase(fb / fm)
    if depth > 60:
        raise NearEigenvalueError(f"phase tracking failed near k={mid:.6g}")
    if abs(left) < math.pi / 2 and abs(right) < math.pi / 2 and abs(left + right - whole) < 1e-10:
        return whole
    return _increment(f, a, mid, fa, fm, depth + 1) + _increment(f, mid, b, fm, fb, depth + 1)


def track_phase(f, ks, steps_per_decade=40):
    """Continuous phase of f along the decreasing sequence ks, relative to ks[0]."""
    ks = np.asarray(ks, dtype=float)
    out = np.zeros(len(ks))
    prev_k, prev_f = ks[0], f(ks[0])
    total = 0.0
    for i in range(1, len(ks)):
        k = ks[i]
        n = max(1, int(math.ceil(steps_per_decade * math.log10(prev_k / k)))) if k > 0 else 1
        pts = np.geomspace(prev_k, k, n + 1)[1:]
        for p in pts:
            fp = f(p)
            total += _increment(f, prev_k, p, prev_f, fp)
            prev_k, prev_f = p, fp
        out[i] = total
    return out


def _leading(poly: OmegaPolynomial, which: int):
    gam = gamma_indices(poly)[which]
    return gam, poly.omega[gam]


def _anchor_k(poly, start):
    """k large enough that the top monomial dominates Omega."""
    g1, w1 = _leading(poly, 1)
    k = max(start, 1.0)
    while abs(omega_eval(poly, k) / (w1 * k ** g1) - 1) > 1e-3:
        k *= 2
    return k


def _phase_on_axis(poly: OmegaPolynomial, ks_desc, embedded=()):
    """arg Omega(k) on the upper edge, normalized so arg -> -gamma1 pi/4 at infinity.

    ks_desc must be strictly decreasing and avoid the embedded zeros; crossing
    an embedded zero downward adds pi (xi drops by one going up through it).
    """
    g1, w1 = _leading(poly, 1)
    f = lambda k: complex(omega_eval(poly, k))
    top = _anchor_k(poly, 2 * ks_desc[0])
    theta = -g1 * math.pi / 4 + cmath.phase(f(top) / (w1 * top ** g1))
    out = np.zeros(len(ks_desc))
    prev = top
    for i, k in enumerate(ks_desc):
        for k0 in sorted((e for e in embedded if k < e < prev), reverse=True):
            d = min(EMBEDDED_OFFSET * k0, 0.5 * (prev - k0), 0.5 * (k0 - k))
            theta += track_phase(f, [prev, k0 + d])[-1]
            theta += math.pi + cmath.phase(f(k0 - d) / -f(k0 + d))
            prev = k0 - d
        theta += track_phase(f, [prev, k])[-1]
        out[i] = theta
        prev = k
    return out


def _embedded_ks(bc):
    return [r.k for r in eigenvalues(bc) if r.kind is EigenKind.POSITIVE_EMBEDDED]


def ssf(bc: BoundaryConditionSpec, lambda_grid) -> SsfCurve:
    grid = np.asarray(lambda_grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("lambda grid must be strictly increasing")
    eigs = eigenvalues(bc)
    for lam in grid:
        if lam == 0:
            raise NearEigenvalueError("lambda = 0 is the threshold; xi has a jump there", eigenvalue=0.0)
        for r in eigs:
            if abs(lam - r.lam) <= ISOLATION_TOL * (1 + abs(r.lam)):
                raise NearEigenvalueError(f"grid point {lam} coincides with eigenvalue {r.lam}",
                                          eigenvalue=r.lam)
    xi = np.zeros(len(grid))
    neg = grid < 0
    for i in np.nonzero(neg)[0]:
        xi[i] = -sum(r.multiplicity for r in eigs if r.kind is EigenKind.NEGATIVE and r.lam < grid[i])
    pos = np.nonzero(~neg)[0]
    if len(pos):
        ks = grid[pos] ** 0.25
        theta = _phase_on_axis(omega_from_bc(bc), ks[::-1], _embedded_ks(bc))[::-1]
        xi[pos] = theta / math.pi
    jumps = [Jump(r.lam, Fraction(-r.multiplicity), "negative_eigenvalue")
             for r in eigs if r.kind is EigenKind.NEGATIVE]
    delta = threshold_jump(bc)
    if delta:
        jumps.append(Jump(0.0, delta, "threshold_zero"))
    jumps += [Jump(r.lam, Fraction(-1), "embedded_eigenvalue")
              for r in eigs if r.kind is EigenKind.POSITIVE_EMBEDDED]
    return SsfCurve(grid, xi, jumps)


def xi_at(bc: BoundaryConditionSpec, lam: float) -> float:
    return float(ssf(bc, [lam]).xi[0])


def xi_increment_integral(bc: BoundaryConditionSpec, lam1: float, lam2: float) -> float:
    """xi(lam2) - xi(lam1) = pi^-1 int Im(Omega'/Omega) dk over an eigenvalue-free interval."""
    poly = omega_from_bc(bc)
    f = lambda k: (omega_deriv_eval(poly, k) / omega_eval(poly, k)).imag
    k1, k2 = lam1 ** 0.25, lam2 ** 0.25
    val, _ = integrate.quad(f, k1, k2, epsabs=1e-13, epsrel=1e-12, limit=500)
    return val / math.pi


def threshold_jump(bc: BoundaryConditionSpec) -> Fraction:
    return Fraction(-gamma_indices(omega_from_bc(bc))[0], 4)


def threshold_jump_numeric(bc: BoundaryConditionSpec, m: int = 16) -> float:
    """xi(10^-m) - xi(-10^-m); converges to the exact jump like 10^{-m/4}."""
    eps = 10.0 ** -m
    curve = ssf(bc, [-eps, eps])
    return float(curve.xi[1] - curve.xi[0])


def embedded_jump_numeric(bc: BoundaryConditionSpec) -> float:
    """xi(lam0 + d) - xi(lam0 - d) with d = 1e-6 (1 + lam0) at the embedded eigenvalue."""
    ks = _embedded_ks(bc)
    if not ks:
        raise ValueError("no embedded eigenvalue")
    lam0 = ks[0] ** 4
    d = EMBEDDED_OFFSET * (1 + lam0)
    curve = ssf(bc, [lam0 - d, lam0 + d])
    return float(curve.xi[1] - curve.xi[0])


def birman_krein_check(bc: BoundaryConditionSpec, lam: float) -> float:
    s = scattering_amplitude(bc, lam).s
    return abs(s - cmath.exp(-2j * math.pi * xi_at(bc, lam)))


# --- Levinson ---------------------------------------------------------------

@dataclass(frozen=True)
class LevinsonResult:
    lhs: float
    rhs: float
    residual: float
    n_eigen: int
    gamma0: int
    gamma1: int


def _sector_zero_count(poly: OmegaPolynomial, tol=1e-8):
    """Zeros in 0 < arg zeta < pi/2 plus zeros on (0, inf)."""
    c = poly.coefficients
    g1 = gamma_indices(poly)[1]
    if g1 == 0:
        return 0
    n = 0
    for r in np.roots(c[: g1 + 1][::-1]):
        if abs(r) < 1e-10:
            continue
        ang = cmath.phase(r)
        if tol < ang < math.pi / 2 - tol or abs(ang) <= tol:
            n += 1
    return n


def levinson_check(target, k_min: float = 1e-3, k_max: float = 1e3) -> LevinsonResult:
    """Compare the total variation of arg s with -2 pi N + pi (gamma1 - gamma0) / 2.

    target is a BoundaryConditionSpec or a bare OmegaPolynomial with the
    conjugation symmetry; for the latter s = conj(Omega)/Omega and N counts the
    zeros of Omega in the closed first-quadrant sector.
    """
    if isinstance(target, OmegaPolynomial):
        poly = target
        s_of = lambda k: complex(np.conj(omega_eval(poly, k)) / omega_eval(poly, k))
        n_eigen = _sector_zero_count(poly)
    else:
        poly = omega_from_bc(target)
        s_of = lambda k: scattering_amplitude(target, k ** 4).s
        n_eigen = eigenvalue_count(target)
    g0, w0 = _leading(poly, 0)
    g1, w1 = _leading(poly, 1)
    lo, hi = k_min, k_max
    while abs(omega_eval(poly, lo) / (w0 * lo ** g0) - 1) > 0.5:
        lo /= 2
    while abs(omega_eval(poly, hi) / (w1 * hi ** g1) - 1) > 0.5:
        hi *= 2
    ks = np.geomspace(hi, lo, int(40 * math.log10(hi / lo)) + 1)
    walk = track_phase(s_of, ks)[-1]  # arg s(lo) - arg s(hi)
    tail_hi = 2 * cmath.phase(omega_eval(poly, hi) / (w1 * hi ** g1))   # arg s(inf) - arg s(hi)
    tail_lo = -2 * cmath.phase(omega_eval(poly, lo) / (w0 * lo ** g0))  # arg s(lo) - arg s(0+)
    lhs = tail_hi - walk + tail_lo
    rhs = -2 * math.pi * n_eigen + math.pi * (g1 - g0) / 2
    return LevinsonResult(lhs, rhs, abs(lhs - rhs), n_eigen, g0, g1)
