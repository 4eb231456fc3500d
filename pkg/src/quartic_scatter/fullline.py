"""Jost solutions and scattering data for u'''' - (v1 u')' + v0 u = lam u on the line.

The equation is written as a first-order system for the state
(u, u', u'', u''' - v1 u'), so that v1 enters only undifferentiated. On each
side of the matching point the three Jost solutions that do not grow in the
integration direction are integrated from the pure exponentials at -a (minus
side) or +a (plus side). The growing exponential is the first column and the
frame is re-orthonormalised by QR after every chunk; the R factors are kept so
the true solutions, and any combination of them, can be rebuilt stably.
"""

from __future__ import annotations

import bisect
import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate

from .errors import DegeneracyError, NearEigenvalueError
from .halfline import ScatteringPoint
from .potentials import PotentialPair
from .quartic_core import SQRT2, SpectralPoint, upper_edge

COND_LIMIT = 1e12
_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(20)


class Side(str, Enum):
    MINUS = "minus"
    PLUS = "plus"


@dataclass(frozen=True)
class IntegrationControl:
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "DOP853"
    growth_per_chunk: float = 2.0   # k * chunk length between re-orthonormalisations
    max_chunk: float = 0.5
    matching_point: float = 0.0
    cond_limit: float = COND_LIMIT


@dataclass(frozen=True)
class StateVector:
    """(u, u', u'', u''' - v1 u') at one point."""

    u1: complex
    u2: complex
    u3: complex
    u4: complex

    @classmethod
    def from_array(cls, arr):
        return cls(*(complex(c) for c in arr))

    def as_array(self):
        return np.array([self.u1, self.u2, self.u3, self.u4], dtype=complex)


def _check_lambda(lam):
    if not lam > 0:
        raise ValueError(f"scattering requires lambda > 0, got {lam!r}")


def free_matrix(lam) -> np.ndarray:
    A = np.zeros((4, 4), dtype=complex)
    A[0, 1] = A[1, 2] = A[2, 3] = 1
    A[3, 0] = lam
    return A


def system_matrices(lam, x, pot: PotentialPair):
    """Constant companion matrix A and potential part K(x) of the first-order system."""
    K = np.zeros((4, 4), dtype=complex)
    K[2, 1] = float(pot.v1(x))
    K[3, 0] = -float(pot.v0(x))
    return free_matrix(lam), K


def exponential_state(gamma, x=0.0) -> np.ndarray:
    return cmath.exp(gamma * x) * np.array([1, gamma, gamma ** 2, gamma ** 3], dtype=complex)


def side_exponents(side: Side, k: float):
    """Exponents of Jost solutions 1, 2, 3 and of the excluded growing one."""
    if Side(side) is Side.MINUS:
        return (-1j * k, 1j * k, k), -k
    return (1j * k, -1j * k, -k), k


# ---------------------------------------------------------------- integration


@dataclass
class _Chunk:
    x0: float
    x1: float
    sol: object        # dense output, frame at x0 is orthonormal
    R: np.ndarray      # Z(x1) = Q R


@dataclass
class FrameIntegration:
    """Orthonormalised propagation of a set of solutions with stored R factors."""

    nodes: list
    chunks: list
    R0: np.ndarray            # initial data = Q0 R0
    Q_end: np.ndarray

    @property
    def T(self) -> np.ndarray:
        """Upper-triangular transfer so that true solutions at the end are Q_end @ T."""
        T = self.R0
        for ch in self.chunks:
            T = ch.R @ T
        return T

    def chunk_coefficients(self, d):
        """Coefficients of a solution on every chunk, given its end-frame coefficients d."""
        coeffs = [None] * len(self.chunks)
        e = np.asarray(d, dtype=complex)
        for i in range(len(self.chunks) - 1, -1, -1):
            e = _triangular_solve(self.chunks[i].R, e)
            coeffs[i] = e
        return coeffs

    def locate(self, x):
        lo, hi = min(self.nodes[0], self.nodes[-1]), max(self.nodes[0], self.nodes[-1])
        if not lo - 1e-12 <= x <= hi + 1e-12:
            raise ValueError(f"x = {x} outside integration range [{lo}, {hi}]")
        if self.nodes[0] <= self.nodes[-1]:
            i = bisect.bisect_right(self.nodes, x) - 1
        else:
            i = bisect.bisect_right([-t for t in self.nodes], -x) - 1
        return min(max(i, 0), len(self.chunks) - 1)

    def evaluate(self, coeffs, x):
        ch = self.chunks[self.locate(x)]
        i = self.chunks.index(ch)
        m = coeffs[i].size
        return ch.sol(x).reshape(4, m) @ coeffs[i]


def _triangular_solve(R, b):
    n = R.shape[0]
    x = np.zeros(n, dtype=complex)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - R[i, i + 1:] @ x[i + 1:]) / R[i, i]
    return x


def chunk_nodes(x_start, x_end, k, pot: PotentialPair, ctrl: IntegrationControl):
    length = min(ctrl.growth_per_chunk / max(k, 1e-300), ctrl.max_chunk)
    lo, hi = sorted((x_start, x_end))
    stops = {x_start, x_end}
    stops.update(b for b in pot.breakpoints if lo < b < hi)
    stops = sorted(stops)
    nodes = [stops[0]]
    for a, b in zip(stops, stops[1:]):
        n = max(1, math.ceil((b - a) / length - 1e-9))
        nodes.extend(a + (b - a) * j / n for j in range(1, n + 1))
    return nodes if x_start <= x_end else nodes[::-1]


def integrate_frame(lam, pot: PotentialPair, Y0, x_start, x_end, ctrl: IntegrationControl) -> FrameIntegration:
    k = lam ** 0.25
    m = Y0.shape[1]
    v0, v1 = pot.v0, pot.v1

    def rhs(x, y):
        Y = y.reshape(4, m)
        out = np.empty_like(Y)
        out[0] = Y[1]
        out[1] = Y[2]
        out[2] = Y[3] + float(v1(x)) * Y[1]
        out[3] = (lam - float(v0(x))) * Y[0]
        return out.ravel()

    nodes = chunk_nodes(x_start, x_end, k, pot, ctrl)
    Q, R0 = np.linalg.qr(Y0)
    chunks = []
    for x0, x1 in zip(nodes, nodes[1:]):
        res = integrate.solve_ivp(rhs, (x0, x1), Q.ravel(), method=ctrl.method, rtol=ctrl.rtol,
                                  atol=ctrl.atol, dense_output=True)
        if res.status != 0:
            raise DegeneracyError(f"integrator failed on [{x0:.6g}, {x1:.6g}] with k*a = "
                                  f"{k * max(abs(x_start), abs(x_end)):.6g}: {res.message}")
        Q, R = np.linalg.qr(res.y[:, -1].reshape(4, m))
        chunks.append(_Chunk(x0, x1, res.sol, R))
    return FrameIntegration(nodes, chunks, R0, Q)


@dataclass
class JostBasis:
    side: Side
    lam: float
    k: float
    frame: FrameIntegration
    pot: PotentialPair

    def solutions(self, x) -> np.ndarray:
        """4x3 matrix whose columns are the states of Jost solutions 1, 2, 3 at x."""
        eye = [self.frame.chunk_coefficients(self.frame.T[:, j]) for j in range(3)]
        cols = [self.frame.evaluate(c, x) for c in eye]
        cols = [cols[1], cols[2], cols[0]]
        return np.stack(cols, axis=1)

    def state(self, j, x) -> StateVector:
        return StateVector.from_array(self.solutions(x)[:, j - 1])

    def contamination(self) -> float:
        """Relative amplitude of the excluded growing mode in solutions 1 and 2.

        The bracket [u, w] = u4 w1 - u3 w2 + u2 w3 - u1 w4 is constant along
        solutions; against the retained solution 3 it singles out the excluded
        exponential, whose bracket with solution 3 is -/+4k^3.
        """
        x = self.frame.nodes[-1]
        U = self.solutions(x)
        ref = 4 * self.k ** 3
        return max(abs(lagrange_bracket(U[:, j], U[:, 2])) / ref for j in (0, 1))


def lagrange_bracket(u, w) -> complex:
    return u[3] * w[0] - u[2] * w[1] + u[1] * w[2] - u[0] * w[3]


def jost_basis(side, lam, pot: PotentialPair, ctrl: IntegrationControl | None = None) -> JostBasis:
    _check_lambda(lam)
    ctrl = ctrl or IntegrationControl()
    side = Side(side)
    k = lam ** 0.25
    a = pot.support_radius
    (g1, g2, g3), _ = side_exponents(side, k)
    x_start = -a if side is Side.MINUS else a
    x_mid = ctrl.matching_point
    if not -a < x_mid < a:
        raise ValueError("matching point must lie inside (-a, a)")
    # growing exponential first so QR keeps its direction exact
    Y0 = np.stack([exponential_state(g, x_start) for g in (g3, g1, g2)], axis=1)
    frame = integrate_frame(lam, pot, Y0, x_start, x_mid, ctrl)
    return JostBasis(side, lam, k, frame, pot)


def ode_residual(basis: JostBasis) -> float:
    """Max relative defect of Y(x1) - Y(x0) - int (A+K) Y over the chunks."""
    frame = basis.frame
    worst = 0.0
    for ch in frame.chunks:
        half, mid = (ch.x1 - ch.x0) / 2, (ch.x1 + ch.x0) / 2
        xs = mid + half * _GAUSS_NODES
        acc = 0
        for x, w in zip(xs, _GAUSS_WEIGHTS):
            A, K = system_matrices(basis.lam, x, basis.pot)
            Y = ch.sol(x).reshape(4, -1)
            acc = acc + w * half * ((A + K) @ Y)
        Y0 = ch.sol(ch.x0).reshape(4, -1)
        Y1 = ch.sol(ch.x1).reshape(4, -1)
        defect = np.linalg.norm(Y1 - Y0 - acc) / max(np.linalg.norm(Y1), np.linalg.norm(Y0))
        worst = max(worst, defect)
    return worst


# ---------------------------------------------------------------- matching


@dataclass(frozen=True)
class ScatteringMatrices:
    S: np.ndarray
    B: np.ndarray
    lam: float
    B_matching: np.ndarray | None = None
    condition: float = float("nan")

    @property
    def unitarity_residual(self) -> float:
        return float(np.linalg.norm(self.S.conj().T @ self.S - np.eye(2)))


@dataclass
class FullLineSolution:
    lam: float
    k: float
    pot: PotentialPair
    minus: JostBasis
    plus: JostBasis
    coeffs: dict = field(default_factory=dict)   # (l, side) -> per-chunk coefficients
    matrices: ScatteringMatrices | None = None

    def wave_state(self, l, x) -> np.ndarray:
        """State vector of psi_l at x in [-a, a]."""
        x_mid = self.minus.frame.nodes[-1]
        side = Side.MINUS if x <= x_mid else Side.PLUS
        basis = self.minus if side is Side.MINUS else self.plus
        return basis.frame.evaluate(self.coeffs[(l, side)], x)

    def wave(self, l, x) -> complex:
        return complex(self.wave_state(l, x)[0])

    def gauss_samples(self, l):
        """(y, weight, psi, psi') on a composite Gauss rule over [-a, a]."""
        ys, ws, states = [], [], []
        for side, basis in ((Side.MINUS, self.minus), (Side.PLUS, self.plus)):
            coeffs = self.coeffs[(l, side)]
            for ch, c in zip(basis.frame.chunks, coeffs):
                half, mid = (ch.x1 - ch.x0) / 2, (ch.x1 + ch.x0) / 2
                xs = mid + half * _GAUSS_NODES
                vals = ch.sol(xs)                       # (4m, n)
                m = c.size
                st = np.einsum("imn,m->in", vals.reshape(4, m, -1), c)
                ys.append(xs)
                ws.append(abs(half) * _GAUSS_WEIGHTS)
                states.append(st)
        return np.concatenate(ys), np.concatenate(ws), np.concatenate(states, axis=1)


def _matching_system(minus: JostBasis, plus: JostBasis, ctrl):
    # unknowns: minus-frame columns (3, 1) and plus-frame columns (3, 1)
    Qm, Qp = minus.frame.Q_end, plus.frame.Q_end
    M = np.column_stack([Qm[:, 0], Qm[:, 1], -Qp[:, 0], -Qp[:, 1]])
    cond = np.linalg.cond(M)
    if not cond < ctrl.cond_limit:
        raise NearEigenvalueError(f"matching matrix condition {cond:.3g} at lambda = {minus.lam}",
                                  minus.lam)
    return M, cond


def _b_integrals(sol: FullLineSolution, l):
    """b_{1l} and b_{2l} from the weak-form decaying-mode integrals."""
    k = sol.k
    y, w, st = sol.gauss_samples(l)
    v0, v1 = sol.pot.v0(y), sol.pot.v1(y)
    plus = np.exp(k * y)
    minus = np.exp(-k * y)
    b1 = np.sum(w * (plus * v0 * st[0] + k * plus * v1 * st[1])) / (4 * k ** 3)
    b2 = np.sum(w * (minus * v0 * st[0] - k * minus * v1 * st[1])) / (4 * k ** 3)
    return b1, b2


def _s_integrals(sol: FullLineSolution, l):
    """Oscillatory-mode integrals (i/4k^3) int e^{-/+iky} (V psi_l)."""
    k = sol.k
    y, w, st = sol.gauss_samples(l)
    v0, v1 = sol.pot.v0(y), sol.pot.v1(y)
    out = []
    for g in (-1j * k, 1j * k):
        e = np.exp(g * y)
        out.append(1j * np.sum(w * (e * v0 * st[0] + g * e * v1 * st[1])) / (4 * k ** 3))
    return out


def solve_waves(lam, pot: PotentialPair, ctrl: IntegrationControl | None = None) -> FullLineSolution:
    _check_lambda(lam)
    ctrl = ctrl or IntegrationControl()
    minus = jost_basis(Side.MINUS, lam, pot, ctrl)
    plus = jost_basis(Side.PLUS, lam, pot, ctrl)
    sol = FullLineSolution(lam, lam ** 0.25, pot, minus, plus)
    M, cond = _matching_system(minus, plus, ctrl)
    Tm, Tp = minus.frame.T, plus.frame.T
    Qm, Qp = minus.frame.Q_end, plus.frame.Q_end
    # frame columns are ordered (3, 1, 2): coefficient vectors read (b, s, incoming)
    S = np.zeros((2, 2), dtype=complex)
    Bm = np.zeros((2, 2), dtype=complex)
    for l, rhs in ((1, -Qm[:, 2] * Tm[2, 2]), (2, Qp[:, 2] * Tp[2, 2])):
        x = np.linalg.solve(M, rhs)
        dm = np.array([x[0], x[1], Tm[2, 2] if l == 1 else 0], dtype=complex)
        dp = np.array([x[2], x[3], Tp[2, 2] if l == 2 else 0], dtype=complex)
        cm, cp = _triangular_solve(Tm, dm), _triangular_solve(Tp, dp)
        S[0, l - 1], Bm[0, l - 1] = cp[1], cp[0]
        S[1, l - 1], Bm[1, l - 1] = cm[1], cm[0]
        sol.coeffs[(l, Side.MINUS)] = minus.frame.chunk_coefficients(dm)
        sol.coeffs[(l, Side.PLUS)] = plus.frame.chunk_coefficients(dp)

    B = np.zeros((2, 2), dtype=complex)
    for l in (1, 2):
        B[0, l - 1], B[1, l - 1] = _b_integrals(sol, l)
    if pot.is_zero:
        B[:] = 0
    sol.matrices = ScatteringMatrices(S, B, lam, Bm, cond)
    return sol


def connection_solve(lam, pot: PotentialPair, ctrl: IntegrationControl | None = None) -> ScatteringMatrices:
    return solve_waves(lam, pot, ctrl).matrices


def scattering_integrals(sol: FullLineSolution) -> np.ndarray:
    """S rebuilt from the wave functions through the oscillatory-mode integrals."""
    S = np.eye(2, dtype=complex)
    for l in (1, 2):
        to_plus, to_minus = _s_integrals(sol, l)
        S[0, l - 1] -= to_plus
        S[1, l - 1] -= to_minus
    return S


def b_relation_residual(sm: ScatteringMatrices) -> float:
    """Frobenius norm of S conj(B)^T - [[b12, b22], [b11, b21]].

    With b_jl the decaying-mode coefficient of psi_l on side j (1 = right),
    the transpose is needed; without it the identity only holds for symmetric B.
    """
    B = sm.B
    target = np.array([[B[0, 1], B[1, 1]], [B[0, 0], B[1, 0]]])
    return float(np.linalg.norm(sm.S @ B.conj().T - target))


def flux(state) -> complex:
    """F_u = (u''' - v1 u') conj(u) - u'' conj(u')."""
    s = np.asarray(state)
    return s[3] * np.conj(s[0]) - s[2] * np.conj(s[1])


def flux_invariant(u, pot: PotentialPair | None = None, r: float | None = None) -> complex:
    """Im F_u(r) - Im F_u(-r).

    ``u`` is either a callable x -> state vector or a pair (state(r), state(-r)).
    """
    if callable(u):
        if r is None:
            raise ValueError("r is required when u is a callable")
        right, left = u(r), u(-r)
    else:
        right, left = u
    return flux(right).imag - flux(left).imag


def free_resolvent_kernel_line(x, y, sp) -> complex:
    """(4 zeta^3)^{-1} (i e^{i zeta|x-y|} - e^{-zeta|x-y|})."""
    zeta = sp.zeta if isinstance(sp, SpectralPoint) else upper_edge(sp).zeta
    t = abs(x - y)
    return (1j * cmath.exp(1j * zeta * t) - cmath.exp(-zeta * t)) / (4 * zeta ** 3)


def _kernel_dy(x, y, zeta) -> complex:
    t = abs(x - y)
    d_dt = (-zeta * cmath.exp(1j * zeta * t) + zeta * cmath.exp(-zeta * t)) / (4 * zeta ** 3)
    return -math.copysign(1.0, x - y) * d_dt if x != y else 0j


def lippmann_schwinger_residual(lam, pot: PotentialPair, sample_points, ctrl=None, solution=None) -> float:
    """max |psi_1(x) - e^{ikx} + int R0(x,y) (V psi_1)(y) dy| with V in weak form."""
    sol = solution or solve_waves(lam, pot, ctrl)
    zeta = sol.k
    a = pot.support_radius
    worst = 0.0
    for x in sample_points:
        def integrand(y):
            st = sol.wave_state(1, y)
            return (free_resolvent_kernel_line(x, y, lam) * float(pot.v0(y)) * st[0]
                    + _kernel_dy(x, y, zeta) * float(pot.v1(y)) * st[1])
        pts = sorted({p for p in (*pot.breakpoints, x, ctrl_mid(sol)) if -a < p < a})
        val, _ = integrate.quad(integrand, -a, a, points=pts or None, limit=400, epsabs=1e-12,
                                epsrel=1e-10, complex_func=True)
        res = sol.wave(1, x) - cmath.exp(1j * zeta * x) + val
        worst = max(worst, abs(res))
    return worst


def ctrl_mid(sol: FullLineSolution) -> float:
    return sol.minus.frame.nodes[-1]


# ---------------------------------------------------------------- half line


def _halfline_kernels(k, y):
    """Green-type weights turning int (V psi) into the b and s coefficients."""
    ep, em = np.exp(k * y), np.exp(-k * y)
    eip, eim = np.exp(1j * k * y), np.exp(-1j * k * y)
    c = 1 / (4 * k ** 3)
    g = c * (em - ep - (1j - 1) * (eip - em))
    dg = c * (-k * em - k * ep - (1j - 1) * (1j * k * eip + k * em))
    h = c * (1j * eim - 1j * eip + (1j - 1) * (eip - em))
    dh = c * (k * eim + k * eip + (1j - 1) * (1j * k * eip + k * em))
    return g, dg, h, dh


@dataclass
class HalflineSolution:
    point: ScatteringPoint
    s_integral: complex
    b_extracted: complex
    frame: FrameIntegration
    coeffs: list


def halfline_solve(lam, pot: PotentialPair, ctrl: IntegrationControl | None = None, initial=None):
    """Clamped half-line problem with the potential restricted to [0, a]."""
    _check_lambda(lam)
    ctrl = ctrl or IntegrationControl()
    k = lam ** 0.25
    a = pot.support_radius
    Y0 = np.array([[0, 0], [0, 0], [1, 0], [0, 1]], dtype=complex) if initial is None \
        else np.asarray(initial, dtype=complex)
    frame = integrate_frame(lam, pot, Y0, 0.0, a, ctrl)
    gammas = (1j * k, -1j * k, -k, k)
    P = np.column_stack([exponential_state(g) for g in gammas])
    beta = np.linalg.solve(P, frame.Q_end)                # rows: modes at x = a, columns: frame
    grow = beta[3]
    if np.linalg.norm(grow) < 1e-14 * np.linalg.norm(beta):
        raise DegeneracyError("both frame solutions lack the growing mode; combination is ambiguous")
    w = np.array([grow[1], -grow[0]])
    amp = beta @ w
    coef = amp * np.exp(-np.array(gammas) * a)             # coefficients of e^{gamma x}
    if abs(coef[1]) < 1e-14 * np.linalg.norm(amp):
        raise DegeneracyError("solution has no incoming oscillatory component")
    scale = 0.5 * cmath.exp(-0.25j * math.pi) / coef[1]
    coef = coef * scale
    d = w * scale
    s = coef[0] / (0.5 * cmath.exp(0.25j * math.pi))
    b_extracted = coef[2] / (-1 / SQRT2)
    coeffs = frame.chunk_coefficients(d)

    ys, ws, sts = [], [], []
    for ch, c in zip(frame.chunks, coeffs):
        half, mid = (ch.x1 - ch.x0) / 2, (ch.x1 + ch.x0) / 2
        xs = mid + half * _GAUSS_NODES
        vals = ch.sol(xs).reshape(4, c.size, -1)
        sts.append(np.einsum("imn,m->in", vals, c))
        ys.append(xs)
        ws.append(abs(half) * _GAUSS_WEIGHTS)
    y, wt, st = np.concatenate(ys), np.concatenate(ws), np.concatenate(sts, axis=1)
    g, dg, h, dh = _halfline_kernels(k, y)
    v0, v1 = pot.v0(y), pot.v1(y)
    b = 1 + SQRT2 * np.sum(wt * (g * v0 * st[0] + dg * v1 * st[1]))
    s_int = 1 - 2 * cmath.exp(-0.25j * math.pi) * np.sum(wt * (h * v0 * st[0] + dh * v1 * st[1]))
    return HalflineSolution(ScatteringPoint(lam, complex(s), complex(b)), complex(s_int),
                            complex(b_extracted), frame, coeffs)


def halfline_shortrange(lam, pot: PotentialPair, ctrl: IntegrationControl | None = None,
                        initial=None) -> ScatteringPoint:
    return halfline_solve(lam, pot, ctrl, initial).point
