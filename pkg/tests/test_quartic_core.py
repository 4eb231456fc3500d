import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import generic_bcs, reals
from oracles import boundary_determinant
from quartic_scatter.errors import BranchPointError, UnsupportedFamilyError
from quartic_scatter.quartic_core import (
    BoundaryConditionSpec,
    Edge,
    Family,
    OmegaPolynomial,
    branch_zeta,
    gamma_indices,
    interaction_matrix,
    matrix_A_signature,
    omega_from_bc,
    ray_quartic,
    upper_edge,
)

ALL_FAMILIES = [
    BoundaryConditionSpec.generic(0.3 + 0.7j, 1.1, -0.4),
    BoundaryConditionSpec(Family.THREE_PARAM, 0.3 + 0.2j, 0, 0.8),
    BoundaryConditionSpec(Family.ONE_PARAM, 0, 1.3),
    BoundaryConditionSpec(Family.CLAMPED),
    BoundaryConditionSpec(Family.NAVIER),
    BoundaryConditionSpec(Family.FREE),
]


class TestBranch:
    @given(st.floats(-math.pi + 1e-6, math.pi), st.floats(1e-3, 1e3))
    def test_root_in_first_quadrant(self, arg, r):
        z = cmath.rect(r, arg)
        if z.imag == 0 and z.real > 0:
            return
        zeta = branch_zeta(z).zeta
        assert zeta ** 4 == pytest.approx(z, rel=1e-12, abs=1e-12)
        assert -1e-12 <= cmath.phase(zeta) <= math.pi / 2 + 1e-12

    def test_negative_axis_maps_to_diagonal(self):
        assert branch_zeta(-16).zeta == pytest.approx(2 * cmath.exp(0.25j * math.pi))

    def test_edges(self):
        assert upper_edge(16).zeta == 2
        assert branch_zeta(16, Edge.LOWER).zeta == 2j
        assert branch_zeta(16, "upper_edge").edge is Edge.UPPER

    def test_cut_needs_edge(self):
        with pytest.raises(ValueError):
            branch_zeta(4.0)

    def test_branch_point(self):
        with pytest.raises(BranchPointError):
            branch_zeta(0)

    def test_lower_half_plane_continuity(self):
        # approaching the cut from below lands on the i * lambda^(1/4) edge
        assert branch_zeta(16 - 1e-12j).zeta == pytest.approx(2j, abs=1e-9)


class TestBoundaryConditions:
    def test_unused_parameters_rejected(self):
        with pytest.raises(ValueError):
            BoundaryConditionSpec(Family.CLAMPED, alpha=1.0)
        with pytest.raises(ValueError):
            BoundaryConditionSpec(Family.ONE_PARAM, alpha2=1.0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            BoundaryConditionSpec.generic(float("nan"))

    def test_alpha0(self):
        bc = BoundaryConditionSpec.generic(1 + 2j, 3.0, 4.0)
        assert bc.alpha0 == pytest.approx(12 - 5)

    def test_rows_encode_condition(self):
        bc = BoundaryConditionSpec.generic(0.5 - 1j, 2.0, -1.0)
        u, du = 0.3, -0.7
        d2u = bc.alpha * u + bc.alpha1 * du
        d3u = -bc.alpha2 * u - bc.alpha.conjugate() * du
        assert np.allclose(bc.residuals(u, du, d2u, d3u), 0)

    def test_conjugated(self):
        bc = BoundaryConditionSpec.generic(0.5 - 1j, 2.0, -1.0)
        assert bc.conjugated().alpha == 0.5 + 1j


class TestOmega:
    @pytest.mark.parametrize("bc", ALL_FAMILIES, ids=lambda b: b.family.value)
    def test_matches_boundary_determinant(self, bc):
        # the 2x2 boundary determinant equals c * zeta * Omega with |c| = sqrt 2
        poly = omega_from_bc(bc)
        ratios = [boundary_determinant(bc, z) / (z * poly(z)) for z in (0.7 + 0.2j, 1.3 + 1.1j, 2.5 + 0.1j)]
        assert np.allclose(ratios, ratios[0], rtol=1e-12)
        assert abs(ratios[0]) == pytest.approx(math.sqrt(2), rel=1e-12)

    @given(generic_bcs())
    def test_conjugation_symmetry(self, bc):
        # conj(omega_j) = i^j omega_j, i.e. conj(Omega(zeta)) = Omega(i conj(zeta))
        c = omega_from_bc(bc).coefficients
        assert np.allclose(np.conj(c), [1j ** j * w for j, w in enumerate(c)], atol=1e-13)

    @given(generic_bcs(), st.floats(0.1, 3.0))
    def test_ray_quartic(self, bc, k):
        poly = omega_from_bc(bc)
        on_ray = poly(cmath.exp(0.25j * math.pi) * k)
        assert on_ray == pytest.approx(np.polyval(ray_quartic(bc), k), abs=1e-10 * poly.scale(k))

    def test_family_coefficients(self):
        assert omega_from_bc(BoundaryConditionSpec(Family.CLAMPED)).omega == (1, 0, 0, 0, 0)
        assert omega_from_bc(BoundaryConditionSpec(Family.NAVIER)).omega == (0, 1 - 1j, 0, 0, 0)
        assert omega_from_bc(BoundaryConditionSpec(Family.FREE)).omega == (0, 0, 0, -(1 + 1j), 0)

    def test_derivative(self):
        poly = omega_from_bc(ALL_FAMILIES[0])
        z, h = 0.9 + 0.4j, 1e-6
        fd = (poly(z + h) - poly(z - h)) / (2 * h)
        assert poly.derivative(z) == pytest.approx(fd, rel=1e-8)

    def test_needs_five_coefficients(self):
        with pytest.raises(ValueError):
            OmegaPolynomial((1, 2))

    def test_gamma_indices(self):
        assert gamma_indices(omega_from_bc(BoundaryConditionSpec(Family.FREE))) == (3, 3)
        assert gamma_indices(omega_from_bc(BoundaryConditionSpec.generic())) == (4, 4)
        assert gamma_indices(omega_from_bc(BoundaryConditionSpec.generic(0, 1.0))) == (3, 4)
        with pytest.raises(ValueError):
            gamma_indices(OmegaPolynomial((0, 0, 0, 0, 0)))


class TestInteractionMatrix:
    @given(reals, reals, reals, reals)
    def test_signature_matches_eigvalsh(self, re, im, a1, a2):
        bc = BoundaryConditionSpec.generic(complex(re, im), a1, a2)
        ev = np.linalg.eigvalsh(interaction_matrix(bc))
        thr = 1e-9 * (1 + np.abs(ev).max())
        if np.any(np.abs(ev) < thr):
            return
        neg, zero, pos = matrix_A_signature(bc)
        assert (neg, pos) == (int(np.sum(ev < 0)), int(np.sum(ev > 0)))
        assert zero == 0

    def test_hermitian(self):
        A = interaction_matrix(ALL_FAMILIES[0])
        assert np.allclose(A, A.conj().T)

    def test_generic_only(self):
        with pytest.raises(UnsupportedFamilyError):
            interaction_matrix(BoundaryConditionSpec(Family.FREE))

    def test_degenerate_signature(self):
        assert matrix_A_signature(BoundaryConditionSpec.generic()) == (0, 2, 0)
        assert matrix_A_signature(BoundaryConditionSpec.generic(1.0, 1.0, 1.0)) == (0, 1, 1)
