import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conftest import energies, generic_bcs
from quartic_scatter.errors import ConsistencyError, NearEigenvalueError, UnsupportedFamilyError
from quartic_scatter.finite_difference import derivative
from quartic_scatter.halfline import (
    EigenKind,
    Resonance,
    double_eigenvalue_bc,
    double_eigenvalue_root,
    eigenfunction,
    embedded_eigenvalue_bc,
    kernel_coefficients,
    kernel_coefficients_linear,
    negative_eigenvalues,
    positive_eigenvalue,
    r00_kernel,
    resolvent_kernel,
    resonance_classify,
    scattering_amplitude,
    spectral_density,
    trace_resolvent_diff,
    zero_energy_expansion,
)
from quartic_scatter.quartic_core import BoundaryConditionSpec, Family, branch_zeta, omega_from_bc

SQRT2 = math.sqrt(2)
Z_POINTS = (-1.0, -2.0, 1 + 1j, -0.3 + 2j)


def _far_from_eigen(bc, zeta):
    poly = omega_from_bc(bc)
    return abs(poly(zeta)) > 1e-6 * poly.scale(zeta)


class TestKernel:
    def test_r00_boundary_conditions(self):
        sp = branch_zeta(-1.5 + 0.5j)
        f = lambda x: r00_kernel(x, 1.2, sp)
        assert abs(f(0.0)) < 1e-15
        assert abs(derivative(f, 0.0, 2, 0.02, 9)) < 1e-8

    @given(generic_bcs(), st.sampled_from(Z_POINTS))
    def test_closed_form_matches_linear_solve(self, bc, z):
        sp = branch_zeta(z)
        assume(_far_from_eigen(bc, sp.zeta))
        closed = kernel_coefficients(bc, sp).as_matrix()
        linear = kernel_coefficients_linear(bc, sp).as_matrix()
        assert np.allclose(closed, linear, rtol=1e-9, atol=1e-12 * np.abs(linear).max())

    @pytest.mark.parametrize("bc", [BoundaryConditionSpec(Family.CLAMPED), BoundaryConditionSpec(Family.FREE),
                                    BoundaryConditionSpec(Family.NAVIER)], ids=lambda b: b.family.value)
    def test_special_families_match_linear_solve(self, bc):
        sp = branch_zeta(-1 + 0.4j)
        assert np.allclose(kernel_coefficients(bc, sp).as_matrix(),
                           kernel_coefficients_linear(bc, sp).as_matrix(), atol=1e-14)

    @given(generic_bcs(), st.sampled_from(Z_POINTS))
    def test_hermitian(self, bc, z):
        sp, spc = branch_zeta(z), branch_zeta(complex(z).conjugate())
        assume(_far_from_eigen(bc, sp.zeta) and _far_from_eigen(bc, spc.zeta))
        a = resolvent_kernel(bc, 0.4, 1.3, sp)
        b = np.conj(resolvent_kernel(bc, 1.3, 0.4, spc))
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))

    def test_boundary_condition_in_x(self):
        bc = BoundaryConditionSpec.generic(0.4 - 0.3j, 1.2, -0.5)
        sp = branch_zeta(-2.0)
        f = lambda x: resolvent_kernel(bc, x, 1.0, sp)
        g = [derivative(f, 0.0, m, 0.04, 9) for m in range(4)]
        assert np.allclose(bc.residuals(*g), 0, atol=1e-8)

    def test_near_eigenvalue_raises(self):
        bc = BoundaryConditionSpec.generic(0, -1.0, 0)
        (rec,) = negative_eigenvalues(bc)
        with pytest.raises(NearEigenvalueError) as info:
            resolvent_kernel(bc, 0.5, 0.7, branch_zeta(rec.lam))
        assert info.value.eigenvalue == pytest.approx(rec.lam)


class TestTrace:
    def test_clamped_is_zero(self):
        assert trace_resolvent_diff(BoundaryConditionSpec(Family.CLAMPED), branch_zeta(-1)) == 0

    def test_free_closed_form(self):
        # Omega = c zeta^3: trace = -3 / (4 zeta^4) = 3 / (4 z) at z = -1 ... times -1
        sp = branch_zeta(-1.0)
        assert trace_resolvent_diff(BoundaryConditionSpec(Family.FREE), sp) == pytest.approx(-3 / (4 * sp.zeta ** 4))


class TestEigenvalues:
    @given(generic_bcs())
    def test_count_matches_inertia(self, bc):
        ev = np.linalg.eigvalsh(np.array([[bc.alpha2, bc.alpha.conjugate()], [bc.alpha, bc.alpha1]]))
        assume(np.all(np.abs(ev) > 1e-6))
        try:
            records = negative_eigenvalues(bc)
        except ConsistencyError:  # pragma: no cover - reported as a failure below
            pytest.fail("inertia mismatch")
        assert sum(r.multiplicity for r in records) == int(np.sum(ev < 0))

    @given(generic_bcs())
    def test_eigenvalues_are_zeros(self, bc):
        poly = omega_from_bc(bc)
        for r in negative_eigenvalues(bc):
            zeta = cmath.exp(0.25j * math.pi) * r.k
            # alpha0 is a difference of products; its rounding sets the attainable floor
            floor = abs(bc.alpha1 * bc.alpha2) + abs(bc.alpha) ** 2
            assert abs(poly(zeta)) <= 1e-8 * (poly.scale(r.k) + floor)

    def test_eigenfunction_satisfies_bc(self):
        bc = BoundaryConditionSpec.generic(0.3 + 0.4j, -2.0, 0.7)
        for r in negative_eigenvalues(bc):
            zeta = cmath.exp(0.25j * math.pi) * r.k
            M = bc.boundary_rows()
            vec = lambda g: np.array([1, g, g * g, g ** 3])
            G = np.column_stack([M @ vec(1j * zeta), M @ vec(-zeta)])
            assert abs(np.linalg.det(G)) < 1e-9 * np.abs(G).max() ** 2

    @pytest.mark.parametrize("k0", [0.5, 1.0, 2.0])
    def test_double_eigenvalue(self, k0):
        bc = double_eigenvalue_bc(k0)
        assert double_eigenvalue_root(bc) == pytest.approx(k0)
        (rec,) = negative_eigenvalues(bc)
        assert rec.multiplicity == 2 and rec.lam == pytest.approx(-k0 ** 4)

    def test_double_eigenfunctions(self):
        k0 = 1.3
        bc = double_eigenvalue_bc(k0)
        for g in ((-1 + 1j) * k0 / SQRT2, (-1 - 1j) * k0 / SQRT2):
            assert np.allclose(bc.residuals(1, g, g * g, g ** 3), 0, atol=1e-12)

    @pytest.mark.parametrize("k, alpha", [(1.0, 0.5), (0.7, -1.2), (2.0, 3.0)])
    def test_embedded(self, k, alpha):
        bc = embedded_eigenvalue_bc(k, alpha)
        rec = positive_eigenvalue(bc)
        assert rec.kind is EigenKind.POSITIVE_EMBEDDED and rec.lam == pytest.approx(k ** 4, rel=1e-12)
        # both e^{-kx} and the standing wave i s e^{ikx} + e^{-ikx} satisfy the condition
        assert np.allclose(bc.residuals(1, -k, k * k, -k ** 3), 0, atol=1e-10)

    def test_no_embedded_for_complex_alpha(self):
        assert positive_eigenvalue(BoundaryConditionSpec.generic(1j - 2, 0.5, 0.1)) is None

    def test_generic_only(self):
        with pytest.raises(UnsupportedFamilyError):
            negative_eigenvalues(BoundaryConditionSpec(Family.FREE))


class TestScattering:
    @given(generic_bcs(), energies)
    def test_unimodular(self, bc, lam):
        assert abs(abs(scattering_amplitude(bc, lam).s) - 1) <= 1e-12

    @given(generic_bcs(real_alpha=True), energies)
    def test_real_alpha_relation(self, bc, lam):
        sp = scattering_amplitude(bc, lam)
        assert abs(sp.s * np.conj(sp.b) - sp.b) <= 1e-12 * max(1.0, abs(sp.b))

    @given(generic_bcs(), energies)
    def test_eigenfunction_satisfies_bc(self, bc, lam):
        k = lam ** 0.25
        poly = omega_from_bc(bc)
        assume(abs(poly(k)) > 1e-6 * poly.scale(k))
        sp = scattering_amplitude(bc, lam)
        q = cmath.exp(0.25j * math.pi)
        g = [0.5 * (sp.s * q * (1j * k) ** m + (-1j * k) ** m / q) - sp.b * (-k) ** m / SQRT2 for m in range(4)]
        scale = max(1.0, k ** 3) * (1 + abs(bc.alpha) + abs(bc.alpha1) + abs(bc.alpha2))
        assert np.max(np.abs(bc.residuals(*g))) <= 1e-10 * scale

    def test_clamped_values(self):
        sp = scattering_amplitude(BoundaryConditionSpec(Family.CLAMPED), 3.0)
        assert sp.s == pytest.approx(1) and sp.b == pytest.approx(1)

    def test_all_zero_generic(self):
        sp = scattering_amplitude(BoundaryConditionSpec.generic(), 2.0)
        assert sp.s == pytest.approx(1) and sp.b == pytest.approx(-1)

    @pytest.mark.parametrize("family", [Family.FREE, Family.NAVIER])
    def test_other_families_unimodular(self, family):
        for lam in (0.1, 1.0, 10.0):
            assert abs(abs(scattering_amplitude(BoundaryConditionSpec(family), lam).s) - 1) < 1e-13

    def test_embedded_limit(self):
        k, alpha = 1.1, 0.8
        bc = embedded_eigenvalue_bc(k, alpha)
        sp = scattering_amplitude(bc, k ** 4)
        assert sp.s == pytest.approx((alpha + 1j * k * k) / (alpha - 1j * k * k), abs=1e-12)
        assert sp.b == pytest.approx(-2 * k * k / (alpha - 1j * k * k), abs=1e-12)
        with pytest.raises(NearEigenvalueError):
            eigenfunction(bc, 0.5, k ** 4)

    def test_lambda_must_be_positive(self):
        with pytest.raises(ValueError):
            scattering_amplitude(BoundaryConditionSpec(), -1.0)

    def test_density_is_hermitian_and_nonnegative(self):
        bc = BoundaryConditionSpec.generic(0.2 + 0.5j, 1.0, 0.3)
        d_xy = spectral_density(bc, 0.3, 1.4, 2.0)
        d_yx = spectral_density(bc, 1.4, 0.3, 2.0)
        assert d_xy == pytest.approx(np.conj(d_yx))
        assert spectral_density(bc, 0.8, 0.8, 2.0).real > 0


class TestResonance:
    @pytest.mark.parametrize("bc, kind", [
        (BoundaryConditionSpec(Family.CLAMPED), Resonance.NONE),
        (BoundaryConditionSpec(Family.NAVIER), Resonance.QUARTER),
        (BoundaryConditionSpec(Family.FREE), Resonance.THREE_QUARTER),
        (BoundaryConditionSpec.generic(1.0, 0.0, 0.0), Resonance.NONE),
        (BoundaryConditionSpec.generic(1.0, 0.5, 2.0), Resonance.QUARTER),
        (BoundaryConditionSpec.generic(0, 1.5, 0), Resonance.THREE_QUARTER),
        (BoundaryConditionSpec.generic(), Resonance.BOTH),
        (BoundaryConditionSpec(Family.ONE_PARAM), Resonance.QUARTER),
        (BoundaryConditionSpec(Family.THREE_PARAM), Resonance.THREE_QUARTER),
    ])
    def test_classes(self, bc, kind):
        rc = resonance_classify(bc)
        assert rc.kind is kind
        assert rc.expected_ssf_jump == {Resonance.NONE: 0, Resonance.QUARTER: Fraction(-1, 4),
                                        Resonance.THREE_QUARTER: Fraction(-3, 4), Resonance.BOTH: -1}[kind]


class TestZeroEnergy:
    def test_navier(self):
        (term,) = zero_energy_expansion(BoundaryConditionSpec(Family.NAVIER))
        assert term.power == Fraction(-1, 4)
        assert term(0.7, 1.3) == pytest.approx(0.7 * 1.3 / SQRT2)

    def test_regular_cases_have_no_terms(self):
        assert zero_energy_expansion(BoundaryConditionSpec(Family.CLAMPED)) == []
        assert zero_energy_expansion(BoundaryConditionSpec.generic(0.5, 1.0, 2.0)) == []

    def test_expansion_tracks_kernel(self):
        bc = BoundaryConditionSpec.generic(0, -0.8, 0)
        terms = zero_energy_expansion(bc)
        x, y = 0.4, 0.9
        for t in (1e-8, 1e-10):
            sp = branch_zeta(-t)
            singular = sum(term(x, y) * t ** float(term.power) for term in terms)
            # the remainder stays bounded as z -> 0
            assert abs(resolvent_kernel(bc, x, y, sp) - singular) < 5.0
