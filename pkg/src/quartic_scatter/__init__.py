"""Scattering theory for fourth-order differential operators on the line and half-line."""

from .errors import (
    BranchPointError,
    ConsistencyError,
    DegeneracyError,
    NearEigenvalueError,
    QuarticError,
    UnsupportedFamilyError,
)
from .fullline import (
    IntegrationControl,
    ScatteringMatrices,
    b_relation_residual,
    connection_solve,
    flux_invariant,
    free_resolvent_kernel_line,
    halfline_shortrange,
    jost_basis,
    lippmann_schwinger_residual,
    solve_waves,
    system_matrices,
)
from .halfline import (
    kernel_coefficients,
    negative_eigenvalues,
    resolvent_kernel,
    resonance_classify,
    scattering_amplitude,
    spectral_density,
    trace_resolvent_diff,
    zero_energy_expansion,
)
from .potentials import PotentialPair, parse_potential
from .quartic_core import (
    BoundaryConditionSpec,
    Family,
    OmegaPolynomial,
    SpectralPoint,
    branch_zeta,
    gamma_indices,
    matrix_A_signature,
    omega_from_bc,
)
from .ssf import levinson_check, perturbation_determinant

__all__ = [name for name in dir() if not name.startswith("_")]
