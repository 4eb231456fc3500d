"""Randomised invariant suites with replayable failures."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import ConsistencyError, QuarticError
from .finite_difference import derivative
from .fullline import b_relation_residual, connection_solve
from .halfline import negative_eigenvalues, resolvent_kernel, scattering_amplitude
from .potentials import parse_potential
from .quartic_core import BoundaryConditionSpec, Family, branch_zeta, interaction_matrix, omega_from_bc
from .ssf import birman_krein_check, levinson_check

Z_SAMPLES = ((-1.0, 0.0), (-2.0, 0.0), (1.0, 1.0))
FULLLINE_LAMBDAS = (0.5, 1.0, 2.0, 4.0)


def bc_to_dict(bc: BoundaryConditionSpec) -> dict:
    return {"family": bc.family.value, "alpha": [bc.alpha.real, bc.alpha.imag],
            "alpha1": bc.alpha1, "alpha2": bc.alpha2}


def bc_from_dict(data: dict) -> BoundaryConditionSpec:
    return BoundaryConditionSpec(Family(data["family"]), complex(*data["alpha"]), data["alpha1"], data["alpha2"])


def _random_bc(rng) -> dict:
    re, im, a1, a2 = rng.normal(size=4)
    return bc_to_dict(BoundaryConditionSpec.generic(complex(re, im), a1, a2))


def _bc_case(rng):
    return {"bc": _random_bc(rng)}


def _kernel_case(rng):
    return {"bc": _random_bc(rng), "z": list(Z_SAMPLES[rng.integers(len(Z_SAMPLES))])}


def _energy_case(rng):
    return {"bc": _random_bc(rng), "lambda": float(10 ** rng.uniform(-2, 2))}


def _potential_case(rng):
    amp, width, center = rng.uniform(-1, 1), rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)
    return {"potential": f"gaussian:amp={amp:.6f},width={width:.6f},center={center:.6f}",
            "lambda": float(FULLLINE_LAMBDAS[rng.integers(len(FULLLINE_LAMBDAS))])}


# ---------------------------------------------------------------- residuals


def omega_symmetry(case) -> float:
    omega = omega_from_bc(bc_from_dict(case["bc"])).coefficients
    turned = np.array([1j ** j for j in range(5)]) * omega
    return float(np.max(np.abs(np.conj(omega) - turned)) / (1 + np.max(np.abs(omega))))


def inertia_count(case) -> float:
    bc = bc_from_dict(case["bc"])
    reference = int(np.sum(np.linalg.eigvalsh(interaction_matrix(bc)) < 0))
    try:
        count = sum(r.multiplicity for r in negative_eigenvalues(bc))
    except ConsistencyError:
        return float("inf")
    return float(abs(count - reference))


def _kernel_setup(case):
    bc = bc_from_dict(case["bc"])
    z = complex(*case["z"])
    return bc, z, branch_zeta(z)


def kernel_hermitian(case) -> float:
    bc, z, sp = _kernel_setup(case)
    spc = branch_zeta(z.conjugate())
    worst = 0.0
    for x, y in ((0.4, 1.3), (0.1, 2.2), (1.7, 0.9)):
        a = resolvent_kernel(bc, x, y, sp)
        b = np.conj(resolvent_kernel(bc, y, x, spc))
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    return float(worst)


def kernel_ode(case, y=1.0, h=0.04) -> float:
    bc, z, sp = _kernel_setup(case)
    f = lambda t: resolvent_kernel(bc, t, y, sp)
    worst = 0.0
    for x in (0.3, 1.7, 2.5):
        d4 = derivative(f, x, 4, h, 9)
        g = f(x)
        worst = max(worst, abs(d4 - z * g) / (abs(z * g) + abs(d4)))
    return float(worst)


def kernel_jump(case, y=1.0, h=0.05) -> float:
    bc, z, sp = _kernel_setup(case)
    f = lambda t: resolvent_kernel(bc, t, y, sp)
    right = derivative(f, y, 3, h, 11, "right")
    left = derivative(f, y, 3, h, 11, "left")
    return float(abs(right - left - 1))


def kernel_boundary(case, y=1.0, h=0.04) -> float:
    bc, z, sp = _kernel_setup(case)
    f = lambda t: resolvent_kernel(bc, t, y, sp)
    g = np.array([derivative(f, 0.0, m, h, 9) for m in range(4)])
    M = bc.boundary_rows()
    return float(np.max(np.abs(M @ g) / (np.abs(M) @ np.abs(g))))


def exact_unitarity(case) -> float:
    sp = scattering_amplitude(bc_from_dict(case["bc"]), case["lambda"])
    return float(abs(abs(sp.s) - 1))


def birman_krein(case) -> float:
    return float(birman_krein_check(bc_from_dict(case["bc"]), case["lambda"]))


def levinson(case) -> float:
    return float(levinson_check(bc_from_dict(case["bc"])).residual)


def fullline_unitarity(case) -> float:
    sm = connection_solve(case["lambda"], parse_potential(case["potential"]))
    return float(max(sm.unitarity_residual, abs(sm.S[0, 0] - sm.S[1, 1])))


def fullline_b_relation(case) -> float:
    return float(b_relation_residual(connection_solve(case["lambda"], parse_potential(case["potential"]))))


@dataclass(frozen=True)
class Check:
    name: str
    residual: Callable
    make_case: Callable
    tol: float
    quick: int
    full: int


CHECKS = (
    Check("omega_symmetry", omega_symmetry, _bc_case, 1e-14, 50, 1000),
    Check("inertia_count", inertia_count, _bc_case, 0.5, 100, 1000),
    Check("kernel_hermitian", kernel_hermitian, _kernel_case, 1e-12, 20, 100),
    Check("kernel_ode", kernel_ode, _kernel_case, 1e-6, 20, 100),
    Check("kernel_jump", kernel_jump, _kernel_case, 1e-6, 20, 100),
    Check("kernel_boundary", kernel_boundary, _kernel_case, 1e-6, 20, 100),
    Check("exact_unitarity", exact_unitarity, _energy_case, 1e-12, 200, 1000),
    Check("birman_krein", birman_krein, _energy_case, 1e-8, 50, 200),
    Check("levinson", levinson, _bc_case, 1e-4, 5, 20),
    Check("fullline_unitarity", fullline_unitarity, _potential_case, 1e-6, 3, 12),
    Check("fullline_b_relation", fullline_b_relation, _potential_case, 1e-5, 3, 12),
)
CHECK_BY_NAME = {c.name: c for c in CHECKS}


@dataclass
class CheckResult:
    name: str
    count: int
    max_residual: float
    tol: float
    passed: bool
    failures: list = field(default_factory=list)


@dataclass
class ValidationReport:
    suite: str
    seed: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}


def _evaluate(check: Check, case) -> float:
    try:
        return check.residual(case)
    except QuarticError as exc:
        case["error"] = f"{type(exc).__name__}: {exc}"
        return float("inf")


def run_check(check: Check, n: int, seed: int, tol: float | None = None) -> CheckResult:
    tol = check.tol if tol is None else tol
    rng = np.random.default_rng([seed, CHECKS.index(check)])
    worst, failures = 0.0, []
    for _ in range(n):
        case = check.make_case(rng)
        r = _evaluate(check, case)
        worst = max(worst, r)
        if not r <= tol:
            failures.append({"case": case, "residual": r})
    return CheckResult(check.name, n, worst, tol, not failures, failures)


def validate(suite: str = "quick", seed: int = 1, tolerances: dict | None = None,
             only=None) -> ValidationReport:
    if suite not in ("quick", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    tolerances = tolerances or {}
    unknown = set(tolerances) - set(CHECK_BY_NAME)
    if unknown:
        raise ValueError(f"unknown check(s): {', '.join(sorted(unknown))}")
    results = []
    for check in CHECKS:
        if only and check.name not in only:
            continue
        n = check.quick if suite == "quick" else check.full
        results.append(run_check(check, n, seed, tolerances.get(check.name)))
    return ValidationReport(suite, seed, results)


def replay_records(report: ValidationReport) -> list:
    return [{"check": c.name, "tol": c.tol, "seed": report.seed, "suite": report.suite, **f}
            for c in report.checks for f in c.failures]


def write_replay(report: ValidationReport, path) -> int:
    records = replay_records(report)
    with open(path, "w") as fh:
        json.dump({"failures": records}, fh, indent=2)
        fh.write("\n")
    return len(records)


def replay(path) -> list:
    """Re-evaluate every serialized failure; returns (record, new residual, passed) triples."""
    with open(path) as fh:
        data = json.load(fh)
    out = []
    for rec in data["failures"]:
        check = CHECK_BY_NAME[rec["check"]]
        case = {k: v for k, v in rec["case"].items() if k != "error"}
        r = _evaluate(check, case)
        out.append((rec, r, r <= rec["tol"]))
    return out
