"""Evaluate a ScenarioConfig over its lambda grid and write CSV or JSON tables."""

from __future__ import annotations

import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from .config import Mode, ScenarioConfig, default_jobs
from .errors import ConsistencyError, DegeneracyError, NearEigenvalueError, UnsupportedFamilyError
from .fullline import b_relation_residual, flux_invariant, halfline_shortrange, solve_waves
from .halfline import resonance_classify, scattering_amplitude, spectral_density, trace_resolvent_diff
from .potentials import parse_potential
from .quartic_core import Family, upper_edge
from .ssf import eigenvalues, levinson_check, ssf, threshold_jump

EXIT_OK, EXIT_MALFORMED, EXIT_VALIDATION, EXIT_DEGENERATE = 0, 1, 2, 3
DENSITY_POINTS = (0.5, 1.0, 2.0)
EMPTY_HEADERS = {"eigen": ("lambda", "k", "multiplicity", "kind")}


def format_number(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    text = "%.12g" % value
    return "0" if text == "-0" else text


def _json_value(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return None
    return float(format_number(value))


# ---------------------------------------------------------------- per-point work


def _halfline_exact_point(config: ScenarioConfig, lam: float) -> dict:
    bc, tol = config.bc, config.tolerances
    out = {}
    if {"scatter", "checks"} & set(config.outputs):
        sp = scattering_amplitude(bc, lam)
        out["scatter"] = [{"lambda": lam, "re_s": sp.s.real, "im_s": sp.s.imag,
                           "re_b": sp.b.real, "im_b": sp.b.imag}]
        if "checks" in config.outputs:
            modulus = abs(abs(sp.s) - 1)
            real_alpha = bc.family is not Family.GENERIC or bc.alpha.imag == 0
            relation = abs(sp.s * np.conj(sp.b) - sp.b) if real_alpha else float("nan")
            passed = modulus <= tol.exact_unitarity and (not real_alpha or relation <= tol.exact_relation)
            out["checks"] = [{"lambda": lam, "modulus_residual": modulus,
                              "relation_residual": relation, "passed": passed}]
    if "resolvent" in config.outputs:
        tr = trace_resolvent_diff(bc, upper_edge(lam))
        out["resolvent"] = [{"lambda": lam, "re_trace": tr.real, "im_trace": tr.imag}]
    if "density" in config.outputs:
        out["density"] = []
        for x in DENSITY_POINTS:
            d = complex(spectral_density(bc, x, x, lam))
            out["density"].append({"lambda": lam, "x": x, "y": x, "re_density": d.real, "im_density": d.imag})
    return out


def _halfline_shortrange_point(config: ScenarioConfig, lam: float) -> dict:
    pot = parse_potential(config.potential)
    sp = halfline_shortrange(lam, pot, config.tolerances.integration())
    out = {"scatter": [{"lambda": lam, "re_s": sp.s.real, "im_s": sp.s.imag,
                        "re_b": sp.b.real, "im_b": sp.b.imag}]}
    if "checks" in config.outputs:
        tol = config.tolerances
        modulus = abs(abs(sp.s) - 1)
        relation = abs(sp.s * np.conj(sp.b) - sp.b)
        out["checks"] = [{"lambda": lam, "modulus_residual": modulus, "relation_residual": relation,
                          "passed": modulus <= tol.halfline_modulus and relation <= tol.halfline_relation}]
    return out


def _fullline_point(config: ScenarioConfig, lam: float) -> dict:
    pot = parse_potential(config.potential)
    sol = solve_waves(lam, pot, config.tolerances.integration())
    sm = sol.matrices
    row = {"lambda": lam}
    for name, M in (("s", sm.S), ("b", sm.B)):
        for i in range(2):
            for j in range(2):
                row[f"re_{name}{i + 1}{j + 1}"] = M[i, j].real
                row[f"im_{name}{i + 1}{j + 1}"] = M[i, j].imag
    out = {"scatter": [row]}
    if "checks" in config.outputs:
        tol = config.tolerances
        a = pot.support_radius
        unit = sm.unitarity_residual
        sym = abs(sm.S[0, 0] - sm.S[1, 1])
        brel = b_relation_residual(sm) if pot.super_exponential else float("nan")
        fl = abs(flux_invariant((sol.wave_state(1, a), sol.wave_state(1, -a))))
        cont = max(sol.minus.contamination(), sol.plus.contamination())
        passed = (unit <= tol.unitarity and sym <= tol.symmetry and fl <= tol.flux
                  and cont <= tol.contamination and (math.isnan(brel) or brel <= tol.b_relation))
        out["checks"] = [{"lambda": lam, "unitarity": unit, "symmetry": sym, "b_relation": brel,
                          "flux": fl, "contamination": cont, "passed": passed}]
    return out


_POINT = {
    Mode.HALFLINE_EXACT: _halfline_exact_point,
    Mode.HALFLINE_SHORTRANGE: _halfline_shortrange_point,
    Mode.FULLLINE: _fullline_point,
}
_PER_POINT = {"scatter", "checks", "resolvent", "density"}


def _point(args):
    config, lam = args
    return _POINT[config.mode](config, float(lam))


# ---------------------------------------------------------------- whole-grid outputs


def _global_tables(config: ScenarioConfig, grid) -> dict:
    bc = config.bc
    out = {}
    if "eigen" in config.outputs:
        out["eigen"] = [{"lambda": r.lam, "k": r.k, "multiplicity": r.multiplicity, "kind": r.kind.value}
                        for r in eigenvalues(bc)]
    if "resonance" in config.outputs:
        rc = resonance_classify(bc)
        out["resonance"] = [{"kind": rc.kind.value, "expected_ssf_jump": rc.expected_ssf_jump,
                             "threshold_jump": threshold_jump(bc)}]
    if "levinson" in config.outputs:
        res = levinson_check(bc)
        out["levinson"] = [{"lhs": res.lhs, "rhs": res.rhs, "residual": res.residual, "n_eigen": res.n_eigen,
                            "gamma0": res.gamma0, "gamma1": res.gamma1,
                            "passed": res.residual <= config.tolerances.levinson}]
    if "ssf" in config.outputs or ("scatter" in config.outputs and config.mode is Mode.HALFLINE_EXACT):
        curve = ssf(bc, grid)
        out["_xi"] = curve.xi
        if "ssf" in config.outputs:
            out["ssf"] = [{"lambda": lam, "xi": xi} for lam, xi in zip(curve.grid, curve.xi)]
    return out


def evaluate(config: ScenarioConfig) -> dict:
    grid = config.lambda_grid.values()
    tables = _global_tables(config, grid) if config.mode is Mode.HALFLINE_EXACT else {}
    xi = tables.pop("_xi", None)
    if _PER_POINT & set(config.outputs):
        jobs = config.jobs or default_jobs()
        tasks = [(config, lam) for lam in grid]
        if jobs == 1 or len(tasks) < 4 or config.mode is Mode.HALFLINE_EXACT:
            results = [_point(t) for t in tasks]
        else:
            with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
                results = list(pool.map(_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
        for kind in _PER_POINT & set(config.outputs):
            tables[kind] = [rec for res in results for rec in res.get(kind, [])]
        if xi is not None and "scatter" in tables:
            for rec, value in zip(tables["scatter"], xi):
                rec["xi"] = value
    return {kind: tables[kind] for kind in config.outputs if kind in tables}


def write_tables(tables: dict, fmt: str, sink):
    if fmt == "json":
        payload = {kind: [{k: _json_value(v) for k, v in rec.items()} for rec in recs]
                   for kind, recs in tables.items()}
        sink.write(json.dumps(payload, indent=2) + "\n")
        return
    several = len(tables) > 1
    for n, (kind, recs) in enumerate(tables.items()):
        if several:
            if n:
                sink.write("\n")
            sink.write(f"# {kind}\n")
        if not recs:
            if kind in EMPTY_HEADERS:
                sink.write(",".join(EMPTY_HEADERS[kind]) + "\n")
            continue
        sink.write(",".join(recs[0].keys()) + "\n")
        for rec in recs:
            sink.write(",".join(format_number(v) for v in rec.values()) + "\n")


def tables_pass(tables: dict) -> bool:
    return all(rec.get("passed", True) for recs in tables.values() for rec in recs)


def run(config: ScenarioConfig, out) -> int:
    """Evaluate and write; returns the process exit status."""
    try:
        tables = evaluate(config)
    except (NearEigenvalueError, DegeneracyError, ConsistencyError) as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (UnsupportedFamilyError, ValueError) as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    write_tables(tables, config.output_format, out)
    return EXIT_OK if tables_pass(tables) else EXIT_VALIDATION
