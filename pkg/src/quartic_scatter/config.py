"""Scenario configuration for the command-line runner."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from enum import Enum

import numpy as np

from .fullline import IntegrationControl
from .quartic_core import BoundaryConditionSpec, Family


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending field."""


class Mode(str, Enum):
    HALFLINE_EXACT = "halfline_exact"
    HALFLINE_SHORTRANGE = "halfline_shortrange"
    FULLLINE = "fullline"


OUTPUT_KINDS = ("scatter", "eigen", "resonance", "ssf", "levinson", "resolvent", "density", "checks")
_MODE_OUTPUTS = {
    Mode.HALFLINE_EXACT: set(OUTPUT_KINDS),
    Mode.HALFLINE_SHORTRANGE: {"scatter", "checks"},
    Mode.FULLLINE: {"scatter", "checks"},
}


@dataclass(frozen=True)
class LambdaGrid:
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError("lambda_grid.count: need at least 2 points")
        if not self.min < self.max:
            raise ConfigError("lambda_grid: min must be below max")
        if self.spacing not in ("linear", "log"):
            raise ConfigError("lambda_grid.spacing: expected 'linear' or 'log'")
        if self.spacing == "log" and self.min <= 0:
            raise ConfigError("lambda_grid: log spacing needs min > 0")

    @classmethod
    def parse(cls, text: str) -> "LambdaGrid":
        parts = text.split(":")
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "linear")):
            raise ConfigError(f"--lambda: expected min:max:count[:log], got {text!r}")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"--lambda: non-numeric entry in {text!r}") from None
        return cls(lo, hi, n, parts[3] if len(parts) == 4 else "linear")

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class Tolerances:
    unitarity: float = 1e-6
    symmetry: float = 1e-6
    b_relation: float = 1e-5
    flux: float = 1e-8
    contamination: float = 1e-8
    exact_unitarity: float = 1e-12
    exact_relation: float = 1e-12
    birman_krein: float = 1e-8
    levinson: float = 1e-4
    halfline_modulus: float = 1e-8
    halfline_relation: float = 1e-6
    rtol: float = 1e-10
    atol: float = 1e-12

    def override(self, updates: dict) -> "Tolerances":
        known = {f.name for f in fields(self)}
        clean = {}
        for name, value in updates.items():
            if name not in known:
                raise ConfigError(f"tolerances.{name}: unknown tolerance (known: {', '.join(sorted(known))})")
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"tolerances.{name}: not a number: {value!r}") from None
            if not value >= np.finfo(float).eps:
                raise ConfigError(f"tolerances.{name}: must be at least machine epsilon")
            clean[name] = value
        return replace(self, **clean)

    def integration(self) -> IntegrationControl:
        return IntegrationControl(rtol=self.rtol, atol=self.atol)


@dataclass(frozen=True)
class ScenarioConfig:
    mode: Mode = Mode.HALFLINE_EXACT
    bc: BoundaryConditionSpec = field(default_factory=BoundaryConditionSpec)
    potential: str = "zero"
    lambda_grid: LambdaGrid = field(default_factory=lambda: LambdaGrid(0.1, 10.0, 50))
    outputs: tuple = ("scatter",)
    tolerances: Tolerances = field(default_factory=Tolerances)
    output_format: str = "csv"
    seed: int = 0
    jobs: int | None = None

    def __post_init__(self):
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output_format: expected 'csv' or 'json'")
        allowed = _MODE_OUTPUTS[Mode(self.mode)]
        for kind in self.outputs:
            if kind not in OUTPUT_KINDS:
                raise ConfigError(f"outputs: unknown kind {kind!r}")
            if kind not in allowed:
                raise ConfigError(f"outputs: {kind!r} is not available in mode {Mode(self.mode).value}")
        if {"scatter", "density", "checks", "resolvent"} & set(self.outputs) and self.lambda_grid.min <= 0:
            raise ConfigError("lambda_grid.min: scattering outputs need lambda > 0")
        if Mode(self.mode) is Mode.HALFLINE_SHORTRANGE and self.bc.family is not Family.CLAMPED:
            if self.bc != BoundaryConditionSpec():
                raise ConfigError("bc: the short-range half-line problem uses the Clamped condition only")
            object.__setattr__(self, "bc", BoundaryConditionSpec(Family.CLAMPED))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError("jobs: must be positive")


def parse_complex(text: str) -> complex:
    """Accepts 1.5, 2-3i, -0.5+1e-3j, 4i."""
    text = text.strip().replace(" ", "")
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"not a complex number: {text!r}") from None


def parse_bc(text: str) -> BoundaryConditionSpec:
    """'alpha=RE+IMi,alpha1=..,alpha2=..,family=..' (missing entries default to zero/Generic)."""
    values = {"family": "Generic", "alpha": "0", "alpha1": "0", "alpha2": "0"}
    for item in filter(None, (p.strip() for p in text.split(","))):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in values:
            raise ConfigError(f"--bc: unexpected entry {item!r}")
        values[key] = val.strip()
    return bc_from_mapping(values, "--bc")


def bc_from_mapping(data: dict, where: str = "bc") -> BoundaryConditionSpec:
    try:
        family = Family(data.get("family", "Generic"))
    except ValueError:
        raise ConfigError(f"{where}.family: unknown family {data.get('family')!r}") from None
    alpha = data.get("alpha", 0)
    alpha = parse_complex(alpha) if isinstance(alpha, str) else complex(
        *(alpha if isinstance(alpha, (list, tuple)) else (alpha, 0)))
    try:
        alpha1, alpha2 = float(data.get("alpha1", 0)), float(data.get("alpha2", 0))
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: alpha1 and alpha2 must be real numbers") from None
    try:
        return BoundaryConditionSpec(family, alpha, alpha1, alpha2)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_tolerance_flags(items) -> dict:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol: expected NAME=VALUE, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def load_config_file(path) -> dict:
    text = open(path).read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


_TOP_KEYS = {"mode", "bc", "potential", "lambda_grid", "outputs", "tolerances", "output_format", "seed", "jobs"}


def config_from_mapping(data: dict) -> ScenarioConfig:
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(sorted(unknown))}")
    kwargs = {}
    if "mode" in data:
        try:
            kwargs["mode"] = Mode(data["mode"])
        except ValueError:
            raise ConfigError(f"mode: unknown mode {data['mode']!r}") from None
    if "bc" in data:
        bc = data["bc"]
        kwargs["bc"] = parse_bc(bc) if isinstance(bc, str) else bc_from_mapping(bc)
    if "potential" in data:
        if not isinstance(data["potential"], str):
            raise ConfigError("potential: expected a specification string")
        kwargs["potential"] = data["potential"]
    if "lambda_grid" in data:
        g = data["lambda_grid"]
        if isinstance(g, str):
            kwargs["lambda_grid"] = LambdaGrid.parse(g)
        else:
            try:
                kwargs["lambda_grid"] = LambdaGrid(float(g["min"]), float(g["max"]), int(g["count"]),
                                                   g.get("spacing", "linear"))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"lambda_grid: {exc}") from None
    if "outputs" in data:
        outs = data["outputs"]
        kwargs["outputs"] = tuple(outs.split(",") if isinstance(outs, str) else outs)
    if "tolerances" in data:
        kwargs["tolerances"] = Tolerances().override(data["tolerances"])
    for key, conv in (("output_format", str), ("seed", int), ("jobs", int)):
        if key in data and data[key] is not None:
            try:
                kwargs[key] = conv(data[key])
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: invalid value {data[key]!r}") from None
    return ScenarioConfig(**kwargs)


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)
