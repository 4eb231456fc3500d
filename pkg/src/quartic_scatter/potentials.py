"""Short-range coefficient pairs (v0, v1) and their text specification.

A specification is a ';'-separated list of terms. Each term is

    [channel=]family:param=value,...

where channel is v0 (default) or v1. Families: gaussian (amp, width, center),
box (amp, lo, hi), exponential (amp, width, center), sech2 (amp, width,
center), grid (file; CSV with columns x,v0,v1, sets both channels), zero.
Example: "gaussian:amp=1,width=1;v1=box:amp=0.2,lo=-1,hi=1".
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import interpolate, optimize, special

TAIL_EPS = 1e-12


@dataclass(frozen=True)
class Term:
    """One closed-form (or sampled) contribution to a channel."""

    channel: str
    family: str
    func: Callable
    tail: Callable          # r -> integral of |f| over |x| > r
    radius_hint: float      # |x| beyond which the decay has started
    breakpoints: tuple = ()
    super_exponential: bool = True
    params: dict = field(default_factory=dict)

    def radius(self, eps):
        if self.tail(self.radius_hint) <= eps:
            return self.radius_hint
        hi = self.radius_hint + 1.0
        while self.tail(hi) > eps:
            hi = 2 * hi
        return optimize.brentq(lambda r: self.tail(r) - eps, self.radius_hint, hi, xtol=1e-12)


def _gaussian(amp=1.0, width=1.0, center=0.0):
    f = lambda x: amp * np.exp(-(((np.asarray(x) - center) / width) ** 2))
    tail = lambda r: abs(amp) * width * math.sqrt(math.pi) / 2 * (
        special.erfc((r - center) / width) + special.erfc((r + center) / width))
    return f, tail, abs(center), (), True


def _box(amp=1.0, lo=-1.0, hi=1.0):
    if hi <= lo:
        raise ValueError("box needs lo < hi")
    f = lambda x: np.where((np.asarray(x) >= lo) & (np.asarray(x) <= hi), amp, 0.0)
    tail = lambda r: abs(amp) * (max(0.0, min(hi, -r) - lo) + max(0.0, hi - max(lo, r)))
    return f, tail, max(abs(lo), abs(hi)), (lo, hi), True


def _exponential(amp=1.0, width=1.0, center=0.0):
    f = lambda x: amp * np.exp(-np.abs(np.asarray(x) - center) / width)
    # integral of e^{-|t|} over t > t0
    upper = lambda t0: math.exp(-t0) if t0 >= 0 else 2 - math.exp(t0)
    tail = lambda r: abs(amp) * width * (upper((r - center) / width) + upper((r + center) / width))
    return f, tail, abs(center), (center,), False


def _sech2(amp=1.0, width=1.0, center=0.0):
    def f(x):
        e = np.exp(-2 * np.abs((np.asarray(x) - center) / width))
        return amp * 4 * e / (1 + e) ** 2
    # 1 - tanh(t) = 2 / (1 + e^{2t}), stable for large t
    upper = lambda t: 2 / (1 + math.exp(min(2 * t, 700)))
    tail = lambda r: abs(amp) * width * (upper((r - center) / width) + upper((r + center) / width))
    return f, tail, abs(center), (), False


_FAMILIES = {"gaussian": _gaussian, "box": _box, "exponential": _exponential, "sech2": _sech2}


def make_term(family: str, channel: str = "v0", **params) -> Term:
    if channel not in ("v0", "v1"):
        raise ValueError(f"unknown channel {channel!r}")
    try:
        maker = _FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown potential family {family!r}") from None
    f, tail, hint, breaks, superexp = maker(**params)
    return Term(channel, family, f, tail, hint, tuple(breaks), superexp, dict(params))


def grid_terms(path) -> list[Term]:
    """Cubic interpolation of sampled coefficients, zero outside the sampled range."""
    rows = list(csv.DictReader(Path(path).read_text().splitlines()))
    if not rows or not {"x", "v0", "v1"} <= set(rows[0]):
        raise ValueError(f"{path}: CSV needs columns x,v0,v1")
    data = np.array([[float(r["x"]), float(r["v0"]), float(r["v1"])] for r in rows])
    data = data[np.argsort(data[:, 0])]
    x = data[:, 0]
    lo, hi = x[0], x[-1]
    terms = []
    for col, channel in ((1, "v0"), (2, "v1")):
        spline = interpolate.CubicSpline(x, data[:, col])
        f = (lambda s: (lambda t: np.where((np.asarray(t) >= lo) & (np.asarray(t) <= hi),
                                           s(np.clip(t, lo, hi)), 0.0)))(spline)
        terms.append(Term(channel, "grid", f, lambda r: 0.0, max(abs(lo), abs(hi)), (lo, hi), True,
                          {"file": str(path)}))
    return terms


@dataclass(frozen=True)
class PotentialPair:
    """Real coefficients v0, v1 treated as zero outside [-a, a]."""

    terms: tuple = ()
    eps_tail: float = TAIL_EPS
    label: str = "zero"

    def channel(self, name):
        return [t for t in self.terms if t.channel == name]

    def v0(self, x):
        return sum((t.func(x) for t in self.channel("v0")), np.zeros_like(np.asarray(x, dtype=float)))

    def v1(self, x):
        return sum((t.func(x) for t in self.channel("v1")), np.zeros_like(np.asarray(x, dtype=float)))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def support_radius(self) -> float:
        if not self.terms:
            return 1.0
        eps = self.eps_tail / len(self.terms)
        return max(max(t.radius(eps) for t in self.terms), 1e-3)

    def tail_mass(self, r=None) -> float:
        r = self.support_radius if r is None else r
        return sum(t.tail(r) for t in self.terms)

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted({b for t in self.terms for b in t.breakpoints}))

    @property
    def super_exponential(self) -> bool:
        return all(t.super_exponential for t in self.terms)


def _parse_value(text):
    return float(text)


def parse_potential(spec: str, eps_tail: float = TAIL_EPS) -> PotentialPair:
    spec = (spec or "").strip()
    if spec in ("", "zero", "0"):
        return PotentialPair((), eps_tail, "zero")
    terms = []
    for raw in spec.split(";"):
        raw = raw.strip()
        if not raw or raw == "zero":
            continue
        head, _, body = raw.partition(":")
        channel, _, family = head.rpartition("=")
        channel = channel.strip() or "v0"
        family = family.strip()
        params = {}
        for item in filter(None, (p.strip() for p in body.split(","))):
            key, sep, val = item.partition("=")
            if not sep:
                raise ValueError(f"malformed parameter {item!r} in {raw!r}")
            params[key.strip()] = val.strip()
        if family == "grid":
            if set(params) != {"file"}:
                raise ValueError("grid potential takes exactly one parameter: file")
            terms.extend(grid_terms(params["file"]))
            continue
        try:
            terms.append(make_term(family, channel, **{k: _parse_value(v) for k, v in params.items()}))
        except TypeError as exc:
            raise ValueError(f"bad parameters for {family!r}: {exc}") from None
    return PotentialPair(tuple(terms), eps_tail, spec)


def zero_potential() -> PotentialPair:
    return PotentialPair()
