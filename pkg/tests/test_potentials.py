import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from quartic_scatter.potentials import make_term, parse_potential


def test_zero_spec():
    for spec in ("", "zero", "0"):
        assert parse_potential(spec).is_zero


def test_channels_and_sum():
    pot = parse_potential("gaussian:amp=1,width=1;box:amp=2,lo=-1,hi=1;v1=exponential:amp=0.5,width=0.3")
    assert len(pot.channel("v0")) == 2 and len(pot.channel("v1")) == 1
    assert pot.v0(0.0) == pytest.approx(3.0)
    assert pot.v1(0.0) == pytest.approx(0.5)
    assert pot.breakpoints == (-1.0, 0.0, 1.0)
    assert not pot.super_exponential


def test_super_exponential_flag():
    assert parse_potential("gaussian:amp=1;box:amp=1,lo=0,hi=1").super_exponential
    assert not parse_potential("sech2:amp=1").super_exponential


@pytest.mark.parametrize("spec", ["gaussian:amp=1,width=", "box:amp=1,lo=1,hi=0", "cubic:amp=1",
                                  "v2=gaussian:amp=1", "gaussian:amp", "gaussian:depth=1",
                                  "grid:file=a.csv,x=1"])
def test_malformed(spec):
    with pytest.raises(ValueError):
        parse_potential(spec)


@pytest.mark.parametrize("family", ["gaussian", "exponential", "sech2"])
@given(amp=st.floats(-2, 2).filter(lambda a: abs(a) > 1e-3), width=st.floats(0.2, 1.5),
       center=st.floats(-1, 1), r=st.floats(0.5, 6))
def test_tail_matches_quadrature(family, amp, width, center, r):
    term = make_term(family, amp=amp, width=width, center=center)
    f = lambda x: abs(float(term.func(x)))
    # Split at the kink or peak at +-center so quadrature sees smooth pieces.
    cuts = sorted({-np.inf, -r, r, np.inf} | {c for c in (center, -center) if abs(c) > r})
    numeric = sum(integrate.quad(f, lo, hi)[0] for lo, hi in zip(cuts, cuts[1:]) if lo >= r or hi <= -r)
    assert term.tail(r) == pytest.approx(numeric, rel=1e-6, abs=1e-13)


def test_support_radius_bounds_tail():
    pot = parse_potential("gaussian:amp=1,width=1;v1=sech2:amp=0.3,width=0.5")
    a = pot.support_radius
    assert pot.tail_mass(a) <= 1.01 * pot.eps_tail
    assert pot.tail_mass(0.9 * a) > pot.eps_tail / 2


def test_grid_potential(tmp_path):
    xs = np.linspace(-2, 2, 81)
    rows = ["x,v0,v1"] + [f"{x},{math.exp(-x * x)},{0.1 * math.cos(x)}" for x in xs]
    path = tmp_path / "pot.csv"
    path.write_text("\n".join(rows))
    pot = parse_potential(f"grid:file={path}")
    assert pot.v0(0.3) == pytest.approx(math.exp(-0.09), abs=1e-5)
    assert pot.v1(1.0) == pytest.approx(0.1 * math.cos(1.0), abs=1e-6)
    assert pot.v0(2.5) == 0.0
    assert pot.support_radius == pytest.approx(2.0)
