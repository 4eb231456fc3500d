import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from quartic_scatter.quartic_core import BoundaryConditionSpec

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

reals = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)


@st.composite
def generic_bcs(draw, real_alpha=False):
    re, a1, a2 = draw(reals), draw(reals), draw(reals)
    im = 0.0 if real_alpha else draw(reals)
    return BoundaryConditionSpec.generic(complex(re, im), a1, a2)


energies = st.floats(min_value=1e-2, max_value=1e2, allow_nan=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


def random_generic(rng, real_alpha=False):
    re, im, a1, a2 = rng.normal(size=4)
    return BoundaryConditionSpec.generic(complex(re, 0.0 if real_alpha else im), a1, a2)
