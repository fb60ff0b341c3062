import numpy as np
import pytest

from isctrack.rf import ArrayGeometry, RfConstants


@pytest.fixture
def geom():
    return ArrayGeometry(mx_t=4, my_t=4, mx_r=4, my_r=4)


@pytest.fixture
def rfk():
    # Standard link constants; beta0 and rcs are the documented defaults.
    return RfConstants(beta0=1e-6, fc=30e9, c=3e8, rcs=1.0, sigma_c2=1e-11,
                       sigma_r2=1e-11, mf_gain=1e3, a1=20.0, a2=100.0,
                       altitude=50.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
