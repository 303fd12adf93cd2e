import warnings

import numpy as np
import pytest

from cvcavity import RingParams, RingRegimeWarning, optimum_sigma


@pytest.fixture
def ring_099():
    """Reference ring: a_p = 0.99 with the rounded optimum self-coupling."""
    return RingParams(sigma_p=0.868, a_p=0.99)


@pytest.fixture
def ring_075():
    """Lossier ring, outside the filtered-pump accuracy regime."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RingRegimeWarning)
        return RingParams(sigma_p=optimum_sigma(0.75), a_p=0.75)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(autouse=True)
def _quiet_regime_warnings():
    # a_p = 0.75 setups are exercised on purpose; the regime warning is
    # asserted explicitly where it is the subject of the test
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RingRegimeWarning)
        yield
