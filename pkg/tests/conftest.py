import math

import numpy as np
import pytest

from coulomb2d import GaussianProfile, TabulatedProfile, derive_parameters


def rel_err(value, reference):
    if reference == 0.0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def tabulated_from_radial(func, r_max, n=600, tail="zero", center=(0.0, 0.0)):
    r = np.linspace(0.0, r_max, n)
    return TabulatedProfile(r, func(r), tail=tail, center=center)


def tabulated_gaussian(N=3.0, A=1.0, n=600, center=(0.0, 0.0)):
    c_amp = N * A / math.pi
    r_max = 9.0 / math.sqrt(A)
    return tabulated_from_radial(lambda r: c_amp * np.exp(-A * r * r),
                                 r_max, n=n, center=center)


@pytest.fixture
def params_gamma2():
    return derive_parameters(2.0, 0.5)


@pytest.fixture
def unit_gaussian():
    # mass 1, width 1
    return GaussianProfile(C=1.0 / math.pi, A=1.0)
