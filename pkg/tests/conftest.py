import math

import mpmath as mp
import pytest

from nnapprox import make_kernel

mp.mp.dps = 40

# closed forms for the logistic kernel
LOGISTIC_A2 = math.pi ** 2 / 3 + 1.0 / 3.0


def logistic_phi_hat(v: float) -> float:
    """Transform of the logistic kernel: pi sin(v) / sinh(pi v)."""
    if v == 0:
        return 1.0
    return float(mp.pi * mp.sin(v) / mp.sinh(mp.pi * v))


def mp_sigma(x):
    return 1 / (1 + mp.exp(-x))


def mp_phi(x, s=0, scale=1):
    """phi^(s) of the (optionally contracted) logistic kernel by mpmath differentiation."""
    def phi(t):
        return scale * (mp_sigma(scale * t + 1) - mp_sigma(scale * t - 1)) / 2
    if s == 0:
        return phi(mp.mpf(x))
    return mp.diff(phi, mp.mpf(x), s)


def mp_moment(x, s, nu, radius=70):
    """A_nu(phi^(s), x) = sum_k phi^(s)(x - k) (k - x)^nu at 40 digits."""
    x = mp.mpf(x)
    k0 = int(mp.floor(x))
    return mp.fsum(mp_phi(x - k, s) * (k - x) ** nu
                   for k in range(k0 - radius, k0 + radius + 1))


@pytest.fixture(scope="session")
def kernel():
    return make_kernel("logistic", 2)


@pytest.fixture(scope="session")
def kernel3():
    return make_kernel("logistic", 3)
