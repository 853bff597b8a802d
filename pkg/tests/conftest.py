"""Shared brute-force oracles, kept deliberately slow and transparent."""

import numpy as np
import pytest


def brute_force_nonlinear(psi):
    """Triple-loop evaluation of the quadratic Galerkin term."""
    N = len(psi)
    out = np.zeros(N)
    for n in range(1, N + 1):
        s1 = 0.0
        for j in range(1, n):
            s1 += psi[j - 1] * psi[n - j - 1]
        s2 = 0.0
        for k in range(1, N - n + 1):
            s2 += psi[k - 1] * psi[k + n - 1]
        out[n - 1] = 0.5 * n * s1 - n * s2
    return out


def bisect_characteristic_foot(u0_value, x, t, half_width, tol=1e-14):
    """Pure-bisection root of z + t*u0(z) = x on a guaranteed bracket."""
    lo, hi = x - half_width, x + half_width
    g = lambda z: z + t * u0_value(z) - x
    glo = g(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(gm) <= tol:
            return mid
        if (glo < 0) == (gm < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
