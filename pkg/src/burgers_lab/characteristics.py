"""Exact inviscid Burgers solutions on the torus by characteristics.

For smooth odd data u0 the strong solution satisfies u(x, t) = u0(xi)
where xi solves the characteristic equation xi + t*u0(xi) = x.  The map
xi -> xi + t*u0(xi) is strictly increasing while

    t < T_max = 1 / (-min_x u0'(x)),

so the root is unique and the solver below (vectorized Newton with a
guaranteed bisection bracket) is an oracle for the Galerkin dynamics up
to the guarded horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import GridFunction, SineSpectrum, evaluate_field, evaluate_slope, grid_points, odd_symmetry_residual

#: fraction of T_max kept away from the horizon, where the map stays monotone
HORIZON_GUARD = 1e-6

_NEWTON_MAX_ITER = 50
_RESIDUAL_TOL = 1e-12


class HorizonError(ValueError):
    """Requested time is past the guarded characteristics horizon."""


class RootFindError(RuntimeError):
    """Newton and bisection both failed (unreachable before the horizon)."""


@dataclass(frozen=True)
class InitialField:
    """Odd initial data with closed-form value and slope evaluators."""

    spectrum: SineSpectrum

    def value(self, x):
        return evaluate_field(self.spectrum, x)

    def slope(self, x):
        return evaluate_slope(self.spectrum, x)

    @property
    def sup_bound(self) -> float:
        """Guaranteed bound on |u0|: 2 * sum |psi_n| (used for brackets)."""
        return float(2.0 * np.sum(np.abs(self.spectrum.psi)))


def _golden_min(f, a: float, b: float, tol: float = 1e-12) -> float:
    """Golden-section argmin of f on [a, b] to window width tol."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def min_initial_slope(u0: InitialField, samples: int = 4096) -> float:
    """Global minimum of u0' located by dense sampling plus refinement."""
    x = np.linspace(-np.pi, np.pi, samples, endpoint=False)
    slopes = u0.slope(x)
    i = int(np.argmin(slopes))
    h = 2.0 * np.pi / samples
    x_star = _golden_min(lambda xi: float(u0.slope(xi)), x[i] - h, x[i] + h)
    return float(min(np.min(slopes), u0.slope(x_star)))


def tmax_inviscid(u0: InitialField, samples: int = 4096) -> float:
    """Classical blowup time 1 / (-min u0'), or +inf for nondecreasing data."""
    m = min_initial_slope(u0, samples)
    if m >= 0.0:
        return np.inf
    return 1.0 / (-m)


def _check_horizon(u0: InitialField, t: float, guard: float) -> None:
    if t < 0.0:
        raise ValueError("time must be nonnegative")
    t_max = tmax_inviscid(u0)
    if np.isfinite(t_max) and t >= t_max * (1.0 - guard):
        raise HorizonError(f"t={t} is past the guarded horizon {t_max * (1.0 - guard):.6g}")


def _bisect_root(g, lo: float, hi: float, tol: float) -> float:
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


def _solve_feet(u0: InitialField, x: np.ndarray, t: float) -> np.ndarray:
    """Solve xi + t*u0(xi) = x for every point of x."""
    xi = np.array(x, dtype=float, copy=True)
    res = xi + t * u0.value(xi) - x
    for _ in range(_NEWTON_MAX_ITER):
        if np.all(np.abs(res) <= _RESIDUAL_TOL):
            break
        deriv = 1.0 + t * u0.slope(xi)
        xi = xi - res / deriv
        res = xi + t * u0.value(xi) - x
    bad = np.abs(res) > _RESIDUAL_TOL
    if np.any(bad):
        half_width = t * u0.sup_bound
        for i in np.nonzero(bad)[0]:
            g = lambda z: z + t * float(u0.value(z)) - x[i]
            xi[i] = _bisect_root(g, x[i] - half_width, x[i] + half_width, _RESIDUAL_TOL)
        res = xi + t * u0.value(xi) - x
        if np.any(np.abs(res) > 10.0 * _RESIDUAL_TOL):
            raise RootFindError("characteristic foot not found to tolerance")
    return xi


def eval_characteristics(u0: InitialField, x, t: float, guard: float = HORIZON_GUARD):
    """u(x, t) = u0(xi) with xi + t*u0(xi) = x, residual below 1e-12."""
    _check_horizon(u0, t, guard)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    feet = _solve_feet(u0, xa, t)
    vals = u0.value(feet)
    return vals if np.ndim(x) else float(vals[0])


def sample_solution(u0: InitialField, t: float, M: int, guard: float = HORIZON_GUARD) -> GridFunction:
    """Characteristics solution sampled on the M-point grid, tagged odd."""
    _check_horizon(u0, t, guard)
    feet = _solve_feet(u0, grid_points(M), t)
    u = np.asarray(u0.value(feet), dtype=float)
    return GridFunction(u, odd_residual=odd_symmetry_residual(u))
