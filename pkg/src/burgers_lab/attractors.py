"""The attractor family and its functionals.

The profile F is the 2*pi-periodic, odd sawtooth with a downward jump at
the origin (x - pi on (0, pi], zero at 0, x + pi on [-pi, 0)); its sine
coefficients are 1/n, so that for an odd field u with coefficients psi_n

    L(u) = <F, u> = 4*pi * sum psi_n / n.

For any C^1 odd field, <F, u u_x> = -||u||^2 / 2 exactly: that single
identity drives both the linear-in-time decay of ||u - r F||^2 along
inviscid solutions and the Riccati lower bounds behind the blowup
certificates.  The same holds, as an inequality with constant m, for any
bounded odd H with H' >= m > 0 on (0, pi).

Distances to r*F are always expanded as ||u||^2 - 2r<u,F> + r^2 ||F||^2
with <u,F> evaluated through the coefficient rule, never by truncating
the slowly converging series of F itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .characteristics import HORIZON_GUARD, InitialField, _golden_min, sample_solution
from .dynamics import nonlinear_direct
from .spectral import (
    FOUR_PI,
    SineSpectrum,
    analyze,
    evaluate_field,
    evaluate_slope,
    sobolev_norm,
)

#: ||F||_{L2}^2 = 4*pi * sum 1/n^2 = 2*pi^3/3
F_L2_NORM_SQ = 2.0 * np.pi**3 / 3.0


class InvalidAttractorError(ValueError):
    """Candidate is not odd with strictly positive slope on (0, pi)."""


class DivergentSeriesError(ValueError):
    """The requested fractional norm diverges (needs exponent < 1/2)."""


def _wrap(x: np.ndarray) -> np.ndarray:
    return (np.asarray(x, dtype=float) + np.pi) % (2.0 * np.pi) - np.pi


@dataclass(frozen=True)
class AttractorFn:
    """Odd, piecewise-differentiable attractor candidate.

    ``slope_floor`` is the infimum m of the derivative on (0, pi);
    ``coeff_scale`` is set when |phi_n| = coeff_scale / n exactly, which
    makes every fractional norm computable by series summation.
    """

    kind: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    slope_floor: float
    jump_location: str  # "origin" | "pi"
    l2_norm: float
    sine_coeff: Callable[[np.ndarray], np.ndarray] | None = None
    coeff_scale: float | None = None

    def hs_norm_sq(self, alpha: float, tol: float = 1e-9) -> float:
        """Squared homogeneous fractional norm, finite only for alpha < 1/2."""
        if self.coeff_scale is None:
            raise ValueError("fractional norm needs the coefficient decay scale")
        if alpha >= 0.5:
            raise DivergentSeriesError(
                f"sum n^(-2(1-alpha)) diverges at alpha={alpha} (needs alpha < 1/2)"
            )
        return self.coeff_scale**2 * FOUR_PI * power_sum(2.0 * (1.0 - alpha), tol)

    def hs_norm(self, alpha: float, tol: float = 1e-9) -> float:
        return float(np.sqrt(self.hs_norm_sq(alpha, tol)))


def make_F() -> AttractorFn:
    """Unit-slope profile with the jump at the origin; phi_n = 1/n."""

    def evaluate(x):
        xr = _wrap(x)
        return np.where(xr > 0, xr - np.pi, np.where(xr < 0, xr + np.pi, 0.0))

    return AttractorFn(
        kind="F",
        evaluate=evaluate,
        derivative=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        slope_floor=1.0,
        jump_location="origin",
        l2_norm=float(np.sqrt(F_L2_NORM_SQ)),
        sine_coeff=lambda n: 1.0 / np.asarray(n, dtype=float),
        coeff_scale=1.0,
    )


def make_Phi() -> AttractorFn:
    """F normalized to unit L2 norm."""
    scaled_f = scale_attractor(make_F(), 1.0 / np.sqrt(F_L2_NORM_SQ))
    return AttractorFn(
        kind="Phi",
        evaluate=scaled_f.evaluate,
        derivative=scaled_f.derivative,
        slope_floor=scaled_f.slope_floor,
        jump_location="origin",
        l2_norm=1.0,
        sine_coeff=scaled_f.sine_coeff,
        coeff_scale=scaled_f.coeff_scale,
    )


def make_sawtooth() -> AttractorFn:
    """Identity profile x on (-pi, pi), zero at +-pi; the jump sits at pi.

    Coincides with F translated by pi, so phi_n = (-1)^n / n.
    """

    def evaluate(x):
        xr = _wrap(x)
        return np.where(xr == -np.pi, 0.0, xr)

    def sine_coeff(n):
        na = np.asarray(n, dtype=float)
        return np.where(np.asarray(n) % 2 == 0, 1.0, -1.0) / na

    return AttractorFn(
        kind="sawtooth",
        evaluate=evaluate,
        derivative=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        slope_floor=1.0,
        jump_location="pi",
        l2_norm=float(np.sqrt(F_L2_NORM_SQ)),
        sine_coeff=sine_coeff,
        coeff_scale=1.0,
    )


def scale_attractor(base: AttractorFn, c: float) -> AttractorFn:
    """Positive multiple c*H of an attractor, keeping analytic structure."""
    if c <= 0:
        raise ValueError("scale must be positive")
    coeff = None
    if base.sine_coeff is not None:
        inner = base.sine_coeff
        coeff = lambda n: c * inner(n)
    return AttractorFn(
        kind="custom",
        evaluate=lambda x: c * base.evaluate(x),
        derivative=lambda x: c * base.derivative(x),
        slope_floor=c * base.slope_floor,
        jump_location=base.jump_location,
        l2_norm=c * base.l2_norm,
        sine_coeff=coeff,
        coeff_scale=None if base.coeff_scale is None else c * base.coeff_scale,
    )


_F = make_F()


# ---------------------------------------------------------------------------
# quadrature split at the jump

def _panel_rule(a: float, b: float, n_panels: int, nodes: np.ndarray, weights: np.ndarray):
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    wts = (half[:, None] * weights[None, :]).ravel()
    return pts, wts


def integrate_torus(f, jump_location: str = "origin", total_nodes: int = 4096) -> float:
    """Integrate f over [-pi, pi] with Gauss-Legendre panels split at the jump.

    The split keeps every panel inside a smooth piece, so trig-polynomial
    integrands converge to machine precision; the jump point itself is
    never a node.
    """
    nodes, weights = np.polynomial.legendre.leggauss(32)
    if jump_location == "origin":
        pieces = [(-np.pi, 0.0), (0.0, np.pi)]
    elif jump_location == "pi":
        pieces = [(-np.pi, np.pi)]
    else:
        raise ValueError(f"unknown jump location {jump_location!r}")
    n_panels = max(4, total_nodes // (32 * len(pieces)))
    total = 0.0
    for a, b in pieces:
        pts, wts = _panel_rule(a, b, n_panels, nodes, weights)
        total += float(np.dot(wts, f(pts)))
    return total


# ---------------------------------------------------------------------------
# functionals

def lyapunov(spec: SineSpectrum, attractor: AttractorFn, quad_nodes: int | None = None) -> float:
    """<H, u> = 4*pi * sum psi_n phi_n; quadrature fallback for custom H."""
    if attractor.sine_coeff is not None:
        n = np.arange(1, spec.N + 1)
        return float(FOUR_PI * np.dot(spec.psi, attractor.sine_coeff(n)))
    nodes = quad_nodes or max(4096, 8 * spec.N)
    return integrate_torus(
        lambda x: evaluate_field(spec, x) * attractor.evaluate(x),
        attractor.jump_location,
        nodes,
    )


def lyapunov_quadrature(spec: SineSpectrum, attractor: AttractorFn, total_nodes: int = 4096) -> float:
    """Quadrature evaluation of <H, u>, kept as the independent cross-check."""
    return integrate_torus(
        lambda x: evaluate_field(spec, x) * attractor.evaluate(x),
        attractor.jump_location,
        total_nodes,
    )


def key_identity_residuals(spec: SineSpectrum, quad_nodes: int | None = None) -> tuple[float, float]:
    """Both evaluations of <F, u u_x> + ||u||^2/2 (coefficient, quadrature).

    The coefficient path embeds u in 2N modes so the quadratic product is
    complete, takes u u_x = -(Galerkin nonlinearity), and pairs with 1/n.
    The quadrature path integrates F*u*u_x with the panel rule split at
    the origin.
    """
    energy = sobolev_norm(spec, 0.0) ** 2
    padded = spec.padded(2 * spec.N)
    product_coeffs = -nonlinear_direct(padded.psi)
    n = np.arange(1, padded.N + 1, dtype=float)
    res_coeff = float(FOUR_PI * np.sum(product_coeffs / n) + 0.5 * energy)
    nodes = quad_nodes or max(4096, 8 * spec.N)
    f_eval = _F.evaluate
    quad = integrate_torus(
        lambda x: f_eval(x) * evaluate_field(spec, x) * evaluate_slope(spec, x),
        "origin",
        nodes,
    )
    res_quad = float(quad + 0.5 * energy)
    return res_coeff, res_quad


def key_identity_residual(spec: SineSpectrum, quad_nodes: int | None = None) -> float:
    """Larger magnitude of the two key-identity residuals (should be ~0)."""
    res_coeff, res_quad = key_identity_residuals(spec, quad_nodes)
    return max(abs(res_coeff), abs(res_quad))


def attractor_distance(spec: SineSpectrum, r: float) -> float:
    """||u - r F||^2 expanded exactly: no truncation of F's series enters."""
    energy = sobolev_norm(spec, 0.0) ** 2
    return float(energy - 2.0 * r * lyapunov(spec, _F) + r * r * F_L2_NORM_SQ)


@dataclass(frozen=True)
class OptimalScaling:
    r0: float
    g_r0: float  # ||u0 - r0 F||^2 / (r0 ||u0||^2), the blowup-time bound


def optimal_r(u0: SineSpectrum, check_grid: int = 41) -> OptimalScaling:
    """Fastest-approached multiple r0 = ||u0|| / ||F||.

    Also evaluates g(r) = ||u0 - r F||^2 / (r ||u0||^2) on a sampled grid
    around r0 and verifies the minimizer property.
    """
    energy = sobolev_norm(u0, 0.0) ** 2
    if energy == 0.0:
        raise ValueError("optimal scaling undefined for zero initial data")
    r0 = float(np.sqrt(energy / F_L2_NORM_SQ))

    def g(r: float) -> float:
        return attractor_distance(u0, r) / (r * energy)

    g0 = g(r0)
    for r in np.geomspace(r0 / 10.0, 10.0 * r0, check_grid):
        if g0 > g(float(r)) + 1e-12 * abs(g0):
            raise RuntimeError("sampled scaling beats r0; minimizer property violated")
    return OptimalScaling(r0=r0, g_r0=g0)


def validate_H(candidate: AttractorFn, samples: int = 4096) -> float:
    """Certify oddness and a positive slope floor by dense sampling.

    Returns the sampled (locally refined) infimum of the derivative on
    (0, pi).  This is a sampling certificate, not a symbolic proof.
    """
    x = np.linspace(0.0, np.pi, samples, endpoint=False)[1:]
    values = candidate.evaluate(x)
    mirrored = candidate.evaluate(-x)
    scale = max(1.0, float(np.max(np.abs(values))))
    odd_defect = float(np.max(np.abs(values + mirrored)))
    if odd_defect > 1e-12 * scale:
        raise InvalidAttractorError(f"odd-symmetry defect {odd_defect:.3e}")

    slopes = np.asarray(candidate.derivative(x), dtype=float)
    if not np.all(np.isfinite(slopes)):
        raise InvalidAttractorError("derivative not finite on (0, pi)")
    i = int(np.argmin(slopes))
    h = np.pi / samples
    lo, hi = max(x[i] - h, 1e-12), min(x[i] + h, np.pi - 1e-12)
    x_star = _golden_min(lambda z: float(candidate.derivative(z)), lo, hi)
    m = float(min(np.min(slopes), candidate.derivative(x_star)))
    if m <= 0.0:
        raise InvalidAttractorError(f"sampled slope floor {m:.3e} is not positive")
    return m


# ---------------------------------------------------------------------------
# decay tables along the exact inviscid flow

@dataclass(frozen=True)
class DecayTable:
    """Measured squared distances with the predicted straight line."""

    times: np.ndarray
    distance: np.ndarray
    predicted: np.ndarray
    mode: str  # "rF": exact law; "H": upper bound D(0) - m t
    r: float | None = None
    attractor_kind: str | None = None


def attractor_decay_series(
    u0: InitialField,
    times: Sequence[float],
    r: float | None = None,
    attractor: AttractorFn | None = None,
    M: int = 4096,
    guard: float = HORIZON_GUARD,
) -> DecayTable:
    """||u(t) - r F||^2 (or ||u(t) - H||^2) along the characteristics oracle.

    Each sample is analyzed on the M-point grid and the distance expanded
    through the coefficient pairing, so the only error is the (spectrally
    small) analysis error of a smooth pre-blowup field.
    """
    ts = np.asarray(times, dtype=float)
    energy0 = sobolev_norm(u0.spectrum, 0.0) ** 2
    if attractor is None:
        if r is None:
            raise ValueError("need a scaling r when no attractor is given")
        target, r_val = _F, float(r)
        d0 = attractor_distance(u0.spectrum, r_val)
        predicted = d0 - r_val * energy0 * ts
        mode = "rF"
    else:
        if r is not None:
            raise ValueError("r applies only to the scaled-F mode")
        target, r_val = attractor, None
        d0 = (
            energy0
            - 2.0 * lyapunov(u0.spectrum, target)
            + target.l2_norm**2
        )
        predicted = d0 - target.slope_floor * ts
        mode = "H"

    dist = np.empty(ts.size)
    for i, t in enumerate(ts):
        if t == 0.0:
            dist[i] = d0
            continue
        grid = sample_solution(u0, float(t), M, guard)
        spec_t = analyze(grid, M // 2 - 1)
        energy_t = sobolev_norm(spec_t, 0.0) ** 2
        if mode == "rF":
            dist[i] = attractor_distance(spec_t, r_val)
        else:
            dist[i] = energy_t - 2.0 * lyapunov(spec_t, target) + target.l2_norm**2
    return DecayTable(
        times=ts,
        distance=dist,
        predicted=predicted,
        mode=mode,
        r=r_val,
        attractor_kind=target.kind,
    )


# ---------------------------------------------------------------------------
# series constants

def power_sum(p: float, tol: float = 1e-9) -> float:
    """sum_{n>=1} n^{-p} for p > 1 by direct summation plus integral tail.

    The tail past N0 is the midpoint integral int_{N0+1/2}^inf x^{-p} dx,
    whose error is below p*N0^{-(p+1)}/24; N0 is chosen so that bound is
    under tol.
    """
    if p <= 1.0:
        raise DivergentSeriesError(f"sum n^(-{p}) diverges")
    n0 = int(np.ceil((p / (24.0 * tol)) ** (1.0 / (p + 1.0))))
    n0 = max(64, n0)
    n = np.arange(1, n0 + 1, dtype=float)
    partial = float(np.sum(n**-p))
    tail = (n0 + 0.5) ** (1.0 - p) / (p - 1.0)
    return partial + tail


def c_alpha(alpha: float, tol: float = 1e-9) -> float:
    """Pairing constant sqrt(2*pi * sum n^{-2(1-alpha)}), alpha in (0, 1/2).

    ``tol`` bounds the summation error of the series itself.
    """
    if not 0.0 < alpha:
        raise ValueError("alpha must be positive")
    if alpha >= 0.5:
        raise DivergentSeriesError(
            f"sum n^(-2(1-alpha)) diverges at alpha={alpha}: the harmonic series is infinite"
        )
    return float(np.sqrt(2.0 * np.pi * power_sum(2.0 * (1.0 - alpha), tol)))


def f_hs_norm_sq(alpha: float, tol: float = 1e-9) -> float:
    """||F||^2 in the fractional norm: 4*pi * sum n^{-2(1-alpha)} = 2 C^2."""
    return _F.hs_norm_sq(alpha, tol)


# ---------------------------------------------------------------------------
# serialization

def attractor_to_dict(att: AttractorFn, alpha: float = 0.25, tol: float = 1e-9) -> dict:
    try:
        value = att.hs_norm(alpha, tol)
    except (ValueError, DivergentSeriesError):
        value = None
    return {
        "kind": att.kind,
        "m": att.slope_floor,
        "l2_norm": att.l2_norm,
        "alpha_norm": {"alpha": alpha, "value": value},
    }


def save_attractor(att: AttractorFn, path: str | Path, alpha: float = 0.25) -> None:
    Path(path).write_text(json.dumps(attractor_to_dict(att, alpha), indent=2) + "\n")


def load_attractor(path: str | Path) -> AttractorFn:
    payload = json.loads(Path(path).read_text())
    kind = payload.get("kind")
    makers = {"F": make_F, "Phi": make_Phi, "sawtooth": make_sawtooth}
    if kind not in makers:
        raise ValueError(f"cannot reconstruct attractor of kind {kind!r} from JSON")
    att = makers[kind]()
    for key, got in (("m", att.slope_floor), ("l2_norm", att.l2_norm)):
        stored = payload.get(key)
        if stored is not None and not math.isclose(stored, got, rel_tol=1e-9):
            raise ValueError(f"{path}: stored {key}={stored} disagrees with {kind} ({got})")
    return att
