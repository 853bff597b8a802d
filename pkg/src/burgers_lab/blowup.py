"""Finite-time blowup certificates and the comparison-ODE machinery.

Pairing a solution of the fractal Burgers equation with the attractor
profile F gives L(t) = <F, u> with

    dL/dt >= -sqrt(2) C_alpha nu ||u||_{H^alpha} + (3/(4 pi^3)) L^2,

and the energy equality bounds the time integral of the forcing term by
M*sqrt(t) with M = C_alpha sqrt(nu) ||u0||.  The scalar comparison lemma
then yields the singular lower bound (3/y0 - kappa t)^{-1} and the
horizon 3/(kappa y0), provided y0^3 >= 12 M^2 / kappa; for y0 = L0 that
hypothesis is exactly L0^3 > 16 pi^3 C_alpha^2 ||u0||^2 nu, and the
certified bound is T < 4 pi^3 / L0.  The same chain runs for any
validated odd increasing profile H, with kappa = m / (2 ||H||^2).

Numerical blowup detection is a resolution-loss proxy (spectral tail
fraction, gradient-norm growth), not a proof.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .attractors import (
    AttractorFn,
    c_alpha,
    lyapunov,
    make_F,
    power_sum,
    validate_H,
)
from .dynamics import ModelParams, SimulationRecord, dissipation_symbol, nonlinear_direct
from .spectral import FOUR_PI, SineSpectrum, sobolev_norm

#: Riccati coefficient attached to the profile F: 3 / (4 pi^3)
KAPPA_F = 3.0 / (4.0 * np.pi**3)

_F = make_F()


class OutsideValidityError(ValueError):
    """Time lies outside the lower bound's validity window."""


class HypothesisError(ValueError):
    """The lemma hypothesis y0^3 >= 12 M^2 / kappa fails."""


class UnsupportedRegimeError(ValueError):
    """Certificates require supercritical dissipation (alpha < 1/2)."""


# ---------------------------------------------------------------------------
# scalar comparison bounds

def comparison_lower_bound(y0: float, kappa: float, M: float, t: float) -> float:
    """Lower bound (1/y0 - kappa t + M sqrt(t)/(y0 - M sqrt(t))^2)^{-1}.

    Valid for 0 <= t < y0^2/M^2; returns +inf once the bracket crosses
    zero (the bound has blown up).
    """
    if y0 <= 0 or kappa <= 0 or M < 0:
        raise ValueError("need y0 > 0, kappa > 0, M >= 0")
    if t < 0:
        raise OutsideValidityError("t must be nonnegative")
    if M > 0 and t >= (y0 / M) ** 2:
        raise OutsideValidityError(f"t={t} >= y0^2/M^2 = {(y0 / M) ** 2:.6g}")
    root = math.sqrt(t)
    bracket = 1.0 / y0 - kappa * t
    if M > 0:
        bracket += M * root / (y0 - M * root) ** 2
    if bracket <= 0.0:
        return math.inf
    return 1.0 / bracket


def simplified_horizon(y0: float, kappa: float) -> float:
    """Blowup horizon 3/(kappa y0) implied by the simplified bound."""
    if y0 <= 0 or kappa <= 0:
        raise ValueError("need y0 > 0 and kappa > 0")
    return 3.0 / (kappa * y0)


def simplified_window(y0: float, kappa: float, M: float) -> float:
    """Validity window of the simplified bound (T_max unknown a priori)."""
    if M == 0:
        return math.inf
    return y0**2 / (4.0 * M**2)


def simplified_lower_bound(y0: float, kappa: float, M: float, t: float) -> float:
    """Simplified lower bound (3/y0 - kappa t)^{-1}.

    Requires y0^3 >= 12 M^2/kappa and 0 <= t below both the window
    y0^2/(4 M^2) and the horizon 3/(kappa y0).
    """
    if y0 <= 0 or kappa <= 0 or M < 0:
        raise ValueError("need y0 > 0, kappa > 0, M >= 0")
    if y0**3 < 12.0 * M**2 / kappa:
        raise HypothesisError(
            f"y0^3 = {y0**3:.6g} < 12 M^2/kappa = {12.0 * M**2 / kappa:.6g}"
        )
    if t < 0 or t >= min(simplified_window(y0, kappa, M), simplified_horizon(y0, kappa)):
        raise OutsideValidityError(f"t={t} outside the simplified bound's window")
    return 1.0 / (3.0 / y0 - kappa * t)


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of integrating y' = -f + kappa y^2 against both bounds."""

    passed: bool
    hypothesis_ok: bool
    numeric_blowup_time: float | None
    max_comparison_violation: float
    max_simplified_violation: float | None
    riccati_max_error: float | None


def _default_forcing(M: float, eps: float = 1e-12) -> Callable[[float], float]:
    # saturates the integral condition: int_0^t f = M (sqrt(t+eps) - sqrt(eps))
    return lambda t: M / (2.0 * math.sqrt(t + eps))


def verify_comparison_lemma(
    y0: float,
    kappa: float,
    M: float,
    f_shape: Callable[[float], float] | None = None,
    n_samples: int = 100,
    slack: float = 1e-9,
) -> ComparisonReport:
    """Integrate the equality case of the differential inequality and check
    that the solution dominates both lower bounds on their windows.

    The integration runs in s = sqrt(t) (which removes the integrable
    forcing singularity at 0) with a high-order adaptive solver, stopping
    at y = 1e9.  For M = 0 the solution is also compared against the
    closed-form Riccati solution y0/(1 - kappa y0 t).
    """
    if y0 <= 0 or kappa <= 0 or M < 0:
        raise ValueError("need y0 > 0, kappa > 0, M >= 0")
    f = f_shape if f_shape is not None else _default_forcing(M)

    def rhs(s, y):
        t = s * s
        return 2.0 * s * (kappa * y[0] ** 2 - f(t))

    def explode(s, y):
        return y[0] - 1e9

    explode.terminal = True
    explode.direction = 1.0

    hypothesis_ok = y0**3 >= 12.0 * M**2 / kappa
    window_prop = math.inf if M == 0 else (y0 / M) ** 2
    horizon = simplified_horizon(y0, kappa)
    t_target = min(window_prop, 10.0 * horizon)
    sol = solve_ivp(
        rhs,
        (0.0, math.sqrt(t_target)),
        [y0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
        events=explode,
    )
    if sol.t_events[0].size:
        t_num = float(sol.t_events[0][0]) ** 2
    else:
        t_num = float(sol.t[-1]) ** 2

    def y_at(ts: np.ndarray) -> np.ndarray:
        return sol.sol(np.sqrt(ts))[0]

    # with f = 0 the first bound has zero slack (it IS the solution), so the
    # samples stay away from the pole where phase error would dominate
    cap = 0.9 / (kappa * y0) if M == 0 else math.inf
    t_hi = min(t_num * (1.0 - 1e-9), window_prop * (1.0 - 1e-12), cap)
    ts = np.linspace(t_hi / n_samples, t_hi, n_samples)
    ys = y_at(ts)
    bounds = np.array([comparison_lower_bound(y0, kappa, M, float(t)) for t in ts])
    finite = np.isfinite(bounds)
    max_comp = float(np.max(bounds[finite] - ys[finite])) if finite.any() else -math.inf
    violations = [max_comp]

    max_simp = None
    if hypothesis_ok:
        t_hi2 = min(
            t_num * (1.0 - 1e-9),
            simplified_window(y0, kappa, M) * (1.0 - 1e-12),
            horizon * (1.0 - 1e-12),
            cap,
        )
        ts2 = np.linspace(t_hi2 / n_samples, t_hi2, n_samples)
        ys2 = y_at(ts2)
        bounds2 = np.array([simplified_lower_bound(y0, kappa, M, float(t)) for t in ts2])
        max_simp = float(np.max(bounds2 - ys2))
        violations.append(max_simp)

    riccati_err = None
    if M == 0:
        closed = y0 / (1.0 - kappa * y0 * ts)
        riccati_err = float(np.max(np.abs(ys - closed)))

    passed = all(v <= slack for v in violations)
    return ComparisonReport(
        passed=passed,
        hypothesis_ok=hypothesis_ok,
        numeric_blowup_time=t_num if sol.t_events[0].size else None,
        max_comparison_violation=max_comp,
        max_simplified_violation=max_simp,
        riccati_max_error=riccati_err,
    )


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class BlowupCertificate:
    """Hypothesis check plus the predicted bound on the blowup time.

    ``margin`` is the ratio of the cubed pairing to its threshold (the
    Reynolds-style ratio for the single-sine corollary); hypotheses hold
    exactly when margin > 1.  ``window`` is reported conservatively as
    y0^2/(4 M^2) since the true T_max is unknown a priori.
    """

    theorem: str  # "supercritical_F" | "sine_corollary" | "general_H"
    hypotheses_hold: bool
    L0: float
    threshold: float
    margin: float
    predicted_bound_T: float | None
    y0: float | None = None
    kappa: float | None = None
    forcing_M: float | None = None
    window: float | None = None
    diagnostic: str = ""


def _margin(numerator: float, threshold: float) -> float:
    if threshold > 0.0:
        return numerator / threshold
    if numerator > 0.0:
        return math.inf
    if numerator < 0.0:
        return -math.inf
    return 0.0


def certify_blowup_F(u0: SineSpectrum, params: ModelParams, series_tol: float = 1e-9) -> BlowupCertificate:
    """Certificate for odd data paired with F at dissipation alpha < 1/2.

    Checks L0^3 > 16 pi^3 C_alpha^2 ||u0||^2 nu; on success the predicted
    bound is T < 4 pi^3 / L0 with lower-bound curve (y0, kappa) =
    (L0, 3/(4 pi^3)) valid up to L0^2/(4 M^2), M = C_alpha sqrt(nu) ||u0||.
    """
    if params.alpha >= 0.5:
        raise UnsupportedRegimeError(f"alpha={params.alpha} is not supercritical (< 1/2)")
    L0 = lyapunov(u0, _F)
    C = c_alpha(params.alpha, series_tol)
    energy0 = sobolev_norm(u0, 0.0) ** 2
    threshold = 16.0 * np.pi**3 * C**2 * energy0 * params.nu
    margin = _margin(L0**3, threshold)
    hold = L0 > 0.0 and margin > 1.0
    forcing = C * math.sqrt(params.nu) * math.sqrt(energy0)
    return BlowupCertificate(
        theorem="supercritical_F",
        hypotheses_hold=hold,
        L0=float(L0),
        threshold=float(threshold),
        margin=float(margin),
        predicted_bound_T=4.0 * np.pi**3 / L0 if hold else None,
        y0=float(L0) if hold else None,
        kappa=KAPPA_F if hold else None,
        forcing_M=forcing if hold else None,
        window=(math.inf if forcing == 0.0 else L0**2 / (4.0 * forcing**2)) if hold else None,
        diagnostic="" if L0 > 0 else "sign condition failed: <F, u0> <= 0",
    )


def certify_blowup_H(
    u0: SineSpectrum,
    H: AttractorFn,
    params: ModelParams,
    series_tol: float = 1e-9,
) -> BlowupCertificate:
    """General-profile certificate; with H = F it reproduces certify_blowup_F.

    Checks L0^3 > (12/m) ||H||_{H^alpha}^2 ||H||^2 ||u0||^2 nu and predicts
    T < 6 ||H||^2 / (m L0), with kappa = m/(2 ||H||^2) and forcing scale
    M = ||H||_{H^alpha} ||u0|| sqrt(nu/2).
    """
    if params.alpha >= 0.5:
        raise UnsupportedRegimeError(f"alpha={params.alpha} is not supercritical (< 1/2)")
    m = validate_H(H)
    L0 = lyapunov(u0, H)
    hs_sq = H.hs_norm_sq(params.alpha, series_tol)
    l2_sq = H.l2_norm**2
    energy0 = sobolev_norm(u0, 0.0) ** 2
    threshold = (12.0 / m) * hs_sq * l2_sq * energy0 * params.nu
    margin = _margin(L0**3, threshold)
    hold = L0 > 0.0 and margin > 1.0
    forcing = math.sqrt(hs_sq) * math.sqrt(energy0) * math.sqrt(params.nu / 2.0)
    return BlowupCertificate(
        theorem="general_H",
        hypotheses_hold=hold,
        L0=float(L0),
        threshold=float(threshold),
        margin=float(margin),
        predicted_bound_T=6.0 * l2_sq / (m * L0) if hold else None,
        y0=float(L0) if hold else None,
        kappa=m / (2.0 * l2_sq) if hold else None,
        forcing_M=forcing if hold else None,
        window=(math.inf if forcing == 0.0 else L0**2 / (4.0 * forcing**2)) if hold else None,
        diagnostic="" if L0 > 0 else "sign condition failed: <H, u0> <= 0",
    )


def corollary_condition(R: float, params: ModelParams, series_tol: float = 1e-9) -> BlowupCertificate:
    """Single-sine corollary: u0 = -R sin x blows up when R/nu > 8 pi^2 S(alpha).

    S(alpha) = sum n^{-2(1-alpha)}, so the threshold equals 4 pi C_alpha^2;
    the certified bound is T < 2 pi^2 / R.  The margin is the ratio of
    R/nu to the threshold.
    """
    if params.alpha >= 0.5:
        raise UnsupportedRegimeError(f"alpha={params.alpha} is not supercritical (< 1/2)")
    if R <= 0:
        raise ValueError("amplitude R must be positive")
    S = power_sum(2.0 * (1.0 - params.alpha), series_tol)
    threshold = 8.0 * np.pi**2 * S
    ratio = math.inf if params.nu == 0.0 else R / params.nu
    margin = ratio / threshold
    hold = margin > 1.0
    L0 = 2.0 * np.pi * R
    C_sq = 2.0 * np.pi * S
    window = math.inf if params.nu == 0.0 else np.pi / (C_sq * params.nu)
    return BlowupCertificate(
        theorem="sine_corollary",
        hypotheses_hold=hold,
        L0=float(L0),
        threshold=float(threshold),
        margin=float(margin),
        predicted_bound_T=2.0 * np.pi**2 / R if hold else None,
        y0=float(L0) if hold else None,
        kappa=KAPPA_F if hold else None,
        forcing_M=math.sqrt(C_sq * params.nu * np.pi) * R if hold else None,
        window=float(window) if hold else None,
    )


def certificate_to_dict(cert: BlowupCertificate) -> dict:
    return {
        "theorem": cert.theorem,
        "hypotheses_hold": cert.hypotheses_hold,
        "L0": cert.L0,
        "threshold": cert.threshold,
        "margin": cert.margin,
        "predicted_bound_T": cert.predicted_bound_T,
        "window": cert.window,
    }


def save_certificate(cert: BlowupCertificate, path: str | Path) -> None:
    # non-finite margins (inviscid limit) serialize as JSON Infinity
    Path(path).write_text(json.dumps(certificate_to_dict(cert), indent=2) + "\n")


# ---------------------------------------------------------------------------
# numerical detection and trajectory monitoring

@dataclass(frozen=True)
class DetectionPolicy:
    """Resolution-loss thresholds; crossing them is a proxy, not a proof."""

    tail_threshold: float = 1e-3
    h1_growth_factor: float = 1e3


def detect_numerical_blowup(record: SimulationRecord, policy: DetectionPolicy | None = None) -> float | None:
    """Earliest recorded time at which resolution is considered lost."""
    policy = policy or DetectionPolicy()
    flagged = record.tail_fraction > policy.tail_threshold
    if record.h1_norm[0] > 0.0:
        flagged = flagged | (record.h1_norm > policy.h1_growth_factor * record.h1_norm[0])
    hits = np.nonzero(flagged)[0]
    if hits.size == 0:
        return None
    return float(record.times[hits[0]])


@dataclass(frozen=True)
class LyapunovBoundReport:
    """Per-step audit of the differential inequality along a stored run."""

    times: np.ndarray
    slack: np.ndarray  # dL/dt - bound, per stored step
    exact_residual: np.ndarray  # |dL/dt - (-nu <.,.> + ||u||^2/2)|
    resolved: np.ndarray  # steps with tail fraction below the cutoff
    min_slack_resolved: float
    max_exact_residual_resolved: float


def monitor_lyapunov_bound(
    record: SimulationRecord,
    params: ModelParams | None = None,
    resolved_tail: float = 1e-8,
    series_tol: float = 1e-9,
) -> LyapunovBoundReport:
    """Check dL/dt >= -sqrt(2) C_alpha nu ||u||_{H^alpha} + kappa L^2 stepwise.

    dL/dt is evaluated exactly from the Galerkin right-hand side as
    4*pi * sum rhs_n / n.  The identity dL/dt = -nu * (fractional pairing)
    + ||u||^2/2 holds exactly only while the quadratic interactions fit
    inside the truncation, so both the inequality slack and the identity
    residual are reported per step, with summary values restricted to
    steps whose tail fraction is at most ``resolved_tail``.
    """
    if record.spectra is None:
        raise ValueError("record was produced without store_spectra=True")
    params = params or record.params
    if params.nu > 0.0 and params.alpha >= 0.5:
        raise UnsupportedRegimeError("the inequality constant needs alpha < 1/2 when nu > 0")
    C = c_alpha(params.alpha, series_tol) if params.nu > 0.0 else 0.0

    count = len(record.spectra)
    slack = np.empty(count)
    exact_residual = np.empty(count)
    for i, psi in enumerate(record.spectra):
        N = psi.size
        n = np.arange(1, N + 1, dtype=float)
        rhs = nonlinear_direct(psi) - dissipation_symbol(params, N) * psi
        dLdt = float(FOUR_PI * np.sum(rhs / n))
        L = float(FOUR_PI * np.sum(psi / n))
        hs = math.sqrt(FOUR_PI * float(np.sum(n ** (2.0 * params.alpha) * psi**2)))
        bound = -math.sqrt(2.0) * C * params.nu * hs + KAPPA_F * L * L
        slack[i] = dLdt - bound
        pairing = float(FOUR_PI * np.sum(n ** (2.0 * params.alpha) * psi / n))
        half_energy = 0.5 * float(FOUR_PI * np.sum(psi**2))
        exact_residual[i] = abs(dLdt - (-params.nu * pairing + half_energy))

    resolved = record.tail_fraction[:count] <= resolved_tail
    min_slack = float(np.min(slack[resolved])) if resolved.any() else math.inf
    max_exact = float(np.max(exact_residual[resolved])) if resolved.any() else 0.0
    return LyapunovBoundReport(
        times=record.times[:count].copy(),
        slack=slack,
        exact_residual=exact_residual,
        resolved=resolved,
        min_slack_resolved=min_slack,
        max_exact_residual_resolved=max_exact,
    )
