"""Pump-strength optimization, closed-form limits and scaling fits.

Numerical optimization of the key rate over the pump strength is done per
channel transmission with a coarse logarithmic grid followed by golden-section
refinement (unimodality is not assumed up front; the grid locates the global
bracket).  The short-distance and minimum-transmission closed forms from the
analytical treatment are provided alongside numerical oracles for both.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .keyrate import ChannelParams, KeyRateReport, key_rate
from .protocol import ProtocolSpec
from .source_detector import (
    HeraldResponse,
    MultiplexedDetectorParams,
    distance_factor,
    multiplexed_response,
    poisson_pair_stats,
    short_distance_factor,
)

__all__ = [
    "OptimizationResult",
    "ScanSeries",
    "optimize_lambda",
    "short_distance_key_rate",
    "short_distance_lambda",
    "short_distance_approx_rate",
    "tmin_single_photon",
    "tmin_wcp",
    "lambda_opt_heralded",
    "tmin_bound_heralded",
    "tmin_heralded",
    "tmin_numerical",
    "scan_key_rate",
    "fit_power_law",
    "optimal_stage_count",
]

DEFAULT_LAMBDA_BOUNDS = (1e-8, 1.0)

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of maximizing the key rate over the pump strength."""

    lambda_opt: float
    report: KeyRateReport | None
    converged: bool
    evaluations: int

    @property
    def key_rate(self) -> float:
        """Optimized key rate; -inf when every probed point was model-invalid."""
        if self.report is None or math.isnan(self.report.key_rate):
            return -math.inf
        return self.report.key_rate


@dataclass(frozen=True)
class ScanSeries:
    """Per-transmission optimization results for one protocol/detector setup."""

    points: list[tuple[float, OptimizationResult]]
    protocol: ProtocolSpec
    response: HeraldResponse
    dark_b: float
    metadata: dict = field(default_factory=dict)


def _rate_at(
    spec: ProtocolSpec, r: HeraldResponse, ch: ChannelParams, lam: float
) -> tuple[float, KeyRateReport | None]:
    """Key rate as an optimization score; model-invalid points score -inf."""
    stats = poisson_pair_stats(lam)
    try:
        report = key_rate(spec, stats, r, ch)
    except ZeroDivisionError:
        return -math.inf, None
    if math.isnan(report.key_rate):
        return -math.inf, report
    return report.key_rate, report


def optimize_lambda(
    spec: ProtocolSpec,
    r: HeraldResponse,
    ch: ChannelParams,
    bounds: tuple[float, float] = DEFAULT_LAMBDA_BOUNDS,
    grid_points: int = 200,
    rel_tol: float = 1e-6,
) -> OptimizationResult:
    """Maximize the key rate over the pump strength.

    A logarithmic grid over bounds locates the best bracket, which is then
    refined by golden-section search to relative tolerance rel_tol in the
    pump strength.  converged is False when the optimum sits at a bound or
    when no probed point was model-valid.
    """
    lo, hi = bounds
    if not 0.0 < lo < hi:
        raise ValueError(f"bounds must satisfy 0 < lo < hi, got {bounds}")

    grid = np.logspace(math.log10(lo), math.log10(hi), grid_points)
    evaluations = 0
    scores = []
    for lam in grid:
        score, _ = _rate_at(spec, r, ch, float(lam))
        scores.append(score)
        evaluations += 1

    best_idx = int(np.argmax(scores))
    if scores[best_idx] == -math.inf:
        return OptimizationResult(
            lambda_opt=math.nan, report=None, converged=False,
            evaluations=evaluations,
        )

    a = float(grid[max(best_idx - 1, 0)])
    b = float(grid[min(best_idx + 1, grid_points - 1)])

    # golden-section refinement on the bracket
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, _ = _rate_at(spec, r, ch, c)
    fd, _ = _rate_at(spec, r, ch, d)
    evaluations += 2
    while (b - a) > rel_tol * b:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc, _ = _rate_at(spec, r, ch, c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd, _ = _rate_at(spec, r, ch, d)
        evaluations += 1

    lam_opt = 0.5 * (a + b)
    score, report = _rate_at(spec, r, ch, lam_opt)
    evaluations += 1
    # keep the best of refinement and coarse grid (refinement can only help
    # inside the bracket, but guard against flat -inf plateaus at the edges)
    if scores[best_idx] > score:
        lam_opt = float(grid[best_idx])
        score, report = _rate_at(spec, r, ch, lam_opt)
        evaluations += 1

    at_bound = (
        best_idx in (0, grid_points - 1)
        and (lam_opt <= lo * (1.0 + 1e-5) or lam_opt >= hi * (1.0 - 1e-5))
    )
    return OptimizationResult(
        lambda_opt=lam_opt, report=report, converged=not at_bound,
        evaluations=evaluations,
    )


def short_distance_key_rate(
    spec: ProtocolSpec, r: HeraldResponse, t: float, lam: float
) -> float:
    """Key rate with Bob's dark counts neglected entirely.

    p_sift * [T p1 q1 - p2 q2 (I_AE2 - 2T)] with exact Poisson p1, p2;
    identical to the full rate at d_B = 0.
    """
    if not 0.0 < t <= 1.0:
        raise ValueError(f"transmission must be in (0, 1], got {t}")
    stats = poisson_pair_stats(lam)
    return spec.p_sift * (
        t * stats.p1 * r.q1 - stats.p2 * r.q2 * (spec.i_ae_two - 2.0 * t)
    )


def short_distance_lambda(spec: ProtocolSpec, r: HeraldResponse, t: float) -> float:
    """Pump strength maximizing the dark-count-free key rate.

    T q1 / (T q1 + (I_AE2 - 2T) q2).  Warns when I_AE2 <= 2T: the
    short-distance expansion does not have an interior optimum there.
    """
    if r.q1 == 0.0 and r.q2 == 0.0:
        raise ValueError("degenerate response: q1 = q2 = 0")
    penalty = spec.i_ae_two - 2.0 * t
    if penalty <= 0.0:
        warnings.warn(
            "I_AE2 <= 2T: outside the short-distance approximation regime",
            stacklevel=2,
        )
    return t * r.q1 / (t * r.q1 + penalty * r.q2)


def short_distance_approx_rate(
    spec: ProtocolSpec, r: HeraldResponse, t: float
) -> float:
    """Leading-order key rate at the optimal pump strength, quadratic in T.

    (q1**2/q2) * p_sift * T**2 / (2 (I_AE2 - 2T)).  Dividing by the WCP
    counterpart recovers the q1**2/q2 enhancement factor.
    """
    if r.q2 == 0.0:
        raise ZeroDivisionError("approximation undefined for q2 = 0")
    penalty = spec.i_ae_two - 2.0 * t
    if penalty == 0.0:
        raise ZeroDivisionError("approximation singular at I_AE2 = 2T")
    return short_distance_factor(r) * spec.p_sift * t**2 / (2.0 * penalty)


def tmin_single_photon(spec: ProtocolSpec, dark_b: float) -> float:
    """Minimum transmission for an ideal single-photon source."""
    if dark_b < 0.0:
        raise ValueError(f"dark_b must be nonnegative, got {dark_b}")
    q_th = spec.q_threshold
    return dark_b * (1.0 - 2.0 * q_th) / q_th


def tmin_wcp(spec: ProtocolSpec, dark_b: float) -> tuple[float, float]:
    """Minimum transmission and optimal mean photon number for WCPs.

    Returns (T_min, lambda_opt); both scale as sqrt(dark_b).
    """
    if dark_b < 0.0:
        raise ValueError(f"dark_b must be nonnegative, got {dark_b}")
    q_th = spec.q_threshold
    base = 2.0 * dark_b * (1.0 - 2.0 * q_th) / q_th
    return math.sqrt(base * spec.xi), math.sqrt(base / spec.xi)


def lambda_opt_heralded(
    spec: ProtocolSpec, r: HeraldResponse, dark_b: float
) -> float:
    """Pump strength minimizing the heralded-source transmission bound.

    sqrt(2 d_B (1 - 2 Q_th) q0 / (xi Q_th q2)).  Returns 0 at q0 = 0 (vacuum
    heralds absent, drive the pump down); singular at q2 = 0, where multipair
    events are perfectly sifted out and the bound decreases monotonically.
    """
    if r.q2 == 0.0:
        raise ZeroDivisionError(
            "optimal pump strength unbounded for q2 = 0 (perfect sifting)"
        )
    q_th = spec.q_threshold
    return math.sqrt(
        2.0 * dark_b * (1.0 - 2.0 * q_th) * r.q0 / (spec.xi * q_th * r.q2)
    )


def tmin_bound_heralded(
    spec: ProtocolSpec, r: HeraldResponse, dark_b: float, lam: float
) -> float:
    """Transmission lower bound for a heralded source at pump strength lam.

    (q2/2q1) xi lam + T_min1 (1 + (q0/q1)/lam); its minimum over lam is the
    heralded minimum transmission.
    """
    if r.q1 == 0.0:
        raise ZeroDivisionError("bound undefined for q1 = 0")
    if lam <= 0.0:
        raise ValueError(f"pump strength must be positive, got {lam}")
    t1 = tmin_single_photon(spec, dark_b)
    return (
        r.q2 / (2.0 * r.q1) * spec.xi * lam
        + t1
        + t1 * (r.q0 / r.q1) / lam
    )


def tmin_heralded(spec: ProtocolSpec, r: HeraldResponse, dark_b: float) -> float:
    """Closed-form minimum transmission for a heralded source.

    T_min1 + sqrt(q0 q2)/q1 * T_minC: the ideal-source floor plus the WCP
    bound scaled by the detector's distance factor.
    """
    t_min_c, _ = tmin_wcp(spec, dark_b)
    return tmin_single_photon(spec, dark_b) + distance_factor(r) * t_min_c


def tmin_numerical(
    spec: ProtocolSpec,
    r: HeraldResponse,
    dark_b: float,
    rel_tol: float = 1e-3,
    bounds: tuple[float, float] = DEFAULT_LAMBDA_BOUNDS,
) -> float:
    """Smallest transmission with positive optimized key rate, by bisection.

    Oracle for the closed-form minimum transmission: the sign change of
    max_lambda K(T, lambda) is located on T in [1e-8, 1] to relative
    tolerance rel_tol.
    """
    if dark_b <= 0.0:
        raise ValueError(f"dark_b must be positive, got {dark_b}")

    def optimized_rate(t: float) -> float:
        ch = ChannelParams(transmission=t, dark_b=dark_b)
        return optimize_lambda(spec, r, ch, bounds=bounds).key_rate

    t_lo, t_hi = 1e-8, 1.0
    if optimized_rate(t_hi) <= 0.0 or optimized_rate(t_lo) > 0.0:
        raise RuntimeError(
            "no sign change of the optimized key rate on [1e-8, 1]"
        )
    while t_hi / t_lo - 1.0 > rel_tol:
        t_mid = math.sqrt(t_lo * t_hi)
        if optimized_rate(t_mid) > 0.0:
            t_hi = t_mid
        else:
            t_lo = t_mid
    return t_hi


def scan_key_rate(
    spec: ProtocolSpec,
    r: HeraldResponse,
    dark_b: float,
    t_grid,
    bounds: tuple[float, float] = DEFAULT_LAMBDA_BOUNDS,
    metadata: dict | None = None,
) -> ScanSeries:
    """Optimize the pump strength independently at each grid transmission."""
    t_grid = list(t_grid)
    if not t_grid:
        raise ValueError("transmission grid must be nonempty")
    for t in t_grid:
        if not 0.0 < t <= 1.0:
            raise ValueError(f"transmission must be in (0, 1], got {t}")
    points = []
    for t in t_grid:
        ch = ChannelParams(transmission=t, dark_b=dark_b)
        points.append((t, optimize_lambda(spec, r, ch, bounds=bounds)))
    return ScanSeries(
        points=points, protocol=spec, response=r, dark_b=dark_b,
        metadata=metadata or {},
    )


def fit_power_law(
    series: ScanSeries, t_window: tuple[float, float] | None = None
) -> tuple[float, float]:
    """Fit K = prefactor * T**exponent over secure scan points.

    Least squares on log K versus log T.  The default window is the top
    decade of secure transmissions, where the quadratic scaling holds.
    Returns (exponent, prefactor).
    """
    secure = [
        (t, res.report.key_rate)
        for t, res in series.points
        if res.report is not None and res.report.secure
    ]
    if t_window is None:
        if not secure:
            raise ValueError("no secure points in the scan")
        t_max = max(t for t, _ in secure)
        t_window = (t_max / 10.0, t_max)
    selected = [(t, k) for t, k in secure if t_window[0] <= t <= t_window[1]]
    if len(selected) < 3:
        raise ValueError(
            f"need at least 3 secure points in window {t_window}, "
            f"got {len(selected)}"
        )
    log_t = np.log10([t for t, _ in selected])
    log_k = np.log10([k for _, k in selected])
    exponent, intercept = np.polyfit(log_t, log_k, 1)
    return float(exponent), float(10.0**intercept)


def optimal_stage_count(
    eta_a: float, eta_c: float, dark_a: float, n_max: int
) -> int:
    """Stage count maximizing the short-distance factor q1**2/q2.

    Exhaustive argmax over 0..n_max; ties go to the smaller stage count.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be nonnegative, got {n_max}")
    best_n, best_factor = 0, -math.inf
    for n in range(n_max + 1):
        params = MultiplexedDetectorParams(
            stages=n, eta_a=eta_a, dark_a=dark_a, eta_c=eta_c
        )
        factor = short_distance_factor(multiplexed_response(params))
        if factor > best_factor:
            best_n, best_factor = n, factor
    return best_n
