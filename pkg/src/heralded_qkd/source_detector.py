"""Photon-pair source statistics and heralding-detector response models.

The source is a weakly pumped SPDC process with Poissonian pair statistics.
The heralding detector is an N-stage balanced splitter tree terminated by
binary on/off detectors; its action on 0, 1, or 2 input photons is summarized
by the conditional-probability triple (q0, q1, q2) of reporting the
"exactly one click" outcome.  A closed-form response and an exhaustive
enumeration oracle are both provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

__all__ = [
    "PhotonStatistics",
    "MultiplexedDetectorParams",
    "HeraldResponse",
    "poisson_pair_stats",
    "multiplexed_response",
    "wcp_response",
    "brute_force_response",
    "short_distance_factor",
    "distance_factor",
    "approx_distance_factor",
    "advantage_threshold",
]

_BRUTE_FORCE_MAX_STAGES = 6


@dataclass(frozen=True)
class PhotonStatistics:
    """Probabilities of 0, 1 and >=2 generated pairs per pulse."""

    p0: float
    p1: float
    p2: float


@dataclass(frozen=True)
class MultiplexedDetectorParams:
    """Physical parameters of the N-stage multiplexing tree detector.

    stages=0 is the plain binary on/off detector.  Lossy couplers enter only
    through the effective efficiency eta_a * eta_c**stages.
    """

    stages: int
    eta_a: float
    dark_a: float
    eta_c: float = 1.0

    def __post_init__(self):
        if self.stages < 0 or self.stages != int(self.stages):
            raise ValueError(f"stages must be a nonnegative integer, got {self.stages}")
        for label, value in (
            ("eta_a", self.eta_a),
            ("dark_a", self.dark_a),
            ("eta_c", self.eta_c),
        ):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{label} must be in [0, 1], got {value}")

    @property
    def effective_efficiency(self) -> float:
        return self.eta_a * self.eta_c**self.stages

    @property
    def n_bins(self) -> int:
        return 2**self.stages


@dataclass(frozen=True)
class HeraldResponse:
    """Conditional probabilities of the single-click heralding outcome.

    q0, q1, q2 condition on 0, 1, 2 photons at the detector input.  May be
    constructed directly from measured values for an arbitrary detector; only
    range validation is applied.
    """

    q0: float
    q1: float
    q2: float

    def __post_init__(self):
        for label, value in (("q0", self.q0), ("q1", self.q1), ("q2", self.q2)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{label} must be in [0, 1], got {value}")


def poisson_pair_stats(lam: float) -> PhotonStatistics:
    """Poisson pair-number statistics at mean pair number lam.

    p2 is the exact complement 1 - p0 - p1, not the quadratic approximation.
    """
    if lam < 0.0:
        raise ValueError(f"pump strength must be nonnegative, got {lam}")
    p0 = math.exp(-lam)
    p1 = lam * p0
    # -expm1(-lam) avoids the catastrophic cancellation of 1 - p0 - p1 at
    # tiny lam, which could otherwise round p2 negative
    p2 = max(-math.expm1(-lam) - p1, 0.0)
    return PhotonStatistics(p0=p0, p1=p1, p2=p2)


def multiplexed_response(params: MultiplexedDetectorParams) -> HeraldResponse:
    """Closed-form single-click response of the multiplexing tree."""
    eta = params.effective_efficiency
    m = params.n_bins
    d = params.dark_a
    no_dark = (1.0 - d) ** (m - 1)
    q0 = no_dark * m * d
    q1 = no_dark * (m * d * (1.0 - eta) + eta)
    q2 = no_dark * (
        m * d * (1.0 - eta) ** 2 + 2.0 * eta * (1.0 - eta) + eta**2 / m
    )
    return HeraldResponse(q0=q0, q1=q1, q2=q2)


def wcp_response() -> HeraldResponse:
    """The no-heralding (weak coherent pulse) response q0 = q1 = q2 = 1."""
    return HeraldResponse(q0=1.0, q1=1.0, q2=1.0)


def brute_force_response(params: MultiplexedDetectorParams, n_photons: int) -> float:
    """Exhaustive-enumeration probability of exactly one detector click.

    Each of the n_photons lands in one of 2**N bins with uniform probability,
    is detected there with probability eta_a * eta_c**N, and every bin can
    independently fire a dark count; a dark count on a bin already clicked by
    a photon merges with it.  All photon-bin assignments and detection
    outcomes are enumerated; the dark-count pattern probability for a given
    set of photon-clicked bins is exact.  Verification oracle for the closed
    form; independent of its algebra.
    """
    if params.stages > _BRUTE_FORCE_MAX_STAGES:
        raise ValueError(
            f"enumeration guard: stages must be <= {_BRUTE_FORCE_MAX_STAGES}"
        )
    if n_photons not in (0, 1, 2):
        raise ValueError(f"n_photons must be 0, 1 or 2, got {n_photons}")

    eta = params.effective_efficiency
    m = params.n_bins
    d = params.dark_a

    total = 0.0
    bins = range(m)
    # each photon: (bin, detected?) with detected in {True, False}
    for assignment in product(product(bins, (True, False)), repeat=n_photons):
        prob = 1.0
        clicked = set()
        for bin_idx, detected in assignment:
            prob *= (1.0 / m) * (eta if detected else 1.0 - eta)
            if detected:
                clicked.add(bin_idx)
        k = len(clicked)
        if k == 0:
            # exactly one dark count among the m empty bins
            prob *= m * d * (1.0 - d) ** (m - 1)
        elif k == 1:
            # no dark count on the other m-1 bins (dark on the clicked bin merges)
            prob *= (1.0 - d) ** (m - 1)
        else:
            prob = 0.0
        total += prob
    return total


def short_distance_factor(r: HeraldResponse) -> float:
    """Key-rate figure of merit q1**2/q2 for the high-transmission regime.

    Returns inf when q2 = 0 (perfect multiphoton rejection makes the factor
    unbounded).
    """
    if r.q2 == 0.0:
        return math.inf
    return r.q1**2 / r.q2


def distance_factor(r: HeraldResponse) -> float:
    """Maximum-distance figure of merit sqrt(q0*q2)/q1; lower is better."""
    if r.q1 == 0.0:
        raise ZeroDivisionError("distance factor undefined for q1 = 0")
    return math.sqrt(r.q0 * r.q2) / r.q1


def approx_distance_factor(params: MultiplexedDetectorParams) -> float:
    """Small-dark-count approximation of the distance factor.

    Valid when dark_a << eta/(1 - eta) with eta the effective efficiency.
    """
    eta = params.effective_efficiency
    if eta == 0.0:
        raise ValueError("effective efficiency must be positive")
    return math.sqrt(params.dark_a) * math.sqrt(
        1.0 + 2.0 ** (params.stages + 1) * (1.0 - eta) / eta
    )


def advantage_threshold(stages: int) -> float:
    """Minimum effective efficiency for q1**2/q2 > 1 at the given stage count.

    Below this value the heralded source cannot beat weak coherent pulses in
    the short-distance regime.
    """
    if stages < 0:
        raise ValueError(f"stages must be nonnegative, got {stages}")
    return 2.0 / (3.0 - 2.0 ** (-stages))
