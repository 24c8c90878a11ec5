"""Four-state QKD protocols and their security constants.

Implements the information-theoretic functions for BB84 and SARG04 under a
collective attack on single-photon pulses combined with photon number
splitting on multiphoton pulses, and numerically derives the threshold QBER
and the linearization factor used by the closed-form minimum-transmission
bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

__all__ = [
    "ProtocolSpec",
    "BB84",
    "SARG04",
    "get_protocol",
    "binary_entropy",
    "mutual_info_ab",
    "eve_info_single",
    "eve_info_two",
    "solve_qber_threshold",
    "compute_xi",
    "pns_applicable",
]


def _xlog2x(x: float) -> float:
    # explicit branch for the 0*log2(0) = 0 convention; avoids NaN at edges
    if x == 0.0:
        return 0.0
    return x * math.log2(x)


def binary_entropy(x: float) -> float:
    """Binary entropy H(x) in bits, with 0*log2(0) = 0."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument must be in [0, 1], got {x}")
    return -_xlog2x(x) - _xlog2x(1.0 - x)


def mutual_info_ab(q: float) -> float:
    """Mutual information between Alice and Bob, 1 - H(Q), in bits."""
    if not 0.0 <= q <= 0.5:
        raise ValueError(f"QBER must be in [0, 1/2], got {q}")
    return 1.0 - binary_entropy(q)


@dataclass(frozen=True)
class ProtocolSpec:
    """A four-state protocol: sifting fraction and Eve-information model.

    The threshold QBER and the linearization factor are pure functions of the
    protocol and are computed lazily on first access, then cached.  Instances
    are immutable and safe to share across threads (a cache race merely
    recomputes the same value).
    """

    name: str
    p_sift: float

    def eve_info_single(self, q: float) -> float:
        """Eve's information gain on single-photon pulses, bits."""
        return eve_info_single(self, q)

    @cached_property
    def i_ae_two(self) -> float:
        """Eve's information gain on two-photon pulses, bits."""
        return eve_info_two(self)

    @cached_property
    def q_threshold(self) -> float:
        """Threshold QBER where the single-photon key rate vanishes."""
        return solve_qber_threshold(self)

    @cached_property
    def xi(self) -> float:
        """Linearization factor tightening the threshold for multiphoton events."""
        return compute_xi(self)


BB84 = ProtocolSpec(name="bb84", p_sift=0.5)
SARG04 = ProtocolSpec(name="sarg04", p_sift=0.25)

_PROTOCOLS = {"bb84": BB84, "sarg04": SARG04}


def get_protocol(name: str) -> ProtocolSpec:
    """Look up a built-in protocol by (case-insensitive) name."""
    try:
        return _PROTOCOLS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown protocol {name!r}; expected one of {sorted(_PROTOCOLS)}"
        ) from None


def eve_info_single(spec: ProtocolSpec, q: float) -> float:
    """Eve's single-photon information gain at QBER q, in bits.

    BB84: H(q) on [0, 1/2].  SARG04: the collective-attack expression
    (1-q)log2(1-q) - (1-2q)log2(1-2q) + q(1 - log2 q), valid on [0, 1/2).
    """
    if q < 0.0:
        raise ValueError(f"QBER must be nonnegative, got {q}")
    if spec.name == "bb84":
        if q > 0.5:
            raise ValueError(f"BB84 QBER must be in [0, 1/2], got {q}")
        return binary_entropy(q)
    if q >= 0.5:
        raise ValueError(f"SARG04 QBER must be in [0, 1/2), got {q}")
    if q == 0.0:
        return 0.0
    return (
        _xlog2x(1.0 - q)
        - _xlog2x(1.0 - 2.0 * q)
        + q * (1.0 - math.log2(q))
    )


def eve_info_two(spec: ProtocolSpec) -> float:
    """Eve's two-photon information gain, in bits.

    Multiphoton pulses are completely insecure under BB84 (1 bit); under
    SARG04 the gain is bounded by the Holevo quantity H((2+sqrt(2))/4).
    """
    if spec.name == "bb84":
        return 1.0
    return binary_entropy((2.0 + math.sqrt(2.0)) / 4.0)


def _bisect(f, lo: float, hi: float, tol: float) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise RuntimeError(
            f"no sign change bracketed on [{lo}, {hi}] (f={flo}, {fhi})"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def solve_qber_threshold(spec: ProtocolSpec, tol: float = 1e-12) -> float:
    """Root of I_AB(Q) = I_AE^(1)(Q) on (0, 1/2), by bisection.

    Bisection is used instead of Newton because the entropy derivative
    diverges at 0.
    """
    eps = 1e-12

    def residual(q: float) -> float:
        return mutual_info_ab(q) - eve_info_single(spec, q)

    return _bisect(residual, eps, 0.5 - eps, tol)


def _positivity_margin(spec: ProtocolSpec, q: float, y: float) -> float:
    """I_AB(Q) - y*I_AE^(1)(Q/y) - (1-y)*I_AE^(2); positive means secure."""
    return (
        mutual_info_ab(q)
        - y * eve_info_single(spec, q / y)
        - (1.0 - y) * spec.i_ae_two
    )


def _solve_contour_q(spec: ProtocolSpec, y: float, q_th: float) -> float:
    """Q on the zero contour of the key-positivity margin at fixed y."""

    def f(q: float) -> float:
        return _positivity_margin(spec, q, y)

    # the contour sits just below q_th for y slightly under 1
    return _bisect(f, 1e-12, q_th, 1e-12)


def compute_xi(spec: ProtocolSpec) -> float:
    """Linearization factor xi of the near-threshold security bound.

    Solves the exact key-positivity contour for Q at y = 1 - eps, forms the
    finite-difference slope (1 - Q/Q_th)/eps, and Richardson-extrapolates
    over eps in {1e-3, 1e-4} to cancel the leading truncation error.
    """
    q_th = spec.q_threshold

    def slope(eps: float) -> float:
        q = _solve_contour_q(spec, 1.0 - eps, q_th)
        return (1.0 - q / q_th) / eps

    e1, e2 = 1e-3, 1e-4
    s1, s2 = slope(e1), slope(e2)
    # first-order Richardson: slope(eps) ~ xi + c*eps
    return (e1 * s2 - e2 * s1) / (e1 - e2)


def pns_applicable(spec: ProtocolSpec, q: float, y: float) -> bool:
    """Whether the photon-number-splitting security model applies.

    True iff Q/y lies inside the single-photon information function's domain
    and I_AE^(1)(Q/y) <= I_AE^(2).  Out-of-domain ratios return False.
    """
    if q < 0.0 or not 0.0 < y <= 1.0:
        raise ValueError(f"require Q >= 0 and 0 < y <= 1, got Q={q}, y={y}")
    ratio = q / y
    if spec.name == "bb84":
        return ratio <= 0.5
    if ratio >= 0.5:
        return False
    return eve_info_single(spec, ratio) <= spec.i_ae_two
