#!/usr/bin/env python3
"""Compare multiplexed heralding detectors across stage counts.

Shows the two figures of merit for a tree of binary detectors: q1^2/q2
governs the short-distance key rate, sqrt(q0 q2)/q1 governs the maximum
secure distance.  More stages improve number resolution but multiply dark
counts and coupler loss.
"""

from heralded_qkd import (
    MultiplexedDetectorParams,
    advantage_threshold,
    distance_factor,
    multiplexed_response,
    optimal_stage_count,
    short_distance_factor,
)

ETA_C = 0.98
DARK_A = 1e-6

for eta_a in (0.4, 0.6, 0.8):
    print(f"--- heralding efficiency eta_A = {eta_a} "
          f"(couplers {ETA_C}, dark counts {DARK_A}) ---")
    print(f"{'N':>3} {'q1^2/q2':>10} {'sqrt(q0q2)/q1':>15}")
    for stages in range(6):
        r = multiplexed_response(
            MultiplexedDetectorParams(stages=stages, eta_a=eta_a,
                                      dark_a=DARK_A, eta_c=ETA_C)
        )
        print(f"{stages:>3} {short_distance_factor(r):>10.4f} "
              f"{distance_factor(r):>15.6f}")
    best = optimal_stage_count(eta_a, ETA_C, DARK_A, 8)
    print(f"best stage count for the short-distance rate: N = {best}")
    print(f"(beating WCPs at N = {best} needs effective efficiency > "
          f"{advantage_threshold(best):.3f})")
    print()
