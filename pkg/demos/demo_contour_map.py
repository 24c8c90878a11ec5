#!/usr/bin/env python3
"""Coarse text contour of the renormalized key rate over (Q, y).

For SARG04 the region where the PNS eavesdropping model stops applying is
blanked with '#'.  The '+' marks trace the linearized security boundary
Q = Q_th (1 - xi (1 - y)).
"""

import math

import numpy as np

from heralded_qkd import BB84, SARG04, renormalized_key_rate

LEVELS = " .:-=+*%@"

for spec in (BB84, SARG04):
    print(f"--- {spec.name}: renormalized key rate, Q down, y across ---")
    y_grid = np.linspace(0.7, 1.0, 31)
    q_grid = np.linspace(0.0, 0.15, 16)
    peak = spec.p_sift
    for q in q_grid:
        row = []
        for y in y_grid:
            k = renormalized_key_rate(spec, float(q), float(y))
            q_bound = spec.q_threshold * (1.0 - spec.xi * (1.0 - y))
            if abs(q - q_bound) < 0.005:
                row.append("+")
            elif math.isnan(k):
                row.append("#")
            elif k <= 0:
                row.append(" ")
            else:
                idx = min(int(k / peak * len(LEVELS)), len(LEVELS) - 1)
                row.append(LEVELS[idx])
        print(f"Q={q:.3f} |{''.join(row)}|")
    print()
