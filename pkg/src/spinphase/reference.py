"""Published reference values used to report deviations.

Values are keyed by ``2j``. Maximal Wehrl entropies of pure states are
literature values (themselves quoted from earlier numerical work), so they
are targets rather than certified optima.
"""
from __future__ import annotations

from .spin import as_spin

# 2j -> (max pure-state Wehrl entropy, corresponding complexity)
MAX_WEHRL = {
    2: (0.973519, 1.3591),
    3: (1.23871, 1.6302),
    4: (1.49166, 1.9970),
    5: (1.65531, 2.2750),
    6: (1.83594, 2.6613),
    7: (1.95286, 2.9384),
    8: (2.07789, 3.2838),
    9: (2.18494, 3.6145),
}

# 2j -> (Wehrl entropy, complexity) of (|j,-j> + |j,j>)/sqrt(2)
NOON = {
    1: (0.5, 1.0),
    2: (0.973519, 1.3591),
    3: (1.23871, 1.6302),
    4: (1.38723, 1.7990),
    5: (1.4722, 1.8943),
    6: (1.52266, 1.9455),
    7: (1.55414, 1.9722),
    8: (1.57495, 1.9859),
    9: (1.58957, 1.9929),
}

# 2j -> complexity-generating power of unitary gates;
# "S1"/"S2" are maxima over the squeezing parameter
GATE_POWER = {
    2: {"X": 0.3591, "Z": 0.0, "F": 0.3214, "P": 0.2741, "S1": 0.3591, "S2": 0.3591},
    3: {"X": 0.5854, "Z": 0.0, "F": 0.6082, "P": 0.4438, "S1": 0.6302, "S2": 0.6302},
    4: {"X": 0.7467, "Z": 0.0, "F": 0.7931, "P": 0.5533, "S1": 0.8869, "S2": 0.9380},
    5: {"X": 0.8520, "Z": 0.0, "F": 0.8945, "P": 0.6214, "S1": 1.1389, "S2": 0.9748},
}

GATE_COLUMNS = ("X", "Z", "F", "P", "S1", "S2")


def max_pure_complexity(j) -> float | None:
    """Best known pure-state complexity; 1 for qubits, None if untabulated."""
    tj = as_spin(j).twice_j
    if tj == 1:
        return 1.0
    entry = MAX_WEHRL.get(tj)
    return entry[1] if entry else None
