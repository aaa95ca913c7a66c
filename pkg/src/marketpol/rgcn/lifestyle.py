"""Lifestyle-politics score: scaled clipped log-odds of conservativeness.

The conservative probability is clipped to [0.0001, 0.9999], logit
transformed, then min-max scaled from the [-10, 10] band to [0, 1]:
0 leans liberal, 1 leans conservative. The inverse interpretation maps a
scaled value back through logit = 20*c - 10 and the logistic function.
"""

from __future__ import annotations

import math

from ..errors import ParameterError

CLIP_LO = 0.0001
CLIP_HI = 0.9999
SCALE_BAND = 10.0  # scaled from approximately -10..10 down to 0..1


def lifestyle_score(p_conservative: float) -> float:
    if not 0.0 <= p_conservative <= 1.0:
        raise ParameterError(f"probability {p_conservative} outside [0, 1]")
    clipped = min(max(p_conservative, CLIP_LO), CLIP_HI)
    logit = math.log(clipped / (1.0 - clipped))
    return (logit + SCALE_BAND) / (2.0 * SCALE_BAND)


def lifestyle_to_logit(scaled: float) -> float:
    return scaled * 2.0 * SCALE_BAND - SCALE_BAND


def lifestyle_to_probability(scaled: float) -> float:
    """Invert the scaling and map the logit back to a probability."""
    logit = lifestyle_to_logit(scaled)
    return 1.0 / (1.0 + math.exp(-logit))
