from .accessor import CorpusIndex
from .waves import (
    SampleReport,
    SampleResult,
    SampleWavePlan,
    StepTwoBase,
    WaveCounts,
    bipartite_baseline,
    run_plan,
    run_wave,
)

__all__ = [
    "CorpusIndex",
    "SampleReport",
    "SampleResult",
    "SampleWavePlan",
    "StepTwoBase",
    "WaveCounts",
    "bipartite_baseline",
    "run_plan",
    "run_wave",
]
