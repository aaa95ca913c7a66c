from .estimators import GlobalPoliticalTotals, SegmentCounts, alignment, relevance
from .overlap import (
    EXACT_POOL_LIMIT,
    NullOverlapStats,
    draw_null_overlap,
    exact_overlap_stats,
    expected_overlap_closed_form,
    montecarlo_overlap_stats,
    null_overlap_stats,
)
from .reports import (
    EDGE_KIND_PRESETS,
    PoliticsReport,
    SegmentSpec,
    author_politics,
    compute_totals,
    partition_segments,
    polarization,
    political_edge_counts,
    political_products,
    segment_counts,
    segment_report,
)

__all__ = [
    "GlobalPoliticalTotals",
    "SegmentCounts",
    "alignment",
    "relevance",
    "EXACT_POOL_LIMIT",
    "NullOverlapStats",
    "draw_null_overlap",
    "exact_overlap_stats",
    "expected_overlap_closed_form",
    "montecarlo_overlap_stats",
    "null_overlap_stats",
    "EDGE_KIND_PRESETS",
    "PoliticsReport",
    "SegmentSpec",
    "author_politics",
    "compute_totals",
    "partition_segments",
    "polarization",
    "political_edge_counts",
    "political_products",
    "segment_counts",
    "segment_report",
]
