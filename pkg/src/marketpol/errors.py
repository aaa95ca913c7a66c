"""Typed errors raised across the toolkit.

Every recoverable failure surfaces as a subclass of :class:`MarketpolError`
so the CLI can map it to a machine-readable error class and exit code.
"""


class MarketpolError(Exception):
    """Base class for all toolkit errors."""

    #: short machine-readable class name used by the CLI error envelope
    code = "error"


class GraphError(MarketpolError):
    code = "graph"


class UnknownNodeError(GraphError):
    code = "unknown_node"


class EndpointKindError(GraphError):
    """Edge endpoints are not legal for the requested edge kind."""

    code = "endpoint_kind"


class FrozenGraphError(GraphError):
    code = "frozen_graph"


class SnapshotError(MarketpolError):
    code = "snapshot"


class SnapshotVersionError(SnapshotError):
    code = "snapshot_version"


class SnapshotChecksumError(SnapshotError):
    code = "snapshot_checksum"


class SnapshotTruncatedError(SnapshotError):
    code = "snapshot_truncated"


class IngestError(MarketpolError):
    code = "ingest"


class ParameterError(MarketpolError):
    code = "parameter"


class EmptySegmentError(MarketpolError):
    code = "empty_segment"


class DegenerateNullError(MarketpolError):
    """Null-model variance is zero; no z-score exists."""

    code = "degenerate_null"


class ModeError(MarketpolError):
    """Requested estimation mode cannot handle the instance size."""

    code = "mode"


class SplitError(MarketpolError):
    """A class is missing from the training split."""

    code = "split"


class DivergenceError(MarketpolError):
    """Training hit a non-finite loss; carries the last finite snapshot."""

    code = "divergence"

    def __init__(self, message, snapshot=None):
        super().__init__(message)
        self.snapshot = snapshot


class FitError(MarketpolError):
    code = "fit"


class RankDeficiencyError(FitError):
    """Design matrix is rank deficient; names the collinear columns."""

    code = "rank_deficiency"

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = tuple(columns)


class ConvergenceError(FitError):
    """Optimizer hit the iteration cap; carries the trajectory."""

    code = "non_convergence"

    def __init__(self, message, trajectory=()):
        super().__init__(message)
        self.trajectory = list(trajectory)


class ConfigError(MarketpolError):
    code = "config"


class ValidationError(MarketpolError):
    code = "validation"
