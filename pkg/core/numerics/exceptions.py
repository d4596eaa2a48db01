class SparseRecoveryError(ValueError):
    """Base class for every error raised by the numerical core and harness."""


class DimensionMismatchError(SparseRecoveryError):
    pass


class PartitionError(SparseRecoveryError):
    """
    A group partition is not a partition of 0..n-1.
    `index` names the offending coordinate (or group, for empty groups).
    """
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class PartitionOverlapError(PartitionError):
    pass


class PartitionCoverageError(PartitionError):
    pass


class EmptyGroupError(PartitionError):
    pass


class BoxError(SparseRecoveryError):
    pass


class ParameterError(SparseRecoveryError):
    pass


class SmoothnessError(SparseRecoveryError):
    pass


class NonFiniteGradientError(SparseRecoveryError):
    pass


class OracleSizeError(SparseRecoveryError):
    pass


class InstanceError(SparseRecoveryError):
    pass


class InstanceFormatError(SparseRecoveryError):
    pass
