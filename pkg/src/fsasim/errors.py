"""Exception types shared across the package."""


class FsaSimError(Exception):
    """Base class for every error raised by this package."""


class BandRangeError(FsaSimError):
    """A frequency falls outside the antenna's operating band."""


class CoverageError(FsaSimError):
    """An angle falls outside the antenna's steerable sector."""


class PartitionError(FsaSimError):
    """A channel cannot be divided into the requested resource units."""


class ShapeMismatchError(FsaSimError):
    """Two objects that must share a grid or length do not."""


class CapacityError(FsaSimError):
    """More devices than resource units."""


class AllocationError(FsaSimError):
    """A device lacks a resource-unit assignment."""


class NoLinkError(FsaSimError):
    """Signal too weak for the lowest modulation and coding scheme."""


class ConfigError(FsaSimError):
    """Invalid smoothing or filter configuration."""


class AmbiguousPeakError(FsaSimError):
    """A power profile has no usable maximum."""


class RangingError(FsaSimError):
    """Round-trip timing implies a negative distance."""


class ScenarioError(FsaSimError):
    """A scenario file failed to parse or validate."""
