"""Exception types shared across the package."""


class CobsigError(Exception):
    """Base class for all package errors."""


class MeshError(CobsigError):
    """Malformed complex input: bad indices, degenerate simplices, bad labels."""


class MetricError(CobsigError):
    """Nonpositive edge lengths or degenerate simplex volumes."""


class RegionError(CobsigError):
    """Unknown or empty region tag."""


class GeodesyError(CobsigError):
    """Distance or diameter query cannot be answered (e.g. unreachable vertex)."""


class NoiseError(CobsigError):
    """Noise specification violates its constraints."""


class FilterError(CobsigError):
    """Kept subcomplex cannot form a valid filter."""


class CompositionError(CobsigError):
    """Gluing correspondence or label constraints failed."""
