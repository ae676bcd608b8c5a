"""Exception types shared across the package."""


class GraftLabError(Exception):
    """Base class for all graftlab errors."""


class DomainError(GraftLabError):
    """A coordinate lies outside the chart or a field's domain."""


class SeamPointError(GraftLabError):
    """Curvature (or another seam-discontinuous quantity) was requested
    exactly on a seam circle, where it jumps."""


class SolvabilityError(GraftLabError):
    """The periodic variation problem has no solution (nonzero mean forcing)."""


class SingularSystemError(GraftLabError):
    """A per-mode linear system is singular (degenerate geometry)."""


class ConvergenceError(GraftLabError):
    """An iterative solver failed to converge."""


class ConfigError(GraftLabError):
    """Invalid run configuration."""
