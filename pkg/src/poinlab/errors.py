"""Exception hierarchy shared across the package."""


class PoinlabError(Exception):
    """Base class for all package errors."""


class CatalogError(PoinlabError):
    """Requested domain family does not exist."""


class ValidationError(PoinlabError):
    """Argument outside its documented range or contract."""


class DegenerateDomainError(PoinlabError):
    """Rejection sampling acceptance rate fell below the usable floor."""


class ResolutionError(PoinlabError):
    """Grid resolution leaves no interior cell."""


class MapDomainError(PoinlabError):
    """Point lies outside the domain of a geometric map."""


class EstimationError(PoinlabError):
    """An empirical estimate could not be formed from the given samples."""


class DegeneracyError(PoinlabError):
    """A measured constant degenerated (e.g. Jacobian floor at zero)."""


class SolverError(PoinlabError):
    """Eigen solve failed or its preconditions do not hold."""


class OptimizerError(PoinlabError):
    """Variational search failed to produce any usable iterate."""
