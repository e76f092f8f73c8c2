"""Semantic exception hierarchy shared by all toolkit modules."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ToolkitError, ValueError):
    """An input object violates a structural invariant (bad grid, metric
    axiom violation, weights not a probability vector, ...)."""


class DomainError(ToolkitError, ValueError):
    """An argument lies outside the mathematical domain of an operation
    (negative cost argument, mass outside (0, 1/2], inversion target out
    of table range, ...)."""


class UnsupportedSizeError(ToolkitError, ValueError):
    """An exact-mode operation was requested above its combinatorial size
    cap; the message names the heuristic alternative."""
