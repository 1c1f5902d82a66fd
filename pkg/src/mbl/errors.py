"""Exception types shared across the package.

Two failure families matter to callers: bad inputs (rejected before any
numerics run) and numerical breakdowns (singular systems, undefined
correlations, failed integrations). The CLI maps them to exit codes 1 and 2.
"""

from __future__ import annotations


class ParameterError(ValueError):
    """Invalid or inconsistent user input (parameters, config, grid spec)."""


class NumericalError(RuntimeError):
    """A computation could not produce a trustworthy result."""
