"""Asymptotic expansions of Lagrangian trajectories in decaying flows.

Thin python surface over the C++ core: exact exponent semigroups, the
polynomial resolvent solver, the trajectory-expansion recursion, the
numerical trajectory oracle and the 2D spectral solver.
"""

from trajexp._core import (
    ConfigError,
    HorizonError,
    InvalidInput,
    Semigroup,
    __version__,
    expand,
    fixture,
    fixture_names,
    integrate_trajectory,
    resolvent_solve,
    resolvent_solve_exact,
    semigroup_table,
    simulate,
    verify,
)

__all__ = [
    "ConfigError",
    "HorizonError",
    "InvalidInput",
    "Semigroup",
    "__version__",
    "expand",
    "fixture",
    "fixture_names",
    "integrate_trajectory",
    "resolvent_solve",
    "resolvent_solve_exact",
    "semigroup_table",
    "simulate",
    "verify",
]
