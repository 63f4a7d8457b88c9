"""Space-time BDDC laboratory: Python bindings to the C++ core."""

from ._core import (
    StbddcError,
    csv_header,
    resolve_config,
    run_experiment,
    solve_direct,
    solve_spacetime,
    table1_reference,
    verify_suite,
)

__all__ = [
    "StbddcError",
    "csv_header",
    "resolve_config",
    "run_experiment",
    "solve_direct",
    "solve_spacetime",
    "table1_reference",
    "verify_suite",
]
