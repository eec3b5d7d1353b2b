"""Minimum covering ball solver bindings."""

try:
    from ._mcball import (  # noqa: F401
        InputError,
        SolverError,
        brute_force_mb,
        circumball,
        generate,
        load_points,
        save_points,
        solve,
    )
except ImportError:  # plain CMake build tree: extension lives next door
    from _mcball import (  # noqa: F401
        InputError,
        SolverError,
        brute_force_mb,
        circumball,
        generate,
        load_points,
        save_points,
        solve,
    )

__all__ = [
    "InputError",
    "SolverError",
    "brute_force_mb",
    "circumball",
    "generate",
    "load_points",
    "save_points",
    "solve",
]
