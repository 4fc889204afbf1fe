"""Out-of-distribution error bounds for learned one-mode bosonic channels."""

from ._cvoodg import (
    BoundCurve,
    QuadratureError,
    concave_hull,
    curve,
    extend,
    extend_fock_matrix,
    run_cli,
    run_suite,
    suite_names,
    trace_distance,
)

__all__ = [
    "BoundCurve",
    "QuadratureError",
    "concave_hull",
    "curve",
    "extend",
    "extend_fock_matrix",
    "run_cli",
    "run_suite",
    "suite_names",
    "trace_distance",
]
__version__ = "0.1.0"
