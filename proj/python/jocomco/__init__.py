"""Python bindings for the jocomco library.

The compiled core lives in the `_jocomco` extension module. Installed builds
place it inside this package; development builds put it on `sys.path` (e.g. by
pointing PYTHONPATH at the CMake build directory).
"""

try:
    from ._jocomco import *  # noqa: F401,F403
    from ._jocomco import __doc__ as _core_doc  # noqa: F401
except ImportError:  # pragma: no cover - development layout
    from _jocomco import *  # noqa: F401,F403

__all__ = [
    "version",
    "rsnr",
    "realize",
    "omp_solve",
    "solve_mu",
    "election_probability",
    "temporal_gain",
    "spatial_only_gain",
    "jocomco_gain",
    "jocomco_precode_gain",
    "normalized_sparsity",
    "figure3_head_budget",
    "run_trials",
    "run_figure2",
    "run_figure3",
    "run_figure4",
    "run_generic",
]
