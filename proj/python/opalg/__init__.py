"""Operator-space norm toolkit.

Matricization (bracket) norms of matrix families, truncated free-group and
Fock-space representations, free products of pointed Hilbert spaces, and a
seeded verification harness for the norm inequalities relating them.
"""

import json as _json

try:
    from ._core import *  # noqa: F401,F403
    from . import _core as _backend
except ImportError:  # development layout: extension module next to the package
    from _core import *  # noqa: F401,F403
    import _core as _backend

__version__ = _backend.__version__


def run_suite(name, **config):
    """Run a verification suite and return the report as a dict.

    Accepted config keys: n, k, d, radius, depth, trials, seed, tolerance,
    mc_samples, include_runtime.
    """
    return _json.loads(_backend.run_suite_json(name, **config))
