"""Backend selection for the Monte Carlo hot kernels.

The compiled Cython extension is used when available; the pure-numpy
implementation is the fallback.  Set ``VRJP_PURE=1`` in the environment to
force the fallback (useful for benchmarking and debugging).  Both backends
consume identical pre-drawn random arrays and agree to floating-point
rounding, so results do not depend on which one is active.
"""

import os

from . import pure as _pure

if os.environ.get("VRJP_PURE") == "1":
    _impl = _pure
else:
    try:
        from . import _compiled as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND

ig_transform = _impl.ig_transform
beta_eliminate = _impl.beta_eliminate
beta_eliminate_many = _impl.beta_eliminate_many
chain_paths = _impl.chain_paths
chain_paths_many = _impl.chain_paths_many
vrjp_paths = _impl.vrjp_paths
vrjp_paths_many = _impl.vrjp_paths_many
errw_paths = _impl.errw_paths


def backend_name() -> str:
    """Name of the active kernel backend ("compiled" or "pure")."""
    return BACKEND
