"""Kernel backend selection.

Prefers the compiled extension and falls back to the numpy/scipy
implementation when it is not built. Set ``NETSCALE_KERNELS=python`` to force
the fallback (used by the benchmark and backend-parity tests), or
``NETSCALE_KERNELS=cython`` to fail loudly if the extension is missing.
"""

from __future__ import annotations

import os

_requested = os.environ.get("NETSCALE_KERNELS", "").strip().lower()

if _requested in ("py", "python"):
    from . import _kernels_py as _impl

    BACKEND = "python"
elif _requested in ("", "c", "cython", "ext"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        if _requested:
            raise
        from . import _kernels_py as _impl

        BACKEND = "python"
else:
    raise RuntimeError(f"unknown NETSCALE_KERNELS value: {_requested!r}")

connected_components = _impl.connected_components
geodesic_sum = _impl.geodesic_sum
pair_distances = _impl.pair_distances
triangle_count = _impl.triangle_count
double_edge_swap_chunk = _impl.double_edge_swap_chunk
