"""Kernel backend selection: compiled extension with numpy fallback.

Set CLIMATEXT_PURE_PYTHON=1 to force the fallback (useful for the
benchmark and for debugging).
"""

from __future__ import annotations

import os

if os.environ.get("CLIMATEXT_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
assign_labels = _impl.assign_labels
update_centroids = _impl.update_centroids
min_sqdist = _impl.min_sqdist
gmm_estep_diag = _impl.gmm_estep_diag


def available_backends() -> dict[str, object]:
    """Both kernel modules when importable (for parity tests/benchmarks)."""
    from . import _kernels_py
    out = {"numpy": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
