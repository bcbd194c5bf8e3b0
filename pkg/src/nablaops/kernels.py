"""Backend selection for the hot kernels.

The compiled extension is used when it was built; ``NABLA_OPS_PURE=1`` forces
the pure-Python fallback. Both backends expose the same five functions.
"""

import os

from . import _kernels_py

if os.environ.get("NABLA_OPS_PURE") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

compose_ext = _impl.compose_ext
perm_mul = _impl.perm_mul
perm_inv = _impl.perm_inv
gamma_sym = _impl.gamma_sym
sym_crossed = _impl.sym_crossed
coset_min = _impl.coset_min


def backends():
    """Return the available kernel modules keyed by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        out["compiled"] = _kernels
    return out
