"""Hot solver kernels: compiled extension when available, NumPy otherwise.

The active backend is chosen once at import time. Setting the environment
variable ``PARCS_PURE_PYTHON=1`` before import forces the NumPy fallback,
which is what the kernel benchmark uses to compare the two paths.
"""

import os

if os.environ.get("PARCS_PURE_PYTHON"):
    from ._admm_py import admm_bp_kernel

    BACKEND = "python"
else:
    try:
        from ._admm_c import admm_bp_kernel

        BACKEND = "c"
    except ImportError:
        from ._admm_py import admm_bp_kernel

        BACKEND = "python"

__all__ = ["admm_bp_kernel", "BACKEND"]
