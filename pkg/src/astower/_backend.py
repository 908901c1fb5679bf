"""Backend selection: compiled kernel when available, pure Python otherwise.

Set ASTOWER_PURE_KERNEL=1 to force the pure backend (used by the test
suite to exercise both paths and by the benchmark for comparison).
"""

import os

if os.environ.get("ASTOWER_PURE_KERNEL") == "1":
    from . import _kernel_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernel_py as _impl

        BACKEND = "pure"

lp_mul = _impl.lp_mul
lp_add_scaled = _impl.lp_add_scaled
lp_map_pow = _impl.lp_map_pow
add_digits = _impl.add_digits
