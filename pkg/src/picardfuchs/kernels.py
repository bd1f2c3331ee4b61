"""Kernel selection: the compiled extension when built, pure Python
otherwise.  Set PICARDFUCHS_PURE=1 to force the fallback."""

import os

from . import _kernels_py

if os.environ.get("PICARDFUCHS_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
ct_series_modp = _impl.ct_series_modp
mul_modp = _impl.mul_modp
pack_exponents = _kernels_py.pack_exponents
unpack_exponents = _kernels_py.unpack_exponents
