"""Hot numeric kernels with a numba implementation and a pure-numpy fallback.

The active backend is chosen at import time from the ``TSDMD_BACKEND``
environment variable (``"numba"`` or ``"numpy"``). Unset, numba is used
when importable. ``set_backend`` switches at runtime (used by tests and
the kernel benchmark).
"""

import os

from . import numpy_impl

try:
    from . import numba_impl
    HAS_NUMBA = True
except ImportError:
    numba_impl = None
    HAS_NUMBA = False

_KERNEL_NAMES = (
    "lin_interp_1d",
    "lin_interp_1d_vg",
    "lin_interp_2d",
    "lin_interp_2d_vg",
    "nearest_1d",
    "nearest_2d",
    "rhs_1d",
    "rhs_2d_burgers",
)

_active = {}
_backend = None


def set_backend(name):
    """Select the kernel backend, ``"numba"`` or ``"numpy"``."""
    global _backend
    if name == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        impl = numba_impl
    elif name == "numpy":
        impl = numpy_impl
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    for fname in _KERNEL_NAMES:
        _active[fname] = getattr(impl, fname)
    _backend = name


def backend_name():
    return _backend


def _default_backend():
    env = os.environ.get("TSDMD_BACKEND", "").strip().lower()
    if env in ("numba", "numpy"):
        return env
    if env:
        raise RuntimeError(f"TSDMD_BACKEND must be 'numba' or 'numpy', got {env!r}")
    return "numba" if HAS_NUMBA else "numpy"


set_backend(_default_backend())


def lin_interp_1d(values, x0, h, q):
    return _active["lin_interp_1d"](values, x0, h, q)


def lin_interp_1d_vg(values, x0, h, q):
    return _active["lin_interp_1d_vg"](values, x0, h, q)


def lin_interp_2d(values, x0, y0, hx, hy, qx, qy):
    return _active["lin_interp_2d"](values, x0, y0, hx, hy, qx, qy)


def lin_interp_2d_vg(values, x0, y0, hx, hy, qx, qy):
    return _active["lin_interp_2d_vg"](values, x0, y0, hx, hy, qx, qy)


def nearest_1d(values, a, h, q):
    return _active["nearest_1d"](values, a, h, q)


def nearest_2d(values, a0, a1, h0, h1, q0, q1):
    return _active["nearest_2d"](values, a0, a1, h0, h1, q0, q1)


def rhs_1d(u_ext, h, flux_code):
    return _active["rhs_1d"](u_ext, h, flux_code)


def rhs_2d_burgers(u_ext, h0, h1):
    return _active["rhs_2d_burgers"](u_ext, h0, h1)
