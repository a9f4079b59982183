"""Backend selection for the scalar solver kernels.

The compiled ``_core`` extension is used when it was built; otherwise, or
when ``MSGLASS_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the pure-Python ``_pycore`` twin is used. Both expose the same functions.
"""
import os

from . import _pycore

BACKEND = "python"
_impl = _pycore

if os.environ.get("MSGLASS_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _core as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pycore

f_inverse = _impl.f_inverse
g_eval = _impl.g_eval
brent_root_g = _impl.brent_root_g
upsilon_eval = _impl.upsilon_eval
y0_root = _impl.y0_root
upsilon_upper_root = _impl.upsilon_upper_root


def backends():
    """Mapping of available backend name to kernel module."""
    out = {"python": _pycore}
    try:
        from . import _core

        out["cython"] = _core
    except ImportError:
        pass
    return out
