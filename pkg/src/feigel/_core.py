"""Select the quadrature kernel backend at import time.

The compiled ``_kernels`` extension is preferred; the pure-Python mirror
is used when it is missing or when ``FEIGEL_PURE_PYTHON`` is set to a
non-empty value other than ``0``.
"""
import importlib
import os

from . import _kernels_py


def _load_compiled():
    try:
        return importlib.import_module("feigel._kernels")
    except ImportError:
        return None


_compiled = _load_compiled()

if os.environ.get("FEIGEL_PURE_PYTHON", "") not in ("", "0") or _compiled is None:
    kernels = _kernels_py
else:
    kernels = _compiled

BACKEND = kernels.NAME


def available_backends():
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def get_backend(name=None):
    """Return the named backend module, or the active one for ``None``."""
    if name is None:
        return kernels
    backends = available_backends()
    if name not in backends:
        raise ValueError(f"backend {name!r} not available; have {sorted(backends)}")
    return backends[name]
