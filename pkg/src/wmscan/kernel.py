"""Scan-kernel selection.

The compiled extension is used when importable; otherwise, or when the
environment variable ``WMSCAN_KERNEL=python`` is set, the pure-Python kernel
is used. Both expose ``NAME``, ``Prepared`` and ``run`` with identical
semantics.
"""

import os

from . import _kernel_py

try:
    from . import _kernel as _native
except ImportError:  # extension not built
    _native = None

KERNELS = {"python": _kernel_py}
if _native is not None:
    KERNELS["cython"] = _native

if os.environ.get("WMSCAN_KERNEL", "").lower() == "python" or _native is None:
    default = _kernel_py
else:
    default = _native

KERNEL_NAME = default.NAME


def get(name=None):
    if name is None:
        return default
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(
            f"kernel {name!r} unavailable; have {sorted(KERNELS)}"
        ) from None
