"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy fallback.
Set ``ELASTICAST_BACKEND=python`` before import to force the fallback, or call
:func:`use` at runtime (the benchmark does this).
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

kernels = _ckernels if _ckernels is not None else _pykernels
if os.environ.get("ELASTICAST_BACKEND") == "python":
    kernels = _pykernels


def available() -> list[str]:
    return sorted(_BACKENDS)


def name() -> str:
    return "compiled" if kernels is _ckernels and _ckernels is not None else "python"


def use(backend: str) -> None:
    global kernels
    try:
        kernels = _BACKENDS[backend]
    except KeyError:
        raise ValueError(f"backend {backend!r} not available; have {available()}") from None


def get():
    return kernels
