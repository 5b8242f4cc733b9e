"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
module takes over. Set ``UAPRIO_BACKEND=python`` to force the fallback.
"""
import os
from contextlib import contextmanager

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

kernels = _pykernels


def available() -> list[str]:
    return sorted(_BACKENDS)


def get(name: str):
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available; have {available()}") from None


def use(name: str):
    """Switch the process-wide backend and return the previous one's name."""
    global kernels
    previous = kernels.BACKEND
    kernels = get(name)
    return previous


@contextmanager
def using(name: str):
    """Temporarily switch the backend."""
    previous = use(name)
    try:
        yield kernels
    finally:
        use(previous)


def _initial() -> str:
    wanted = os.environ.get("UAPRIO_BACKEND", "").strip().lower()
    if wanted:
        return wanted
    return "cython" if _ckernels is not None else "python"


use(_initial())
