"""Kernel backend selection and the worker-thread budget.

The compiled extension is preferred; the numpy/scipy fallback is used when
the extension is missing or ``RPC_BACKEND=python`` is set.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS: dict[str, ModuleType] = {"python": _fallback}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def _default_name() -> str:
    requested = os.environ.get("RPC_BACKEND", "").strip().lower()
    if requested:
        if requested not in _BACKENDS:
            raise ImportError(
                f"RPC_BACKEND={requested!r} is not available (have {available_backends()})"
            )
        return requested
    return "compiled" if _compiled is not None else "python"


kernels: ModuleType = _BACKENDS[_default_name()]


def get_kernels(name: str | None = None) -> ModuleType:
    if name is None:
        return kernels
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}") from None


def set_backend(name: str) -> None:
    global kernels
    kernels = get_kernels(name)


def backend_name() -> str:
    return kernels.BACKEND_NAME


_thread_override: int | None = None


def set_num_threads(n: int | None) -> None:
    """Set the process-wide worker budget (None restores env/hardware default)."""
    global _thread_override
    if n is not None and n < 1:
        raise ValueError("thread count must be >= 1")
    _thread_override = n


def get_num_threads() -> int:
    # explicit setting > RPC_THREADS > hardware
    if _thread_override is not None:
        return _thread_override
    env = os.environ.get("RPC_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"RPC_THREADS must be a positive integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"RPC_THREADS must be a positive integer, got {env!r}")
        return value
    return os.cpu_count() or 1
