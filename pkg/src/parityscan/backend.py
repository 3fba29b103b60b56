"""Kernel selection.

``PARITYSCAN_BACKEND`` picks the implementation: ``compiled``, ``python``,
or ``auto`` (the default: compiled if the extension imports).
"""
from __future__ import annotations

import importlib
import os

_MODULES = {"compiled": "parityscan._kernels", "python": "parityscan._pykernels"}


def load(name: str | None = None):
    name = name or os.environ.get("PARITYSCAN_BACKEND", "auto")
    if name == "auto":
        try:
            return importlib.import_module(_MODULES["compiled"])
        except ImportError:
            return importlib.import_module(_MODULES["python"])
    if name not in _MODULES:
        raise ValueError(f"unknown backend {name!r}; choose from auto, compiled, python")
    return importlib.import_module(_MODULES[name])


def available() -> list[str]:
    out = []
    for name, mod in _MODULES.items():
        try:
            importlib.import_module(mod)
        except ImportError:
            continue
        out.append(name)
    return out


kernels = load()
