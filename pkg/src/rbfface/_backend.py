"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback is used when it is
missing or when ``RBFFACE_BACKEND=python`` is set in the environment.
"""

import os

from . import _pykernels

NAME = "python"
kernels = _pykernels

if os.environ.get("RBFFACE_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        kernels = _ckernels
        NAME = "cython"


def available():
    """Return a dict of every importable backend, keyed by name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        return found
    found["cython"] = _ckernels
    return found
