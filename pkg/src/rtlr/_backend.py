"""Kernel backend selection.

The compiled ``_ccore`` extension is used when importable; otherwise, or when
``RTLR_BACKEND=python`` is set, the pure-Python ``_pycore`` is used.
"""

import os

from . import _pycore

pycore = _pycore

if os.environ.get("RTLR_BACKEND", "").lower() == "python":
    core = _pycore
else:
    try:
        from . import _ccore as core
    except ImportError:  # extension not built
        core = _pycore

BACKEND = core.BACKEND
