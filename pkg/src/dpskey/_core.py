"""Kernel selection.

Imports the compiled ``_kernels`` extension when it is built, otherwise the
numpy fallback in ``_pykernels``. Set ``DPSKEY_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _pykernels

if os.environ.get("DPSKEY_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "python"

kato_prime = _impl.kato_prime
kato_star = _impl.kato_star
ell_grid = _impl.ell_grid
