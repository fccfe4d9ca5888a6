"""Hot-loop kernels, compiled when available.

The Cython extension ``_ckernels`` is used if it was built; otherwise the
pure-Python ``_pykernels`` takes over with identical results. Set
``TOYLOCAL_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from toylocal import _pykernels

_impl: ModuleType = _pykernels
BACKEND = "python"

if not os.environ.get("TOYLOCAL_PURE_PYTHON"):
    try:
        from toylocal import _ckernels  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        _impl = _ckernels
        BACKEND = "cython"

COLUMN_OK = _pykernels.COLUMN_OK
DUPLICATE_ROW = _pykernels.DUPLICATE_ROW
SINGLE_VALUED = _pykernels.SINGLE_VALUED
BELOW_QUARTER = _pykernels.BELOW_QUARTER
TABLE_OK = _pykernels.TABLE_OK
TABLE_OVERLAP = _pykernels.TABLE_OVERLAP
TABLE_MISSING = _pykernels.TABLE_MISSING
TELEPORT_FIELDS = _pykernels.TELEPORT_FIELDS


def available_backends() -> dict[str, ModuleType]:
    found = {"python": _pykernels}
    try:
        from toylocal import _ckernels  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found


def encode_rows(rows):
    return _impl.encode_rows(rows)


def column_check(rows):
    return _impl.column_check(rows)


def outcome_table(codes, labels, n_states):
    return _impl.outcome_table(codes, labels, n_states)


def teleport_batch(key, trials):
    return _impl.teleport_batch(key, trials)
