"""Kernel lane selection.

Imports the compiled libsodium-backed lane when available, otherwise the
pure-Python lane.  TAPESTRY_PURE=1 forces the pure lane (used by the
benchmark and the cross-lane equivalence tests).
"""

from __future__ import annotations

import os

if os.environ.get("TAPESTRY_PURE"):
    from tapestry import _pure as _impl
else:
    try:
        from tapestry import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        from tapestry import _pure as _impl  # type: ignore[no-redef]

LANE: str = _impl.LANE

KEY_BYTES: int = _impl.KEY_BYTES
NONCE_BYTES: int = _impl.NONCE_BYTES
MAC_BYTES: int = _impl.MAC_BYTES

secretbox_seal = _impl.secretbox_seal
secretbox_open = _impl.secretbox_open
pow_search = _impl.pow_search
token_material = _impl.token_material
