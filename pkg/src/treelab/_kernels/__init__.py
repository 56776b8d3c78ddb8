"""Hot-kernel dispatch: compiled extension when available, numpy fallback otherwise.

Set ``TREELAB_PURE=1`` to force the pure-Python implementation.
"""

import os

from . import _fallback

if os.environ.get("TREELAB_PURE") == "1":
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

IMPLEMENTATION = _impl.IMPLEMENTATION
expansion_tuple_tables = _impl.expansion_tuple_tables
hopcroft_karp = _impl.hopcroft_karp

__all__ = ["IMPLEMENTATION", "expansion_tuple_tables", "hopcroft_karp"]
