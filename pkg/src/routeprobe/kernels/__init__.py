"""Hot loops of the checker: bulk point classification and table stepping.

The compiled extension is used when it was built; otherwise the pure-Python
implementation is loaded. Setting ``ROUTEPROBE_PURE_PYTHON=1`` forces the
fallback. ``BACKEND`` names the implementation in use.
"""

import os

from . import _pykernels as python

compiled = None
if os.environ.get("ROUTEPROBE_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

classify_points = _impl.classify_points
run_table = _impl.run_table

__all__ = ["BACKEND", "classify_points", "run_table", "compiled", "python"]
