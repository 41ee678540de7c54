"""Hot-kernel backend selection.

The compiled Cython extension is preferred; the pure-Python module is the
drop-in fallback.  Set SPECTRAL_POISSON_PURE=1 to force the fallback (used by
the benchmark and the backend-equivalence tests).
"""
import os

if os.environ.get("SPECTRAL_POISSON_PURE", "0") not in ("", "0"):
    from . import _pure as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

from . import _pure as pure_impl

BACKEND = _impl.BACKEND
monodromy_propagate = _impl.monodromy_propagate
peakon_flow_steps = _impl.peakon_flow_steps
toda_flow_steps = _impl.toda_flow_steps


def load_backend(name):
    """Return the kernel module for `name` in {'compiled', 'pure'}; None if absent."""
    if name == "pure":
        return pure_impl
    if name == "compiled":
        try:
            from . import _core
        except ImportError:
            return None
        return _core
    raise ValueError(f"unknown backend {name!r}")
