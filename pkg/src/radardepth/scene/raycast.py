"""Ray-cast backend selection: compiled kernel if built, NumPy fallback otherwise."""

from . import _raycast_py

try:
    from . import _raycast as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built; the fallback is functionally identical
    _impl = _raycast_py
    BACKEND = "python"

raycast_heightfield = _impl.raycast_heightfield
raycast_heightfield_py = _raycast_py.raycast_heightfield
