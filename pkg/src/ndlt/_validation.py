"""Small argument checks shared across modules."""
import numbers

import numpy as np

MANIFOLDS = ("s2", "so3")


def check_manifold(manifold):
    manifold = str(manifold).lower()
    if manifold not in MANIFOLDS:
        raise ValueError(f"manifold must be one of {MANIFOLDS}, got {manifold!r}")
    return manifold


def check_int(value, name, minimum=None):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_complex_2d(data, name="data"):
    """Return ``data`` as a 2-D complex array, promoting 1-D input to one channel."""
    arr = np.asarray(data)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if arr.dtype == np.complex64 or arr.dtype == np.float32:
        return arr.astype(np.complex64, copy=False)
    return arr.astype(np.complex128, copy=False)


def real_dtype(dtype):
    return np.float32 if np.dtype(dtype) in (np.dtype(np.complex64), np.dtype(np.float32)) else np.float64
