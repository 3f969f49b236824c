"""Vector geometry shared by every other module.

Feature vectors and weight vectors are plain 1-D numpy arrays of floats.
Labels are the integers -1 and +1.  Angles are reported in radians in
[0, pi].
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "angle_between",
    "project_ball",
    "project_halfspace",
    "sign_predict",
    "unit",
    "to_polar",
    "from_polar",
]


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite coordinates")
    return arr


def unit(v) -> np.ndarray:
    """Normalize v to unit length; zero vectors are rejected."""
    arr = _as_vector(v)
    n = float(np.linalg.norm(arr))
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return arr / n


def angle_between(u, v) -> float:
    """Angle in [0, pi] between two nonzero vectors.

    Computed from the chord length of the normalized vectors rather than
    arccos of the inner product, so that angles near 0 keep full relative
    precision (arccos loses half the significant digits there).
    """
    un = unit(u)
    vn = unit(v)
    if float(np.dot(un, vn)) >= 0.0:
        chord = float(np.linalg.norm(un - vn))
        return 2.0 * math.asin(min(1.0, 0.5 * chord))
    chord = float(np.linalg.norm(un + vn))
    return math.pi - 2.0 * math.asin(min(1.0, 0.5 * chord))


def project_ball(w, radius: float) -> np.ndarray:
    """Euclidean projection of w onto the ball of the given radius."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    arr = _as_vector(w)
    n = float(np.linalg.norm(arr))
    if n <= radius:
        return arr
    return arr * (radius / n)


def project_halfspace(w, v) -> np.ndarray:
    """Euclidean projection of w onto {x : <x, v> >= 1} for unit v."""
    arr = _as_vector(w)
    vn = _as_vector(v)
    if abs(float(np.linalg.norm(vn)) - 1.0) > 1e-12:
        raise ValueError("anchor direction must be a unit vector")
    dot = float(np.dot(arr, vn))
    if dot >= 1.0:
        return arr
    return arr + (1.0 - dot) * vn


def sign_predict(w, x) -> int:
    """Predicted label sign(<w, x>), with sign(0) := +1."""
    warr = _as_vector(w)
    xarr = _as_vector(x)
    if warr.shape != xarr.shape:
        raise ValueError("dimension mismatch between weights and features")
    return 1 if float(np.dot(warr, xarr)) >= 0.0 else -1


def to_polar(w) -> tuple[float, float]:
    """(radius, angle) of a 2-D vector, angle in (-pi, pi]."""
    arr = _as_vector(w)
    if arr.shape != (2,):
        raise ValueError("polar form is defined for 2-D vectors only")
    r = float(np.hypot(arr[0], arr[1]))
    theta = float(math.atan2(arr[1], arr[0]))
    if theta <= -math.pi:
        theta = math.pi
    return r, theta


def from_polar(r: float, theta: float) -> np.ndarray:
    return np.array([r * math.cos(theta), r * math.sin(theta)])
