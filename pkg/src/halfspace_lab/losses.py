"""Margin losses: logistic, hinge, and a clamped logistic variant.

All functions accept scalars or numpy arrays of margins and are safe for
margins of any magnitude (no overflow in exp).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

__all__ = [
    "Logistic",
    "Hinge",
    "TruncatedLogistic",
    "LossKind",
    "loss_value",
    "loss_deriv",
]


@dataclass(frozen=True)
class Logistic:
    """log(1 + exp(-z))."""


@dataclass(frozen=True)
class Hinge:
    """max(-z, 0), with derivative -1 at z = 0."""


@dataclass(frozen=True)
class TruncatedLogistic:
    """Logistic loss clamped to its value at a negative threshold.

    Equals the logistic loss for z >= threshold and stays constant below
    it, which caps per-example loss (and kills the gradient) on extreme
    negative margins.
    """

    threshold: float

    def __post_init__(self):
        if not self.threshold < 0.0:
            raise ValueError("truncation threshold must be strictly negative")


LossKind = Logistic | Hinge | TruncatedLogistic


def loss_value(kind: LossKind, z):
    """Per-example loss at margin z; elementwise on arrays."""
    z = np.asarray(z, dtype=float)
    if isinstance(kind, Logistic):
        out = np.logaddexp(0.0, -z)
    elif isinstance(kind, Hinge):
        out = np.maximum(-z, 0.0)
    elif isinstance(kind, TruncatedLogistic):
        out = np.logaddexp(0.0, -np.maximum(z, kind.threshold))
    else:
        raise TypeError(f"unknown loss kind: {kind!r}")
    return out if out.ndim else float(out)


def loss_deriv(kind: LossKind, z):
    """Derivative of the loss at margin z; always in [-1, 0]."""
    z = np.asarray(z, dtype=float)
    if isinstance(kind, Logistic):
        out = -expit(-z)
    elif isinstance(kind, Hinge):
        out = np.where(z <= 0.0, -1.0, 0.0)
    elif isinstance(kind, TruncatedLogistic):
        out = np.where(z < kind.threshold, 0.0, -expit(-z))
    else:
        raise TypeError(f"unknown loss kind: {kind!r}")
    return out if out.ndim else float(out)
