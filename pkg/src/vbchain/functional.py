"""Real-valued functionals on a finite state space."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError


@dataclass(frozen=True)
class Functional:
    h: np.ndarray
    mean: float
    centered: np.ndarray
    var_pi: float


def as_functional(h, pi) -> Functional:
    """Wrap the values ``h`` (or pass through a :class:`Functional`)."""
    pi = np.asarray(pi, dtype=float)
    if isinstance(h, Functional):
        if h.h.size != pi.size:
            raise DimensionMismatchError(f"functional has {h.h.size} states, kernel has {pi.size}")
        return h
    h = np.asarray(h, dtype=float)
    if h.shape != pi.shape:
        raise DimensionMismatchError(f"functional has shape {h.shape}, kernel has {pi.shape}")
    mean = float(pi @ h)
    c = h - mean
    # second pass removes the residual mean left by round-off
    c = c - float(pi @ c)
    return Functional(h=h, mean=mean, centered=c, var_pi=float(pi @ (c * c)))
