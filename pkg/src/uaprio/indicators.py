"""Hypervolume, IGD and per-cell reference fronts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _backend
from .objectives import Direction


class ConfigurationError(ValueError):
    pass


def _signs(directions: Sequence) -> np.ndarray:
    return np.array([1.0 if Direction(d) is Direction.MINIMIZE else -1.0 for d in directions])


def nondominated(points, directions) -> np.ndarray:
    """Distinct nondominated rows of ``points`` in lexicographic order."""
    P = np.asarray(points, dtype=np.float64)
    if P.size == 0:
        return P.reshape(0, len(directions))
    P = np.unique(P, axis=0)
    rank = _backend.kernels.nondominated_rank(np.ascontiguousarray(P * _signs(directions)))
    return P[rank == 0]


@dataclass(frozen=True)
class ReferenceFront:
    points: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    directions: tuple

    @classmethod
    def from_fronts(cls, fronts: Iterable, directions) -> "ReferenceFront":
        """Nondominated union of ``fronts``; bounds span the whole union."""
        directions = tuple(Direction(d) for d in directions)
        blocks = [np.asarray(f, dtype=np.float64).reshape(-1, len(directions)) for f in fronts]
        union = np.vstack(blocks) if blocks else np.zeros((0, len(directions)))
        if len(union) == 0:
            raise ConfigurationError("cannot build a reference front from no points")
        return cls(nondominated(union, directions), union.min(axis=0), union.max(axis=0),
                   directions)

    def normalize(self, points) -> np.ndarray:
        return normalize(points, (self.lower, self.upper), self.directions)


def normalize(points, bounds, directions) -> np.ndarray:
    """Map into the unit cube with every objective minimized.

    A constant objective (hi == lo) maps to 0 for all points.
    """
    P = np.asarray(points, dtype=np.float64)
    lo, hi = (np.asarray(b, dtype=np.float64) for b in bounds)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("normalization bounds must be finite")
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    scaled = (P - lo) / safe
    maximize = np.array([Direction(d) is Direction.MAXIMIZE for d in directions])
    scaled = np.where(maximize, 1.0 - scaled, scaled)
    return np.where(span > 0, scaled, 0.0)


def hypervolume(points, reference=None) -> float:
    """Exact hypervolume of a normalized, minimized front."""
    P = np.asarray(points, dtype=np.float64)
    if P.size == 0:
        return 0.0
    P = P.reshape(len(P), -1)
    if np.any(P < 0.0) or np.any(P > 1.0):
        raise ValueError("hypervolume expects points inside the unit cube")
    ref = np.ones(P.shape[1]) if reference is None else np.asarray(reference, dtype=np.float64)
    return float(_backend.kernels.hypervolume(np.ascontiguousarray(P), ref))


def igd(points, reference) -> float:
    """Mean distance from each reference point to its nearest front point."""
    R = np.asarray(reference, dtype=np.float64)
    P = np.asarray(points, dtype=np.float64)
    if R.size == 0:
        raise ConfigurationError("IGD needs a non-empty reference front")
    if P.size == 0:
        raise ValueError("IGD needs a non-empty front")
    R = R.reshape(len(R), -1)
    P = P.reshape(len(P), -1)
    d = np.sqrt(((R[:, None, :] - P[None, :, :]) ** 2).sum(axis=2))
    return float(d.min(axis=1).mean())
