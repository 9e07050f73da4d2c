"""Finite metric spaces, marked subsets and relative distance.

Sets are finite samples of closed sets, so ``dist(A, B)`` is the minimum
over point pairs and ``diam A`` the maximum.  Point ids are the dense
integers ``0..n-1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import EmptySet, NotAMetric, ParseError, SingleSet, ZeroDiameter

TRIANGLE_RTOL = 1e-9
MAX_VALIDATED_POINTS = 5000


class FiniteMetricSpace:
    """A finite metric space stored as a dense distance matrix.

    Built either from Euclidean coordinates (``from_points``) or from an
    explicit matrix (``from_matrix``), which is checked for symmetry,
    positivity and the triangle inequality when it has at most
    ``MAX_VALIDATED_POINTS`` points.
    """

    def __init__(self, dist, coords=None, *, validate=True):
        D = np.array(dist, dtype=np.float64)
        if D.ndim != 2 or D.shape[0] != D.shape[1]:
            raise NotAMetric("distance matrix must be square")
        if D.shape[0] == 0:
            raise EmptySet("metric space has no points")
        if validate:
            _validate_metric(D)
        D.setflags(write=False)
        self.dist = D
        self.coords = None if coords is None else np.asarray(coords, dtype=np.float64)
        self.diam = float(D.max())

    @classmethod
    def from_points(cls, points):
        X = np.asarray(points, dtype=np.float64)
        if X.ndim != 2:
            raise ParseError("points must be an (n, d) array")
        diff = X[:, None, :] - X[None, :, :]
        D = np.sqrt((diff * diff).sum(axis=-1))
        if X.shape[0] > 1:
            off = D[~np.eye(X.shape[0], dtype=bool)]
            if off.min() <= 0:
                i, j = np.argwhere((D <= 0) & ~np.eye(X.shape[0], dtype=bool))[0]
                raise NotAMetric(f"points {i} and {j} coincide", witness=(int(i), int(j)))
        # Euclidean distances satisfy the triangle inequality by construction
        return cls(D, coords=X, validate=False)

    @classmethod
    def from_matrix(cls, dist, validate=True):
        return cls(dist, validate=validate)

    @classmethod
    def from_json(cls, source):
        data = _load_json(source)
        if "points" in data:
            return cls.from_points(data["points"])
        if "n" in data and "dist" in data:
            n = int(data["n"])
            vals = np.asarray(data["dist"], dtype=np.float64)
            D = np.zeros((n, n))
            if len(vals) == n * (n - 1) // 2:
                iu = np.triu_indices(n, k=1)
            elif len(vals) == n * (n + 1) // 2:
                iu = np.triu_indices(n, k=0)
            else:
                raise ParseError(
                    f"dist has {len(vals)} entries; expected {n * (n - 1) // 2} "
                    f"(strict upper triangle) or {n * (n + 1) // 2}"
                )
            D[iu] = vals
            D = np.maximum(D, D.T)
            return cls.from_matrix(D)
        raise ParseError('metric JSON needs "points" or "n"+"dist"')

    def to_json(self):
        if self.coords is not None:
            return {"points": self.coords.tolist()}
        iu = np.triu_indices(self.n, k=1)
        return {"n": self.n, "dist": self.dist[iu].tolist()}

    @property
    def n(self):
        return self.dist.shape[0]

    def scaled(self, factor):
        """Copy with every distance multiplied by ``factor`` > 0."""
        coords = None if self.coords is None else self.coords * factor
        return FiniteMetricSpace(self.dist * factor, coords=coords, validate=False)

    def set_diameter(self, ids):
        ids = _as_ids(ids, self.n)
        return float(self.dist[np.ix_(ids, ids)].max())

    def set_distance(self, A, B):
        A = _as_ids(A, self.n)
        B = _as_ids(B, self.n)
        return float(self.dist[np.ix_(A, B)].min())

    def distance_to_set(self, ids):
        """Distance from every point to the set ``ids``."""
        ids = _as_ids(ids, self.n)
        return self.dist[:, ids].min(axis=1)


def _validate_metric(D):
    n = D.shape[0]
    if not np.all(np.isfinite(D)):
        raise NotAMetric("distances must be finite")
    if np.any(np.diag(D) != 0):
        i = int(np.flatnonzero(np.diag(D) != 0)[0])
        raise NotAMetric(f"dist({i},{i}) != 0", witness=(i, i))
    if not np.array_equal(D, D.T):
        i, j = np.argwhere(D != D.T)[0]
        raise NotAMetric(f"dist not symmetric at ({i},{j})", witness=(int(i), int(j)))
    off = ~np.eye(n, dtype=bool)
    if n > 1 and D[off].min() <= 0:
        i, j = np.argwhere((D <= 0) & off)[0]
        raise NotAMetric(f"distinct points {i},{j} at distance 0", witness=(int(i), int(j)))
    if n <= MAX_VALIDATED_POINTS:
        i, j, k, excess = _kernels.triangle_violation(D, TRIANGLE_RTOL)
        if i >= 0:
            raise NotAMetric(
                f"triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j}) by {excess:.3g}",
                witness=(int(i), int(j), int(k)),
            )


def _load_json(source):
    if isinstance(source, dict):
        return source
    try:
        text = Path(source).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {source}: {exc}") from exc


def _as_ids(ids, n):
    arr = np.asarray(sorted(set(int(i) for i in ids)), dtype=np.int64)
    if arr.size == 0:
        raise EmptySet("empty point set")
    if arr[0] < 0 or arr[-1] >= n:
        raise ParseError(f"point id out of range [0, {n})")
    return arr


@dataclass
class SetCollection:
    """Marked subsets of one metric space, with cached diameters."""

    space: FiniteMetricSpace
    sets: list = field(default_factory=list)
    diameters: list = field(init=False)

    def __post_init__(self):
        self.sets = [_as_ids(s, self.space.n) for s in self.sets]
        self.diameters = [self.space.set_diameter(s) for s in self.sets]

    @classmethod
    def from_json(cls, space, source):
        data = _load_json(source)
        if "sets" not in data:
            raise ParseError('set JSON needs "sets"')
        return cls(space, [list(s) for s in data["sets"]])

    def to_json(self):
        return {"sets": [s.tolist() for s in self.sets]}

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


def relative_distance(A, B, space):
    """dist(A, B) / min(diam A, diam B).

    Overlapping sets give 0.  Raises ``ZeroDiameter`` for singletons.
    """
    A = _as_ids(A, space.n)
    B = _as_ids(B, space.n)
    dA = space.set_diameter(A)
    dB = space.set_diameter(B)
    if dA == 0 or dB == 0:
        raise ZeroDiameter("relative distance needs sets of positive diameter")
    return space.set_distance(A, B) / min(dA, dB)


def min_pairwise_separation(c: SetCollection):
    """Minimum relative distance over unordered pairs of the collection."""
    if len(c) < 2:
        raise SingleSet("need at least two sets")
    for s, d in zip(c.sets, c.diameters):
        if d == 0:
            raise ZeroDiameter(f"set {s.tolist()} has zero diameter")
    D = c.space.dist
    best = math.inf
    for a in range(len(c)):
        A = c.sets[a]
        for b in range(a + 1, len(c)):
            B = c.sets[b]
            val = D[np.ix_(A, B)].min() / min(c.diameters[a], c.diameters[b])
            best = min(best, float(val))
    return best


def rescale_to_unit_diameter(space):
    """Return ``(space / diam, diam)``; relative distances are unchanged."""
    if space.diam == 0:
        raise ZeroDiameter("all points coincide")
    if space.diam == 1.0:
        return space, 1.0
    diam = space.diam
    coords = None if space.coords is None else space.coords / diam
    # dividing (not multiplying by 1/diam) keeps the new diameter exactly 1.0
    return FiniteMetricSpace(space.dist / diam, coords=coords, validate=False), diam
