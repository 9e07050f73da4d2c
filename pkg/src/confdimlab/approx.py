"""Graph approximations of compact spaces at a given scale.

Cells are squares; two cells are adjacent when their closed squares
intersect, so corner contacts count.  Cell ids are dense integers in
row-major order of the cell's (row, col) position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from .errors import LevelTooLarge, ParseError, ValidationError

MAX_GRID_LEVEL = 14
MAX_CARPET_LEVEL = 6


@dataclass
class ApproxGraph:
    level: int
    scale: float
    kappa: float
    n_cells: int
    edges: np.ndarray
    centers: np.ndarray | None = None
    addresses: list | None = None
    space_tag: str = "custom"
    validation: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if np.any(e[:, 0] == e[:, 1]):
                i = int(e[e[:, 0] == e[:, 1]][0, 0])
                raise ValidationError(f"self-loop at cell {i}", witness=(i, i))
            if e.min() < 0 or e.max() >= self.n_cells:
                raise ValidationError("edge endpoint out of range")
            e = np.sort(e, axis=1)
            e = np.unique(e, axis=0)
        self.edges = e
        both = np.concatenate([e, e[:, ::-1]]) if e.size else np.zeros((0, 2), dtype=np.int64)
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        self.indptr = np.zeros(self.n_cells + 1, dtype=np.int64)
        np.add.at(self.indptr, both[:, 0] + 1, 1)
        self.indptr = np.cumsum(self.indptr)
        self.indices = np.ascontiguousarray(both[:, 1])

    @classmethod
    def from_edges(cls, n_cells, edges, **kw):
        kw.setdefault("level", 0)
        kw.setdefault("scale", 1.0)
        kw.setdefault("kappa", 1.0)
        return cls(n_cells=n_cells, edges=np.asarray(list(edges), dtype=np.int64).reshape(-1, 2), **kw)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self):
        return np.diff(self.indptr)

    def is_connected(self):
        seen = np.zeros(self.n_cells, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for x in self.neighbors(v):
                if not seen[x]:
                    seen[x] = True
                    stack.append(int(x))
        return bool(seen.all())

    def to_json(self):
        cells = []
        for i in range(self.n_cells):
            cell = {"id": i}
            if self.centers is not None:
                cell["center"] = self.centers[i].tolist()
            if self.addresses is not None:
                cell["address"] = self.addresses[i]
            cells.append(cell)
        return {
            "level": self.level,
            "scale": self.scale,
            "kappa": self.kappa,
            "cells": cells,
            "edges": self.edges.tolist(),
        }

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_json()))

    def __eq__(self, other):
        if not isinstance(other, ApproxGraph):
            return NotImplemented
        same_centers = (self.centers is None and other.centers is None) or (
            self.centers is not None and other.centers is not None and np.array_equal(self.centers, other.centers)
        )
        return (
            self.level == other.level
            and self.scale == other.scale
            and self.kappa == other.kappa
            and self.n_cells == other.n_cells
            and np.array_equal(self.edges, other.edges)
            and same_centers
            and self.addresses == other.addresses
        )


def _king_edges(ix, iy, side):
    """Edges between present cells whose closed squares meet."""
    lookup = np.full((side, side), -1, dtype=np.int64)
    ids = np.arange(len(ix), dtype=np.int64)
    lookup[iy, ix] = ids
    out = []
    for dx, dy in ((1, 0), (0, 1), (1, 1), (-1, 1)):
        jx = ix + dx
        jy = iy + dy
        ok = (jx >= 0) & (jx < side) & (jy < side)
        nb = np.full(len(ix), -1, dtype=np.int64)
        nb[ok] = lookup[jy[ok], jx[ok]]
        keep = nb >= 0
        out.append(np.stack([ids[keep], nb[keep]], axis=1))
    return np.concatenate(out) if out else np.zeros((0, 2), dtype=np.int64)


def _addresses(ix, iy, level, base, digit):
    if level == 0:
        return [""] * len(ix)
    cols = []
    for j in range(level - 1, -1, -1):
        cols.append(digit((ix // base**j) % base, (iy // base**j) % base))
    chars = (np.stack(cols, axis=1) + ord("0")).astype(np.uint8)
    return [s.decode() for s in np.ascontiguousarray(chars).view(f"S{level}").ravel()]


def grid_approximation(k):
    """Dyadic squares of side 2**-k tiling the unit square (kappa = 2)."""
    if not 0 <= k <= MAX_GRID_LEVEL:
        raise LevelTooLarge(f"grid level must lie in [0, {MAX_GRID_LEVEL}]")
    side = 2**k
    iy, ix = np.divmod(np.arange(side * side, dtype=np.int64), side)
    s = 1.0 / side
    centers = np.stack([(ix + 0.5) * s, (iy + 0.5) * s], axis=1)
    return ApproxGraph(
        level=k,
        scale=s,
        kappa=2.0,
        n_cells=side * side,
        edges=_king_edges(ix, iy, side),
        centers=centers,
        addresses=_addresses(ix, iy, k, 2, lambda dx, dy: 2 * dy + dx),
        space_tag="grid",
    )


def carpet_approximation(k):
    """Level-k cells of the square Sierpinski carpet: 8**k squares of side 3**-k."""
    if not 0 <= k <= MAX_CARPET_LEVEL:
        raise LevelTooLarge(f"carpet level must lie in [0, {MAX_CARPET_LEVEL}]")
    side = 3**k
    iy, ix = np.divmod(np.arange(side * side, dtype=np.int64), side)
    keep = np.ones(side * side, dtype=bool)
    for j in range(k):
        keep &= ~(((ix // 3**j) % 3 == 1) & ((iy // 3**j) % 3 == 1))
    ix, iy = ix[keep], iy[keep]
    s = 1.0 / side
    centers = np.stack([(ix + 0.5) * s, (iy + 0.5) * s], axis=1)
    return ApproxGraph(
        level=k,
        scale=s,
        kappa=2.0,
        n_cells=len(ix),
        edges=_king_edges(ix, iy, side),
        centers=centers,
        addresses=_addresses(ix, iy, k, 3, lambda dx, dy: 3 * dy + dx),
        space_tag="carpet",
    )


GENERATORS = {"grid": grid_approximation, "carpet": carpet_approximation}


def generate(space_tag, k):
    try:
        return GENERATORS[space_tag](k)
    except KeyError:
        raise ParseError(f"unknown space {space_tag!r}; expected one of {sorted(GENERATORS)}") from None


def validate_approximation(g: ApproxGraph):
    """Check the inner-ball disjointness condition on cell centers.

    Returns a report dict; raises ``ValidationError`` with the offending
    pair when two inner balls of radius ``scale / kappa`` overlap.
    """
    report = {"cells": g.n_cells, "edges": int(len(g.edges)), "inner_balls_disjoint": None}
    if g.centers is None or g.n_cells < 2:
        return report
    r = g.scale / g.kappa
    tree = cKDTree(g.centers)
    pairs = tree.query_pairs(2.0 * r * (1.0 - 1e-9), output_type="ndarray")
    if len(pairs):
        pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
        i, j = (int(x) for x in pairs[0])
        raise ValidationError(f"inner balls of cells {i} and {j} overlap", witness=(i, j))
    report["inner_balls_disjoint"] = True
    return report


def load_approximation(source):
    """Parse and validate a graph from a JSON file path or dict."""
    if isinstance(source, dict):
        data = source
    else:
        try:
            data = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read {source}: {exc}") from exc
    try:
        cells = sorted(data["cells"], key=lambda c: c["id"])
        ids = [int(c["id"]) for c in cells]
        if ids != list(range(len(ids))):
            raise ParseError("cell ids must be 0..N-1")
        centers = None
        if all("center" in c for c in cells) and cells:
            centers = np.asarray([c["center"] for c in cells], dtype=np.float64)
        addresses = [c["address"] for c in cells] if all("address" in c for c in cells) and cells else None
        g = ApproxGraph(
            level=int(data["level"]),
            scale=float(data["scale"]),
            kappa=float(data["kappa"]),
            n_cells=len(cells),
            edges=np.asarray(data.get("edges", []), dtype=np.int64).reshape(-1, 2),
            centers=centers,
            addresses=addresses,
            space_tag=str(data.get("space_tag", "file")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (ParseError, ValidationError)):
            raise
        raise ParseError(f"malformed approximation JSON: {exc}") from exc
    g.validation = validate_approximation(g)
    return g
