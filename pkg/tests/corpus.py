"""Fixed corpus of small graphs (at most 10 cells) with connector endpoint sets."""

from itertools import combinations

from confdimlab.approx import ApproxGraph
from confdimlab.modulus import CurveFamilySpec


def _graph(n, edges):
    return ApproxGraph.from_edges(n, edges)


def path(n):
    return _graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return _graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid(rows, cols, king=False):
    def vid(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1)))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c)))
            if king and r + 1 < rows:
                if c + 1 < cols:
                    edges.append((vid(r, c), vid(r + 1, c + 1)))
                if c > 0:
                    edges.append((vid(r, c), vid(r + 1, c - 1)))
    return _graph(rows * cols, edges)


def theta(lengths):
    """Two poles 0 and 1 joined by internally disjoint paths with the given
    numbers of interior vertices."""
    edges = []
    nxt = 2
    for k in lengths:
        prev = 0
        for _ in range(k):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
        edges.append((prev, 1))
    return _graph(nxt, edges)


def complete(n):
    return _graph(n, list(combinations(range(n), 2)))


def _cols(rows, cols, c):
    return [r * cols + c for r in range(rows)]


def corpus():
    """List of ``(name, graph, family)`` with 25 entries."""
    out = []
    for n in (2, 3, 5, 7):
        out.append((f"path{n}", path(n), CurveFamilySpec.connector([0], [n - 1])))
    for n in (4, 5, 6, 8):
        out.append((f"cycle{n}", cycle(n), CurveFamilySpec.connector([0], [n // 2])))
    out.append(("cycle6-arcs", cycle(6), CurveFamilySpec.connector([0, 1], [3, 4])))
    for rows, cols in ((2, 2), (2, 3), (3, 3), (2, 4), (2, 5)):
        out.append((f"grid{rows}x{cols}", grid(rows, cols),
                    CurveFamilySpec.connector(_cols(rows, cols, 0), _cols(rows, cols, cols - 1))))
    for rows, cols in ((2, 3), (3, 3), (3, 2)):
        out.append((f"king{rows}x{cols}", grid(rows, cols, king=True),
                    CurveFamilySpec.connector(_cols(rows, cols, 0), _cols(rows, cols, cols - 1))))
    for lengths in ((1, 1, 1), (1, 2, 3), (0, 2, 2), (2, 2, 4)):
        out.append((f"theta{''.join(map(str, lengths))}", theta(lengths), CurveFamilySpec.connector([0], [1])))
    out.append(("K4", complete(4), CurveFamilySpec.connector([0], [3])))
    out.append(("K5-sets", complete(5), CurveFamilySpec.connector([0, 1], [3, 4])))
    out.append(("path4-overlap", path(4), CurveFamilySpec.connector([0, 1], [1, 3])))
    out.append(("grid2x3-union", grid(2, 3), CurveFamilySpec.union([([0, 3], [2, 5]), ([0, 1, 2], [3, 4, 5])])))
    assert len(out) == 25 and all(g.n_cells <= 10 for _, g, _ in out)
    return out
