"""Closed-form critical exponents and conformal-dimension bounds.

Everything here is a pure function of small integer parameters or of a
labelled graph; the only iterative piece is the bisection that solves
the building dimension equation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from scipy.special import expit

from .errors import BadParams, Inapplicable, NoRoot, ParseError

BUILDING_RESIDUAL_TOL = 1e-12
CUBE_LINK_EXTRA = math.log(15.0)


def _check_int(name, value, low):
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadParams(f"{name} must be an integer, got {value!r}")
    if value < low:
        raise BadParams(f"{name} must be >= {low}, got {value}")


def elementary_exponent(m, k):
    """Critical exponent ``1 + ln(k-1)/ln(m-1)`` of the regular elementary complex."""
    _check_int("m", m, 3)
    _check_int("k", k, 2)
    return 1.0 + math.log(k - 1) / math.log(m - 1)


def elementary_exponent_interval(m1, m2, k1, k2):
    """Range of critical exponents for perimeters in [2*m1, 2*m2] and thicknesses in [k1, k2]."""
    _check_int("m1", m1, 3)
    _check_int("m2", m2, m1)
    _check_int("k1", k1, 2)
    _check_int("k2", k2, k1)
    low = 1.0 + math.log(k1 - 1) / math.log(m2 - 1)
    high = 1.0 + math.log(k2 - 1) / math.log(m1 - 1)
    return low, high


def building_equation(x, m, k, l):
    """``((k-1)^x + (l-1)^x) / ((1+(k-1)^x)(1+(l-1)^x)) - 1/m``.

    Written with logistic functions, ``a/(1+a) = expit(x ln a)``, so it
    neither overflows for large ``x`` nor loses the small tail.
    """
    sa = expit(x * math.log(k - 1))
    sb = expit(x * math.log(l - 1))
    return float(sa * (1.0 - sb) + sb * (1.0 - sa)) - 1.0 / m


def building_confdim(m, k, l):
    """Solve the building dimension equation for ``x > 0``.

    Returns ``(1 + 1/x, x, residual)``.  The left side equals ``1/2 > 1/m``
    at ``x = 0`` and decreases to 0, so doubling an upper bracket always
    finds a sign change.
    """
    _check_int("m", m, 3)
    _check_int("k", k, 3)
    _check_int("l", l, 3)
    lo, hi = 0.0, 1.0
    while building_equation(hi, m, k, l) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            raise NoRoot(f"no sign change for (m, k, l) = ({m}, {k}, {l})")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if building_equation(mid, m, k, l) > 0:
            lo = mid
        else:
            hi = mid
    x = min((lo, hi), key=lambda t: abs(building_equation(t, m, k, l)))
    residual = abs(building_equation(x, m, k, l))
    if not x > 0 or residual >= BUILDING_RESIDUAL_TOL:
        raise NoRoot(f"bisection stalled with residual {residual:.3g}")
    return 1.0 + 1.0 / x, x, residual


def symmetric_building_confdim(m, k):
    """Closed form for ``k == l``: ``(k-1)^x = (m-1) + sqrt((m-1)^2 - 1)``."""
    _check_int("m", m, 3)
    _check_int("k", k, 3)
    root = (m - 1) + math.sqrt((m - 1) ** 2 - 1)
    return 1.0 + math.log(k - 1) / math.log(root)


def hausdorff_visual_lower(m, k):
    """Hausdorff dimension of the visual metric from the right-angled regular 2m-gon.

    The side length solves ``cosh(a/2) = sqrt(2) cos(pi/(2m))`` and the area
    is ``(m-2) pi``, giving ``1 + (2m a / ((m-2) pi)) ln(k-1)``.
    """
    _check_int("m", m, 3)
    _check_int("k", k, 2)
    a = polygon_side(m)
    return 1.0 + (2 * m * a / ((m - 2) * math.pi)) * math.log(k - 1)


def polygon_side(m):
    """Side of the regular right-angled hyperbolic 2m-gon."""
    _check_int("m", m, 3)
    return 2.0 * math.acosh(math.sqrt(2.0) * math.cos(math.pi / (2 * m)))


# -- bound reports --------------------------------------------------------------


@dataclass
class Hypothesis:
    name: str
    passed: bool
    witness: object = None

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class BoundReport:
    """Upper bound (or bracket) with the hypotheses that were checked.

    ``value`` is ``None`` exactly when ``applicable`` is false.
    """

    value: float | None
    rule: str
    hypotheses: list = field(default_factory=list)
    applicable: bool = False
    witness: object = None
    candidates: dict = field(default_factory=dict)
    bracket: tuple | None = None
    caveat: str | None = None

    def to_dict(self):
        out = {
            "value": self.value,
            "rule": self.rule,
            "applicable": self.applicable,
            "hypotheses": [h.to_dict() for h in self.hypotheses],
            "candidates": self.candidates,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.bracket is not None:
            out["bracket"] = list(self.bracket)
        if self.caveat is not None:
            out["caveat"] = self.caveat
        return out


@dataclass
class CoxeterGraph:
    """Defining graph of a Coxeter group.

    Edges join the generator pairs with finite label ``m_st >= 2``; pairs
    with an infinite label are not edges and are kept in
    ``infinite_pairs`` for reporting only.
    """

    vertices: list
    labels: dict
    infinite_pairs: list = field(default_factory=list)

    def __post_init__(self):
        vs = list(self.vertices)
        if len(set(vs)) != len(vs):
            raise ParseError("duplicate vertex ids")
        known = set(vs)
        clean = {}
        for (s, t), m in self.labels.items():
            if s == t:
                raise ParseError(f"loop at vertex {s}")
            if s not in known or t not in known:
                raise ParseError(f"edge ({s}, {t}) uses an unknown vertex")
            key = (min(s, t), max(s, t))
            if key in clean:
                raise ParseError(f"duplicate edge {key}")
            if isinstance(m, bool) or not isinstance(m, int) or m < 2:
                raise ParseError(f"label on {key} must be an integer >= 2, got {m!r}")
            clean[key] = m
        self.vertices = sorted(vs)
        self.labels = dict(sorted(clean.items()))
        self.adj = {v: set() for v in self.vertices}
        for s, t in self.labels:
            self.adj[s].add(t)
            self.adj[t].add(s)

    @classmethod
    def from_labels(cls, vertices, labels):
        """Accept ``math.inf`` labels; those pairs are dropped from the edge set."""
        finite, infinite = {}, []
        for (s, t), m in labels.items():
            if m == math.inf:
                infinite.append((min(s, t), max(s, t)))
            else:
                finite[(s, t)] = m
        return cls(list(vertices), finite, sorted(infinite))

    @classmethod
    def from_json(cls, source):
        if isinstance(source, dict):
            data = source
        else:
            try:
                data = json.loads(Path(source).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ParseError(f"cannot read {source}: {exc}") from exc
        try:
            vertices = list(data["vertices"])
            labels = {}
            for e in data.get("edges", []):
                labels[(e["s"], e["t"])] = e["m"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed Coxeter graph JSON: {exc}") from exc
        return cls(vertices, labels)

    def to_json(self):
        return {
            "vertices": self.vertices,
            "edges": [{"s": s, "t": t, "m": m} for (s, t), m in self.labels.items()],
        }

    def valence(self, v):
        return len(self.adj[v])

    def label(self, s, t):
        return self.labels[(min(s, t), max(s, t))]

    def triangles(self):
        """All 3-circuits ``(a, b, c)`` with ``a < b < c``."""
        out = []
        for a in self.vertices:
            for b, c in combinations(sorted(x for x in self.adj[a] if x > a), 2):
                if c in self.adj[b]:
                    out.append((a, b, c))
        return out

    def vertex_triangle(self, v):
        for b, c in combinations(sorted(self.adj[v]), 2):
            if c in self.adj[b]:
                return tuple(sorted((v, b, c)))
        return None


def _ratio_bound(k_minus_1, denom):
    return 1.0 + math.log(k_minus_1) / math.log(denom)


def coxeter_global_bound(g: CoxeterGraph):
    """Upper bound from the minimal label and the maximal valence.

    Case "triangle-free": min label ``m >= 3`` and no 3-circuit gives
    ``1 + ln(k-1)/ln(2m-3)``.  Case "large-labels": ``m >= 4`` gives
    ``1 + ln(k-1)/ln(2m-5)``.  ``k`` is the maximal valence over all
    vertices, floored at 2.
    """
    if not g.vertices:
        raise BadParams("Coxeter graph has no vertices")
    k = max(2, max(g.valence(v) for v in g.vertices))
    hyps = [
        Hypothesis("edge labels finite", True, {"infinite_pairs_not_edges": [list(p) for p in g.infinite_pairs]}),
    ]
    if not g.labels:
        hyps.append(Hypothesis("graph has an edge", False, None))
        return BoundReport(None, "coxeter-global", hyps, False)
    m_min = min(g.labels.values())
    edge_min = min(g.labels, key=lambda e: (g.labels[e], e))
    tri = g.triangles()
    hyps += [
        Hypothesis("min label >= 3", m_min >= 3, {"edge": list(edge_min), "m": m_min}),
        Hypothesis("no 3-circuit", not tri, list(tri[0]) if tri else None),
        Hypothesis("min label >= 4", m_min >= 4, {"edge": list(edge_min), "m": m_min}),
    ]
    candidates = {}
    if m_min >= 3 and not tri:
        candidates["coxeter-global-triangle-free"] = _ratio_bound(k - 1, 2 * m_min - 3)
    if m_min >= 4:
        candidates["coxeter-global-large-labels"] = _ratio_bound(k - 1, 2 * m_min - 5)
    if not candidates:
        return BoundReport(None, "coxeter-global", hyps, False, candidates=candidates)
    rule = min(candidates, key=lambda r: (candidates[r], r))
    return BoundReport(candidates[rule], rule, hyps, True, witness={"k": k, "m": m_min}, candidates=candidates)


NON_HYPERBOLIC_CAVEAT = "hyperbolicity of the Coxeter group is not checked"


def coxeter_local_bound(g: CoxeterGraph):
    """Best per-vertex bound from ``val(s)`` and ``m_s`` (min incident label).

    Raises ``Inapplicable`` when no vertex satisfies either case.
    """
    if not g.vertices:
        raise BadParams("Coxeter graph has no vertices")
    best = None
    hyps = []
    candidates = {}
    for s in g.vertices:
        val = g.valence(s)
        if val < 2:
            continue
        m_s = min(g.label(s, t) for t in g.adj[s])
        tri = g.vertex_triangle(s)
        if m_s >= 3 and tri is None:
            v = _ratio_bound(val - 1, m_s - 1)
            candidates[f"{s}:triangle-free"] = v
            if best is None or v < best[0]:
                best = (v, "coxeter-local-triangle-free", s)
        if m_s >= 5:
            v = _ratio_bound(val - 1, m_s - 3)
            candidates[f"{s}:large-labels"] = v
            if best is None or v < best[0]:
                best = (v, "coxeter-local-large-labels", s)
        hyps.append(Hypothesis(f"vertex {s} on no 3-circuit", tri is None, list(tri) if tri else None))
    if best is None:
        raise Inapplicable("no vertex with valence >= 2 meets either local hypothesis")
    value, rule, s = best
    return BoundReport(value, rule, hyps, True, witness=s, candidates=candidates, caveat=NON_HYPERBOLIC_CAVEAT)


def polygonal_bound(n, k, triangle_free_links, cube_link_dim=None):
    """Upper bounds for a polygonal complex with perimeter ``n`` and thickness ``k``.

    With ``cube_link_dim`` set the links are cube 1-skeletons of that
    dimension (so it must equal ``k``) and the lower end of the bracket
    ``[1 + ln(k-1)/(ln(n-3) + ln 15), 1 + ln(k-1)/ln(n-3)]`` is added.
    """
    _check_int("n", n, 3)
    _check_int("k", k, 2)
    if cube_link_dim is not None:
        _check_int("cube_link_dim", cube_link_dim, 2)
        if cube_link_dim != k:
            raise BadParams(f"a {cube_link_dim}-cube link has valence {cube_link_dim}, not k = {k}")
        # cube 1-skeletons are bipartite, hence triangle-free
        triangle_free_links = True
    hyps = [
        Hypothesis("perimeter >= 5", n >= 5, n),
        Hypothesis("links triangle-free", bool(triangle_free_links), None),
        Hypothesis("perimeter >= 7", n >= 7, n),
    ]
    candidates = {}
    if n >= 5 and triangle_free_links:
        candidates["polygonal-triangle-free-links"] = _ratio_bound(k - 1, n - 3)
    if n >= 7:
        candidates["polygonal-large-perimeter"] = _ratio_bound(k - 1, n - 5)
    if not candidates:
        raise Inapplicable(f"no bound applies to n = {n} with these links")
    rule = min(candidates, key=lambda r: (candidates[r], r))
    report = BoundReport(candidates[rule], rule, hyps, True, candidates=candidates)
    if cube_link_dim is not None:
        low = 1.0 + math.log(k - 1) / (math.log(n - 3) + CUBE_LINK_EXTRA)
        report.bracket = (low, candidates["polygonal-triangle-free-links"])
        report.candidates["polygonal-cube-link-lower"] = low
    return report
