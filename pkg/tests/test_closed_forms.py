import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from confdimlab.closed_forms import (
    CoxeterGraph,
    building_confdim,
    building_equation,
    coxeter_global_bound,
    coxeter_local_bound,
    elementary_exponent,
    elementary_exponent_interval,
    hausdorff_visual_lower,
    polygon_side,
    polygonal_bound,
    symmetric_building_confdim,
)
from confdimlab.errors import BadParams, Inapplicable, ParseError


def equation_direct(x, m, k, l):
    """The defining equation written plainly (safe for moderate x)."""
    a, b = (k - 1) ** x, (l - 1) ** x
    return (a + b) / ((1 + a) * (1 + b)) - 1 / m


def k4(label):
    return CoxeterGraph.from_labels(range(4), {e: label for e in itertools.combinations(range(4), 2)})


# -- elementary exponents ---------------------------------------------------------


def test_elementary_examples():
    assert elementary_exponent(3, 2) == 1.0
    assert elementary_exponent(3, 3) == 2.0
    assert elementary_exponent(4, 5) == pytest.approx(1 + math.log(4) / math.log(3), rel=1e-15)
    assert elementary_exponent(4, 5) == pytest.approx(2.2618595, abs=1e-7)


@pytest.mark.parametrize("m,k", [(2, 3), (3, 1), (3.0, 3), (True, 3)])
def test_elementary_rejects(m, k):
    with pytest.raises(BadParams):
        elementary_exponent(m, k)


def test_interval_examples():
    assert elementary_exponent_interval(4, 4, 3, 3) == (elementary_exponent(4, 3),) * 2
    low, high = elementary_exponent_interval(3, 5, 2, 4)
    assert low == 1.0
    assert high == pytest.approx(2.58496, abs=1e-5)


@given(st.integers(3, 30), st.integers(0, 20), st.integers(2, 30), st.integers(0, 20))
def test_interval_ordered(m1, dm, k1, dk):
    low, high = elementary_exponent_interval(m1, m1 + dm, k1, k1 + dk)
    assert low <= high
    assert low <= elementary_exponent(m1 + dm, k1) <= high


# -- building equation --------------------------------------------------------------


def test_building_symmetric_example():
    value, x, residual = building_confdim(3, 3, 3)
    assert value == pytest.approx(1.5263, abs=1e-4)
    assert value == pytest.approx(symmetric_building_confdim(3, 3), abs=1e-12)
    # the closed form written with n = 2m: (n/2 - 1) + sqrt((n/2 - 1)^2 - 1)
    n = 6
    assert x == pytest.approx(math.log(n / 2 - 1 + math.sqrt((n / 2 - 1) ** 2 - 1)) / math.log(2), rel=1e-12)
    assert residual < 1e-12


@pytest.mark.parametrize("m,k,l", list(itertools.product(range(3, 8), repeat=3)))
def test_building_residual_grid(m, k, l):
    _, x, residual = building_confdim(m, k, l)
    assert residual < 1e-12
    assert abs(equation_direct(x, m, k, l)) < 1e-12


def test_building_equation_stable_form_matches_direct():
    for x in (0.1, 0.7, 2.0, 5.0):
        assert building_equation(x, 5, 4, 6) == pytest.approx(equation_direct(x, 5, 4, 6), abs=1e-15)
    assert building_equation(1e4, 3, 3, 3) == pytest.approx(-1 / 3, abs=1e-15)


@given(st.integers(3, 12), st.integers(3, 12), st.integers(3, 12))
def test_building_symmetric_in_k_and_l(m, k, l):
    assert building_confdim(m, k, l) == building_confdim(m, l, k)


@pytest.mark.parametrize("m,k", [(3, 3), (3, 4), (4, 3), (5, 6)])
def test_building_monotone_in_l(m, k):
    # direction observed on every sampled grid: increasing in l, toward the
    # elementary exponent from below
    ls = [3, 4, 6, 10, 30, 100, 1000, 10**4, 10**6]
    values = [building_confdim(m, k, l)[0] for l in ls]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] < elementary_exponent(m, k)


def test_building_rejects_thin_complexes():
    with pytest.raises(BadParams):
        building_confdim(3, 2, 3)


# -- visual Hausdorff dimension -------------------------------------------------------


@pytest.mark.parametrize("m", range(3, 12))
def test_polygon_side_against_triangulation(m):
    # split the right-angled 2m-gon into 2m isosceles triangles from the
    # centre: apex pi/m, base angles pi/4; the angle form of the hyperbolic
    # law of cosines gives the base
    A, B, C = math.pi / 4, math.pi / 4, math.pi / m
    cosh_a = (math.cos(C) + math.cos(A) * math.cos(B)) / (math.sin(A) * math.sin(B))
    assert polygon_side(m) == pytest.approx(math.acosh(cosh_a), abs=1e-9)


def test_hausdorff_examples():
    assert hausdorff_visual_lower(5, 2) == 1.0
    a = 2 * math.acosh(math.sqrt(2) * math.cos(math.pi / 6))
    assert hausdorff_visual_lower(3, 3) == pytest.approx(1 + 6 * a / math.pi * math.log(2), rel=1e-14)


# -- Coxeter bounds ----------------------------------------------------------------------


def test_square_graph_global():
    g = CoxeterGraph.from_labels(range(4), {(0, 1): 5, (1, 2): 5, (2, 3): 5, (0, 3): 5})
    rep = coxeter_global_bound(g)
    assert rep.value == 1.0 and rep.applicable
    assert rep.rule == "coxeter-global-large-labels" or rep.candidates["coxeter-global-triangle-free"] == 1.0


def test_k4_global():
    rep = coxeter_global_bound(k4(7))
    assert "coxeter-global-triangle-free" not in rep.candidates
    tri = next(h for h in rep.hypotheses if h.name == "no 3-circuit")
    assert not tri.passed and len(tri.witness) == 3
    assert rep.value == pytest.approx(1 + math.log(2) / math.log(9), rel=1e-15)
    assert rep.value == pytest.approx(1.3155, abs=1e-4)


def test_k4_local_is_exact():
    rep = coxeter_local_bound(k4(7))
    assert rep.value == 1.5
    assert rep.witness in range(4)
    assert rep.caveat


@pytest.mark.parametrize("m", range(5, 15))
def test_k4_local_formula(m):
    assert coxeter_local_bound(k4(m)).value == pytest.approx(1 + math.log(2) / math.log(m - 3), rel=1e-15)


def test_star_local():
    g = CoxeterGraph.from_labels(range(6), {(0, i): 6 for i in range(1, 6)})
    rep = coxeter_local_bound(g)
    assert rep.value == pytest.approx(1 + math.log(4) / math.log(5), rel=1e-15)
    assert rep.witness == 0 and rep.rule == "coxeter-local-triangle-free"


def local_scan(vertices, labels):
    """Independent per-vertex evaluation of both local cases."""
    adj = {v: {} for v in vertices}
    for (s, t), m in labels.items():
        adj[s][t] = m
        adj[t][s] = m
    best = None
    for s in vertices:
        if len(adj[s]) < 2:
            continue
        m_s = min(adj[s].values())
        on_triangle = any(c in adj[b] for b, c in itertools.combinations(adj[s], 2))
        for ok, denom in ((m_s >= 3 and not on_triangle, m_s - 1), (m_s >= 5, m_s - 3)):
            if ok:
                v = 1 + math.log(len(adj[s]) - 1) / math.log(denom)
                if best is None or v < best[0]:
                    best = (v, s)
    return best


def test_only_case_one_at_one_vertex():
    # triangle 0-1-2 with label 4 (case 2 needs m_s >= 5), plus a path
    # 2-3-4 with label 3: only vertex 3 is on no triangle with valence 2
    labels = {(0, 1): 4, (1, 2): 4, (0, 2): 4, (2, 3): 3, (3, 4): 3}
    rep = coxeter_local_bound(CoxeterGraph.from_labels(range(5), labels))
    value, witness = local_scan(range(5), labels)
    assert rep.witness == witness == 3
    assert rep.value == value == 1.0


@given(st.integers(0, 2**32 - 1))
def test_local_matches_scan_on_random_graphs(seed):
    import random

    rnd = random.Random(seed)
    n = rnd.randint(3, 8)
    labels = {e: rnd.randint(2, 9) for e in itertools.combinations(range(n), 2) if rnd.random() < 0.5}
    expected = local_scan(range(n), labels)
    g = CoxeterGraph.from_labels(range(n), labels)
    if expected is None:
        with pytest.raises(Inapplicable):
            coxeter_local_bound(g)
    else:
        assert coxeter_local_bound(g).value == pytest.approx(expected[0], rel=1e-15)


def test_infinite_labels_are_not_edges():
    g = CoxeterGraph.from_labels(range(3), {(0, 1): 5, (1, 2): 5, (0, 2): math.inf})
    assert g.infinite_pairs == [(0, 2)]
    rep = coxeter_global_bound(g)
    finite = next(h for h in rep.hypotheses if h.name == "edge labels finite")
    assert finite.witness == {"infinite_pairs_not_edges": [[0, 2]]}
    assert rep.candidates["coxeter-global-triangle-free"] == 1.0
    with pytest.raises(ParseError):
        CoxeterGraph.from_json({"vertices": [0, 1], "edges": [{"s": 0, "t": 1, "m": "inf"}]})


def test_coxeter_graph_validation():
    with pytest.raises(ParseError):
        CoxeterGraph([0, 1], {(0, 0): 3})
    with pytest.raises(ParseError):
        CoxeterGraph([0, 1], {(0, 1): 1})
    with pytest.raises(ParseError):
        CoxeterGraph([0, 1], {(0, 1): 3, (1, 0): 3})
    with pytest.raises(ParseError):
        CoxeterGraph([0, 1], {(0, 2): 3})
    g = k4(7)
    assert CoxeterGraph.from_json(g.to_json()) == g


# -- polygonal complexes ----------------------------------------------------------------


def test_polygonal_examples():
    assert polygonal_bound(5, 2, True).value == 1.0
    rep = polygonal_bound(7, 3, False)
    assert rep.value == 2.0 and rep.rule == "polygonal-large-perimeter"
    with pytest.raises(Inapplicable):
        polygonal_bound(5, 3, False)


def test_cube_link_bracket():
    rep = polygonal_bound(10, 3, False, cube_link_dim=3)
    low, high = rep.bracket
    assert low == pytest.approx(1 + math.log(2) / (math.log(7) + math.log(15)), abs=1e-12)
    assert high == pytest.approx(1 + math.log(2) / math.log(7), abs=1e-12)
    assert low == pytest.approx(1.1490, abs=1e-4) and high == pytest.approx(1.3562, abs=1e-4)
    with pytest.raises(BadParams):
        polygonal_bound(10, 3, False, cube_link_dim=4)


def test_reports_serialise():
    d = coxeter_local_bound(k4(7)).to_dict()
    assert d["value"] == 1.5 and d["applicable"] and "caveat" in d
    assert polygonal_bound(10, 3, True, cube_link_dim=3).to_dict()["bracket"][1] == pytest.approx(1.3562, abs=1e-4)
