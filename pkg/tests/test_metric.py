import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from confdimlab.errors import EmptySet, NotAMetric, ParseError, SingleSet, ZeroDiameter
from confdimlab.metric import (
    FiniteMetricSpace,
    SetCollection,
    min_pairwise_separation,
    relative_distance,
    rescale_to_unit_diameter,
)


def line(xs):
    return FiniteMetricSpace.from_points(np.asarray(xs, dtype=float)[:, None])


def scan_relative(space, A, B):
    """Exhaustive pair scan, written independently of the library."""
    dist = min(space.dist[a, b] for a in A for b in B)
    dA = max(space.dist[a, b] for a in A for b in A)
    dB = max(space.dist[a, b] for a in B for b in B)
    return dist / min(dA, dB)


def test_real_line_example():
    space = line([0, 1, 5, 6])
    assert relative_distance([0, 1], [2, 3], space) == 4.0


def test_overlapping_sets_are_at_zero():
    space = line([0, 1, 2])
    assert relative_distance([0, 1], [1, 2], space) == 0.0
    assert relative_distance([0, 1, 2], [0, 1, 2], space) == 0.0


def test_opposite_carpet_cells_match_pair_scan():
    # sample points of two level-2 carpet cells at opposite corners
    rng = np.random.default_rng(7)
    a = rng.random((30, 2)) / 9.0
    b = 1.0 - rng.random((30, 2)) / 9.0
    space = FiniteMetricSpace.from_points(np.vstack([a, b]))
    A, B = range(30), range(30, 60)
    assert relative_distance(A, B, space) == pytest.approx(scan_relative(space, A, B), rel=1e-15)


def test_singleton_has_zero_diameter():
    space = line([0, 1, 5])
    with pytest.raises(ZeroDiameter):
        relative_distance([0], [1, 2], space)
    with pytest.raises(EmptySet):
        relative_distance([], [1, 2], space)


def test_min_separation_two_sets():
    space = line([0, 1, 5, 6])
    assert min_pairwise_separation(SetCollection(space, [[0, 1], [2, 3]])) == 4.0


def test_min_separation_three_translates():
    # copies of {0,1} at 0, 10 and 13: the closest pair is the last two
    space = line([0, 1, 10, 11, 13, 14])
    c = SetCollection(space, [[0, 1], [2, 3], [4, 5]])
    assert min_pairwise_separation(c) == 2.0


def _separated_balls(rng, count, radius=0.01, pts=4):
    centers = []
    while len(centers) < count:
        z = rng.uniform(radius, 1 - radius, 2)
        if all(np.hypot(*(z - c)) > 6 * radius for c in centers):
            centers.append(z)
    points, sets = [], []
    for c in centers:
        ang = rng.uniform(0, 2 * np.pi, pts)
        r = radius * np.sqrt(rng.uniform(0.2, 1, pts))
        sets.append(list(range(len(points), len(points) + pts)))
        points.extend(c + np.stack([r * np.cos(ang), r * np.sin(ang)], 1))
    return FiniteMetricSpace.from_points(np.array(points)), sets


def test_min_separation_twenty_balls_matches_scan():
    space, sets = _separated_balls(np.random.default_rng(3), 20)
    c = SetCollection(space, sets)
    oracle = min(scan_relative(space, A, B) for A, B in itertools.combinations(sets, 2))
    assert min_pairwise_separation(c) == pytest.approx(oracle, rel=1e-15)


def test_min_separation_needs_two_sets():
    with pytest.raises(SingleSet):
        min_pairwise_separation(SetCollection(line([0, 1]), [[0, 1]]))


def test_rescale_identity_on_unit_diameter():
    space = line([0, 0.25, 1])
    unit, scale = rescale_to_unit_diameter(space)
    assert scale == 1.0 and unit is space


def test_rescale_round_trip():
    space = line([0, 0.25, 1])
    unit, scale = rescale_to_unit_diameter(space.scaled(2.0))
    assert scale == 2.0
    np.testing.assert_array_equal(unit.dist, space.dist)


@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_relative_distance_scale_invariant_and_symmetric(seed, c):
    rng = np.random.default_rng(seed)
    space = FiniteMetricSpace.from_points(rng.random((12, 2)))
    A, B = [0, 1, 2, 3], [6, 7, 8]
    before = relative_distance(A, B, space)
    after = relative_distance(A, B, space.scaled(c))
    assert after == pytest.approx(before, rel=1e-12)
    assert relative_distance(B, A, space) == before
    unit, _ = rescale_to_unit_diameter(space)
    assert relative_distance(A, B, unit) == pytest.approx(before, rel=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_min_separation_is_a_lower_bound(seed):
    rng = np.random.default_rng(seed)
    space = FiniteMetricSpace.from_points(rng.random((15, 2)))
    sets = [[0, 1, 2], [3, 4], [5, 6, 7], [8, 9, 10, 11]]
    c = SetCollection(space, sets)
    sep = min_pairwise_separation(c)
    for A, B in itertools.combinations(sets, 2):
        assert sep <= relative_distance(A, B, space)


def test_matrix_validation():
    with pytest.raises(NotAMetric):
        FiniteMetricSpace.from_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    with pytest.raises(NotAMetric):
        FiniteMetricSpace.from_matrix([[0, 1], [2, 0]])
    with pytest.raises(NotAMetric):
        FiniteMetricSpace.from_matrix([[0, 0], [0, 0]])
    with pytest.raises(NotAMetric):
        FiniteMetricSpace.from_matrix([[1, 1], [1, 0]])
    with pytest.raises(NotAMetric):
        FiniteMetricSpace.from_points([[0, 0], [0, 0]])


def test_json_round_trips():
    m = FiniteMetricSpace.from_matrix([[0, 1, 2], [1, 0, 1.5], [2, 1.5, 0]])
    again = FiniteMetricSpace.from_json(m.to_json())
    np.testing.assert_array_equal(again.dist, m.dist)
    pts = FiniteMetricSpace.from_points([[0, 0], [3, 4]])
    assert FiniteMetricSpace.from_json(pts.to_json()).dist[0, 1] == 5.0
    c = SetCollection(pts, [[0], [1]])
    assert SetCollection.from_json(pts, c.to_json()).to_json() == {"sets": [[0], [1]]}
    with pytest.raises(ParseError):
        FiniteMetricSpace.from_json({"n": 3, "dist": [1.0]})
    with pytest.raises(ParseError):
        FiniteMetricSpace.from_json({"foo": 1})


def test_distances_exact_for_pythagorean_points():
    space = FiniteMetricSpace.from_points([[0, 0], [3, 4], [6, 8]])
    assert space.diam == 10.0
    assert math.isclose(space.set_distance([0], [1, 2]), 5.0)
