import itertools

import numpy as np
import pytest

from confdimlab.approx import (
    ApproxGraph,
    carpet_approximation,
    grid_approximation,
    load_approximation,
)
from confdimlab.errors import LevelTooLarge, ValidationError


def box_oracle(g):
    """Neighbour sets from closed-box intersection, O(n^2)."""
    h = g.scale / 2
    nb = {i: set() for i in range(g.n_cells)}
    for i, j in itertools.combinations(range(g.n_cells), 2):
        dx, dy = np.abs(g.centers[i] - g.centers[j])
        if dx <= 2 * h + 1e-12 and dy <= 2 * h + 1e-12:
            nb[i].add(j)
            nb[j].add(i)
    return nb


def test_grid_level_zero():
    g = grid_approximation(0)
    assert g.n_cells == 1 and len(g.edges) == 0


def test_grid_level_one_is_complete():
    g = grid_approximation(1)
    assert g.n_cells == 4 and len(g.edges) == 6


def test_grid_level_three_degrees():
    g = grid_approximation(3)
    assert g.n_cells == 64
    oracle = box_oracle(g)
    for v in range(g.n_cells):
        assert set(g.neighbors(v).tolist()) == oracle[v]
    interior = [v for v in range(64) if 0 < v % 8 < 7 and 0 < v // 8 < 7]
    assert all(g.degree()[v] == 8 for v in interior)


def test_carpet_counts():
    assert carpet_approximation(1).n_cells == 8
    g1 = carpet_approximation(1)
    # a ring: every cell has 2 or 4 neighbours (corners / edge midpoints)
    assert sorted(g1.degree().tolist()) == [2, 2, 2, 2, 4, 4, 4, 4]
    assert g1.is_connected()
    assert carpet_approximation(2).n_cells == 64


def test_carpet_level_three_matches_box_oracle():
    g = carpet_approximation(3)
    oracle = box_oracle(g)
    for v in range(g.n_cells):
        assert set(g.neighbors(v).tolist()) == oracle[v]


@pytest.mark.parametrize("k", range(0, 6))
def test_carpet_connected(k):
    assert carpet_approximation(k).is_connected()


@pytest.mark.slow
def test_carpet_level_six_connected():
    assert carpet_approximation(6).is_connected()


def test_nested_addresses():
    for make, k in ((grid_approximation, 3), (carpet_approximation, 3)):
        fine = set(make(k + 1).addresses)
        coarse = set(make(k).addresses)
        assert {a[:-1] for a in fine} == coarse


def test_levels_bounded():
    with pytest.raises(LevelTooLarge):
        carpet_approximation(7)
    with pytest.raises(LevelTooLarge):
        grid_approximation(-1)


def test_json_round_trip(tmp_path):
    g = grid_approximation(2)
    path = tmp_path / "g.json"
    g.save(path)
    assert load_approximation(path) == g


def test_duplicate_centers_rejected():
    data = {
        "level": 1, "scale": 0.5, "kappa": 2.0,
        "cells": [{"id": 0, "center": [0.25, 0.25]}, {"id": 1, "center": [0.25, 0.25]}],
        "edges": [[0, 1]],
    }
    with pytest.raises(ValidationError):
        load_approximation(data)


def test_hand_built_path():
    g = ApproxGraph.from_edges(3, [(0, 1), (1, 2)])
    assert g.neighbors(0).tolist() == [1]
    assert g.neighbors(1).tolist() == [0, 2]
    assert g.neighbors(2).tolist() == [1]


def test_self_loop_rejected():
    with pytest.raises(ValidationError):
        ApproxGraph.from_edges(2, [(1, 1)])
