import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.builders import cantor_set, equispaced_set, singleton
from hardylab.errors import NotACoverError, SubResolutionError
from hardylab.frostman import (
    build_packing_tree,
    content_lower_bound,
    distribute_measure,
    growth_check,
    tree_to_json,
)
from hardylab.geometry import PointSet


def triadic_tree(depth, window_factor=1.0):
    E = cantor_set(max(depth + 2, 8))
    return build_packing_tree(
        E, center=(0.0,), radius=1.0, delta=1.0 / 3.0, depth=depth, window_factor=window_factor
    )


# ---------------------------------------------------------------------------
# construction


def test_unit_interval_depth_one_children_by_hand():
    """E = {k/16}, root B(1/2, 1/2), delta = 1/4, default half-parent window.

    Window is B(1/2, 1/4) = [1/4, 3/4]; greedy packing at radius 1/8 keeps
    1/4, rejects everything strictly closer than 1/4, and keeps the
    exactly-touching centers 1/2 and 3/4 (touching balls count as
    disjoint).
    """
    E = equispaced_set(17, 1.0 / 16.0)
    tree = build_packing_tree(E, center=(0.5,), radius=0.5, delta=0.25, depth=1)
    kids = tree.centers[tree.levels == 1].ravel()
    assert np.allclose(sorted(kids), [0.25, 0.5, 0.75])


def test_triadic_tree_is_binary_with_full_parent_window():
    for depth in (2, 3, 4):
        tree = triadic_tree(depth)
        levels, counts = np.unique(tree.levels, return_counts=True)
        assert list(counts) == [2 ** k for k in range(depth + 1)]
    # level-3 children are exactly the eight level-3 left endpoints
    tree = triadic_tree(3)
    got = sorted(tree.centers[tree.levels == 3].ravel())
    want = sorted(
        a * 2 / 3 + b * 2 / 9 + c * 2 / 27 for a in (0, 1) for b in (0, 1) for c in (0, 1)
    )
    assert np.allclose(got, want)


def test_triadic_tree_degenerates_to_chain_with_half_window():
    """With the default half-parent window the sibling at distance
    2 * delta^k * R falls outside the window: every node has one child."""
    tree = triadic_tree(3, window_factor=0.5)
    levels, counts = np.unique(tree.levels, return_counts=True)
    assert list(counts) == [1, 1, 1, 1]
    assert np.allclose(tree.centers, 0.0)


def test_tree_validation():
    E = cantor_set(6)
    with pytest.raises(ValueError):
        build_packing_tree(E, center=(0.5,), radius=1.0, delta=1 / 3, depth=2)
    with pytest.raises(SubResolutionError):
        build_packing_tree(E, center=(0.0,), radius=1.0, delta=1 / 3, depth=9)
    with pytest.raises(ValueError):
        build_packing_tree(E, center=(0.0,), radius=1.0, delta=0.6, depth=2)


# ---------------------------------------------------------------------------
# measure


def test_measure_splits_evenly_on_the_binary_tree():
    tree = triadic_tree(4)
    m = distribute_measure(tree)
    leaf_masses = m.leaf_masses
    assert len(leaf_masses) == 16
    assert np.allclose(leaf_masses, 1.0 / 16.0)
    assert math.fsum(leaf_masses) == pytest.approx(1.0, abs=1e-12)


@given(
    seed=st.integers(0, 2000),
    depth=st.integers(1, 4),
    delta=st.floats(0.2, 0.45),
)
@settings(max_examples=100, deadline=None)
def test_measure_mass_is_conserved(seed, depth, delta):
    rng = np.random.default_rng(seed)
    pts = rng.random((rng.integers(5, 60), 2))
    root = pts[rng.integers(0, len(pts))]
    E = PointSet(points=pts, resolution=1e-9)
    tree = build_packing_tree(
        E, center=root, radius=1.0, delta=delta, depth=depth, window_factor=1.0
    )
    m = distribute_measure(tree)
    assert math.fsum(m.leaf_masses) == pytest.approx(1.0, abs=1e-12)
    # per-parent conservation
    for node in range(tree.node_count):
        kids = tree.children_of(node)
        if kids.size:
            assert math.fsum(m.masses[kids]) == pytest.approx(m.masses[node], abs=1e-12)


# ---------------------------------------------------------------------------
# growth constants


def test_singleton_chain_growth_constant_closed_form():
    """A chain over one point: the constant at radius r is (r/R)^(q-1)."""
    E = singleton((0.0,), resolution=1e-12)
    tree = build_packing_tree(E, center=(0.0,), radius=1.0, delta=1 / 3, depth=4)
    m = distribute_measure(tree)
    for q, expect in [(0.5, 3.0 ** 2.0), (1.0, 1.0), (1.5, 1.0)]:
        chk = growth_check(tree, m, q)
        assert chk.max_constant == pytest.approx(expect, rel=1e-9)


def test_binary_triadic_growth_constants_closed_form():
    """The level-k constant on the binary triadic tree is (3^(1-q)/2)^k."""
    tree = triadic_tree(5)
    m = distribute_measure(tree)
    for q in (0.2, 0.5):
        chk = growth_check(tree, m, q)
        per_level = 3.0 ** (1.0 - q) / 2.0
        expect = max(per_level ** k for k in range(6))
        assert chk.max_constant == pytest.approx(expect, rel=1e-9)


def test_growth_constant_grows_below_critical_exponent():
    crit = 1.0 - math.log(2) / math.log(3)
    consts_low = []
    consts_high = []
    for depth in (3, 4, 5):
        tree = triadic_tree(depth)
        m = distribute_measure(tree)
        consts_low.append(growth_check(tree, m, 0.2).max_constant)
        consts_high.append(growth_check(tree, m, crit + 0.1).max_constant)
    assert consts_low[-1] > consts_low[0]  # q below critical: unbounded growth
    assert consts_high[-1] <= consts_high[0] * (1 + 1e-9)  # q above: stable


# ---------------------------------------------------------------------------
# content lower bounds


def test_content_lower_bound_positive_for_triadic_covers():
    tree = triadic_tree(6)
    m = distribute_measure(tree)
    for k in (4, 5, 6):
        centers = tree.centers[tree.levels == k]
        cover = [(tuple(c), 3.0 ** -k) for c in centers]
        val = content_lower_bound(tree, m, 0.5, [cover])
        assert val > 0.0


def test_content_lower_bound_rejects_non_covers():
    tree = triadic_tree(3)
    m = distribute_measure(tree)
    with pytest.raises(NotACoverError):
        content_lower_bound(tree, m, 0.5, [[((0.0,), 0.1)]])


def test_tree_json_round_trip_fields():
    tree = triadic_tree(2)
    m = distribute_measure(tree)
    payload = json.loads(tree_to_json(tree, m))
    assert payload["delta"] == pytest.approx(1 / 3)
    assert len(payload["nodes"]) == tree.node_count
    assert all("mass" in node for node in payload["nodes"])
