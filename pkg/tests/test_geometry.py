import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardylab.errors import BudgetExceededError, EmptyWindowError
from hardylab.geometry import (
    GridDomain,
    IFSSpec,
    PointSet,
    SimilarityMap,
    ball_volume,
    dedupe_points,
    distance_to_points,
    distance_transform,
    generate_prefractal,
    maximal_packing,
    unit_ball_volume,
)


def random_points(seed, n, dim, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * rng.random((n, dim))


# ---------------------------------------------------------------------------
# volumes


def test_unit_ball_volumes_match_closed_forms():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(np.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * np.pi / 3.0)
    assert ball_volume(2, 0.5) == pytest.approx(np.pi * 0.25)


# ---------------------------------------------------------------------------
# dedupe / point sets


@given(seed=st.integers(0, 10_000), n=st.integers(1, 60), dim=st.integers(1, 3))
@settings(max_examples=100, deadline=None)
def test_dedupe_result_is_separated_subset(seed, n, dim):
    pts = random_points(seed, n, dim)
    min_sep = 0.1
    out = dedupe_points(pts, min_sep)
    # every kept point is one of the inputs
    for p in out:
        assert np.min(np.linalg.norm(pts - p, axis=1)) < 1e-12
    # pairwise separation holds
    if len(out) > 1:
        diffs = out[:, None, :] - out[None, :, :]
        d = np.sqrt((diffs ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        assert d.min() >= min_sep * (1 - 1e-9)
    # every dropped point is near a kept one
    for p in pts:
        assert np.min(np.linalg.norm(out - p, axis=1)) < min_sep + 1e-12


def test_pointset_sorts_and_validates():
    ps = PointSet(points=np.array([[2.0], [0.0], [1.0]]), resolution=0.1)
    assert list(ps.points.ravel()) == [0.0, 1.0, 2.0]
    assert ps.ambient_dim == 1
    assert ps.diameter == pytest.approx(2.0)
    assert ps.contains([1.0]) and not ps.contains([0.5])
    with pytest.raises(ValueError):
        PointSet(points=np.empty((0, 2)), resolution=0.1)
    with pytest.raises(ValueError):
        PointSet(points=np.array([[0.0]]), resolution=0.0)


# ---------------------------------------------------------------------------
# IFS prefractals


def test_prefractal_matches_brute_enumeration():
    eye = np.eye(1)
    ifs = IFSSpec(
        maps=(
            SimilarityMap(ratio=1 / 3, rotation=eye, translation=np.array([0.0])),
            SimilarityMap(ratio=1 / 3, rotation=eye, translation=np.array([2 / 3])),
        )
    )
    seed = PointSet(points=np.array([[0.0]]), resolution=1.0)
    # depth-3 images of {0}: all sums of 2/3 * 3^-i over subsets of {0,1,2}
    expected = sorted(
        a * 2 / 3 + b * 2 / 9 + c * 2 / 27 for a in (0, 1) for b in (0, 1) for c in (0, 1)
    )
    got = generate_prefractal(ifs, 3, seed)
    assert np.allclose(got.points.ravel(), expected)


def test_prefractal_budget_error_is_raised_before_work():
    eye = np.eye(1)
    ifs = IFSSpec(
        maps=tuple(
            SimilarityMap(ratio=0.4, rotation=eye, translation=np.array([float(k)]))
            for k in range(4)
        )
    )
    seed = PointSet(points=np.array([[0.0]]), resolution=1.0)
    with pytest.raises(BudgetExceededError):
        generate_prefractal(ifs, 12, seed, point_budget=1000)


# ---------------------------------------------------------------------------
# grids and distance fields


def test_grid_budget_and_mask_validation():
    mask = np.zeros((4, 4), dtype=bool)
    with pytest.raises(ValueError):
        GridDomain(origin=np.zeros(2), spacing=0.1, shape=(4, 4), complement_mask=mask)
    mask[0, 0] = True
    dom = GridDomain(origin=np.zeros(2), spacing=0.1, shape=(4, 4), complement_mask=mask)
    assert dom.node_count == 16
    with pytest.raises(BudgetExceededError):
        GridDomain(
            origin=np.zeros(2),
            spacing=0.1,
            shape=(2 ** 13, 2 ** 13),
            complement_mask=np.zeros((2 ** 13, 2 ** 13), dtype=bool),
        )


def brute_edt(domain):
    coords = domain.node_coords()
    comp = coords[domain.complement_mask.ravel()]
    out = np.empty(len(coords))
    for i, x in enumerate(coords):
        out[i] = np.min(np.linalg.norm(comp - x, axis=1))
    return out.reshape(domain.shape)


@given(seed=st.integers(0, 5000))
@settings(max_examples=100, deadline=None)
def test_distance_transform_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    shape = (rng.integers(2, 9), rng.integers(2, 9))
    mask = rng.random(shape) < 0.3
    if not mask.any():
        mask[0, 0] = True
    if mask.all():
        mask[-1, -1] = False
    dom = GridDomain(origin=np.zeros(2), spacing=0.25, shape=tuple(shape), complement_mask=mask)
    got = distance_transform(dom).values
    assert np.allclose(got, brute_edt(dom), atol=1e-12)


def test_distance_to_points_matches_brute_force():
    dom = GridDomain(
        origin=np.array([-1.0, -1.0]),
        spacing=0.5,
        shape=(5, 5),
        complement_mask=np.eye(5, dtype=bool),
    )
    pts = np.array([[0.1, 0.2], [-0.7, 0.9]])
    got = distance_to_points(dom, pts).ravel()
    coords = dom.node_coords()
    want = np.min(
        np.linalg.norm(coords[:, None, :] - pts[None, :, :], axis=2), axis=1
    )
    assert np.allclose(got, want)


# ---------------------------------------------------------------------------
# greedy packings


def brute_greedy_packing(E, r, center, radius, slack=0.0):
    sel = [p for p in E.points if np.linalg.norm(p - center) <= radius * (1 + 1e-12)]
    kept = []
    for p in sel:  # E.points is already lexicographically sorted
        if all(np.linalg.norm(p - k) > 2 * r - slack for k in kept):
            kept.append(p)
    return np.array(kept)


@given(seed=st.integers(0, 5000), n=st.integers(1, 80))
@settings(max_examples=100, deadline=None)
def test_maximal_packing_matches_brute_force(seed, n):
    pts = random_points(seed, n, 2)
    E = PointSet(points=pts, resolution=1e-9)
    center = np.array([0.5, 0.5])
    want = brute_greedy_packing(E, 0.08, center, 0.45)
    if len(want) == 0:
        with pytest.raises(EmptyWindowError):
            maximal_packing(E, 0.08, center, 0.45)
    else:
        got = maximal_packing(E, 0.08, center, 0.45)
        assert np.allclose(got, want)


@given(seed=st.integers(0, 5000), n=st.integers(2, 100))
@settings(max_examples=100, deadline=None)
def test_packing_cover_sandwich(seed, n):
    """Kept centers are 2r-separated and their 2r-balls cover the window."""
    pts = random_points(seed, n, 2)
    E = PointSet(points=pts, resolution=1e-9)
    center, R, r = np.array([0.5, 0.5]), 0.5, 0.07
    window = pts[np.linalg.norm(pts - center, axis=1) <= R * (1 + 1e-12)]
    if len(window) == 0:
        with pytest.raises(EmptyWindowError):
            maximal_packing(E, r, center, R)
        return
    kept = maximal_packing(E, r, center, R)
    # disjointness of the r-balls
    if len(kept) > 1:
        diffs = kept[:, None, :] - kept[None, :, :]
        d = np.sqrt((diffs ** 2).sum(-1))
        np.fill_diagonal(d, np.inf)
        assert d.min() > 2 * r * (1 - 1e-12)
    # maximality: doubling the radius covers every window point
    for p in window:
        assert np.min(np.linalg.norm(kept - p, axis=1)) <= 2 * r * (1 + 1e-12)


def test_empty_window_raises():
    E = PointSet(points=np.array([[0.0, 0.0]]), resolution=1e-9)
    with pytest.raises(EmptyWindowError):
        maximal_packing(E, 0.1, np.array([5.0, 5.0]), 0.5)
