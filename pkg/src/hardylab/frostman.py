"""Hierarchical packing trees and Frostman-type measure distribution.

A packing tree refines a root ball ``B(w, R)`` through levels
``k = 1, ..., depth`` with radii ``delta^k R``.  The children of a node
are the greedy maximal packing centers of the point set restricted to a
window inside the parent ball, so sibling balls are pairwise disjoint
and jointly see every point of the window at their own scale.  Unit mass
is then pushed down the tree proportionally to child ball volumes, and
the resulting leaf measure is probed for the codimension-q growth bound
that underlies lower bounds on Hausdorff-type contents.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import NotACoverError, SubResolutionError
from .geometry import PointSet, ball_volume, maximal_packing

#: Window contraction used when collecting child packing centers.  The
#: construction that motivates this module packs the half-radius ball of
#: the parent; a factor of 1.0 packs the full parent ball instead, which
#: produces richer trees on sparse sets such as middle-thirds prefractals.
DEFAULT_WINDOW_FACTOR = 0.5

#: Relative slack applied to the sibling separation test, in units of the
#: level diameter 2 delta^k R.  Exactly-touching balls (distance equal to
#: the sum of radii) count as disjoint up to this slack.
DEFAULT_SEPARATION_SLACK_REL = 1e-9


@dataclass(frozen=True)
class PackingTree:
    """Static hierarchical packing of a point set.

    Nodes are stored flat: ``centers[i]`` is the ball center of node geometry
    ``i``, ``levels[i]`` its depth (0 for the root), ``parents[i]`` the
    index of its parent (-1 for the root).  ``radius_at(k)`` is
    ``delta^k * root_radius``.
    """

    centers: np.ndarray
    levels: np.ndarray
    parents: np.ndarray
    root_radius: float
    delta: float
    depth: int
    window_factor: float

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        levels = np.asarray(self.levels, dtype=int)
        parents = np.asarray(self.parents, dtype=int)
        if not (len(centers) == len(levels) == len(parents)):
            raise ValueError("tree arrays disagree in length")
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "parents", parents)

    @property
    def ambient_dim(self) -> int:
        return self.centers.shape[1]

    @property
    def node_count(self) -> int:
        return len(self.centers)

    def radius_at(self, level: int) -> float:
        return self.root_radius * self.delta ** level

    @property
    def radii(self) -> np.ndarray:
        return self.root_radius * self.delta ** self.levels.astype(float)

    @property
    def leaf_indices(self) -> np.ndarray:
        return np.flatnonzero(self.levels == self.depth)

    def children_of(self, index: int) -> np.ndarray:
        return np.flatnonzero(self.parents == index)


@dataclass(frozen=True)
class MeasureDistribution:
    """Node masses of a unit measure pushed down a packing tree."""

    tree: PackingTree
    masses: np.ndarray

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        if masses.shape != (self.tree.node_count,):
            raise ValueError("mass vector length disagrees with the tree")
        if (masses < 0).any():
            raise ValueError("masses must be nonnegative")
        object.__setattr__(self, "masses", masses)

    @property
    def leaf_masses(self) -> np.ndarray:
        return self.masses[self.tree.leaf_indices]

    @property
    def leaf_centers(self) -> np.ndarray:
        return self.tree.centers[self.tree.leaf_indices]


def build_packing_tree(
    E: PointSet,
    center,
    radius: float,
    delta: float,
    depth: int,
    window_factor: float = DEFAULT_WINDOW_FACTOR,
    separation_slack_rel: float = DEFAULT_SEPARATION_SLACK_REL,
) -> PackingTree:
    """Refine B(center, radius) into a packing tree over the point set E.

    Level-k children of a node are the greedy maximal packing of
    ``E ∩ B(node_center, window_factor * node_radius)`` at radius
    ``delta^k * radius``.  Requires ``0 < delta < 1/2``, a root center
    lying on E (within resolution tolerance), and a final level radius no
    finer than the set resolution.
    """
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not 0.0 < window_factor <= 1.0:
        raise ValueError("window factor must lie in (0, 1]")
    c = np.asarray(center, dtype=float).reshape(-1)
    if not E.contains(c, tol=E.resolution / 2.0 + 1e-12 * max(1.0, radius)):
        raise ValueError("root center must lie on the point set")
    if delta ** depth * radius < E.resolution:
        raise SubResolutionError(
            f"leaf radius {delta ** depth * radius} is below the set resolution"
        )
    centers = [c]
    levels = [0]
    parents = [-1]
    frontier = [0]
    for k in range(1, depth + 1):
        r_k = delta ** k * radius
        slack = separation_slack_rel * 2.0 * r_k
        new_frontier = []
        for node in frontier:
            window_radius = window_factor * radius * delta ** (k - 1)
            kids = maximal_packing(E, r_k, centers[node], window_radius, separation_slack=slack)
            for kid in kids:
                centers.append(np.asarray(kid, dtype=float))
                levels.append(k)
                parents.append(node)
                new_frontier.append(len(centers) - 1)
        frontier = new_frontier
    return PackingTree(
        centers=np.asarray(centers),
        levels=np.asarray(levels),
        parents=np.asarray(parents),
        root_radius=float(radius),
        delta=float(delta),
        depth=int(depth),
        window_factor=float(window_factor),
    )


def distribute_measure(tree: PackingTree) -> MeasureDistribution:
    """Push unit mass down the tree proportionally to child ball volumes.

    Each node splits its mass among its children with weights
    ``|B_child| / sum_children |B_child|``; since all children of a node
    share one radius this is an even split, but the volume form is kept
    so the construction survives future variable-radius trees.  Mass is
    conserved level by level to within accumulated round-off (well inside
    1e-12 for trees of practical depth).
    """
    dim = tree.ambient_dim
    masses = np.zeros(tree.node_count)
    masses[0] = 1.0
    for node in range(tree.node_count):
        kids = tree.children_of(node)
        if kids.size == 0:
            continue
        vols = np.array([ball_volume(dim, tree.radius_at(tree.levels[k])) for k in kids])
        total = math.fsum(vols)
        masses[kids] = masses[node] * (vols / total)
    return MeasureDistribution(tree=tree, masses=masses)


@dataclass(frozen=True)
class GrowthCheckResult:
    """Outcome of probing the codimension-q growth bound."""

    exponent: float
    max_constant: float
    worst_center: tuple[float, ...]
    worst_radius: float
    table: tuple[tuple[float, float], ...]  # (test radius, max constant at that radius)


def growth_check(
    tree: PackingTree,
    measure: MeasureDistribution,
    q: float,
    test_radii: Sequence[float] | None = None,
) -> GrowthCheckResult:
    """Largest normalized mass concentration of the leaf measure.

    For every leaf center x and every test radius r the constant

        C(x, r) = nu(B(x, r)) * |B_root| * (r / R)^q / |B(x, r)|

    is evaluated, where nu sums the leaf masses whose centers fall in the
    closed ball B(x, r).  When the leaf measure obeys a codimension-q
    growth bound the maximum stays bounded as the tree deepens; when q is
    below the critical exponent of the underlying set it blows up
    geometrically with depth.
    """
    if measure.tree is not tree:
        raise ValueError("measure was distributed on a different tree")
    if test_radii is None:
        test_radii = [tree.radius_at(k) for k in range(tree.depth + 1)]
    dim = tree.ambient_dim
    R = tree.root_radius
    root_vol = ball_volume(dim, R)
    leaves = measure.leaf_centers
    lmass = measure.leaf_masses
    tree_kd = cKDTree(leaves)
    best = -math.inf
    worst = (tuple(leaves[0]), float(test_radii[0]))
    table = []
    for r in sorted(float(v) for v in test_radii):
        groups = tree_kd.query_ball_point(leaves, r * (1.0 + 1e-12), workers=-1)
        level_best = -math.inf
        for idx, group in enumerate(groups):
            mass = float(lmass[list(group)].sum())
            if mass <= 0.0:
                continue
            constant = mass * root_vol * (r / R) ** q / ball_volume(dim, r)
            if constant > level_best:
                level_best = constant
                if constant > best:
                    best = constant
                    worst = (tuple(leaves[idx]), r)
        table.append((r, level_best))
    return GrowthCheckResult(
        exponent=float(q),
        max_constant=float(best),
        worst_center=worst[0],
        worst_radius=worst[1],
        table=tuple(table),
    )


def content_lower_bound(
    tree: PackingTree,
    measure: MeasureDistribution,
    q: float,
    covers: Sequence[Sequence[tuple]],
) -> float:
    """Cheapest supplied cover content, certified against the growth bound.

    Every cover is a family of (center, radius) balls that must jointly
    contain all leaf centers; otherwise :class:`NotACoverError` is
    raised.  Each cover's content ``sum_k rad_k^(-q) |B_k|`` is bounded
    below by ``C^(-1) R^(-q) |B_root|`` where C is the growth-check
    constant extended over the cover balls themselves; the bound is
    asserted for every cover and the minimum content is returned.
    """
    if not covers:
        raise ValueError("need at least one candidate cover")
    dim = tree.ambient_dim
    R = tree.root_radius
    root_vol = ball_volume(dim, R)
    leaves = measure.leaf_centers
    lmass = measure.leaf_masses
    growth = growth_check(tree, measure, q)
    best_sigma = math.inf
    for cover in covers:
        balls = [(np.asarray(c, dtype=float).reshape(-1), float(r)) for c, r in cover]
        covered = np.zeros(len(leaves), dtype=bool)
        constant = growth.max_constant
        sigma = 0.0
        for c, rad in balls:
            if rad <= 0:
                raise ValueError("cover radii must be positive")
            inside = np.linalg.norm(leaves - c, axis=1) <= rad * (1.0 + 1e-12)
            covered |= inside
            mass = float(lmass[inside].sum())
            if mass > 0:
                constant = max(
                    constant,
                    mass * root_vol * (rad / R) ** q / ball_volume(dim, rad),
                )
            sigma += rad ** (-q) * ball_volume(dim, rad)
        if not covered.all():
            raise NotACoverError("a candidate cover misses part of the leaf support")
        bound = root_vol * R ** (-q) / constant
        if sigma < bound * (1.0 - 1e-9):
            raise RuntimeError(
                "cover content undercuts the growth-bound certificate; "
                "the tree construction is inconsistent"
            )
        best_sigma = min(best_sigma, sigma)
    return float(best_sigma)


def tree_to_json(tree: PackingTree, measure: MeasureDistribution | None = None) -> str:
    """Serialize a tree (and optionally its measure) to a JSON document."""
    payload = {
        "root_radius": tree.root_radius,
        "delta": tree.delta,
        "depth": tree.depth,
        "window_factor": tree.window_factor,
        "nodes": [
            {
                "index": i,
                "level": int(tree.levels[i]),
                "parent": int(tree.parents[i]),
                "center": [float(v) for v in tree.centers[i]],
                "radius": float(tree.radius_at(int(tree.levels[i]))),
                **(
                    {"mass": float(measure.masses[i])}
                    if measure is not None
                    else {}
                ),
            }
            for i in range(tree.node_count)
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True)
