"""Discrete geometry primitives.

Point clouds standing in for closed sets, similarity iterated function
systems and their prefractal generations, uniform grid domains with a
marked complement, exact Euclidean distance fields, and greedy maximal
packings.  Everything downstream (dimension estimation, Frostman-type
measure construction, Hardy quotients) consumes these types.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import BudgetExceededError, EmptyWindowError

#: Hard ceiling on the number of points a prefractal generation may produce.
POINT_BUDGET = 10 ** 6

#: Hard ceiling on the number of nodes of a grid domain.
GRID_BUDGET = 2 ** 24


def unit_ball_volume(dim: int) -> float:
    """Lebesgue measure of the unit ball in R^dim."""
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


def ball_volume(dim: int, radius: float) -> float:
    """Lebesgue measure of a ball of the given radius in R^dim."""
    return unit_ball_volume(dim) * float(radius) ** dim


def _as_point_array(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2:
        raise ValueError("points must form a (N, dim) array")
    return pts


def _lexsorted(points: np.ndarray) -> np.ndarray:
    # np.lexsort uses the last key as the primary one; reverse the
    # coordinate order so rows sort by x first, then y, and so on.
    order = np.lexsort(points.T[::-1])
    return points[order]


def dedupe_points(points, min_separation: float) -> np.ndarray:
    """Thin a point array so no two survivors are closer than min_separation.

    Points are scanned in lexicographic coordinate order and a point is
    dropped when an earlier surviving point lies strictly closer than
    ``min_separation``.  The result is lexicographically sorted.
    """
    pts = _lexsorted(_as_point_array(points))
    if min_separation <= 0 or len(pts) < 2:
        return pts
    tree = cKDTree(pts)
    pairs = tree.query_pairs(min_separation * (1.0 - 1e-12), output_type="ndarray")
    keep = np.ones(len(pts), dtype=bool)
    if len(pairs):
        # Process pairs by increasing second index so the fate of every
        # earlier point is settled before it can knock out a later one.
        pairs = pairs[np.lexsort((pairs[:, 0], pairs[:, 1]))]
        for i, j in pairs:
            if keep[i] and keep[j]:
                keep[j] = False
    return pts[keep]


@dataclass(frozen=True)
class PointSet:
    """Finite point cloud with a scale below which structure is meaningless.

    Attributes
    ----------
    points:
        (N, dim) array, lexicographically sorted.
    resolution:
        Smallest trustworthy scale.  Construction through
        :meth:`from_points` deduplicates at ``resolution / 2``.
    """

    points: np.ndarray
    resolution: float

    def __post_init__(self):
        pts = _as_point_array(self.points)
        if pts.size == 0:
            raise ValueError("point set is empty")
        if not np.isfinite(pts).all():
            raise ValueError("point coordinates must be finite")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        object.__setattr__(self, "points", _lexsorted(pts))

    @classmethod
    def from_points(cls, points, resolution: float) -> "PointSet":
        pts = dedupe_points(points, float(resolution) / 2.0)
        return cls(points=pts, resolution=float(resolution))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.points.min(axis=0), self.points.max(axis=0)

    @property
    def diameter(self) -> float:
        lo, hi = self.bbox
        return float(np.linalg.norm(hi - lo))

    def min_distance(self, x) -> float:
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return float(np.linalg.norm(self.points - x, axis=1).min())

    def contains(self, x, tol: float | None = None) -> bool:
        if tol is None:
            tol = self.resolution / 2.0
        return self.min_distance(x) <= tol


@dataclass(frozen=True)
class SimilarityMap:
    """x -> ratio * R x + t with R orthogonal and 0 < ratio < 1."""

    ratio: float
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.atleast_2d(np.asarray(self.rotation, dtype=float))
        tra = np.atleast_1d(np.asarray(self.translation, dtype=float))
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("contraction ratio must lie in (0, 1)")
        if rot.shape[0] != rot.shape[1] or rot.shape[0] != tra.shape[0]:
            raise ValueError("rotation/translation dimensions disagree")
        if not np.allclose(rot @ rot.T, np.eye(rot.shape[0]), atol=1e-9):
            raise ValueError("rotation part must be orthogonal")
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", tra)

    @property
    def ambient_dim(self) -> int:
        return self.rotation.shape[0]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.ratio * points @ self.rotation.T + self.translation


@dataclass(frozen=True)
class IFSSpec:
    """Finite family of contracting similarities."""

    maps: tuple[SimilarityMap, ...]

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("an IFS needs at least one map")
        dims = {m.ambient_dim for m in maps}
        if len(dims) != 1:
            raise ValueError("all maps must share the ambient dimension")
        object.__setattr__(self, "maps", maps)

    @property
    def ambient_dim(self) -> int:
        return self.maps[0].ambient_dim

    @property
    def max_ratio(self) -> float:
        return max(m.ratio for m in self.maps)


def generate_prefractal(
    ifs: IFSSpec,
    depth: int,
    seed: PointSet,
    point_budget: int = POINT_BUDGET,
) -> PointSet:
    """Apply every depth-fold composition of the IFS maps to the seed points.

    The resolution of the result is ``max_ratio**depth * diam(seed)``,
    floored at machine epsilon so degenerate seeds stay usable.  Raises
    :class:`BudgetExceededError` before any work if the generation would
    produce more than ``point_budget`` points.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if ifs.ambient_dim != seed.ambient_dim:
        raise ValueError("IFS and seed ambient dimensions disagree")
    expected = len(seed) * len(ifs.maps) ** depth
    if expected > point_budget:
        raise BudgetExceededError(
            f"prefractal would hold {expected} points, budget is {point_budget}"
        )
    pts = seed.points
    for _ in range(depth):
        pts = np.concatenate([m(pts) for m in ifs.maps], axis=0)
    resolution = max(ifs.max_ratio ** depth * seed.diameter, np.finfo(float).eps)
    return PointSet.from_points(pts, resolution)


@dataclass(frozen=True)
class GridDomain:
    """Uniform node grid over a box with a marked complement.

    ``complement_mask`` flags the nodes belonging to the complement of the
    open set under study; distances are always measured to these nodes.
    ``dirichlet_mask`` optionally flags additional nodes where test
    functions are forced to vanish (artificial truncation boundaries) but
    which do not belong to the complement and therefore do not influence
    the distance field.
    """

    origin: np.ndarray
    spacing: float
    shape: tuple[int, ...]
    complement_mask: np.ndarray
    dirichlet_mask: np.ndarray | None = None

    def __post_init__(self):
        origin = np.atleast_1d(np.asarray(self.origin, dtype=float))
        shape = tuple(int(s) for s in self.shape)
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if len(shape) != origin.shape[0]:
            raise ValueError("origin and shape dimensions disagree")
        if any(s < 2 for s in shape):
            raise ValueError("grids need at least two nodes per axis")
        total = int(np.prod(shape))
        if total > GRID_BUDGET:
            raise BudgetExceededError(f"grid holds {total} nodes, budget is {GRID_BUDGET}")
        mask = np.asarray(self.complement_mask, dtype=bool)
        if mask.shape != shape:
            raise ValueError("complement mask shape disagrees with the grid shape")
        if not mask.any():
            raise ValueError("complement mask is empty; distances would be undefined")
        if mask.all():
            raise ValueError("complement mask covers the whole grid")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "complement_mask", mask)
        if self.dirichlet_mask is not None:
            dmask = np.asarray(self.dirichlet_mask, dtype=bool)
            if dmask.shape != shape:
                raise ValueError("dirichlet mask shape disagrees with the grid shape")
            object.__setattr__(self, "dirichlet_mask", dmask)

    @property
    def ambient_dim(self) -> int:
        return len(self.shape)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_measure(self) -> float:
        return self.spacing ** self.ambient_dim

    @property
    def vanishing_mask(self) -> np.ndarray:
        """Nodes where admissible test functions are zero."""
        if self.dirichlet_mask is None:
            return self.complement_mask
        return self.complement_mask | self.dirichlet_mask

    def axes(self) -> list[np.ndarray]:
        return [
            self.origin[k] + self.spacing * np.arange(self.shape[k])
            for k in range(self.ambient_dim)
        ]

    def node_coords(self) -> np.ndarray:
        """(node_count, dim) array of node coordinates, C-ordered."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


@dataclass(frozen=True)
class DistanceField:
    """Node-wise distance to the complement of a grid domain."""

    values: np.ndarray
    domain: GridDomain

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.domain.shape:
            raise ValueError("distance values shape disagrees with the grid")
        object.__setattr__(self, "values", vals)


def distance_transform(domain: GridDomain) -> DistanceField:
    """Exact Euclidean distance from every node to the complement nodes."""
    free = ~domain.complement_mask
    values = ndimage.distance_transform_edt(free, sampling=domain.spacing)
    return DistanceField(values=values, domain=domain)


def distance_to_points(domain: GridDomain, points: PointSet | np.ndarray) -> np.ndarray:
    """Exact distance from every grid node to a finite point set.

    Returns an array shaped like the grid.  This avoids rasterization
    error entirely: nothing is snapped to nodes.
    """
    pts = points.points if isinstance(points, PointSet) else _as_point_array(points)
    tree = cKDTree(pts)
    dist, _ = tree.query(domain.node_coords(), workers=-1)
    return dist.reshape(domain.shape)


def maximal_packing(
    E: PointSet,
    r: float,
    center,
    radius: float,
    separation_slack: float = 0.0,
) -> np.ndarray:
    """Greedy lexicographic maximal r-packing of E within a closed ball window.

    Scans the points of ``E`` inside ``B(center, radius)`` in lexicographic
    order and keeps a point whenever its distance to every point kept so
    far exceeds ``2 r - separation_slack``.  The kept centers are pairwise
    separated (so the closed r-balls around them are disjoint up to the
    slack) and every point of the window lies within ``2 r`` of a kept
    center, which is the covering half of the packing sandwich.

    Parameters
    ----------
    separation_slack:
        Nonnegative absolute slack subtracted from the separation test.
        The default 0 keeps the comparison strict; constructions that rely
        on touching balls pass a small positive slack to absorb round-off.
    """
    if not r > 0:
        raise ValueError("packing radius must be positive")
    if not radius > 0:
        raise ValueError("window radius must be positive")
    if separation_slack < 0:
        raise ValueError("separation slack must be nonnegative")
    c = np.asarray(center, dtype=float).reshape(-1)
    if c.shape[0] != E.ambient_dim:
        raise ValueError("window center dimension disagrees with the point set")
    offsets = E.points - c
    inside = np.einsum("ij,ij->i", offsets, offsets) <= (radius * (1.0 + 1e-12)) ** 2
    cand = E.points[inside]
    if cand.size == 0:
        raise EmptyWindowError(
            f"window B({np.array2string(c)}, {radius!r}) contains no points"
        )
    # E.points is already lexicographically sorted, and boolean masking
    # preserves order, so cand is scanned lexicographically.
    min_sep = 2.0 * r - separation_slack
    chosen: list[np.ndarray] = [cand[0]]
    chosen_arr = cand[:1]
    for pt in cand[1:]:
        diff = chosen_arr - pt
        if np.min(np.einsum("ij,ij->i", diff, diff)) > min_sep * min_sep:
            chosen.append(pt)
            chosen_arr = np.asarray(chosen)
    return chosen_arr.copy()
