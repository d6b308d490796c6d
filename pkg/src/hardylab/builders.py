"""Reusable fixture builders: point sets, grid domains, and problem setups.

Two registries are exposed for the command line and the experiment
scripts: :data:`SET_BUILDERS` produce finite point sets (self-similar
sets, sequences, singletons) and :data:`GRID_BUILDERS` produce grid
domains (punctured boxes and disks, perforated disks, exterior domains,
neighborhood grids around a point set).  Every builder takes plain
JSON-able keyword arguments so configurations can be written to disk.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigError
from .geometry import GridDomain, IFSSpec, PointSet, SimilarityMap

# ---------------------------------------------------------------------------
# point sets


def cantor_set(depth: int = 8) -> PointSet:
    """Left endpoints of the level-``depth`` middle-thirds construction on [0, 1].

    Exactly the 2^depth sums of distinct terms 2 * 3^(-i), i = 1..depth;
    pairwise distances are at least 2 * 3^(-depth) and the declared
    resolution is 3^(-depth), below which structure is meaningless.
    Keeping only left endpoints makes triadic window computations exact:
    no point ever sits on a window boundary at triadic probing radii.
    """
    if depth < 1:
        raise ConfigError("depth must be at least 1")
    bits = (np.arange(2 ** depth)[:, None] >> np.arange(depth)[::-1]) & 1
    weights = 2.0 * 3.0 ** -(np.arange(depth, dtype=float) + 1.0)
    pts = (bits * weights).sum(axis=1).reshape(-1, 1)
    return PointSet(points=pts, resolution=3.0 ** -depth)


def cantor_ifs() -> IFSSpec:
    """The two-map middle-thirds system; pairs with generate_prefractal."""
    eye = np.eye(1)
    return IFSSpec(
        maps=(
            SimilarityMap(ratio=1.0 / 3.0, rotation=eye, translation=np.array([0.0])),
            SimilarityMap(ratio=1.0 / 3.0, rotation=eye, translation=np.array([2.0 / 3.0])),
        )
    )


def singleton(coords=(0.0,), resolution: float = 1e-12) -> PointSet:
    """A single point; its resolution is an explicit trust scale."""
    return PointSet(points=np.asarray(coords, dtype=float).reshape(1, -1), resolution=resolution)


def equispaced_set(count: int = 64, spacing: float = 1.0 / 64.0) -> PointSet:
    """count points k * spacing on the line; a genuinely one-dimensional set."""
    pts = (np.arange(count, dtype=float) * spacing).reshape(-1, 1)
    return PointSet(points=pts, resolution=spacing)


def geometric_set(count: int = 24, ratio: float = 0.5) -> PointSet:
    """The points ratio^k, k = 0..count-1, accumulating at zero."""
    if not 0.0 < ratio < 1.0:
        raise ConfigError("ratio must lie in (0, 1)")
    pts = (ratio ** np.arange(count, dtype=float)).reshape(-1, 1)
    return PointSet(points=pts, resolution=float(pts[-1, 0] * (1.0 - ratio)))


def annulus_set(
    r_inner: float = 1.0,
    r_outer: float = 1.25,
    spacing: float = 2.0 ** -7,
    center=(0.0, 0.0),
) -> PointSet:
    """Grid sample of a closed planar annulus; stands in for a thick set."""
    if not 0.0 <= r_inner < r_outer:
        raise ConfigError("need 0 <= r_inner < r_outer")
    n = int(math.ceil(r_outer / spacing))
    axis = spacing * np.arange(-n, n + 1)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    rr = np.hypot(xx, yy)
    keep = (rr >= r_inner) & (rr <= r_outer)
    pts = np.stack([xx[keep], yy[keep]], axis=1) + np.asarray(center, dtype=float)
    return PointSet(points=pts, resolution=spacing)


def union_set(parts: Sequence[PointSet], resolution: float | None = None) -> PointSet:
    """Concatenation of point sets; resolution defaults to the coarsest part."""
    if not parts:
        raise ConfigError("union of no point sets")
    pts = np.concatenate([p.points for p in parts], axis=0)
    res = max(p.resolution for p in parts) if resolution is None else float(resolution)
    return PointSet(points=pts, resolution=res)


def circle_set(radius: float = 1.0, count: int = 720, center=(0.0, 0.0)) -> PointSet:
    """Equally spaced sample of a circle; stands in for a smooth boundary."""
    theta = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
    c = np.asarray(center, dtype=float)
    pts = c + radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    return PointSet(points=pts, resolution=2.0 * radius * math.sin(math.pi / count))


# ---------------------------------------------------------------------------
# grid domains


def _symmetric_axis_count(half_width: float, spacing: float) -> int:
    """Number of nodes on one side of zero so the axis covers half_width."""
    return int(math.ceil(half_width / spacing - 1e-9))


def _centered_grid(half_width: float, spacing: float, dim: int):
    n = _symmetric_axis_count(half_width, spacing)
    origin = np.full(dim, -n * spacing)
    shape = (2 * n + 1,) * dim
    return origin, shape


def punctured_square(spacing: float, half_width: float = 1.0) -> GridDomain:
    """Square window (-w, w)^2 of the plane minus the center point.

    The complement is the single center node.  The window edge is a free
    truncation frontier — functions are not forced to vanish there — so
    the grid models the punctured plane restricted to a finite window,
    and both the distance weight and the vanishing constraint see only
    the puncture.
    """
    origin, shape = _centered_grid(half_width, spacing, 2)
    mask = np.zeros(shape, dtype=bool)
    c = shape[0] // 2
    mask[c, c] = True
    return GridDomain(origin=origin, spacing=spacing, shape=shape, complement_mask=mask)


def punctured_interval(spacing: float, half_width: float = 1.0) -> GridDomain:
    """Open interval (-w, w) minus its midpoint, with Dirichlet ends."""
    origin, shape = _centered_grid(half_width, spacing, 1)
    mask = np.zeros(shape, dtype=bool)
    mask[shape[0] // 2] = True
    dirichlet = np.zeros(shape, dtype=bool)
    dirichlet[0] = dirichlet[-1] = True
    return GridDomain(
        origin=origin, spacing=spacing, shape=shape, complement_mask=mask, dirichlet_mask=dirichlet
    )


def _radial_sq(origin, spacing, shape, center=(0.0, 0.0)):
    axes = [origin[k] + spacing * np.arange(shape[k]) for k in range(len(shape))]
    mesh = np.meshgrid(*axes, indexing="ij")
    c = np.asarray(center, dtype=float)
    return sum((m - c[k]) ** 2 for k, m in enumerate(mesh))


def punctured_disk(spacing: float, radius: float = 1.0) -> GridDomain:
    """Open disk of the given radius minus its center point."""
    origin, shape = _centered_grid(radius + 2.0 * spacing, spacing, 2)
    sq = _radial_sq(origin, spacing, shape)
    mask = sq >= (radius * (1.0 - 1e-12)) ** 2
    c = shape[0] // 2
    mask[c, c] = True
    return GridDomain(origin=origin, spacing=spacing, shape=shape, complement_mask=mask)


def perforated_disk(
    spacing: float,
    radius: float = 2.0,
    j_min: int = 1,
    j_max: int = 4,
) -> GridDomain:
    """Square window of the plane minus the origin and a chain of balls.

    The removed balls are B((2^-j, 0), 2^(-2j)) for j = j_min..j_max,
    accumulating at the removed origin; each ball keeps at least the
    node nearest its center even when its radius falls below the grid
    spacing, so coarse grids still see the chain as a point sequence.
    The window half-width is ``radius`` and its edge is a free
    truncation frontier, as in ``punctured_square``.
    """
    if j_min < 1 or j_max < j_min:
        raise ConfigError("need 1 <= j_min <= j_max")
    origin, shape = _centered_grid(radius, spacing, 2)
    mask = np.zeros(shape, dtype=bool)
    c = shape[0] // 2
    mask[c, c] = True
    for j in range(j_min, j_max + 1):
        cx, br = 2.0 ** (-j), 2.0 ** (-2 * j)
        ball = _radial_sq(origin, spacing, shape, center=(cx, 0.0)) <= br * br
        mask |= ball
        # the node nearest the ball center, for balls thinner than the grid
        ix = int(round((cx - origin[0]) / spacing))
        mask[ix, c] = True
    return GridDomain(origin=origin, spacing=spacing, shape=shape, complement_mask=mask)


def exterior_ball(spacing: float, radius: float = 1.0, box_half_width: float = 4.0) -> GridDomain:
    """Complement of a closed ball, truncated to a Dirichlet box."""
    if box_half_width <= radius:
        raise ConfigError("truncation box must contain the ball")
    origin, shape = _centered_grid(box_half_width, spacing, 2)
    sq = _radial_sq(origin, spacing, shape)
    mask = sq <= (radius * (1.0 + 1e-12)) ** 2
    dirichlet = np.zeros(shape, dtype=bool)
    dirichlet[0, :] = dirichlet[-1, :] = True
    dirichlet[:, 0] = dirichlet[:, -1] = True
    return GridDomain(
        origin=origin, spacing=spacing, shape=shape, complement_mask=mask, dirichlet_mask=dirichlet
    )


def neighborhood_grid(E: PointSet, spacing: float, pad: float = 0.5) -> GridDomain:
    """Uniform grid covering a padded bounding box of a point set.

    The complement marks the nodes nearest to the set (within half a cell
    diagonal), so the grid domain models the open complement of the set.
    """
    lo, hi = E.bbox
    dim = E.ambient_dim
    origin = lo - pad
    counts = tuple(
        int(math.ceil((hi[k] - lo[k] + 2.0 * pad) / spacing)) + 1 for k in range(dim)
    )
    axes = [origin[k] + spacing * np.arange(counts[k]) for k in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([m.ravel() for m in mesh], axis=-1)
    dist, _ = cKDTree(E.points).query(coords, workers=-1)
    threshold = spacing * 0.5 * math.sqrt(dim) * (1.0 + 1e-9)
    mask = (dist <= threshold).reshape(counts)
    return GridDomain(origin=origin, spacing=spacing, shape=counts, complement_mask=mask)


def mask_grid(mask, spacing: float, origin=None, dirichlet=None) -> GridDomain:
    """Grid domain from an explicit 0/1 complement mask array."""
    mask = np.asarray(mask, dtype=bool)
    if origin is None:
        origin = np.zeros(mask.ndim)
    dmask = None if dirichlet is None else np.asarray(dirichlet, dtype=bool)
    return GridDomain(
        origin=np.asarray(origin, dtype=float),
        spacing=float(spacing),
        shape=mask.shape,
        complement_mask=mask,
        dirichlet_mask=dmask,
    )


# ---------------------------------------------------------------------------
# registries


SET_BUILDERS: dict[str, Callable[..., PointSet]] = {
    "cantor": cantor_set,
    "singleton": singleton,
    "equispaced": equispaced_set,
    "geometric": geometric_set,
    "circle": circle_set,
    "annulus": annulus_set,
}

GRID_BUILDERS: dict[str, Callable[..., GridDomain]] = {
    "punctured_square": punctured_square,
    "punctured_interval": punctured_interval,
    "punctured_disk": punctured_disk,
    "perforated_disk": perforated_disk,
    "exterior_ball": exterior_ball,
}


def build_set(name: str, **kwargs) -> PointSet:
    try:
        builder = SET_BUILDERS[name]
    except KeyError:
        raise ConfigError(f"unknown point-set fixture {name!r}") from None
    return builder(**kwargs)


def build_grid(name: str, **kwargs) -> GridDomain:
    try:
        builder = GRID_BUILDERS[name]
    except KeyError:
        raise ConfigError(f"unknown grid fixture {name!r}") from None
    return builder(**kwargs)


def list_fixtures() -> dict[str, list[str]]:
    return {
        "sets": sorted(SET_BUILDERS),
        "grids": sorted(GRID_BUILDERS),
    }
