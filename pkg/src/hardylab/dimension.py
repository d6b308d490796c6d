"""Scale-window dimension and codimension estimators.

All estimators share the same sampling vocabulary: a *scale window* is a
triple ``(x, R, r)`` with ``0 < r < R``, where ``x`` is a window center,
``R`` the outer (window) radius and ``r`` the inner (probing) scale.
Covering-type estimates count greedy packings of the set restricted to
the window; codimension-type estimates measure the volume fraction of
the grid neighborhood ``{dist(., E) < r}`` inside the window.

Upper estimates take the worst (largest) log-slope over the sampled
windows, lower estimates the best (smallest); both only use samples
whose scale ratio ``R / r`` meets a floor, since slopes computed across
less than an order of magnitude mostly measure lattice artifacts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import SubResolutionError
from .geometry import (
    GridDomain,
    PointSet,
    ball_volume,
    distance_to_points,
    maximal_packing,
)

#: Default floor for the window-to-probe scale ratio R / r.
DEFAULT_SCALE_RATIO_MIN = 8.0


@dataclass(frozen=True)
class ScaleWindowSample:
    """One window observation: either a packing count or a volume ratio."""

    center: tuple[float, ...]
    outer_radius: float
    inner_radius: float
    count: int | None = None
    volume_ratio: float | None = None

    def __post_init__(self):
        if not 0 < self.inner_radius < self.outer_radius:
            raise ValueError("samples need 0 < r < R")
        if (self.count is None) == (self.volume_ratio is None):
            raise ValueError("exactly one of count / volume_ratio must be set")
        if self.count is not None and self.count < 1:
            raise ValueError("packing counts are at least 1")
        if self.volume_ratio is not None and not 0 < self.volume_ratio:
            raise ValueError("volume ratios are positive")

    @property
    def scale_ratio(self) -> float:
        return self.outer_radius / self.inner_radius

    @property
    def slope(self) -> float:
        """Anchored log-slope of this single window.

        For counts: log N / log(R/r).  For volume ratios: log(ratio) /
        log(r/R), so that a ratio behaving like (r/R)^t reports t.
        """
        if self.count is not None:
            return math.log(self.count) / math.log(self.scale_ratio)
        return math.log(self.volume_ratio) / math.log(1.0 / self.scale_ratio)


@dataclass(frozen=True)
class DimensionEstimate:
    """Result of one estimator run.

    ``kind`` is one of assouad_upper, assouad_lower, minkowski_upper,
    minkowski_lower, codim_lower, codim_upper, aikawa, content_density.
    ``profile`` carries estimator-specific auxiliary curves (the Aikawa
    estimator stores its (q, A(q)) table there).
    """

    kind: str
    value: float
    samples: tuple[ScaleWindowSample, ...]
    scale_ratio_min: float
    profile: tuple[tuple[float, float], ...] | None = None

    _KINDS = (
        "assouad_upper",
        "assouad_lower",
        "minkowski_upper",
        "minkowski_lower",
        "codim_lower",
        "codim_upper",
        "aikawa",
        "content_density",
    )

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown estimate kind {self.kind!r}")


def _check_probe_radii(E: PointSet, radii: Sequence[float]) -> list[float]:
    radii = sorted(float(r) for r in radii)
    if not radii:
        raise ValueError("need at least one probing radius")
    if radii[0] < E.resolution:
        raise SubResolutionError(
            f"probing radius {radii[0]} is below the set resolution {E.resolution}"
        )
    return radii


def covering_counts(
    E: PointSet,
    centers: Sequence,
    outer_radii: Sequence[float],
    inner_radii: Sequence[float],
    scale_ratio_min: float = DEFAULT_SCALE_RATIO_MIN,
) -> list[ScaleWindowSample]:
    """Greedy packing counts of E over a grid of scale windows.

    Every combination of center, outer radius R and inner radius r with
    ``R / r >= scale_ratio_min`` yields one sample whose count is the size
    of the greedy maximal r-packing of ``E ∩ B(center, R)``.  Probing
    radii below ``E.resolution`` are rejected outright.
    """
    inner = _check_probe_radii(E, inner_radii)
    samples = []
    for center in centers:
        c = np.asarray(center, dtype=float).reshape(-1)
        for R in sorted(float(v) for v in outer_radii):
            for r in inner:
                if r >= R or R / r < scale_ratio_min:
                    continue
                packing = maximal_packing(E, r, c, R)
                samples.append(
                    ScaleWindowSample(
                        center=tuple(c),
                        outer_radius=R,
                        inner_radius=r,
                        count=len(packing),
                    )
                )
    if not samples:
        raise ValueError("no window met the scale-ratio floor")
    return samples


def _slope_extreme(
    samples: Iterable[ScaleWindowSample],
    kind: str,
    scale_ratio_min: float,
    reducer,
) -> DimensionEstimate:
    kept = tuple(s for s in samples if s.scale_ratio >= scale_ratio_min)
    if not kept:
        raise ValueError("no sample meets the scale-ratio floor")
    value = reducer(s.slope for s in kept)
    return DimensionEstimate(kind=kind, value=value, samples=kept, scale_ratio_min=scale_ratio_min)


def assouad_upper(
    samples: Iterable[ScaleWindowSample],
    scale_ratio_min: float = DEFAULT_SCALE_RATIO_MIN,
) -> DimensionEstimate:
    """Worst-window covering exponent: max of log N / log(R/r)."""
    return _slope_extreme(samples, "assouad_upper", scale_ratio_min, max)


def assouad_lower(
    samples: Iterable[ScaleWindowSample],
    scale_ratio_min: float = DEFAULT_SCALE_RATIO_MIN,
) -> DimensionEstimate:
    """Best-window covering exponent: min of log N / log(R/r)."""
    return _slope_extreme(samples, "assouad_lower", scale_ratio_min, min)


def minkowski_estimates(
    E: PointSet,
    radii: Sequence[float],
    scale_ratio_min: float = DEFAULT_SCALE_RATIO_MIN,
) -> tuple[DimensionEstimate, DimensionEstimate]:
    """Global box-counting exponents from consecutive-scale slopes.

    Packs the whole set at every radius and reports the extreme slopes of
    log N(r) against log(1/r) between consecutive tested radii as
    (minkowski_lower, minkowski_upper).
    """
    radii_sorted = _check_probe_radii(E, radii)
    if len(radii_sorted) < 2:
        raise ValueError("need at least two radii for global slopes")
    lo, hi = E.bbox
    center = (lo + hi) / 2.0
    window_radius = max(
        float(np.linalg.norm(E.points - center, axis=1).max()), E.resolution
    ) * (1.0 + 1e-9)
    outer = max(window_radius, radii_sorted[-1] * scale_ratio_min) * (1.0 + 1e-9)
    counts = []
    samples = []
    for r in radii_sorted:
        n = len(maximal_packing(E, r, center, window_radius))
        counts.append(n)
        samples.append(
            ScaleWindowSample(
                center=tuple(center), outer_radius=outer, inner_radius=r, count=n
            )
        )
    slopes = []
    for (r0, n0), (r1, n1) in zip(
        zip(radii_sorted, counts), zip(radii_sorted[1:], counts[1:])
    ):
        slopes.append((math.log(n0) - math.log(n1)) / (math.log(r1) - math.log(r0)))
    samples = tuple(samples)
    lower = DimensionEstimate(
        kind="minkowski_lower",
        value=min(slopes),
        samples=samples,
        scale_ratio_min=scale_ratio_min,
    )
    upper = DimensionEstimate(
        kind="minkowski_upper",
        value=max(slopes),
        samples=samples,
        scale_ratio_min=scale_ratio_min,
    )
    return lower, upper


def _neighborhood_distances(E: PointSet, domain: GridDomain) -> np.ndarray:
    if E.ambient_dim != domain.ambient_dim:
        raise ValueError("point set and grid ambient dimensions disagree")
    return distance_to_points(domain, E)


def codimension_estimates(
    E: PointSet,
    domain: GridDomain,
    centers: Sequence,
    outer_radii: Sequence[float],
    inner_radii: Sequence[float],
    scale_ratio_min: float = DEFAULT_SCALE_RATIO_MIN,
) -> tuple[DimensionEstimate, DimensionEstimate]:
    """Volume-ratio codimension exponents (codim_lower, codim_upper).

    For each window the mass ratio is the grid measure of the open
    r-neighborhood of E inside B(x, R) divided by the full Lebesgue ball
    measure of B(x, R).  Slopes of log(ratio) against log r between
    consecutive probing radii within the same window are collected; the
    minimum is the lower codimension estimate and the maximum the upper.
    The grid must comfortably contain every window.
    """
    h = domain.spacing
    dim = domain.ambient_dim
    inner = sorted(float(r) for r in inner_radii)
    if len(inner) < 2:
        raise ValueError("need at least two probing radii for slopes")
    if inner[0] < 2.0 * h:
        raise SubResolutionError(
            f"probing radius {inner[0]} is below twice the grid spacing {h}"
        )
    dist = _neighborhood_distances(E, domain).ravel()
    coords = domain.node_coords()
    cell = domain.cell_measure
    samples = []
    slopes = []
    for center in centers:
        c = np.asarray(center, dtype=float).reshape(-1)
        offsets = coords - c
        sq = np.einsum("ij,ij->i", offsets, offsets)
        for R in sorted(float(v) for v in outer_radii):
            in_window = sq <= (R * (1.0 + 1e-12)) ** 2
            window_dist = dist[in_window]
            ratios = []
            used = []
            for r in inner:
                if r >= R or R / r < scale_ratio_min:
                    continue
                mass = cell * float(np.count_nonzero(window_dist < r))
                ratio = mass / ball_volume(dim, R)
                if ratio <= 0:
                    continue
                ratios.append(ratio)
                used.append(r)
                samples.append(
                    ScaleWindowSample(
                        center=tuple(c),
                        outer_radius=R,
                        inner_radius=r,
                        volume_ratio=min(ratio, 1.0),
                    )
                )
            for k in range(len(used) - 1):
                slopes.append(
                    (math.log(ratios[k + 1]) - math.log(ratios[k]))
                    / (math.log(used[k + 1]) - math.log(used[k]))
                )
    if not slopes:
        raise ValueError("no window produced a usable slope")
    samples = tuple(samples)
    lower = DimensionEstimate(
        kind="codim_lower",
        value=min(slopes),
        samples=samples,
        scale_ratio_min=scale_ratio_min,
    )
    upper = DimensionEstimate(
        kind="codim_upper",
        value=max(slopes),
        samples=samples,
        scale_ratio_min=scale_ratio_min,
    )
    return lower, upper


def aikawa_critical_exponent(
    E: PointSet,
    domain: GridDomain,
    q_lo: float,
    q_hi: float,
    centers: Sequence,
    radii: Sequence[float],
    boundedness_threshold: float | None = None,
    tol: float = 1e-3,
    profile_points: int = 17,
) -> DimensionEstimate:
    """Largest exponent q for which the normalized singular integrals stay small.

    For each window B(x, r) the statistic is

        A(q; x, r) = r^q * sum_nodes dist^(-q) * h^n / |B(x, r)|

    with the node distance to E clamped below at h/2, and A(q) is the
    maximum over the supplied windows.  A(q) is nondecreasing in q; the
    reported value is the largest q in [q_lo, q_hi] with
    A(q) <= threshold, located by bisection.  The default threshold is
    ten times A(q_lo).

    Sets of positive measure are rejected: if more than half the nodes of
    some window sit at clamped distance the integrand carries no scaling
    information.
    """
    if not q_lo < q_hi:
        raise ValueError("need q_lo < q_hi")
    h = domain.spacing
    dim = domain.ambient_dim
    dist = np.maximum(_neighborhood_distances(E, domain), h / 2.0).ravel()
    coords = domain.node_coords()
    cell = domain.cell_measure
    windows = []
    for center in centers:
        c = np.asarray(center, dtype=float).reshape(-1)
        offsets = coords - c
        sq = np.einsum("ij,ij->i", offsets, offsets)
        for r in sorted(float(v) for v in radii):
            if r < 4.0 * h:
                raise SubResolutionError(
                    f"window radius {r} is too close to the grid spacing {h}"
                )
            sel = sq <= (r * (1.0 + 1e-12)) ** 2
            wdist = dist[sel]
            if wdist.size == 0:
                continue
            clamped = float(np.count_nonzero(wdist <= h / 2.0 * (1.0 + 1e-9)))
            if clamped / wdist.size > 0.5:
                raise ValueError(
                    "set occupies most of a window; positive-measure sets "
                    "carry no Aikawa scaling information"
                )
            windows.append((r, wdist))
    if not windows:
        raise ValueError("no usable window supplied")

    def statistic(q: float) -> float:
        best = 0.0
        for r, wdist in windows:
            val = r ** q * cell * float(np.sum(wdist ** (-q))) / ball_volume(dim, r)
            best = max(best, val)
        return best

    threshold = boundedness_threshold
    if threshold is None:
        threshold = 10.0 * statistic(q_lo)
    if statistic(q_lo) > threshold:
        raise ValueError("threshold excludes even q_lo; nothing to report")
    lo, hi = q_lo, q_hi
    if statistic(q_hi) <= threshold:
        lo = q_hi
    else:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if statistic(mid) <= threshold:
                lo = mid
            else:
                hi = mid
    qs = np.linspace(q_lo, q_hi, profile_points)
    profile = tuple((float(q), float(statistic(q))) for q in qs)
    return DimensionEstimate(
        kind="aikawa",
        value=float(lo),
        samples=(),
        scale_ratio_min=1.0,
        profile=profile,
    )


def hausdorff_codim_estimate(
    E: PointSet,
    center,
    outer_radius: float,
    cover_scales: Sequence[float],
    q_lo: float,
    q_hi: float,
    threshold: float = 0.5,
    tol: float = 1e-3,
) -> float:
    """Largest exponent whose tested cover content stays below a threshold.

    The normalized cover content of :func:`content_density_upper` is
    nondecreasing in q (cover radii are below the window radius), so
    bisection finds the largest q in [q_lo, q_hi] with content <=
    threshold.  Content dropping to zero at exponent q certifies a
    Hausdorff-type codimension of at least q, so this is a lower
    estimate of the Hausdorff codimension within the window.
    """
    if not q_lo < q_hi:
        raise ValueError("need q_lo < q_hi")

    def content(q):
        value, _ = content_density_upper(E, q, center, outer_radius, cover_scales)
        return value

    if content(q_lo) > threshold:
        raise ValueError("threshold excludes even q_lo; nothing to report")
    if content(q_hi) <= threshold:
        return float(q_hi)
    lo, hi = q_lo, q_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if content(mid) <= threshold:
            lo = mid
        else:
            hi = mid
    return float(lo)


def content_density_upper(
    E: PointSet,
    q: float,
    center,
    outer_radius: float,
    cover_scales: Sequence[float],
) -> tuple[float, tuple[tuple[float, float], ...]]:
    """Cheapest tested normalized cover content of codimension q.

    For each scale r a greedy maximal r-packing of ``E ∩ B(center, R)``
    is doubled into a 2r-ball cover, whose content sum
    ``sum_k rad_k^(-q) |B_k|`` is normalized by ``R^q / |B(center, R)|``.
    Returns the minimum over the tested scales together with the
    per-scale table; the minimum upper-bounds the true normalized
    Hausdorff-type content of the window.
    """
    c = np.asarray(center, dtype=float).reshape(-1)
    dim = E.ambient_dim
    R = float(outer_radius)
    scales = _check_probe_radii(E, cover_scales)
    table = []
    for r in scales:
        if r >= R:
            continue
        packing = maximal_packing(E, r, c, R)
        rad = 2.0 * r
        sigma = len(packing) * rad ** (-q) * ball_volume(dim, rad)
        normalized = sigma * R ** q / ball_volume(dim, R)
        table.append((r, normalized))
    if not table:
        raise ValueError("no cover scale below the window radius")
    value = min(v for _, v in table)
    return value, tuple(table)
