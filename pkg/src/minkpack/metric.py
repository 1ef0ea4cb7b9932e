"""Packing numbers, epsilon-components, Hausdorff distance, and content
estimates on finite attractor approximations.

Attractors are approximated by one representative point per depth-k cylinder
(the image of the cube center).  The depth rule "max pillar diameter <=
delta/4" bounds the surrogate error of both packing counts and component
structure; callers that pass an explicit shallower depth get an error.

Greedy packing is maximal, not maximum: the count is within a
metric-doubling factor of the true packing number, which is all the
two-sided comparability checks downstream need.  Exactness is not promised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from ._util import DEFAULT_BUDGET, relabel_first_occurrence, words_matrix
from .errors import BudgetExceededError, ValidationError
from .ifs import CylinderWord
from .measures import MeasurableSet
from .symbolic import (
    SymbolicCloud,
    SymbolicSystem,
    symbolic_components,
    symbolic_depth_for_delta,
    symbolic_pack,
)

_METRIC_CODES = {"euclidean": 0, "max": 1}


@dataclass(frozen=True)
class CoordinateScaling:
    """Coordinatewise affine map x_i -> factors[i] * x_i + offsets[i]."""

    factors: tuple
    offsets: tuple = None

    def __post_init__(self):
        factors = tuple(float(f) for f in self.factors)
        if any(f == 0 for f in factors):
            raise ValidationError("scaling factors must be nonzero")
        offsets = self.offsets
        offsets = (0.0,) * len(factors) if offsets is None else tuple(float(o) for o in offsets)
        if len(offsets) != len(factors):
            raise ValidationError("factors and offsets must have equal length")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def identity(cls, d: int) -> "CoordinateScaling":
        return cls(factors=(1.0,) * d)

    def apply_points(self, points: np.ndarray) -> np.ndarray:
        return points * np.asarray(self.factors) + np.asarray(self.offsets)

    def apply_boxes(self, lo: np.ndarray, hi: np.ndarray):
        a = self.apply_points(lo)
        b = self.apply_points(hi)
        return np.minimum(a, b), np.maximum(a, b)

    @property
    def max_stretch(self) -> float:
        return max(abs(f) for f in self.factors)


@dataclass
class PointCloud:
    """One representative point per depth-k cylinder, in lexicographic word order."""

    points: np.ndarray
    words: np.ndarray
    depth: int
    system: object

    def __len__(self):
        return self.points.shape[0]

    def word_at(self, i: int) -> CylinderWord:
        ids = self.system.digit_ids()
        return CylinderWord(tuple(ids[j] for j in self.words[i]))

    def take(self, indices) -> "PointCloud":
        return PointCloud(
            points=self.points[indices],
            words=self.words[indices],
            depth=self.depth,
            system=self.system,
        )


@dataclass
class PackingResult:
    """A maximal packing: selected centers are pairwise more than 2*delta apart."""

    delta: float
    count: int
    centers: np.ndarray


@dataclass
class ComponentPartition:
    """Partition of the depth-k cylinder words into chained-proximity classes."""

    epsilon: float
    depth: int
    classes: list[MeasurableSet]
    labels: np.ndarray
    system: object


def _digit_affine(system):
    """Per-digit, per-coordinate (slope, intercept) float arrays."""
    n = len(system.digits)
    d = system.dimension
    slopes = np.empty((n, d))
    intercepts = np.empty((n, d))
    for i, dig in enumerate(system.digits):
        for a, comp in enumerate(dig.components):
            s, b = comp.slope_intercept()
            slopes[i, a] = float(s)
            intercepts[i, a] = float(b)
    return slopes, intercepts


def _check_budget(system, depth: int, budget: int) -> int:
    count = len(system.digits) ** depth
    if count > budget:
        raise BudgetExceededError(
            f"depth {depth} needs {count} cylinders, budget is {budget}"
        )
    return count


def sample_attractor(system, depth: int, budget: int = DEFAULT_BUDGET) -> PointCloud:
    """Representative cloud: image of the cube center under every depth-k word."""
    if depth < 0:
        raise ValidationError(f"depth must be >= 0, got {depth}")
    _check_budget(system, depth, budget)
    n = len(system.digits)
    d = system.dimension
    slopes, intercepts = _digit_affine(system)
    pts = np.full((1, d), 0.5)
    words = np.empty((1, 0), dtype=np.int16)
    for _ in range(depth):
        cur = pts.shape[0]
        new_pts = np.empty((n * cur, d))
        new_words = np.empty((n * cur, words.shape[1] + 1), dtype=np.int16)
        for a in range(n):
            sl = slice(a * cur, (a + 1) * cur)
            new_pts[sl] = pts * slopes[a] + intercepts[a]
            new_words[sl, 0] = a
            new_words[sl, 1:] = words
        pts, words = new_pts, new_words
    return PointCloud(points=pts, words=words, depth=depth, system=system)


def pillar_boxes(system, depth: int, budget: int = DEFAULT_BUDGET):
    """(lo, hi) arrays of all depth-k pillar boxes, lexicographic word order."""
    _check_budget(system, depth, budget)
    n = len(system.digits)
    d = system.dimension
    slopes, intercepts = _digit_affine(system)
    lo = np.zeros((1, d))
    hi = np.ones((1, d))
    for _ in range(depth):
        cur = lo.shape[0]
        new_lo = np.empty((n * cur, d))
        new_hi = np.empty((n * cur, d))
        for a in range(n):
            sl = slice(a * cur, (a + 1) * cur)
            img1 = lo * slopes[a] + intercepts[a]
            img2 = hi * slopes[a] + intercepts[a]
            new_lo[sl] = np.minimum(img1, img2)
            new_hi[sl] = np.maximum(img1, img2)
        lo, hi = new_lo, new_hi
    return lo, hi


def depth_for_delta(system, delta: float, budget: int = DEFAULT_BUDGET, transform=None) -> int:
    """Smallest depth whose pillar diameter is at most delta/4.

    For symbolic systems the cylinder diameter rule of the flavor applies.
    Raises BudgetExceededError when that depth needs more cylinders than the
    budget allows.
    """
    if delta <= 0:
        raise ValidationError(f"delta must be positive, got {delta}")
    if isinstance(system, SymbolicSystem):
        depth = symbolic_depth_for_delta(system, delta)
    else:
        stretch = transform.max_stretch if transform is not None else 1.0
        depth = 0
        while stretch * system.max_pillar_diameter(depth) > delta / 4:
            depth += 1
            if depth > 256:
                raise ValidationError("depth rule failed to terminate")
    _check_budget(system, depth, budget)
    return depth


def _as_point_array(cloud) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.points
    arr = np.asarray(cloud, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    return arr


def greedy_packing(cloud, delta: float, metric: str | None = None) -> PackingResult:
    """Maximal packing by a deterministic scan in the cloud's stored order.

    A point is selected iff its distance to every previously selected center
    strictly exceeds 2*delta (disjoint closed balls of radius delta).
    """
    if delta <= 0:
        raise ValidationError(f"delta must be positive, got {delta}")
    if isinstance(cloud, SymbolicCloud):
        centers = symbolic_pack(cloud, delta, metric)
    else:
        points = _as_point_array(cloud)
        if points.shape[0] == 0:
            raise ValidationError("cannot pack an empty cloud")
        metric = metric or "euclidean"
        if metric not in _METRIC_CODES:
            raise ValidationError(f"unknown metric {metric!r}")
        centers = _backend.kernels.pack_greedy(points, float(delta), _METRIC_CODES[metric])
    return PackingResult(delta=float(delta), count=int(len(centers)), centers=centers)


def max_packing_exhaustive(points, delta: float, metric: str = "euclidean") -> int:
    """Exact maximum packing count by exhaustive search; small instances only."""
    pts = _as_point_array(points)
    n = pts.shape[0]
    if n == 0:
        raise ValidationError("cannot pack an empty cloud")
    if n > 64:
        raise ValidationError(f"exhaustive oracle is limited to 64 points, got {n}")
    t = 2.0 * delta
    if metric == "euclidean":
        close = lambda i, j: float(np.sum((pts[i] - pts[j]) ** 2)) <= t * t
    elif metric == "max":
        close = lambda i, j: float(np.max(np.abs(pts[i] - pts[j]))) <= t
    else:
        raise ValidationError(f"unknown metric {metric!r}")
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if close(i, j):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    memo: dict[int, int] = {}

    def best(avail: int) -> int:
        if avail == 0:
            return 0
        got = memo.get(avail)
        if got is not None:
            return got
        v = (avail & -avail).bit_length() - 1
        without = best(avail & ~(1 << v))
        with_v = 1 + best(avail & ~(1 << v) & ~adj[v])
        out = max(without, with_v)
        memo[avail] = out
        return out

    return best((1 << n) - 1)


def _classes_from_labels(system, words: np.ndarray, labels: np.ndarray) -> list[MeasurableSet]:
    ids = system.digit_ids()
    n_classes = int(labels.max()) + 1 if len(labels) else 0
    groups: list[list[CylinderWord]] = [[] for _ in range(n_classes)]
    for i, lab in enumerate(labels):
        groups[lab].append(CylinderWord(tuple(ids[j] for j in words[i])))
    return [MeasurableSet(tuple(g)) for g in groups]


def epsilon_components(
    system,
    epsilon: float,
    depth: int | None = None,
    budget: int = DEFAULT_BUDGET,
    metric: str = "euclidean",
    transform=None,
) -> ComponentPartition:
    """Partition depth-k cylinders by chains of gaps at most epsilon.

    Two cylinders are joined when the closed-form minimum distance between
    their boxes is <= epsilon; classes are the transitive closure.  The box
    surrogate can over-connect by at most twice the pillar diameter, which
    the depth rule keeps below epsilon/2.
    """
    if epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    if isinstance(system, SymbolicSystem):
        words, labels, depth = symbolic_components(system, epsilon, depth, budget)
    else:
        if depth is None:
            depth = depth_for_delta(system, epsilon, budget, transform)
        else:
            stretch = transform.max_stretch if transform is not None else 1.0
            if stretch * system.max_pillar_diameter(depth) > epsilon / 4:
                raise ValidationError(
                    f"depth {depth} too shallow for epsilon {epsilon}: pillar diameter "
                    f"exceeds epsilon/4"
                )
            _check_budget(system, depth, budget)
        lo, hi = pillar_boxes(system, depth, budget)
        if transform is not None:
            lo, hi = transform.apply_boxes(lo, hi)
        roots = _backend.kernels.box_components(lo, hi, float(epsilon), _METRIC_CODES[metric])
        labels = relabel_first_occurrence(roots)
        words = words_matrix(len(system.digits), depth)
    classes = _classes_from_labels(system, words, labels)
    return ComponentPartition(
        epsilon=float(epsilon), depth=depth, classes=classes, labels=labels, system=system
    )


def word_keys(words: np.ndarray, upto: int, base: int) -> np.ndarray:
    """Lexicographic rank of each word prefix of length `upto`."""
    keys = np.zeros(words.shape[0], dtype=np.int64)
    for col in range(upto):
        keys = keys * base + words[:, col]
    return keys


def hausdorff_distance(a, b, metric: str = "euclidean") -> float:
    """Max of the two directed sup-min distances between point sets."""
    pa = _as_point_array(a)
    pb = _as_point_array(b)
    if pa.shape[0] == 0 or pb.shape[0] == 0:
        raise ValidationError("point sets must be nonempty")
    if metric not in _METRIC_CODES:
        raise ValidationError(f"unknown metric {metric!r}")

    def directed(x, y):
        worst = 0.0
        chunk = max(1, 10_000_000 // max(1, y.shape[0]))
        for start in range(0, x.shape[0], chunk):
            block = x[start : start + chunk]
            diff = block[:, None, :] - y[None, :, :]
            if metric == "euclidean":
                dist = np.sqrt((diff * diff).sum(axis=2))
            else:
                dist = np.abs(diff).max(axis=2)
            worst = max(worst, float(dist.min(axis=1).max()))
        return worst

    return max(directed(pa, pb), directed(pb, pa))


def minkowski_content_estimate(
    cloud, delta: float, grid_step: float, cell_budget: int = 1 << 26
) -> float:
    """Normalized volume of the delta-neighborhood on a grid of the given step.

    Counts grid cells (clipped to [-delta, 1+delta]^n) whose center lies
    within delta of some cloud point and returns count * step^n / delta^n.
    """
    if delta <= 0 or grid_step <= 0:
        raise ValidationError("delta and grid_step must be positive")
    if grid_step > delta / 8:
        raise ValidationError(f"grid_step {grid_step} exceeds delta/8 = {delta / 8}")
    points = _as_point_array(cloud)
    n, d = points.shape
    if n == 0:
        raise ValidationError("cloud is empty")
    origin = np.full(d, -delta)
    extent = 1.0 + 2.0 * delta
    dims = np.full(d, int(math.ceil(extent / grid_step)), dtype=np.int64)
    total = int(dims.prod())
    if total > cell_budget:
        raise BudgetExceededError(f"grid needs {total} cells, budget is {cell_budget}")
    count = _backend.kernels.grid_mark_count(points, float(delta), float(grid_step), origin, dims)
    return count * grid_step**d / delta**d
