"""Full- and half-symbolic spaces over a planar digit set.

Points of the space are infinite digit sequences; computations work on
depth-K truncations standing for the cylinder of all continuations (the
representative continues with the first digit repeated).  The full-flavor
metric takes prefix ultrametrics in both coordinates; the half flavor
replaces the second coordinate by the distance of m-adic expansion values
and is a metric exactly when the digit set has no carry collisions, which
`check_nonoverlapping` semi-decides at finite depth.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._util import DEFAULT_BUDGET, power_table, power_threshold, relabel_first_occurrence, words_matrix
from .errors import BudgetExceededError, ValidationError

FLAVORS = ("full", "half")


@dataclass(frozen=True)
class SymbolicSystem:
    """Digit set in Z x {0..m-1} with the full or half metric flavor."""

    n: int
    m: int
    digits: tuple[tuple[int, int], ...]
    flavor: str = "full"
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 2 <= self.m <= self.n:
            raise ValidationError(f"need 2 <= m <= n, got n={self.n}, m={self.m}")
        if self.flavor not in FLAVORS:
            raise ValidationError(f"flavor must be one of {FLAVORS}, got {self.flavor!r}")
        digits = tuple((int(x), int(y)) for x, y in self.digits)
        object.__setattr__(self, "digits", digits)
        if not digits:
            raise ValidationError("digit set is empty")
        if len(set(digits)) != len(digits):
            raise ValidationError("digits must be distinct")
        for x, y in digits:
            if not 0 <= y < self.m:
                raise ValidationError(f"second coordinate {y} outside 0..{self.m - 1}")
        object.__setattr__(self, "_index", {d: i for i, d in enumerate(digits)})

    def index(self, digit) -> int:
        try:
            return self._index[tuple(digit)]
        except KeyError:
            raise ValidationError(f"unknown digit {digit!r}") from None

    def digit_ids(self) -> tuple:
        return self.digits

    def __len__(self):
        return len(self.digits)


@dataclass(frozen=True)
class SymbolicPoint:
    """Depth-K truncation standing for its cylinder's representative point."""

    word: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "word", tuple((int(x), int(y)) for x, y in self.word))

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def xseq(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.word)

    @property
    def yseq(self) -> tuple[int, ...]:
        return tuple(y for _, y in self.word)


def _coerce_point(p) -> SymbolicPoint:
    return p if isinstance(p, SymbolicPoint) else SymbolicPoint(tuple(p))


def _agreement(a, b) -> int:
    for i, (u, v) in enumerate(zip(a, b)):
        if u != v:
            return i
    return len(a)


def _pow(base: int, exponent: int) -> float:
    v = 1.0
    for _ in range(exponent):
        v = v / base
    return v


def _truncated_value(yseq, m: int) -> float:
    v = 0.0
    for y in reversed(yseq):
        v = (v + y) / m
    return v


def metric_full(p, q, n: int, m: int) -> float:
    """Prefix ultrametric max(n^-a, m^-b) on equal-depth truncations.

    a and b are the agreement lengths of the coordinate strings; a
    coordinate identical through the truncation contributes 0.
    """
    p, q = _coerce_point(p), _coerce_point(q)
    if p.depth != q.depth:
        raise ValidationError(f"depth mismatch: {p.depth} vs {q.depth}")
    ax = _agreement(p.xseq, q.xseq)
    ay = _agreement(p.yseq, q.yseq)
    dx = 0.0 if ax == p.depth else _pow(n, ax)
    dy = 0.0 if ay == p.depth else _pow(m, ay)
    return max(dx, dy)


def metric_half(p, q, n: int, m: int) -> float:
    """Quasi-metric max(n^-a, |value difference of m-adic expansions|)."""
    p, q = _coerce_point(p), _coerce_point(q)
    if p.depth != q.depth:
        raise ValidationError(f"depth mismatch: {p.depth} vs {q.depth}")
    ax = _agreement(p.xseq, q.xseq)
    dx = 0.0 if ax == p.depth else _pow(n, ax)
    dy = abs(_truncated_value(p.yseq, m) - _truncated_value(q.yseq, m))
    return max(dx, dy)


def check_nonoverlapping(system: SymbolicSystem, depth: int, budget: int = DEFAULT_BUDGET):
    """Search depth-K truncations for an exact m-adic carry collision.

    Returns (True, None) when no pair of distinct depth-K words with equal
    first-coordinate streams has expansion values exactly one ulp (m^-K)
    apart with a carryable continuation; otherwise (False, witness pair).
    A True answer is a semi-decision: it rules out collisions among depth-K
    carry patterns only.
    """
    if system.flavor != "half":
        raise ValidationError("the non-overlapping condition applies to the half flavor")
    if depth < 1:
        raise ValidationError(f"depth must be >= 1, got {depth}")
    n_digits = len(system.digits)
    if n_digits**depth > budget:
        raise BudgetExceededError(
            f"depth {depth} needs {n_digits ** depth} words, budget is {budget}"
        )
    # an exact collision must keep carrying forever: some x value needs both
    # the top digit (x, m-1) and the bottom digit (x, 0)
    tops = {x for x, y in system.digits if y == system.m - 1}
    bottoms = {x for x, y in system.digits if y == 0}
    if not tops & bottoms:
        return True, None
    ulp = Fraction(1, system.m**depth)
    groups: dict[tuple, list] = {}
    for word in itertools.product(system.digits, repeat=depth):
        xseq = tuple(x for x, _ in word)
        value = Fraction(0)
        for i, (_, y) in enumerate(word, start=1):
            value += Fraction(y, system.m**i)
        groups.setdefault(xseq, []).append((value, word))
    for members in groups.values():
        members.sort()
        for (v1, w1), (v2, w2) in zip(members, members[1:]):
            if v2 - v1 == ulp:
                return False, (SymbolicPoint(w1), SymbolicPoint(w2))
    return True, None


def enumerate_cylinders(system: SymbolicSystem, k: int, budget: int = DEFAULT_BUDGET):
    """All rank-k words as SymbolicPoint prefixes, lexicographic digit order."""
    if k < 0:
        raise ValidationError(f"rank must be >= 0, got {k}")
    if len(system.digits) ** k > budget:
        raise BudgetExceededError(
            f"rank {k} needs {len(system.digits) ** k} cylinders, budget is {budget}"
        )
    return [SymbolicPoint(word) for word in itertools.product(system.digits, repeat=k)]


@dataclass
class SymbolicCloud:
    """Truncated-word cloud: one representative per rank-K word."""

    words: np.ndarray
    xcodes: np.ndarray
    ycodes: np.ndarray
    yvalues: np.ndarray
    depth: int
    system: SymbolicSystem

    def __len__(self):
        return self.words.shape[0]

    def take(self, indices) -> "SymbolicCloud":
        return SymbolicCloud(
            words=self.words[indices],
            xcodes=self.xcodes[indices],
            ycodes=self.ycodes[indices],
            yvalues=self.yvalues[indices],
            depth=self.depth,
            system=self.system,
        )

    def point_at(self, i: int) -> SymbolicPoint:
        return SymbolicPoint(tuple(self.system.digits[j] for j in self.words[i]))


def symbolic_point_cloud(system: SymbolicSystem, depth: int, budget: int = DEFAULT_BUDGET) -> SymbolicCloud:
    """Cloud of all rank-K truncations with per-coordinate code matrices."""
    if depth < 0:
        raise ValidationError(f"depth must be >= 0, got {depth}")
    n_digits = len(system.digits)
    if n_digits**depth > budget:
        raise BudgetExceededError(
            f"depth {depth} needs {n_digits ** depth} words, budget is {budget}"
        )
    words = words_matrix(n_digits, depth)
    xvals = np.asarray([x for x, _ in system.digits], dtype=np.int16)
    yvals = np.asarray([y for _, y in system.digits], dtype=np.int16)
    xcodes = xvals[words]
    ycodes = yvals[words]
    yvalues = np.zeros(words.shape[0])
    for col in range(depth - 1, -1, -1):
        yvalues = (yvalues + ycodes[:, col]) / system.m
    return SymbolicCloud(
        words=words, xcodes=xcodes, ycodes=ycodes, yvalues=yvalues, depth=depth, system=system
    )


def symbolic_depth_for_delta(system: SymbolicSystem, delta: float) -> int:
    """Truncation depth for a target scale.

    Full flavor: cylinder diameter m^-K <= delta/4 (distances from truncations
    are then exact whenever they differ).  Half flavor: the additive value
    error m^-K must drop below delta/100.
    """
    if delta <= 0:
        raise ValidationError(f"delta must be positive, got {delta}")
    if system.flavor == "full":
        return power_threshold(system.m, delta / 4)
    return power_threshold(system.m, delta / 100, strict=True)


def symbolic_pack(cloud: SymbolicCloud, delta: float, metric: str | None = None) -> np.ndarray:
    """Greedy scan packing in the lambda or rho metric; returns selected indices.

    In the full flavor "within 2*delta" is an equivalence on truncations, so
    the scan reduces to keeping the first word of each prefix-pair class.
    """
    if len(cloud) == 0:
        raise ValidationError("cannot pack an empty cloud")
    metric = metric or cloud.system.flavor
    if metric not in FLAVORS:
        raise ValidationError(f"unknown symbolic metric {metric!r}")
    t = 2.0 * delta
    k = cloud.depth
    ax = min(power_threshold(cloud.system.n, t), k)
    if metric == "full":
        by = min(power_threshold(cloud.system.m, t), k)
        key = np.concatenate([cloud.xcodes[:, :ax], cloud.ycodes[:, :by]], axis=1)
        if key.shape[1] == 0:
            return np.asarray([0], dtype=np.int64)
        _, first = np.unique(key, axis=0, return_index=True)
        return np.sort(first).astype(np.int64)
    # half flavor: group by x prefix class, then scan expansion values
    xkey = cloud.xcodes[:, :ax]
    if xkey.shape[1] == 0:
        group = np.zeros(len(cloud), dtype=np.int64)
    else:
        _, group = np.unique(xkey, axis=0, return_inverse=True)
    chosen: dict[int, list[float]] = {}
    selected = []
    values = cloud.yvalues
    for i in range(len(cloud)):
        g = int(group[i])
        v = float(values[i])
        bucket = chosen.setdefault(g, [])
        pos = bisect_left(bucket, v)
        ok = True
        if pos < len(bucket) and abs(bucket[pos] - v) <= t:
            ok = False
        if ok and pos > 0 and abs(bucket[pos - 1] - v) <= t:
            ok = False
        if ok:
            insort(bucket, v)
            selected.append(i)
    return np.asarray(selected, dtype=np.int64)


def symbolic_components(
    system: SymbolicSystem, epsilon: float, depth: int | None, budget: int = DEFAULT_BUDGET
):
    """Word matrix, class labels, and depth of the epsilon-component partition.

    Cylinder separation uses closed-form minimum distances between rank-k
    cylinders: prefix ultrametrics per coordinate (full) or the gap between
    expansion-value intervals of width m^-k (half).
    """
    if epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    rule_depth = power_threshold(system.m, epsilon / 4)
    if depth is None:
        depth = rule_depth
    elif depth < rule_depth:
        raise ValidationError(
            f"depth {depth} too shallow for epsilon {epsilon}: cylinder diameter exceeds epsilon/4"
        )
    n_digits = len(system.digits)
    if n_digits**depth > budget:
        raise BudgetExceededError(
            f"depth {depth} needs {n_digits ** depth} words, budget is {budget}"
        )
    cloud = symbolic_point_cloud(system, depth, budget)
    ax = min(power_threshold(system.n, epsilon), depth)
    if system.flavor == "full":
        by = min(power_threshold(system.m, epsilon), depth)
        key = np.concatenate([cloud.xcodes[:, :ax], cloud.ycodes[:, :by]], axis=1)
        if key.shape[1] == 0:
            labels = np.zeros(len(cloud), dtype=np.int64)
        else:
            _, inverse = np.unique(key, axis=0, return_inverse=True)
            labels = relabel_first_occurrence(inverse)
        return cloud.words, labels, depth
    xkey = cloud.xcodes[:, :ax]
    if xkey.shape[1] == 0:
        group = np.zeros(len(cloud), dtype=np.int64)
    else:
        _, group = np.unique(xkey, axis=0, return_inverse=True)
    tail = _pow(system.m, depth)
    labels = np.empty(len(cloud), dtype=np.int64)
    next_label = 0
    for g in range(int(group.max()) + 1 if len(cloud) else 0):
        members = np.nonzero(group == g)[0]
        order = members[np.argsort(cloud.yvalues[members], kind="stable")]
        prev_v = None
        for idx in order:
            v = float(cloud.yvalues[idx])
            if prev_v is None or v - (prev_v + tail) > epsilon:
                label = next_label
                next_label += 1
            labels[idx] = label
            prev_v = v
    return cloud.words, relabel_first_occurrence(labels), depth


def cylinder_min_distances(cloud: SymbolicCloud, index: int) -> np.ndarray:
    """Closed-form minimum distance from cylinder `index` to every cylinder."""
    system = cloud.system
    k = cloud.depth
    pow_n = power_table(system.n, k)
    pow_m = power_table(system.m, k)

    def agreements(codes):
        neq = codes != codes[index]
        any_neq = neq.any(axis=1)
        first = np.where(any_neq, neq.argmax(axis=1), k)
        return first

    ax = agreements(cloud.xcodes)
    dx = np.where(ax == k, 0.0, pow_n[np.minimum(ax, k)])
    if system.flavor == "full":
        ay = agreements(cloud.ycodes)
        dy = np.where(ay == k, 0.0, pow_m[np.minimum(ay, k)])
    else:
        tail = pow_m[k]
        dy = np.maximum(0.0, np.abs(cloud.yvalues - cloud.yvalues[index]) - tail)
    return np.maximum(dx, dy)


def cylinder_diameter(system: SymbolicSystem, depth: int) -> float:
    """Diameter of a rank-k cylinder in the instance metric: m^-k for both flavors."""
    return _pow(system.m, depth)
