"""Interval maps, diagonal IFS systems on the unit cube, and pillar geometry.

A sponge system is a finite family of coordinatewise-affine contractions of
[0,1]^d ("digits"); a similar IFS is the special case where every digit
contracts all coordinates by the same ratio.  Map parameters may be exact
rationals (`fractions.Fraction`) or floats; disjointness checks are exact in
the rational case and use a 1e-12 tolerance otherwise.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import ValidationError

#: tolerance for endpoint comparisons when map parameters are floats
FLOAT_TOL = 1e-12


def _is_exact(*values) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


@dataclass(frozen=True)
class IntervalMap:
    """One-dimensional contracting similarity of [0,1].

    Maps x to offset + ratio*x (orientation +1) or offset + ratio*(1-x)
    (orientation -1); `offset` is the left endpoint of the image either way.
    """

    ratio: float | Fraction
    offset: float | Fraction = 0
    orientation: int = 1

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise ValidationError(f"contraction ratio must lie in (0,1), got {self.ratio}")
        if self.orientation not in (1, -1):
            raise ValidationError(f"orientation must be +1 or -1, got {self.orientation}")
        if self.offset < -FLOAT_TOL or self.offset + self.ratio > 1 + FLOAT_TOL:
            raise ValidationError(
                f"image interval [{self.offset}, {self.offset + self.ratio}] leaves [0,1]"
            )

    @property
    def image(self):
        """Closed image interval of [0,1] as an (lo, hi) pair."""
        return (self.offset, self.offset + self.ratio)

    def slope_intercept(self):
        """Signed-slope affine form (a, b) with f(x) = a*x + b."""
        if self.orientation > 0:
            return self.ratio, self.offset
        return -self.ratio, self.offset + self.ratio

    def __call__(self, x):
        a, b = self.slope_intercept()
        return a * x + b

    def compose(self, other: "IntervalMap") -> "IntervalMap":
        """Composition self o other, again as an IntervalMap."""
        a1, b1 = self.slope_intercept()
        a2, b2 = other.slope_intercept()
        a, b = a1 * a2, a1 * b2 + b1
        if a > 0:
            return IntervalMap(a, b, 1)
        return IntervalMap(-a, a + b, -1)


def _open_intervals_overlap(lo1, hi1, lo2, hi2) -> bool:
    """Whether the open intervals (lo1,hi1) and (lo2,hi2) intersect.

    Exact when all endpoints are rational; otherwise an overlap shorter than
    FLOAT_TOL counts as empty so round-off cannot produce false positives.
    """
    tol = 0 if _is_exact(lo1, hi1, lo2, hi2) else FLOAT_TOL
    return min(hi1, hi2) - max(lo1, lo2) > tol


@dataclass(frozen=True)
class DiagonalMap:
    """A coordinatewise-affine contraction of [0,1]^d with a digit label."""

    digit: object
    components: tuple[IntervalMap, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValidationError("digit map needs at least one coordinate")

    @property
    def dimension(self) -> int:
        return len(self.components)

    def ratios(self) -> tuple:
        return tuple(c.ratio for c in self.components)

    def image_box(self) -> tuple:
        return tuple(c.image for c in self.components)

    def __call__(self, point):
        return tuple(c(x) for c, x in zip(self.components, point))


@dataclass(frozen=True)
class CylinderWord:
    """A finite word of digit identifiers; rank = length."""

    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))

    @property
    def rank(self) -> int:
        return len(self.letters)

    def extend(self, letter) -> "CylinderWord":
        return CylinderWord(self.letters + (letter,))

    def is_prefix_of(self, other: "CylinderWord") -> bool:
        return other.letters[: len(self.letters)] == self.letters

    def __iter__(self):
        return iter(self.letters)

    def __len__(self):
        return len(self.letters)


@dataclass(frozen=True)
class Pillar:
    """Image box of the unit cube under a composed word of digit maps."""

    box: tuple
    word: CylinderWord
    shortest_side: object

    def side_lengths(self) -> tuple:
        return tuple(hi - lo for lo, hi in self.box)

    def diameter(self) -> float:
        return math.sqrt(sum(float(hi - lo) ** 2 for lo, hi in self.box))


@dataclass(frozen=True)
class _BoxSystem:
    """Shared machinery of sponge systems and similar IFSs."""

    dimension: int
    digits: tuple[DiagonalMap, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(self.digits))
        if not self.digits:
            raise ValidationError("system needs at least one digit")
        ids = [d.digit for d in self.digits]
        if len(set(ids)) != len(ids):
            raise ValidationError("digit identifiers must be distinct")
        for d in self.digits:
            if d.dimension != self.dimension:
                raise ValidationError(
                    f"digit {d.digit!r} has {d.dimension} coordinates, expected {self.dimension}"
                )
        object.__setattr__(self, "_index", {d.digit: i for i, d in enumerate(self.digits)})

    def index(self, digit_id) -> int:
        try:
            return self._index[digit_id]
        except KeyError:
            raise ValidationError(f"unknown digit identifier {digit_id!r}") from None

    def digit_ids(self) -> tuple:
        return tuple(d.digit for d in self.digits)

    def __len__(self):
        return len(self.digits)

    def max_ratio(self, coordinate: int):
        """Largest contraction ratio among digits in one coordinate (0-based)."""
        return max(d.components[coordinate].ratio for d in self.digits)

    def max_pillar_diameter(self, depth: int) -> float:
        """Upper bound on the Euclidean diameter of any depth-k pillar."""
        return math.sqrt(
            sum(float(self.max_ratio(i)) ** (2 * depth) for i in range(self.dimension))
        )


@dataclass(frozen=True)
class SpongeSystem(_BoxSystem):
    """Diagonal IFS on [0,1]^d given by a digit set of coordinatewise maps."""

    @property
    def r_star(self) -> float:
        """Smallest last-coordinate ratio over digits."""
        return float(min(d.components[-1].ratio for d in self.digits))

    @property
    def r_upper(self) -> float:
        """Largest first-coordinate ratio over digits."""
        return float(max(d.components[0].ratio for d in self.digits))


@dataclass(frozen=True)
class SimilarIFS(_BoxSystem):
    """Axis-aligned similitude IFS: each digit contracts all coordinates equally.

    Reflections are allowed per coordinate; rotations mixing coordinates are
    not modeled.
    """

    osc_open_set: tuple | None = None

    def __post_init__(self):
        super().__post_init__()
        for d in self.digits:
            rs = set(d.ratios())
            if len(rs) != 1:
                raise ValidationError(
                    f"digit {d.digit!r} is not a similitude: ratios {d.ratios()}"
                )

    def ratios(self) -> tuple:
        """Per-digit contraction ratio."""
        return tuple(d.components[0].ratio for d in self.digits)


def validate_coordinate_ordering(sponge: _BoxSystem) -> bool:
    """Whether every digit has strictly decreasing ratios along coordinates."""
    for d in sponge.digits:
        rs = d.ratios()
        for a, b in zip(rs, rs[1:]):
            if not a > b:
                return False
    return True


def project_ifs(system: _BoxSystem, j: int) -> list[tuple[IntervalMap, ...]]:
    """Distinct j-prefixes of the digit maps, first-occurrence order.

    Prefixes are compared by exact map parameters, so duplicate digit columns
    collapse to a single projected map.
    """
    if not 1 <= j <= system.dimension:
        raise ValidationError(f"projection index {j} outside 1..{system.dimension}")
    seen = set()
    out = []
    for d in system.digits:
        prefix = d.components[:j]
        if prefix not in seen:
            seen.add(prefix)
            out.append(prefix)
    return out


def validate_neat_projection(sponge: _BoxSystem) -> bool:
    """Whether every coordinate-prefix projection satisfies the open set
    condition with the open unit cube: projected open image boxes must be
    pairwise disjoint at every level j.

    Proper prefixes are deduplicated by map value (digits sharing a column
    project to one map); at the top level every digit counts separately, so
    two distinct digits with identical map tuples fail.
    """
    for j in range(1, sponge.dimension + 1):
        if j < sponge.dimension:
            prefixes = project_ifs(sponge, j)
        else:
            prefixes = [d.components for d in sponge.digits]
        boxes = [tuple(m.image for m in prefix) for prefix in prefixes]
        for b1, b2 in itertools.combinations(boxes, 2):
            if all(
                _open_intervals_overlap(lo1, hi1, lo2, hi2)
                for (lo1, hi1), (lo2, hi2) in zip(b1, b2)
            ):
                return False
    return True


def check_osc_intervals(maps: Sequence[IntervalMap]) -> bool:
    """Open set condition on [0,1] for a list of interval maps: the open
    images of (0,1) must be pairwise disjoint."""
    if not maps:
        raise ValidationError("need at least one map")
    for m1, m2 in itertools.combinations(maps, 2):
        if _open_intervals_overlap(*m1.image, *m2.image):
            return False
    return True


def check_osc_boxes(system: _BoxSystem) -> bool:
    """Open set condition with the open unit cube: the open image boxes of
    the digit maps must be pairwise disjoint."""
    boxes = [d.image_box() for d in system.digits]
    for b1, b2 in itertools.combinations(boxes, 2):
        if all(
            _open_intervals_overlap(lo1, hi1, lo2, hi2)
            for (lo1, hi1), (lo2, hi2) in zip(b1, b2)
        ):
            return False
    return True


def _as_word(system: _BoxSystem, word) -> CylinderWord:
    if isinstance(word, CylinderWord):
        return word
    return CylinderWord(tuple(word))


def pillar(system: _BoxSystem, word) -> Pillar:
    """Image box of [0,1]^d under the left-to-right composition of the word."""
    word = _as_word(system, word)
    # identity affine form per coordinate; composition keeps exact rationals
    slopes = [1] * system.dimension
    intercepts = [0] * system.dimension
    for letter in word.letters:
        d = system.digits[system.index(letter)]
        for i, comp in enumerate(d.components):
            a, b = comp.slope_intercept()
            intercepts[i] = intercepts[i] + slopes[i] * b
            slopes[i] = slopes[i] * a
    box = []
    for a, b in zip(slopes, intercepts):
        lo, hi = (b, a + b) if a > 0 else (a + b, b)
        box.append((lo, hi))
    shortest = min(hi - lo for lo, hi in box)
    return Pillar(box=tuple(box), word=word, shortest_side=shortest)


def children(system: _BoxSystem, word) -> list[CylinderWord]:
    """All one-letter extensions of the word, in digit order."""
    word = _as_word(system, word)
    for letter in word.letters:
        system.index(letter)
    return [word.extend(d.digit) for d in system.digits]
