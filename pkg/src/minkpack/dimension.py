"""Moran-equation solvers and box-dimension slope fits.

The scalar Moran equation sum_i r_i^s = 1 and its level-by-level sponge
variant are solved by bisection: every map involved is strictly decreasing
in the exponent, so bracketing is unconditional.  These solves are cold
paths; robustness beats speed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .ifs import (
    SpongeSystem,
    ValidationError,
    project_ifs,
    validate_coordinate_ordering,
    validate_neat_projection,
)

BISECTION_TOL = 1e-12
BISECTION_MAX_ITER = 200


@dataclass(frozen=True)
class BetaSequence:
    """Per-coordinate exponents of a sponge; their sum is the box dimension."""

    betas: tuple[float, ...]
    tolerance: float = BISECTION_TOL

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))

    @property
    def alphas(self) -> tuple[float, ...]:
        out, acc = [], 0.0
        for b in self.betas:
            acc += b
            out.append(acc)
        return tuple(out)

    @property
    def box_dimension(self) -> float:
        return self.alphas[-1]


@dataclass(frozen=True)
class DimensionFit:
    """Least-squares slope of log(count) against -log(delta)."""

    samples: tuple
    slope: float
    residual: float


def _bisect_decreasing(g, lo: float, hi: float, tol: float = BISECTION_TOL) -> float:
    """Root of a strictly decreasing g on [lo, hi] with g(lo) >= 0 >= g(hi)."""
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_similarity_dimension(ratios: Sequence[float], tol: float = BISECTION_TOL) -> float:
    """The unique s >= 0 with sum_i ratios[i]^s = 1."""
    ratios = [float(r) for r in ratios]
    if not ratios:
        raise ValidationError("need at least one contraction ratio")
    if any(not 0 < r < 1 for r in ratios):
        raise ValidationError(f"ratios must lie in (0,1), got {ratios}")
    if len(ratios) == 1:
        return 0.0
    r_max = max(ratios)
    hi = math.log(len(ratios)) / math.log(1.0 / r_max)
    return _bisect_decreasing(lambda s: sum(r**s for r in ratios) - 1.0, 0.0, hi, tol)


def _level_sum(prefixes, betas: Sequence[float], beta_j: float) -> float:
    """Defining sum of the level-j Moran equation at a candidate exponent."""
    j = len(betas) + 1
    total = 0.0
    for prefix in prefixes:
        term = 1.0
        for k in range(j - 1):
            term *= float(prefix[k].ratio) ** betas[k]
        term *= float(prefix[j - 1].ratio) ** beta_j
        total += term
    return total


def solve_beta_sequence(sponge: SpongeSystem, tol: float = BISECTION_TOL) -> BetaSequence:
    """Solve the inductive level-by-level Moran equations of a sponge.

    Level j fixes beta_1..beta_{j-1} and solves for the unique beta_j > 0
    making the sum over distinct j-prefixes of prod_k ratio_k^beta_k equal 1.
    Requires the coordinate ordering and neat projection conditions.
    """
    if not validate_coordinate_ordering(sponge):
        raise ValidationError(
            "coordinate ordering condition violated: some digit lacks strictly "
            "decreasing ratios along coordinates"
        )
    if not validate_neat_projection(sponge):
        raise ValidationError(
            "neat projection condition violated: projected open image boxes overlap"
        )
    betas: list[float] = []
    for j in range(1, sponge.dimension + 1):
        prefixes = project_ifs(sponge, j)
        if len(prefixes) == 1:
            betas.append(0.0)
            continue
        r_max = max(float(p[j - 1].ratio) for p in prefixes)
        hi = math.log(len(prefixes)) / math.log(1.0 / r_max)
        beta_j = _bisect_decreasing(
            lambda b: _level_sum(prefixes, betas, b) - 1.0, 0.0, hi, tol
        )
        betas.append(beta_j)
    return BetaSequence(betas=tuple(betas), tolerance=tol)


def moran_residuals(sponge: SpongeSystem, betas: BetaSequence) -> list[float]:
    """Defining sums at the solved exponents, one per level (all should be ~1)."""
    out = []
    for j in range(1, sponge.dimension + 1):
        prefixes = project_ifs(sponge, j)
        out.append(_level_sum(prefixes, betas.betas[: j - 1], betas.betas[j - 1]))
    return out


def box_dimension_sponge(sponge: SpongeSystem) -> float:
    """Box dimension of a validated sponge: the sum of the level exponents."""
    return solve_beta_sequence(sponge).box_dimension


def symbolic_beta(n: int, m: int, digits) -> float:
    """Closed-form dimension exponent of a symbolic digit set.

    With N digits and s distinct second coordinates the exponent is
    log_m(s) + log_n(N/s).
    """
    if not (2 <= m <= n):
        raise ValidationError(f"need 2 <= m <= n, got n={n}, m={m}")
    digits = set(tuple(d) for d in digits)
    if not digits:
        raise ValidationError("digit set is empty")
    for x, y in digits:
        if not 0 <= y < m:
            raise ValidationError(f"second coordinate {y} outside 0..{m - 1}")
    big_n = len(digits)
    s = len({y for _, y in digits})
    return math.log(s) / math.log(m) + math.log(big_n / s) / math.log(n)


def fit_box_dimension(samples) -> DimensionFit:
    """Ordinary least squares of log(count) on -log(delta)."""
    samples = tuple((float(d), int(c)) for d, c in samples)
    deltas = {d for d, _ in samples}
    if len(deltas) < 2:
        raise ValidationError("need samples at >= 2 distinct deltas")
    if any(c < 1 for _, c in samples):
        raise ValidationError("all packing counts must be >= 1")
    xs = [-math.log(d) for d, _ in samples]
    ys = [math.log(c) for _, c in samples]
    n = len(samples)
    xbar = sum(xs) / n
    ybar = sum(ys) / n
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    residual = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    return DimensionFit(samples=samples, slope=slope, residual=residual)
