"""Comparability reports: packing count times delta^beta against measure.

The central report evaluates N_delta(R) * delta^beta / mu(R) over every
epsilon-component R and every admissible delta (delta <= epsilon/4), and
summarizes the spread as M_hat = max(ratio_max, 1/ratio_min).  A bounded,
stabilizing M_hat is evidence for comparability; a steadily growing one is
flagged DIVERGENT.  Reports are data, never verdicts: a finite computation
can only exhibit trends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._util import DEFAULT_BUDGET, power_threshold, words_matrix
from .dimension import fit_box_dimension, solve_beta_sequence, solve_similarity_dimension, symbolic_beta
from .errors import ValidationError
from .ifs import CylinderWord, SimilarIFS, SpongeSystem
from .measures import BernoulliMeasure, MeasurableSet, WordBijection, measure_of_set, pushforward_measure
from .metric import (
    ComponentPartition,
    CoordinateScaling,
    PointCloud,
    depth_for_delta,
    epsilon_components,
    greedy_packing,
    pillar_boxes,
    sample_attractor,
    word_keys,
)
from .symbolic import (
    SymbolicSystem,
    cylinder_diameter,
    cylinder_min_distances,
    symbolic_point_cloud,
)

# Per-step log growth of M_hat (averaged over the last three schedule steps)
# above which a report is flagged DIVERGENT.  Calibrated on desk-scale runs:
# provably comparable instances sit near 0.00, while the measure-zero
# overlapping instance grows at ~0.08-0.10 per base-3 step with no sign of
# stabilizing.
DIVERGENT_GROWTH_THRESHOLD = 0.05


@dataclass(frozen=True)
class RatioRow:
    component_id: str
    epsilon: float
    delta: float
    packing_count: int
    measure: float
    ratio: float


@dataclass
class RatioReport:
    """All per-(component, delta) ratios plus the spread summary."""

    beta: float
    rows: list[RatioRow]
    m_hat: float
    per_delta_m_hat: list[tuple[float, float]]
    last3_log_growth: float | None
    divergent: bool

    def to_csv(self) -> str:
        lines = ["component_id,epsilon,delta,packing_count,measure,ratio"]
        for r in self.rows:
            lines.append(
                f"{r.component_id},{r.epsilon!r},{r.delta!r},{r.packing_count},"
                f"{r.measure!r},{r.ratio!r}"
            )
        lines.append("")
        lines.append(f"beta,{self.beta!r}")
        lines.append(f"M_hat,{self.m_hat!r}")
        lines.append(f"divergent_flag,{str(self.divergent).lower()}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as handle:
            handle.write(self.to_csv())


def natural_beta(system) -> float:
    """The instance's own dimension exponent: level solves for sponges, the
    similarity dimension for similitude systems, the closed form for symbolic
    digit sets."""
    if isinstance(system, SpongeSystem):
        return solve_beta_sequence(system).box_dimension
    if isinstance(system, SimilarIFS):
        return solve_similarity_dimension([float(r) for r in system.ratios()])
    if isinstance(system, SymbolicSystem):
        return symbolic_beta(system.n, system.m, system.digits)
    raise ValidationError(f"unknown system type {type(system).__name__}")


def _measure_fn(mu):
    if isinstance(mu, BernoulliMeasure):
        return lambda mset: measure_of_set(mu, mset)
    if callable(mu):
        return mu
    raise ValidationError("measure must be a BernoulliMeasure or a callable on sets")


def _word_measures(system, mu, words: np.ndarray) -> np.ndarray:
    """Measure of every word in a word-index matrix."""
    if isinstance(mu, BernoulliMeasure):
        ids = system.digit_ids()
        weights = np.asarray([mu.weight(i) for i in ids])
        out = np.ones(words.shape[0])
        for col in range(words.shape[1]):
            out = out * weights[words[:, col]]
        return out
    meas = _measure_fn(mu)
    ids = system.digit_ids()
    return np.asarray(
        [
            meas(MeasurableSet((CylinderWord(tuple(ids[j] for j in row)),)))
            for row in words
        ]
    )


def _group_indices(keys: np.ndarray, n_groups: int) -> list[np.ndarray]:
    """Index arrays per key value 0..n_groups-1, preserving scan order."""
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    bounds = np.searchsorted(sorted_keys, np.arange(n_groups + 1))
    return [order[bounds[g] : bounds[g + 1]] for g in range(n_groups)]


def _sample_cloud(system, depth: int, budget: int, transform=None):
    if isinstance(system, SymbolicSystem):
        if transform is not None:
            raise ValidationError("coordinate scalings do not apply to symbolic systems")
        return symbolic_point_cloud(system, depth, budget)
    cloud = sample_attractor(system, depth, budget)
    if transform is not None:
        cloud = PointCloud(
            points=transform.apply_points(cloud.points),
            words=cloud.words,
            depth=depth,
            system=system,
        )
    return cloud


def _summarize(beta: float, rows: list[RatioRow]) -> RatioReport:
    ratios = [r.ratio for r in rows]
    m_hat = max(max(ratios), 1.0 / min(ratios))
    by_delta: dict[float, float] = {}
    for r in rows:
        spread = max(r.ratio, 1.0 / r.ratio)
        by_delta[r.delta] = max(by_delta.get(r.delta, 1.0), spread)
    per_delta = sorted(by_delta.items(), key=lambda kv: -kv[0])
    growths = [
        math.log(b[1]) - math.log(a[1]) for a, b in zip(per_delta, per_delta[1:])
    ]
    if growths:
        tail = growths[-3:]
        last3 = sum(tail) / len(tail)
    else:
        last3 = None
    divergent = last3 is not None and last3 > DIVERGENT_GROWTH_THRESHOLD
    return RatioReport(
        beta=beta,
        rows=rows,
        m_hat=m_hat,
        per_delta_m_hat=per_delta,
        last3_log_growth=last3,
        divergent=divergent,
    )


def minkowski_ratio_report(
    system,
    mu,
    beta: float,
    epsilons,
    delta_schedule,
    budget: int = DEFAULT_BUDGET,
    transform=None,
) -> RatioReport:
    """Ratios N_delta(R) * delta^beta / mu(R) over components and scales.

    Components come from epsilon_components at each epsilon; only deltas with
    delta <= epsilon/4 enter that epsilon's rows.  Packing counts restrict the
    representative cloud to the component's cylinder words.
    """
    epsilons = sorted({float(e) for e in epsilons}, reverse=True)
    deltas = sorted({float(d) for d in delta_schedule}, reverse=True)
    if not epsilons or not deltas:
        raise ValidationError("need at least one epsilon and one delta")
    if min(deltas) <= 0 or min(epsilons) <= 0:
        raise ValidationError("epsilons and deltas must be positive")
    meas = _measure_fn(mu)
    base = len(system.digits)
    rows: list[RatioRow] = []
    clouds: dict[int, object] = {}
    any_admissible = False
    for eps in epsilons:
        part = epsilon_components(system, eps, budget=budget, transform=transform)
        comp_measures = []
        for cid, mset in enumerate(part.classes):
            value = meas(mset)
            if value <= 0:
                raise ValidationError(
                    f"component {cid} at epsilon {eps} has measure {value}; "
                    "zero-measure components signal a modeling error"
                )
            comp_measures.append(value)
        for delta in deltas:
            if delta > eps / 4:
                continue
            any_admissible = True
            depth = depth_for_delta(system, delta, budget, transform)
            cloud = clouds.get(depth)
            if cloud is None:
                cloud = _sample_cloud(system, depth, budget, transform)
                clouds[depth] = cloud
            keys = word_keys(cloud.words, part.depth, base)
            point_labels = part.labels[keys]
            groups = _group_indices(point_labels, len(part.classes))
            for cid, m_val in enumerate(comp_measures):
                sub = cloud.take(groups[cid])
                count = greedy_packing(sub, delta).count
                ratio = count * delta**beta / m_val
                rows.append(
                    RatioRow(
                        component_id=f"c{cid}",
                        epsilon=eps,
                        delta=delta,
                        packing_count=count,
                        measure=m_val,
                        ratio=ratio,
                    )
                )
    if not any_admissible:
        raise ValidationError(
            "no admissible (epsilon, delta) pair: every delta exceeds epsilon/4"
        )
    return _summarize(beta, rows)


@dataclass
class CriterionReport:
    """Per-rank comparability over the rank-k cylinder partitions."""

    beta: float
    rows: list[RatioRow]
    per_rank_m_hat: dict[int, float]
    m_hat: float
    sizes: dict[int, float]

    def to_csv(self) -> str:
        lines = ["component_id,rank,delta,packing_count,measure,ratio"]
        for r in self.rows:
            lines.append(
                f"{r.component_id},{int(r.epsilon)},{r.delta!r},{r.packing_count},"
                f"{r.measure!r},{r.ratio!r}"
            )
        lines.append("")
        lines.append(f"beta,{self.beta!r}")
        lines.append(f"M_hat,{self.m_hat!r}")
        for rank in sorted(self.per_rank_m_hat):
            lines.append(f"M_hat_rank_{rank},{self.per_rank_m_hat[rank]!r}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as handle:
            handle.write(self.to_csv())


def _partition_sizes(system, ranks, budget) -> dict[int, float]:
    sizes = {}
    for k in ranks:
        if isinstance(system, SymbolicSystem):
            sizes[k] = cylinder_diameter(system, k)
        else:
            lo, hi = pillar_boxes(system, k, budget)
            side = hi - lo
            sizes[k] = float(np.sqrt((side * side).sum(axis=1)).max())
    return sizes


def _element_scales(system, words: np.ndarray) -> np.ndarray:
    """Admissible-delta bound per partition element: the shortest box side,
    or n^-k for symbolic cylinders."""
    if isinstance(system, SymbolicSystem):
        scale = 1.0
        for _ in range(words.shape[1]):
            scale = scale / system.n
        return np.full(words.shape[0], scale)
    ratios = np.asarray(
        [[float(c.ratio) for c in d.components] for d in system.digits]
    )
    sides = np.ones((words.shape[0], ratios.shape[1]))
    for col in range(words.shape[1]):
        sides = sides * ratios[words[:, col]]
    return sides.min(axis=1)


def partition_criterion_check(
    system, mu, beta: float, ranks, delta_schedule, budget: int = DEFAULT_BUDGET
) -> CriterionReport:
    """Ratio spread with components replaced by rank-k cylinder partitions.

    Bounded spread across every rank is exactly the hypothesis of the
    partition criterion for being a comparable measure.
    """
    ranks = sorted({int(k) for k in ranks})
    if not ranks or ranks[0] < 1:
        raise ValidationError("ranks must be positive integers")
    deltas = sorted({float(d) for d in delta_schedule}, reverse=True)
    if not deltas or deltas[-1] <= 0:
        raise ValidationError("deltas must be positive")
    sizes = _partition_sizes(system, ranks, budget)
    for a, b in zip(ranks, ranks[1:]):
        if not sizes[b] < sizes[a]:
            raise ValidationError(
                f"partition sizes must decrease with rank: size({b}) >= size({a})"
            )
    base = len(system.digits)
    rows: list[RatioRow] = []
    per_rank: dict[int, float] = {}
    clouds: dict[int, object] = {}
    for k in ranks:
        if base**k > budget:
            raise ValidationError(f"rank {k} needs {base ** k} cylinders over budget {budget}")
        words = words_matrix(base, k)
        measures = _word_measures(system, mu, words)
        if np.any(measures <= 0):
            raise ValidationError(f"rank {k} has a zero-measure cylinder")
        scales = _element_scales(system, words)
        rank_rows: list[RatioRow] = []
        for delta in deltas:
            admissible = np.nonzero(delta < scales)[0]
            if len(admissible) == 0:
                continue
            depth = depth_for_delta(system, delta, budget)
            cloud = clouds.get(depth)
            if cloud is None:
                cloud = _sample_cloud(system, depth, budget)
                clouds[depth] = cloud
            keys = word_keys(cloud.words, k, base)
            groups = _group_indices(keys, len(words))
            for widx in admissible:
                sub = cloud.take(groups[widx])
                count = greedy_packing(sub, delta).count
                ratio = count * delta**beta / measures[widx]
                rank_rows.append(
                    RatioRow(
                        component_id=f"k{k}w{widx}",
                        epsilon=float(k),
                        delta=delta,
                        packing_count=count,
                        measure=float(measures[widx]),
                        ratio=ratio,
                    )
                )
        if not rank_rows:
            raise ValidationError(f"no admissible delta for rank {k}")
        per_rank[k] = max(max(r.ratio for r in rank_rows), 1.0 / min(r.ratio for r in rank_rows))
        rows.extend(rank_rows)
    return CriterionReport(
        beta=beta,
        rows=rows,
        per_rank_m_hat=per_rank,
        m_hat=max(per_rank.values()),
        sizes=sizes,
    )


def whole_space_packing_counts(system, deltas, budget: int = DEFAULT_BUDGET, transform=None):
    """(delta, packing count) samples over the whole space, for slope fits."""
    out = []
    clouds: dict[int, object] = {}
    for delta in sorted({float(d) for d in deltas}, reverse=True):
        depth = depth_for_delta(system, delta, budget, transform)
        cloud = clouds.get(depth)
        if cloud is None:
            cloud = _sample_cloud(system, depth, budget, transform)
            clouds[depth] = cloud
        out.append((delta, greedy_packing(cloud, delta).count))
    return out


@dataclass
class TransportReport:
    """Source/target comparability reports under a bi-Lipschitz test map."""

    source: RatioReport
    target: RatioReport
    slope_source: float
    slope_target: float
    slope_gap: float
    m_hat_ratio: float

    def to_csv(self) -> str:
        lines = ["# source"]
        lines.append(self.source.to_csv().rstrip("\n"))
        lines.append("# target")
        lines.append(self.target.to_csv().rstrip("\n"))
        lines.append(f"slope_source,{self.slope_source!r}")
        lines.append(f"slope_target,{self.slope_target!r}")
        lines.append(f"slope_gap,{self.slope_gap!r}")
        lines.append(f"m_hat_ratio,{self.m_hat_ratio!r}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as handle:
            handle.write(self.to_csv())


def bilipschitz_transport_check(
    system,
    mu,
    map_desc,
    epsilons,
    delta_schedule,
    target_system=None,
    beta: float | None = None,
    budget: int = DEFAULT_BUDGET,
) -> TransportReport:
    """Compare the source report against the report of the mapped geometry.

    Supported maps: a CoordinateScaling on Euclidean instances (the target is
    the image geometry, carrying the same cylinder measures), or a
    rank-preserving WordBijection on symbolic instances (the target carries
    the pushforward measure).  The target report uses the source's beta.
    """
    if beta is None:
        beta = natural_beta(system)
    source = minkowski_ratio_report(system, mu, beta, epsilons, delta_schedule, budget)
    if isinstance(map_desc, CoordinateScaling):
        if target_system is not None:
            raise ValidationError("a coordinate scaling determines its own target geometry")
        if isinstance(system, SymbolicSystem):
            raise ValidationError("coordinate scalings apply to Euclidean instances only")
        target = minkowski_ratio_report(
            system, mu, beta, epsilons, delta_schedule, budget, transform=map_desc
        )
        fit_target = whole_space_packing_counts(system, delta_schedule, budget, transform=map_desc)
        target_ref = system
    elif isinstance(map_desc, WordBijection):
        target_ref = target_system if target_system is not None else system
        if not isinstance(target_ref, SymbolicSystem):
            raise ValidationError("word bijections apply to symbolic instances")
        nu = lambda mset: pushforward_measure(map_desc, mu, mset)
        target = minkowski_ratio_report(target_ref, nu, beta, epsilons, delta_schedule, budget)
        fit_target = whole_space_packing_counts(target_ref, delta_schedule, budget)
    else:
        raise ValidationError(
            f"unsupported map class {type(map_desc).__name__}: expected a "
            "CoordinateScaling or a WordBijection"
        )
    fit_source = whole_space_packing_counts(system, delta_schedule, budget)
    slope_source = fit_box_dimension(fit_source).slope
    slope_target = fit_box_dimension(fit_target).slope
    return TransportReport(
        source=source,
        target=target,
        slope_source=slope_source,
        slope_target=slope_target,
        slope_gap=abs(slope_source - slope_target),
        m_hat_ratio=target.m_hat / source.m_hat,
    )


@dataclass
class SpectrumEstimate:
    """Histogram of coarse local dimensions log mu(C) / log diam(C).

    A declared surrogate: raw per-cylinder data binned at a fixed width, with
    no smoothing and no Legendre transform.
    """

    rank: int
    delta: float
    bin_width: float
    histogram: list[tuple[float, int]]
    total: int

    def to_csv(self) -> str:
        lines = ["alpha_bin,count"]
        for edge, count in self.histogram:
            lines.append(f"{edge!r},{count}")
        lines.append("")
        lines.append(f"rank,{self.rank}")
        lines.append(f"delta,{self.delta!r}")
        lines.append(f"total,{self.total}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as handle:
            handle.write(self.to_csv())


def coarse_multifractal_spectrum(
    system, mu, rank: int, bin_width: float = 0.05, budget: int = DEFAULT_BUDGET
) -> SpectrumEstimate:
    """Bin log mu(C) / log diam(C) over all rank-k cylinders."""
    if rank < 1:
        raise ValidationError(f"rank must be >= 1, got {rank}")
    if bin_width <= 0:
        raise ValidationError(f"bin width must be positive, got {bin_width}")
    base = len(system.digits)
    if base**rank > budget:
        raise ValidationError(f"rank {rank} needs {base ** rank} cylinders over budget {budget}")
    words = words_matrix(base, rank)
    measures = _word_measures(system, mu, words)
    if isinstance(system, SymbolicSystem):
        diams = np.full(len(words), cylinder_diameter(system, rank))
    else:
        ratios = np.asarray([[float(c.ratio) for c in d.components] for d in system.digits])
        sides = np.ones((len(words), ratios.shape[1]))
        for col in range(rank):
            sides = sides * ratios[words[:, col]]
        diams = np.sqrt((sides * sides).sum(axis=1))
    alphas = np.log(measures) / np.log(diams)
    bins = np.floor(alphas / bin_width).astype(np.int64)
    uniq, counts = np.unique(bins, return_counts=True)
    histogram = [(float(b) * bin_width, int(c)) for b, c in zip(uniq, counts)]
    return SpectrumEstimate(
        rank=rank,
        delta=float(diams.max()),
        bin_width=bin_width,
        histogram=histogram,
        total=int(counts.sum()),
    )


@dataclass
class DoublingRow:
    center_id: int
    scale: float
    mu_ball: float
    mu_double: float
    ratio: float


@dataclass
class DoublingReport:
    """Observed mu(B(x,2r))/mu(B(x,r)) over sampled centers and scales."""

    rows: list[DoublingRow]
    max_ratio: float

    def to_csv(self) -> str:
        lines = ["center_id,scale,mu_ball,mu_double,ratio"]
        for r in self.rows:
            lines.append(
                f"{r.center_id},{r.scale!r},{r.mu_ball!r},{r.mu_double!r},{r.ratio!r}"
            )
        lines.append("")
        lines.append(f"max_ratio,{self.max_ratio!r}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as handle:
            handle.write(self.to_csv())


def doubling_measure_check(
    system, mu, scales, centers: int = 64, budget: int = DEFAULT_BUDGET
) -> DoublingReport:
    """Report, not verdict: balls are approximated by the union of depth-k
    cylinders within distance r of the center's cylinder."""
    scales = sorted({float(s) for s in scales}, reverse=True)
    if not scales or scales[-1] <= 0:
        raise ValidationError("scales must be positive")
    if centers < 1:
        raise ValidationError("need at least one center")
    rows: list[DoublingRow] = []
    base = len(system.digits)
    for r in scales:
        if isinstance(system, SymbolicSystem):
            depth = power_threshold(system.m, r / 4)
            if base**depth > budget:
                raise ValidationError(
                    f"scale {r} needs {base ** depth} cylinders over budget {budget}"
                )
            cloud = symbolic_point_cloud(system, depth, budget)
            measures = _word_measures(system, mu, cloud.words)
            n_words = len(cloud)
            sample = np.unique(np.linspace(0, n_words - 1, min(centers, n_words)).astype(np.int64))
            for c in sample:
                dists = cylinder_min_distances(cloud, int(c))
                small = float(measures[dists < r].sum())
                big = float(measures[dists < 2 * r].sum())
                rows.append(DoublingRow(int(c), r, small, big, big / small))
        else:
            depth = depth_for_delta(system, r, budget)
            lo, hi = pillar_boxes(system, depth, budget)
            cloud = sample_attractor(system, depth, budget)
            measures = _word_measures(system, mu, cloud.words)
            n_words = len(cloud)
            sample = np.unique(np.linspace(0, n_words - 1, min(centers, n_words)).astype(np.int64))
            for c in sample:
                x = cloud.points[c]
                gaps = np.maximum(0.0, np.maximum(lo - x, x - hi))
                dists = np.sqrt((gaps * gaps).sum(axis=1))
                small = float(measures[dists < r].sum())
                big = float(measures[dists < 2 * r].sum())
                rows.append(DoublingRow(int(c), r, small, big, big / small))
    return DoublingReport(rows=rows, max_ratio=max(r.ratio for r in rows))
