"""Command-line front end: load a model file, run one computation, write
deterministic text/CSV output.

Exit codes: 0 success, 2 usage or validation failure, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from ._util import DEFAULT_BUDGET
from .dimension import fit_box_dimension, solve_beta_sequence, solve_similarity_dimension
from .errors import BudgetExceededError, ValidationError
from .ifs import SimilarIFS, SpongeSystem, check_osc_boxes
from .measures import WordBijection, natural_measure
from .metric import (
    CoordinateScaling,
    depth_for_delta,
    epsilon_components,
    greedy_packing,
    minkowski_content_estimate,
    sample_attractor,
)
from .models import load_model
from .symbolic import SymbolicSystem, check_nonoverlapping, symbolic_point_cloud
from .verify import (
    bilipschitz_transport_check,
    coarse_multifractal_spectrum,
    doubling_measure_check,
    minkowski_ratio_report,
    natural_beta,
    partition_criterion_check,
    whole_space_packing_counts,
)


def _natural_base(system) -> float:
    if isinstance(system, SymbolicSystem):
        return float(system.n)
    if isinstance(system, SpongeSystem):
        return 1.0 / system.r_star
    return 1.0 / float(min(system.ratios()))


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise ValidationError(f"--delta-range expects k_min..k_max, got {text!r}") from None
    if hi < lo:
        raise ValidationError(f"--delta-range is empty: {text!r}")
    return lo, hi


def _delta_schedule(args, system) -> list[float]:
    base = args.delta_base if args.delta_base else _natural_base(system)
    if base <= 1:
        raise ValidationError(f"--delta-base must exceed 1, got {base}")
    lo, hi = _parse_range(args.delta_range)
    return [base ** (-k) for k in range(lo, hi + 1)]


def _epsilons(args) -> list[float]:
    if not args.epsilon:
        raise ValidationError("--epsilon list is empty")
    try:
        values = [float(tok) for tok in args.epsilon.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"bad --epsilon list {args.epsilon!r}") from None
    if not values:
        raise ValidationError("--epsilon list is empty")
    return values


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _sample(system, depth, budget):
    if isinstance(system, SymbolicSystem):
        return symbolic_point_cloud(system, depth, budget)
    return sample_attractor(system, depth, budget)


def _word_label(letters) -> str:
    return "|".join(str(c) for c in letters)


def cmd_dim(args) -> int:
    system = load_model(args.model)
    lines = []
    if isinstance(system, SpongeSystem):
        betas = solve_beta_sequence(system)
        for j, b in enumerate(betas.betas, start=1):
            lines.append(f"beta_{j} = {b!r}")
        lines.append(f"box_dimension = {betas.box_dimension!r}")
    elif isinstance(system, SimilarIFS):
        s = solve_similarity_dimension([float(r) for r in system.ratios()])
        lines.append(f"similarity_dimension = {s!r}")
        lines.append(f"osc_satisfied = {str(check_osc_boxes(system)).lower()}")
    else:
        if system.flavor == "half":
            ok, witness = check_nonoverlapping(system, depth=min(6, args.nonoverlap_depth))
            if not ok:
                raise ValidationError(
                    f"non-overlapping condition violated: colliding words "
                    f"{witness[0].word} and {witness[1].word}"
                )
        n, m = system.n, system.m
        s = len({y for _, y in system.digits})
        big_n = len(system.digits)
        beta1 = math.log(s) / math.log(m)
        beta2 = math.log(big_n / s) / math.log(n)
        lines.append(f"beta_1 = {beta1!r}")
        lines.append(f"beta_2 = {beta2!r}")
        lines.append(f"box_dimension = {beta1 + beta2!r}")
    if args.fit:
        schedule = _delta_schedule(args, system)
        samples = whole_space_packing_counts(system, schedule, args.depth_budget)
        fit = fit_box_dimension(samples)
        lines.append(f"fit_slope = {fit.slope!r}")
        lines.append(f"fit_residual = {fit.residual!r}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_pack(args) -> int:
    system = load_model(args.model)
    if args.delta is None or args.delta <= 0:
        raise ValidationError("pack needs a positive --delta")
    depth = args.depth if args.depth is not None else depth_for_delta(
        system, args.delta, args.depth_budget
    )
    cloud = _sample(system, depth, args.depth_budget)
    result = greedy_packing(cloud, args.delta, args.metric)
    lines = [
        f"delta = {args.delta!r}",
        f"depth = {depth}",
        f"packing_count = {result.count}",
    ]
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_components(args) -> int:
    system = load_model(args.model)
    eps_list = _epsilons(args)
    if len(eps_list) != 1:
        raise ValidationError("components takes exactly one --epsilon value")
    part = epsilon_components(system, eps_list[0], depth=args.depth, budget=args.depth_budget)
    lines = [f"epsilon = {part.epsilon!r}", f"depth = {part.depth}",
             f"component_count = {len(part.classes)}"]
    body = ["class_id,word"]
    for cid, mset in enumerate(part.classes):
        for w in mset.words:
            body.append(f"{cid},{_word_label(w.letters)}")
    _emit(args, "\n".join(lines) + "\n" + "\n".join(body) + "\n")
    return 0


def cmd_verify(args) -> int:
    system = load_model(args.model)
    mu = natural_measure(system)
    beta = args.beta if args.beta is not None else natural_beta(system)
    report = minkowski_ratio_report(
        system, mu, beta, _epsilons(args), _delta_schedule(args, system), args.depth_budget
    )
    _emit(args, report.to_csv())
    summary = [
        f"beta = {report.beta!r}",
        f"M_hat = {report.m_hat!r}",
        f"last3_log_growth = {report.last3_log_growth!r}",
        f"divergent_flag = {str(report.divergent).lower()}",
    ]
    print("\n".join(summary))
    return 0


def cmd_criterion(args) -> int:
    system = load_model(args.model)
    mu = natural_measure(system)
    beta = args.beta if args.beta is not None else natural_beta(system)
    try:
        ranks = [int(tok) for tok in args.ranks.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"bad --ranks list {args.ranks!r}") from None
    report = partition_criterion_check(
        system, mu, beta, ranks, _delta_schedule(args, system), args.depth_budget
    )
    _emit(args, report.to_csv())
    print(f"M_hat = {report.m_hat!r}")
    for rank in sorted(report.per_rank_m_hat):
        print(f"M_hat_rank_{rank} = {report.per_rank_m_hat[rank]!r}")
    return 0


def _parse_map(text: str, system):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"--map is not valid JSON: {exc}") from None
    kind = doc.get("type")
    if kind == "scale":
        return CoordinateScaling(
            factors=tuple(doc["factors"]), offsets=tuple(doc.get("offsets") or ())
            if doc.get("offsets") else None,
        )
    if kind == "digit_permutation":
        mapping = {}
        for src, dst in doc["mapping"]:
            src = tuple(src) if isinstance(src, list) else src
            dst = tuple(dst) if isinstance(dst, list) else dst
            mapping[src] = dst
        return WordBijection.from_digit_permutation(mapping)
    raise ValidationError(f"--map type must be 'scale' or 'digit_permutation', got {kind!r}")


def cmd_transport(args) -> int:
    system = load_model(args.model)
    mu = natural_measure(system)
    map_desc = _parse_map(args.map, system)
    target = load_model(args.target_model) if args.target_model else None
    report = bilipschitz_transport_check(
        system,
        mu,
        map_desc,
        _epsilons(args),
        _delta_schedule(args, system),
        target_system=target,
        beta=args.beta,
        budget=args.depth_budget,
    )
    _emit(args, report.to_csv())
    print(f"slope_source = {report.slope_source!r}")
    print(f"slope_target = {report.slope_target!r}")
    print(f"m_hat_ratio = {report.m_hat_ratio!r}")
    return 0


def cmd_spectrum(args) -> int:
    system = load_model(args.model)
    mu = natural_measure(system)
    report = coarse_multifractal_spectrum(
        system, mu, args.rank, bin_width=args.bin_width, budget=args.depth_budget
    )
    _emit(args, report.to_csv())
    print(f"occupied_bins = {len(report.histogram)}")
    return 0


def cmd_doubling(args) -> int:
    system = load_model(args.model)
    mu = natural_measure(system)
    try:
        scales = [float(tok) for tok in args.scales.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"bad --scales list {args.scales!r}") from None
    report = doubling_measure_check(
        system, mu, scales, centers=args.centers, budget=args.depth_budget
    )
    _emit(args, report.to_csv())
    print(f"max_ratio = {report.max_ratio!r}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minkpack",
        description="Packing numbers, dimension solvers, and comparability reports "
        "for self-affine and symbolic instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--model", required=True, help="path to a JSON model file")
        p.add_argument("--depth-budget", type=int, default=DEFAULT_BUDGET,
                       help="max cylinders any enumeration may produce")
        p.add_argument("--out", help="write the report here instead of stdout")

    def schedule(p):
        p.add_argument("--delta-base", type=float, default=None,
                       help="schedule base; default is the instance's natural base")
        p.add_argument("--delta-range", default="2..6",
                       help="k_min..k_max, producing deltas base^-k")

    p = sub.add_parser("dim", help="dimension exponents of the model")
    common(p)
    schedule(p)
    p.add_argument("--fit", action="store_true", help="also fit an empirical slope")
    p.add_argument("--nonoverlap-depth", type=int, default=6)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("pack", help="greedy packing count at one delta")
    common(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--metric", default=None, choices=["euclidean", "max", "full", "half"])
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("components", help="epsilon-component partition")
    common(p)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--depth", type=int, default=None)
    p.set_defaults(func=cmd_components)

    p = sub.add_parser("verify", help="comparability ratio report")
    common(p)
    schedule(p)
    p.add_argument("--epsilon", required=True, help="comma-separated component scales")
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("criterion", help="rank-partition comparability report")
    common(p)
    schedule(p)
    p.add_argument("--ranks", required=True, help="comma-separated cylinder ranks")
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=cmd_criterion)

    p = sub.add_parser("transport", help="bi-Lipschitz transport comparison")
    common(p)
    schedule(p)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--map", required=True, help="JSON map descriptor")
    p.add_argument("--target-model", default=None)
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("spectrum", help="coarse local-dimension histogram")
    common(p)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--bin-width", type=float, default=0.05)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("doubling", help="ball-ratio doubling report")
    common(p)
    p.add_argument("--scales", required=True, help="comma-separated radii")
    p.add_argument("--centers", type=int, default=64)
    p.set_defaults(func=cmd_doubling)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
