#!/usr/bin/env python3
import argparse
import logging
import sys
from typing import Optional

from detlab import __version__
from detlab.config import LabConfig, load_config
from detlab.errors import DomainError, LabError, ResourceLimitError
from detlab.generators import FIXTURES, GEN_KINDS, fixture, generate
from detlab.gridtiling import (
    BcspInstance,
    GridTilingInstance,
    assignment_to_list,
    bcsp_bruteforce,
    bcsp_to_gridtiling,
    consistency,
    gt_block_approx,
    gt_bruteforce,
)
from detlab.instances import instance_from_dict, read_json, write_json
from detlab.linalg import GramMatrix, RatVectorSet
from detlab.models import RunConfig
from detlab.rational import format_rat, parse_rat
from detlab.reductions import (
    KSumInstance,
    gridtiling_to_detmax,
    gridtiling_to_orthovectors,
    ksum_to_arrowhead,
)
from detlab.resources import ResourceGuard
from detlab.solvers import (
    find_orthogonal_set,
    find_orthogonal_set_nonneg,
    maxdet_additive_approx,
    maxdet_bruteforce,
    maxdet_greedy,
)
from detlab.verification import SUITES, run_all, run_suite

ALGORITHMS = ("brute", "greedy", "additive", "ortho", "ortho-nonneg", "block")
REDUCTIONS = {
    ("ksum", "arrowhead"),
    ("gridtiling", "orthovectors"),
    ("gridtiling", "detmax"),
    ("bcsp", "gridtiling"),
}

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to a YAML config file")
    common.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    common.add_argument("--max-subsets", type=int, help="Refuse enumerations above this count")
    common.add_argument("--max-bits", type=int, help="Refuse rationals with larger denominators")
    common.add_argument("-o", "--output", help="Write JSON here instead of stdout")

    parser = argparse.ArgumentParser(
        description="DetMax Lab: exact determinant maximization, reductions and checks"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="Run a solver on an instance file")
    solve.add_argument("file", help="Instance JSON")
    solve.add_argument("--alg", choices=ALGORITHMS, default="brute")
    solve.add_argument("--k", type=int, help="Subset size (default: the file's 'k')")
    solve.add_argument("--eps", help="Accuracy as P/Q (additive and block solvers)")

    reduce = sub.add_parser("reduce", parents=[common], help="Apply a reduction")
    reduce.add_argument("file", help="Instance JSON")
    reduce.add_argument("--from", dest="source", required=True,
                        choices=sorted({s for s, _ in REDUCTIONS}))
    reduce.add_argument("--to", dest="target", required=True,
                        choices=sorted({t for _, t in REDUCTIONS}))
    reduce.add_argument("--diagonal", choices=("full", "equal"), default="full",
                        help="Diagonal cells of the BCSP to Grid Tiling reduction")

    verify = sub.add_parser("verify", parents=[common], help="Run verification suites")
    verify.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    verify.add_argument("--trials", type=int, help="Random trials per suite")

    gen = sub.add_parser("gen", parents=[common], help="Generate an instance")
    gen.add_argument("kind", nargs="?", choices=GEN_KINDS)
    gen.add_argument("--fixture", choices=FIXTURES, help="Emit a golden fixture instead")
    gen.add_argument("--n", type=int, default=4)
    gen.add_argument("--k", type=int, default=3)
    gen.add_argument("--d", type=int, default=3)
    gen.add_argument("--max-value", type=int, default=8)
    gen.add_argument("--cell-size", type=int, default=2)
    gen.add_argument("--denominator", type=int, default=1)
    gen.add_argument("--planted", action="store_true", help="Plant a k-Sum witness")

    return parser.parse_args(argv)


logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger("detlab")


def setup_logging(config: LabConfig) -> None:
    level = config.log.level.upper()
    logging.getLogger().setLevel(getattr(logging, level, logging.INFO))

    if config.log.file:
        file_handler = logging.FileHandler(config.log.file)
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s")
        )
        logging.getLogger().addHandler(file_handler)


def build_run_config(args: argparse.Namespace) -> RunConfig:
    selector = {
        "solve": getattr(args, "alg", None),
        "reduce": f"{getattr(args, 'source', '')}->{getattr(args, 'target', '')}",
        "verify": getattr(args, "suite", None),
        "gen": getattr(args, "fixture", None) or getattr(args, "kind", None),
    }[args.command]
    eps = getattr(args, "eps", None)
    k = getattr(args, "k", None) if args.command == "solve" else None
    return RunConfig(
        command=args.command,
        selector=selector,
        k=k,
        eps=parse_rat(eps) if eps is not None else None,
        trials=getattr(args, "trials", None),
        seed=args.seed,
        max_subsets=args.max_subsets,
        max_bits=args.max_bits,
    )


def _solve_vectors_only(instance, alg: str) -> RatVectorSet:
    if not isinstance(instance, RatVectorSet):
        raise DomainError(f"--alg {alg} needs a vectors instance")
    return instance


def run_solve(args: argparse.Namespace, run: RunConfig, guard: ResourceGuard) -> int:
    data = read_json(args.file)
    instance = instance_from_dict(data)
    logger.info(f"Loaded {data['type']} instance from {args.file}")
    alg = args.alg

    if isinstance(instance, GridTilingInstance):
        if alg == "brute":
            sigma, opt = gt_bruteforce(instance, guard)
        elif alg == "block":
            if run.eps is None:
                raise DomainError("--alg block needs --eps")
            sigma = gt_block_approx(instance, run.eps, guard)
            opt = consistency(instance, sigma)
        else:
            raise DomainError(f"--alg {alg} does not apply to Grid Tiling instances")
        result = {"assignment": assignment_to_list(sigma, instance.k), "consistency": opt}
    elif isinstance(instance, BcspInstance):
        if alg != "brute":
            raise DomainError(f"--alg {alg} does not apply to BCSP instances")
        psi, value = bcsp_bruteforce(instance, guard)
        result = {"assignment": list(psi), "value": format_rat(value)}
    elif isinstance(instance, KSumInstance):
        raise DomainError("k-Sum instances are solved through 'reduce --to arrowhead'")
    else:
        k = run.k if run.k is not None else data.get("k")
        if k is None:
            raise DomainError("subset size missing: pass --k or add 'k' to the instance")
        k = int(k)
        result = _dispatch_detmax(instance, alg, k, run, guard)

    result["config"] = run.to_dict()
    write_json(result, args.output)
    return EXIT_OK


def _dispatch_detmax(instance, alg: str, k: int, run: RunConfig, guard: ResourceGuard) -> dict:
    if alg == "brute":
        if not isinstance(instance, (RatVectorSet, GramMatrix)):
            raise DomainError("--alg brute needs a vectors or gram instance")
        return maxdet_bruteforce(instance, k, guard).to_dict()
    if alg == "greedy":
        return maxdet_greedy(_solve_vectors_only(instance, alg), k).to_dict()
    if alg == "additive":
        if run.eps is None:
            raise DomainError("--alg additive needs --eps")
        approx = maxdet_additive_approx(_solve_vectors_only(instance, alg), k, run.eps, guard)
        result = approx.solution.to_dict()
        result["delta"] = format_rat(approx.delta)
        result["degenerate"] = approx.degenerate
        return result
    if alg in ("ortho", "ortho-nonneg"):
        vs = _solve_vectors_only(instance, alg)
        if alg == "ortho":
            found = find_orthogonal_set(vs, k, guard)
        else:
            found = find_orthogonal_set_nonneg(vs, k)
        return {
            "found": found is not None,
            "subset": [i + 1 for i in found] if found is not None else None,
        }
    raise DomainError(f"--alg {alg} does not apply to DetMax instances")


def run_reduce(args: argparse.Namespace, run: RunConfig, guard: ResourceGuard) -> int:
    pair = (args.source, args.target)
    if pair not in REDUCTIONS:
        raise DomainError(f"no reduction from {args.source} to {args.target}")

    data = read_json(args.file)
    instance = instance_from_dict(data)
    if data["type"] != args.source:
        raise DomainError(f"--from {args.source} but the file holds a {data['type']} instance")
    logger.info(f"Reducing {args.source} -> {args.target} ({args.file})")

    if pair == ("ksum", "arrowhead"):
        result = ksum_to_arrowhead(instance, guard).to_dict()
    elif pair == ("gridtiling", "orthovectors"):
        result = gridtiling_to_orthovectors(instance).to_dict()
    elif pair == ("gridtiling", "detmax"):
        result = gridtiling_to_detmax(instance, guard).to_dict()
    else:
        result = bcsp_to_gridtiling(instance, diagonal=args.diagonal).to_dict()
        result["meta"] = {"diagonal": args.diagonal}

    result["config"] = run.to_dict()
    write_json(result, args.output)
    return EXIT_OK


def run_verify(args: argparse.Namespace, run: RunConfig, config: LabConfig) -> int:
    if args.suite == "all":
        reports = run_all(args.trials, args.seed, config)
    else:
        reports = [run_suite(args.suite, args.trials, args.seed, config)]

    passed = all(r.passed for r in reports)
    failed = [r.suite for r in reports if not r.passed]
    if failed:
        logger.error(f"Failed suites: {', '.join(failed)}")
    else:
        logger.info(f"All {len(reports)} suite(s) passed")

    write_json(
        {"config": run.to_dict(), "passed": passed, "reports": [r.to_dict() for r in reports]},
        args.output,
    )
    return EXIT_OK if passed else EXIT_FAILED


def run_gen(args: argparse.Namespace) -> int:
    if args.fixture:
        data = fixture(args.fixture)
    elif args.kind:
        data = generate(
            args.kind,
            seed=args.seed,
            n=args.n,
            k=args.k,
            d=args.d,
            max_value=args.max_value,
            cell_size=args.cell_size,
            denominator=args.denominator,
            planted=args.planted,
        )
    else:
        raise DomainError("gen needs a kind or --fixture")

    # emitted instances must load back
    instance_from_dict(data)
    write_json(data, args.output)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    args = parse_args(argv)

    try:
        run = build_run_config(args)
        config = load_config(args.config).with_limits(args.max_subsets, args.max_bits)
        setup_logging(config)
        guard = ResourceGuard(config)

        if args.command == "solve":
            return run_solve(args, run, guard)
        if args.command == "reduce":
            return run_reduce(args, run, guard)
        if args.command == "verify":
            return run_verify(args, run, config)
        return run_gen(args)
    except ResourceLimitError as e:
        logger.error(f"Refused: {e}")
        return EXIT_RESOURCE
    except (LabError, ValueError, OSError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
