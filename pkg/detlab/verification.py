"""
Named verification suites.

Each suite checks one group of properties against brute-force oracles and
records failures, with a serialized counterexample, in a
VerificationReport. Suites never raise on a failed property.
"""

import logging
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import comb, factorial
from typing import Callable, Optional

from detlab.config import LabConfig
from detlab.errors import DomainError
from detlab.gadgets import civril_gadget
from detlab.generators import (
    TABLE1_CELLS,
    TABLE1_SOLUTION,
    fig1_vectors,
    planted_bcsp,
    planted_gridtiling,
    random_gridtiling,
    random_ksum,
    table1_instance,
)
from detlab.gridtiling import (
    adjacency_pairs,
    bcsp_assignment_from_gridtiling,
    bcsp_eval,
    bcsp_to_gridtiling,
    consistency,
    edge_cells,
    gridtiling_assignment_from_bcsp,
    gt_block_approx,
    gt_bruteforce,
    GridTilingInstance,
    pairs_consistent,
)
from detlab.linalg import (
    RatVectorSet,
    arrowhead_det,
    det,
    det_cofactor,
    gram,
    inner,
    principal_submatrix,
    scale_matrix,
    sq_norm,
    vol_squared,
)
from detlab.models import VerificationReport
from detlab.rational import approx_exp, approx_sqrt, format_rat
from detlab.reductions import (
    gridtiling_to_detmax,
    gridtiling_to_orthovectors,
    ksum_det_enclosure,
    ksum_has_solution,
    ksum_normalize,
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

logger = logging.getLogger("detlab.verification")


@dataclass
class SuiteContext:
    report: VerificationReport
    rng: random.Random
    trials: int
    guard: ResourceGuard

    def check(self, ok: bool, message: str, counterexample: Optional[dict] = None) -> bool:
        if not ok:
            logger.error(f"[{self.report.suite}] {message}")
            self.report.fail(message, counterexample)
        return ok

    def tick(self) -> None:
        self.report.trials += 1


SUITES: dict[str, Callable[[SuiteContext], None]] = {}


def suite(name: str):
    def register(fn: Callable[[SuiteContext], None]):
        SUITES[name] = fn
        return fn

    return register


def _rand_rat(rng: random.Random, lo: int, hi: int, max_den: int = 6) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * den, hi * den), den)


def _rand_vectors(
    rng: random.Random, n: int, d: int, lo: int = -3, hi: int = 3, max_den: int = 4
) -> RatVectorSet:
    return RatVectorSet.from_rows(
        [[_rand_rat(rng, lo, hi, max_den) for _ in range(d)] for _ in range(n)]
    )


def _rand_subset(rng: random.Random, n: int, size: int) -> tuple[int, ...]:
    return tuple(sorted(rng.sample(range(n), size)))


def _taylor_bracket(x: Fraction, terms: int = 60) -> tuple[Fraction, Fraction]:
    """e^x for 0 <= x <= 1 lies in [S, S + 2 * next term]."""
    total, term = Fraction(0), Fraction(1)
    for m in range(terms):
        if m:
            term = term * x / m
        total += term
    return total, total + 2 * term * x / terms


@suite("fig1-golden")
def fig1_golden(ctx: SuiteContext) -> None:
    vs = fig1_vectors()
    a = gram(vs)
    example = vs.to_dict()
    expected = ((25, 10, 5, 15), (10, 13, 5, 9), (5, 5, 11, 7), (15, 9, 7, 11))
    ctx.tick()
    ctx.check(a.entries == tuple(tuple(Fraction(x) for x in r) for r in expected),
              "Gram matrix differs from the reference", example)
    ctx.check(det(principal_submatrix(a, (0, 1, 2))) == 2025, "det A_{1,2,3} != 2025", example)
    ctx.check(det(principal_submatrix(a, (0, 1, 3))) == 225, "det A_{1,2,4} != 225", example)
    ctx.check(vol_squared(vs, (0, 1, 2)) == 2025, "vol^2 of {1,2,3} != 2025", example)
    best = maxdet_bruteforce(a, 3, ctx.guard)
    ctx.check(best.subset == (0, 1, 2) and best.value == 2025,
              f"maxdet(A,3) returned {best.to_dict()}", example)


@suite("table1-golden")
def table1_golden(ctx: SuiteContext) -> None:
    inst = table1_instance()
    example = inst.to_dict()
    ctx.tick()
    _, opt = gt_bruteforce(inst, ctx.guard)
    ctx.check(opt == 18, f"Grid Tiling optimum {opt} != 18", example)
    ctx.check(consistency(inst, TABLE1_SOLUTION) == 18,
              "reference solution is not consistent", example)

    ortho = gridtiling_to_orthovectors(inst)
    ctx.check(ortho.vectors.n == 18 and ortho.vectors.d == 36,
              f"orthogonality reduction shape {ortho.vectors.n}x{ortho.vectors.d}", example)
    ctx.check(all(sq_norm(v) == 4 for v in ortho.vectors.vectors),
              "vector with norm^2 != 4", example)
    ctx.check(find_orthogonal_set(ortho.vectors, 9, ctx.guard) is not None,
              "no orthogonal 9-subset in the reduction of Table 1", example)

    gap = gridtiling_to_detmax(inst, ctx.guard)
    ctx.check(all(gap.normalized.entries[i][i] == 1 for i in range(gap.normalized.n)),
              "normalized Gram matrix has a non-unit diagonal", example)
    best = maxdet_bruteforce(gap.normalized, 9, ctx.guard)
    ctx.check(best.value == 1,
              f"maxdet of the gap reduction is {best.value}, expected 1", example)


@suite("rational-approx")
def rational_approx(ctx: SuiteContext) -> None:
    for _ in range(ctx.trials):
        ctx.tick()
        x = Fraction(ctx.rng.randint(0, 64), 64)
        eps = Fraction(1, 10 ** ctx.rng.randint(1, 12))
        r = approx_exp(x, eps)
        lo, hi = _taylor_bracket(x)
        ctx.check((1 - eps) * hi <= r <= (1 + eps) * lo,
                  f"approx_exp({x}, {eps}) out of bounds",
                  {"x": format_rat(x), "eps": format_rat(eps), "r": format_rat(r)})
        x2 = Fraction(ctx.rng.randint(x.numerator * 64 // x.denominator, 64), 64)
        ctx.check(r <= (1 + 2 * eps) * approx_exp(x2, eps),
                  f"approx_exp not monotone between {x} and {x2}",
                  {"x": format_rat(x), "x2": format_rat(x2), "eps": format_rat(eps)})

        y = Fraction(ctx.rng.randint(1, 10**4), ctx.rng.randint(1, 10**4))
        s = approx_sqrt(y, eps)
        ctx.check((1 - eps) ** 2 * y <= s * s <= (1 + eps) ** 2 * y,
                  f"approx_sqrt({y}, {eps}) out of bounds",
                  {"x": format_rat(y), "eps": format_rat(eps), "r": format_rat(s)})


@suite("linalg-oracles")
def linalg_oracles(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        n = rng.randint(1, 5)
        m = tuple(tuple(_rand_rat(rng, -4, 4) for _ in range(n)) for _ in range(n))
        ctx.check(det(m) == det_cofactor(m), "Bareiss det differs from cofactor expansion",
                  {"matrix": [[format_rat(x) for x in r] for r in m]})

        vs = _rand_vectors(rng, rng.randint(1, 8), rng.randint(1, 6))
        a = gram(vs)
        s = _rand_subset(rng, vs.n, rng.randint(0, vs.n))
        ctx.check(vol_squared(vs, s) == det(principal_submatrix(a, s)),
                  f"vol^2 != det(gram_S) for S={s}", vs.to_dict())
        c = _rand_rat(rng, -3, 3)
        ctx.check(det(principal_submatrix(scale_matrix(a, c), s))
                  == c ** len(s) * det(principal_submatrix(a, s)),
                  "det(cM_S) != c^|S| det(M_S)", vs.to_dict())


@suite("arrowhead-det")
def arrowhead_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        n = 6
        rows = [[Fraction(0)] * n for _ in range(n)]
        rows[0][0] = _rand_rat(rng, -5, 5)
        for i in range(1, n):
            rows[0][i] = _rand_rat(rng, -5, 5)
            rows[i][0] = _rand_rat(rng, -5, 5)
            diag = _rand_rat(rng, 1, 5)
            rows[i][i] = diag if rng.random() < 0.5 else -diag
        s = _rand_subset(rng, n, rng.randint(0, n))
        ctx.check(arrowhead_det(rows, s, fallback=False) == det(principal_submatrix(rows, s)),
                  f"arrowhead_det differs from det for S={s}",
                  {"matrix": [[format_rat(x) for x in r] for r in rows], "subset": list(s)})


@suite("greedy")
def greedy_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        vs = _rand_vectors(rng, rng.randint(3, 8), rng.randint(1, 4))
        k = rng.randint(1, min(3, vs.n))
        g = maxdet_greedy(vs, k)
        best = maxdet_bruteforce(vs, k, ctx.guard)
        ctx.check(g.value * factorial(k) ** 2 >= best.value,
                  f"greedy {g.value} * (k!)^2 < maxdet {best.value}",
                  {**vs.to_dict(), "k": k})


@suite("obs5-additive")
def additive_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        d = rng.randint(1, 3)
        vs = _rand_vectors(rng, rng.randint(d, 8), d, lo=-1, hi=1, max_den=7)
        k = rng.randint(1, d)
        eps = rng.choice((Fraction(1), Fraction(1, 2), Fraction(1, 4)))
        result = maxdet_additive_approx(vs, k, eps, ctx.guard)
        best = maxdet_bruteforce(vs, k, ctx.guard)
        example = {**vs.to_dict(), "k": k, "eps": format_rat(eps)}
        ctx.check(result.solution.value >= best.value - eps,
                  f"additive value {result.solution.value} < maxdet {best.value} - {eps}",
                  example)

        delta = result.delta
        ctx.check(len(result.representatives) <= (2 / delta + 1) ** d,
                  "more distinct rounded vectors than grid points", example)
        bound = 3 * d ** (2 * d + 1) * delta
        a, b = gram(vs), gram(result.rounded)
        for s in combinations(result.representatives, k):
            diff = abs(det(principal_submatrix(a, s)) - det(principal_submatrix(b, s)))
            if not ctx.check(diff <= bound, f"rounding moved det by {diff} > {bound} on {s}",
                             example):
                break


@suite("ortho-nonneg")
def ortho_nonneg_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        d = rng.randint(1, 6)
        vs = RatVectorSet.from_rows(
            [[rng.choice((0, 0, 1, 2)) for _ in range(d)] for _ in range(rng.randint(1, 8))]
        )
        k = rng.randint(1, vs.n)
        generic = find_orthogonal_set(vs, k, ctx.guard)
        packed = find_orthogonal_set_nonneg(vs, k)
        example = {**vs.to_dict(), "k": k}
        ctx.check((generic is None) == (packed is None),
                  f"set packing says {packed}, exhaustive search says {generic}", example)
        if packed is not None:
            ctx.check(all(inner(vs[i], vs[j]) == 0 for i, j in combinations(packed, 2)),
                      f"set packing returned a non-orthogonal set {packed}", example)


@suite("obs3-block")
def block_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        inst = random_gridtiling(rng, 4, 3, 3)
        eps = rng.choice((Fraction(1), Fraction(2)))
        _, opt = gt_bruteforce(inst, ctx.guard)
        cons = consistency(inst, gt_block_approx(inst, eps, ctx.guard))
        ctx.check(cons >= opt - eps * inst.k**2,
                  f"block approximation {cons} < opt {opt} - {eps * inst.k ** 2}",
                  {**inst.to_dict(), "eps": format_rat(eps)})


@suite("bcsp-reduction")
def bcsp_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        inst, psi = planted_bcsp(rng, 3, rng.randint(2, 3))
        example = {**inst.to_dict(), "witness": psi}
        for mode in ("full", "equal"):
            gt = bcsp_to_gridtiling(inst, diagonal=mode)
            sigma = gridtiling_assignment_from_bcsp(psi)
            ctx.check(consistency(gt, sigma) == 2 * gt.k**2,
                      f"planted assignment is not a Grid Tiling solution ({mode})", example)
            # the full diagonal holds n^2 pairs per cell; solve it only for n = 2
            if mode == "equal" or inst.n == 2:
                _, opt = gt_bruteforce(gt, ctx.guard)
                ctx.check(opt == 2 * gt.k**2, f"Grid Tiling optimum {opt} ({mode})", example)

        # soundness: read the assignment off the diagonal of an optimal tiling
        gt = bcsp_to_gridtiling(inst, diagonal="equal")
        sigma, opt = gt_bruteforce(gt, ctx.guard)
        psi_back = bcsp_assignment_from_gridtiling(sigma, gt.k)
        inc = 2 * gt.k**2 - opt
        frac = bcsp_eval(inst, psi_back)
        ctx.check(frac >= 1 - 3 * Fraction(inc, gt.k),
                  f"extracted assignment satisfies {frac} < 1 - 3*{inc}/{gt.k}", example)


@suite("lemma4-endtoend")
def ksum_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        n = rng.randint(2, 5)
        k = rng.randint(1, min(3, n - 1))
        try:
            inst, _ = random_ksum(rng, n, k, 8, planted=rng.random() < 0.5)
        except DomainError:
            continue
        out = ksum_to_arrowhead(inst, ctx.guard)
        example = inst.to_dict()
        ctx.check(out.certified, "threshold certificate does not hold", example)
        best = maxdet_bruteforce(out.matrix, out.kk, ctx.guard)
        expected = ksum_has_solution(inst) is not None
        ctx.check(out.decide(best.value) == expected,
                  f"decision {out.decide(best.value)} but subset-sum oracle says {expected}",
                  example)

        s = _rand_subset(rng, inst.n + 1, rng.randint(1, inst.n + 1))
        lo, hi = ksum_det_enclosure(inst, s)
        value = det(principal_submatrix(out.matrix, s))
        slack = Fraction(1, 10**6)
        ctx.check(lo * (1 - slack) <= value <= hi * (1 + slack),
                  f"minor on {s} is {float(value)}, closed form [{float(lo)}, {float(hi)}]",
                  example)


def ksum_sweep(ctx: SuiteContext, max_n: int = 5, max_value: int = 8, max_k: int = 3) -> None:
    """
    Every instance with 2 <= n <= max_n, values in 1..max_value, every
    target in (0, total) and every k <= max_k. Values are enumerated as
    sorted tuples: permuting them permutes the matrix, which leaves both
    maxdet and the subset-sum answer unchanged.
    """
    for n in range(2, max_n + 1):
        for values in combinations_with_replacement(range(1, max_value + 1), n):
            total = sum(values)
            for k in range(1, min(max_k, n) + 1):
                sums = {sum(c) for c in combinations(values, k)}
                for target in range(1, total):
                    ctx.tick()
                    example = {"type": "ksum", "values": list(values), "target": target, "k": k}
                    out = ksum_to_arrowhead(ksum_normalize(values, target, k), ctx.guard)
                    best = max(
                        arrowhead_det(out.matrix, s) for s in combinations(range(n + 1), k + 1)
                    )
                    expected = target in sums
                    ctx.check(out.certified, "threshold certificate does not hold", example)
                    ctx.check(out.decide(best) == expected,
                              f"decision {out.decide(best)} but subset-sum oracle says {expected}",
                              example)
        logger.info(f"[{ctx.report.suite}] n={n} done, {ctx.report.trials} instances so far")


@suite("lemma4-sweep")
def ksum_sweep_suite(ctx: SuiteContext) -> None:
    ksum_sweep(ctx)


@suite("lemma6-gadget")
def gadget_suite(ctx: SuiteContext) -> None:
    for ell in (2, 4, 6):
        ctx.tick()
        gadget = civril_gadget(ell, ctx.guard)
        ctx.check(gadget.size == 2**ell and gadget.dim == 2 ** (ell + 1),
                  f"gadget ell={ell} has shape {gadget.size}x{gadget.dim}", {"ell": ell})
        for problem in gadget.check_identities()[:5]:
            ctx.check(False, f"ell={ell}: {problem}", {"ell": ell})


@suite("gap-completeness")
def gap_completeness_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        inst, sigma = planted_gridtiling(rng, 3, rng.randint(2, 4), 2)
        out = gridtiling_to_detmax(inst, ctx.guard)
        subset = tuple(sorted(out.labels.index((cell, p)) for cell, p in sigma.items()))
        witness_det = det(principal_submatrix(out.normalized, subset))
        # unit diagonal caps every minor at 1, so the witness attains maxdet
        ctx.check(witness_det == 1, f"planted subset has det {witness_det}", inst.to_dict())
        if comb(out.normalized.n, out.kk) <= 20000:
            best = maxdet_bruteforce(out.normalized, out.kk, ctx.guard)
            ctx.check(best.value == 1, f"maxdet {best.value} != 1", inst.to_dict())


@suite("lemma9-volume")
def duplicate_volume_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    out = gridtiling_to_detmax(table1_instance(), ctx.guard)
    k2 = out.kk
    done = 0
    while done < ctx.trials:
        s = _rand_subset(rng, out.vectors.n, k2)
        dup, cov = out.dup_cov(s)
        if dup > k2 // 2:
            continue
        done += 1
        ctx.tick()
        ctx.check(dup + cov == k2, f"dup + cov != k^2 for {s}", {"subset": list(s)})
        vol2 = det(principal_submatrix(out.raw_gram, s))
        ctx.check(vol2 <= 4**k2 * Fraction(3, 4) ** dup,
                  f"vol^2 {vol2} exceeds 4^k2 (3/4)^{dup} for {s}", {"subset": list(s)})


@suite("lemma10-volume")
def inconsistency_volume_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        inst = random_gridtiling(rng, 3, rng.randint(2, 3), 2)
        out = gridtiling_to_detmax(inst, ctx.guard)
        s = _rand_subset(rng, out.vectors.n, rng.randint(1, min(out.kk, out.vectors.n)))
        m = out.inconsistent_followers(s)
        vol2 = det(principal_submatrix(out.raw_gram, s))
        ctx.check(vol2 <= 4 ** len(s) * Fraction(63, 64) ** m,
                  f"vol^2 {vol2} exceeds 4^|S| (63/64)^{m} for {s}",
                  {**inst.to_dict(), "subset": list(s)})

    # soundness on a broken Table 1: no consistent assignment remains
    cells = [list(col) for col in TABLE1_CELLS]
    cells[0][0] = ((2, 3),)
    broken = GridTilingInstance.from_cells(3, 4, cells)
    _, opt = gt_bruteforce(broken, ctx.guard)
    out = gridtiling_to_detmax(broken, ctx.guard)
    best = maxdet_bruteforce(out.normalized, out.kk, ctx.guard)
    ctx.tick()
    ctx.check(opt < 18, f"broken Table 1 still has optimum {opt}", broken.to_dict())
    ctx.check(best.value <= Fraction(999, 1000) ** (18 - opt),
              f"maxdet {float(best.value)} exceeds 0.999^{18 - opt}", broken.to_dict())


@suite("ortho-reduction")
def ortho_reduction_suite(ctx: SuiteContext) -> None:
    rng = ctx.rng
    for _ in range(ctx.trials):
        ctx.tick()
        inst = random_gridtiling(rng, 3, rng.randint(1, 3), 2)
        out = gridtiling_to_orthovectors(inst)
        vs = out.vectors
        example = inst.to_dict()
        ctx.check(all(sq_norm(v) == 4 for v in vs.vectors), "vector with norm^2 != 4", example)

        by_cell: dict = {}
        for idx, (cell, p) in enumerate(out.labels):
            by_cell.setdefault(cell, []).append((idx, p))
        for edge in adjacency_pairs(inst.k):
            a, b = edge_cells(edge, inst.k)
            for ia, pa in by_cell[a]:
                for ib, pb in by_cell[b]:
                    orthogonal = inner(vs[ia], vs[ib]) == 0
                    ctx.check(orthogonal == pairs_consistent(edge, pa, pb),
                              f"adjacent vectors {ia}, {ib} break the orthogonality rule",
                              example)

        _, opt = gt_bruteforce(inst, ctx.guard)
        found = find_orthogonal_set(vs, out.kk, ctx.guard)
        ctx.check((found is not None) == (opt == 2 * inst.k**2),
                  f"orthogonal set {found} but Grid Tiling optimum {opt}", example)


def run_suite(
    name: str,
    trials: Optional[int] = None,
    seed: int = 0,
    config: Optional[LabConfig] = None,
) -> VerificationReport:
    if name not in SUITES:
        raise DomainError(f"Unknown suite: {name!r}")
    config = config or LabConfig()
    guard = ResourceGuard(config)
    report = VerificationReport(suite=name)
    ctx = SuiteContext(
        report=report,
        rng=random.Random(seed),
        trials=trials if trials is not None else config.verify.trials,
        guard=guard,
    )

    logger.info(f"Running suite {name} (trials={ctx.trials}, seed={seed})")
    start = time.perf_counter()
    SUITES[name](ctx)
    report.wall_time = time.perf_counter() - start
    report.memory = guard.get_memory_stats()

    status = "passed" if report.passed else f"FAILED ({len(report.failures)} failures)"
    logger.info(f"Suite {name} {status} in {report.wall_time:.2f}s")
    return report


def run_all(
    trials: Optional[int] = None, seed: int = 0, config: Optional[LabConfig] = None
) -> list[VerificationReport]:
    return [run_suite(name, trials, seed, config) for name in SUITES]
