"""
Determinant maximization solvers.

Exact enumeration, the greedy volume baseline, the additive rounding
algorithm and orthogonal-subset search. Every exact solver returns the
lexicographically smallest optimal index set.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from itertools import combinations, islice
from math import floor, lcm
from typing import Iterable, Iterator, Optional, Union

from detlab.errors import DomainError, ResourceLimitError
from detlab.linalg import (
    GramMatrix,
    RatVectorSet,
    det,
    gram,
    inner,
    integer_det,
    principal_submatrix,
    residual,
    sq_norm,
    vol_squared,
)
from detlab.models import DetMaxSolution
from detlab.rational import Rat, RatLike, parse_rat
from detlab.resources import ResourceGuard

logger = logging.getLogger("detlab.solvers")

Instance = Union[GramMatrix, RatVectorSet]


def _as_gram(instance: Instance) -> GramMatrix:
    if isinstance(instance, RatVectorSet):
        return gram(instance)
    return instance


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, {n}], got {k}")


def _chunks(it: Iterator[tuple[int, ...]], size: int) -> Iterator[list[tuple[int, ...]]]:
    while True:
        chunk = list(islice(it, size))
        if not chunk:
            return
        yield chunk


def _best_in_chunk(
    int_rows: tuple[tuple[int, ...], ...], subsets: list[tuple[int, ...]]
) -> tuple[Optional[int], Optional[tuple[int, ...]]]:
    best_value: Optional[int] = None
    best_subset: Optional[tuple[int, ...]] = None
    for s in subsets:
        value = integer_det([[int_rows[i][j] for j in s] for i in s])
        if best_value is None or value > best_value:
            best_value, best_subset = value, s
    return best_value, best_subset


def maxdet_bruteforce(
    instance: Instance, k: int, guard: Optional[ResourceGuard] = None
) -> DetMaxSolution:
    """
    Exhaustive search over all k-subsets.

    Denominators are cleared once with the LCM L of every entry, so each
    minor is an integer determinant of L*A_S. Subsets are visited in
    lexicographic order and only a strictly larger value replaces the
    incumbent; chunks merge in the same order, so the answer does not depend
    on the number of workers.
    """
    guard = guard or ResourceGuard()
    a = _as_gram(instance)
    _check_k(k, a.n)
    guard.check_subsets(a.n, k)

    scale = lcm(*(x.denominator for row in a.entries for x in row))
    int_rows = tuple(tuple(int(x * scale) for x in row) for row in a.entries)

    chunks = _chunks(combinations(range(a.n), k), guard.chunk_size)
    best_value: Optional[int] = None
    best_subset: Optional[tuple[int, ...]] = None

    if guard.workers > 1:
        logger.debug(f"Enumerating with {guard.workers} workers")
        with ProcessPoolExecutor(max_workers=guard.workers) as pool:
            results = pool.map(partial(_best_in_chunk, int_rows), chunks)
            for value, subset in results:
                if value is not None and (best_value is None or value > best_value):
                    best_value, best_subset = value, subset
    else:
        for chunk in chunks:
            value, subset = _best_in_chunk(int_rows, chunk)
            if value is not None and (best_value is None or value > best_value):
                best_value, best_subset = value, subset

    assert best_subset is not None
    return DetMaxSolution(subset=best_subset, value=Fraction(best_value, scale**k))


def maxdet_greedy(vs: RatVectorSet, k: int) -> DetMaxSolution:
    """Pick the vector farthest from the span of those already chosen."""
    _check_k(k, vs.n)
    chosen: list[int] = []
    basis = []
    for _ in range(k):
        best_i, best_dist, best_r = -1, Fraction(-1), None
        for i in range(vs.n):
            if i in chosen:
                continue
            r = residual(vs.vectors[i], basis)
            dist = sq_norm(r)
            if dist > best_dist:
                best_i, best_dist, best_r = i, dist, r
        chosen.append(best_i)
        if best_dist > 0:
            basis.append(best_r)

    subset = tuple(sorted(chosen))
    return DetMaxSolution(subset=subset, value=vol_squared(vs, subset))


@dataclass(frozen=True)
class AdditiveApproxResult:
    solution: DetMaxSolution
    delta: Rat
    rounded: RatVectorSet
    representatives: tuple[int, ...]
    degenerate: bool = False


def additive_delta(eps: RatLike, d: int) -> Rat:
    """Grid spacing floor(1/eps)^-1 / (6 d^(2d+1)); eps >= 1 counts as 1."""
    eps = parse_rat(eps)
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    m = floor(1 / min(eps, Fraction(1)))
    return Fraction(1, m * 6 * d ** (2 * d + 1))


def round_to_grid(value: Rat, delta: Rat) -> Rat:
    """Nearest multiple of delta; exact midpoints go down."""
    q = value / delta
    f = floor(q)
    if q - f > Fraction(1, 2):
        f += 1
    return f * delta


def maxdet_additive_approx(
    vs: RatVectorSet, k: int, eps: RatLike, guard: Optional[ResourceGuard] = None
) -> AdditiveApproxResult:
    """Round to a fine grid, drop duplicates, then search the rounded set exhaustively."""
    eps = parse_rat(eps)
    _check_k(k, vs.n)
    if k > vs.d:
        raise DomainError(f"k={k} exceeds the dimension d={vs.d}")
    for idx, v in enumerate(vs.vectors):
        if any(abs(x) > 1 for x in v):
            raise DomainError(f"vector {idx} has an entry outside [-1, 1]")

    delta = additive_delta(eps, vs.d)
    rounded = tuple(tuple(round_to_grid(x, delta) for x in v) for v in vs.vectors)

    first_seen: dict[tuple[Rat, ...], int] = {}
    for idx, w in enumerate(rounded):
        first_seen.setdefault(w, idx)
    reps = tuple(sorted(first_seen.values()))
    rounded_set = RatVectorSet(d=vs.d, vectors=rounded)
    original = gram(vs)

    if len(reps) < k:
        logger.warning(
            f"Only {len(reps)} distinct rounded vectors for k={k}, returning the first k indices"
        )
        subset = tuple(range(k))
        solution = DetMaxSolution(subset, det(principal_submatrix(original, subset)))
        return AdditiveApproxResult(solution, delta, rounded_set, reps, degenerate=True)

    reduced = RatVectorSet(d=vs.d, vectors=tuple(rounded[i] for i in reps))
    inner_best = maxdet_bruteforce(reduced, k, guard)
    subset = tuple(reps[i] for i in inner_best.subset)
    logger.debug(f"delta={delta}, {len(reps)} distinct rounded vectors, picked {subset}")

    solution = DetMaxSolution(subset, det(principal_submatrix(original, subset)))
    return AdditiveApproxResult(solution, delta, rounded_set, reps)


def _orthogonality(vs: RatVectorSet) -> list[set[int]]:
    n = vs.n
    ortho: list[set[int]] = [set() for _ in range(n)]
    for i, j in combinations(range(n), 2):
        if inner(vs.vectors[i], vs.vectors[j]) == 0:
            ortho[i].add(j)
            ortho[j].add(i)
    return ortho


def find_orthogonal_set(
    vs: RatVectorSet, k: int, guard: Optional[ResourceGuard] = None
) -> Optional[tuple[int, ...]]:
    """
    Lexicographically smallest pairwise-orthogonal k-subset, or None.

    Depth-first over increasing indices, extending only with candidates
    orthogonal to everything chosen so far.
    """
    guard = guard or ResourceGuard()
    _check_k(k, vs.n)
    ortho = _orthogonality(vs)
    budget = guard.limits.max_subsets
    visited = 0

    def extend(chosen: list[int], candidates: list[int]) -> Optional[tuple[int, ...]]:
        nonlocal visited
        if len(chosen) == k:
            return tuple(chosen)
        if len(chosen) + len(candidates) < k:
            return None
        for pos, c in enumerate(candidates):
            visited += 1
            if visited > budget:
                raise ResourceLimitError(
                    f"orthogonal-set search visited more than max_subsets={budget} nodes"
                )
            rest = [x for x in candidates[pos + 1 :] if x in ortho[c]]
            found = extend(chosen + [c], rest)
            if found is not None:
                return found
        return None

    return extend([], list(range(vs.n)))


def _support_mask(v: Iterable[Rat]) -> int:
    mask = 0
    for e, x in enumerate(v):
        if x > 0:
            mask |= 1 << e
    return mask


def find_orthogonal_set_nonneg(vs: RatVectorSet, k: int) -> Optional[tuple[int, ...]]:
    """
    Orthogonal k-subset of nonnegative vectors via set packing on supports.

    Two nonnegative vectors are orthogonal iff their supports are disjoint,
    so only the first vector of each distinct nonempty support matters.
    Zero vectors are orthogonal to everything and fill any remaining slots.
    """
    _check_k(k, vs.n)
    for idx, v in enumerate(vs.vectors):
        if any(x < 0 for x in v):
            raise DomainError(f"vector {idx} has a negative entry")

    zeros: list[int] = []
    supports: dict[int, int] = {}
    for idx, v in enumerate(vs.vectors):
        mask = _support_mask(v)
        if mask == 0:
            zeros.append(idx)
        else:
            supports.setdefault(mask, idx)

    needed = max(0, k - len(zeros))
    if needed > vs.d:
        return None

    items = sorted((idx, mask) for mask, idx in supports.items())

    def pack(start: int, used: int, chosen: list[int]) -> Optional[list[int]]:
        if len(chosen) == needed:
            return chosen
        for pos in range(start, len(items)):
            idx, mask = items[pos]
            if mask & used == 0:
                found = pack(pos + 1, used | mask, chosen + [idx])
                if found is not None:
                    return found
        return None

    packing = pack(0, 0, [])
    if packing is None:
        return None
    return tuple(sorted(zeros[: k - needed] + packing))
