"""
Executable reductions.

- k-Sum to determinant maximization on an arrowhead Gram matrix, with a
  certified rational decision threshold.
- Grid Tiling to pairwise-orthogonal vectors built from Pythagorean triples.
- Grid Tiling to determinant maximization with a unit diagonal, built from
  the Hadamard gadget (gap version).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from detlab.errors import DomainError, LabError
from detlab.gadgets import GadgetFamily, civril_gadget
from detlab.gridtiling import (
    Cell,
    GridTilingInstance,
    Pair,
    adjacency_pairs,
)
from detlab.linalg import GramMatrix, PsdProvenance, RatVectorSet, gram, scale_matrix
from detlab.rational import (
    Rat,
    RatLike,
    approx_exp,
    approx_sqrt,
    exp_enclosure,
    format_rat,
    parse_rat,
)
from detlab.resources import ResourceGuard

logger = logging.getLogger("detlab.reductions")

ALPHA = Fraction(1)
GAMMA = Fraction(5)


def pythagorean_triples(n: int) -> list[tuple[int, int, int]]:
    """(2x+1, 2x^2+2x, 2x^2+2x+1) for x = 1..n; all primitive."""
    if n < 1:
        raise DomainError(f"need at least one triple, got n={n}")
    return [(2 * x + 1, 2 * x * x + 2 * x, 2 * x * x + 2 * x + 1) for x in range(1, n + 1)]


@dataclass(frozen=True)
class KSumInstance:
    """
    Normalized k-Sum: values in (0, 1) summing to 1, all multiples of g.
    """

    x: tuple[Rat, ...]
    t: Rat
    k: int
    g: Rat

    def __post_init__(self):
        n = len(self.x)
        if not 1 <= self.k <= n:
            raise DomainError(f"k must lie in [1, {n}], got {self.k}")
        if self.g <= 0:
            raise DomainError(f"granularity must be positive, got {self.g}")
        if sum(self.x) != 1:
            raise DomainError(f"values must sum to 1, got {sum(self.x)}")
        for i, v in enumerate(self.x):
            if not 0 < v < 1:
                raise DomainError(f"x_{i + 1} = {v} is not in (0, 1)")
            if (v / self.g).denominator != 1:
                raise DomainError(f"x_{i + 1} = {v} is not a multiple of g = {self.g}")
        if not 0 < self.t < 1:
            raise DomainError(f"target t = {self.t} is not in (0, 1)")
        if (self.t / self.g).denominator != 1:
            raise DomainError(f"target t = {self.t} is not a multiple of g = {self.g}")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def delta(self) -> Rat:
        """Smallest possible nonzero gap between a k-subset sum and t."""
        return min(Fraction(1, self.n ** (2 * self.k + 1)), self.g)

    def to_dict(self) -> dict:
        return {
            "type": "ksum",
            "x": [format_rat(v) for v in self.x],
            "t": format_rat(self.t),
            "k": self.k,
            "g": format_rat(self.g),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KSumInstance":
        try:
            if "values" in data:
                return ksum_normalize(data["values"], data["target"], int(data["k"]))
            return cls(
                x=tuple(parse_rat(v) for v in data["x"]),
                t=parse_rat(data["t"]),
                k=int(data["k"]),
                g=parse_rat(data["g"]),
            )
        except (KeyError, TypeError) as e:
            raise DomainError(f"malformed ksum instance: {e}")


def ksum_normalize(values: Sequence[int], target: int, k: int) -> KSumInstance:
    """Divide integer values and target by the total."""
    values = [int(v) for v in values]
    target = int(target)
    if any(v <= 0 for v in values):
        raise DomainError(f"k-Sum values must be positive integers, got {values}")
    total = sum(values)
    if not 0 < target < total:
        raise DomainError(f"target {target} must lie strictly between 0 and {total}")
    return KSumInstance(
        x=tuple(Fraction(v, total) for v in values),
        t=Fraction(target, total),
        k=k,
        g=Fraction(1, total),
    )


def ksum_has_solution(inst: KSumInstance) -> Optional[tuple[int, ...]]:
    """First k-subset (lexicographically) summing to t, or None."""
    for s in combinations(range(inst.n), inst.k):
        if sum(inst.x[i] for i in s) == inst.t:
            return s
    return None


@dataclass(frozen=True)
class ArrowheadReductionOutput:
    matrix: GramMatrix
    vectors: RatVectorSet
    kk: int
    theta: Rat
    alpha: Rat
    beta: Rat
    gamma: Rat
    delta: Rat
    eps: Rat
    soundness_hi: Rat
    completeness_lo: Rat

    def decide(self, maxdet_value: Rat) -> bool:
        """True when the k-Sum instance is a YES instance."""
        return maxdet_value >= self.theta

    @property
    def certified(self) -> bool:
        return self.soundness_hi < self.theta < self.completeness_lo

    def meta(self) -> dict:
        return {
            "alpha": format_rat(self.alpha),
            "beta": format_rat(self.beta),
            "gamma": format_rat(self.gamma),
            "delta": format_rat(self.delta),
            "eps": format_rat(self.eps),
            "theta": format_rat(self.theta),
            "certificate": {
                "soundness_hi": format_rat(self.soundness_hi),
                "completeness_lo": format_rat(self.completeness_lo),
            },
        }

    def to_dict(self) -> dict:
        result = self.matrix.to_dict()
        result["k"] = self.kk
        result["meta"] = self.meta()
        return result


def ksum_thresholds(inst: KSumInstance) -> tuple[Rat, Rat]:
    """
    Certified rational bounds (soundness_hi, completeness_lo).

    With OPT = (1+t)^(k-1) gamma^2 e^t and E = e^(-delta)(1+delta), a YES
    instance reaches at least (2/3 + E/3) OPT and a NO instance stays below
    (1/3 + 2E/3) OPT. Both exponentials are enclosed to relative precision
    delta^2/100, well inside the (1-E)/3 gap.
    """
    delta = inst.delta
    prec = delta * delta / 100
    et_lo, et_hi = exp_enclosure(inst.t, prec)
    em_lo, em_hi = exp_enclosure(-delta, prec)
    base = (1 + inst.t) ** (inst.k - 1) * GAMMA**2
    opt_lo, opt_hi = base * et_lo, base * et_hi
    e_lo, e_hi = em_lo * (1 + delta), em_hi * (1 + delta)
    completeness_lo = (Fraction(2, 3) + e_lo / 3) * opt_lo
    soundness_hi = (Fraction(1, 3) + 2 * e_hi / 3) * opt_hi
    return soundness_hi, completeness_lo


def ksum_epsilon(k: int, delta: Rat) -> Rat:
    return Fraction(1, (100000 * k) ** k) * (delta**2 / 2 - delta**3 / 3)


def ksum_to_arrowhead(
    inst: KSumInstance, guard: Optional[ResourceGuard] = None
) -> ArrowheadReductionOutput:
    """
    Gram matrix of n+1 vectors in dimension 2n whose largest (k+1)-minor
    separates YES from NO instances at theta.

    w_0 carries gamma*sqrt(x_j) in coordinate j; w_i carries sqrt(alpha e^x_i)
    in coordinate i and sqrt(beta e^x_i) in coordinate n+i. Only the nonzero
    entries are approximated, each to relative precision eps, so the
    supports stay disjoint and the Gram matrix is exactly arrowhead.
    """
    guard = guard or ResourceGuard()
    n, k = inst.n, inst.k
    beta = inst.t
    delta = inst.delta
    eps = ksum_epsilon(k, delta)
    guard.check_bits(eps.denominator, "k-Sum reduction precision")
    half = eps / 2

    zero = Fraction(0)
    hub = [approx_sqrt(GAMMA**2 * xj, half) for xj in inst.x] + [zero] * n
    vectors = [tuple(hub)]
    for i, xi in enumerate(inst.x):
        e = approx_exp(xi, half)
        w = [zero] * (2 * n)
        w[i] = approx_sqrt(ALPHA * e, half)
        w[n + i] = approx_sqrt(beta * e, half)
        vectors.append(tuple(w))

    vs = RatVectorSet(d=2 * n, vectors=tuple(vectors))
    matrix = gram(vs)

    soundness_hi, completeness_lo = ksum_thresholds(inst)
    if not soundness_hi < completeness_lo:
        raise LabError(
            f"could not separate thresholds: {soundness_hi} >= {completeness_lo}"
        )
    theta = (soundness_hi + completeness_lo) / 2
    logger.debug(
        f"k-Sum reduction: n={n}, k={k}, delta={delta}, eps has "
        f"{eps.denominator.bit_length()} bits"
    )
    return ArrowheadReductionOutput(
        matrix=matrix,
        vectors=vs,
        kk=k + 1,
        theta=theta,
        alpha=ALPHA,
        beta=beta,
        gamma=GAMMA,
        delta=delta,
        eps=eps,
        soundness_hi=soundness_hi,
        completeness_lo=completeness_lo,
    )


def ksum_det_enclosure(
    inst: KSumInstance, subset: Iterable[int], prec: RatLike = Fraction(1, 10**12)
) -> tuple[Rat, Rat]:
    """
    Bracket of the exact (unrounded) principal minor on ``subset``.

    With index 0 and leaves T of total X the minor is
    (alpha+beta)^|T| e^X gamma^2 (1 - alpha X/(alpha+beta)); without index 0
    it is the product of the leaf diagonals (alpha+beta) e^x_i.
    """
    prec = parse_rat(prec)
    s = sorted(subset)
    leaves = [i - 1 for i in s if i != 0]
    ab = ALPHA + inst.t
    total = sum((inst.x[i] for i in leaves), Fraction(0))
    e_lo, e_hi = exp_enclosure(total, prec)
    factor = ab ** len(leaves)
    if s and s[0] == 0:
        factor *= GAMMA**2 * (1 - ALPHA * total / ab)
    return factor * e_lo, factor * e_hi


def _cell_edges(i: int, j: int, k: int) -> tuple[tuple, tuple, tuple, tuple]:
    """(previous vertical, next vertical, previous horizontal, next horizontal) pair keys."""
    jp, ip = (j - 1) % k, (i - 1) % k
    return (i, jp, i, jp + 1), (i, j, i, j + 1), (ip, j, ip + 1, j), (i, j, i + 1, j)


def _cell_labels(inst: GridTilingInstance) -> list[tuple[Cell, Pair]]:
    return [
        ((i, j), p)
        for i in range(inst.k)
        for j in range(inst.k)
        for p in inst.cells[i][j]
    ]


@dataclass(frozen=True)
class OrthoReductionOutput:
    vectors: RatVectorSet
    kk: int
    labels: tuple[tuple[Cell, Pair], ...]

    def assignment_to_subset(self, sigma: Mapping[Cell, Pair]) -> tuple[int, ...]:
        index = {label: pos for pos, label in enumerate(self.labels)}
        try:
            return tuple(sorted(index[(cell, tuple(p))] for cell, p in sigma.items()))
        except KeyError as e:
            raise DomainError(f"assignment uses a pair outside its cell: {e}")

    def subset_to_assignment(self, subset: Iterable[int]) -> dict[Cell, Pair]:
        return {self.labels[i][0]: self.labels[i][1] for i in subset}

    def to_dict(self) -> dict:
        result = self.vectors.to_dict()
        result["k"] = self.kk
        result["meta"] = {"blocks": str(self.vectors.d // 2)}
        result["labels"] = [[list(c), list(p)] for c, p in self.labels]
        return result


def gridtiling_to_orthovectors(inst: GridTilingInstance) -> OrthoReductionOutput:
    """
    One vector per (cell, pair) made of 2k^2 two-dimensional blocks.

    The x value of a pair puts the unit vectors (-b/c, a/c) and (a/c, b/c)
    on the previous and next vertical pair blocks; the y value does the same
    on the horizontal ones. Two such unit vectors from different values of
    the same triple family are never orthogonal, so adjacent vectors are
    orthogonal exactly when they agree.
    """
    k = inst.k
    edges = adjacency_pairs(k)
    position = {e: pos for pos, e in enumerate(edges)}
    triples = pythagorean_triples(inst.n)
    zero = Fraction(0)

    def prev_block(v: int) -> tuple[Rat, Rat]:
        a, b, c = triples[v - 1]
        return Fraction(-b, c), Fraction(a, c)

    def next_block(v: int) -> tuple[Rat, Rat]:
        a, b, c = triples[v - 1]
        return Fraction(a, c), Fraction(b, c)

    labels = _cell_labels(inst)
    vectors = []
    for (i, j), (x, y) in labels:
        v = [zero] * (2 * len(edges))
        pv, nv, ph, nh = _cell_edges(i, j, k)
        for edge, block in ((pv, prev_block(x)), (nv, next_block(x)), (ph, prev_block(y)), (nh, next_block(y))):
            pos = 2 * position[edge]
            v[pos], v[pos + 1] = block
        vectors.append(tuple(v))

    vs = RatVectorSet(d=2 * len(edges), vectors=tuple(vectors))
    logger.info(f"Orthogonality reduction: {vs.n} vectors of dimension {vs.d}")
    return OrthoReductionOutput(vectors=vs, kk=k * k, labels=tuple(labels))


def gadget_order(n: int) -> int:
    """2*ceil(log2 n), at least 2 so the gadget is never empty."""
    return max(2, 2 * (n - 1).bit_length())


@dataclass(frozen=True)
class GapReductionOutput:
    vectors: RatVectorSet
    raw_gram: GramMatrix
    normalized: GramMatrix
    kk: int
    k: int
    ell: int
    labels: tuple[tuple[Cell, Pair], ...]
    gadget: GadgetFamily = field(repr=False)

    def dup_cov(self, subset: Iterable[int]) -> tuple[int, int]:
        """(cells without a selected vector, cells with at least one)."""
        covered = {self.labels[i][0] for i in subset}
        return self.k * self.k - len(covered), len(covered)

    def inconsistent_followers(self, subset: Iterable[int]) -> int:
        """
        Selected vectors that are adjacent and inconsistent with some
        earlier selected vector (in index order).
        """
        k = self.k
        chosen: list[int] = []
        count = 0
        for idx in sorted(subset):
            (i, j), (x, y) = self.labels[idx]
            for prev in chosen:
                (i2, j2), (x2, y2) = self.labels[prev]
                vertical = i == i2 and (j - j2) % k in (1, k - 1)
                horizontal = j == j2 and (i - i2) % k in (1, k - 1)
                if (vertical and x != x2) or (horizontal and y != y2):
                    count += 1
                    break
            chosen.append(idx)
        return count

    def to_dict(self) -> dict:
        result = self.normalized.to_dict()
        result["k"] = self.kk
        result["meta"] = {"ell": str(self.ell), "scale": "1/4"}
        result["labels"] = [[list(c), list(p)] for c, p in self.labels]
        return result


def gridtiling_to_detmax(
    inst: GridTilingInstance, guard: Optional[ResourceGuard] = None
) -> GapReductionOutput:
    """
    Gap reduction: each vector holds gadget members on its four pair
    blocks (complements on the previous pairs), so every raw vector has
    squared norm 4. The Gram matrix divided by 4 has a unit diagonal and
    its k^2 principal minor is 1 exactly when a consistent assignment exists.
    """
    guard = guard or ResourceGuard()
    k = inst.k
    ell = gadget_order(inst.n)
    gadget = civril_gadget(ell, guard)
    block = gadget.dim
    edges = adjacency_pairs(k)
    position = {e: pos for pos, e in enumerate(edges)}
    zero = Fraction(0)

    labels = _cell_labels(inst)
    vectors = []
    for (i, j), (x, y) in labels:
        v = [zero] * (block * len(edges))
        pv, nv, ph, nh = _cell_edges(i, j, k)
        parts = (
            (pv, gadget.complement(x - 1)),
            (nv, gadget.member(x - 1)),
            (ph, gadget.complement(y - 1)),
            (nh, gadget.member(y - 1)),
        )
        for edge, part in parts:
            start = block * position[edge]
            v[start : start + block] = part
        vectors.append(tuple(v))

    vs = RatVectorSet(d=block * len(edges), vectors=tuple(vectors))
    raw = gram(vs)
    normalized = GramMatrix(
        n=raw.n,
        entries=scale_matrix(raw, Fraction(1, 4)),
        psd_provenance=PsdProvenance.CONSTRUCTED,
    )
    logger.info(f"Gap reduction: {vs.n} vectors of dimension {vs.d}, ell={ell}")
    return GapReductionOutput(
        vectors=vs,
        raw_gram=raw,
        normalized=normalized,
        kk=k * k,
        k=k,
        ell=ell,
        labels=tuple(labels),
        gadget=gadget,
    )
