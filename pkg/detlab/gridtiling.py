"""
Grid Tiling and binary CSP instances, scoring and exact solvers.

Cells are addressed 0-based as (i, j): i selects the column and j the row,
so S_{i,j} lives at ``cells[i][j]``. Pair values are 1-based over [n].
Vertical neighbours (i, j), (i, j+1) must agree on the first coordinate;
horizontal neighbours (i, j), (i+1, j) on the second. Adjacency wraps
around mod k, which is why k >= 3 is required.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import ceil, comb, floor, prod
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from detlab.errors import DomainError
from detlab.rational import Rat, RatLike, parse_rat
from detlab.resources import ResourceGuard

logger = logging.getLogger("detlab.gridtiling")

Pair = tuple[int, int]
Cell = tuple[int, int]
Edge = tuple[int, int, int, int]
Assignment = dict[Cell, Pair]


def _check_pair(pair: Sequence[int], n: int) -> Pair:
    if len(pair) != 2:
        raise DomainError(f"expected a pair, got {pair!r}")
    x, y = int(pair[0]), int(pair[1])
    if not (1 <= x <= n and 1 <= y <= n):
        raise DomainError(f"pair {pair!r} outside [1..{n}]^2")
    return x, y


def adjacency_pairs(k: int) -> list[Edge]:
    """The 2k^2 adjacent cell pairs, as pre-wrap tuples sorted lexicographically."""
    if k < 3:
        raise DomainError(f"toroidal grids need k >= 3, got {k}")
    edges = []
    for i in range(k):
        for j in range(k):
            edges.append((i, j, i, j + 1))
            edges.append((i, j, i + 1, j))
    return sorted(edges)


def edge_cells(edge: Edge, k: int) -> tuple[Cell, Cell]:
    i1, j1, i2, j2 = edge
    return (i1, j1), (i2 % k, j2 % k)


def is_vertical(edge: Edge) -> bool:
    return edge[0] == edge[2]


def pairs_consistent(edge: Edge, p: Pair, q: Pair) -> bool:
    return p[0] == q[0] if is_vertical(edge) else p[1] == q[1]


@dataclass(frozen=True)
class GridTilingInstance:
    k: int
    n: int
    cells: tuple[tuple[tuple[Pair, ...], ...], ...]

    def __post_init__(self):
        if self.k < 3:
            raise DomainError(f"Grid Tiling needs k >= 3, got {self.k}")
        if self.n < 1:
            raise DomainError(f"alphabet bound n must be >= 1, got {self.n}")
        if len(self.cells) != self.k or any(len(col) != self.k for col in self.cells):
            raise DomainError(f"cells must form a {self.k}x{self.k} array")
        for i, col in enumerate(self.cells):
            for j, cell in enumerate(col):
                if not cell:
                    raise DomainError(f"cell ({i + 1},{j + 1}) is empty")

    @classmethod
    def from_cells(
        cls, k: int, n: int, cells: Sequence[Sequence[Iterable[Sequence[int]]]]
    ) -> "GridTilingInstance":
        normalized = tuple(
            tuple(tuple(sorted({_check_pair(p, n) for p in cell})) for cell in col)
            for col in cells
        )
        return cls(k=k, n=n, cells=normalized)

    def cell(self, i: int, j: int) -> tuple[Pair, ...]:
        return self.cells[i][j]

    @property
    def size(self) -> int:
        return sum(len(cell) for col in self.cells for cell in col)

    def assignment_count(self) -> int:
        return prod(len(cell) for col in self.cells for cell in col)

    def to_dict(self) -> dict:
        return {
            "type": "gridtiling",
            "k": self.k,
            "n": self.n,
            "cells": [[[list(p) for p in cell] for cell in col] for col in self.cells],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridTilingInstance":
        try:
            return cls.from_cells(int(data["k"]), int(data["n"]), data["cells"])
        except (KeyError, TypeError) as e:
            raise DomainError(f"malformed gridtiling instance: {e}")


def assignment_to_list(sigma: Mapping[Cell, Optional[Pair]], k: int) -> list:
    return [
        [list(sigma[(i, j)]) if sigma.get((i, j)) else None for j in range(k)]
        for i in range(k)
    ]


def assignment_from_list(rows: Sequence[Sequence[Optional[Sequence[int]]]]) -> Assignment:
    sigma: Assignment = {}
    for i, col in enumerate(rows):
        for j, p in enumerate(col):
            if p is not None:
                sigma[(i, j)] = (int(p[0]), int(p[1]))
    return sigma


def _check_total(inst: GridTilingInstance, sigma: Mapping[Cell, Optional[Pair]]) -> None:
    for i in range(inst.k):
        for j in range(inst.k):
            p = sigma.get((i, j))
            if p is None:
                raise DomainError(f"assignment undefined at cell ({i + 1},{j + 1})")
            if tuple(p) not in inst.cells[i][j]:
                raise DomainError(f"pair {p} not in cell ({i + 1},{j + 1})")


def consistency(inst: GridTilingInstance, sigma: Mapping[Cell, Pair]) -> int:
    _check_total(inst, sigma)
    count = 0
    for edge in adjacency_pairs(inst.k):
        a, b = edge_cells(edge, inst.k)
        if pairs_consistent(edge, sigma[a], sigma[b]):
            count += 1
    return count


def inconsistency(inst: GridTilingInstance, sigma: Mapping[Cell, Pair]) -> int:
    return 2 * inst.k * inst.k - consistency(inst, sigma)


def partial_inconsistency(
    inst: GridTilingInstance, sigma: Mapping[Cell, Optional[Pair]]
) -> int:
    """Inconsistent adjacent pairs among cells where sigma is defined."""
    count = 0
    for edge in adjacency_pairs(inst.k):
        a, b = edge_cells(edge, inst.k)
        p, q = sigma.get(a), sigma.get(b)
        if p is None or q is None:
            continue
        if not pairs_consistent(edge, p, q):
            count += 1
    return count


def _optimize_region(
    inst: GridTilingInstance,
    cols: Sequence[int],
    rows: Sequence[int],
    guard: ResourceGuard,
) -> tuple[Assignment, int]:
    """
    Exact optimum over the cells cols x rows, scoring only adjacent pairs
    with both ends inside the region.

    Dynamic program over columns: a column state is one choice per row.
    When the region spans every column the horizontal pairs close a cycle,
    so the first column's state is fixed in an outer loop. The
    lexicographically smallest optimum (column-major over pair indices) is
    recovered by a forward pass that always takes the first maximiser.
    """
    k = inst.k
    col_set, row_set = set(cols), set(rows)
    m = len(cols)

    states = [list(product(*(range(len(inst.cells[i][j])) for j in rows))) for i in cols]
    cyclic = m == k
    # size of the transition tables
    work = sum(len(states[c]) * len(states[(c + 1) % m]) for c in range(m))
    guard.check_assignments(work)

    # vertical pairs inside one column: row positions (a, b) with b = a + 1 mod k
    v_links = [
        (a, rows.index((r + 1) % k))
        for a, r in enumerate(rows)
        if (r + 1) % k in row_set
    ]

    within = []
    xs_by_col, ys_by_col = [], []
    for c, i in enumerate(cols):
        xs = np.array(
            [[inst.cells[i][r][s[a]][0] for a, r in enumerate(rows)] for s in states[c]],
            dtype=np.int64,
        ).reshape(len(states[c]), len(rows))
        ys = np.array(
            [[inst.cells[i][r][s[a]][1] for a, r in enumerate(rows)] for s in states[c]],
            dtype=np.int64,
        ).reshape(len(states[c]), len(rows))
        score = np.zeros(len(states[c]), dtype=np.int64)
        for a, b in v_links:
            score += xs[:, a] == xs[:, b]
        within.append(score)
        xs_by_col.append(xs)
        ys_by_col.append(ys)

    def link(c: int, c2: int) -> np.ndarray:
        ya, yb = ys_by_col[c], ys_by_col[c2]
        return (ya[:, None, :] == yb[None, :, :]).sum(axis=2)

    # horizontal links between consecutive region columns that are grid neighbours
    links: list[Optional[np.ndarray]] = []
    for c in range(m - 1 if not cyclic else m):
        c2 = (c + 1) % m
        if (cols[c] + 1) % k == cols[c2] and cols[c2] in col_set:
            links.append(link(c, c2))
        else:
            links.append(None)

    def step(c: int, tail: np.ndarray) -> np.ndarray:
        if links[c] is None:
            return np.full(len(states[c]), tail.max(), dtype=np.int64)
        return (links[c] + tail[None, :]).max(axis=1)

    def forward(first: int, suffix: list[np.ndarray]) -> list[int]:
        chosen = [first]
        for c in range(1, m):
            lk = links[c - 1]
            row = suffix[c] if lk is None else lk[chosen[-1]] + suffix[c]
            chosen.append(int(np.argmax(row)))
        return chosen

    def suffix_scores(close: Optional[np.ndarray]) -> list[np.ndarray]:
        suffix: list[np.ndarray] = [np.zeros(0, dtype=np.int64)] * m
        last = within[m - 1].copy()
        if close is not None:
            last = last + close
        suffix[m - 1] = last
        for c in range(m - 2, -1, -1):
            suffix[c] = within[c] + step(c, suffix[c + 1])
        return suffix

    if not cyclic or links[m - 1] is None:
        if m == 1:
            suffix = [within[0]]
        else:
            suffix = suffix_scores(None)
        first = int(np.argmax(suffix[0]))
        best = int(suffix[0][first])
        chosen = forward(first, suffix) if m > 1 else [first]
    else:
        best, chosen = -1, []
        closing = links[m - 1]
        for s0 in range(len(states[0])):
            suffix = suffix_scores(closing[:, s0])
            total = int(within[0][s0] + (links[0][s0] + suffix[1]).max())
            if total > best:
                best = total
                chosen = forward(s0, suffix)

    sigma: Assignment = {}
    for c, i in enumerate(cols):
        s = states[c][chosen[c]]
        for a, r in enumerate(rows):
            sigma[(i, r)] = inst.cells[i][r][s[a]]
    return sigma, best


def gt_bruteforce(
    inst: GridTilingInstance, guard: Optional[ResourceGuard] = None
) -> tuple[Assignment, int]:
    """Optimal assignment and its consistency; ties go to the lexicographically first choice."""
    guard = guard or ResourceGuard()
    sigma, opt = _optimize_region(inst, list(range(inst.k)), list(range(inst.k)), guard)
    logger.debug(f"Grid Tiling optimum {opt} of {2 * inst.k * inst.k}")
    return sigma, opt


def block_partition(k: int, eps: Rat) -> Optional[list[tuple[list[int], list[int]]]]:
    """Blocks of the approximation scheme, or None when eps*k < 4."""
    if eps * k < 4:
        return None
    ell = floor(eps * k / 2 - 1)
    side = ceil(Fraction(k, ell))
    ranges = []
    for b in range(1, ell + 1):
        lo, hi = side * (b - 1), min(side * b, k)
        ranges.append(list(range(lo, hi)))
    return [(ci, rj) for ci in ranges for rj in ranges if ci and rj]


def gt_block_approx(
    inst: GridTilingInstance, eps: RatLike, guard: Optional[ResourceGuard] = None
) -> Assignment:
    """Assignment with consistency at least opt - eps*k^2."""
    guard = guard or ResourceGuard()
    eps = parse_rat(eps)
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")

    blocks = block_partition(inst.k, eps)
    if blocks is None:
        logger.warning(f"eps*k = {eps * inst.k} < 4, solving exactly")
        sigma, _ = gt_bruteforce(inst, guard)
        return sigma

    logger.debug(f"Solving {len(blocks)} blocks for k={inst.k}, eps={eps}")
    sigma: Assignment = {}
    for cols, rows in blocks:
        part, _ = _optimize_region(inst, cols, rows, guard)
        sigma.update(part)
    return sigma


@dataclass(frozen=True)
class BcspInstance:
    """
    Binary CSP over variables 0..k-1 and alphabet [n].

    ``constraints`` maps (i, j) with i < j to the allowed (psi(i), psi(j))
    pairs. Pairs without an entry allow everything.
    """

    k: int
    n: int
    constraints: Mapping[tuple[int, int], frozenset[Pair]] = field(default_factory=dict)

    def __post_init__(self):
        if self.k < 2:
            raise DomainError(f"BCSP needs at least two variables, got {self.k}")
        if self.n < 1:
            raise DomainError(f"alphabet size must be >= 1, got {self.n}")
        for (i, j), pairs in self.constraints.items():
            if not 0 <= i < j < self.k:
                raise DomainError(f"constraint on invalid pair ({i + 1},{j + 1})")
            for p in pairs:
                _check_pair(p, self.n)

    @classmethod
    def from_constraints(
        cls, k: int, n: int, constraints: Mapping[tuple[int, int], Iterable[Sequence[int]]]
    ) -> "BcspInstance":
        normalized: dict[tuple[int, int], frozenset[Pair]] = {}
        for (i, j), pairs in constraints.items():
            if i == j:
                raise DomainError(f"constraint on a single variable {i + 1}")
            checked = {_check_pair(p, n) for p in pairs}
            if i > j:
                i, j = j, i
                checked = {(b, a) for a, b in checked}
            if (i, j) in normalized:
                raise DomainError(f"duplicate constraint on ({i + 1},{j + 1})")
            normalized[(i, j)] = frozenset(checked)
        return cls(k=k, n=n, constraints=normalized)

    def relation(self, i: int, j: int) -> frozenset[Pair]:
        """C_{i,j} seen from i, the full relation when unconstrained."""
        if i < j:
            pairs = self.constraints.get((i, j))
            if pairs is None:
                return _full(self.n)
            return pairs
        return frozenset((b, a) for a, b in self.relation(j, i))

    def allows(self, i: int, j: int, a: int, b: int) -> bool:
        if i > j:
            i, j, a, b = j, i, b, a
        pairs = self.constraints.get((i, j))
        return pairs is None or (a, b) in pairs

    def to_dict(self) -> dict:
        return {
            "type": "bcsp",
            "k": self.k,
            "n": self.n,
            "constraints": [
                {"i": i + 1, "j": j + 1, "pairs": [list(p) for p in sorted(pairs)]}
                for (i, j), pairs in sorted(self.constraints.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BcspInstance":
        try:
            raw = {
                (int(c["i"]) - 1, int(c["j"]) - 1): c["pairs"]
                for c in data.get("constraints", [])
            }
            return cls.from_constraints(int(data["k"]), int(data["n"]), raw)
        except (KeyError, TypeError) as e:
            raise DomainError(f"malformed bcsp instance: {e}")


def _full(n: int) -> frozenset[Pair]:
    return frozenset(product(range(1, n + 1), repeat=2))


def bcsp_eval(inst: BcspInstance, psi: Sequence[int]) -> Rat:
    """Fraction of the C(k,2) variable pairs whose constraint psi satisfies."""
    if len(psi) != inst.k:
        raise DomainError(f"assignment has {len(psi)} values for {inst.k} variables")
    satisfied = sum(
        1 for i, j in combinations(range(inst.k), 2) if inst.allows(i, j, psi[i], psi[j])
    )
    return Fraction(satisfied, comb(inst.k, 2))


def bcsp_bruteforce(
    inst: BcspInstance, guard: Optional[ResourceGuard] = None
) -> tuple[tuple[int, ...], Rat]:
    guard = guard or ResourceGuard()
    guard.check_assignments(inst.n**inst.k)
    best_psi: tuple[int, ...] = ()
    best = Fraction(-1)
    for psi in product(range(1, inst.n + 1), repeat=inst.k):
        value = bcsp_eval(inst, psi)
        if value > best:
            best_psi, best = psi, value
            if best == 1:
                break
    return best_psi, best


def bcsp_to_gridtiling(inst: BcspInstance, diagonal: str = "full") -> GridTilingInstance:
    """
    Grid Tiling instance with S_{i,j} = C_{i,j} off the diagonal.

    ``diagonal="full"`` puts [n]^2 on the diagonal cells. ``"equal"`` puts
    only the pairs (z, z) there; that variant is the one for which low
    inconsistency implies a good BCSP assignment (read off the diagonal).
    """
    if inst.k < 3:
        raise DomainError(f"the reduction needs k >= 3, got {inst.k}")
    if diagonal not in ("full", "equal"):
        raise DomainError(f"unknown diagonal mode: {diagonal!r}")

    if diagonal == "full":
        diag = sorted(_full(inst.n))
    else:
        diag = [(z, z) for z in range(1, inst.n + 1)]

    cells = []
    for i in range(inst.k):
        col = []
        for j in range(inst.k):
            if i == j:
                col.append(diag)
                continue
            relation = inst.relation(i, j)
            if not relation:
                raise DomainError(f"constraint ({i + 1},{j + 1}) is empty")
            col.append(sorted(relation))
        cells.append(col)
    return GridTilingInstance.from_cells(inst.k, inst.n, cells)


def gridtiling_assignment_from_bcsp(psi: Sequence[int]) -> Assignment:
    k = len(psi)
    return {(i, j): (psi[i], psi[j]) for i in range(k) for j in range(k)}


def bcsp_assignment_from_gridtiling(sigma: Mapping[Cell, Pair], k: int) -> tuple[int, ...]:
    return tuple(sigma[(i, i)][0] for i in range(k))


def three_coloring_bcsp(edges: Iterable[tuple[int, int]], k: int) -> BcspInstance:
    """Proper 3-colouring of a graph on vertices 0..k-1 as a BCSP."""
    proper = [(a, b) for a in range(1, 4) for b in range(1, 4) if a != b]
    return BcspInstance.from_constraints(k, 3, {tuple(e): proper for e in edges})
