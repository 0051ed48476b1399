"""
Seeded instance generators and the golden fixtures.

All randomness comes from one ``random.Random(seed)``, so a seed fixes the
output byte for byte.
"""

import logging
import random
from fractions import Fraction
from itertools import product

from detlab.errors import DomainError
from detlab.gridtiling import (
    BcspInstance,
    GridTilingInstance,
    assignment_to_list,
    three_coloring_bcsp,
)
from detlab.linalg import RatVectorSet, gram
from detlab.reductions import ksum_normalize

logger = logging.getLogger("detlab.generators")

GEN_KINDS = (
    "ksum",
    "gridtiling",
    "gridtiling-planted",
    "bcsp",
    "bcsp-planted",
    "vectors",
    "gram",
)

FIG1_VECTORS = ((5, 0, 0), (2, 3, 0), (1, 1, 3), (3, 1, 1))

# cells[i][j] holds S_{i+1,j+1}: i is the column, j the row
TABLE1_CELLS = (
    (((1, 1), (3, 2)), ((3, 4), (4, 3)), ((3, 2), (4, 1))),
    (((1, 2), (2, 2)), ((1, 4), (3, 1)), ((1, 2), (1, 3))),
    (((1, 2), (4, 2)), ((2, 1), (4, 4)), ((3, 3), (4, 2))),
)

TABLE1_SOLUTION = {
    (0, 0): (3, 2), (0, 1): (3, 4), (0, 2): (3, 2),
    (1, 0): (1, 2), (1, 1): (1, 4), (1, 2): (1, 2),
    (2, 0): (4, 2), (2, 1): (4, 4), (2, 2): (4, 2),
}

TRIANGLE_EDGES = ((0, 1), (1, 2), (0, 2))


def fig1_vectors() -> RatVectorSet:
    return RatVectorSet.from_rows(FIG1_VECTORS)


def table1_instance() -> GridTilingInstance:
    return GridTilingInstance.from_cells(3, 4, TABLE1_CELLS)


def triangle_three_coloring() -> BcspInstance:
    return three_coloring_bcsp(TRIANGLE_EDGES, 3)


def fixture(name: str) -> dict:
    if name == "fig1":
        return fig1_vectors().to_dict()
    if name == "table1":
        data = table1_instance().to_dict()
        data["witness"] = assignment_to_list(TABLE1_SOLUTION, 3)
        return data
    if name == "triangle3col":
        data = triangle_three_coloring().to_dict()
        data["witness"] = [1, 2, 3]
        return data
    raise DomainError(f"Unknown fixture: {name!r}")


FIXTURES = ("fig1", "table1", "triangle3col")


def _random_cell(rng: random.Random, n: int, size: int) -> list[tuple[int, int]]:
    universe = list(product(range(1, n + 1), repeat=2))
    return rng.sample(universe, rng.randint(1, min(size, len(universe))))


def random_gridtiling(rng: random.Random, k: int, n: int, cell_size: int) -> GridTilingInstance:
    cells = [[_random_cell(rng, n, cell_size) for _ in range(k)] for _ in range(k)]
    return GridTilingInstance.from_cells(k, n, cells)


def planted_gridtiling(
    rng: random.Random, k: int, n: int, cell_size: int
) -> tuple[GridTilingInstance, dict]:
    """Column values x_i and row values y_j put (x_i, y_j) in every cell, plus noise."""
    xs = [rng.randint(1, n) for _ in range(k)]
    ys = [rng.randint(1, n) for _ in range(k)]
    sigma = {(i, j): (xs[i], ys[j]) for i in range(k) for j in range(k)}
    cells = []
    for i in range(k):
        col = []
        for j in range(k):
            noise = _random_cell(rng, n, cell_size)[: max(0, cell_size - 1)]
            col.append([sigma[(i, j)]] + noise)
        cells.append(col)
    return GridTilingInstance.from_cells(k, n, cells), sigma


def random_bcsp(rng: random.Random, k: int, n: int) -> BcspInstance:
    universe = list(product(range(1, n + 1), repeat=2))
    constraints = {}
    for i in range(k):
        for j in range(i + 1, k):
            constraints[(i, j)] = rng.sample(universe, rng.randint(1, len(universe)))
    return BcspInstance.from_constraints(k, n, constraints)


def planted_bcsp(rng: random.Random, k: int, n: int) -> tuple[BcspInstance, list[int]]:
    psi = [rng.randint(1, n) for _ in range(k)]
    universe = list(product(range(1, n + 1), repeat=2))
    constraints = {}
    for i in range(k):
        for j in range(i + 1, k):
            extra = rng.sample(universe, rng.randint(0, len(universe) - 1))
            constraints[(i, j)] = [(psi[i], psi[j])] + extra
    return BcspInstance.from_constraints(k, n, constraints), psi


def random_vectors(
    rng: random.Random, n: int, d: int, max_value: int, denominator: int = 1
) -> RatVectorSet:
    rows = [
        [Fraction(rng.randint(-max_value, max_value), denominator) for _ in range(d)]
        for _ in range(n)
    ]
    return RatVectorSet.from_rows(rows)


def random_ksum(
    rng: random.Random, n: int, k: int, max_value: int, planted: bool = False
) -> tuple:
    values = [rng.randint(1, max_value) for _ in range(n)]
    total = sum(values)
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, {n}], got {k}")
    if planted:
        witness = sorted(rng.sample(range(n), k))
        target = sum(values[i] for i in witness)
        if target >= total:
            raise DomainError(f"planted target {target} is not below the total {total}")
        return ksum_normalize(values, target, k), witness
    if total < 2:
        raise DomainError("values leave no admissible target")
    return ksum_normalize(values, rng.randint(1, total - 1), k), None


def generate(
    kind: str,
    seed: int = 0,
    n: int = 4,
    k: int = 3,
    d: int = 3,
    max_value: int = 8,
    cell_size: int = 2,
    denominator: int = 1,
    planted: bool = False,
) -> dict:
    """Instance dict for ``kind``; planted kinds carry a "witness" field."""
    rng = random.Random(seed)
    logger.debug(f"Generating {kind} with seed={seed}")

    if kind == "ksum":
        inst, witness = random_ksum(rng, n, k, max_value, planted)
        data = inst.to_dict()
        if witness is not None:
            data["witness"] = [i + 1 for i in witness]
        return data
    if kind == "gridtiling":
        return random_gridtiling(rng, k, n, cell_size).to_dict()
    if kind == "gridtiling-planted":
        inst, sigma = planted_gridtiling(rng, k, n, cell_size)
        data = inst.to_dict()
        data["witness"] = assignment_to_list(sigma, k)
        return data
    if kind == "bcsp":
        return random_bcsp(rng, k, n).to_dict()
    if kind == "bcsp-planted":
        inst, psi = planted_bcsp(rng, k, n)
        data = inst.to_dict()
        data["witness"] = psi
        return data
    if kind == "vectors":
        return random_vectors(rng, n, d, max_value, denominator).to_dict()
    if kind == "gram":
        return gram(random_vectors(rng, n, d, max_value, denominator)).to_dict()
    raise DomainError(f"Unknown generator kind: {kind!r}")
