"""
Exact dense linear algebra over the rationals.

Indices are 0-based inside the package; arrowhead matrices use row/column 0
as the hub, so S_{-0} is simply S without index 0. The CLI converts to
1-based indices at the JSON boundary.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import lcm, prod
from typing import Iterable, Sequence, Union

from detlab.errors import DomainError
from detlab.rational import Rat, RatLike, format_rat, parse_rat

logger = logging.getLogger("detlab.linalg")

Vector = tuple[Rat, ...]
Matrix = tuple[tuple[Rat, ...], ...]
IndexSet = tuple[int, ...]


class PsdProvenance(str, Enum):
    CONSTRUCTED = "constructed"
    ASSERTED = "asserted"


@dataclass(frozen=True)
class RatVectorSet:
    d: int
    vectors: tuple[Vector, ...]

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"vector dimension must be >= 1, got {self.d}")
        if not self.vectors:
            raise DomainError("a vector set needs at least one vector")
        for idx, v in enumerate(self.vectors):
            if len(v) != self.d:
                raise DomainError(
                    f"vector {idx} has dimension {len(v)}, expected {self.d}"
                )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[RatLike]]) -> "RatVectorSet":
        vectors = tuple(tuple(parse_rat(x) for x in row) for row in rows)
        if not vectors:
            raise DomainError("a vector set needs at least one vector")
        return cls(d=len(vectors[0]), vectors=vectors)

    @property
    def n(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def __getitem__(self, i: int) -> Vector:
        return self.vectors[i]

    def subset(self, indices: Iterable[int]) -> list[Vector]:
        return [self.vectors[i] for i in indices]

    def to_dict(self) -> dict:
        return {
            "type": "vectors",
            "d": self.d,
            "vectors": [[format_rat(x) for x in v] for v in self.vectors],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RatVectorSet":
        rows = data.get("vectors")
        if not isinstance(rows, list):
            raise DomainError("vectors instance needs a 'vectors' list")
        try:
            vs = cls.from_rows(rows)
        except TypeError as e:
            raise DomainError(f"malformed vectors instance: {e}")
        if "d" in data and data["d"] != vs.d:
            raise DomainError(f"declared d={data['d']} but vectors have d={vs.d}")
        return vs


@dataclass(frozen=True)
class GramMatrix:
    n: int
    entries: Matrix
    psd_provenance: PsdProvenance = PsdProvenance.ASSERTED

    def __post_init__(self):
        if len(self.entries) != self.n or any(len(r) != self.n for r in self.entries):
            raise DomainError(f"gram matrix must be {self.n}x{self.n}")
        for i in range(self.n):
            if self.entries[i][i] < 0:
                raise DomainError(f"negative diagonal entry at {i}: {self.entries[i][i]}")
            for j in range(i + 1, self.n):
                if self.entries[i][j] != self.entries[j][i]:
                    raise DomainError(f"gram matrix is not symmetric at ({i},{j})")

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[Iterable[RatLike]],
        psd_provenance: PsdProvenance = PsdProvenance.ASSERTED,
    ) -> "GramMatrix":
        entries = tuple(tuple(parse_rat(x) for x in row) for row in rows)
        return cls(n=len(entries), entries=entries, psd_provenance=psd_provenance)

    def __getitem__(self, ij: tuple[int, int]) -> Rat:
        i, j = ij
        return self.entries[i][j]

    def to_dict(self) -> dict:
        return {
            "type": "gram",
            "n": self.n,
            "entries": [[format_rat(x) for x in row] for row in self.entries],
            "psd": self.psd_provenance.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GramMatrix":
        rows = data.get("entries")
        if not isinstance(rows, list):
            raise DomainError("gram instance needs an 'entries' list")
        try:
            psd = PsdProvenance(data.get("psd", "asserted"))
        except ValueError:
            raise DomainError(f"unknown psd provenance: {data.get('psd')!r}")
        try:
            m = cls.from_rows(rows, psd_provenance=psd)
        except TypeError as e:
            raise DomainError(f"malformed gram instance: {e}")
        if "n" in data and data["n"] != m.n:
            raise DomainError(f"declared n={data['n']} but matrix has order {m.n}")
        return m


MatrixLike = Union[GramMatrix, Sequence[Sequence[Rat]]]


def _rows(matrix: MatrixLike) -> Matrix:
    if isinstance(matrix, GramMatrix):
        return matrix.entries
    rows = tuple(tuple(r) for r in matrix)
    if any(len(r) != len(rows) for r in rows):
        raise DomainError("matrix is not square")
    return rows


def check_index_set(indices: Iterable[int], n: int) -> IndexSet:
    s = tuple(indices)
    for a, b in zip(s, s[1:]):
        if a >= b:
            raise DomainError(f"index set must be strictly increasing: {s}")
    if s and (s[0] < 0 or s[-1] >= n):
        raise DomainError(f"index set {s} out of range for order {n}")
    return s


def inner(u: Sequence[Rat], v: Sequence[Rat]) -> Rat:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def sq_norm(v: Sequence[Rat]) -> Rat:
    return inner(v, v)


def gram(vs: RatVectorSet) -> GramMatrix:
    n = vs.n
    entries = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            value = inner(vs.vectors[i], vs.vectors[j])
            entries[i][j] = value
            entries[j][i] = value
    return GramMatrix(
        n=n,
        entries=tuple(tuple(r) for r in entries),
        psd_provenance=PsdProvenance.CONSTRUCTED,
    )


def principal_submatrix(matrix: MatrixLike, indices: Iterable[int]) -> Matrix:
    rows = _rows(matrix)
    s = check_index_set(indices, len(rows))
    return tuple(tuple(rows[i][j] for j in s) for i in s)


def scale_matrix(matrix: MatrixLike, c: RatLike) -> Matrix:
    c = parse_rat(c)
    return tuple(tuple(c * x for x in row) for row in _rows(matrix))


def integer_det(rows: list[list[int]]) -> int:
    """Bareiss fraction-free elimination; consumes ``rows``."""
    n = len(rows)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = rows[k][k]
        row_k = rows[k]
        for i in range(k + 1, n):
            row_i = rows[i]
            factor = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - factor * row_k[j]) // prev
        prev = pivot
    return sign * rows[n - 1][n - 1]


def det(matrix: MatrixLike) -> Rat:
    """Exact determinant; the empty matrix has determinant 1."""
    rows = _rows(matrix)
    if not rows:
        return Fraction(1)
    scale = 1
    int_rows = []
    for row in rows:
        row_lcm = lcm(*(x.denominator for x in row))
        scale *= row_lcm
        int_rows.append([x.numerator * (row_lcm // x.denominator) for x in row])
    return Fraction(integer_det(int_rows), scale)


def det_cofactor(matrix: MatrixLike) -> Rat:
    """Laplace expansion along the first row. Oracle only; O(n!)."""
    rows = _rows(matrix)
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return rows[0][0]
    total = Fraction(0)
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * det_cofactor(minor)
        total += term if j % 2 == 0 else -term
    return total


def residual(v: Sequence[Rat], basis: Sequence[Sequence[Rat]]) -> Vector:
    """v minus its projection onto span(basis); basis must be pairwise orthogonal and nonzero."""
    r = list(v)
    for u in basis:
        coef = inner(r, u) / sq_norm(u)
        if coef:
            r = [a - coef * b for a, b in zip(r, u)]
    return tuple(r)


def dis_squared(v: Sequence[Rat], vectors: Sequence[Sequence[Rat]]) -> Rat:
    """Squared distance from v to the span of ``vectors``."""
    basis: list[Vector] = []
    for w in vectors:
        r = residual(w, basis)
        if any(r):
            basis.append(r)
    return sq_norm(residual(v, basis))


def vol_squared(vs: RatVectorSet, indices: Iterable[int]) -> Rat:
    """Squared volume of the parallelepiped spanned by the chosen vectors."""
    s = check_index_set(indices, vs.n)
    volume = Fraction(1)
    basis: list[Vector] = []
    for i in s:
        r = residual(vs.vectors[i], basis)
        dist = sq_norm(r)
        if dist == 0:
            return Fraction(0)
        volume *= dist
        basis.append(r)
    return volume


def symmetrized_graph(matrix: MatrixLike) -> list[tuple[int, int]]:
    rows = _rows(matrix)
    n = len(rows)
    return [
        (i, j)
        for i, j in combinations(range(n), 2)
        if rows[i][j] != 0 or rows[j][i] != 0
    ]


def is_arrowhead(matrix: MatrixLike) -> bool:
    rows = _rows(matrix)
    n = len(rows)
    return all(
        rows[i][j] == 0 for i in range(1, n) for j in range(1, n) if i != j
    )


def is_tridiagonal(matrix: MatrixLike) -> bool:
    rows = _rows(matrix)
    n = len(rows)
    return all(rows[i][j] == 0 for i in range(n) for j in range(n) if abs(i - j) >= 2)


def arrowhead_det(
    matrix: MatrixLike, indices: Iterable[int], fallback: bool = True
) -> Rat:
    """
    Closed-form principal minor of an arrowhead matrix.

    With a zero diagonal entry outside the hub the closed form does not
    apply: the generic determinant is used when ``fallback`` is set,
    otherwise DomainError is raised.
    """
    rows = _rows(matrix)
    if not is_arrowhead(rows):
        raise DomainError("arrowhead_det needs an arrowhead matrix")
    s = check_index_set(indices, len(rows))

    if any(rows[i][i] == 0 for i in range(1, len(rows))):
        if not fallback:
            raise DomainError("arrowhead_det needs nonzero diagonal entries outside row 0")
        logger.debug("zero diagonal in arrowhead matrix, using generic det")
        return det(principal_submatrix(rows, s))

    leaves = [i for i in s if i != 0]
    diag = prod((rows[i][i] for i in leaves), start=Fraction(1))
    if not s or s[0] != 0:
        return diag
    hub = rows[0][0] - sum(
        (rows[0][i] * rows[i][0] / rows[i][i] for i in leaves), Fraction(0)
    )
    return diag * hub
