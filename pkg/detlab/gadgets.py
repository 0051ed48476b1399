import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Optional

import numpy as np

from detlab.errors import DomainError
from detlab.linalg import RatVectorSet, Vector, inner
from detlab.rational import Rat
from detlab.resources import ResourceGuard

logger = logging.getLogger("detlab.gadgets")


def sylvester_hadamard(ell: int) -> np.ndarray:
    """Order 2^ell Hadamard matrix by repeated Kronecker products."""
    h = np.array([[1]], dtype=np.int64)
    base = np.array([[1, 1], [1, -1]], dtype=np.int64)
    for _ in range(ell):
        h = np.kron(base, h)
    return h


@dataclass(frozen=True)
class GadgetFamily:
    """
    2^ell unit vectors of dimension 2^(ell+1) with entries in {0, 2^(-ell/2)}.

    Distinct members have inner product 1/2, and so does a member against
    the complement of another; a member is orthogonal to its own complement.
    """

    ell: int
    vectors: RatVectorSet

    @property
    def size(self) -> int:
        return self.vectors.n

    @property
    def dim(self) -> int:
        return self.vectors.d

    @cached_property
    def unit(self) -> Rat:
        return Fraction(1, 2 ** (self.ell // 2))

    def member(self, j: int) -> Vector:
        return self.vectors.vectors[j]

    def complement(self, j: int) -> Vector:
        return tuple(self.unit - x for x in self.vectors.vectors[j])

    def check_identities(self) -> list[str]:
        """Exact scan of every norm and pairwise product; returns violations."""
        problems = []
        half = Fraction(1, 2)
        comps = [self.complement(j) for j in range(self.size)]
        for i in range(self.size):
            b = self.member(i)
            if any(x not in (0, self.unit) for x in b):
                problems.append(f"b_{i} has an entry outside {{0, {self.unit}}}")
            if inner(b, b) != 1:
                problems.append(f"|b_{i}|^2 = {inner(b, b)}")
            if inner(b, comps[i]) != 0:
                problems.append(f"<b_{i}, bbar_{i}> = {inner(b, comps[i])}")
        for i, j in combinations(range(self.size), 2):
            bi, bj = self.member(i), self.member(j)
            pairs = {
                "<b_i, b_j>": inner(bi, bj),
                "<b_i, bbar_j>": inner(bi, comps[j]),
                "<bbar_i, b_j>": inner(comps[i], bj),
            }
            for label, value in pairs.items():
                if value != half:
                    problems.append(f"{label} = {value} for i={i}, j={j}")
            if inner(comps[i], comps[j]) != inner(bi, bj):
                problems.append(f"<bbar_i, bbar_j> != <b_i, b_j> for i={i}, j={j}")
        return problems


def civril_gadget(ell: int, guard: Optional[ResourceGuard] = None) -> GadgetFamily:
    """
    Map each row of the Sylvester Hadamard matrix entrywise +1 -> (1, 0),
    -1 -> (0, 1) and scale by 2^(-ell/2).
    """
    guard = guard or ResourceGuard()
    if ell < 2 or ell % 2:
        raise DomainError(f"gadget order must be a positive even integer, got {ell}")
    guard.check_gadget(ell)

    h = sylvester_hadamard(ell)
    unit = Fraction(1, 2 ** (ell // 2))
    zero = Fraction(0)
    vectors = []
    for row in h:
        v = []
        for sign in row:
            v.extend((unit, zero) if sign > 0 else (zero, unit))
        vectors.append(tuple(v))

    logger.debug(f"Built gadget ell={ell}: {len(vectors)} vectors of dimension {2 ** (ell + 1)}")
    return GadgetFamily(ell=ell, vectors=RatVectorSet(d=2 ** (ell + 1), vectors=tuple(vectors)))
