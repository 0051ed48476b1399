"""Unit tests for the k-Sum, orthogonality and gap reductions."""

from fractions import Fraction
from itertools import combinations

import pytest

from detlab.errors import DomainError, ResourceLimitError
from detlab.generators import TABLE1_CELLS
from detlab.gridtiling import GridTilingInstance, consistency, gt_bruteforce
from detlab.linalg import det, inner, is_arrowhead, principal_submatrix, sq_norm
from detlab.reductions import (
    KSumInstance,
    gadget_order,
    gridtiling_to_detmax,
    gridtiling_to_orthovectors,
    ksum_det_enclosure,
    ksum_has_solution,
    ksum_normalize,
    ksum_to_arrowhead,
    pythagorean_triples,
)
from detlab.solvers import find_orthogonal_set, maxdet_bruteforce


class TestPythagoreanTriples:
    def test_first_triples(self):
        assert pythagorean_triples(3) == [(3, 4, 5), (5, 12, 13), (7, 24, 25)]

    def test_triples_are_pythagorean(self):
        assert all(a * a + b * b == c * c for a, b, c in pythagorean_triples(20))

    def test_rejects_empty(self):
        with pytest.raises(DomainError):
            pythagorean_triples(0)


class TestKSumInstance:
    """Tests for normalized k-Sum instances."""

    def test_normalize(self):
        inst = ksum_normalize([1, 2, 3, 4], 5, 2)
        assert inst.x == (Fraction(1, 10), Fraction(1, 5), Fraction(3, 10), Fraction(2, 5))
        assert inst.t == Fraction(1, 2)
        assert inst.g == Fraction(1, 10)
        assert inst.delta == Fraction(1, 4**5)

    def test_delta_capped_by_granularity(self):
        inst = ksum_normalize([1, 1], 1, 1)
        assert inst.delta == Fraction(1, 8)

    def test_rejects_bad_sum(self):
        with pytest.raises(DomainError, match="sum to 1"):
            KSumInstance(x=(Fraction(1, 2), Fraction(1, 3)), t=Fraction(1, 2), k=1, g=Fraction(1, 6))

    def test_rejects_target_off_grid(self):
        with pytest.raises(DomainError, match="multiple"):
            KSumInstance(x=(Fraction(1, 2), Fraction(1, 2)), t=Fraction(1, 3), k=1, g=Fraction(1, 2))

    def test_dict_round_trip(self):
        inst = ksum_normalize([1, 2, 3, 4], 5, 2)
        assert KSumInstance.from_dict(inst.to_dict()) == inst

    def test_raw_values_accepted(self):
        inst = KSumInstance.from_dict({"type": "ksum", "values": [1, 2, 3], "target": 3, "k": 1})
        assert inst.t == Fraction(1, 2)

    def test_subset_sum_oracle(self):
        assert ksum_has_solution(ksum_normalize([1, 2, 3, 4], 5, 2)) == (0, 3)
        assert ksum_has_solution(ksum_normalize([1, 2, 4, 8], 7, 2)) is None


class TestArrowheadReduction:
    """Tests for ksum_to_arrowhead."""

    @pytest.mark.parametrize(
        "values, target, k, expected",
        [
            ([1, 2, 3], 3, 1, True),
            ([1, 2, 4], 3, 1, False),
            ([1, 2, 3, 4], 5, 2, True),
            ([1, 2, 4, 8], 7, 2, False),
        ],
    )
    def test_decision_matches_oracle(self, guard, values, target, k, expected):
        """Should decide k-Sum by comparing maxdet against theta."""
        inst = ksum_normalize(values, target, k)
        out = ksum_to_arrowhead(inst, guard)
        assert out.certified
        assert out.kk == k + 1
        assert is_arrowhead(out.matrix)
        best = maxdet_bruteforce(out.matrix, out.kk, guard)
        assert out.decide(best.value) is expected
        assert (ksum_has_solution(inst) is not None) is expected

    def test_meta_records_parameters(self, guard):
        out = ksum_to_arrowhead(ksum_normalize([1, 2, 3], 3, 1), guard)
        data = out.to_dict()
        assert data["type"] == "gram"
        assert data["k"] == 2
        assert data["meta"]["alpha"] == "1"
        assert data["meta"]["gamma"] == "5"
        assert data["meta"]["beta"] == "1/2"
        assert set(data["meta"]["certificate"]) == {"soundness_hi", "completeness_lo"}

    def test_minors_match_closed_form(self, guard):
        inst = ksum_normalize([1, 2, 3, 4], 5, 2)
        out = ksum_to_arrowhead(inst, guard)
        slack = Fraction(1, 10**6)
        for s in [(0,), (0, 1, 4), (1, 2), (0, 2, 3)]:
            lo, hi = ksum_det_enclosure(inst, s)
            value = det(principal_submatrix(out.matrix, s))
            assert lo * (1 - slack) <= value <= hi * (1 + slack)

    def test_precision_guard(self, tight_guard):
        with pytest.raises(ResourceLimitError, match="bits"):
            ksum_to_arrowhead(ksum_normalize([1, 2, 3, 4], 5, 2), tight_guard)


class TestOrthoReduction:
    """Tests for gridtiling_to_orthovectors on the worked grid."""

    def test_shape_and_norms(self, table1):
        out = gridtiling_to_orthovectors(table1)
        assert out.vectors.n == 18
        assert out.vectors.d == 36
        assert out.kk == 9
        assert all(sq_norm(v) == 4 for v in out.vectors.vectors)

    def test_solution_maps_to_orthogonal_set(self, table1, table1_solution):
        out = gridtiling_to_orthovectors(table1)
        subset = out.assignment_to_subset(table1_solution)
        assert len(subset) == 9
        vs = out.vectors
        assert all(inner(vs[i], vs[j]) == 0 for i, j in combinations(subset, 2))

    def test_search_recovers_a_solution(self, table1, guard):
        out = gridtiling_to_orthovectors(table1)
        found = find_orthogonal_set(out.vectors, 9, guard)
        assert found is not None
        assert consistency(table1, out.subset_to_assignment(found)) == 18

    def test_inconsistent_neighbours_not_orthogonal(self, table1):
        out = gridtiling_to_orthovectors(table1)
        a = out.labels.index(((0, 0), (1, 1)))
        b = out.labels.index(((0, 1), (3, 4)))
        assert inner(out.vectors[a], out.vectors[b]) != 0

    def test_unknown_pair(self, table1):
        out = gridtiling_to_orthovectors(table1)
        with pytest.raises(DomainError):
            out.assignment_to_subset({(0, 0): (4, 4)})


class TestGapReduction:
    """Tests for gridtiling_to_detmax."""

    @pytest.fixture
    def gap(self, table1, guard):
        return gridtiling_to_detmax(table1, guard)

    def test_gadget_order(self):
        assert gadget_order(1) == 2
        assert gadget_order(2) == 2
        assert gadget_order(4) == 4
        assert gadget_order(5) == 6

    def test_shape(self, gap):
        assert gap.ell == 4
        assert gap.vectors.d == 576
        assert gap.vectors.n == 18
        assert all(gap.raw_gram[i, i] == 4 for i in range(18))
        assert all(gap.normalized[i, i] == 1 for i in range(18))

    def test_inner_products(self, gap):
        """Should give 1/8 on inconsistent neighbours and 0 on consistent ones."""
        idx = {label: pos for pos, label in enumerate(gap.labels)}
        a = idx[((0, 0), (1, 1))]
        b = idx[((0, 1), (3, 4))]
        c = idx[((0, 0), (3, 2))]
        assert gap.normalized[a, b] == Fraction(1, 8)
        assert gap.normalized[c, b] == 0
        assert gap.raw_gram[a, c] == 2

    def test_solution_has_unit_determinant(self, gap, table1_solution):
        idx = {label: pos for pos, label in enumerate(gap.labels)}
        subset = tuple(sorted(idx[(cell, p)] for cell, p in table1_solution.items()))
        assert det(principal_submatrix(gap.normalized, subset)) == 1
        assert gap.dup_cov(subset) == (0, 9)
        assert gap.inconsistent_followers(subset) == 0

    def test_dup_and_followers(self, gap):
        idx = {label: pos for pos, label in enumerate(gap.labels)}
        subset = sorted([idx[((0, 0), (1, 1))], idx[((0, 0), (3, 2))], idx[((0, 1), (3, 4))]])
        assert gap.dup_cov(subset) == (7, 2)
        # (0,1) with x=3 clashes with (0,0) holding x=1
        assert gap.inconsistent_followers(subset) == 1

    def test_maxdet_is_one(self, gap, guard):
        """Should reach determinant 1 over all C(18, 9) subsets."""
        assert maxdet_bruteforce(gap.normalized, 9, guard).value == 1

    def test_output_dict(self, gap):
        data = gap.to_dict()
        assert data["type"] == "gram"
        assert data["k"] == 9
        assert data["meta"] == {"ell": "4", "scale": "1/4"}
        assert len(data["labels"]) == 18

    def test_unsatisfiable_grid_stays_below_one(self, guard):
        """Should keep maxdet at most 0.999 per missing consistent pair."""
        cells = [list(col) for col in TABLE1_CELLS]
        cells[0][0] = ((2, 3),)
        inst = GridTilingInstance.from_cells(3, 4, cells)
        _, opt = gt_bruteforce(inst, guard)
        assert opt < 18
        out = gridtiling_to_detmax(inst, guard)
        best = maxdet_bruteforce(out.normalized, 9, guard)
        assert best.value <= Fraction(999, 1000) ** (18 - opt)
