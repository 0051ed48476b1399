"""Unit tests for the Hadamard gadget family."""

from fractions import Fraction

import numpy as np
import pytest

from detlab.config import LabConfig, LimitSettings
from detlab.errors import DomainError, ResourceLimitError
from detlab.gadgets import civril_gadget, sylvester_hadamard
from detlab.linalg import inner
from detlab.resources import ResourceGuard


class TestSylvester:
    @pytest.mark.parametrize("ell", [0, 1, 3, 4])
    def test_rows_are_orthogonal(self, ell):
        h = sylvester_hadamard(ell)
        size = 2**ell
        assert h.shape == (size, size)
        np.testing.assert_array_equal(h @ h.T, size * np.eye(size, dtype=np.int64))

    def test_first_row_is_all_ones(self):
        assert (sylvester_hadamard(3)[0] == 1).all()


class TestCivrilGadget:
    """Tests for the gadget vectors and their identities."""

    @pytest.mark.parametrize("ell", [2, 4, 6])
    def test_identities_hold(self, ell):
        """Should satisfy every norm and inner-product identity exactly."""
        gadget = civril_gadget(ell)
        assert gadget.size == 2**ell
        assert gadget.dim == 2 ** (ell + 1)
        assert gadget.check_identities() == []

    def test_entries_and_complements(self):
        gadget = civril_gadget(2)
        assert gadget.unit == Fraction(1, 2)
        b0 = gadget.member(0)
        assert set(b0) == {Fraction(0), Fraction(1, 2)}
        assert inner(b0, b0) == 1
        assert inner(b0, gadget.complement(0)) == 0
        assert inner(b0, gadget.complement(1)) == Fraction(1, 2)
        assert inner(gadget.member(1), gadget.member(3)) == Fraction(1, 2)

    @pytest.mark.parametrize("ell", [0, 3, -2])
    def test_rejects_odd_or_small(self, ell):
        with pytest.raises(DomainError):
            civril_gadget(ell)

    def test_respects_size_limit(self):
        guard = ResourceGuard(LabConfig(limits=LimitSettings(max_gadget_ell=4)))
        with pytest.raises(ResourceLimitError, match="max_gadget_ell"):
            civril_gadget(6, guard)
