"""Unit tests for instance generators, fixtures and the JSON codecs."""

import json
from fractions import Fraction

import pytest

from detlab.errors import DomainError
from detlab.generators import FIXTURES, GEN_KINDS, fixture, generate
from detlab.gridtiling import (
    BcspInstance,
    GridTilingInstance,
    assignment_from_list,
    bcsp_eval,
    consistency,
)
from detlab.instances import (
    dumps,
    instance_from_dict,
    load_instance,
    read_json,
    write_json,
)
from detlab.linalg import GramMatrix, RatVectorSet
from detlab.reductions import KSumInstance


class TestGenerate:
    """Tests for the seeded generators."""

    @pytest.mark.parametrize("kind", GEN_KINDS)
    def test_deterministic_and_loadable(self, kind):
        """Should emit identical, re-loadable output for the same seed."""
        first = generate(kind, seed=3)
        assert dumps(first) == dumps(generate(kind, seed=3))
        instance_from_dict(first)

    def test_seed_changes_output(self):
        assert generate("vectors", seed=1) != generate("vectors", seed=2)

    def test_planted_gridtiling_witness(self):
        data = generate("gridtiling-planted", seed=7, k=3, n=4)
        inst = GridTilingInstance.from_dict(data)
        assert consistency(inst, assignment_from_list(data["witness"])) == 18

    def test_planted_bcsp_witness(self):
        data = generate("bcsp-planted", seed=2, k=4, n=3)
        inst = BcspInstance.from_dict(data)
        assert bcsp_eval(inst, data["witness"]) == 1

    def test_ksum_normalized(self):
        inst = instance_from_dict(generate("ksum", seed=1, n=4, k=2))
        assert isinstance(inst, KSumInstance)
        assert sum(inst.x) == 1
        assert inst.k == 2

    def test_planted_ksum_witness(self):
        data = generate("ksum", seed=4, n=5, k=2, planted=True)
        inst = KSumInstance.from_dict(data)
        assert sum(inst.x[i - 1] for i in data["witness"]) == inst.t

    def test_vectors_with_denominator(self):
        vs = RatVectorSet.from_dict(generate("vectors", seed=0, n=5, d=2, max_value=3, denominator=2))
        assert vs.n == 5 and vs.d == 2
        assert all(abs(x) <= Fraction(3, 2) for v in vs.vectors for x in v)

    def test_gram_is_constructed(self):
        data = generate("gram", seed=0)
        assert data["psd"] == "constructed"
        assert isinstance(instance_from_dict(data), GramMatrix)

    def test_unknown_kind(self):
        with pytest.raises(DomainError, match="Unknown generator kind"):
            generate("matroid")


class TestFixtures:
    def test_fig1_verbatim(self):
        assert fixture("fig1")["vectors"] == [
            ["5", "0", "0"], ["2", "3", "0"], ["1", "1", "3"], ["3", "1", "1"]
        ]

    def test_table1_witness(self, table1):
        data = fixture("table1")
        assert GridTilingInstance.from_dict(data) == table1
        assert consistency(table1, assignment_from_list(data["witness"])) == 18

    def test_triangle_witness(self):
        data = fixture("triangle3col")
        assert bcsp_eval(BcspInstance.from_dict(data), data["witness"]) == 1

    @pytest.mark.parametrize("name", FIXTURES)
    def test_all_fixtures_load(self, name):
        instance_from_dict(fixture(name))

    def test_unknown_fixture(self):
        with pytest.raises(DomainError):
            fixture("table2")


class TestInstanceFiles:
    """Tests for JSON reading and writing."""

    def test_round_trip(self, temp_dir, fig1):
        path = temp_dir / "fig1.json"
        write_json(fig1.to_dict(), path)
        assert load_instance(path) == fig1

    def test_output_is_sorted_with_newline(self):
        text = dumps({"value": "1", "subset": [1]})
        assert text.endswith("\n")
        assert text.index('"subset"') < text.index('"value"')

    def test_stdout(self, capsys):
        write_json({"a": 1})
        assert json.loads(capsys.readouterr().out) == {"a": 1}

    def test_malformed_json(self, temp_dir):
        path = temp_dir / "bad.json"
        path.write_text("{not json")
        with pytest.raises(DomainError, match="malformed JSON"):
            read_json(path)

    def test_unknown_type(self):
        with pytest.raises(DomainError, match="Unknown instance type"):
            instance_from_dict({"type": "tensor"})

    def test_not_an_object(self):
        with pytest.raises(DomainError):
            instance_from_dict([1, 2, 3])

    def test_missing_file(self, temp_dir):
        with pytest.raises(FileNotFoundError):
            read_json(temp_dir / "absent.json")
