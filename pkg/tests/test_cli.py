"""Tests for the command-line entry point."""

import json

import pytest

from main import EXIT_INVALID, EXIT_OK, EXIT_RESOURCE, main


def run(args, temp_dir, name="out.json"):
    out = temp_dir / name
    code = main(args + ["-o", str(out)])
    data = json.loads(out.read_text()) if out.exists() else None
    return code, data


@pytest.fixture
def fig1_file(temp_dir):
    path = temp_dir / "fig1.json"
    assert main(["gen", "--fixture", "fig1", "-o", str(path)]) == EXIT_OK
    return path


class TestSolve:
    """Tests for the solve command."""

    def test_brute_on_fig1(self, fig1_file, temp_dir):
        code, data = run(["solve", "--alg", "brute", "--k", "3", str(fig1_file)], temp_dir)
        assert code == EXIT_OK
        assert data["subset"] == [1, 2, 3]
        assert data["value"] == "2025"
        assert data["config"]["selector"] == "brute"
        assert data["config"]["k"] == 3

    def test_greedy(self, fig1_file, temp_dir):
        code, data = run(["solve", "--alg", "greedy", "--k", "2", str(fig1_file)], temp_dir)
        assert code == EXIT_OK
        assert len(data["subset"]) == 2

    def test_additive_needs_eps(self, fig1_file, temp_dir):
        code, _ = run(["solve", "--alg", "additive", "--k", "2", str(fig1_file)], temp_dir)
        assert code == EXIT_INVALID

    def test_missing_k(self, fig1_file, temp_dir):
        code, _ = run(["solve", "--alg", "brute", str(fig1_file)], temp_dir)
        assert code == EXIT_INVALID

    def test_resource_refusal(self, fig1_file, temp_dir):
        code, data = run(
            ["solve", "--alg", "brute", "--k", "2", "--max-subsets", "3", str(fig1_file)], temp_dir
        )
        assert code == EXIT_RESOURCE
        assert data is None

    def test_missing_file(self, temp_dir):
        code, _ = run(["solve", "--k", "2", str(temp_dir / "absent.json")], temp_dir)
        assert code == EXIT_INVALID

    def test_malformed_json(self, temp_dir):
        bad = temp_dir / "bad.json"
        bad.write_text("[1, 2")
        code, _ = run(["solve", "--k", "2", str(bad)], temp_dir)
        assert code == EXIT_INVALID

    @pytest.mark.parametrize(
        "payload",
        [
            {"type": "vectors", "vectors": [5, 6]},
            {"type": "gram", "entries": [1]},
            {"type": "gridtiling", "k": 3, "n": 2, "cells": 7},
        ],
    )
    def test_wrongly_shaped_instance(self, temp_dir, payload):
        """Should reject well-formed JSON with the wrong shape as invalid input."""
        bad = temp_dir / "shape.json"
        bad.write_text(json.dumps(payload))
        code, _ = run(["solve", "--alg", "brute", "--k", "1", str(bad)], temp_dir)
        assert code == EXIT_INVALID

    def test_bad_eps(self, fig1_file, temp_dir):
        code, _ = run(
            ["solve", "--alg", "additive", "--k", "2", "--eps", "1/0", str(fig1_file)], temp_dir
        )
        assert code == EXIT_INVALID

    def test_gridtiling_brute(self, temp_dir):
        table1 = temp_dir / "table1.json"
        main(["gen", "--fixture", "table1", "-o", str(table1)])
        code, data = run(["solve", "--alg", "brute", str(table1)], temp_dir)
        assert code == EXIT_OK
        assert data["consistency"] == 18


class TestReduce:
    """Tests for the reduce command."""

    def test_bcsp_to_gridtiling(self, temp_dir):
        """Should produce a tiling instance whose optimum is 2k^2."""
        source = temp_dir / "triangle.json"
        main(["gen", "--fixture", "triangle3col", "-o", str(source)])
        code, data = run(["reduce", "--from", "bcsp", "--to", "gridtiling", str(source)], temp_dir)
        assert code == EXIT_OK
        assert data["type"] == "gridtiling"
        assert data["meta"] == {"diagonal": "full"}

        code, solved = run(["solve", "--alg", "brute", str(temp_dir / "out.json")], temp_dir, "opt.json")
        assert code == EXIT_OK
        assert solved["consistency"] == 18

    def test_ortho_then_solve(self, temp_dir):
        source = temp_dir / "table1.json"
        main(["gen", "--fixture", "table1", "-o", str(source)])
        code, data = run(["reduce", "--from", "gridtiling", "--to", "orthovectors", str(source)], temp_dir)
        assert code == EXIT_OK
        assert data["k"] == 9
        assert len(data["vectors"]) == 18

        code, solved = run(["solve", "--alg", "ortho", str(temp_dir / "out.json")], temp_dir, "s.json")
        assert code == EXIT_OK
        assert solved["found"] is True
        assert len(solved["subset"]) == 9

    def test_ksum_to_arrowhead(self, temp_dir):
        source = temp_dir / "ksum.json"
        source.write_text(json.dumps({"type": "ksum", "values": [1, 2, 3], "target": 3, "k": 1}))
        code, data = run(["reduce", "--from", "ksum", "--to", "arrowhead", str(source)], temp_dir)
        assert code == EXIT_OK
        assert data["k"] == 2
        assert "theta" in data["meta"]

    def test_unsupported_pair(self, temp_dir):
        source = temp_dir / "ksum.json"
        source.write_text(json.dumps({"type": "ksum", "values": [1, 2, 3], "target": 3, "k": 1}))
        code, _ = run(["reduce", "--from", "ksum", "--to", "detmax", str(source)], temp_dir)
        assert code == EXIT_INVALID

    def test_wrong_source_type(self, fig1_file, temp_dir):
        code, _ = run(["reduce", "--from", "gridtiling", "--to", "detmax", str(fig1_file)], temp_dir)
        assert code == EXIT_INVALID


class TestVerifyAndGen:
    """Tests for the verify and gen commands."""

    def test_verify_single_suite(self, temp_dir):
        code, data = run(["verify", "--suite", "lemma6-gadget", "--trials", "3"], temp_dir)
        assert code == EXIT_OK
        assert data["passed"] is True
        assert data["reports"][0]["suite"] == "lemma6-gadget"

    def test_gen_is_byte_identical(self, temp_dir):
        args = ["gen", "ksum", "--n", "4", "--k", "2", "--seed", "1"]
        main(args + ["-o", str(temp_dir / "a.json")])
        main(args + ["-o", str(temp_dir / "b.json")])
        assert (temp_dir / "a.json").read_bytes() == (temp_dir / "b.json").read_bytes()

    def test_gen_without_kind(self, temp_dir):
        code, _ = run(["gen"], temp_dir)
        assert code == EXIT_INVALID

    def test_gen_to_stdout(self, capsys):
        assert main(["gen", "--fixture", "fig1"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["type"] == "vectors"

    def test_nonpositive_limit(self, temp_dir):
        code, _ = run(["gen", "vectors", "--max-bits", "0"], temp_dir)
        assert code == EXIT_INVALID
