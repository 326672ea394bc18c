from __future__ import annotations

import pytest

from cep.ordinal import OMEGA, ZERO, Ordinal, ord_add
from cep.proofgraph import validate
from cep.traces import (
    Path,
    Trace,
    classify_right_trace,
    enumerate_right_maximal,
    follows,
    prog_points,
    simple_binary_cycles,
    simple_cycles,
)
from conftest import (
    all_paths,
    fixture_doc,
    proof_from_doc,
    random_proof,
    traces_following,
)


def P(*nodes):
    return Path(tuple(nodes))


def T(side, *values):
    return Trace(side=side, values=tuple(values))


class TestFollows:
    def test_right_trace(self, loop2):
        assert follows(loop2, P("n0", "n1", "n2"), T("right", "c", "c", "c"))

    def test_short_left_trace(self, loop2):
        assert follows(loop2, P("n0", "n1"), T("left", "a"))

    def test_namespace_error(self, loop2):
        with pytest.raises(ValueError, match="not a right value"):
            follows(loop2, P("n0", "n1"), T("right", "c", "a"))

    def test_not_a_path(self, loop2):
        with pytest.raises(ValueError, match="not a path"):
            follows(loop2, P("n0", "n2"), T("right", "c"))

    def test_trace_longer_than_path(self, loop2):
        with pytest.raises(ValueError, match="cannot follow"):
            follows(loop2, P("n0"), T("right", "c", "c"))

    def test_missing_pair(self):
        doc = fixture_doc("loop2")
        doc["delta"] = [e for e in doc["delta"] if e["from"] != "n0"]
        proof = proof_from_doc(doc)
        assert not follows(proof, P("n0", "n1"), T("right", "c", "c"))


class TestProgPoints:
    def test_length_one_is_zero(self, loop2):
        assert prog_points(loop2, P("n0", "n1"), T("left", "a")) == ZERO

    def test_reverse_sum_absorbs(self):
        # Step weights [w, 1] in path order; the reverse sum 1 + w is w,
        # whereas a forward sum would give w+1.
        doc = fixture_doc("loop2")
        for entry in doc["delta"]:
            if entry["side"] != "right":
                continue
            if entry["from"] == "n0":
                entry["pairs"] = [["c", "c", "w"]]
            if entry["from"] == "n1" and entry["child_index"] == 1:
                entry["pairs"] = [["c", "c", "1"]]
        proof = proof_from_doc(doc)
        got = prog_points(proof, P("n0", "n1", "n2"), T("right", "c", "c", "c"))
        assert got == OMEGA

    def test_loop2_unrolled(self, loop2):
        got = prog_points(
            loop2,
            P("n0", "n1", "n0", "n1", "n2"),
            T("right", "c", "c", "c", "c", "c"),
        )
        assert got == Ordinal.from_int(2)

    def test_concat_decomposition(self):
        # Prog(t1 . t2) = Prog(t2) + Prog(t1) for every split point, on
        # random proofs.
        checked = 0
        for seed in range(12):
            proof = random_proof(3_000 + seed)
            for path_nodes in all_paths(proof, proof.root, 5):
                for side in ("left", "right"):
                    for values in traces_following(proof, path_nodes, side):
                        n = len(values)
                        if n < 2:
                            continue
                        whole = prog_points(
                            proof, P(*path_nodes[:n]), T(side, *values)
                        )
                        for i in range(n):
                            first = prog_points(
                                proof, P(*path_nodes[: i + 1]), T(side, *values[: i + 1])
                            )
                            second = prog_points(
                                proof, P(*path_nodes[i:n]), T(side, *values[i:])
                            )
                            assert whole == ord_add(second, first)
                            checked += 1
        assert checked > 100


class TestClassify:
    def test_grounded_axiom(self, loop2):
        cls = classify_right_trace(
            loop2, P("n0", "n1", "n2"), T("right", "c", "c", "c")
        )
        assert cls.maximal and cls.positive
        assert cls.partially_maximal and cls.grounded
        assert not cls.fully_maximal

    def test_not_maximal(self, loop2):
        cls = classify_right_trace(loop2, P("n0", "n1"), T("right", "c", "c"))
        assert not cls.maximal

    def test_excluded_is_negative(self):
        doc = fixture_doc("loop2")
        doc["nodes"][2]["excluded"] = ["c"]
        proof = proof_from_doc(doc)
        cls = classify_right_trace(
            proof, P("n0", "n1", "n2"), T("right", "c", "c", "c")
        )
        assert cls.maximal and not cls.positive

    def test_wrong_side(self, loop2):
        with pytest.raises(ValueError, match="right-hand"):
            classify_right_trace(loop2, P("n0"), T("left", "a"))


class TestEnumerateRightMaximal:
    def test_loop2_len3(self, loop2):
        got = enumerate_right_maximal(loop2, "n0", "c", 3)
        assert got == [(P("n0", "n1", "n2"), T("right", "c", "c", "c"))]

    def test_loop2_len5(self, loop2):
        got = enumerate_right_maximal(loop2, "n0", "c", 5)
        assert got == [
            (
                P("n0", "n1", "n0", "n1", "n2"),
                T("right", "c", "c", "c", "c", "c"),
            ),
            (P("n0", "n1", "n2"), T("right", "c", "c", "c")),
        ]

    def test_antecedent_query_errors(self, unsound1):
        with pytest.raises(ValueError, match="not a consequent value"):
            enumerate_right_maximal(unsound1, "n0", "a", 4)

    @pytest.mark.parametrize("seed", range(15))
    def test_results_are_positive_maximal(self, seed):
        proof = random_proof(4_000 + seed)
        root = proof.root
        for value in sorted(proof.node(root).con_values):
            for path, trace in enumerate_right_maximal(proof, root, value, 6):
                assert len(path) == len(trace)
                cls = classify_right_trace(proof, path, trace)
                assert cls.maximal and cls.positive


class TestSimpleCycles:
    def test_loop2_left(self, loop2):
        got = simple_cycles(loop2, "left")
        assert got == [
            (P("n0", "n1", "n0"), T("left", "a", "a", "a")),
            (P("n1", "n0", "n1"), T("left", "a", "a", "a")),
        ]

    def test_loop2_binary_diagonal(self, loop2):
        got = simple_binary_cycles(loop2)
        assert (
            P("n0", "n1", "n0"),
            T("left", "a", "a", "a"),
            T("left", "a", "a", "a"),
        ) in got
        assert all(t1 == t2 for _p, t1, t2 in got)

    def test_acyclic_graph(self):
        doc = fixture_doc("loop2")
        # Cut the back-edge, leaving a straight-line proof.
        doc["nodes"][1]["children"] = ["n2"]
        doc["delta"] = [
            e
            for e in doc["delta"]
            if not (e["from"] == "n1" and e["child_index"] == 0)
        ]
        for e in doc["delta"]:
            if e["from"] == "n1":
                e["child_index"] = 0
        proof = proof_from_doc(doc)
        assert simple_cycles(proof, "left") == []
        assert simple_cycles(proof, "right") == []
        assert simple_binary_cycles(proof) == []

    def test_self_loop(self, unsound1):
        got = simple_cycles(unsound1, "left")
        assert got == [(P("n0", "n0"), T("left", "a", "a"))]

    @pytest.mark.parametrize("seed", range(10))
    def test_no_internal_repeats(self, seed):
        proof = random_proof(5_000 + seed)
        for path, trace in simple_cycles(proof, "left"):
            pairs = list(zip(path.nodes, trace.values))
            assert pairs[0] == pairs[-1]
            assert len(set(pairs[:-1])) == len(pairs) - 1
            assert follows(proof, path, trace)


class TestTraceInjectivityConsequence:
    @pytest.mark.parametrize("seed", range(20))
    def test_equal_ends_imply_equal_traces(self, seed):
        # With a trace-injective delta, two traces of equal length on a
        # common path with the same first and last values coincide.
        proof = random_proof(6_000 + seed, injective=True)
        assert validate(proof).trace_injective
        for path_nodes in all_paths(proof, proof.root, 6):
            for side in ("left", "right"):
                full = [
                    v
                    for v in traces_following(proof, path_nodes, side)
                    if len(v) == len(path_nodes)
                ]
                seen = {}
                for values in full:
                    key = (values[0], values[-1])
                    assert seen.setdefault(key, values) == values
