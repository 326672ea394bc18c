from __future__ import annotations

import json
import random
from pathlib import Path as FilePath

import pytest

from cep.proofgraph import Proof, load_proof, parse_proof

FIXTURES = FilePath(__file__).parent / "fixtures"


def fixture_path(name: str) -> FilePath:
    return FIXTURES / f"{name}.json"


def load_fixture(name: str) -> Proof:
    return load_proof(fixture_path(name))


def fixture_doc(name: str) -> dict:
    return json.loads(fixture_path(name).read_text())


def proof_from_doc(doc: dict) -> Proof:
    return parse_proof(json.dumps(doc))


@pytest.fixture(scope="session")
def loop2() -> Proof:
    return load_fixture("loop2")


@pytest.fixture(scope="session")
def strict2() -> Proof:
    return load_fixture("strict2")


@pytest.fixture(scope="session")
def unsound1() -> Proof:
    return load_fixture("unsound1")


@pytest.fixture(scope="session")
def ambig1() -> Proof:
    return load_fixture("ambig1")


ANT_NAMES = ("a0", "a1")
CON_NAMES = ("c0", "c1")


def random_proof_doc(
    rng: random.Random,
    max_nodes: int = 5,
    max_values: int = 2,
    weights: tuple[int, ...] = (0, 1, 2),
    injective: bool = False,
    pair_prob: float = 0.55,
) -> dict:
    """A random annotated pre-proof document.

    The root always carries the query values a0 and c0.  Children are
    drawn freely, so back-edges and shared subtrees occur; at least one
    node is axiomatic so maximal right traces can terminate.
    """
    n = rng.randint(2, max_nodes)
    ids = [f"n{i}" for i in range(n)]
    children: dict[str, list[str]] = {}
    for i, node_id in enumerate(ids):
        if i == n - 1:
            children[node_id] = []
        else:
            k = rng.choice((0, 1, 1, 2))
            children[node_id] = [rng.choice(ids) for _ in range(k)]

    ant_of: dict[str, list[str]] = {}
    con_of: dict[str, list[str]] = {}
    for node_id in ids:
        ants = [v for v in ANT_NAMES[:max_values] if rng.random() < 0.8]
        cons = [v for v in CON_NAMES[:max_values] if rng.random() < 0.8]
        if node_id == ids[0]:
            ants = sorted(set(ants) | {"a0"})
            cons = sorted(set(cons) | {"c0"})
        ant_of[node_id] = ants
        con_of[node_id] = cons

    delta = []
    for node_id in ids:
        for idx, child in enumerate(children[node_id]):
            for side, values in (("left", ant_of), ("right", con_of)):
                srcs = values[node_id]
                dsts = values[child]
                pairs = []
                if injective:
                    for dst in dsts:
                        if srcs and rng.random() < pair_prob:
                            pairs.append(
                                [rng.choice(srcs), dst, rng.choice(weights)]
                            )
                else:
                    for src in srcs:
                        for dst in dsts:
                            if rng.random() < pair_prob:
                                pairs.append([src, dst, rng.choice(weights)])
                if pairs:
                    delta.append(
                        {
                            "from": node_id,
                            "child_index": idx,
                            "side": side,
                            "pairs": pairs,
                        }
                    )

    nodes = []
    for node_id in ids:
        axiomatic = not children[node_id]
        cons = con_of[node_id]
        ground = [v for v in cons if rng.random() < (0.6 if axiomatic else 0.2)]
        excluded = [v for v in cons if rng.random() < 0.1]
        equates = []
        if axiomatic:
            for a in ant_of[node_id]:
                for c in cons:
                    if rng.random() < 0.5:
                        equates.append([a, c])
        nodes.append(
            {
                "id": node_id,
                "rule": f"r{rng.randint(0, 3)}",
                "axiom": axiomatic,
                "sequent": {"ant": f"A{node_id}", "con": f"C{node_id}"},
                "ant_values": ant_of[node_id],
                "con_values": cons,
                "children": children[node_id],
                "ground": ground,
                "excluded": excluded,
                "equates": equates,
            }
        )
    return {"root": ids[0], "nodes": nodes, "delta": delta}


def random_proof(seed: int, **kwargs) -> Proof:
    return proof_from_doc(random_proof_doc(random.Random(seed), **kwargs))


def random_corpus(count: int, base_seed: int, **kwargs) -> list[Proof]:
    return [random_proof(base_seed + i, **kwargs) for i in range(count)]


def gated_corpus(count: int, base_seed: int, progress_bias: bool = True):
    """Random trace-injective instances passing every applicability gate
    (validation, global soundness, all three structural restrictions) for
    the root query (a0, c0).  Returns (proof, query) pairs."""
    from cep.automata import TracePairQuery
    from cep.decision import applicability_gates
    from cep.proofgraph import validate

    out = []
    seed = base_seed
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 400 * count:
            raise RuntimeError("gated corpus generation did not converge")
        rng = random.Random(seed)
        seed += 1
        doc = random_proof_doc(
            rng,
            max_nodes=4,
            max_values=2,
            weights=(1, 1, 2, 0) if progress_bias else (0, 1, 2),
            injective=True,
        )
        proof = proof_from_doc(doc)
        if not validate(proof).ok:
            continue
        query = TracePairQuery(node=proof.root, ant_value="a0", con_value="c0")
        if applicability_gates(proof, query) is None:
            out.append((proof, query))
    return out


@pytest.fixture(scope="session")
def gated_instances():
    return gated_corpus(200, base_seed=7_000)


def all_paths(proof: Proof, root: str, max_len: int) -> list[tuple[str, ...]]:
    """Every path rooted at ``root`` with at most ``max_len`` nodes."""
    out: list[tuple[str, ...]] = []
    stack = [(root,)]
    while stack:
        nodes = stack.pop()
        out.append(nodes)
        if len(nodes) < max_len:
            for child in proof.node(nodes[-1]).children:
                stack.append(nodes + (child,))
    return sorted(out)


def traces_following(
    proof: Proof,
    path_nodes: tuple[str, ...],
    side: str,
    first_value: str | None = None,
) -> list[tuple[str, ...]]:
    """Every trace (of every length k <= len(path)) following the path,
    optionally restricted to a fixed first value."""
    node0 = proof.node(path_nodes[0])
    firsts = (
        [first_value]
        if first_value is not None
        else sorted(node0.values(side))
    )
    out: list[tuple[str, ...]] = []
    for first in firsts:
        if first not in node0.values(side):
            continue
        stack = [(first,)]
        while stack:
            values = stack.pop()
            out.append(values)
            i = len(values)
            if i < len(path_nodes):
                pairs = proof.pairs(path_nodes[i - 1], path_nodes[i], side)
                for (src, dst) in pairs:
                    if src == values[-1]:
                        stack.append(values + (dst,))
    return sorted(out)
