"""Structural restriction checks and thresholds for a trace pair query.

Three conditions make the ordering decidable through a bounded automaton:
finite progression weights on every reachable edge pair, strictly positive
size for every reachable simple trace cycle, and equal size for the two
components of every reachable simple binary cycle of antecedent traces.

The cycle checks go through graph reductions rather than literal cycle
enumeration: a zero-size simple cycle exists iff the zero-weight subgraph
of (node, value) pairs has a cycle, and binary balance holds iff the
difference weights admit a consistent potential on every strongly
connected component of the paired value graph.  Literal enumeration stays
available in the traces module and backs the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ordinal import ZERO, Ordinal
from .proofgraph import LEFT, RIGHT, Proof
from .traces import reachable_pairs

__all__ = [
    "Thresholds",
    "RestrictionReport",
    "InfiniteWeightError",
    "compute_thresholds",
    "check_finitely_progressing",
    "check_dynamic",
    "check_balanced",
    "check_all_restrictions",
]


class InfiniteWeightError(ValueError):
    """Raised by the balance check when a relevant weight is not finite;
    run the finitely-progressing check first."""


@dataclass(frozen=True)
class Thresholds:
    trace_width: int
    in_degree: int
    cycle_threshold: int
    max_step: Ordinal
    n_bound: int | None

    def to_json(self) -> dict:
        return {
            "trace_width": self.trace_width,
            "in_degree": self.in_degree,
            "cycle_threshold": self.cycle_threshold,
            "max_step": str(self.max_step),
            "n_bound": self.n_bound,
        }


@dataclass(frozen=True)
class RestrictionReport:
    name: str
    passed: bool
    witnesses: tuple = ()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "witnesses": [w for w in self.witnesses],
        }


def compute_thresholds(proof: Proof, query) -> Thresholds:
    query.check(proof)
    width = max(
        max(len(node.ant_values), len(node.con_values))
        for node in proof.nodes.values()
    )
    in_degree = max(
        (len(proof.parents(node_id)) for node_id in proof.nodes), default=0
    )
    cycle_threshold = sum(
        len(node.ant_values) ** 2 for node in proof.nodes.values()
    )
    max_step = ZERO
    for (_parent, _idx, side), pairs in proof.delta.items():
        if side != LEFT:
            continue
        for weight in pairs.values():
            if max_step < weight:
                max_step = weight
    if max_step.is_finite():
        step = max_step.to_int()
        n_bound = 2 + cycle_threshold * step * width + width
    else:
        n_bound = None
    return Thresholds(
        trace_width=width,
        in_degree=in_degree,
        cycle_threshold=cycle_threshold,
        max_step=max_step,
        n_bound=n_bound,
    )


def _side_pairs(proof: Proof, query, side: str):
    start = (
        (query.node, query.ant_value)
        if side == LEFT
        else (query.node, query.con_value)
    )
    return reachable_pairs(proof, side, start)


def check_finitely_progressing(proof: Proof, query) -> RestrictionReport:
    """Every trace pair weight on an edge whose source (node, value) pair
    is reachable from the query must be a finite ordinal."""
    query.check(proof)
    offenders = []
    for side in (LEFT, RIGHT):
        reachable = _side_pairs(proof, query, side)
        for parent, child in proof.edges():
            for (src, dst), weight in sorted(proof.pairs(parent, child, side).items()):
                if (parent, src) in reachable and not weight.is_finite():
                    offenders.append(
                        {
                            "side": side,
                            "edge": [parent, child],
                            "pair": [src, dst],
                            "weight": str(weight),
                        }
                    )
    return RestrictionReport(
        name="finitely_progressing",
        passed=not offenders,
        witnesses=tuple(offenders),
    )


def _zero_subgraph_cycle(proof: Proof, side: str, restrict) -> list | None:
    """A cycle of zero-weight trace steps within the restricted pairs,
    as an alternating witness, or None."""
    succ: dict[tuple[str, str], list[tuple[str, str]]] = {}
    for parent, child in proof.edges():
        for (src, dst), weight in proof.pairs(parent, child, side).items():
            if not weight.is_zero():
                continue
            a, b = (parent, src), (child, dst)
            if a in restrict and b in restrict:
                succ.setdefault(a, []).append(b)
    for targets in succ.values():
        targets.sort()
    color: dict[tuple[str, str], int] = {}
    parent_of: dict[tuple[str, str], tuple[str, str]] = {}

    def dfs(start):
        stack = [(start, iter(succ.get(start, ())))]
        color[start] = 1
        while stack:
            state, it = stack[-1]
            advanced = False
            for nxt in it:
                if color.get(nxt, 0) == 1:
                    # Cycle found: unwind from state back to nxt.
                    chain = [state]
                    cursor = state
                    while cursor != nxt:
                        cursor = parent_of[cursor]
                        chain.append(cursor)
                    chain.reverse()
                    chain.append(nxt)
                    return chain
                if color.get(nxt, 0) == 0:
                    color[nxt] = 1
                    parent_of[nxt] = state
                    stack.append((nxt, iter(succ.get(nxt, ()))))
                    advanced = True
                    break
            if not advanced:
                color[state] = 2
                stack.pop()
        return None

    for start in sorted(succ):
        if color.get(start, 0) == 0:
            found = dfs(start)
            if found:
                return found
    return None


def check_dynamic(proof: Proof, query) -> RestrictionReport:
    """No reachable simple trace cycle may have size zero.  Since weights
    are non-negative, a simple cycle has size zero exactly when all of its
    steps do, i.e. when the zero-weight step subgraph has a cycle."""
    query.check(proof)
    witnesses = []
    for side in (LEFT, RIGHT):
        reachable = _side_pairs(proof, query, side)
        cycle = _zero_subgraph_cycle(proof, side, reachable)
        if cycle:
            witnesses.append(
                {
                    "side": side,
                    "path": [node for node, _v in cycle],
                    "trace": [v for _node, v in cycle],
                }
            )
    return RestrictionReport(
        name="dynamic", passed=not witnesses, witnesses=tuple(witnesses)
    )


def _binary_graph(proof: Proof, query):
    """Edges of the paired antecedent value graph with integer difference
    weights, over triples whose components are reachable from the query."""
    reachable = _side_pairs(proof, query, LEFT)
    triples = sorted(
        (node_id, v1, v2)
        for node_id, node in proof.nodes.items()
        for v1 in node.ant_values
        for v2 in node.ant_values
        if (node_id, v1) in reachable and (node_id, v2) in reachable
    )
    index = {t: i for i, t in enumerate(triples)}
    edges: dict[int, list[tuple[int, int]]] = {i: [] for i in index.values()}
    for parent, child in proof.edges():
        pairs = proof.pairs(parent, child, LEFT)
        for (s1, d1), w1 in pairs.items():
            for (s2, d2), w2 in pairs.items():
                a = index.get((parent, s1, s2))
                b = index.get((child, d1, d2))
                if a is None or b is None:
                    continue
                if not (w1.is_finite() and w2.is_finite()):
                    raise InfiniteWeightError(
                        "infinite weight on a reachable pair; run the "
                        "finitely-progressing check first"
                    )
                edges[a].append((b, w1.to_int() - w2.to_int()))
    for targets in edges.values():
        targets.sort()
    return triples, edges


def _sccs(n: int, edges: dict[int, list[tuple[int, int]]]) -> list[list[int]]:
    # Iterative Tarjan.
    index_of = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index_of[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index_of[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            targets = edges.get(v, ())
            while pi < len(targets):
                w = targets[pi][0]
                pi += 1
                if index_of[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index_of[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    component.append(w)
                    if w == v:
                        break
                out.append(sorted(component))
            if work:
                parent, _ = work[-1]
                low[parent] = min(low[parent], low[v])
    return out


def check_balanced(proof: Proof, query) -> RestrictionReport:
    """Every reachable simple binary cycle of antecedent traces must give
    equal size to its two components: within each strongly connected
    component of the paired value graph, difference weights must be a
    potential difference.  An inconsistency yields an unbalanced cycle,
    trimmed to a simple one."""
    query.check(proof)
    triples, edges = _binary_graph(proof, query)
    n = len(triples)
    comp_of = {}
    for comp_id, comp in enumerate(_sccs(n, edges)):
        for v in comp:
            comp_of[v] = comp_id

    witnesses = []
    seen_comp = set()
    for start in range(n):
        comp = comp_of[start]
        if comp in seen_comp:
            continue
        seen_comp.add(comp)
        members = [v for v in range(n) if comp_of[v] == comp]
        pot = {start: 0}
        tree: dict[int, tuple[int, int]] = {}
        queue = [start]
        while queue:
            v = queue.pop(0)
            for w, d in edges.get(v, ()):
                if comp_of[w] != comp:
                    continue
                if w not in pot:
                    pot[w] = pot[v] + d
                    tree[w] = (v, d)
                    queue.append(w)
        bad = None
        for v in members:
            for w, d in edges.get(v, ()):
                if comp_of[w] != comp:
                    continue
                if pot[v] + d != pot[w]:
                    bad = (v, w, d)
                    break
            if bad:
                break
        if bad is None:
            continue
        cycle = _unbalanced_cycle(edges, comp_of, comp, tree, start, *bad)
        trimmed = _trim_to_simple(cycle)
        path = [triples[i] for i, _d in trimmed]
        total = _cycle_total(trimmed)
        witnesses.append(
            {
                "path": [t[0] for t in path],
                "trace": [t[1] for t in path],
                "trace_other": [t[2] for t in path],
                "difference": total,
            }
        )
    return RestrictionReport(
        name="balanced", passed=not witnesses, witnesses=tuple(witnesses)
    )


def _tree_path(tree, root, target):
    """Root-to-target path along BFS tree edges as (vertex, weight-in)
    pairs; the first entry carries weight zero."""
    path = []
    cursor = target
    while cursor != root:
        parent, d = tree[cursor]
        path.append((cursor, d))
        cursor = parent
    path.append((root, 0))
    path.reverse()
    return path


def _bfs_path(edges, comp_of, comp, src, dst):
    """Some src-to-dst path inside one component, same representation."""
    prev: dict[int, tuple[int, int] | None] = {src: None}
    queue = [src]
    while queue:
        v = queue.pop(0)
        if v == dst:
            break
        for w, d in edges.get(v, ()):
            if comp_of[w] != comp or w in prev:
                continue
            prev[w] = (v, d)
            queue.append(w)
    path = []
    cursor = dst
    while prev[cursor] is not None:
        v, d = prev[cursor]
        path.append((cursor, d))
        cursor = v
    path.append((src, 0))
    path.reverse()
    return path


def _unbalanced_cycle(edges, comp_of, comp, tree, root, v, w, d):
    """A cycle with non-zero total difference, derived from the
    inconsistent edge (v, w).  With R a return path from w to the BFS
    root, the cycles (root->v, v->w, R) and (root->w, R) differ by the
    inconsistency, so at least one of them is unbalanced."""
    back = _bfs_path(edges, comp_of, comp, w, root)
    cycle = _tree_path(tree, root, v) + [(w, d)] + back[1:]
    if _cycle_total(cycle) != 0:
        return cycle
    return _tree_path(tree, root, w) + back[1:]


def _cycle_total(cycle):
    return sum(d for _v, d in cycle[1:])


def _trim_to_simple(cycle):
    """Remove interior repetitions while keeping the total non-zero.

    The cycle is a list of (vertex, incoming difference) pairs whose first
    and last vertices coincide.  Any repeated interior vertex splits it
    into two sub-cycles whose totals add up, so one of them is still
    unbalanced; recurse until simple.
    """
    while True:
        seen = {}
        split = None
        for i, (v, _d) in enumerate(cycle[:-1]):
            if v in seen:
                split = (seen[v], i)
                break
            seen[v] = i
        if split is None:
            return cycle
        i, j = split
        inner = [(cycle[i][0], 0)] + cycle[i + 1 : j + 1]
        outer = cycle[: i + 1] + cycle[j + 1 :]
        if _cycle_total(inner) != 0:
            cycle = inner
        else:
            cycle = outer


def check_all_restrictions(proof: Proof, query) -> list[RestrictionReport]:
    reports = [check_finitely_progressing(proof, query)]
    reports.append(check_dynamic(proof, query))
    if reports[0].passed:
        reports.append(check_balanced(proof, query))
    else:
        reports.append(
            RestrictionReport(
                name="balanced",
                passed=False,
                witnesses=(
                    {"error": "skipped: infinite weights present"},
                ),
            )
        )
    return reports
