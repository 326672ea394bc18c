"""End-to-end decision of the trace value ordering relations.

The pipeline gates the query on structural validity, global soundness,
trace injectivity and the three structural restrictions; on conforming
proofs it builds the consequent automaton and the approximate antecedent
automaton at the derived bound, requires groundedness, and reduces the
ordering to quantitative containment.

``definition_oracle`` is the independent bounded check straight from the
definition of the ordering: enumerate positive maximal right-hand traces
up to a path length and search for a matching left-hand trace of at
least (or strictly greater) size whose endpoint condition holds."""

from __future__ import annotations

from dataclasses import dataclass

from .automata import (
    TracePairQuery,
    build_antecedent_approx,
    build_consequent,
    is_grounded,
)
from .containment import ContainmentVerdict, decide_containment, oracle_compare
from .proofgraph import Proof, validate
from .restrictions import Thresholds, check_all_restrictions, compute_thresholds
from .soundness import check_global_soundness
from .traces import (
    Path,
    Trace,
    classify_right_trace,
    enumerate_right_maximal,
    prog_points,
    traces_on_path,
)

__all__ = [
    "OrderVerdict",
    "OracleOutcome",
    "applicability_gates",
    "decide_order",
    "definition_oracle",
]

HOLDS = "HOLDS"
FAILS = "FAILS"
NOT_APPLICABLE = "NOT_APPLICABLE"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class OrderVerdict:
    relation: str  # "leq" | "lt"
    status: str
    reasons: tuple[dict, ...]
    thresholds: Thresholds | None = None
    containment: ContainmentVerdict | None = None

    def to_json(self) -> dict:
        return {
            "relation": self.relation,
            "status": self.status,
            "reasons": [dict(r) for r in self.reasons],
            "thresholds": None if self.thresholds is None else self.thresholds.to_json(),
            "containment": None
            if self.containment is None
            else self.containment.to_json(),
        }


@dataclass(frozen=True)
class OracleOutcome:
    max_path_len: int
    strict: bool
    counterexample: dict | None = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def applicability_gates(
    proof: Proof, query: TracePairQuery, jobs: int = 1
) -> list[dict] | None:
    """None when the query is in the regime the decision covers, else the
    failed gates as structured reasons."""
    query.check(proof)
    reasons: list[dict] = []
    report = validate(proof)
    structural = [v for v in report.violations if v.kind != "trace_injectivity"]
    if structural:
        reasons.append(
            {
                "stage": "validation",
                "ok": False,
                "violations": [
                    {"kind": v.kind, "location": v.location, "detail": v.detail}
                    for v in structural
                ],
            }
        )
        return reasons
    soundness = check_global_soundness(proof, jobs=jobs)
    if not soundness.sound:
        reasons.append(
            {
                "stage": "global_soundness",
                "ok": False,
                "witness": {
                    "prefix": list(soundness.witness.prefix),
                    "cycle": list(soundness.witness.cycle),
                },
                "note": "the ordering is defined over sound cyclic proofs only",
            }
        )
    if not report.trace_injective:
        reasons.append(
            {
                "stage": "trace_injectivity",
                "ok": False,
                "note": "non-injective trace pairs break the finite-ambiguity "
                "premise of the automata reduction",
            }
        )
    if reasons:
        return reasons
    for restriction in check_all_restrictions(proof, query):
        if not restriction.passed:
            reasons.append(
                {
                    "stage": f"restriction_{restriction.name}",
                    "ok": False,
                    "witnesses": list(restriction.witnesses),
                }
            )
    return reasons or None


def default_lag_cap(proof: Proof, thresholds: Thresholds) -> int:
    step = thresholds.max_step.to_int() if thresholds.max_step.is_finite() else 1
    return max(16, 4 * (thresholds.n_bound or 1) * step * len(proof.nodes))


def decide_order(
    proof: Proof,
    query: TracePairQuery,
    strict: bool = False,
    engine: str = "lagset",
    lag_cap: int | None = None,
    oracle_len: int = 12,
    jobs: int = 1,
) -> OrderVerdict:
    relation = "lt" if strict else "leq"
    gates = applicability_gates(proof, query, jobs=jobs)
    if gates is not None:
        return OrderVerdict(
            relation=relation, status=NOT_APPLICABLE, reasons=tuple(gates)
        )
    reasons: list[dict] = [{"stage": "gates", "ok": True}]
    thresholds = compute_thresholds(proof, query)
    if thresholds.n_bound is None:
        # Unreachable infinite weights keep the gates green but leave the
        # approximation bound undefined.
        reasons.append(
            {
                "stage": "thresholds",
                "ok": False,
                "note": "approximation bound undefined: max step is infinite",
            }
        )
        return OrderVerdict(
            relation=relation,
            status=NOT_APPLICABLE,
            reasons=tuple(reasons),
            thresholds=thresholds,
        )
    reasons.append({"stage": "thresholds", "ok": True, "n_bound": thresholds.n_bound})

    consequent = build_consequent(proof, query)
    antecedent = build_antecedent_approx(proof, query, thresholds.n_bound)
    if not is_grounded(consequent, proof):
        reasons.append(
            {
                "stage": "groundedness",
                "ok": False,
                "note": "a reachable accepting node/value state is not ground",
            }
        )
        return OrderVerdict(
            relation=relation,
            status=FAILS,
            reasons=tuple(reasons),
            thresholds=thresholds,
        )
    reasons.append({"stage": "groundedness", "ok": True})

    if engine == "lagset":
        cap = lag_cap if lag_cap is not None else default_lag_cap(proof, thresholds)
        verdict = decide_containment(consequent, antecedent, strict, lag_cap=cap)
    elif engine == "oracle":
        verdict = oracle_compare(consequent, antecedent, strict, oracle_len)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    status = {
        "VERIFIED": HOLDS,
        "REFUTED": FAILS,
        "UNKNOWN_SATURATED": UNKNOWN,
        "UNKNOWN_BOUND": UNKNOWN,
    }[verdict.status]
    reasons.append(
        {"stage": "containment", "ok": verdict.status == "VERIFIED", **verdict.to_json()}
    )
    return OrderVerdict(
        relation=relation,
        status=status,
        reasons=tuple(reasons),
        thresholds=thresholds,
        containment=verdict,
    )


def definition_oracle(
    proof: Proof,
    query: TracePairQuery,
    strict: bool = False,
    max_path_len: int = 10,
) -> OracleOutcome:
    """Bounded search straight from the ordering definition.

    For each positive maximal right-hand trace rooted at the query node,
    look for a left-hand trace over the same path (of any length up to the
    trace's) whose size dominates and whose ending either meets a grounded
    right trace, or equates with the right trace's final value at an
    axiomatic endpoint of matching length."""
    query.check(proof)
    candidates = sorted(
        enumerate_right_maximal(proof, query.node, query.con_value, max_path_len),
        key=lambda pt: (len(pt[0]), pt[0].nodes, pt[1].values),
    )
    for path, rtrace in candidates:
        r_size = prog_points(proof, path, rtrace)
        classification = classify_right_trace(proof, path, rtrace)
        final_node = proof.node(path.nodes[-1])
        final_value = rtrace.values[-1]
        n = len(rtrace)
        matched = False
        for values in traces_on_path(
            proof, path.nodes, "left", first_value=query.ant_value
        ):
            k = len(values)
            ltrace = Trace(side="left", values=values)
            l_size = prog_points(proof, Path(path.nodes[:k]), ltrace)
            if strict:
                if not (r_size < l_size):
                    continue
            elif not (r_size <= l_size):
                continue
            if classification.grounded:
                matched = True
                break
            if (
                classification.partially_maximal
                and k == n
                and (values[-1], final_value) in final_node.equates
            ):
                matched = True
                break
        if not matched:
            return OracleOutcome(
                max_path_len=max_path_len,
                strict=strict,
                counterexample={
                    "path": list(path.nodes),
                    "trace": list(rtrace.values),
                    "size": str(r_size),
                },
            )
    return OracleOutcome(max_path_len=max_path_len, strict=strict)
