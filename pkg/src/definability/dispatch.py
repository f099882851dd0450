"""Routing layer that picks a decision procedure for each query class.

Specialized routes cover the tractable fragments: the crossing-relation
walker for linear single-head systems with atomic queries, the type-set
cycle criteria for linear single-head systems with positive queries, the
unary gap automata for binary-clause systems with atomic queries, and the
small-support scan for binary single-head systems with positive existential
queries.  Everything else runs through the generic type-automaton pipeline,
which doubles as the referee when two routes are compared.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from . import algebra
from .algebra import MONOID_CAP, Verdict, definability_verdict
from .automata import Dfa
from .corefrag import core_ompeq_decide_fo, core_to_linear
from .errors import CapExceeded, PreconditionViolated
from .fo import FoFormula
from .hornlinear import (
    SUBCONCEPT_CAP,
    TYPESET_CAP,
    build_typeset_dfa,
    criterion_ompq_fo,
    criterion_ompq_fo_eq,
    omaq_language_dfa_linear,
)
from .krom import krom_decide_fo
from .ltl.syntax import Axiom, Concept, OmqSpec
from .ltl.transforms import specific_to_boolean
from .ltl.types import omq_language_dfa

TARGETS = ("fo", "fo-eq", "fo-mod", "ladder")

ROUTE_GENERIC = "generic-monoid"
ROUTE_LINEAR = "linear-walker"
ROUTE_TYPESET = "typeset-cycle"
ROUTE_KROM = "krom-unary"
ROUTE_CORE = "core-support"
ROUTE_CORE_LINEAR = "core-to-linear"
ROUTE_FAST = "clause-class-fast"

ROUTES = (
    ROUTE_GENERIC,
    ROUTE_LINEAR,
    ROUTE_TYPESET,
    ROUTE_KROM,
    ROUTE_CORE,
    ROUTE_CORE_LINEAR,
    ROUTE_FAST,
)

# The shadow-atom reduction triples the atom count, so the reduced system gets
# a proportionately larger closure allowance; the truth-assignment enumeration
# stays guarded by its own cap either way.
LIFTED_CONCEPT_CAP = 48

_CLASSWIDE_NOTE = (
    "every query of this clause class admits an order-plus-congruence rewriting,"
    " so coarser targets are answered from the class alone"
)
_OPEN_NOTE = (
    "no specialized modulo-counting criterion is available for this fragment;"
    " the verdict is the generic algebraic test on the language automaton"
)
_NO_WITNESS_NOTE = (
    "witness extraction exceeded its search caps; the verdict stands on the"
    " cycle criterion alone"
)


def _jsonable(value: object) -> object:
    """Recursively convert witnesses and reports to JSON-ready values."""
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, Enum):
        return value.name
    if isinstance(value, (Concept, Axiom, FoFormula)):
        return str(value)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        out: dict[str, object] = {"kind": type(value).__name__}
        for f in dataclasses.fields(value):
            out[f.name] = _jsonable(getattr(value, f.name))
        return out
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (frozenset, set)):
        return sorted((_jsonable(v) for v in value), key=repr)
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    return repr(value)


@dataclass(frozen=True)
class DecisionReport:
    """Outcome of one rewritability decision.

    For the decision targets (``fo``, ``fo-eq``, ``fo-mod``) the verdict is
    ``yes``, ``no``, or ``unknown`` when a resource cap was exhausted; the
    survey target ``ladder`` reports the lowest rung name instead of yes/no.
    """

    target: str
    verdict: str
    route: str
    witnesses: dict[str, object] = field(default_factory=dict)
    formula: Optional[str] = None
    caps: dict[str, object] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def to_jsonable(self) -> dict[str, object]:
        return {
            "target": self.target,
            "verdict": self.verdict,
            "route": self.route,
            "witnesses": _jsonable(self.witnesses),
            "formula": self.formula,
            "caps": _jsonable(self.caps),
            "notes": list(self.notes),
        }


def _normalize_target(target: str) -> str:
    name = target.strip().lower().replace("_", "-")
    if name == "foe":
        name = "fo-eq"
    if name not in TARGETS:
        raise PreconditionViolated(
            f"unknown target {target!r}; expected one of {', '.join(TARGETS)}"
        )
    return name


_CRITERIA: dict[str, Callable[..., object]] = {
    "fo": algebra.criterion_fo,
    "fo-eq": algebra.criterion_fo_eq,
    "fo-mod": algebra.criterion_fo_mod,
}


def _boolean_form(spec: OmqSpec) -> OmqSpec:
    """Boolean version of a single-head spec for the type-set route.

    Falsum axioms stay: the type-set automaton handles them natively, and
    eliminating them into query disjuncts would inflate the concept closure.
    """
    work = spec
    if work.mode == "specific":
        work, _marker = specific_to_boolean(work)
    return work


def _dfa_report(
    target: str,
    route: str,
    dfa: Dfa,
    cap_monoid: int,
    notes: tuple[str, ...] = (),
) -> DecisionReport:
    if target == "ladder":
        ranking = definability_verdict(dfa, cap=cap_monoid)
        return DecisionReport(
            "ladder",
            ranking.lowest_class.name,
            route,
            witnesses=dict(ranking.witnesses),
            notes=notes,
        )
    found = _CRITERIA[target](dfa, cap=cap_monoid)
    if found is None:
        return DecisionReport(target, "yes", route, notes=notes)
    return DecisionReport(
        target, "no", route, witnesses={"obstruction": found}, notes=notes
    )


def _bounded_ladder(fo_report: DecisionReport) -> DecisionReport:
    """Lift an order-only decision to a ladder verdict for class-wide fragments."""
    rung = Verdict.FO_LT if fo_report.verdict == "yes" else Verdict.FO_LT_EQ
    return DecisionReport(
        "ladder",
        rung.name,
        fo_report.route,
        witnesses=fo_report.witnesses,
        formula=fo_report.formula,
        notes=fo_report.notes + (_CLASSWIDE_NOTE,),
    )


def _run_krom(spec: OmqSpec, target: str) -> DecisionReport:
    if target in ("fo-eq", "fo-mod"):
        raise PreconditionViolated(
            "the unary-gap route decides the order-only target; coarser targets"
            " are already answered by the clause class"
        )
    outcome = krom_decide_fo(spec)
    if outcome.rewritable:
        report = DecisionReport(
            "fo",
            "yes",
            ROUTE_KROM,
            formula=None if outcome.formula is None else str(outcome.formula),
        )
    else:
        report = DecisionReport(
            "fo", "no", ROUTE_KROM, witnesses={"blockers": list(outcome.blockers)}
        )
    return _bounded_ladder(report) if target == "ladder" else report


def _run_core_support(spec: OmqSpec, target: str) -> DecisionReport:
    if target in ("fo-eq", "fo-mod"):
        raise PreconditionViolated(
            "the small-support route decides the order-only target; coarser"
            " targets are already answered by the clause class"
        )
    outcome = core_ompeq_decide_fo(spec)
    witnesses: dict[str, object] = {"checked": outcome.checked}
    if outcome.rewritable:
        report = DecisionReport("fo", "yes", ROUTE_CORE, witnesses=witnesses)
    else:
        witnesses["blockers"] = outcome.blockers
        witnesses["obstructions"] = outcome.witnesses
        report = DecisionReport("fo", "no", ROUTE_CORE, witnesses=witnesses)
    return _bounded_ladder(report) if target == "ladder" else report


def _run_typeset(
    spec: OmqSpec,
    target: str,
    cap_types: int,
    cap_monoid: int,
    route: str = ROUTE_TYPESET,
    notes: tuple[str, ...] = (),
    cap_concepts: int = SUBCONCEPT_CAP,
) -> DecisionReport:
    work = _boolean_form(spec)
    if target in ("fo", "fo-eq"):
        decide = criterion_ompq_fo if target == "fo" else criterion_ompq_fo_eq
        outcome = decide(work, cap_types=cap_types, cap_concepts=cap_concepts)
        if outcome.rewritable:
            return DecisionReport(target, "yes", route, notes=notes)
        if outcome.witness is None:
            return DecisionReport(
                target, "no", route, notes=notes + (_NO_WITNESS_NOTE,)
            )
        return DecisionReport(
            target, "no", route, witnesses={"witness": outcome.witness}, notes=notes
        )
    machine = build_typeset_dfa(work, cap_types=cap_types, cap_concepts=cap_concepts)
    if target == "fo-mod":
        notes = notes + (_OPEN_NOTE,)
    return _dfa_report(target, route, machine.dfa, cap_monoid, notes=notes)


def _run_core_to_linear(
    spec: OmqSpec, target: str, cap_types: int, cap_monoid: int
) -> DecisionReport:
    lifted = core_to_linear(spec)
    note = "reduced the binary single-head system to a linear one first"
    if target == "ladder":
        fo_report = _run_typeset(
            lifted,
            "fo",
            cap_types,
            cap_monoid,
            route=ROUTE_CORE_LINEAR,
            notes=(note,),
            cap_concepts=LIFTED_CONCEPT_CAP,
        )
        return _bounded_ladder(fo_report)
    return _run_typeset(
        lifted,
        target,
        cap_types,
        cap_monoid,
        route=ROUTE_CORE_LINEAR,
        notes=(note,),
        cap_concepts=LIFTED_CONCEPT_CAP,
    )


def _pick_route(spec: OmqSpec, target: str) -> str:
    ontology = spec.ontology
    clause = ontology.clause_class
    kind = spec.kind
    positive = kind in ("OMAQ", "OMPQ", "OMPEQ")
    next_only = ontology.operator_profile == "Next"
    horn = clause in ("core", "horn")
    linear = horn and ontology.is_linear

    classwide = positive and next_only and (
        clause == "core" or (clause == "krom" and kind == "OMAQ")
    )
    if classwide and target in ("fo-eq", "fo-mod"):
        return ROUTE_FAST
    if next_only and kind == "OMAQ" and clause in ("core", "krom"):
        if target in ("fo", "ladder"):
            return ROUTE_KROM
    if next_only and clause == "core" and target in ("fo", "ladder"):
        if kind == "OMPEQ":
            return ROUTE_CORE
        if kind == "OMPQ":
            return ROUTE_CORE_LINEAR
    if next_only and linear and kind == "OMAQ":
        return ROUTE_LINEAR
    if next_only and linear and kind == "OMPQ":
        if target == "fo-mod":
            return ROUTE_GENERIC
        return ROUTE_TYPESET
    return ROUTE_GENERIC


def decide_rewritability(
    spec: OmqSpec,
    target: str = "ladder",
    route: str = "auto",
    cap_types: int = TYPESET_CAP,
    cap_monoid: int = MONOID_CAP,
) -> DecisionReport:
    """Decide a rewritability target for a query, routing by its fragment.

    ``target`` is one of ``fo``, ``fo-eq``, ``fo-mod`` (three-valued yes/no/
    unknown verdicts) or ``ladder`` (lowest definability rung).  ``route``
    forces a specific procedure instead of the automatic fragment dispatch;
    resource exhaustion surfaces as an ``unknown`` verdict carrying the cap.
    """
    goal = _normalize_target(target)
    chosen = _pick_route(spec, goal) if route == "auto" else route
    if chosen not in ROUTES:
        raise PreconditionViolated(
            f"unknown route {route!r}; expected auto or one of {', '.join(ROUTES)}"
        )
    try:
        if chosen == ROUTE_FAST:
            return DecisionReport(goal, "yes", ROUTE_FAST, notes=(_CLASSWIDE_NOTE,))
        if chosen == ROUTE_KROM:
            return _run_krom(spec, goal)
        if chosen == ROUTE_CORE:
            return _run_core_support(spec, goal)
        if chosen == ROUTE_CORE_LINEAR:
            return _run_core_to_linear(spec, goal, cap_types, cap_monoid)
        if chosen == ROUTE_TYPESET:
            return _run_typeset(spec, goal, cap_types, cap_monoid)
        if chosen == ROUTE_LINEAR:
            language = omaq_language_dfa_linear(spec)
            return _dfa_report(goal, ROUTE_LINEAR, language, cap_monoid)
        notes: tuple[str, ...] = ()
        if goal == "fo-mod" and _pick_route(spec, "fo") == ROUTE_TYPESET:
            notes = (_OPEN_NOTE,)
        language = omq_language_dfa(spec)
        return _dfa_report(goal, ROUTE_GENERIC, language, cap_monoid, notes=notes)
    except CapExceeded as err:
        return DecisionReport(
            goal,
            "unknown",
            chosen,
            caps={"exhausted": err.cap},
            notes=(str(err),),
        )
