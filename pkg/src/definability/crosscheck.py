"""Dual-route agreement batteries over seeded random instances.

Every specialized decision procedure in this package has an independent,
slower counterpart that answers the same question from first principles:
the walker and type-set automata can be compared against the generic
type-respecting language automaton, emitted rewritings against the chase,
cycle-pattern witness searches against the monoid tests, and the routing
layer against the generic route it would otherwise avoid. This module
generates deterministic random batteries, runs each question through two
routes, and reports every disagreement verbatim — the generic pipeline acts
as the universal referee.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

from .algebra import (
    criterion_fo,
    criterion_fo_eq,
    criterion_fo_mod,
    definability_verdict,
    is_aperiodic,
    is_quasi_aperiodic,
    syntactic_data,
    transition_monoid,
    Verdict,
)
from .automata import Dfa, dfa_language_equal, dfa_run, minimize, words_over
from .corefrag import core_ompeq_decide_fo, core_to_linear
from .dispatch import LIFTED_CONCEPT_CAP, decide_rewritability
from .errors import CapExceeded
from .fo import eval_fo_formula
from .hornlinear import (
    build_typeset_dfa,
    criterion_ompq_fo,
    criterion_ompq_fo_eq,
    omaq_language_dfa_linear,
)
from .krom import krom_decide_fo
from .ltl.chase import certain_answer
from .ltl.syntax import AboxWord, Axiom, Concept, OmqSpec, Ontology, atom, conj, disj, wrap
from .ltl.types import decode_letter, omq_language_dfa

SUITES = ("small", "full")

_EDB = ("A", "B")
_IDB = ("C", "D")


@dataclass(frozen=True)
class CheckOutcome:
    """Result of one battery: instance count, skips, and mismatch reports."""

    name: str
    instances: int
    skipped: int
    mismatches: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


@dataclass(frozen=True)
class _Scale:
    specs: int
    dfas: int
    word_len: int


_SCALES = {
    "small": _Scale(specs=6, dfas=40, word_len=3),
    "full": _Scale(specs=16, dfas=120, word_len=4),
}


# ---------------------------------------------------------------------------
# instance generators


def _mark_count(word: Sequence[str]) -> int:
    return sum(1 for sym in word if decode_letter(sym)[1])


def word_to_abox(signature: Sequence[str], word: Sequence[str]) -> AboxWord:
    """Decode a tuple of set letters into the data word it spells."""
    signature = tuple(signature)
    index = {a: i for i, a in enumerate(signature)}
    letters = []
    marked: Optional[int] = None
    for i, sym in enumerate(word):
        atoms, is_marked = decode_letter(sym)
        mask = 0
        for a in atoms:
            mask |= 1 << index[a]
        letters.append(mask)
        if is_marked:
            marked = i
    return AboxWord(signature, tuple(letters), marked, 0)


def _chain(rng: random.Random, base: Concept, max_depth: int) -> Concept:
    for _ in range(rng.randint(0, max_depth)):
        base = wrap(rng.choice(("next_f", "next_p")), base)
    return base


def _linear_horn_ontology(rng: random.Random, allow_bot: bool) -> Ontology:
    axioms = []
    for _ in range(rng.randint(1, 3)):
        body = []
        if rng.random() < 0.85:
            body.append(_chain(rng, atom(rng.choice(_EDB)), 2))
        if rng.random() < 0.5:
            body.append(_chain(rng, atom(rng.choice(_IDB)), 1))
        if not body:
            body.append(atom(rng.choice(_EDB)))
        if allow_bot and rng.random() < 0.15:
            axioms.append(Axiom(tuple(body), ()))
        else:
            axioms.append(Axiom(tuple(body), (_chain(rng, atom(rng.choice(_IDB)), 1),)))
    return Ontology(tuple(axioms))


def _gen_linear_omaq(rng: random.Random) -> OmqSpec:
    while True:
        onto = _linear_horn_ontology(rng, allow_bot=True)
        if not onto.is_linear:
            continue
        mode = "specific" if rng.random() < 0.3 else "boolean"
        return OmqSpec(onto, atom(rng.choice(_EDB + _IDB)), mode, _EDB)


def _positive_query(rng: random.Random, allow_or: bool) -> Concept:
    leaves = [
        _chain(rng, atom(rng.choice(_EDB + _IDB)), 1)
        for _ in range(rng.randint(1, 2))
    ]
    body = conj(leaves) if len(leaves) > 1 else leaves[0]
    if allow_or and rng.random() < 0.5:
        body = disj([body, _chain(rng, atom(rng.choice(_EDB + _IDB)), 1)])
    if rng.random() < 0.7:
        body = wrap(rng.choice(("dia_f", "dia_p")), body)
    return body


def _gen_horn_ompq(rng: random.Random) -> OmqSpec:
    while True:
        onto = _linear_horn_ontology(rng, allow_bot=True)
        query = _positive_query(rng, allow_or=False)
        spec = OmqSpec(onto, query, "boolean", _EDB)
        if spec.kind in ("OMAQ", "OMPQ"):
            return spec


def _gen_krom_omaq(rng: random.Random) -> OmqSpec:
    while True:
        axioms = []
        for _ in range(rng.randint(1, 3)):
            picks = [
                _chain(rng, atom(rng.choice(_EDB + _IDB)), 2)
                for _ in range(2 if rng.random() < 0.8 else 1)
            ]
            shape = rng.random()
            if shape < 0.6 and len(picks) == 2:
                axioms.append(Axiom((picks[0],), (picks[1],)))
            elif shape < 0.8:
                axioms.append(Axiom(tuple(picks), ()))
            else:
                axioms.append(Axiom((), tuple(picks)))
        onto = Ontology(tuple(axioms))
        if onto.clause_class not in ("core", "krom"):
            continue
        mode = "specific" if rng.random() < 0.3 else "boolean"
        return OmqSpec(onto, atom(rng.choice(_EDB + _IDB)), mode, _EDB)


def _gen_core_ontology(rng: random.Random) -> Ontology:
    axioms = []
    for _ in range(rng.randint(1, 3)):
        lhs = tuple(
            _chain(rng, atom(rng.choice(_EDB + _IDB)), 2)
            for _ in range(2 if rng.random() < 0.35 else 1)
        )
        if len(lhs) == 2 or rng.random() < 0.1:
            axioms.append(Axiom(lhs, ()))
        else:
            axioms.append(Axiom(lhs, (_chain(rng, atom(rng.choice(_IDB)), 1),)))
    return Ontology(tuple(axioms))


def _gen_core_ompeq(rng: random.Random) -> OmqSpec:
    while True:
        onto = _gen_core_ontology(rng)
        if onto.clause_class != "core" or not onto.is_bot_free:
            continue
        spec = OmqSpec(onto, _positive_query(rng, allow_or=True), "boolean", _EDB)
        if spec.kind in ("OMAQ", "OMPQ", "OMPEQ"):
            return spec


def _gen_core_ompq(rng: random.Random) -> OmqSpec:
    # the lift triples the atom count, so keep the seeds small
    while True:
        axioms = []
        for _ in range(rng.randint(1, 2)):
            lhs = tuple(
                _chain(rng, atom(rng.choice(_EDB + _IDB)), 1)
                for _ in range(2 if rng.random() < 0.3 else 1)
            )
            if len(lhs) == 2 or rng.random() < 0.1:
                axioms.append(Axiom(lhs, ()))
            else:
                axioms.append(Axiom(lhs, (_chain(rng, atom(rng.choice(_IDB)), 1),)))
        onto = Ontology(tuple(axioms))
        if onto.clause_class != "core":
            continue
        spec = OmqSpec(onto, _positive_query(rng, allow_or=False), "boolean", _EDB)
        if spec.kind in ("OMAQ", "OMPQ"):
            return spec


def _gen_dfa(rng: random.Random) -> Dfa:
    n = rng.randint(2, 5)
    alphabet = ("a", "b")
    delta = {a: tuple(rng.randrange(n) for _ in range(n)) for a in alphabet}
    finals = frozenset(q for q in range(n) if rng.random() < 0.4) or frozenset({n - 1})
    return Dfa(alphabet, n, 0, finals, delta)


# ---------------------------------------------------------------------------
# the batteries


def _battery(
    name: str,
    count: int,
    make: Callable[[random.Random], object],
    compare: Callable[[object], Optional[str]],
) -> CheckOutcome:
    rng = random.Random(hash(name) & 0xFFFFFFFF)
    mismatches: list[str] = []
    skipped = 0
    for _ in range(count):
        instance = make(rng)
        try:
            report = compare(instance)
        except CapExceeded:
            skipped += 1
            continue
        if report is not None:
            mismatches.append(report)
    return CheckOutcome(name, count, skipped, tuple(mismatches))


def _describe(spec: OmqSpec) -> str:
    axioms = "; ".join(str(ax) for ax in spec.ontology.axioms)
    return f"[{axioms}] |- {spec.query} ({spec.mode})"


def _check_linear_language(scale: _Scale) -> CheckOutcome:
    def compare(spec: OmqSpec) -> Optional[str]:
        walker = omaq_language_dfa_linear(spec)
        generic = omq_language_dfa(spec)
        if not dfa_language_equal(walker, generic):
            return f"walker and generic languages differ on {_describe(spec)}"
        return None

    return _battery("linear-omaq-language", scale.specs, _gen_linear_omaq, compare)


def _check_linear_chase(scale: _Scale) -> CheckOutcome:
    def compare(spec: OmqSpec) -> Optional[str]:
        dfa = omaq_language_dfa_linear(spec)
        for word in words_over(dfa.alphabet, scale.word_len):
            if spec.mode == "specific" and _mark_count(word) != 1:
                continue
            abox = word_to_abox(spec.signature, word)
            accepted = dfa_run(dfa, word)[1]
            answer = certain_answer(spec, abox)
            truth = (
                answer
                if isinstance(answer, bool)
                else (abox.origin + abox.marked_pos) in answer
            )
            if accepted != truth:
                return (
                    f"walker DFA says {accepted}, chase says {truth} "
                    f"on {word!r} for {_describe(spec)}"
                )
        return None

    return _battery("linear-omaq-chase", scale.specs, _gen_linear_omaq, compare)


def _check_typeset_language(scale: _Scale) -> CheckOutcome:
    def compare(spec: OmqSpec) -> Optional[str]:
        routed = build_typeset_dfa(spec).dfa
        generic = omq_language_dfa(spec)
        if not dfa_language_equal(routed, generic):
            return f"type-set and generic languages differ on {_describe(spec)}"
        return None

    return _battery("typeset-language", scale.specs, _gen_horn_ompq, compare)


def _check_typeset_criteria(scale: _Scale) -> CheckOutcome:
    def compare(spec: OmqSpec) -> Optional[str]:
        language = minimize(omq_language_dfa(spec)).minimal
        fo_route = criterion_ompq_fo(spec).rewritable
        fo_generic = criterion_fo(language) is None
        if fo_route != fo_generic:
            return (
                f"cycle criterion says fo={fo_route}, monoid says {fo_generic} "
                f"on {_describe(spec)}"
            )
        eq_route = criterion_ompq_fo_eq(spec).rewritable
        eq_generic = criterion_fo_eq(language) is None
        if eq_route != eq_generic:
            return (
                f"cycle criterion says fo-eq={eq_route}, monoid says {eq_generic} "
                f"on {_describe(spec)}"
            )
        return None

    return _battery("typeset-criteria", scale.specs, _gen_horn_ompq, compare)


def _check_krom(scale: _Scale) -> CheckOutcome:
    def compare(spec: OmqSpec) -> Optional[str]:
        result = krom_decide_fo(spec)
        generic = criterion_fo(minimize(omq_language_dfa(spec)).minimal) is None
        if result.rewritable != generic:
            return (
                f"unary-language route says fo={result.rewritable}, "
                f"monoid says {generic} on {_describe(spec)}"
            )
        if result.rewritable and result.formula is not None:
            # disjunctive heads put these outside the chase; the generic
            # language automaton referees the emitted formula instead
            dfa = omq_language_dfa(spec)
            for word in words_over(dfa.alphabet, scale.word_len):
                if spec.mode == "specific" and _mark_count(word) != 1:
                    continue
                abox = word_to_abox(spec.signature, word)
                truth = dfa_run(dfa, word)[1]
                value = eval_fo_formula(result.formula, abox)
                held = (
                    value
                    if isinstance(value, bool)
                    else (abox.origin + abox.marked_pos) in value
                )
                if held != truth:
                    return (
                        f"emitted rewriting evaluates to {held}, the language "
                        f"automaton says {truth} on {word!r} for {_describe(spec)}"
                    )
        return None

    return _battery("krom-omaq", scale.specs, _gen_krom_omaq, compare)


def _check_core_support(scale: _Scale) -> CheckOutcome:
    def compare(spec: OmqSpec) -> Optional[str]:
        routed = core_ompeq_decide_fo(spec).rewritable
        generic = criterion_fo(minimize(omq_language_dfa(spec)).minimal) is None
        if routed != generic:
            return (
                f"support route says fo={routed}, monoid says {generic} "
                f"on {_describe(spec)}"
            )
        return None

    return _battery("core-ompeq-support", scale.specs, _gen_core_ompeq, compare)


def _check_core_lift(scale: _Scale) -> CheckOutcome:
    def compare(spec: OmqSpec) -> Optional[str]:
        lifted = core_to_linear(spec)
        routed = build_typeset_dfa(lifted, cap_concepts=LIFTED_CONCEPT_CAP).dfa
        generic = omq_language_dfa(spec)
        if not dfa_language_equal(routed, generic):
            return f"lifted and original languages differ on {_describe(spec)}"
        return None

    return _battery("core-ompq-lift", scale.specs, _gen_core_ompq, compare)


def _check_monoid(scale: _Scale) -> CheckOutcome:
    def compare(dfa: Dfa) -> Optional[str]:
        minimal = minimize(dfa).minimal
        data = syntactic_data(minimal)
        fo_witness = criterion_fo(minimal) is None
        fo_monoid = is_aperiodic(data.monoid)
        if fo_witness != fo_monoid:
            return f"fo witness-search {fo_witness} vs aperiodicity {fo_monoid} on {dfa}"
        eq_witness = criterion_fo_eq(minimal) is None
        eq_monoid = is_quasi_aperiodic(data)
        if eq_witness != eq_monoid:
            return (
                f"fo-eq witness-search {eq_witness} vs quasi-aperiodicity "
                f"{eq_monoid} on {dfa}"
            )
        ladder = definability_verdict(minimal).lowest_class
        if (ladder == Verdict.FO_LT) != fo_monoid:
            return f"ladder {ladder} contradicts aperiodicity {fo_monoid} on {dfa}"
        if (ladder in (Verdict.FO_LT, Verdict.FO_LT_EQ)) != eq_monoid:
            return f"ladder {ladder} contradicts quasi-aperiodicity {eq_monoid} on {dfa}"
        mod_witness = criterion_fo_mod(minimal) is None
        if ladder != Verdict.FO_RPR_ONLY and not mod_witness:
            return f"ladder {ladder} contradicts a modulo-counting witness on {dfa}"
        return None

    return _battery("monoid-vs-witness", scale.dfas, _gen_dfa, compare)


def _check_dispatch(scale: _Scale) -> CheckOutcome:
    generators = (
        _gen_linear_omaq,
        _gen_horn_ompq,
        _gen_krom_omaq,
        _gen_core_ompeq,
        _gen_core_ompq,
    )

    def make(rng: random.Random) -> OmqSpec:
        return rng.choice(generators)(rng)

    def compare(spec: OmqSpec) -> Optional[str]:
        for target in ("fo", "fo-eq", "fo-mod"):
            routed = decide_rewritability(spec, target=target)
            generic = decide_rewritability(spec, target=target, route="generic-monoid")
            decided = {"yes", "no"}
            if routed.verdict in decided and generic.verdict in decided:
                if routed.verdict != generic.verdict:
                    return (
                        f"route {routed.route} says {routed.verdict}, generic says "
                        f"{generic.verdict} at target {target} on {_describe(spec)}"
                    )
        return None

    return _battery("dispatch-referee", scale.specs, make, compare)


_CHECKS = (
    _check_linear_language,
    _check_linear_chase,
    _check_typeset_language,
    _check_typeset_criteria,
    _check_krom,
    _check_core_support,
    _check_core_lift,
    _check_monoid,
    _check_dispatch,
)


def run_crosscheck(suite: str = "small") -> dict:
    """Run every dual-route battery at the given scale; JSON-ready summary."""
    if suite not in _SCALES:
        raise ValueError(f"suite must be one of {SUITES}, got {suite!r}")
    scale = _SCALES[suite]
    outcomes = [check(scale) for check in _CHECKS]
    return {
        "suite": suite,
        "ok": all(o.ok for o in outcomes),
        "checks": [
            {
                "name": o.name,
                "instances": o.instances,
                "skipped": o.skipped,
                "mismatches": list(o.mismatches),
            }
            for o in outcomes
        ],
    }
