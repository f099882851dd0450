"""Command-line front end for the definability toolkit.

Verbs are grouped by subject: ``dfa``, ``nfa``, and ``2nfa`` operate on the
JSON interchange format of machines, ``monoid`` inspects a machine's
algebra, ``omq`` parses, answers, and classifies ontology-mediated queries,
``fixtures`` emits the modular baseline machines, and ``oracle`` runs the
dual-route agreement batteries.

Exit codes: 0 for a decided result, 3 when a resource cap left the question
unknown, 2 for any input error (and argument errors, via argparse), 1 when a
crosscheck battery finds a disagreement. With ``--json`` every command prints
one JSON document with sorted keys on standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Optional, Sequence

from .algebra import (
    MONOID_CAP,
    definability_verdict,
    criterion_fo,
    criterion_fo_eq,
    criterion_fo_mod,
    is_aperiodic,
    is_quasi_aperiodic,
    is_solvable,
    make_bp_automaton,
    maximal_subgroups,
    syntactic_data,
)
from .automata import Dfa, Nfa, determinize, minimize
from .crosscheck import SUITES, run_crosscheck
from .dispatch import ROUTES, TARGETS, _jsonable, decide_rewritability
from .errors import CapExceeded, DefinabilityError, NotHorn
from .hornlinear import TYPESET_CAP
from .jsonio import format_automaton, parse_automaton
from .ltl.chase import certain_answer
from .ltl.syntax import AboxWord, OmqSpec, parse_abox, parse_omq_file
from .ltl.types import certain_answer_generic
from .twoway import TwoNfa, twonfa_accepts, twonfa_definability, twonfa_to_dfa

GAP_CAP = 64


# ---------------------------------------------------------------------------
# small plumbing


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _print_json(doc: object) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _emit(doc: dict, as_json: bool, lines: Optional[Sequence[str]] = None) -> None:
    if as_json or lines is None:
        _print_json(doc)
    else:
        for line in lines:
            print(line)


def _load_machine(path: str, want: type, label: str) -> Dfa | Nfa | TwoNfa:
    machine = parse_automaton(_read(path))
    if not isinstance(machine, want):
        raise DefinabilityError(
            f"expected a {label} document, found {type(machine).__name__.lower()}"
        )
    return machine


def _ladder_doc(dfa: Dfa, cap: int) -> tuple[dict, list[str]]:
    verdict = definability_verdict(dfa, cap=cap)
    doc = {
        "verdict": verdict.lowest_class.name,
        "witnesses": _jsonable(verdict.witnesses),
    }
    lines = [f"verdict: {verdict.lowest_class.name}"]
    for name, witness in sorted(verdict.witnesses.items(), key=lambda kv: kv[0]):
        lines.append(f"  {name}: {witness}")
    return doc, lines


_CRITERIA = {"fo": criterion_fo, "fo-eq": criterion_fo_eq, "fo-mod": criterion_fo_mod}


def _machine_verdict(dfa: Dfa, target: str, cap: int) -> tuple[dict, list[str]]:
    if target == "ladder":
        return _ladder_doc(dfa, cap)
    witness = _CRITERIA[target](dfa, cap=cap)
    if witness is None:
        return {"target": target, "verdict": "yes"}, [f"{target}: yes"]
    return (
        {"target": target, "verdict": "no", "witness": _jsonable(witness)},
        [f"{target}: no", f"  obstruction: {witness}"],
    )


# ---------------------------------------------------------------------------
# machine commands


def _cmd_dfa_min(args: argparse.Namespace) -> int:
    dfa = _load_machine(args.input, Dfa, "dfa")
    _print_json(format_automaton(minimize(dfa).minimal))
    return 0


def _cmd_dfa_definability(args: argparse.Namespace) -> int:
    dfa = _load_machine(args.input, Dfa, "dfa")
    doc, lines = _machine_verdict(minimize(dfa).minimal, args.target, args.cap_monoid)
    _emit(doc, args.json, lines)
    return 0


def _cmd_nfa_definability(args: argparse.Namespace) -> int:
    nfa = _load_machine(args.input, Nfa, "nfa")
    dfa = minimize(determinize(nfa)).minimal
    doc, lines = _machine_verdict(dfa, args.target, args.cap_monoid)
    _emit(doc, args.json, lines)
    return 0


def _cmd_2nfa_to_dfa(args: argparse.Namespace) -> int:
    machine = _load_machine(args.input, TwoNfa, "2nfa")
    dfa, _states = twonfa_to_dfa(machine)
    _print_json(format_automaton(dfa))
    return 0


def _cmd_2nfa_accepts(args: argparse.Namespace) -> int:
    machine = _load_machine(args.input, TwoNfa, "2nfa")
    word = tuple(args.letters)
    accepted = twonfa_accepts(machine, word)
    _emit(
        {"accepted": accepted, "word": list(word)},
        args.json,
        ["accepted" if accepted else "rejected"],
    )
    return 0


def _cmd_2nfa_definability(args: argparse.Namespace) -> int:
    machine = _load_machine(args.input, TwoNfa, "2nfa")
    verdict = twonfa_definability(machine)
    doc = {
        "verdict": verdict.lowest_class.name,
        "witnesses": _jsonable(verdict.witnesses),
    }
    _emit(doc, args.json, [f"verdict: {verdict.lowest_class.name}"])
    return 0


def _cmd_monoid_show(args: argparse.Namespace) -> int:
    dfa = _load_machine(args.input, Dfa, "dfa")
    data = syntactic_data(dfa, cap=args.cap_monoid)
    monoid = data.monoid
    subgroups = [
        {
            "order": len(group.members),
            "solvable": is_solvable(monoid, group),
            "identity": list(monoid.elements[group.identity_elem].witness),
        }
        for group in maximal_subgroups(monoid)
    ]
    doc = {
        "size": len(monoid),
        "aperiodic": is_aperiodic(monoid),
        "quasi_aperiodic": is_quasi_aperiodic(data),
        "elements": [
            {"witness": list(el.witness), "map": list(el.map)}
            for el in monoid.elements
        ],
        "maximal_subgroups": subgroups,
    }
    lines = [
        f"elements: {len(monoid)}",
        f"aperiodic: {str(doc['aperiodic']).lower()}",
        f"quasi-aperiodic: {str(doc['quasi_aperiodic']).lower()}",
        "maximal subgroups: "
        + (
            ", ".join(
                f"order {g['order']} ({'solvable' if g['solvable'] else 'unsolvable'})"
                for g in subgroups
            )
            or "none beyond the trivial group"
        ),
    ]
    _emit(doc, args.json, lines)
    return 0


# ---------------------------------------------------------------------------
# query commands


def _cmd_omq_classify(args: argparse.Namespace) -> int:
    spec = parse_omq_file(_read(args.omq))
    onto = spec.ontology
    doc = {
        "clause_class": onto.clause_class,
        "operator_profile": onto.operator_profile,
        "query_kind": spec.kind,
        "mode": spec.mode,
        "signature": list(spec.signature),
        "derived_atoms": sorted(onto.idb_atoms),
        "linear": onto.is_linear,
        "falsum_free": onto.is_bot_free,
        "axioms": [str(ax) for ax in onto.axioms],
        "query": str(spec.query),
    }
    lines = [
        f"clause class: {doc['clause_class']}",
        f"operators: {doc['operator_profile']}",
        f"query kind: {doc['query_kind']} ({spec.mode})",
        f"signature: {' '.join(spec.signature)}",
        f"linear: {str(onto.is_linear).lower()}",
        f"falsum-free: {str(onto.is_bot_free).lower()}",
    ]
    _emit(doc, args.json, lines)
    return 0


def _answers_doc(spec: OmqSpec, abox: AboxWord) -> tuple[dict, list[str]]:
    try:
        answer = certain_answer(spec, abox)
    except NotHorn:
        # disjunctive heads sit outside the chase; type runs referee instead
        answer = certain_answer_generic(spec, abox)
    if isinstance(answer, bool):
        return (
            {"mode": "boolean", "answer": answer},
            [f"certain answer: {'yes' if answer else 'no'}"],
        )
    timestamps = sorted(answer)
    doc = {
        "mode": "specific",
        "answers": timestamps,
        "window": [abox.origin, abox.origin + max(0, len(abox) - 1)],
    }
    lines = [
        "certain answers: " + (" ".join(str(t) for t in timestamps) or "none")
    ]
    if abox.marked_pos is not None:
        marked = abox.origin + abox.marked_pos
        doc["marked_position"] = marked
        doc["marked_answer"] = marked in answer
        lines.append(
            f"marked position {marked} is"
            + (" a certain answer" if marked in answer else " not a certain answer")
        )
    return doc, lines


def _cmd_omq_answer(args: argparse.Namespace) -> int:
    spec = parse_omq_file(_read(args.omq))
    abox = parse_abox(_read(args.abox), spec.signature)
    span = max(0, len(abox) - 1)
    if span > args.cap_gap:
        _emit(
            {
                "verdict": "unknown",
                "caps": {"exhausted": args.cap_gap},
                "notes": [
                    f"the data word spans {span} steps; the gap cap is {args.cap_gap}"
                ],
            },
            args.json,
            [f"unknown: data word spans {span} steps, over the gap cap {args.cap_gap}"],
        )
        return 3
    doc, lines = _answers_doc(spec, abox)
    _emit(doc, args.json, lines)
    return 0


def _cmd_omq_decide(args: argparse.Namespace) -> int:
    spec = parse_omq_file(_read(args.omq))
    report = decide_rewritability(
        spec,
        target=args.target,
        route=args.route,
        cap_types=args.cap_types,
        cap_monoid=args.cap_monoid,
    )
    doc = report.to_jsonable()
    lines = [f"target: {report.target}", f"verdict: {report.verdict}", f"route: {report.route}"]
    if report.formula:
        lines.append(f"rewriting: {report.formula}")
    for note in report.notes:
        lines.append(f"note: {note}")
    _emit(doc, args.json, lines)
    return 3 if report.verdict == "unknown" else 0


# ---------------------------------------------------------------------------
# fixtures and the crosscheck oracle


def _cmd_fixtures_bp(args: argparse.Namespace) -> int:
    _print_json(format_automaton(make_bp_automaton(args.p, args.kind)))
    return 0


def _cmd_oracle_crosscheck(args: argparse.Namespace) -> int:
    outcome = run_crosscheck(args.suite)
    lines = []
    for check in outcome["checks"]:
        status = "ok" if not check["mismatches"] else "MISMATCH"
        lines.append(
            f"{check['name']}: {status} "
            f"({check['instances']} instances, {check['skipped']} skipped)"
        )
        lines.extend(f"  {m}" for m in check["mismatches"])
    lines.append("all routes agree" if outcome["ok"] else "routes disagree")
    _emit(outcome, args.json, lines)
    return 0 if outcome["ok"] else 1


# ---------------------------------------------------------------------------
# the parser


def _add_json_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--json",
        action="store_true",
        help="print one JSON document with sorted keys instead of plain lines",
    )


def _add_monoid_cap(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--cap-monoid",
        type=int,
        default=MONOID_CAP,
        metavar="N",
        help=f"monoid-size cap before answering unknown (default {MONOID_CAP})",
    )


def _add_target(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--target",
        choices=TARGETS,
        default="ladder",
        help="rewriting class to decide, or the whole ladder (default)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="definability",
        description="Decide how much counting a regular language or an "
        "ontology-mediated query needs: none, modulo a fixed divisor, "
        "modulo anything, or genuinely more.",
    )
    subjects = parser.add_subparsers(dest="subject", required=True)

    dfa = subjects.add_parser("dfa", help="operate on deterministic machines")
    dfa_sub = dfa.add_subparsers(dest="verb", required=True)
    p = dfa_sub.add_parser("min", help="minimize a machine (JSON out)")
    p.add_argument("input", help="machine JSON file, or - for stdin")
    p.set_defaults(handler=_cmd_dfa_min)
    p = dfa_sub.add_parser("definability", help="place the language on the ladder")
    p.add_argument("input", help="machine JSON file, or - for stdin")
    _add_target(p)
    _add_monoid_cap(p)
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_dfa_definability)

    nfa = subjects.add_parser("nfa", help="operate on nondeterministic machines")
    nfa_sub = nfa.add_subparsers(dest="verb", required=True)
    p = nfa_sub.add_parser("definability", help="place the language on the ladder")
    p.add_argument("input", help="machine JSON file, or - for stdin")
    _add_target(p)
    _add_monoid_cap(p)
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_nfa_definability)

    two = subjects.add_parser("2nfa", help="operate on two-way machines")
    two_sub = two.add_subparsers(dest="verb", required=True)
    p = two_sub.add_parser("to-dfa", help="convert to a one-way machine (JSON out)")
    p.add_argument("input", help="machine JSON file, or - for stdin")
    p.set_defaults(handler=_cmd_2nfa_to_dfa)
    p = two_sub.add_parser("accepts", help="run the machine on a word")
    p.add_argument("input", help="machine JSON file, or - for stdin")
    p.add_argument("letters", nargs="*", help="the word, one letter per argument")
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_2nfa_accepts)
    p = two_sub.add_parser("definability", help="place the language on the ladder")
    p.add_argument("input", help="machine JSON file, or - for stdin")
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_2nfa_definability)

    monoid = subjects.add_parser("monoid", help="inspect a machine's algebra")
    monoid_sub = monoid.add_subparsers(dest="verb", required=True)
    p = monoid_sub.add_parser("show", help="transition monoid of the minimal machine")
    p.add_argument("input", help="machine JSON file, or - for stdin")
    _add_monoid_cap(p)
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_monoid_show)

    omq = subjects.add_parser("omq", help="parse, answer, and decide queries")
    omq_sub = omq.add_subparsers(dest="verb", required=True)
    p = omq_sub.add_parser("classify", help="clause class, operators, query kind")
    p.add_argument("omq", help="query file, or - for stdin")
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_omq_classify)
    p = omq_sub.add_parser("answer", help="certain answers over a data file")
    p.add_argument("omq", help="query file")
    p.add_argument("abox", help="data file, or - for stdin")
    p.add_argument(
        "--cap-gap",
        type=int,
        default=GAP_CAP,
        metavar="N",
        help=f"longest data-word span to materialize (default {GAP_CAP})",
    )
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_omq_answer)
    p = omq_sub.add_parser("decide", help="decide rewritability into a target class")
    p.add_argument("omq", help="query file, or - for stdin")
    _add_target(p)
    p.add_argument(
        "--route",
        choices=("auto",) + ROUTES,
        default="auto",
        help="force a decision procedure instead of fragment dispatch",
    )
    p.add_argument(
        "--cap-types",
        type=int,
        default=TYPESET_CAP,
        metavar="N",
        help=f"type-set state cap before answering unknown (default {TYPESET_CAP})",
    )
    _add_monoid_cap(p)
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_omq_decide)

    fixtures = subjects.add_parser("fixtures", help="emit baseline machines")
    fixtures_sub = fixtures.add_subparsers(dest="verb", required=True)
    p = fixtures_sub.add_parser(
        "bp", help="cyclic-counter machine pinning one ladder rung (JSON out)"
    )
    p.add_argument(
        "--kind",
        choices=("lt", "eq", "mod"),
        required=True,
        help="which rung the machine separates",
    )
    p.add_argument("--p", type=int, default=7, help="prime modulus (default 7)")
    p.set_defaults(handler=_cmd_fixtures_bp)

    oracle = subjects.add_parser("oracle", help="independent agreement batteries")
    oracle_sub = oracle.add_subparsers(dest="verb", required=True)
    p = oracle_sub.add_parser("crosscheck", help="run every dual-route battery")
    p.add_argument("--suite", choices=SUITES, default="small")
    _add_json_flag(p)
    p.set_defaults(handler=_cmd_oracle_crosscheck)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except CapExceeded as err:
        _print_json(
            {"verdict": "unknown", "caps": {"exhausted": err.cap}, "notes": [str(err)]}
        )
        return 3
    except (DefinabilityError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
