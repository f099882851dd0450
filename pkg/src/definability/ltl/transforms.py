"""Ontology and query rewriting: normal forms, falsum removal, mode reduction."""

from __future__ import annotations

from typing import Iterable

from ..errors import NotHorn, PreconditionViolated
from .syntax import (
    BOT,
    Axiom,
    Concept,
    OmqSpec,
    Ontology,
    atom,
    conj,
    disj,
    wrap,
)


def _chain_of(concept: Concept) -> tuple[list[str], Concept]:
    ops = []
    cur = concept
    while cur.kind in ("next_f", "next_p", "box_f", "box_p"):
        ops.append(cur.kind)
        cur = cur.args[0]
    return ops, cur


def _cancel_next_pairs(ops: list[str]) -> list[str]:
    out: list[str] = []
    for op in ops:
        if out and {out[-1], op} == {"next_f", "next_p"}:
            out.pop()
        else:
            out.append(op)
    return out


def simplify_chain(concept: Concept) -> Concept:
    """Cancel adjacent inverse next-time operators in a prefix chain."""
    ops, base = _chain_of(concept)
    for op in reversed(_cancel_next_pairs(ops)):
        base = wrap(op, base)
    return base


class _FreshNames:
    def __init__(self, taken: Iterable[str], stem: str):
        self.taken = set(taken)
        self.stem = stem
        self.counter = 0

    def new(self) -> str:
        while True:
            self.counter += 1
            name = f"{self.stem}{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                return name


def normalize_horn(ontology: Ontology) -> Ontology:
    """Rewrite a Horn ontology so every head is a single plain atom (or falsum).

    Next-time heads shift onto the body; box heads unfold through a fresh
    propagating atom. Bodies keep their operator prefixes, with inverse
    next-time pairs cancelled.
    """
    if any(len(ax.rhs) > 1 for ax in ontology.axioms):
        raise NotHorn("normalization requires at most one head concept per axiom")
    fresh = _FreshNames(ontology.signature, "_N")
    out: list[Axiom] = []

    def emit(body: tuple[Concept, ...], head: Concept | None):
        body = tuple(simplify_chain(c) for c in body)
        if head is None:
            out.append(Axiom(body, ()))
            return
        head = simplify_chain(head)
        if head.kind == "top":
            return
        if head.kind == "bot":
            out.append(Axiom(body, ()))
            return
        if head.kind == "atom":
            out.append(Axiom(body, (head,)))
            return
        inner = head.args[0]
        if head.kind == "next_f":
            emit(tuple(wrap("next_p", c) for c in body), inner)
        elif head.kind == "next_p":
            emit(tuple(wrap("next_f", c) for c in body), inner)
        elif head.kind == "box_f":
            x = atom(fresh.new())
            emit(tuple(wrap("next_p", c) for c in body), x)
            emit((wrap("next_p", x),), x)
            emit((x,), inner)
        elif head.kind == "box_p":
            x = atom(fresh.new())
            emit(tuple(wrap("next_f", c) for c in body), x)
            emit((wrap("next_f", x),), x)
            emit((x,), inner)
        else:  # pragma: no cover - the parser forbids other head kinds
            raise PreconditionViolated(f"unexpected head kind {head.kind!r}")

    for ax in ontology.axioms:
        emit(ax.lhs, ax.rhs[0] if ax.rhs else None)
    return Ontology(tuple(dict.fromkeys(out)))


def remove_bot(spec: OmqSpec) -> OmqSpec:
    """Eliminate falsum axioms while preserving certain answers.

    Atomic queries are swapped for a fresh proxy atom implied by the old
    query atom and by a second fresh atom that floods the timeline whenever
    a falsum body fires; structured queries instead pick up a disjunct
    saying some falsum body fires somewhere. Only the query's own certain
    answers are preserved — and no original atom gains an axiom head, so
    rule systems chaining through one derived atom per body stay that way.
    """
    ontology = spec.ontology
    bot_axioms = [ax for ax in ontology.axioms if not ax.rhs]
    if not bot_axioms:
        return spec
    rest = tuple(ax for ax in ontology.axioms if ax.rhs)
    if spec.kind == "OMAQ":
        names = set(ontology.signature) | spec.query.atoms() | set(spec.signature)
        flood = atom(_FreshNames(names, "_Bot").new())
        proxy = atom(_FreshNames(names | {flood.name}, "_Yes").new())
        new_axioms = list(rest)
        for ax in bot_axioms:
            new_axioms.append(Axiom(ax.lhs, (flood,)))
        new_axioms.append(Axiom((flood,), (wrap("next_f", flood),)))
        new_axioms.append(Axiom((flood,), (wrap("next_p", flood),)))
        new_axioms.append(Axiom((flood,), (proxy,)))
        new_axioms.append(Axiom((spec.query,), (proxy,)))
        return OmqSpec(Ontology(tuple(new_axioms)), proxy, spec.mode, spec.signature)
    disjuncts = [spec.query]
    for ax in bot_axioms:
        disjuncts.append(wrap("dia_f", wrap("dia_p", conj(ax.lhs))))
    return OmqSpec(Ontology(rest), disj(disjuncts), spec.mode, spec.signature)


def specific_to_boolean(spec: OmqSpec) -> tuple[OmqSpec, str]:
    """Reduce a specific query to a Boolean one over a marked signature.

    Returns the Boolean query and the fresh marker atom; asserting the marker
    at a position makes the Boolean answer agree with the specific answer
    there.
    """
    if spec.mode != "specific":
        raise PreconditionViolated("specific_to_boolean expects a specific-mode query")
    names = set(spec.ontology.signature) | spec.query.atoms() | set(spec.signature)
    fresh = _FreshNames(names, "_Mark")
    marker = fresh.new()
    signature = tuple(spec.signature) + (marker,)
    if spec.kind == "OMAQ":
        hit = fresh.new()
        axioms = spec.ontology.axioms + (
            Axiom((spec.query, atom(marker)), (atom(hit),)),
        )
        boolean = OmqSpec(Ontology(axioms), atom(hit), "boolean", signature)
    else:
        boolean = OmqSpec(
            spec.ontology, conj([spec.query, atom(marker)]), "boolean", signature
        )
    return boolean, marker
