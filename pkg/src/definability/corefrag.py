"""Deciders for binary Horn clauses ("core" axioms) with positive queries.

A core ontology relates concepts pairwise: one concept implies another, or
two concepts clash. Two constructions make such ontologies tractable. First,
clashes can be compiled away into "provably false" shadow atoms, yielding a
rule system whose every body chains through at most one derived atom — the
input for the chain-rule deciders. Second, a positive box-free query is
certain on a data word exactly when it is certain on a small sub-word whose
asserted-atom count is bounded by the query size, so the certain-yes
language is a finite union of upward closures of small-support languages,
and plain-order definability reduces to definability of each of those.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .algebra import FoWitness, criterion_fo
from .automata import Dfa, Nfa, determinize, minimize, product_intersect
from .errors import CapExceeded, NotCore, NotPowersetAlphabet, PreconditionViolated
from .ltl.syntax import Axiom, Concept, OmqSpec, Ontology, atom, wrap
from .ltl.transforms import remove_bot, specific_to_boolean
from .ltl.types import decode_letter, encode_letter, omq_language_dfa, powerset_alphabet

SUPPORT_WORD_CAP = 20000

BAR_STEM = "_Bar"


def _require_core(ontology: Ontology) -> None:
    if ontology.clause_class != "core":
        raise NotCore(
            f"route needs core axioms (binary, at most one head), got "
            f"{ontology.clause_class}"
        )


def _require_next_only(ontology: Ontology) -> None:
    if ontology.operator_profile != "Next":
        raise PreconditionViolated(
            "route supports next-time operators only in axioms"
        )


def _rename_concept(concept: Concept, mapping: dict[str, str]) -> Concept:
    if concept.kind == "atom":
        return atom(mapping.get(concept.name, concept.name))
    if not concept.args:
        return concept
    return Concept(
        concept.kind, concept.name, tuple(_rename_concept(a, mapping) for a in concept.args)
    )


def _rename_axiom(ax: Axiom, mapping: dict[str, str]) -> Axiom:
    return Axiom(
        tuple(_rename_concept(c, mapping) for c in ax.lhs),
        tuple(_rename_concept(c, mapping) for c in ax.rhs),
    )


def core_to_linear(spec: OmqSpec) -> OmqSpec:
    """Rewrite a core ontology into one whose rules chain through at most one
    derived atom, preserving certain answers over the data signature.

    Every clash axiom becomes an implication into a fresh shadow atom
    standing for "the clashing concept is provably false"; implications gain
    shadow contrapositives; all ontology and query atoms are renamed to
    derived copies fed from the data atoms, and a data atom clashing with its
    own shadow copy recovers the original inconsistencies.
    """
    _require_core(spec.ontology)
    _require_next_only(spec.ontology)
    if spec.kind == "OMQ":
        raise PreconditionViolated("route needs a positive query")
    taken = set(spec.ontology.signature) | spec.query.atoms() | set(spec.signature)
    suffix = "'"
    while any(name + suffix in taken for name in taken):
        suffix += "'"
    bar_stem = BAR_STEM
    while any(name.startswith(bar_stem) for name in taken):
        bar_stem += "X"

    def bar(concept: Concept) -> Concept:
        return _rename_concept(
            concept, {name: bar_stem + name for name in concept.atoms()}
        )

    staged: list[Axiom] = []
    for ax in spec.ontology.axioms:
        if len(ax.rhs) == 1:
            staged.append(ax)
            if len(ax.lhs) == 1:
                staged.append(Axiom((bar(ax.rhs[0]),), (bar(ax.lhs[0]),)))
            else:  # an unconditional head: its shadow can never hold
                staged.append(Axiom((bar(ax.rhs[0]),), ()))
        elif len(ax.lhs) == 2:
            staged.append(Axiom((ax.lhs[0],), (bar(ax.lhs[1]),)))
        elif len(ax.lhs) == 1:
            staged.append(Axiom((ax.lhs[0],), (bar(ax.lhs[0]),)))
        else:
            staged.append(ax)  # unconditional falsum: inconsistent outright

    names = {
        sub.name
        for ax in staged
        for concept in ax.lhs + ax.rhs
        for sub in concept.subconcepts()
        if sub.kind == "atom"
    }
    names |= spec.query.atoms()
    mapping = {name: name + suffix for name in names}
    axioms = [_rename_axiom(ax, mapping) for ax in staged]
    query = _rename_concept(spec.query, mapping)
    for name in spec.signature:
        axioms.append(Axiom((atom(name),), (atom(name + suffix),)))
        axioms.append(Axiom((atom(name), atom(bar_stem + name + suffix)), ()))
    return OmqSpec(Ontology(tuple(axioms)), query, spec.mode, spec.signature)


# ---------------------------------------------------------------------------
# small-support languages of positive box-free queries


def _boolean_bot_free(spec: OmqSpec) -> OmqSpec:
    """Reduce to an equivalent Boolean query over a falsum-free ontology."""
    work = spec
    if work.mode == "specific":
        work, _marker = specific_to_boolean(work)
    if work.kind == "OMAQ":
        # wrap so falsum removal routes through query disjuncts; a Boolean
        # answer is position-independent, so the wrap preserves it
        work = OmqSpec(
            work.ontology,
            wrap("dia_p", wrap("dia_f", work.query)),
            "boolean",
            work.signature,
        )
    return remove_bot(work)


def _support_words(
    signature: Sequence[str], budget: int, cap: int
) -> Iterator[tuple[frozenset[str], ...]]:
    """Words of nonempty atom sets with at most ``budget`` atoms in total."""
    atoms = tuple(sorted(signature))
    subsets: list[frozenset[str]] = []
    for mask in range(1, 1 << len(atoms)):
        subsets.append(
            frozenset(a for i, a in enumerate(atoms) if mask >> i & 1)
        )
    subsets.sort(key=lambda s: (len(s), tuple(sorted(s))))
    count = 0

    def emit(prefix: tuple[frozenset[str], ...], left: int):
        nonlocal count
        count += 1
        if count > cap:
            raise CapExceeded(
                f"more than {cap} support words over {len(atoms)} atoms", cap=cap
            )
        yield prefix
        for s in subsets:
            if len(s) <= left:
                yield from emit(prefix + (s,), left - len(s))

    yield from emit((), budget)


def _chain_dfa(signature: Sequence[str], word: Sequence[frozenset[str]]) -> Dfa:
    """Words that spell out ``word`` in order, padded with empty letters."""
    alphabet = powerset_alphabet(tuple(signature))
    empty = encode_letter(frozenset())
    targets = [encode_letter(s) for s in word]
    k = len(targets)
    sink = k + 1
    delta = {}
    for letter in alphabet:
        row = []
        for state in range(k + 2):
            if state == sink:
                row.append(sink)
            elif letter == empty:
                row.append(state)
            elif state < k and letter == targets[state]:
                row.append(state + 1)
            else:
                row.append(sink)
        delta[letter] = tuple(row)
    return Dfa(tuple(alphabet), k + 2, 0, frozenset({k}), delta)


@dataclass(frozen=True)
class CoreFoResult:
    """Definability verdict over all small-support languages.

    ``blockers`` lists the support words (as tuples of sorted atom sets)
    whose padded language is not plain-order definable, each with the
    counter-witness found; ``checked`` counts the support words examined.
    """

    rewritable: bool
    blockers: tuple[tuple[tuple[str, ...], ...], ...]
    checked: int
    witnesses: tuple[FoWitness, ...] = ()


def core_ompeq_decide_fo(
    spec: OmqSpec, support_cap: int = SUPPORT_WORD_CAP
) -> CoreFoResult:
    """Decide plain-order rewritability of a positive box-free query over a
    core ontology by checking each small-support language.

    The certain-yes language is the union of upward closures of the
    languages pinned to each support word, and it is plain-order definable
    exactly when every one of those pinned languages is.
    """
    _require_core(spec.ontology)
    _require_next_only(spec.ontology)
    if spec.kind not in ("OMAQ", "OMPQ", "OMPEQ"):
        raise PreconditionViolated(
            "route needs a positive box-free query"
        )
    if spec.kind == "OMAQ" and spec.mode == "specific":
        raise PreconditionViolated(
            "specific atomic queries belong to the binary-clause atomic route"
        )
    work = _boolean_bot_free(spec)
    budget = work.query.atom_occurrences()
    language = omq_language_dfa(work)
    blockers = []
    witnesses = []
    checked = 0
    for word in _support_words(work.signature, budget, support_cap):
        checked += 1
        pinned = minimize(
            product_intersect(_chain_dfa(work.signature, word), language)
        ).minimal
        witness = criterion_fo(pinned)
        if witness is not None:
            blockers.append(tuple(tuple(sorted(s)) for s in word))
            witnesses.append(witness)
    return CoreFoResult(not blockers, tuple(blockers), checked, tuple(witnesses))


# ---------------------------------------------------------------------------
# upward closure


def _decoded_alphabet(alphabet: Sequence[str]) -> dict[str, tuple[frozenset[str], bool]]:
    decoded = {}
    for letter in alphabet:
        try:
            atoms, marked = decode_letter(letter)
        except Exception as exc:  # malformed letter
            raise NotPowersetAlphabet(
                f"letter {letter!r} does not encode an atom set"
            ) from exc
        if encode_letter(atoms, marked) != letter:
            raise NotPowersetAlphabet(
                f"letter {letter!r} does not round-trip as an atom set"
            )
        decoded[letter] = (atoms, marked)
    return decoded


def upward_closure_dfa(machine: Dfa) -> Dfa:
    """Language of words dominating some accepted word letter for letter.

    Letters must encode atom sets; a letter dominates another when it
    asserts a superset of its atoms (marks must agree). The result is the
    minimal automaton of the closed language.
    """
    decoded = _decoded_alphabet(machine.alphabet)
    moves = {}
    for letter, (atoms, marked) in decoded.items():
        rows = []
        for state in range(machine.n_states):
            mask = 0
            for small, (small_atoms, small_marked) in decoded.items():
                if small_marked == marked and small_atoms <= atoms:
                    mask |= 1 << machine.delta[small][state]
            rows.append(mask)
        moves[letter] = tuple(rows)
    closed = Nfa(
        machine.alphabet,
        machine.n_states,
        frozenset({machine.initial}),
        machine.finals,
        moves,
    )
    return minimize(determinize(closed)).minimal


def support_language_union(
    spec: OmqSpec, support_cap: int = SUPPORT_WORD_CAP
) -> Dfa:
    """Rebuild the certain-yes language from its small supports.

    Takes the union over all support words of the upward closure of the
    pinned language; the result should coincide with the certain-yes
    language of the query, which makes this a strong self-check of the
    small-support route.
    """
    _require_core(spec.ontology)
    _require_next_only(spec.ontology)
    work = _boolean_bot_free(spec)
    budget = work.query.atom_occurrences()
    language = omq_language_dfa(work)
    decoded = _decoded_alphabet(language.alphabet)
    blocks: list[Dfa] = []
    for word in _support_words(work.signature, budget, support_cap):
        blocks.append(
            minimize(
                product_intersect(_chain_dfa(work.signature, word), language)
            ).minimal
        )
    offsets = []
    total = 0
    for block in blocks:
        offsets.append(total)
        total += block.n_states
    moves = {}
    for letter, (atoms, marked) in decoded.items():
        rows = [0] * total
        for block, base in zip(blocks, offsets):
            for state in range(block.n_states):
                mask = 0
                for small, (small_atoms, small_marked) in decoded.items():
                    if small_marked == marked and small_atoms <= atoms:
                        mask |= 1 << (base + block.delta[small][state])
                rows[base + state] = mask
        moves[letter] = tuple(rows)
    initials = frozenset(base + block.initial for block, base in zip(blocks, offsets))
    finals = frozenset(
        base + f for block, base in zip(blocks, offsets) for f in block.finals
    )
    union = Nfa(language.alphabet, total, initials, finals, moves)
    return minimize(determinize(union)).minimal
