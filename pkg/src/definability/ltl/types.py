"""Position types and query-language automata for temporal ontologies.

A *position type* records, for one timestamp of a model, which subconcepts of
the ontology and query hold there. Types that can be linked into a two-sided
infinite, promise-fulfilling sequence are exactly the ones realized in some
model, so the certain-answer question for a data word reduces to runs of a
finite automaton whose states are types; the automaton accepts the data words
over which the query can still be *avoided*, and complementing it yields the
query language itself. This route places no restriction on the clause shape
of the ontology, so it doubles as the referee for the specialised deciders.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from ..automata import Dfa, Nfa, determinize, complement, minimize, nfa_accepts, product_intersect
from ..errors import AlphabetMismatch, CapExceeded, NotPowersetAlphabet
from .syntax import AboxWord, Concept, OmqSpec, atom

SUBCONCEPT_CAP = 18
TYPE_ENUM_CAP = 20000
SIGNATURE_ATOMS_CAP = 6
EMPTY_LETTER = "-"
MARK_SUFFIX = "*"

_ATOM_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


# ---------------------------------------------------------------------------
# letters: subsets of the signature, encoded as strings


def encode_letter(atoms: frozenset[str] | set[str], marked: bool = False) -> str:
    """Canonical string for a set of asserted atoms, e.g. ``A,B`` or ``-``."""
    body = ",".join(sorted(atoms)) if atoms else EMPTY_LETTER
    return body + MARK_SUFFIX if marked else body


def decode_letter(letter: str) -> tuple[frozenset[str], bool]:
    """Inverse of encode_letter; rejects strings that are not set letters."""
    marked = letter.endswith(MARK_SUFFIX)
    body = letter[: -len(MARK_SUFFIX)] if marked else letter
    if body == EMPTY_LETTER:
        return frozenset(), marked
    parts = body.split(",")
    if not parts or any(not _ATOM_NAME_RE.match(p) for p in parts):
        raise NotPowersetAlphabet(f"letter {letter!r} does not denote a set of atoms")
    return frozenset(parts), marked


def powerset_alphabet(signature: tuple[str, ...], marked: bool = False) -> tuple[str, ...]:
    """All set letters over the signature, optionally with marked variants."""
    if len(signature) > SIGNATURE_ATOMS_CAP:
        raise CapExceeded(
            f"signature has {len(signature)} atoms", cap=SIGNATURE_ATOMS_CAP
        )
    letters = []
    for mask in range(1 << len(signature)):
        atoms = frozenset(a for i, a in enumerate(signature) if mask >> i & 1)
        letters.append(encode_letter(atoms))
        if marked:
            letters.append(encode_letter(atoms, marked=True))
    return tuple(sorted(letters))


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class QType:
    """One position type: the set of relevant concepts true at a timestamp."""

    positive: frozenset[Concept]

    def holds(self, concept: Concept) -> bool:
        return concept in self.positive

    def atoms(self) -> frozenset[str]:
        return frozenset(c.name for c in self.positive if c.kind == "atom")


def _closure(spec: OmqSpec) -> tuple[Concept, ...]:
    """All concepts whose truth a type must settle, smallest first."""
    roots: list[Concept] = [spec.query]
    for ax in spec.ontology.axioms:
        roots.extend(ax.lhs)
        roots.extend(ax.rhs)
    roots.extend(atom(a) for a in spec.signature)
    seen: set[Concept] = set()
    for r in roots:
        seen.update(r.subconcepts())
    return tuple(sorted(seen, key=lambda c: (sum(1 for _ in c.subconcepts()), str(c))))


_MODAL_KINDS = ("next_f", "next_p", "dia_f", "dia_p", "box_f", "box_p")


def _coherent_assignments(
    sub: tuple[Concept, ...], spec: OmqSpec, cap: int = TYPE_ENUM_CAP
) -> list[int]:
    """Truth bitmasks over ``sub`` that satisfy boolean laws and all axioms.

    Depth-first over ``sub`` (sorted smallest-first, so arguments precede the
    concepts built from them): connective values are forced, atom and modal
    values branch, and every axiom is checked as soon as its last mentioned
    concept is decided, pruning violating prefixes early.
    """
    index = {c: i for i, c in enumerate(sub)}
    n = len(sub)
    last_checks: list[list[tuple[list[int], list[int]]]] = [[] for _ in range(n)]
    for ax in spec.ontology.axioms:
        lhs = [index[c] for c in ax.lhs]
        rhs = [index[c] for c in ax.rhs]
        last_checks[max(lhs + rhs, default=0)].append((lhs, rhs))
    out: list[int] = []
    val = [False] * n
    budget = [40 * cap]

    def extend(i: int) -> None:
        budget[0] -= 1
        if budget[0] < 0:
            raise CapExceeded(
                "type enumeration explored too many assignment prefixes", cap=cap
            )
        if i == n:
            if len(out) >= cap:
                raise CapExceeded(
                    f"more than {cap} coherent truth assignments", cap=cap
                )
            out.append(sum(1 << k for k, v in enumerate(val) if v))
            return
        c = sub[i]
        if c.kind == "top":
            choices: tuple[bool, ...] = (True,)
        elif c.kind == "bot":
            choices = (False,)
        elif c.kind == "and":
            choices = (all(val[index[a]] for a in c.args),)
        elif c.kind == "or":
            choices = (any(val[index[a]] for a in c.args),)
        else:
            choices = (False, True)
        for v in choices:
            val[i] = v
            if all(
                not (all(val[k] for k in lhs) and not any(val[k] for k in rhs))
                for lhs, rhs in last_checks[i]
            ):
                extend(i + 1)
        val[i] = False

    extend(0)
    return sorted(out)


def _edge_checks(sub: tuple[Concept, ...]) -> list[tuple[str, int, int]]:
    index = {c: i for i, c in enumerate(sub)}
    return [
        (c.kind, i, index[c.args[0]])
        for i, c in enumerate(sub)
        if c.kind in _MODAL_KINDS
    ]


def _edge_ok(checks: list[tuple[str, int, int]], v1: int, v2: int) -> bool:
    """Whether two adjacent positions with these truth masks can be neighbours."""
    for kind, i, j in checks:
        if kind == "next_f":
            if bool(v1 >> i & 1) != bool(v2 >> j & 1):
                return False
        elif kind == "next_p":
            if bool(v2 >> i & 1) != bool(v1 >> j & 1):
                return False
        elif kind == "box_f":
            if bool(v1 >> i & 1) != bool(v2 >> j & 1 and v2 >> i & 1):
                return False
        elif kind == "box_p":
            if bool(v2 >> i & 1) != bool(v1 >> j & 1 and v1 >> i & 1):
                return False
        elif kind == "dia_f":
            if bool(v1 >> i & 1) != bool(v2 >> j & 1 or v2 >> i & 1):
                return False
        else:  # dia_p
            if bool(v2 >> i & 1) != bool(v1 >> j & 1 or v1 >> i & 1):
                return False
    return True


def _strongly_connected(n: int, succ: list[int], alive: int) -> list[int]:
    """SCC member masks of the subgraph induced by the alive set (Kosaraju)."""
    order: list[int] = []
    visited = 0
    for root in range(n):
        if not alive >> root & 1 or visited >> root & 1:
            continue
        stack = [(root, succ[root] & alive)]
        visited |= 1 << root
        while stack:
            node, todo = stack[-1]
            if todo:
                nxt = (todo & -todo).bit_length() - 1
                stack[-1] = (node, todo & todo - 1)
                if not visited >> nxt & 1:
                    visited |= 1 << nxt
                    stack.append((nxt, succ[nxt] & alive))
            else:
                order.append(node)
                stack.pop()
    pred = [0] * n
    for q in range(n):
        if alive >> q & 1:
            m = succ[q] & alive
            while m:
                t = (m & -m).bit_length() - 1
                m &= m - 1
                pred[t] |= 1 << q
    comps: list[int] = []
    assigned = 0
    for root in reversed(order):
        if assigned >> root & 1:
            continue
        comp = 1 << root
        frontier = pred[root] & alive & ~assigned & ~comp
        while frontier:
            comp |= frontier
            new = 0
            m = frontier
            while m:
                q = (m & -m).bit_length() - 1
                m &= m - 1
                new |= pred[q]
            frontier = new & alive & ~assigned & ~comp
        assigned |= comp
        comps.append(comp)
    return comps


def _recurrence_core(n: int, succ: list[int], promises: list[list[int]], vals: list[int]) -> int:
    """Types inside some strongly connected set able to honour its promises.

    ``promises[q]`` lists, for an eventuality claimed at q, the bit of the
    concept that must then hold somewhere in the set; unsatisfiable members
    are pruned and the components recomputed until stable.
    """
    alive = (1 << n) - 1
    while True:
        removed = 0
        for comp in _strongly_connected(n, succ, alive):
            size = comp.bit_count()
            members = []
            m = comp
            while m:
                q = (m & -m).bit_length() - 1
                m &= m - 1
                members.append(q)
            nontrivial = size > 1 or any(succ[q] >> q & 1 for q in members)
            present = 0
            for q in members:
                present |= vals[q]
            for q in members:
                if not nontrivial or any(not present >> bit & 1 for bit in promises[q]):
                    removed |= 1 << q
        if not removed:
            return alive
        alive &= ~removed
        if not alive:
            return 0


def _viable(n: int, succ: list[int], promises: list[list[int]], vals: list[int]) -> int:
    """Types from which an infinite promise-fulfilling forward run exists."""
    core = _recurrence_core(n, succ, promises, vals)
    reach = core
    changed = True
    while changed:
        changed = False
        for q in range(n):
            if not reach >> q & 1 and succ[q] & reach:
                reach |= 1 << q
                changed = True
    return reach


@dataclass
class _TypeSystem:
    sub: tuple[Concept, ...]
    types: tuple[QType, ...]
    vals: list[int]
    succ: list[int]
    pred: list[int]
    sig_atom_mask: list[int]
    query_bit: int
    left_viable: int
    right_viable: int


@lru_cache(maxsize=32)
def _type_system(spec: OmqSpec, cap_concepts: int = SUBCONCEPT_CAP) -> _TypeSystem:
    sub = _closure(spec)
    if len(sub) > cap_concepts:
        raise CapExceeded(
            f"closure has {len(sub)} concepts", cap=cap_concepts
        )
    masks = _coherent_assignments(sub, spec)
    checks = _edge_checks(sub)
    n = len(masks)
    full = (1 << n) - 1
    bit1: dict[int, int] = {}
    for _, i, j in checks:
        for b in (i, j):
            if b not in bit1:
                bit1[b] = sum(1 << t for t, v in enumerate(masks) if v >> b & 1)

    def succ_row(v1: int) -> int:
        row = full
        for kind, i, j in checks:
            if kind == "next_f":
                row &= bit1[j] if v1 >> i & 1 else full ^ bit1[j]
            elif kind == "next_p":
                row &= bit1[i] if v1 >> j & 1 else full ^ bit1[i]
            elif kind == "box_f":
                both = bit1[j] & bit1[i]
                row &= both if v1 >> i & 1 else full ^ both
            elif kind == "box_p":
                need = (v1 >> j & 1) and (v1 >> i & 1)
                row &= bit1[i] if need else full ^ bit1[i]
            elif kind == "dia_f":
                either = bit1[j] | bit1[i]
                row &= either if v1 >> i & 1 else full ^ either
            else:  # dia_p
                need = (v1 >> j & 1) or (v1 >> i & 1)
                row &= bit1[i] if need else full ^ bit1[i]
        return row

    def pred_row(v2: int) -> int:
        row = full
        for kind, i, j in checks:
            if kind == "next_f":
                row &= bit1[i] if v2 >> j & 1 else full ^ bit1[i]
            elif kind == "next_p":
                row &= bit1[j] if v2 >> i & 1 else full ^ bit1[j]
            elif kind == "box_f":
                need = (v2 >> j & 1) and (v2 >> i & 1)
                row &= bit1[i] if need else full ^ bit1[i]
            elif kind == "box_p":
                both = bit1[j] & bit1[i]
                row &= both if v2 >> i & 1 else full ^ both
            elif kind == "dia_f":
                need = (v2 >> j & 1) or (v2 >> i & 1)
                row &= bit1[i] if need else full ^ bit1[i]
            else:  # dia_p
                either = bit1[j] | bit1[i]
                row &= either if v2 >> i & 1 else full ^ either
        return row

    succ = [succ_row(v) for v in masks]
    pred = [pred_row(v) for v in masks]
    index = {c: i for i, c in enumerate(sub)}
    fwd_promises = [
        [index[sub[i].args[0]] for i in range(len(sub)) if sub[i].kind == "dia_f" and v >> i & 1]
        for v in masks
    ]
    bwd_promises = [
        [index[sub[i].args[0]] for i in range(len(sub)) if sub[i].kind == "dia_p" and v >> i & 1]
        for v in masks
    ]
    right = _viable(n, succ, fwd_promises, masks)
    left = _viable(n, pred, bwd_promises, masks)
    sig_index = {a: k for k, a in enumerate(spec.signature)}
    sig_atom_mask = []
    types = []
    for v in masks:
        positive = frozenset(c for i, c in enumerate(sub) if v >> i & 1)
        types.append(QType(positive))
        am = 0
        for a, k in sig_index.items():
            if v >> index[atom(a)] & 1:
                am |= 1 << k
        sig_atom_mask.append(am)
    qbit = index[spec.query]
    return _TypeSystem(
        sub, tuple(types), masks, succ, pred, sig_atom_mask, qbit, left, right
    )


def enumerate_types(
    spec: OmqSpec, cap_concepts: int = SUBCONCEPT_CAP
) -> tuple[QType, ...]:
    """The position types realizable in some model of the ontology."""
    ts = _type_system(spec, cap_concepts)
    both = ts.left_viable & ts.right_viable
    return tuple(t for i, t in enumerate(ts.types) if both >> i & 1)


# ---------------------------------------------------------------------------
# automata


def _letter_masks(signature: tuple[str, ...]) -> dict[str, int]:
    out = {}
    for letter in powerset_alphabet(signature):
        atoms, _ = decode_letter(letter)
        out[letter] = sum(1 << signature.index(a) for a in atoms)
    return out


def type_nfa(spec: OmqSpec, cap_concepts: int = SUBCONCEPT_CAP) -> Nfa:
    """Automaton accepting the data words over which the query is avoidable.

    Boolean mode: runs are type sequences of models keeping the query false
    at every timestamp, so acceptance means "not a certain answer". Specific
    mode reads marked words and keeps the query false at the marked position
    only; words with zero or two marks are junk the caller filters out.
    """
    ts = _type_system(spec, cap_concepts)
    n = len(ts.types)
    letters = _letter_masks(spec.signature)
    if spec.mode == "boolean":
        keep = [i for i in range(n) if not ts.vals[i] >> ts.query_bit & 1]
        remap = {t: k for k, t in enumerate(keep)}
        keep_mask = sum(1 << t for t in keep)
        sub_succ = []
        for t in keep:
            row = ts.succ[t] & keep_mask
            packed = 0
            m = row
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                packed |= 1 << remap[j]
            sub_succ.append(packed)
        sub_pred = [0] * len(keep)
        for i, row in enumerate(sub_succ):
            m = row
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                sub_pred[j] |= 1 << i
        index = {c: i for i, c in enumerate(ts.sub)}
        fwd = [
            [
                index[ts.sub[i].args[0]]
                for i in range(len(ts.sub))
                if ts.sub[i].kind == "dia_f" and ts.vals[t] >> i & 1
            ]
            for t in keep
        ]
        bwd = [
            [
                index[ts.sub[i].args[0]]
                for i in range(len(ts.sub))
                if ts.sub[i].kind == "dia_p" and ts.vals[t] >> i & 1
            ]
            for t in keep
        ]
        sub_vals = [ts.vals[t] for t in keep]
        right = _viable(len(keep), sub_succ, fwd, sub_vals)
        left = _viable(len(keep), sub_pred, bwd, sub_vals)
        moves = {}
        for letter, lmask in letters.items():
            row = []
            for i in range(len(keep)):
                targets = 0
                m = sub_succ[i]
                while m:
                    j = (m & -m).bit_length() - 1
                    m &= m - 1
                    if lmask & ~ts.sig_atom_mask[keep[j]] == 0:
                        targets |= 1 << j
                row.append(targets)
            moves[letter] = tuple(row)
        n_states = max(1, len(keep))
        if not keep:  # the query holds in every type: nothing is avoidable
            return Nfa(
                tuple(sorted(letters)), 1, frozenset(), frozenset(),
                {a: (0,) for a in letters},
            )
        return Nfa(
            tuple(sorted(letters)),
            n_states,
            frozenset(i for i in range(len(keep)) if left >> i & 1),
            frozenset(i for i in range(len(keep)) if right >> i & 1),
            {a: moves[a] for a in sorted(letters)},
        )

    # specific mode: state = (type, seen-the-mark flag)
    alphabet = powerset_alphabet(spec.signature, marked=True)
    def sid(t: int, phase: int) -> int:
        return t * 2 + phase

    moves = {a: [0] * (2 * n) for a in alphabet}
    for letter in alphabet:
        atoms, marked = decode_letter(letter)
        lmask = sum(1 << spec.signature.index(a) for a in atoms)
        for i in range(n):
            m = ts.succ[i]
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                if lmask & ~ts.sig_atom_mask[j]:
                    continue
                if marked:
                    if not ts.vals[j] >> ts.query_bit & 1:
                        moves[letter][sid(i, 0)] |= 1 << sid(j, 1)
                else:
                    moves[letter][sid(i, 0)] |= 1 << sid(j, 0)
                    moves[letter][sid(i, 1)] |= 1 << sid(j, 1)
    return Nfa(
        alphabet,
        2 * n,
        frozenset(sid(i, 0) for i in range(n) if ts.left_viable >> i & 1),
        frozenset(sid(i, 1) for i in range(n) if ts.right_viable >> i & 1),
        {a: tuple(row) for a, row in moves.items()},
    )


def _single_mark_dfa(alphabet: tuple[str, ...]) -> Dfa:
    """Accepts the words carrying exactly one marked letter."""
    delta = {}
    for a in alphabet:
        marked = a.endswith(MARK_SUFFIX)
        delta[a] = (1, 2, 2) if marked else (0, 1, 2)
    return Dfa(alphabet, 3, 0, frozenset({1}), delta)


def omq_language_dfa(spec: OmqSpec, cap_concepts: int = SUBCONCEPT_CAP) -> Dfa:
    """Minimal DFA of the query language over set letters.

    Boolean mode: the words (data instances) whose certain answer is yes.
    Specific mode: the single-marked words whose marked position is a certain
    answer. Definability analysis of the query reduces to this machine.
    """
    nfa = type_nfa(spec, cap_concepts)
    dfa = complement(determinize(nfa))
    if spec.mode == "specific":
        dfa = product_intersect(dfa, _single_mark_dfa(nfa.alphabet))
    return minimize(dfa).minimal


def certain_answer_generic(spec: OmqSpec, abox: AboxWord) -> bool | frozenset[int]:
    """Certain answers straight from type runs; the clause-shape-free referee."""
    letters = [abox.atoms_at(i) for i in range(len(abox))]
    stray = set().union(*letters, frozenset()) - set(spec.signature)
    if stray:
        raise AlphabetMismatch(
            f"data word asserts atoms outside the query signature: {sorted(stray)}"
        )
    nfa = type_nfa(spec)
    if spec.mode == "boolean":
        word = [encode_letter(s) for s in letters]
        return not nfa_accepts(nfa, word)
    answers = set()
    for i in range(len(abox)):
        word = [encode_letter(s, marked=(k == i)) for k, s in enumerate(letters)]
        if not nfa_accepts(nfa, word):
            answers.add(abox.origin + i)
    return frozenset(answers)
