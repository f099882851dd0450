"""Deciders for ontologies whose rules chain through at most one derived atom.

When every axiom body mentions at most one derivable atom, a derivation is a
path: it starts from an assertion (or an empty-body rule) and extends one head
at a time, checking nearby data letters along the way. Such chains are exactly
what a two-way walker can trace on the data word, which yields a one-way
language automaton for atomic queries without enumerating model types.

For positive existential queries the module instead runs a deterministic
automaton over *sets* of model types and phrases non-definability as a pumping
pattern on data words: a prefix, a repeated infix, and a suffix whose
certain-consequence types expose the query flipping with the repeat count.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import lcm
from typing import Optional, Sequence

from . import algebra
from .automata import (
    Dfa,
    access_words,
    distinguishing_word,
    mask_states,
    minimize,
    product_intersect,
)
from .errors import CapExceeded, NotHorn, NotLinear, PreconditionViolated
from .ltl.syntax import Concept, OmqSpec, Ontology, wrap
from .ltl.transforms import normalize_horn, remove_bot, specific_to_boolean
from .ltl.types import (
    EMPTY_LETTER,
    SUBCONCEPT_CAP,
    _letter_masks,
    _single_mark_dfa,
    _type_system,
    decode_letter,
    encode_letter,
    powerset_alphabet,
)
from .twoway import (
    Behavior,
    BehaviorDfaState,
    TwoNfa,
    behavior_compose,
    behavior_of_letter,
    identity_behavior,
    rel_compose,
    rel_rtc,
    rel_union,
)

TYPESET_CAP = 4096
SUBSET_STATE_CAP = 20000
WITNESS_REPEAT_CAP = 64
WITNESS_LETTER_CAP = 200000


# ---------------------------------------------------------------------------
# rule compilation: normalized axioms -> probe/trigger shapes


@dataclass(frozen=True)
class _Rule:
    """One derivation step, positioned relative to the derived atom's cell.

    ``probes`` are data-letter checks (offset, atom); ``trigger`` is the single
    derivable body atom with its offset folded into {-1, 0, +1}, or None when
    the rule fires from data alone.
    """

    probes: tuple[tuple[int, str], ...]
    trigger: Optional[tuple[int, str]]
    head: str


def _next_offset(concept: Concept) -> tuple[int, Optional[str]]:
    """Net time shift of a body literal; a None name means trivially true."""
    off = 0
    cur = concept
    while cur.kind in ("next_f", "next_p"):
        off += 1 if cur.kind == "next_f" else -1
        cur = cur.args[0]
    if cur.kind == "top":
        return off, None
    if cur.kind != "atom":
        raise PreconditionViolated(
            f"body concept {concept} mixes in {cur.kind!r}; the walker handles "
            "next-time chains over atoms only"
        )
    return off, cur.name


def _compile_rules(ontology: Ontology) -> tuple[tuple[_Rule, ...], Ontology]:
    """Normalize and flatten axioms into walker rules.

    Derivable body atoms further than one step away are folded through fresh
    chain atoms (one per step), which keeps each rule's trigger adjacent while
    preserving least-model semantics and the one-derivable-atom shape.
    """
    norm = normalize_horn(ontology)
    if any(not ax.rhs for ax in norm.axioms):
        raise PreconditionViolated(
            "falsum axioms must be eliminated before building the walker"
        )
    derivable = set(norm.idb_atoms)
    used = set(norm.signature)
    counter = 0

    def fresh() -> str:
        nonlocal counter
        while True:
            counter += 1
            name = f"_Step{counter}"
            if name not in used:
                used.add(name)
                return name

    rules: list[_Rule] = []
    chains: dict[tuple[str, int], list[str]] = {}

    def shifted(name: str, sign: int, dist: int) -> str:
        # chain atom holding at t exactly when `name` holds at t + sign*dist
        chain = chains.setdefault((name, sign), [])
        while len(chain) < dist:
            prev = chain[-1] if chain else name
            nxt = fresh()
            rules.append(_Rule((), (sign, prev), nxt))
            chain.append(nxt)
        return chain[dist - 1]

    for ax in norm.axioms:
        head = ax.rhs[0].name
        probes: list[tuple[int, str]] = []
        triggers: list[tuple[int, str]] = []
        for body in ax.lhs:
            off, name = _next_offset(body)
            if name is None:
                continue
            (triggers if name in derivable else probes).append((off, name))
        if len(triggers) > 1:
            raise NotLinear(
                f"axiom {ax} chains {len(triggers)} derivable atoms; "
                "at most one is supported"
            )
        trigger = triggers[0] if triggers else None
        if trigger is not None and abs(trigger[0]) > 1:
            off, name = trigger
            sign = 1 if off > 0 else -1
            trigger = (sign, shifted(name, sign, abs(off) - 1))
        rules.append(_Rule(tuple(probes), trigger, head))
    return tuple(rules), norm


def _step_count(rules: Sequence[_Rule]) -> int:
    return sum(
        sum(abs(off) for off, _ in rule.probes)
        + (abs(rule.trigger[0]) if rule.trigger else 0)
        for rule in rules
    )


# ---------------------------------------------------------------------------
# the walker automaton


@dataclass(frozen=True)
class LinearAutomaton:
    """Two-way walker whose marker states flag derivable atoms.

    A run parks in ``atom_states[A]`` one cell to the right of a position
    where A is certain; ``padding`` empty cells on each side of the data give
    every chain that can matter room to complete.
    """

    machine: TwoNfa
    atom_states: dict[str, int]
    query_state: Optional[int]
    padding: int


def _build_walker(
    ontology: Ontology,
    signature: tuple[str, ...],
    query_name: Optional[str],
    padding: Optional[int],
) -> LinearAutomaton:
    rules, norm = _compile_rules(ontology)
    steps = _step_count(rules)
    pad = padding if padding is not None else max(1, steps + 2 * steps * steps) + 1
    if pad < 1:
        raise PreconditionViolated("padding must be at least one cell")
    marker_atoms = sorted(
        set(norm.signature)
        | set(signature)
        | {rule.head for rule in rules}
        | ({query_name} if query_name else set())
    )
    alphabet = powerset_alphabet(tuple(signature))
    letter_atoms = {a: decode_letter(a)[0] for a in alphabet}

    n_states = 1  # state 0: scanning right for a place to fire
    atom_states: dict[str, int] = {}
    for name in marker_atoms:
        atom_states[name] = n_states
        n_states += 1

    def new_state() -> int:
        nonlocal n_states
        n_states += 1
        return n_states - 1

    # (src, dst, direction, atom, present): fires on letters where the atom
    # test passes (atom None = any letter)
    arcs: list[tuple[int, int, int, Optional[str], bool]] = []

    def arc(src: int, dst: int, direction: int, atom: Optional[str] = None,
            present: bool = True) -> None:
        arcs.append((src, dst, direction, atom, present))

    arc(0, 0, +1)
    for name, state in atom_states.items():
        arc(0, state, +1, atom=name)  # an asserted atom is derivable as-is

    for rule in rules:
        if rule.trigger is None:
            cursor = new_state()
            arc(0, cursor, 0)
        else:
            off, name = rule.trigger
            cursor = atom_states[name]
            for _ in range(off + 1):  # marker sits at trigger home + 1
                nxt = new_state()
                arc(cursor, nxt, -1)
                cursor = nxt
            if off + 1 == 0:
                nxt = new_state()
                arc(cursor, nxt, 0)
                cursor = nxt
        for off, name in rule.probes:
            if off == 0:
                nxt = new_state()
                arc(cursor, nxt, 0, atom=name)
                cursor = nxt
            else:
                direction = 1 if off > 0 else -1
                for _ in range(abs(off)):
                    nxt = new_state()
                    arc(cursor, nxt, direction)
                    cursor = nxt
                nxt = new_state()  # the check doubles as the first return step
                arc(cursor, nxt, -direction, atom=name)
                cursor = nxt
                for _ in range(abs(off) - 1):
                    nxt = new_state()
                    arc(cursor, nxt, -direction)
                    cursor = nxt
        arc(cursor, atom_states[rule.head], +1)

    query_state: Optional[int] = None
    finals: frozenset[int] = frozenset()
    if query_name is not None:
        query_state = atom_states[query_name]
        arc(query_state, query_state, +1)
        finals = frozenset({query_state})

    moves = {}
    for letter in alphabet:
        atoms_here = letter_atoms[letter]
        rows = [[0] * n_states, [0] * n_states, [0] * n_states]
        for src, dst, direction, atom, present in arcs:
            if atom is not None and (atom in atoms_here) != present:
                continue
            rows[direction + 1][src] |= 1 << dst
        moves[letter] = (tuple(rows[0]), tuple(rows[1]), tuple(rows[2]))
    machine = TwoNfa(alphabet, n_states, frozenset({0}), finals, moves)
    return LinearAutomaton(machine, atom_states, query_state, pad)


def build_A_O(spec: OmqSpec, padding: Optional[int] = None) -> LinearAutomaton:
    """Two-way walker for a falsum-free Boolean atomic query.

    The marker state of the query atom is final and rides right, so the walker
    accepts a padded data word exactly when the query atom is certain at some
    timestamp.
    """
    if spec.mode != "boolean":
        raise PreconditionViolated(
            "the walker takes Boolean queries; reduce specific queries first"
        )
    if spec.query.kind != "atom":
        raise PreconditionViolated("the walker needs an atomic query")
    if not spec.ontology.is_bot_free:
        raise PreconditionViolated(
            "falsum axioms must be eliminated before building the walker"
        )
    return _build_walker(spec.ontology, tuple(spec.signature), spec.query.name, padding)


# ---------------------------------------------------------------------------
# certain atoms and the language automaton via crossing behaviors


def _behavior_power(base: Behavior, exponent: int) -> Behavior:
    acc = identity_behavior(base.n_states)
    square = base
    e = exponent
    while e:
        if e & 1:
            acc = behavior_compose(acc, square)
        e >>= 1
        if e:
            square = behavior_compose(square, square)
    return acc


def atomic_types_via_behaviors(
    spec: OmqSpec, word: Sequence[str], padding: Optional[int] = None
) -> tuple[frozenset[str], ...]:
    """Certain atoms at each position of a data word, by crossing relations.

    Composes the walker's crossing behaviors over the padded word once per
    position: an atom is certain at a position exactly when some run crosses
    the corresponding cell boundary rightward in its marker state, allowing
    any number of bounces off the two sides first.
    """
    if not spec.ontology.is_bot_free:
        raise PreconditionViolated(
            "falsum axioms must be eliminated before reading certain atoms"
        )
    walker = _build_walker(spec.ontology, tuple(spec.signature), None, padding)
    machine = walker.machine
    pad = _behavior_power(behavior_of_letter(machine, EMPTY_LETTER), walker.padding)
    letters = list(word)
    prefixes = [pad]
    for sym in letters:
        prefixes.append(behavior_compose(prefixes[-1], behavior_of_letter(machine, sym)))
    suffixes: list[Behavior] = [pad] * (len(letters) + 1)
    for i in range(len(letters) - 1, -1, -1):
        suffixes[i] = behavior_compose(behavior_of_letter(machine, letters[i]), suffixes[i + 1])
    out = []
    for i in range(len(letters)):
        ahead = prefixes[i + 1]
        behind = suffixes[i + 1]
        bounce = rel_rtc(rel_compose(behind.left_to_left, ahead.right_to_right))
        row = 0
        for j in mask_states(ahead.left_to_right[0]):
            row |= bounce[j]
        out.append(
            frozenset(
                name for name, st in walker.atom_states.items() if row >> st & 1
            )
        )
    return tuple(out)


def omaq_language_dfa_linear(
    spec: OmqSpec,
    padding: Optional[int] = None,
    cap_states: int = SUBSET_STATE_CAP,
) -> Dfa:
    """Minimal DFA of an atomic query's yes-instances, via the walker.

    Specific queries are reduced to Boolean ones over a marked alphabet and
    the result is relabeled back; falsum axioms are routed through a flooding
    atom first. The subset construction tracks the crossing relations of the
    padded prefix, seeded and finished with the padding's own behavior.
    """
    work = spec
    marker: Optional[str] = None
    if work.mode == "specific":
        work, marker = specific_to_boolean(work)
    if not work.ontology.is_bot_free:
        work = remove_bot(work)
    if work.query.kind != "atom":
        raise PreconditionViolated(
            "atomic queries only; positive existential queries take the type-set route"
        )
    walker = build_A_O(work, padding=padding)
    machine = walker.machine
    n = machine.n_states
    letter_behavior = {a: behavior_of_letter(machine, a) for a in machine.alphabet}
    pad = _behavior_power(letter_behavior[EMPTY_LETTER], walker.padding)

    init_lr = tuple(pad.left_to_right[0] if q == 0 else 0 for q in range(n))
    start = BehaviorDfaState(init_lr, pad.right_to_right)
    index = {start: 0}
    order = [start]
    rows: dict[str, list[int]] = {a: [] for a in machine.alphabet}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for a in machine.alphabet:
            b = letter_behavior[a]
            bounce_fw = rel_rtc(rel_compose(b.left_to_left, state.right_to_right))
            bounce_bw = rel_rtc(rel_compose(state.right_to_right, b.left_to_left))
            new_lr = rel_compose(state.left_to_right, rel_compose(bounce_fw, b.left_to_right))
            new_rr = rel_union(
                b.right_to_right,
                rel_compose(
                    b.right_to_left,
                    rel_compose(bounce_bw, rel_compose(state.right_to_right, b.left_to_right)),
                ),
            )
            new = BehaviorDfaState(new_lr, new_rr)
            if new not in index:
                if len(order) >= cap_states:
                    raise CapExceeded(
                        f"crossing-relation subset automaton exceeds {cap_states} states",
                        cap=cap_states,
                    )
                index[new] = len(order)
                order.append(new)
                queue.append(new)
            rows[a].append(index[new])

    assert walker.query_state is not None
    accept_bit = 1 << walker.query_state
    finals = set()
    for i, state in enumerate(order):
        bounce = rel_rtc(rel_compose(pad.left_to_left, state.right_to_right))
        row = 0
        for j in mask_states(state.left_to_right[0]):
            row |= bounce[j]
        exit_row = 0
        for j in mask_states(row):
            exit_row |= pad.left_to_right[j]
        if exit_row & accept_bit:
            finals.add(i)
    dfa = Dfa(
        machine.alphabet,
        len(order),
        0,
        frozenset(finals),
        {a: tuple(rows[a]) for a in machine.alphabet},
    )

    if marker is not None:
        marked_alphabet = powerset_alphabet(tuple(spec.signature), marked=True)
        delta = {}
        for target in marked_alphabet:
            atoms, is_marked = decode_letter(target)
            source = encode_letter(set(atoms) | {marker} if is_marked else atoms)
            delta[target] = dfa.delta[source]
        relabeled = Dfa(marked_alphabet, dfa.n_states, dfa.initial, dfa.finals, delta)
        dfa = product_intersect(relabeled, _single_mark_dfa(marked_alphabet))
    return minimize(dfa).minimal


# ---------------------------------------------------------------------------
# the deterministic automaton over sets of model types


@dataclass(frozen=True)
class TypeSetDfa:
    """Deterministic automaton over sets of model types, with replay tables.

    ``state_sets[i]`` is the bitmask of type indices the automaton state *i*
    stands for; ``vals[t]`` is type *t*'s subconcept valuation and
    ``query_bit`` the subconcept index of the anywhere-form of the query.
    ``letter_succ``/``letter_pred`` give, per letter and type, the bitmask of
    admissible successor/predecessor types.
    """

    dfa: Dfa
    alphabet: tuple[str, ...]
    type_count: int
    state_sets: tuple[int, ...]
    vals: tuple[int, ...]
    query_bit: int
    letter_succ: dict[str, tuple[int, ...]]
    letter_pred: dict[str, tuple[int, ...]]

    @property
    def full_mask(self) -> int:
        return (1 << self.type_count) - 1


def build_typeset_dfa(
    spec: OmqSpec,
    cap_types: int = TYPESET_CAP,
    cap_states: int = SUBSET_STATE_CAP,
    cap_concepts: int = SUBCONCEPT_CAP,
) -> TypeSetDfa:
    """Build the type-set automaton of a single-head Horn query.

    States are the sets of model types realizable at the last position read;
    a word is accepted when every realizable type already contains the query
    somewhere on its timeline, i.e. when the word is a yes-instance. Falsum
    axioms need no preprocessing: data that realizes a falsum body empties
    the realizable set, and the empty set is vacuously accepting, which is
    exactly the semantics of inconsistency.
    """
    if spec.mode != "boolean":
        raise PreconditionViolated(
            "type-set automata take Boolean queries; reduce specific queries first"
        )
    if any(len(ax.rhs) > 1 for ax in spec.ontology.axioms):
        raise NotHorn("type-set automata require single-head axioms")
    query = spec.query
    if not (query.kind == "dia_p" and query.args[0].kind == "dia_f"):
        query = wrap("dia_p", wrap("dia_f", query))
    wrapped = OmqSpec(spec.ontology, query, "boolean", spec.signature)
    ts = _type_system(wrapped, cap_concepts)
    both = ts.left_viable & ts.right_viable
    keep = [i for i in range(len(ts.types)) if both >> i & 1]
    count = len(keep)
    if count > cap_types:
        raise CapExceeded(f"{count} model types; cap is {cap_types}", cap=cap_types)
    if count == 0:
        raise PreconditionViolated("the ontology admits no timeline models")

    remap = {t: i for i, t in enumerate(keep)}
    keep_mask = sum(1 << t for t in keep)
    base_succ = []
    for t in keep:
        row = ts.succ[t] & keep_mask
        packed = 0
        for j in mask_states(row):
            packed |= 1 << remap[j]
        base_succ.append(packed)

    alphabet = powerset_alphabet(tuple(spec.signature))
    lmasks = _letter_masks(tuple(spec.signature))
    letter_succ: dict[str, tuple[int, ...]] = {}
    letter_pred: dict[str, tuple[int, ...]] = {}
    admit = {
        letter: sum(
            1 << i
            for i, t in enumerate(keep)
            if lmasks[letter] & ~ts.sig_atom_mask[t] == 0
        )
        for letter in alphabet
    }
    for letter in alphabet:
        succ_rows = tuple(row & admit[letter] for row in base_succ)
        pred_rows = [0] * count
        for i, row in enumerate(succ_rows):
            for j in mask_states(row):
                pred_rows[j] |= 1 << i
        letter_succ[letter] = succ_rows
        letter_pred[letter] = tuple(pred_rows)

    vals = tuple(ts.vals[t] for t in keep)
    qbit = ts.query_bit
    accept_types = sum(1 << i for i, v in enumerate(vals) if v >> qbit & 1)

    full = (1 << count) - 1
    index = {full: 0}
    order = [full]
    rows: dict[str, list[int]] = {a: [] for a in alphabet}
    queue = deque([full])
    while queue:
        mask = queue.popleft()
        for a in alphabet:
            succ_rows = letter_succ[a]
            nxt = 0
            for t in mask_states(mask):
                nxt |= succ_rows[t]
            if nxt not in index:
                if len(order) >= cap_states:
                    raise CapExceeded(
                        f"type-set automaton exceeds {cap_states} states",
                        cap=cap_states,
                    )
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            rows[a].append(index[nxt])
    finals = frozenset(i for i, mask in enumerate(order) if mask & ~accept_types == 0)
    dfa = Dfa(alphabet, len(order), 0, finals, {a: tuple(rows[a]) for a in alphabet})
    return TypeSetDfa(
        dfa,
        alphabet,
        count,
        tuple(order),
        vals,
        qbit,
        letter_succ,
        letter_pred,
    )


# ---------------------------------------------------------------------------
# replaying words through type sets


def type_run_masks(
    tsd: TypeSetDfa, letters: Sequence[str]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Forward type sets and their backward filtration along a word.

    Entry ``j`` of each tuple belongs to position ``j - 1`` (entry 0 is the
    boundary before the word). The forward set holds the types realizable
    given the letters read so far; the backward pass keeps those that can
    also continue through the rest of the word.
    """
    forward = [tsd.full_mask]
    for sym in letters:
        rows = tsd.letter_succ[sym]
        nxt = 0
        for t in mask_states(forward[-1]):
            nxt |= rows[t]
        forward.append(nxt)
    backward = [0] * (len(letters) + 1)
    backward[-1] = forward[-1]
    for j in range(len(letters) - 1, -1, -1):
        rows = tsd.letter_pred[letters[j]]
        pre = 0
        for t in mask_states(backward[j + 1]):
            pre |= rows[t]
        backward[j] = forward[j] & pre
    return tuple(forward), tuple(backward)


def certain_mask(tsd: TypeSetDfa, type_mask: int) -> int:
    """Subconcepts positive in every type of the set (the certain ones)."""
    if not type_mask:
        raise PreconditionViolated("empty type set has no certain consequences")
    acc = -1
    for t in mask_states(type_mask):
        acc &= tsd.vals[t]
    return acc


def _probe(tsd: TypeSetDfa, backward: Sequence[int], pos: int) -> Optional[tuple[int, bool]]:
    mask = backward[pos + 1]
    if not mask:
        return None
    certain = certain_mask(tsd, mask)
    return certain, bool(certain >> tsd.query_bit & 1)


# ---------------------------------------------------------------------------
# pumping witnesses on data words


@dataclass(frozen=True)
class OmpqFoWitness:
    """Data words whose query answer depends on the repeat count.

    With ``k = repeats``: over prefix·cycle^k·suffix the query stays uncertain
    at the probe positions flanking the repeats, while one extra cycle makes
    it certain there — the same certain-consequence type appearing at both
    probes in each word rules out any rewriting with order alone.
    """

    prefix: tuple[str, ...]
    cycle: tuple[str, ...]
    suffix: tuple[str, ...]
    repeats: int


@dataclass(frozen=True)
class OmpqFoEqWitness:
    """A cycle split into a holding half and a stepping half.

    ``cycle = hold + step`` with both halves the same length; inserting the
    holding half anywhere between repeats leaves the probe types unchanged,
    which additionally rules out rewritings with congruence predicates.
    """

    prefix: tuple[str, ...]
    hold: tuple[str, ...]
    step: tuple[str, ...]
    suffix: tuple[str, ...]
    repeats: int

    @property
    def cycle(self) -> tuple[str, ...]:
        return self.hold + self.step


@dataclass(frozen=True)
class OmpqCriterionResult:
    """Outcome of a rewritability check: the verdict, plus a replayable
    word-level witness when one was extracted (None past the search caps)."""

    rewritable: bool
    witness: Optional[object]


def check_ompq_fo_witness(tsd: TypeSetDfa, witness: OmpqFoWitness) -> bool:
    """Replay both witness words and verify the probe-type conditions."""
    if witness.repeats < 2 or not witness.cycle:
        return False
    k = witness.repeats
    head = len(witness.prefix)
    span = len(witness.cycle)

    word1 = witness.prefix + witness.cycle * k + witness.suffix
    _, back1 = type_run_masks(tsd, word1)
    first = _probe(tsd, back1, head - 1)
    last = _probe(tsd, back1, head + k * span - 1)
    if first is None or last is None:
        return False
    if first != last or first[1]:
        return False

    word2 = witness.prefix + witness.cycle * (k + 1) + witness.suffix
    _, back2 = type_run_masks(tsd, word2)
    first2 = _probe(tsd, back2, head + span - 1)
    last2 = _probe(tsd, back2, head + (k + 1) * span - 1)
    if first2 is None or last2 is None:
        return False
    return first2 == last2 and first2[1]


def check_ompq_fo_eq_witness(tsd: TypeSetDfa, witness: OmpqFoEqWitness) -> bool:
    """Replay the witness words and verify the probe and insertion conditions."""
    if len(witness.hold) != len(witness.step) or not witness.hold:
        return False
    base = OmpqFoWitness(witness.prefix, witness.cycle, witness.suffix, witness.repeats)
    if not check_ompq_fo_witness(tsd, base):
        return False
    k = witness.repeats
    head = len(witness.prefix)
    span = len(witness.cycle)
    hold = len(witness.hold)

    word1 = witness.prefix + witness.cycle * k + witness.suffix
    _, back1 = type_run_masks(tsd, word1)
    for i in range(k):
        at = _probe(tsd, back1, head + i * span - 1)
        shifted = _probe(tsd, back1, head + i * span + hold - 1)
        if at is None or shifted is None or at != shifted:
            return False

    word2 = witness.prefix + witness.cycle * (k + 1) + witness.suffix
    _, back2 = type_run_masks(tsd, word2)
    for i in range(1, k + 1):
        at = _probe(tsd, back2, head + i * span - 1)
        shifted = _probe(tsd, back2, head + i * span + hold - 1)
        if at is None or shifted is None or at != shifted:
            return False
    return True


def _image_mask(tsd: TypeSetDfa, mask: int, letters: Sequence[str]) -> int:
    for sym in letters:
        rows = tsd.letter_succ[sym]
        nxt = 0
        for t in mask_states(mask):
            nxt |= rows[t]
        mask = nxt
    return mask


def _back_chain(
    tsd: TypeSetDfa, boundary: int, letters: Sequence[str], seed: Optional[int] = None
) -> int:
    """Backward filtration through ``letters`` starting from the word's tail.

    ``boundary`` is the forward type set at the block's left edge; the seed
    defaults to the forward set at the right edge (a word-final block).
    """
    forward = [boundary]
    for sym in letters:
        forward.append(_image_mask(tsd, forward[-1], (sym,)))
    mask = forward[-1] if seed is None else seed
    for j in range(len(letters) - 1, -1, -1):
        rows = tsd.letter_pred[letters[j]]
        pre = 0
        for t in mask_states(mask):
            pre |= rows[t]
        mask = forward[j] & pre
    return mask


def _filtration_orbit(
    tsd: TypeSetDfa, boundary: int, block: tuple[str, ...], seed: int, cap: int
) -> Optional[tuple[int, int]]:
    """Transient and period of the block-wise backward filtration map."""
    seen = {seed: 0}
    mask = seed
    for step in range(1, cap + 2):
        mask = _back_chain(tsd, boundary, block, seed=mask)
        if mask in seen:
            return seen[mask], step - seen[mask]
        seen[mask] = step
    return None


def _stabilized_candidates(
    tsd: TypeSetDfa, state: int, cycle: tuple[str, ...], k: int
):
    """Yield (prefix, suffix, repeats) whose probe filtrations provably align.

    Orients the distinguishing suffix on a rising edge of the cycle, then pads
    it with whole blocks of repeats so the backward filtration lands in its
    periodic regime at both probes, trying every phase of that regime.
    """
    dfa = tsd.dfa
    if not cycle or k < 2:
        return
    access = access_words(dfa)
    base = access.get(state)
    if base is None:
        return

    def walk(s: int, word: Sequence[str]) -> int:
        for sym in word:
            s = dfa.delta[sym][s]
        return s

    orbit = [state]
    for _ in range(k - 1):
        orbit.append(walk(orbit[-1], cycle))
    tail = distinguishing_word(dfa, orbit[0], walk(orbit[0], cycle))
    if tail is None:
        return
    lit = [walk(s, tail) in dfa.finals for s in orbit]
    edge = next(
        (i for i in range(k) if not lit[i] and lit[(i + 1) % k]), None
    )
    if edge is None:
        return
    prefix = tuple(base) + cycle * edge
    start = orbit[edge]

    cap = min(2 ** tsd.type_count, WITNESS_REPEAT_CAP)
    block = cycle * k
    boundary_lo = tsd.state_sets[start]
    boundary_hi = _image_mask(tsd, boundary_lo, cycle)
    seed_lo = _back_chain(tsd, boundary_lo, tail)
    seed_hi = _back_chain(tsd, boundary_hi, tail)
    orbit_lo = _filtration_orbit(tsd, boundary_lo, block, seed_lo, cap)
    orbit_hi = _filtration_orbit(tsd, boundary_hi, block, seed_hi, cap)
    if orbit_lo is None or orbit_hi is None:
        return
    transient = max(orbit_lo[0], orbit_hi[0])
    period = lcm(orbit_lo[1], orbit_hi[1])
    repeats = k * period
    if repeats < 2 or repeats > cap:
        return
    for phase in range(period):
        blocks = transient + phase
        suffix = cycle * (k * blocks) + tuple(tail)
        total = len(prefix) + (repeats + 1 + k * blocks) * len(cycle) + len(tail)
        if total > WITNESS_LETTER_CAP:
            continue
        yield prefix, suffix, repeats


def _extract_fo(tsd: TypeSetDfa, found: algebra.FoWitness) -> Optional[OmpqFoWitness]:
    for prefix, suffix, repeats in _stabilized_candidates(
        tsd, found.state, tuple(found.u), found.k
    ):
        witness = OmpqFoWitness(prefix, tuple(found.u), suffix, repeats)
        if check_ompq_fo_witness(tsd, witness):
            return witness
    return None


def _extract_fo_eq(
    tsd: TypeSetDfa, found: algebra.FoEqWitness
) -> Optional[OmpqFoEqWitness]:
    step_word = tuple(found.u)
    hold_word = tuple(found.v)
    if len(step_word) != len(hold_word):
        return None
    for power in (1, 2, 3, 4, 6):
        hold = hold_word * power
        step = step_word + hold_word * (power - 1)
        cycle = hold + step
        for prefix, suffix, repeats in _stabilized_candidates(
            tsd, found.state, cycle, found.k
        ):
            witness = OmpqFoEqWitness(prefix, hold, step, suffix, repeats)
            if check_ompq_fo_eq_witness(tsd, witness):
                return witness
    return None


def criterion_ompq_fo(
    spec: OmqSpec, cap_types: int = TYPESET_CAP, cap_concepts: int = SUBCONCEPT_CAP
) -> OmpqCriterionResult:
    """Decide order-only rewritability of a falsum-free Horn query.

    The verdict comes from the cycle-pattern criterion on the type-set
    automaton; on a negative verdict a data-word witness is additionally
    extracted and replay-validated when the search caps allow.
    """
    tsd = build_typeset_dfa(spec, cap_types=cap_types, cap_concepts=cap_concepts)
    found = algebra.criterion_fo(tsd.dfa)
    if found is None:
        return OmpqCriterionResult(True, None)
    return OmpqCriterionResult(False, _extract_fo(tsd, found))


def criterion_ompq_fo_eq(
    spec: OmqSpec, cap_types: int = TYPESET_CAP, cap_concepts: int = SUBCONCEPT_CAP
) -> OmpqCriterionResult:
    """Decide order-plus-congruence rewritability of a falsum-free Horn query.

    As with the order-only check, the verdict is algebraic; the extracted
    witness additionally carries the holding half whose insertions leave the
    probe types fixed.
    """
    tsd = build_typeset_dfa(spec, cap_types=cap_types, cap_concepts=cap_concepts)
    found = algebra.criterion_fo_eq(tsd.dfa)
    if found is None:
        return OmpqCriterionResult(True, None)
    return OmpqCriterionResult(False, _extract_fo_eq(tsd, found))
