"""Two-way nondeterministic automata and their crossing-behavior calculus.

A two-way machine reads a word on a tape with positions ``0..len(w)``;
position ``len(w)`` is the exit cell: reaching it ends the run, which accepts
iff the state there is final. Head moves are -1, 0, +1; a move left from
position 0 is blocked.

The *behavior* of a word records, as four relations over states, every way a
run can cross it: enter left/exit right, enter right/exit left, enter right/
exit right, enter left/exit left. Behaviors compose letter by letter, which
yields both word behaviors and the subset-style conversion to a one-way DFA
whose states are (initial-entry, right-bounce) relation pairs.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from . import algebra
from .automata import Dfa, mask_of, mask_states
from .errors import CapExceeded, UnknownSymbol

TWONFA_STATE_CAP = 12

Rows = tuple[int, ...]


# ---------------------------------------------------------------------------
# relation helpers (rows of successor bitmasks)


def rel_identity(n: int) -> Rows:
    return tuple(1 << i for i in range(n))


def rel_empty(n: int) -> Rows:
    return (0,) * n


def rel_compose(first: Rows, second: Rows) -> Rows:
    """(i, k) related iff i -first-> j -second-> k for some j."""
    out = []
    for row in first:
        acc = 0
        for j in mask_states(row):
            acc |= second[j]
        out.append(acc)
    return tuple(out)


def rel_union(a: Rows, b: Rows) -> Rows:
    return tuple(x | y for x, y in zip(a, b))


def rel_rtc(rel: Rows) -> Rows:
    """Reflexive-transitive closure."""
    n = len(rel)
    rows = [rel[i] | (1 << i) for i in range(n)]
    for k in range(n):
        bit = 1 << k
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rows[k]
    return tuple(rows)


# ---------------------------------------------------------------------------
# machines and behaviors


@dataclass(frozen=True)
class TwoNfa:
    """Two-way NFA; ``moves[sym]`` holds (left, stay, right) successor rows."""

    alphabet: tuple[str, ...]
    n_states: int
    initials: frozenset[int]
    finals: frozenset[int]
    moves: dict[str, tuple[Rows, Rows, Rows]]

    def __post_init__(self):
        if self.n_states <= 0:
            raise ValueError("a two-way NFA needs at least one state")
        if set(self.moves) != set(self.alphabet):
            raise ValueError("move table must cover exactly the alphabet")
        full = (1 << self.n_states) - 1
        for sym, triple in self.moves.items():
            if len(triple) != 3:
                raise ValueError(f"letter {sym!r}: expected (left, stay, right) rows")
            for rows in triple:
                if len(rows) != self.n_states or any(r & ~full for r in rows):
                    raise ValueError(f"letter {sym!r}: malformed rows")
        for s in self.initials | self.finals:
            if not 0 <= s < self.n_states:
                raise ValueError(f"state {s} out of range")


@dataclass(frozen=True)
class Behavior:
    """Crossing relations of a word, one bitmask-row relation per entry/exit side."""

    left_to_right: Rows
    right_to_left: Rows
    right_to_right: Rows
    left_to_left: Rows

    @property
    def n_states(self) -> int:
        return len(self.left_to_right)


def identity_behavior(n_states: int) -> Behavior:
    """Behavior of the empty word: pass-through both ways, no bounces."""
    return Behavior(
        rel_identity(n_states),
        rel_identity(n_states),
        rel_empty(n_states),
        rel_empty(n_states),
    )


def behavior_of_letter(machine: TwoNfa, sym: str) -> Behavior:
    """Behavior of a single letter: any number of stays, then one exit move."""
    try:
        left, stay, right = machine.moves[sym]
    except KeyError:
        raise UnknownSymbol(f"symbol {sym!r} not in alphabet {machine.alphabet}") from None
    hover = rel_rtc(stay)
    out_right = rel_compose(hover, right)
    out_left = rel_compose(hover, left)
    return Behavior(out_right, out_left, out_right, out_left)


def behavior_compose(first: Behavior, second: Behavior) -> Behavior:
    """Behavior of the concatenation (first word, then second word)."""
    bounce_fw = rel_rtc(rel_compose(second.left_to_left, first.right_to_right))
    bounce_bw = rel_rtc(rel_compose(first.right_to_right, second.left_to_left))
    lr = rel_compose(first.left_to_right, rel_compose(bounce_fw, second.left_to_right))
    rl = rel_compose(second.right_to_left, rel_compose(bounce_bw, first.right_to_left))
    rr = rel_union(
        second.right_to_right,
        rel_compose(
            second.right_to_left,
            rel_compose(bounce_bw, rel_compose(first.right_to_right, second.left_to_right)),
        ),
    )
    ll = rel_union(
        first.left_to_left,
        rel_compose(
            first.left_to_right,
            rel_compose(bounce_fw, rel_compose(second.left_to_left, first.right_to_left)),
        ),
    )
    return Behavior(lr, rl, rr, ll)


def behavior_of_word(machine: TwoNfa, word: Sequence[str]) -> Behavior:
    acc = identity_behavior(machine.n_states)
    for sym in word:
        acc = behavior_compose(acc, behavior_of_letter(machine, sym))
    return acc


# ---------------------------------------------------------------------------
# direct simulation


def twonfa_accepts(machine: TwoNfa, word: Sequence[str]) -> bool:
    """Configuration search over (state, position); accept on a final exit."""
    n = len(word)
    finals_mask = mask_of(machine.finals)
    if n == 0:
        return bool(mask_of(machine.initials) & finals_mask)
    seen = set()
    queue = deque((q, 0) for q in machine.initials)
    while queue:
        state, pos = queue.popleft()
        if (state, pos) in seen:
            continue
        seen.add((state, pos))
        if pos == n:
            if (1 << state) & finals_mask:
                return True
            continue
        sym = word[pos]
        if sym not in machine.moves:
            raise UnknownSymbol(f"symbol {sym!r} not in alphabet {machine.alphabet}")
        left, stay, right = machine.moves[sym]
        for nxt in mask_states(right[state]):
            queue.append((nxt, pos + 1))
        for nxt in mask_states(stay[state]):
            queue.append((nxt, pos))
        if pos > 0:
            for nxt in mask_states(left[state]):
                queue.append((nxt, pos - 1))
    return False


# ---------------------------------------------------------------------------
# conversion to a one-way DFA


@dataclass(frozen=True)
class BehaviorDfaState:
    """Converted-DFA state: entry-to-exit and right-bounce relations of the prefix."""

    left_to_right: Rows
    right_to_right: Rows


def twonfa_to_dfa(machine: TwoNfa) -> tuple[Dfa, tuple[BehaviorDfaState, ...]]:
    """Subset-style conversion tracking prefix crossing relations.

    Returns the reachable DFA together with the relation pair decorating each
    of its states, in state order.
    """
    n = machine.n_states
    letter_behavior = {a: behavior_of_letter(machine, a) for a in machine.alphabet}
    init_lr = tuple((1 << q) if q in machine.initials else 0 for q in range(n))
    start = BehaviorDfaState(init_lr, rel_empty(n))
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
                index[new] = len(order)
                order.append(new)
                queue.append(new)
            rows[a].append(index[new])
    finals_mask = mask_of(machine.finals)
    finals = frozenset(
        i
        for i, st in enumerate(order)
        if any(st.left_to_right[q] & finals_mask for q in machine.initials)
    )
    dfa = Dfa(
        machine.alphabet,
        len(order),
        0,
        finals,
        {a: tuple(rows[a]) for a in machine.alphabet},
    )
    return dfa, tuple(order)


def twonfa_definability(
    machine: TwoNfa, cap_states: int = TWONFA_STATE_CAP
) -> algebra.DefinabilityVerdict:
    """Ladder verdict for the language of a two-way NFA.

    Converts to the reachable one-way DFA and applies the pattern criteria;
    the input is capped to keep the conversion tractable.
    """
    if machine.n_states > cap_states:
        raise CapExceeded(
            f"two-way machine has {machine.n_states} states; cap is {cap_states}",
            cap=cap_states,
        )
    dfa, _ = twonfa_to_dfa(machine)
    witnesses: dict[str, object] = {}
    w_fo = algebra.criterion_fo(dfa)
    if w_fo is None:
        return algebra.DefinabilityVerdict(algebra.Verdict.FO_LT, witnesses)
    witnesses["fo"] = w_fo
    w_eq = algebra.criterion_fo_eq(dfa)
    if w_eq is None:
        return algebra.DefinabilityVerdict(algebra.Verdict.FO_LT_EQ, witnesses)
    witnesses["fo_eq"] = w_eq
    w_mod = algebra.criterion_fo_mod(dfa)
    if w_mod is None:
        return algebra.DefinabilityVerdict(algebra.Verdict.FO_LT_MOD, witnesses)
    witnesses["fo_mod"] = w_mod
    return algebra.DefinabilityVerdict(algebra.Verdict.FO_RPR_ONLY, witnesses)
