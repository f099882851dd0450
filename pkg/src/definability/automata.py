"""Finite automata: deterministic and nondeterministic machines over named alphabets.

States are integers ``0..n_states-1``. Deterministic transition tables are stored
per letter as tuples of successor states; nondeterministic tables as tuples of
successor bitmasks. Words are sequences of alphabet symbols (strings).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import AlphabetMismatch, CapExceeded, NotUnary, UnknownSymbol

EPSILON = "eps"

ENUMERATION_LENGTH_CAP = 12


# ---------------------------------------------------------------------------
# machine types


@dataclass(frozen=True)
class Dfa:
    """A total deterministic automaton.

    ``delta[sym][q]`` is the successor of state ``q`` on ``sym``; every letter
    must have a full row of ``n_states`` entries.
    """

    alphabet: tuple[str, ...]
    n_states: int
    initial: int
    finals: frozenset[int]
    delta: dict[str, tuple[int, ...]]

    def __post_init__(self):
        if self.n_states <= 0:
            raise ValueError("a DFA needs at least one state")
        if not 0 <= self.initial < self.n_states:
            raise ValueError(f"initial state {self.initial} out of range")
        if EPSILON in self.alphabet:
            raise ValueError("'eps' is reserved and cannot be a DFA letter")
        if set(self.delta) != set(self.alphabet):
            raise ValueError("transition table must cover exactly the alphabet")
        for sym, row in self.delta.items():
            if len(row) != self.n_states:
                raise ValueError(f"letter {sym!r}: row length {len(row)} != {self.n_states}")
            if any(not 0 <= t < self.n_states for t in row):
                raise ValueError(f"letter {sym!r}: successor out of range")
        for f in self.finals:
            if not 0 <= f < self.n_states:
                raise ValueError(f"final state {f} out of range")

    def step(self, state: int, sym: str) -> int:
        try:
            return self.delta[sym][state]
        except KeyError:
            raise UnknownSymbol(f"symbol {sym!r} not in alphabet {self.alphabet}") from None

    def run_word(self, word: Sequence[str], start: int | None = None) -> int:
        state = self.initial if start is None else start
        for sym in word:
            state = self.step(state, sym)
        return state

    def accepts(self, word: Sequence[str]) -> bool:
        return self.run_word(word) in self.finals


@dataclass(frozen=True)
class Nfa:
    """A nondeterministic automaton, possibly with epsilon moves.

    ``moves[sym][q]`` and ``eps[q]`` are successor bitmasks.
    """

    alphabet: tuple[str, ...]
    n_states: int
    initials: frozenset[int]
    finals: frozenset[int]
    moves: dict[str, tuple[int, ...]]
    eps: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_states <= 0:
            raise ValueError("an NFA needs at least one state")
        if EPSILON in self.alphabet:
            raise ValueError("'eps' is reserved; use the eps field for epsilon moves")
        if set(self.moves) != set(self.alphabet):
            raise ValueError("move table must cover exactly the alphabet")
        rows = list(self.moves.values())
        if self.eps:
            rows.append(self.eps)
        full = (1 << self.n_states) - 1
        for row in rows:
            if len(row) != self.n_states:
                raise ValueError("row length mismatch")
            if any(m & ~full for m in row):
                raise ValueError("successor bitmask out of range")
        for s in self.initials | self.finals:
            if not 0 <= s < self.n_states:
                raise ValueError(f"state {s} out of range")

    def eps_closure(self, mask: int) -> int:
        if not self.eps:
            return mask
        frontier = mask
        while frontier:
            new = 0
            m = frontier
            while m:
                q = (m & -m).bit_length() - 1
                m &= m - 1
                new |= self.eps[q]
            frontier = new & ~mask
            mask |= new
        return mask


@dataclass(frozen=True)
class MinimizationData:
    """Result of DFA minimization.

    ``reachable`` lists the states reachable from the initial state in BFS
    order; ``classes`` partitions them into language-equivalence classes;
    ``class_of`` maps each reachable state to its class index, which is also
    its state number in ``minimal``.
    """

    reachable: tuple[int, ...]
    classes: tuple[frozenset[int], ...]
    class_of: dict[int, int]
    minimal: Dfa


# ---------------------------------------------------------------------------
# construction helpers


def mask_of(states: Iterable[int]) -> int:
    m = 0
    for s in states:
        m |= 1 << s
    return m


def mask_states(mask: int) -> Iterator[int]:
    while mask:
        yield (mask & -mask).bit_length() - 1
        mask &= mask - 1


def dfa_from_function(alphabet, n_states, initial, finals, step) -> Dfa:
    """Build a Dfa from a callable ``step(state, sym) -> state``."""
    delta = {a: tuple(step(q, a) for q in range(n_states)) for a in alphabet}
    return Dfa(tuple(alphabet), n_states, initial, frozenset(finals), delta)


def words_over(alphabet: Sequence[str], max_len: int) -> Iterator[tuple[str, ...]]:
    """All words up to ``max_len`` in shortlex order (alphabet order as given)."""
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


# ---------------------------------------------------------------------------
# operations


def dfa_run(dfa: Dfa, word: Sequence[str]) -> tuple[list[int], bool]:
    """Run ``dfa`` on ``word``; return the visited state sequence and acceptance."""
    states = [dfa.initial]
    for sym in word:
        states.append(dfa.step(states[-1], sym))
    return states, states[-1] in dfa.finals


def nfa_accepts(nfa: Nfa, word: Sequence[str]) -> bool:
    """Subset-simulate ``nfa`` on ``word``."""
    mask = nfa.eps_closure(mask_of(nfa.initials))
    for sym in word:
        if sym not in nfa.moves:
            raise UnknownSymbol(f"symbol {sym!r} not in alphabet {nfa.alphabet}")
        row = nfa.moves[sym]
        new = 0
        for q in mask_states(mask):
            new |= row[q]
        mask = nfa.eps_closure(new)
        if not mask:
            return False
    return bool(mask & mask_of(nfa.finals))


def determinize(nfa: Nfa) -> Dfa:
    """Reachable subset construction. Subset states are numbered in BFS order."""
    start = nfa.eps_closure(mask_of(nfa.initials))
    index = {start: 0}
    order = [start]
    rows: dict[str, list[int]] = {a: [] for a in nfa.alphabet}
    queue = deque([start])
    while queue:
        mask = queue.popleft()
        for a in nfa.alphabet:
            row = nfa.moves[a]
            new = 0
            for q in mask_states(mask):
                new |= row[q]
            new = nfa.eps_closure(new)
            if new not in index:
                index[new] = len(order)
                order.append(new)
                queue.append(new)
            rows[a].append(index[new])
    fmask = mask_of(nfa.finals)
    finals = frozenset(i for i, m in enumerate(order) if m & fmask)
    delta = {a: tuple(rows[a]) for a in nfa.alphabet}
    return Dfa(nfa.alphabet, len(order), 0, finals, delta)


def dfa_reachable(dfa: Dfa) -> tuple[int, ...]:
    """States reachable from the initial state, in BFS order."""
    seen = {dfa.initial}
    order = [dfa.initial]
    queue = deque(order)
    while queue:
        q = queue.popleft()
        for a in dfa.alphabet:
            t = dfa.delta[a][q]
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    return tuple(order)


def minimize(dfa: Dfa) -> MinimizationData:
    """Moore partition refinement on the reachable part of ``dfa``."""
    reachable = dfa_reachable(dfa)
    rset = set(reachable)
    # initial partition: finals vs non-finals (among reachable states)
    block_of = {q: (1 if q in dfa.finals else 0) for q in reachable}
    n_blocks = len(set(block_of.values()))
    while True:
        signature = {
            q: (block_of[q], tuple(block_of[dfa.delta[a][q]] for a in dfa.alphabet))
            for q in reachable
        }
        renum: dict[tuple, int] = {}
        new_block_of = {}
        for q in reachable:
            sig = signature[q]
            if sig not in renum:
                renum[sig] = len(renum)
            new_block_of[q] = renum[sig]
        if len(renum) == n_blocks:
            break
        block_of = new_block_of
        n_blocks = len(renum)

    # canonical class numbering: by first occurrence along the BFS order
    first_seen: dict[int, int] = {}
    for q in reachable:
        first_seen.setdefault(block_of[q], len(first_seen))
    class_of = {q: first_seen[block_of[q]] for q in reachable}
    classes = [set() for _ in range(len(first_seen))]
    for q in reachable:
        classes[class_of[q]].add(q)
    reps = [min(c) for c in classes]
    delta = {
        a: tuple(class_of[dfa.delta[a][reps[i]]] for i in range(len(classes)))
        for a in dfa.alphabet
    }
    minimal = Dfa(
        dfa.alphabet,
        len(classes),
        class_of[dfa.initial],
        frozenset(class_of[q] for q in dfa.finals if q in rset),
        delta,
    )
    return MinimizationData(reachable, tuple(frozenset(c) for c in classes), class_of, minimal)


def product_intersect(left: Dfa, right: Dfa) -> Dfa:
    """Reachable product automaton accepting the intersection language."""
    if set(left.alphabet) != set(right.alphabet):
        raise AlphabetMismatch(
            f"alphabets differ: {sorted(left.alphabet)} vs {sorted(right.alphabet)}"
        )
    alphabet = left.alphabet
    start = (left.initial, right.initial)
    index = {start: 0}
    order = [start]
    rows: dict[str, list[int]] = {a: [] for a in alphabet}
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        for a in alphabet:
            t = (left.delta[a][p], right.delta[a][q])
            if t not in index:
                index[t] = len(order)
                order.append(t)
                queue.append(t)
            rows[a].append(index[t])
    finals = frozenset(
        i for i, (p, q) in enumerate(order) if p in left.finals and q in right.finals
    )
    return Dfa(alphabet, len(order), 0, finals, {a: tuple(rows[a]) for a in alphabet})


def complement(dfa: Dfa) -> Dfa:
    """Complement of a total DFA: flip the final-state set."""
    finals = frozenset(q for q in range(dfa.n_states) if q not in dfa.finals)
    return Dfa(dfa.alphabet, dfa.n_states, dfa.initial, finals, dfa.delta)


def enumerate_language(machine: Dfa | Nfa, max_len: int) -> list[tuple[str, ...]]:
    """Accepted words of length at most ``max_len``, in shortlex order.

    The length is capped to keep the enumeration tractable.
    """
    if max_len > ENUMERATION_LENGTH_CAP:
        raise CapExceeded(
            f"enumeration length {max_len} exceeds cap {ENUMERATION_LENGTH_CAP}",
            cap=ENUMERATION_LENGTH_CAP,
        )
    alphabet = tuple(machine.alphabet)
    accept = machine.accepts if isinstance(machine, Dfa) else (lambda w: nfa_accepts(machine, w))
    return [tuple(w) for w in words_over(alphabet, max_len) if accept(w)]


@dataclass(frozen=True)
class UnaryProfile:
    """Shape of a unary language: finite, cofinite, or neither.

    For ``kind == "finite"`` the ``lengths`` field holds every accepted length;
    for ``kind == "cofinite"`` it holds every rejected length; for
    ``kind == "neither"`` it is None.
    """

    kind: str
    lengths: frozenset[int] | None = None

    @property
    def threshold(self) -> int:
        """First length beyond every exceptional one (0 if none)."""
        if not self.lengths:
            return 0
        return max(self.lengths) + 1


def unary_eventually_constant(machine: Dfa | Nfa) -> UnaryProfile:
    """Classify a unary language as finite, cofinite, or neither.

    Walks the (subset) state sequence s_0, s_1, ... of the single letter until
    it cycles; the language is finite iff the cycle contains no accepting
    state, cofinite iff every cycle state accepts.
    """
    if len(machine.alphabet) != 1:
        raise NotUnary(f"expected a one-letter alphabet, got {machine.alphabet}")
    dfa = machine if isinstance(machine, Dfa) else determinize(machine)
    letter = dfa.alphabet[0]
    row = dfa.delta[letter]
    seen: dict[int, int] = {}
    seq: list[int] = []
    state = dfa.initial
    while state not in seen:
        seen[state] = len(seq)
        seq.append(state)
        state = row[state]
    tail_start = seen[state]  # cycle entry index
    cycle = seq[tail_start:]
    accepting = [q in dfa.finals for q in seq]
    cycle_accepting = accepting[tail_start:]
    if not any(cycle_accepting):
        lengths = frozenset(n for n, ok in enumerate(accepting) if ok)
        return UnaryProfile("finite", lengths)
    if all(cycle_accepting):
        lengths = frozenset(n for n, ok in enumerate(accepting) if not ok)
        return UnaryProfile("cofinite", lengths)
    return UnaryProfile("neither", None)


# ---------------------------------------------------------------------------
# small utilities shared by other modules and tests


def access_words(dfa: Dfa) -> dict[int, tuple[str, ...]]:
    """Shortest word reaching each reachable state (BFS, alphabet order)."""
    words = {dfa.initial: ()}
    queue = deque([dfa.initial])
    while queue:
        q = queue.popleft()
        for a in dfa.alphabet:
            t = dfa.delta[a][q]
            if t not in words:
                words[t] = words[q] + (a,)
                queue.append(t)
    return words


def distinguishing_word(dfa: Dfa, s: int, t: int) -> tuple[str, ...] | None:
    """Shortest word accepted from exactly one of ``s``, ``t`` (None if equivalent)."""
    def fin(q):
        return q in dfa.finals

    if fin(s) != fin(t):
        return ()
    seen = {(s, t)}
    queue = deque([((s, t), ())])
    while queue:
        (p, q), word = queue.popleft()
        for a in dfa.alphabet:
            pair = (dfa.delta[a][p], dfa.delta[a][q])
            if pair in seen:
                continue
            seen.add(pair)
            w = word + (a,)
            if fin(pair[0]) != fin(pair[1]):
                return w
            queue.append((pair, w))
    return None


def dfa_language_equal(left: Dfa, right: Dfa) -> bool:
    """Language equality of two total DFAs over the same alphabet."""
    if set(left.alphabet) != set(right.alphabet):
        raise AlphabetMismatch("cannot compare languages over different alphabets")
    alphabet = left.alphabet
    seen = {(left.initial, right.initial)}
    queue = deque(seen)
    while queue:
        p, q = queue.popleft()
        if (p in left.finals) != (q in right.finals):
            return False
        for a in alphabet:
            pair = (left.delta[a][p], right.delta[a][q])
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return True
