"""Slow reference implementations that pin expected values in the tests.

Everything here favours the most literal algorithm available — plain word
enumeration, breadth-first configuration search, textbook group theory,
two-literal satisfiability by strongly connected components, and a windowed
forward-chaining fixpoint.  None of it shares machinery with the package
beyond reading the public data types, so a test that compares package output
against these functions is a genuine dual-route check.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence

from definability.automata import Dfa
from definability.ltl.syntax import AboxWord, Concept, OmqSpec, Ontology
from definability.twoway import TwoNfa

# ---------------------------------------------------------------------------
# words and one-way machines


def iter_words(alphabet: Sequence[str], max_len: int) -> Iterator[tuple[str, ...]]:
    """All words up to the length bound, shortest first."""
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def run_word(dfa: Dfa, word: Iterable[str]) -> bool:
    state = dfa.initial
    for sym in word:
        state = dfa.delta[sym][state]
    return state in dfa.finals


def language_upto(dfa: Dfa, max_len: int) -> set[tuple[str, ...]]:
    return {w for w in iter_words(dfa.alphabet, max_len) if run_word(dfa, w)}


def same_language_upto(first: Dfa, second: Dfa, max_len: int) -> bool:
    alphabet = sorted(set(first.alphabet) | set(second.alphabet))
    for w in iter_words(alphabet, max_len):
        in_first = all(s in first.alphabet for s in w) and run_word(first, w)
        in_second = all(s in second.alphabet for s in w) and run_word(second, w)
        if in_first != in_second:
            return False
    return True


# ---------------------------------------------------------------------------
# two-way machines: breadth-first configuration search


def crawl_exit_mask(
    n_states: int,
    moves: dict[str, tuple[Sequence[int], Sequence[int], Sequence[int]]],
    initials: Iterable[int],
    word: Sequence[str],
) -> int:
    """Bitmask of states reachable at position ``len(word)`` from the start.

    Configurations are (state, position) pairs with the head between 0 and
    ``len(word)``; the run ends on falling off the right edge and may never
    fall off the left one.
    """
    n = len(word)
    start = [(q, 0) for q in initials]
    if n == 0:
        mask = 0
        for q, _ in start:
            mask |= 1 << q
        return mask
    seen = set(start)
    stack = list(start)
    exit_mask = 0
    while stack:
        state, pos = stack.pop()
        if pos == n:
            exit_mask |= 1 << state
            continue
        left, stay, right = moves[word[pos]]
        for nxt in range(n_states):
            if right[state] >> nxt & 1 and (nxt, pos + 1) not in seen:
                seen.add((nxt, pos + 1))
                stack.append((nxt, pos + 1))
            if stay[state] >> nxt & 1 and (nxt, pos) not in seen:
                seen.add((nxt, pos))
                stack.append((nxt, pos))
            if pos > 0 and left[state] >> nxt & 1 and (nxt, pos - 1) not in seen:
                seen.add((nxt, pos - 1))
                stack.append((nxt, pos - 1))
    return exit_mask


def crawl_accepts(machine: TwoNfa, word: Sequence[str]) -> bool:
    mask = crawl_exit_mask(machine.n_states, machine.moves, machine.initials, word)
    return any(mask >> q & 1 for q in machine.finals)


# ---------------------------------------------------------------------------
# transformation monoids, by breadth-first word closure


def compose_maps(first: tuple[int, ...], second: tuple[int, ...]) -> tuple[int, ...]:
    """State map of the concatenation: apply ``first``, then ``second``."""
    return tuple(second[x] for x in first)


def monoid_with_witnesses(dfa: Dfa) -> dict[tuple[int, ...], tuple[str, ...]]:
    """Every distinct state map of a word, with a shortest witness word."""
    identity = tuple(range(dfa.n_states))
    generators = {sym: tuple(dfa.delta[sym]) for sym in dfa.alphabet}
    found: dict[tuple[int, ...], tuple[str, ...]] = {identity: ()}
    frontier = [identity]
    while frontier:
        nxt = []
        for f in frontier:
            for sym, g in generators.items():
                h = compose_maps(f, g)
                if h not in found:
                    found[h] = found[f] + (sym,)
                    nxt.append(h)
        frontier = nxt
    return found


def power_orbit(f: tuple[int, ...]) -> tuple[int, list[tuple[int, ...]]]:
    """Powers of a map: (tail length, the cycle the powers settle into).

    The first power considered is f itself (exponent 1).
    """
    seen: dict[tuple[int, ...], int] = {}
    chain: list[tuple[int, ...]] = []
    cur = f
    while cur not in seen:
        seen[cur] = len(chain)
        chain.append(cur)
        cur = compose_maps(cur, f)
    start = seen[cur]
    return start, chain[start:]


def set_has_nontrivial_group(maps: Iterable[tuple[int, ...]]) -> bool:
    """Whether the set contains a subset forming a group of size > 1.

    A nontrivial group inside the set yields an element whose power cycle has
    length > 1 and stays inside the set, and conversely such a power cycle is
    itself a cyclic group.
    """
    pool = set(maps)
    for f in pool:
        _, cycle = power_orbit(f)
        if len(cycle) > 1 and all(g in pool for g in cycle):
            return True
    return False


def aperiodic_brute(dfa: Dfa) -> bool:
    return not set_has_nontrivial_group(monoid_with_witnesses(dfa))


def length_image_orbit(dfa: Dfa) -> tuple[list[frozenset[tuple[int, ...]]], int]:
    """Sets of state maps of words of each length, until the sequence repeats.

    Returns (distinct sets in order of first appearance, index where the
    orbit re-enters the list) — so entries from that index onward repeat
    forever.
    """
    generators = [tuple(dfa.delta[sym]) for sym in dfa.alphabet]
    current = frozenset([tuple(range(dfa.n_states))])
    seen: dict[frozenset[tuple[int, ...]], int] = {}
    order: list[frozenset[tuple[int, ...]]] = []
    while current not in seen:
        seen[current] = len(order)
        order.append(current)
        current = frozenset(compose_maps(f, g) for f in current for g in generators)
    return order, seen[current]


def quasi_aperiodic_brute(dfa: Dfa) -> bool:
    """No equal-length image set may contain a nontrivial group."""
    order, _ = length_image_orbit(dfa)
    return not any(set_has_nontrivial_group(s) for s in order)


# ---------------------------------------------------------------------------
# finite groups presented as sets of maps under composition


def close_under_product(
    generators: Iterable[tuple[int, ...]],
) -> frozenset[tuple[int, ...]]:
    done: set[tuple[int, ...]] = set()
    todo = list(dict.fromkeys(generators))
    pool = set(todo)
    while todo:
        f = todo.pop()
        done.add(f)
        for g in list(pool):
            for h in (compose_maps(f, g), compose_maps(g, f)):
                if h not in pool:
                    pool.add(h)
                    todo.append(h)
    return frozenset(pool)


def group_units_at(
    e: tuple[int, ...], monoid_elements: Iterable[tuple[int, ...]]
) -> frozenset[tuple[int, ...]]:
    """The largest group with identity ``e`` inside a monoid element set.

    ``e`` must be idempotent; the group is the set of invertible elements of
    the local monoid e·M·e.
    """
    if compose_maps(e, e) != e:
        raise ValueError("group_units_at needs an idempotent")
    elems = set(monoid_elements)
    local = {compose_maps(compose_maps(e, x), e) for x in elems}
    units = set()
    for x in local:
        if any(
            compose_maps(x, y) == e and compose_maps(y, x) == e for y in local
        ):
            units.add(x)
    return frozenset(units)


def group_identity(group: Iterable[tuple[int, ...]]) -> tuple[int, ...]:
    members = set(group)
    for e in members:
        if all(
            compose_maps(e, g) == g and compose_maps(g, e) == g for g in members
        ):
            return e
    raise ValueError("not a group: no identity element")


def element_order(x: tuple[int, ...], identity: tuple[int, ...]) -> int:
    power = x
    order = 1
    while power != identity:
        power = compose_maps(power, x)
        order += 1
        if order > len(x) ** len(x):
            raise ValueError("element order did not close; not in a group")
    return order


def solvable_brute(group: Iterable[tuple[int, ...]]) -> bool:
    """Derived series: keep taking commutator subgroups until they stabilize."""
    current = frozenset(group)
    identity = group_identity(current)
    inverse = {}
    for x in current:
        for y in current:
            if compose_maps(x, y) == identity and compose_maps(y, x) == identity:
                inverse[x] = y
                break
        else:
            raise ValueError("not a group: missing inverse")
    while len(current) > 1:
        commutators = {
            compose_maps(
                compose_maps(inverse[x], inverse[y]), compose_maps(x, y)
            )
            for x in current
            for y in current
        }
        derived = close_under_product(commutators | {identity})
        if derived == current:
            return False
        current = derived
    return True


# ---------------------------------------------------------------------------
# marker-delimited language expansion, by direct splitting


def expanded_member(
    dfa: Dfa,
    gamma: Sequence[str],
    word: Sequence[str],
    start: str = "x",
    end: str = "y",
) -> bool:
    """Membership in {w1 · x · w · y · w2 | w accepted, w1, w2 over gamma}."""
    gamma_set = set(gamma)
    for i, a in enumerate(word):
        if a != start or any(s not in gamma_set for s in word[:i]):
            continue
        for j in range(i + 1, len(word)):
            if word[j] != end:
                continue
            middle = word[i + 1 : j]
            if any(s not in dfa.alphabet for s in middle):
                continue
            if any(s not in gamma_set for s in word[j + 1 :]):
                continue
            if run_word(dfa, middle):
                return True
    return False


# ---------------------------------------------------------------------------
# two-literal temporal reasoning: windowed satisfiability by SCC

Literal = tuple[bool, str, int]


def _chain_literal(concept: Concept, negate: bool) -> Literal:
    offset = 0
    cur = concept
    while cur.kind in ("next_f", "next_p"):
        offset += 1 if cur.kind == "next_f" else -1
        cur = cur.child
    if cur.kind != "atom":
        raise ValueError(f"not a step-chain over an atom: {concept}")
    return (not negate, cur.name, offset)


def krom_clauses(ontology: Ontology) -> list[tuple[Literal, ...]]:
    """Each axiom as a disjunctive clause of signed shifted atoms."""
    clauses = []
    for ax in ontology.axioms:
        lits = [_chain_literal(c, negate=True) for c in ax.lhs]
        lits += [_chain_literal(c, negate=False) for c in ax.rhs]
        if len(lits) > 2:
            raise ValueError(f"clause has more than two literals: {ax}")
        clauses.append(tuple(lits))
    return clauses


def krom_satisfiable(
    clauses: Sequence[tuple[Literal, ...]],
    units: Iterable[Literal],
    lo: int,
    hi: int,
) -> bool:
    """Two-literal satisfiability over timestamps lo..hi, by implication SCC.

    Clause templates are instantiated at every base timestamp whose shifted
    literal positions all stay inside the window; instances that poke outside
    are dropped, which matches restricting a model of the axioms to the
    window.
    """
    grounded: list[tuple[tuple[bool, str, int], ...]] = []
    for clause in clauses:
        if not clause:
            return False  # an unconditional contradiction
        for t in range(lo, hi + 1):
            ground = tuple((sign, name, t + off) for sign, name, off in clause)
            if all(lo <= pos <= hi for _, _, pos in ground):
                grounded.append(ground)
    for sign, name, pos in units:
        if not lo <= pos <= hi:
            raise ValueError(f"unit {name}@{pos} outside the window")
        grounded.append(((sign, name, pos),))

    index: dict[tuple[bool, str, int], int] = {}

    def node(lit: tuple[bool, str, int]) -> int:
        if lit not in index:
            index[lit] = len(index)
        return index[lit]

    edges: list[tuple[int, int]] = []
    for ground in grounded:
        if len(ground) == 1:
            (lit,) = ground
            neg = (not lit[0], lit[1], lit[2])
            edges.append((node(neg), node(lit)))
        else:
            a, b = ground
            not_a = (not a[0], a[1], a[2])
            not_b = (not b[0], b[1], b[2])
            edges.append((node(not_a), node(b)))
            edges.append((node(not_b), node(a)))

    n = len(index)
    fwd: list[list[int]] = [[] for _ in range(n)]
    rev: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        fwd[u].append(v)
        rev[v].append(u)

    # Kosaraju with explicit stacks
    visited = [False] * n
    order: list[int] = []
    for root in range(n):
        if visited[root]:
            continue
        stack: list[tuple[int, int]] = [(root, 0)]
        visited[root] = True
        while stack:
            v, i = stack.pop()
            if i < len(fwd[v]):
                stack.append((v, i + 1))
                w = fwd[v][i]
                if not visited[w]:
                    visited[w] = True
                    stack.append((w, 0))
            else:
                order.append(v)
    comp = [-1] * n
    label = 0
    for root in reversed(order):
        if comp[root] != -1:
            continue
        stack2 = [root]
        comp[root] = label
        while stack2:
            v = stack2.pop()
            for w in rev[v]:
                if comp[w] == -1:
                    comp[w] = label
                    stack2.append(w)
        label += 1

    for lit, i in index.items():
        neg = (not lit[0], lit[1], lit[2])
        j = index.get(neg)
        if j is not None and comp[i] == comp[j]:
            return False
    return True


def krom_radius(n_atoms: int) -> int:
    """A window radius comfortably past any useful derivation excursion."""
    return 3 * (2 * (2 * max(1, n_atoms)) ** 2 + 2)


def krom_entails(
    ontology: Ontology,
    premise: tuple[bool, str],
    conclusion: tuple[bool, str],
    offset: int,
    radius: int | None = None,
) -> bool:
    """Whether the axioms force ``conclusion`` at ``offset`` given ``premise`` at 0."""
    names = sorted(
        {premise[1], conclusion[1]}
        | {name for cl in krom_clauses(ontology) for _, name, _ in cl}
    )
    if radius is None:
        radius = krom_radius(len(names)) + abs(offset)
    units = [
        (premise[0], premise[1], 0),
        (not conclusion[0], conclusion[1], offset),
    ]
    return not krom_satisfiable(krom_clauses(ontology), units, -radius, radius)


def krom_certain(
    spec: OmqSpec, abox: AboxWord, radius: int | None = None
) -> bool | frozenset[int]:
    """Certain answer for a two-literal ontology with an atomic query."""
    if spec.query.kind != "atom":
        raise ValueError("the two-literal oracle only takes atomic queries")
    query = spec.query.name
    clauses = krom_clauses(spec.ontology)
    names = sorted(
        {query}
        | set(spec.signature)
        | {name for cl in clauses for _, name, _ in cl}
    )
    if radius is None:
        radius = krom_radius(len(names))
    positions = [abox.origin + i for i in range(len(abox))]
    lo = (positions[0] if positions else 0) - radius
    hi = (positions[-1] if positions else 0) + radius
    data_units = [(True, name, pos) for name, pos in abox.assertions()]
    if spec.mode == "boolean":
        refute = [(False, query, t) for t in range(lo, hi + 1)]
        return not krom_satisfiable(clauses, data_units + refute, lo, hi)
    answers = {
        k
        for k in positions
        if not krom_satisfiable(clauses, data_units + [(False, query, k)], lo, hi)
    }
    return frozenset(answers)


# ---------------------------------------------------------------------------
# windowed forward chaining for step-chain Horn axioms


def horn_chase_facts(
    ontology: Ontology,
    facts: Iterable[tuple[str, int]],
    lo: int,
    hi: int,
) -> set[tuple[str, int]] | None:
    """Fixpoint of the axioms over a clamped window; None means inconsistent.

    Bodies and heads must be conjunctions of step-chain atoms (a head may be
    empty, standing for falsum). Body positions outside the window fail the
    body; head positions outside the window are dropped.
    """
    rules = []
    for ax in ontology.axioms:
        body = [_chain_literal(c, negate=False)[1:] for c in ax.lhs]
        if len(ax.rhs) > 1:
            raise ValueError(f"not a single-head axiom: {ax}")
        head = _chain_literal(ax.rhs[0], negate=False)[1:] if ax.rhs else None
        rules.append((body, head))
    known = set(facts)
    changed = True
    while changed:
        changed = False
        for body, head in rules:
            for t in range(lo, hi + 1):
                if any(
                    not (lo <= t + off <= hi) or (name, t + off) not in known
                    for name, off in body
                ):
                    continue
                if head is None:
                    return None
                name, off = head
                fact = (name, t + off)
                if lo <= t + off <= hi and fact not in known:
                    known.add(fact)
                    changed = True
    return known


def positive_eval(
    concept: Concept,
    facts: set[tuple[str, int]],
    pos: int,
    lo: int,
    hi: int,
) -> bool:
    if concept.kind == "atom":
        return (concept.name, pos) in facts
    if concept.kind == "and":
        return all(positive_eval(c, facts, pos, lo, hi) for c in concept.children)
    if concept.kind == "or":
        return any(positive_eval(c, facts, pos, lo, hi) for c in concept.children)
    if concept.kind == "next_f":
        return pos + 1 <= hi and positive_eval(concept.child, facts, pos + 1, lo, hi)
    if concept.kind == "next_p":
        return pos - 1 >= lo and positive_eval(concept.child, facts, pos - 1, lo, hi)
    if concept.kind == "dia_f":
        return any(
            positive_eval(concept.child, facts, p, lo, hi) for p in range(pos + 1, hi + 1)
        )
    if concept.kind == "dia_p":
        return any(
            positive_eval(concept.child, facts, p, lo, hi) for p in range(lo, pos)
        )
    raise ValueError(f"not a positive temporal concept: {concept}")


def horn_certain(
    spec: OmqSpec, abox: AboxWord, pad: int | None = None
) -> bool | frozenset[int]:
    """Certain answer by windowed chasing, for step-chain Horn ontologies."""
    atoms = {name for name, _ in abox.assertions()} | set(spec.signature)
    atoms |= spec.query.atoms()
    for ax in spec.ontology.axioms:
        for c in ax.lhs + ax.rhs:
            atoms |= c.atoms()
    if pad is None:
        pad = 3 * 2 ** min(len(atoms), 8) + 10
    positions = [abox.origin + i for i in range(len(abox))]
    lo = (positions[0] if positions else 0) - pad
    hi = (positions[-1] if positions else 0) + pad
    known = horn_chase_facts(spec.ontology, abox.assertions(), lo, hi)
    if known is None:  # inconsistent data entails everything
        return True if spec.mode == "boolean" else frozenset(positions)
    if spec.mode == "boolean":
        return any(positive_eval(spec.query, known, t, lo, hi) for t in range(lo, hi + 1))
    return frozenset(
        k for k in positions if positive_eval(spec.query, known, k, lo, hi)
    )


# ---------------------------------------------------------------------------
# structured enumeration of small machines


def iter_canonical_dfa_tables(n_states: int, letters: Sequence[str]) -> Iterator[dict[str, tuple[int, ...]]]:
    """All reachable transition tables with states numbered in discovery order.

    State 0 is the start state; scanning states in numeric order and letters
    in the given order must discover each new state in numeric sequence.
    Every reachable machine is isomorphic to exactly one table produced here.
    """
    k = len(letters)
    for flat in itertools.product(range(n_states), repeat=n_states * k):
        next_fresh = 1
        ok = True
        for i, target in enumerate(flat):
            if target > next_fresh:
                ok = False
                break
            src = i // k
            if src >= next_fresh:
                ok = False  # a state was never discovered before use
                break
            if target == next_fresh:
                next_fresh += 1
        if ok and next_fresh == n_states:
            yield {
                sym: tuple(flat[s * k + j] for s in range(n_states))
                for j, sym in enumerate(letters)
            }


def iter_two_nfa_tables(
    n_states: int, letters: Sequence[str], max_transitions: int
) -> Iterator[dict[str, tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]]]:
    """All move tables with at most the given number of transitions."""
    slots = [
        (sym, d, src, dst)
        for sym in letters
        for d in range(3)
        for src in range(n_states)
        for dst in range(n_states)
    ]
    for count in range(max_transitions + 1):
        for chosen in itertools.combinations(slots, count):
            moves: dict[str, list[list[int]]] = {
                sym: [[0] * n_states for _ in range(3)] for sym in letters
            }
            for sym, d, src, dst in chosen:
                moves[sym][d][src] |= 1 << dst
            yield {
                sym: (tuple(rows[0]), tuple(rows[1]), tuple(rows[2]))
                for sym, rows in moves.items()
            }


# ---------------------------------------------------------------------------
# letterwise-superset closure membership


def superword_of_some(
    word: Sequence[frozenset[str]], base: set[tuple[frozenset[str], ...]]
) -> bool:
    """Whether some equal-length base word is letterwise contained in ``word``."""
    return any(
        len(u) == len(word) and all(a <= b for a, b in zip(u, word)) for u in base
    )
