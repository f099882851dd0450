"""Transition monoids, syntactic invariants, and the definability ladder.

The ladder has four rungs, from most to least restrictive first-order target:
plain order, order with fixed-modulus congruences, order with all modular
quantifiers, and the relational-primitive-recursion fallback. A regular
language's rung is decided from its syntactic monoid: aperiodicity, then
quasi-aperiodicity of the length-image sequence, then solvability of all
maximal subgroups.

Separate pattern-based criteria (`criterion_fo`, `criterion_fo_eq`,
`criterion_fo_mod`) certify *non*-membership at each rung with concrete word
witnesses on a given DFA; they agree with the monoid route and are the basis
for the query-rewritability witnesses elsewhere in the package.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .automata import Dfa, dfa_reachable, minimize
from .errors import AlphabetViolation, BadPrime, CapExceeded

MONOID_CAP = 20000
SOLVABLE_WORK_CAP = 10000
IMAGE_SEQUENCE_CAP = 20000


class Verdict(Enum):
    """Lowest first-order rung a regular language is definable in."""

    FO_LT = "FO_LT"
    FO_LT_EQ = "FO_LT_EQ"
    FO_LT_MOD = "FO_LT_MOD"
    FO_RPR_ONLY = "FO_RPR_ONLY"


# ---------------------------------------------------------------------------
# transition monoid


@dataclass(frozen=True)
class TransformationElement:
    """A state transformation together with a shortest word inducing it."""

    map: tuple[int, ...]
    witness: tuple[str, ...]


@dataclass(frozen=True)
class TransitionMonoid:
    """The monoid of word-induced state transformations of a DFA.

    Elements are numbered; element 0 is always the identity. ``witness`` words
    are shortest (breadth-first over the alphabet in its given order).
    """

    elements: tuple[TransformationElement, ...]
    identity: int
    generators: dict[str, int]
    n_states: int
    _index: dict[tuple[int, ...], int] = field(repr=False, default_factory=dict)
    _prod: dict[tuple[int, int], int] = field(repr=False, default_factory=dict)

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, mapping: tuple[int, ...]) -> int:
        return self._index[mapping]

    def product(self, i: int, j: int) -> int:
        """Index of 'apply element i, then element j'."""
        key = (i, j)
        got = self._prod.get(key)
        if got is None:
            mi = self.elements[i].map
            mj = self.elements[j].map
            got = self._index[tuple(mj[s] for s in mi)]
            self._prod[key] = got
        return got

    def power(self, i: int, n: int) -> int:
        acc = self.identity
        for _ in range(n):
            acc = self.product(acc, i)
        return acc

    def power_cycle(self, i: int) -> tuple[int, int]:
        """(preperiod, period) of the power sequence x, x^2, x^3, ... of element i."""
        seen: dict[int, int] = {}
        x = i
        step = 1
        while x not in seen:
            seen[x] = step
            x = self.product(x, i)
            step += 1
        start = seen[x]
        return start - 1, step - start


def transition_monoid(dfa: Dfa, cap: int = MONOID_CAP) -> TransitionMonoid:
    """Generate the transition monoid of ``dfa`` by breadth-first closure."""
    ident = tuple(range(dfa.n_states))
    elements = [TransformationElement(ident, ())]
    index = {ident: 0}
    generators: dict[str, int] = {}
    queue = deque([0])
    gen_maps = {a: dfa.delta[a] for a in dfa.alphabet}
    while queue:
        i = queue.popleft()
        base = elements[i].map
        for a in dfa.alphabet:
            row = gen_maps[a]
            new_map = tuple(row[s] for s in base)
            if new_map not in index:
                if len(elements) >= cap:
                    raise CapExceeded(f"transition monoid exceeds {cap} elements", cap=cap)
                index[new_map] = len(elements)
                elements.append(TransformationElement(new_map, elements[i].witness + (a,)))
                queue.append(index[new_map])
            if i == 0:
                generators[a] = index[new_map]
    return TransitionMonoid(tuple(elements), 0, generators, dfa.n_states, index)


# ---------------------------------------------------------------------------
# syntactic invariants


@dataclass(frozen=True)
class SyntacticData:
    """Minimal automaton, its transition monoid, and the length-image sequence.

    ``image_prefix`` and ``image_cycle`` split the eventually periodic sequence
    S_1, S_2, ... of sets of monoid elements induced by words of each length;
    the sets in ``image_cycle`` are the ones that recur forever.
    """

    minimal: Dfa
    monoid: TransitionMonoid
    image_prefix: tuple[frozenset[int], ...]
    image_cycle: tuple[frozenset[int], ...]


def syntactic_data(dfa: Dfa, cap: int = MONOID_CAP) -> SyntacticData:
    mindfa = minimize(dfa).minimal
    monoid = transition_monoid(mindfa, cap=cap)
    gens = frozenset(monoid.generators[a] for a in mindfa.alphabet)
    seq: list[frozenset[int]] = []
    seen: dict[frozenset[int], int] = {}
    current = gens
    while current not in seen:
        if len(seq) >= IMAGE_SEQUENCE_CAP:
            raise CapExceeded("length-image sequence exceeded cap", cap=IMAGE_SEQUENCE_CAP)
        seen[current] = len(seq)
        seq.append(current)
        current = frozenset(monoid.product(m, g) for m in current for g in gens)
    start = seen[current]
    return SyntacticData(mindfa, monoid, tuple(seq[:start]), tuple(seq[start:]))


def contains_nontrivial_group(monoid: TransitionMonoid, subset: Iterable[int]) -> bool:
    """Does ``subset`` contain a nontrivial group?

    True iff some member has all its positive powers inside the subset and a
    power cycle of length at least two.
    """
    members = frozenset(subset)
    for s in members:
        pre, period = monoid.power_cycle(s)
        if period < 2:
            continue
        powers_ok = True
        x = s
        for _ in range(pre + period):
            if x not in members:
                powers_ok = False
                break
            x = monoid.product(x, s)
        if powers_ok:
            return True
    return False


def is_aperiodic(monoid: TransitionMonoid) -> bool:
    """True iff every element's power sequence reaches a fixed point."""
    return all(monoid.power_cycle(i)[1] == 1 for i in range(len(monoid)))


def is_quasi_aperiodic(data: SyntacticData) -> bool:
    """True iff no recurring length-image set contains a nontrivial group."""
    return not any(contains_nontrivial_group(data.monoid, s) for s in data.image_cycle)


# ---------------------------------------------------------------------------
# maximal subgroups and solvability


@dataclass(frozen=True)
class GroupSubset:
    """A group sitting inside a transition monoid.

    ``orders[x]`` is the least r >= 1 with x^r equal to the identity element
    of the group (which need not be the monoid identity).
    """

    members: frozenset[int]
    identity_elem: int
    inverse: dict[int, int]
    orders: dict[int, int]


def maximal_subgroups(monoid: TransitionMonoid) -> tuple[GroupSubset, ...]:
    """The maximal subgroups of the monoid, one per relevant idempotent.

    An element belongs to the group of idempotent ``e`` exactly when it lies
    on its own power cycle and that cycle's idempotent is ``e``.
    """
    buckets: dict[int, set[int]] = {}
    for z in range(len(monoid)):
        pre, period = monoid.power_cycle(z)
        if pre != 0:
            continue  # z never returns to itself
        # idempotent of the cycle: the power of z at the multiple of the period
        e = monoid.power(z, period)
        buckets.setdefault(e, set()).add(z)
    groups = []
    for e, members in sorted(buckets.items()):
        orders = {}
        inverse = {}
        for x in members:
            r = 1
            acc = x
            while acc != e:
                acc = monoid.product(acc, x)
                r += 1
            orders[x] = r
            inverse[x] = monoid.power(x, r - 1) if r > 1 else e
        groups.append(GroupSubset(frozenset(members), e, inverse, orders))
    return tuple(groups)


def _closure(monoid: TransitionMonoid, gens: set[int], seed: int, budget: list[int]) -> frozenset[int]:
    out = {seed}
    queue = deque(out)
    while queue:
        x = queue.popleft()
        for g in gens:
            budget[0] -= 1
            if budget[0] < 0:
                raise CapExceeded("solvability check exceeded work cap", cap=SOLVABLE_WORK_CAP)
            y = monoid.product(x, g)
            if y not in out:
                out.add(y)
                queue.append(y)
    return frozenset(out)


def is_solvable(monoid: TransitionMonoid, group: GroupSubset, cap: int = SOLVABLE_WORK_CAP) -> bool:
    """Solvability of a subgroup, by iterating commutator subgroups.

    Each derived step closes the set of commutators a' b' a b under products;
    the series must reach the trivial group, and stalling means unsolvable.
    """
    budget = [cap]
    current = group.members
    inv = dict(group.inverse)
    e = group.identity_elem

    def inverse_of(x: int) -> int:
        got = inv.get(x)
        if got is None:
            r = 1
            acc = x
            while acc != e:
                acc = monoid.product(acc, x)
                r += 1
            got = monoid.power(x, r - 1) if r > 1 else e
            inv[x] = got
        return got

    while len(current) > 1:
        commutators = set()
        for a in current:
            ia = inverse_of(a)
            for b in current:
                budget[0] -= 1
                if budget[0] < 0:
                    raise CapExceeded("solvability check exceeded work cap", cap=cap)
                c = monoid.product(monoid.product(ia, inverse_of(b)), monoid.product(a, b))
                commutators.add(c)
        derived = _closure(monoid, commutators, e, budget)
        if derived == current:
            return False
        current = derived
    return True


# ---------------------------------------------------------------------------
# the ladder verdict


@dataclass(frozen=True)
class DefinabilityVerdict:
    """Lowest rung plus the obstructions found on the way there."""

    lowest_class: Verdict
    witnesses: dict[str, object]


def definability_verdict(dfa: Dfa, cap: int = MONOID_CAP) -> DefinabilityVerdict:
    """Classify L(dfa) on the definability ladder via its syntactic monoid."""
    data = syntactic_data(dfa, cap=cap)
    monoid = data.monoid
    witnesses: dict[str, object] = {}

    periodic = None
    for i in range(len(monoid)):
        if monoid.power_cycle(i)[1] >= 2:
            periodic = i
            break
    if periodic is None:
        return DefinabilityVerdict(Verdict.FO_LT, witnesses)
    witnesses["non_aperiodic_element"] = monoid.elements[periodic].witness

    if is_quasi_aperiodic(data):
        return DefinabilityVerdict(Verdict.FO_LT_EQ, witnesses)
    for s in data.image_cycle:
        if contains_nontrivial_group(monoid, s):
            member = min(
                (x for x in s if monoid.power_cycle(x)[1] >= 2),
                key=lambda x: monoid.elements[x].witness,
            )
            witnesses["recurring_group_element"] = monoid.elements[member].witness
            break

    groups = maximal_subgroups(monoid)
    for g in groups:
        if not is_solvable(monoid, g):
            witnesses["unsolvable_group_identity"] = monoid.elements[g.identity_elem].witness
            return DefinabilityVerdict(Verdict.FO_RPR_ONLY, witnesses)
    return DefinabilityVerdict(Verdict.FO_LT_MOD, witnesses)


# ---------------------------------------------------------------------------
# pattern criteria with word witnesses


@dataclass(frozen=True)
class FoWitness:
    """A cycle pattern showing the language is not definable with order alone."""

    u: tuple[str, ...]
    state: int
    k: int


@dataclass(frozen=True)
class FoEqWitness:
    """A synchronized pair pattern ruling out order plus congruences."""

    u: tuple[str, ...]
    v: tuple[str, ...]
    state: int
    k: int


@dataclass(frozen=True)
class FoModWitness:
    """A two-generator pattern ruling out all modular quantifiers."""

    u: tuple[str, ...]
    v: tuple[str, ...]
    state: int
    k: int
    l: int


def _reachable_classes(dfa: Dfa) -> tuple[tuple[int, ...], dict[int, int]]:
    data = minimize(dfa)
    return data.reachable, data.class_of


def criterion_fo(dfa: Dfa, cap: int = MONOID_CAP) -> Optional[FoWitness]:
    """Find u, q, k with q inequivalent to its u-image yet on a u^k cycle.

    Returns None iff no such pattern exists, i.e. the language needs no
    counting at all.
    """
    monoid = transition_monoid(dfa, cap=cap)
    reachable, class_of = _reachable_classes(dfa)
    for i in range(1, len(monoid)):
        mapping = monoid.elements[i].map
        for q in reachable:
            if class_of[mapping[q]] == class_of[q]:
                continue
            # walk the literal orbit of q; a return within |Q| steps closes a cycle
            cur = mapping[q]
            k = 1
            while cur != q and k <= dfa.n_states:
                cur = mapping[cur]
                k += 1
            if cur == q:
                return FoWitness(monoid.elements[i].witness, q, k)
    return None


class _LayeredWords:
    """Length-synchronized word recovery for image-set levels."""

    def __init__(self, monoid: TransitionMonoid, alphabet: tuple[str, ...]):
        self.monoid = monoid
        self.alphabet = alphabet
        first = {monoid.generators[a]: (None, a) for a in alphabet}
        self.parents: list[dict[int, tuple[int | None, str]]] = [first]

    def level(self, t: int) -> frozenset[int]:
        while len(self.parents) < t:
            prev = self.parents[-1]
            nxt: dict[int, tuple[int | None, str]] = {}
            for m in prev:
                for a in self.alphabet:
                    g = self.monoid.generators[a]
                    nm = self.monoid.product(m, g)
                    if nm not in nxt:
                        nxt[nm] = (m, a)
            self.parents.append(nxt)
        return frozenset(self.parents[t - 1])

    def word(self, t: int, element: int) -> tuple[str, ...]:
        out: list[str] = []
        cur = element
        for lvl in range(t - 1, -1, -1):
            prev, letter = self.parents[lvl][cur]
            out.append(letter)
            cur = prev  # type: ignore[assignment]
        return tuple(reversed(out))


def criterion_fo_eq(dfa: Dfa, cap: int = MONOID_CAP) -> Optional[FoEqWitness]:
    """Find equal-length u, v where v freezes every state of a violating u-cycle.

    Levels t = 1, 2, ... of same-length word images are scanned until the
    image set repeats; within a level, u must admit the plain cycle pattern
    and v must fix each cycle state literally.
    """
    monoid = transition_monoid(dfa, cap=cap)
    reachable, class_of = _reachable_classes(dfa)
    fix_mask = [0] * len(monoid)
    for i, el in enumerate(monoid.elements):
        m = 0
        for s, t in enumerate(el.map):
            if s == t:
                m |= 1 << s
        fix_mask[i] = m

    layers = _LayeredWords(monoid, dfa.alphabet)
    seen: set[frozenset[int]] = set()
    t = 1
    while True:
        if t > IMAGE_SEQUENCE_CAP:
            raise CapExceeded("synchronized search exceeded level cap", cap=IMAGE_SEQUENCE_CAP)
        level = layers.level(t)
        if level in seen:
            return None
        seen.add(level)
        members = sorted(level)
        for mu in members:
            mapping = monoid.elements[mu].map
            for q in reachable:
                if class_of[mapping[q]] == class_of[q]:
                    continue
                cycle_mask = 1 << q
                cur = mapping[q]
                k = 1
                while cur != q and k <= dfa.n_states:
                    cycle_mask |= 1 << cur
                    cur = mapping[cur]
                    k += 1
                if cur != q:
                    continue
                for mv in members:
                    if cycle_mask & ~fix_mask[mv]:
                        continue
                    return FoEqWitness(layers.word(t, mu), layers.word(t, mv), q, k)
        t += 1


def _induced_class_map(mapping: tuple[int, ...], reps: list[int], class_of: dict[int, int]) -> tuple[int, ...]:
    return tuple(class_of[mapping[r]] for r in reps)


def _is_odd_prime(n: int) -> bool:
    if n < 3 or n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def criterion_fo_mod(dfa: Dfa, cap: int = MONOID_CAP) -> Optional[FoModWitness]:
    """Find the two-generator pattern with an odd-prime cycle and a coprime twist.

    Works on the induced maps over state-equivalence classes: u must be an
    involution moving the base class, v must drive it around an odd-prime
    cycle of length k, their composite must also move it, and on the whole
    two-generator orbit u squares to the identity, v has order k, and the
    composite has odd order l > 1 coprime to k. Both k and l are bounded by
    the given automaton's state count.
    """
    n = dfa.n_states
    monoid = transition_monoid(dfa, cap=cap)
    reachable, class_of = _reachable_classes(dfa)
    n_classes = len(set(class_of.values()))
    reps = [-1] * n_classes
    for q in reachable:
        c = class_of[q]
        if reps[c] == -1 or q < reps[c]:
            reps[c] = q

    # dedupe elements by their induced class map, keeping the shortest word
    by_cmap: dict[tuple[int, ...], int] = {}
    for i in range(len(monoid)):
        cmap = _induced_class_map(monoid.elements[i].map, reps, class_of)
        by_cmap.setdefault(cmap, i)
    cmaps = list(by_cmap.items())

    for c in range(n_classes):
        u_candidates = [
            (cm, i) for cm, i in cmaps if cm[c] != c and cm[cm[c]] == c
        ]
        if not u_candidates:
            continue
        v_candidates = []
        for cm, i in cmaps:
            cur = cm[c]
            k = 1
            while cur != c and k <= n:
                cur = cm[cur]
                k += 1
            if cur == c and _is_odd_prime(k) and k <= n:
                v_candidates.append((cm, i, k))
        for vmap, vi, k in v_candidates:
            for umap, ui in u_candidates:
                wmap = tuple(vmap[umap[d]] for d in range(n_classes))
                if wmap[c] == c:
                    continue
                # orbit of c under both generators
                orbit = {c}
                queue = deque([c])
                while queue:
                    d = queue.popleft()
                    for nd in (umap[d], vmap[d]):
                        if nd not in orbit:
                            orbit.add(nd)
                            queue.append(nd)
                if any(umap[umap[d]] != d for d in orbit):
                    continue
                ok = True
                for d in orbit:
                    cur = d
                    for _ in range(k):
                        cur = vmap[cur]
                    if cur != d:
                        ok = False
                        break
                if not ok:
                    continue
                # the composite must permute the orbit; take its order there
                if len({wmap[d] for d in orbit}) != len(orbit):
                    continue
                lengths = set()
                left = set(orbit)
                while left:
                    d = left.pop()
                    cur = wmap[d]
                    size = 1
                    while cur != d:
                        left.discard(cur)
                        cur = wmap[cur]
                        size += 1
                    lengths.add(size)
                d_w = math.lcm(*lengths)
                if d_w == 1:
                    l = 3 if k != 3 else 5
                else:
                    l = d_w
                if l <= 1 or l % 2 == 0 or math.gcd(l, k) != 1 or l > n:
                    continue
                return FoModWitness(
                    monoid.elements[ui].witness,
                    monoid.elements[vi].witness,
                    reps[c],
                    k,
                    l,
                )
    return None


# ---------------------------------------------------------------------------
# language surgery and fixtures


def expand_language(
    dfa: Dfa,
    gamma: Iterable[str],
    delta: Iterable[str],
    start_marker: str = "x",
    end_marker: str = "y",
) -> Dfa:
    """Embed L(dfa) between fresh markers inside arbitrary context.

    The result, over the alphabet ``delta``, accepts words that contain a
    start marker followed by a member of L(dfa) followed by an end marker,
    scanning over ``gamma`` context on both sides; any letter outside
    ``gamma`` is fatal. Match attempts restart on a fresh start marker and
    resume scanning when the attempt dies. The construction preserves the
    definability rung of the language.
    """
    gamma = tuple(dict.fromkeys(gamma))
    delta_alpha = tuple(dict.fromkeys(delta))
    sigma = set(dfa.alphabet)
    markers = {start_marker, end_marker}
    if start_marker == end_marker:
        raise AlphabetViolation("start and end markers must differ")
    if sigma & markers:
        raise AlphabetViolation("markers must not occur in the inner alphabet")
    if not (sigma | markers) <= set(gamma):
        raise AlphabetViolation("gamma must contain the inner alphabet and both markers")
    if not set(gamma) <= set(delta_alpha):
        raise AlphabetViolation("delta must contain gamma")

    # states from which some final state is reachable
    coreach = set(dfa.finals)
    changed = True
    while changed:
        changed = False
        for q in range(dfa.n_states):
            if q in coreach:
                continue
            if any(dfa.delta[a][q] in coreach for a in dfa.alphabet):
                coreach.add(q)
                changed = True

    if dfa.initial not in coreach:
        return Dfa(
            delta_alpha,
            1,
            0,
            frozenset(),
            {a: (0,) for a in delta_alpha},
        )

    n = dfa.n_states
    scan, accept, trash = n, n + 1, n + 2

    def step(q: int, a: str) -> int:
        if a not in gamma:
            return trash
        if q == trash:
            return trash
        if q == accept:
            return accept
        if q == scan:
            return dfa.initial if a == start_marker else scan
        # inside a match attempt
        if a == start_marker:
            return dfa.initial
        if a == end_marker:
            return accept if q in dfa.finals else scan
        if a in sigma:
            t = dfa.delta[a][q]
            return t if t in coreach else scan
        return scan

    table = {a: tuple(step(q, a) for q in range(n + 3)) for a in delta_alpha}
    return Dfa(delta_alpha, n + 3, scan, frozenset({accept}), table)


def make_bp_automaton(p: int, kind: str) -> Dfa:
    """Cyclic-counter fixtures pinned at each rung of the ladder.

    ``kind`` selects the variant: "lt" is the plain modular counter, "eq"
    adds an idle letter, "mod" adds an extra state and an involution letter
    built from modular inverses. ``p`` must be an odd prime; the "mod"
    variant additionally needs p > 5 with p mod 10 not in {1, 9}.
    """
    if not _is_odd_prime(p):
        raise BadPrime(f"p = {p} is not an odd prime")
    if kind == "lt":
        return Dfa(
            ("a",),
            p,
            0,
            frozenset({0}),
            {"a": tuple((i + 1) % p for i in range(p))},
        )
    if kind == "eq":
        return Dfa(
            ("a", "b"),
            p,
            0,
            frozenset({0}),
            {
                "a": tuple((i + 1) % p for i in range(p)),
                "b": tuple(range(p)),
            },
        )
    if kind == "mod":
        if p <= 5 or p % 10 in (1, 9):
            raise BadPrime(f"p = {p} is not admissible for the 'mod' fixture")
        a_row = tuple((i + 1) % p for i in range(p)) + (p,)
        b = [0] * (p + 1)
        b[0], b[p] = p, 0
        for i in range(1, p):
            b[i] = ((p - 1) * pow(i, -1, p)) % p
        return Dfa(
            ("a", "b"),
            p + 1,
            0,
            frozenset({0}),
            {"a": a_row, "b": tuple(b)},
        )
    raise ValueError(f"unknown fixture kind {kind!r}")
