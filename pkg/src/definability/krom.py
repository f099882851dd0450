"""Deciders for ontologies made of binary clauses.

Each binary clause relates two (possibly negated) atoms at a fixed time
offset, so consequence-finding reduces to reachability in a shift-weighted
graph over signed atoms, closed under contrapositives. Edges spanning more
than one time step are split through fresh relay atoms, after which every
long-range forcing decomposes into single-step forcings. Entailments of the
form "this literal forces that one n steps later" then form unary languages,
one per literal pair, and rewritability of an atomic query comes down to
whether finitely many of those languages are plain-order definable — each of
them a gap condition between two data atoms.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .automata import Nfa, UnaryProfile, unary_eventually_constant
from .errors import NotKrom, PreconditionViolated
from .fo import (
    TRUE,
    FoFormula,
    and_,
    eq,
    exists,
    gap_in_profile,
    or_,
    pred,
    shift,
    var,
)
from .ltl.syntax import Concept, OmqSpec, Ontology
from .ltl.types import encode_letter, omq_language_dfa

Literal = tuple[bool, str]

RELAY_STEM = "_Hop"


def negate(literal: Literal) -> Literal:
    return (not literal[0], literal[1])


def _chain(concept: Concept) -> tuple[int, Optional[str], str]:
    """Net time offset, atom name (None for top/bot), and base kind."""
    off = 0
    cur = concept
    while cur.kind in ("next_f", "next_p"):
        off += 1 if cur.kind == "next_f" else -1
        cur = cur.args[0]
    if cur.kind in ("top", "bot"):
        return off, None, cur.kind
    if cur.kind != "atom":
        raise PreconditionViolated(
            f"clause member {concept} uses {cur.kind!r}; only next-time chains "
            "over atoms are supported on this route"
        )
    return off, cur.name, "atom"


@dataclass(frozen=True)
class KromSystem:
    """Shift-weighted implication graph of a binary-clause ontology.

    ``edges[lit]`` lists (successor literal, time offset) with offsets in
    {-1, 0, 1}; longer clause offsets are relayed through fresh atoms (stem
    ``_Hop``). ``units`` are literals forced at every timestamp;
    ``consistent`` reflects whether the clause set has any timeline model.
    """

    atoms: tuple[str, ...]
    edges: dict[Literal, tuple[tuple[Literal, int], ...]]
    units: frozenset[Literal]
    consistent: bool


@lru_cache(maxsize=64)
def _build_system(ontology: Ontology) -> KromSystem:
    if ontology.clause_class not in ("core", "krom"):
        raise NotKrom(
            f"binary-clause route needs core or krom axioms, got {ontology.clause_class}"
        )
    edge_set: set[tuple[Literal, Literal, int]] = set()
    unit_seeds: set[Literal] = set()
    contradictory = False
    relay_count = 0

    def raw_edge(src: Literal, dst: Literal, offset: int) -> None:
        edge_set.add((src, dst, offset))
        edge_set.add((negate(dst), negate(src), -offset))

    def add_edge(src: Literal, dst: Literal, offset: int) -> None:
        nonlocal relay_count
        if abs(offset) <= 1:
            raw_edge(src, dst, offset)
            return
        step = 1 if offset > 0 else -1
        cur = src
        for _ in range(abs(offset) - 1):
            relay_count += 1
            relay = (True, f"{RELAY_STEM}{relay_count}")
            raw_edge(cur, relay, step)
            cur = relay
        raw_edge(cur, dst, step)

    for ax in ontology.axioms:
        members: list[tuple[Literal, int]] = []
        trivially_true = False
        for c in ax.lhs:
            off, name, base = _chain(c)
            if name is None:
                if base == "bot":
                    trivially_true = True  # falsum in the body: never fires
                continue  # verum in the body: drop
            members.append(((True, name), off))
        for c in ax.rhs:
            off, name, base = _chain(c)
            if name is None:
                if base == "top":
                    trivially_true = True
                continue  # falsum in the head adds no clause member
            members.append(((False, name), off))
        if trivially_true:
            continue
        # clause members are premise literals: body atoms positively, head
        # atoms negatively; the clause states "some member fails".
        if len(members) == 0:
            contradictory = True
        elif len(members) == 1:
            lit, _off = members[0]
            unit_seeds.add(negate(lit))
        elif len(members) == 2:
            (l1, o1), (l2, o2) = members
            if l1 == l2 and o1 == o2:
                unit_seeds.add(negate(l1))
            elif l1 == negate(l2) and o1 == o2:
                continue  # tautological clause
            else:
                add_edge(l1, negate(l2), o2 - o1)
        else:  # pragma: no cover - clause_class guard keeps members <= 2
            raise NotKrom("clause with more than two members")

    mentioned = {e[0][1] for e in edge_set} | {e[1][1] for e in edge_set}
    mentioned |= {lit[1] for lit in unit_seeds}
    atoms = tuple(sorted(mentioned | set(ontology.signature)))
    edges: dict[Literal, list[tuple[Literal, int]]] = {}
    for src, dst, off in sorted(edge_set):
        edges.setdefault(src, []).append((dst, off))

    # global units: a literal implied (at whatever offset) by a literal that
    # is forced at every timestamp is itself forced at every timestamp
    units = set(unit_seeds)
    queue = deque(units)
    while queue:
        lit = queue.popleft()
        for dst, _off in edges.get(lit, ()):
            if dst not in units:
                units.add(dst)
                queue.append(dst)
    consistent = not contradictory and not any(
        (True, a) in units and (False, a) in units for a in atoms
    )
    frozen = {src: tuple(dsts) for src, dsts in edges.items()}
    system = KromSystem(atoms, frozen, frozenset(units), consistent)
    if consistent and _self_refuting_atom(system) is not None:
        system = KromSystem(atoms, frozen, frozenset(units), False)
    return system


def _excursion_bound(literal_count: int) -> int:
    """How far a forcing chain may wander beyond its endpoints.

    A chain revisiting the same signed atom at the same distance past the
    endpoints can be cut, so a quadratic window in the number of signed
    atoms is exhaustive.
    """
    return 2 * (2 * max(1, literal_count)) ** 2 + 2


def _self_refuting_atom(system: KromSystem) -> Optional[str]:
    """Atom with zero-offset implication cycles through both its signs.

    Such an atom could be neither true nor false anywhere, so the clause set
    would have no timeline model.
    """
    span = _excursion_bound(len(system.atoms))

    def zero_path(src: Literal, dst: Literal) -> bool:
        seen = {(src, 0)}
        queue = deque([(src, 0)])
        while queue:
            lit, t = queue.popleft()
            if lit == dst and t == 0:
                return True
            for nxt, off in system.edges.get(lit, ()):
                t2 = t + off
                if abs(t2) <= span and (nxt, t2) not in seen:
                    seen.add((nxt, t2))
                    queue.append((nxt, t2))
        return False

    for atom in system.atoms:
        if (True, atom) in system.units or (False, atom) in system.units:
            continue
        if zero_path((True, atom), (False, atom)) and zero_path(
            (False, atom), (True, atom)
        ):
            return atom
    return None


def _window_closure(
    system: KromSystem, seeds: Sequence[tuple[Literal, int]], lo: int, hi: int
) -> Optional[dict[Literal, set[int]]]:
    """Implication closure of positioned literals within a shift window.

    Returns None as soon as the closure clashes — some timestamp receiving a
    literal and its negation, or contradicting a globally forced literal.
    """
    derived: dict[Literal, set[int]] = {}
    queue: deque[tuple[Literal, int]] = deque()

    def push(lit: Literal, t: int) -> bool:
        if not lo <= t <= hi:
            return True
        if negate(lit) in system.units:
            return False
        spots = derived.setdefault(lit, set())
        if t in spots:
            return True
        opposite = derived.get(negate(lit))
        if opposite and t in opposite:
            return False
        spots.add(t)
        queue.append((lit, t))
        return True

    for lit, t in seeds:
        if not push(lit, t):
            return None
    while queue:
        lit, t = queue.popleft()
        for dst, off in system.edges.get(lit, ()):
            if not push(dst, t + off):
                return None
    return derived


def krom_entailment(
    ontology: Ontology, premise: Literal, conclusion: Literal, offset: int = 0
) -> bool:
    """Does the premise at any timestamp force the conclusion ``offset``
    steps later, in every timeline model of the clause set?"""
    system = _build_system(ontology)
    if not system.consistent:
        return True
    window = _excursion_bound(len(system.atoms)) + max(abs(offset), 1)
    lo = min(0, offset) - window
    hi = max(0, offset) + window
    closure = _window_closure(
        system, [(premise, 0), (negate(conclusion), offset)], lo, hi
    )
    return closure is None


# ---------------------------------------------------------------------------
# single-step forcing matrices and per-pair unary automata


@lru_cache(maxsize=32)
def _forcing_matrices(
    ontology: Ontology, extra_atoms: tuple[str, ...]
) -> tuple[tuple[Literal, ...], dict[Literal, int], tuple[int, ...], tuple[int, ...]]:
    """Literal list plus bitmask rows of one-step and same-step forcings.

    Row i has bit j set when literal i at a timestamp forces literal j one
    step later (first table) or at the same timestamp (second table, with the
    trivial i=j bit left out). Literals are interleaved so that index ^ 1
    negates.
    """
    system = _build_system(ontology)
    atoms = tuple(sorted(set(system.atoms) | set(extra_atoms)))
    literals: list[Literal] = []
    for a in atoms:
        literals.append((True, a))
        literals.append((False, a))
    index = {lit: i for i, lit in enumerate(literals)}
    n = len(literals)
    full = (1 << n) - 1
    if not system.consistent:
        return tuple(literals), index, (full,) * n, tuple(
            full & ~(1 << i) for i in range(n)
        )

    span = _excursion_bound(len(atoms))
    width = 2 * span + 2  # timestamps -span .. span+1
    edge_table: list[tuple[tuple[int, int], ...]] = []
    for lit in literals:
        edge_table.append(
            tuple(
                (index[dst], off)
                for dst, off in system.edges.get(lit, ())
                if dst in index
            )
        )
    unit_clash = 0
    for i, lit in enumerate(literals):
        if negate(lit) in system.units:
            unit_clash |= 1 << i

    refuted = [False] * n
    reach_same = [0] * n
    reach_next = [0] * n
    for src in range(n):
        seen = bytearray(n * width)
        queue = deque([(src, 0)])
        seen[src * width + span] = 1
        clash = bool(unit_clash >> src & 1)
        same = 1 << src
        nxt = 0
        while queue and not clash:
            i, t = queue.popleft()
            if t == 0:
                same |= 1 << i
            elif t == 1:
                nxt |= 1 << i
            for j, off in edge_table[i]:
                t2 = t + off
                if not -span <= t2 <= span + 1:
                    continue
                slot = j * width + t2 + span
                if seen[slot]:
                    continue
                if seen[(j ^ 1) * width + t2 + span] or unit_clash >> j & 1:
                    clash = True
                    break
                seen[slot] = 1
                queue.append((j, t2))
        refuted[src] = clash
        reach_same[src] = same
        reach_next[src] = nxt

    forced_everywhere = 0  # literals whose negation is refuted
    for i in range(n):
        if refuted[i ^ 1]:
            forced_everywhere |= 1 << i
    step_rows = []
    eps_rows = []
    for i in range(n):
        if refuted[i]:
            step_rows.append(full)
            eps_rows.append(full & ~(1 << i))
        else:
            step_rows.append(reach_next[i] | forced_everywhere)
            eps_rows.append((reach_same[i] | forced_everywhere) & ~(1 << i))
    return tuple(literals), index, tuple(step_rows), tuple(eps_rows)


def krom_unary_nfa(
    ontology: Ontology, premise: Literal, conclusion: Literal
) -> Nfa:
    """One-letter automaton of the forcing gaps between two literals.

    Accepts a word of length n exactly when the premise at a timestamp forces
    the conclusion n steps later. States are the signed atoms of the relayed
    clause graph; single-step forcings are letter moves and same-step
    forcings are silent moves.
    """
    extra = tuple(sorted({premise[1], conclusion[1]}))
    literals, index, steps, eps = _forcing_matrices(ontology, extra)
    return Nfa(
        ("a",),
        len(literals),
        frozenset({index[premise]}),
        frozenset({index[conclusion]}),
        {"a": steps},
        eps,
    )


# ---------------------------------------------------------------------------
# rewritability of atomic queries over binary-clause ontologies


@dataclass(frozen=True)
class KromFoResult:
    """Verdict with the emitted plain-order rewriting when one exists.

    ``blockers`` names the literal-pair gap languages that are neither finite
    nor cofinite, which is exactly what obstructs a rewriting.
    """

    rewritable: bool
    formula: Optional[FoFormula]
    blockers: tuple[str, ...] = ()


def _always_somewhere(spec: OmqSpec) -> tuple[frozenset[str], bool]:
    """Data atoms whose lone assertion already forces the query somewhere,
    plus whether even the empty instance does."""
    language = omq_language_dfa(spec)
    hits = set()
    for name in spec.signature:
        letter = encode_letter(frozenset({name}))
        if language.delta[letter][language.initial] in language.finals:
            hits.add(name)
    return frozenset(hits), language.initial in language.finals


def _universal(profile: UnaryProfile) -> bool:
    return profile.kind == "cofinite" and not profile.lengths


def krom_decide_fo(spec: OmqSpec) -> KromFoResult:
    """Decide plain-order rewritability of an atomic query over binary
    clauses, emitting the rewriting when the verdict is positive.

    A yes/no query reduces to gap languages between data atoms that never
    force the query on their own; a timestamped query additionally needs the
    forward and backward forcing gaps of every data atom, with finiteness of
    those gaps deciding which clash gaps must themselves be definable.
    """
    if spec.query.kind != "atom":
        raise PreconditionViolated("binary-clause route needs an atomic query")
    system = _build_system(spec.ontology)  # validates the clause shape
    query = spec.query.name
    sigma = tuple(spec.signature)
    if not system.consistent:
        return KromFoResult(True, TRUE)

    extra = tuple(sorted(set(sigma) | {query}))
    profiles: dict[tuple[Literal, Literal], UnaryProfile] = {}

    def profile(src: Literal, dst: Literal) -> UnaryProfile:
        key = (src, dst)
        if key not in profiles:
            literals, index, steps, eps = _forcing_matrices(spec.ontology, extra)
            machine = Nfa(
                ("a",),
                len(literals),
                frozenset({index[src]}),
                frozenset({index[dst]}),
                {"a": steps},
                eps,
            )
            profiles[key] = unary_eventually_constant(machine)
        return profiles[key]

    x, y = var("x"), var("y")

    if spec.mode == "boolean":
        forcing, empty_forces = _always_somewhere(spec)
        if empty_forces:
            return KromFoResult(True, TRUE)
        quiet = [b for b in sigma if b not in forcing]
        blockers = set()
        for b in quiet:
            for c in quiet:
                if profile((True, b), (False, c)).kind == "neither":
                    blockers.add(f"{b} excludes {c}")
        if blockers:
            return KromFoResult(False, None, tuple(sorted(blockers)))
        parts: list[FoFormula] = []
        for b in sorted(forcing):
            parts.append(exists("x", pred(b, x)))
        for b in quiet:
            for c in quiet:
                prof = profile((True, b), (False, c))
                if prof.kind == "finite" and not prof.lengths:
                    continue  # the pair never clashes
                body = and_([pred(b, x), pred(c, y), gap_in_profile(x, y, prof)])
                parts.append(exists("x", exists("y", body)))
        return KromFoResult(True, or_(parts))

    if spec.mode != "specific":
        raise PreconditionViolated(f"unsupported query mode {spec.mode!r}")

    # bodiless axioms can force the query at every timestamp, with no data
    # atom to anchor a gap condition on; the rewriting is then simply true
    if krom_entailment(spec.ontology, (False, query), (True, query), 0):
        return KromFoResult(True, TRUE)

    blockers = set()
    for b in sigma:
        if profile((True, b), (True, query)).kind == "neither":
            blockers.add(f"{b} forces the query ahead at irregular gaps")
        if profile((False, query), (False, b)).kind == "neither":
            blockers.add(f"{b} forces the query behind at irregular gaps")
    everywhere = frozenset(
        b
        for b in sigma
        if _universal(profile((True, b), (True, query)))
        and _universal(profile((False, query), (False, b)))
    )
    loose = [b for b in sigma if b not in everywhere]
    for b in loose:
        for c in loose:
            forward = profile((True, b), (True, query))
            backward = profile((False, query), (False, c))
            if forward.kind == "finite" or backward.kind == "finite":
                if profile((True, b), (False, c)).kind == "neither":
                    blockers.add(f"{b} excludes {c}")
    if blockers:
        return KromFoResult(False, None, tuple(sorted(blockers)))

    parts = []
    for b in sigma:
        ahead = profile((True, b), (True, query))
        if ahead.kind != "finite" or ahead.lengths:
            parts.append(
                exists("y", and_([pred(b, y), gap_in_profile(y, x, ahead)]))
            )
        behind = profile((False, query), (False, b))
        if behind.kind != "finite" or behind.lengths:
            parts.append(
                exists("y", and_([pred(b, y), gap_in_profile(x, y, behind)]))
            )
    u, v = var("u"), var("v")
    for b in sigma:
        for c in sigma:
            prof = profile((True, b), (False, c))
            if prof.kind != "neither":
                if prof.kind == "finite" and not prof.lengths:
                    continue  # the pair never clashes
                body = and_([pred(b, u), pred(c, v), gap_in_profile(u, v, prof)])
                parts.append(exists("u", exists("v", body)))
                continue
            if b in everywhere or c in everywhere:
                # a clash needs both atoms present, and either one already
                # makes every timestamp an answer via the forcing disjuncts
                continue
            bound = (
                profile((True, b), (True, query)).threshold
                + profile((False, query), (False, c)).threshold
            )
            small = [
                n
                for n in range(bound)
                if krom_entailment(spec.ontology, (True, b), (False, c), n)
            ]
            if small:
                body = or_(
                    [
                        and_([pred(b, u), pred(c, v), eq(v, shift(u, n))])
                        for n in small
                    ]
                )
                parts.append(exists("u", exists("v", body)))
    return KromFoResult(True, or_(parts))
