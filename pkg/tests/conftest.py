"""Shared fixtures: small machines, the worked query set, and seeded batteries."""

from __future__ import annotations

import random
from collections.abc import Sequence

import pytest

from definability.algebra import make_bp_automaton
from definability.automata import Dfa
from definability.ltl.syntax import (
    Concept,
    OmqSpec,
    Ontology,
    atom,
    parse_abox,
    parse_ontology,
    parse_query,
    wrap,
)
from definability.twoway import TwoNfa

# ---------------------------------------------------------------------------
# machine builders


def dfa_from_rows(
    alphabet: Sequence[str],
    rows: dict[str, Sequence[int]],
    initial: int,
    finals: Sequence[int],
) -> Dfa:
    n = len(next(iter(rows.values())))
    return Dfa(
        alphabet=tuple(alphabet),
        n_states=n,
        initial=initial,
        finals=frozenset(finals),
        delta={sym: tuple(row) for sym, row in rows.items()},
    )


def two_nfa_from_edges(
    n_states: int,
    letters: Sequence[str],
    edges: Sequence[tuple[int, str, int, int]],
    initials: Sequence[int],
    finals: Sequence[int],
) -> TwoNfa:
    """Edges are (source, letter, direction, target) with direction -1/0/+1."""
    moves = {sym: [[0] * n_states for _ in range(3)] for sym in letters}
    for src, sym, direction, dst in edges:
        moves[sym][direction + 1][src] |= 1 << dst
    return TwoNfa(
        alphabet=tuple(letters),
        n_states=n_states,
        initials=frozenset(initials),
        finals=frozenset(finals),
        moves={
            sym: (tuple(rows[0]), tuple(rows[1]), tuple(rows[2]))
            for sym, rows in moves.items()
        },
    )


# ---------------------------------------------------------------------------
# the fourteen-state two-way machine used across the two-way tests

WALKER_STATES = ("q0", "r", "s", "t", "v", "w", "u", "y", "z", "p", "g", "h", "x", "q")
WALKER_INDEX = {name: i for i, name in enumerate(WALKER_STATES)}

_WALKER_EDGES = [
    ("q0", "a", 1, "r"),
    ("r", "b", 1, "s"),
    ("s", "a", 0, "t"),
    ("t", "a", 1, "v"),
    ("t", "a", -1, "u"),
    ("v", "b", -1, "w"),
    ("w", "a", -1, "u"),
    ("u", "b", 1, "y"),
    ("y", "a", 1, "z"),
    ("z", "b", 1, "p"),
    ("u", "b", -1, "g"),
    ("g", "a", -1, "h"),
    ("w", "a", 1, "x"),
    ("x", "b", 1, "q"),
]


def build_walker() -> TwoNfa:
    edges = [
        (WALKER_INDEX[src], sym, d, WALKER_INDEX[dst])
        for src, sym, d, dst in _WALKER_EDGES
    ]
    return two_nfa_from_edges(
        14, ("a", "b"), edges, initials=[WALKER_INDEX["q0"]], finals=[WALKER_INDEX["q"]]
    )


@pytest.fixture(scope="session")
def walker() -> TwoNfa:
    return build_walker()


def pairs_by_name(rows: Sequence[int]) -> set[tuple[str, str]]:
    """A bitmask-row relation of the walker as a set of state-name pairs."""
    out = set()
    for i, row in enumerate(rows):
        for j in range(len(rows)):
            if row >> j & 1:
                out.add((WALKER_STATES[i], WALKER_STATES[j]))
    return out


# ---------------------------------------------------------------------------
# small one-way fixtures


@pytest.fixture(scope="session")
def even_a_dfa() -> Dfa:
    """Even number of letters over a one-letter alphabet."""
    return dfa_from_rows(("a",), {"a": (1, 0)}, 0, (0,))


@pytest.fixture(scope="session")
def astar_bstar_dfa() -> Dfa:
    """Words of the shape a…ab…b."""
    return dfa_from_rows(
        ("a", "b"), {"a": (0, 2, 2), "b": (1, 1, 2)}, 0, (0, 1)
    )


@pytest.fixture(scope="session")
def bp_lt() -> Dfa:
    return make_bp_automaton(7, "lt")


@pytest.fixture(scope="session")
def bp_eq() -> Dfa:
    return make_bp_automaton(7, "eq")


@pytest.fixture(scope="session")
def bp_mod() -> Dfa:
    return make_bp_automaton(7, "mod")


# ---------------------------------------------------------------------------
# the worked query set


def q1_specs() -> tuple[OmqSpec, OmqSpec]:
    onto = parse_ontology("A -> Bf B\nBf B -> C")
    sig = ("A", "B", "C", "D")
    query = parse_query("C & D")
    return OmqSpec(onto, query, "boolean", sig), OmqSpec(onto, query, "specific", sig)


def q2_specs() -> tuple[OmqSpec, OmqSpec]:
    onto = parse_ontology("Op A -> B\nOp B -> A\nA & B -> bot")
    sig = ("A", "B", "C")
    query = parse_query("C")
    return OmqSpec(onto, query, "boolean", sig), OmqSpec(onto, query, "specific", sig)


def q3_spec() -> OmqSpec:
    onto = parse_ontology(
        "Op B0 & A0 -> B0\nOp B1 & A1 -> B0\nOp B1 & A0 -> B1\nOp B0 & A1 -> B1"
    )
    return OmqSpec(onto, parse_query("B0 & E"), "boolean", ("A0", "A1", "B0", "E"))


def q3_abox(bits: str):
    spec = q3_spec()
    lines = ["B0@0"]
    lines += [f"A{b}@{i}" for i, b in enumerate(bits, start=1)]
    lines.append(f"E@{len(bits)}")
    return parse_abox("\n".join(lines), spec.signature)


def q4_specs() -> tuple[OmqSpec, OmqSpec]:
    onto = parse_ontology("A -> Of B")
    query = parse_query("B")
    sig = ("A", "B")
    return OmqSpec(onto, query, "boolean", sig), OmqSpec(onto, query, "specific", sig)


def q5_specs() -> tuple[OmqSpec, OmqSpec]:
    onto = parse_ontology("A -> B | Of B")
    query = parse_query("B")
    sig = ("A", "B", "C")
    return OmqSpec(onto, query, "boolean", sig), OmqSpec(onto, query, "specific", sig)


def worked_core_specs() -> tuple[OmqSpec, OmqSpec]:
    onto = parse_ontology("Op A -> B\nOf D -> C\nC & B -> bot")
    query = parse_query("B")
    sig = ("A", "B", "D")
    return OmqSpec(onto, query, "boolean", sig), OmqSpec(onto, query, "specific", sig)


# ---------------------------------------------------------------------------
# seeded batteries of tiny query specifications

EDB_ATOMS = ("A", "B")
IDB_ATOMS = ("C", "D")


def _chained(rng: random.Random, name: str, max_depth: int) -> Concept:
    c: Concept = atom(name)
    for _ in range(rng.randint(0, max_depth)):
        c = wrap(rng.choice(("next_f", "next_p")), c)
    return c


def _positive_query(rng: random.Random, allow_or: bool) -> Concept:
    def leaf() -> Concept:
        c: Concept = atom(rng.choice(EDB_ATOMS + IDB_ATOMS))
        for _ in range(rng.randint(0, 1)):
            c = wrap(rng.choice(("next_f", "next_p", "dia_f", "dia_p")), c)
        return c

    parts = [leaf() for _ in range(rng.randint(1, 2))]
    if len(parts) == 1:
        return parts[0]
    kinds = ["and"] + (["or"] if allow_or else [])
    kind = rng.choice(kinds)
    return Concept(kind, children=tuple(parts))


def _horn_ontology(
    rng: random.Random, max_axioms: int, allow_bot: bool, linear_only: bool
) -> Ontology:
    from definability.ltl.syntax import Axiom

    axioms = []
    for _ in range(rng.randint(1, max_axioms)):
        body = [
            _chained(rng, rng.choice(EDB_ATOMS + IDB_ATOMS), 1)
            for _ in range(rng.randint(1, 2))
        ]
        if allow_bot and rng.random() < 0.15:
            axioms.append(Axiom(tuple(body), ()))
            continue
        head = _chained(rng, rng.choice(IDB_ATOMS), 1)
        axioms.append(Axiom(tuple(body), (head,)))
    onto = Ontology(tuple(axioms))
    if linear_only and not onto.is_linear:
        return _horn_ontology(rng, max_axioms, allow_bot, linear_only)
    return onto


def horn_ompq_battery(count: int, seed: int = 0xB0071) -> list[OmqSpec]:
    """Falsum-free Horn queries with positive structured query parts."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        onto = _horn_ontology(rng, 3, allow_bot=False, linear_only=False)
        query = _positive_query(rng, allow_or=False)
        mode = "boolean" if rng.random() < 0.7 else "specific"
        out.append(OmqSpec(onto, query, mode, EDB_ATOMS))
    return out


def linear_omaq_battery(count: int, seed: int = 0x11EA2) -> list[OmqSpec]:
    """Linear Horn ontologies with atomic queries; falsum allowed."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        onto = _horn_ontology(rng, 3, allow_bot=True, linear_only=True)
        query = atom(rng.choice(EDB_ATOMS + IDB_ATOMS))
        mode = "boolean" if rng.random() < 0.7 else "specific"
        out.append(OmqSpec(onto, query, mode, EDB_ATOMS))
    return out


def krom_omaq_battery(count: int, seed: int = 0x2302) -> list[OmqSpec]:
    """Two-literal step ontologies with atomic queries."""
    from definability.ltl.syntax import Axiom

    rng = random.Random(seed)
    names = EDB_ATOMS + IDB_ATOMS
    out = []
    while len(out) < count:
        axioms = []
        for _ in range(rng.randint(1, 3)):
            roll = rng.random()
            if roll < 0.6:
                axioms.append(
                    Axiom(
                        (_chained(rng, rng.choice(names), 2),),
                        (_chained(rng, rng.choice(names), 2),),
                    )
                )
            elif roll < 0.8:
                axioms.append(
                    Axiom(
                        (
                            _chained(rng, rng.choice(names), 1),
                            _chained(rng, rng.choice(names), 1),
                        ),
                        (),
                    )
                )
            else:
                axioms.append(
                    Axiom(
                        (),
                        (
                            _chained(rng, rng.choice(names), 1),
                            _chained(rng, rng.choice(names), 1),
                        ),
                    )
                )
        onto = Ontology(tuple(axioms))
        if onto.clause_class not in ("core", "krom"):
            continue
        mode = "boolean" if rng.random() < 0.6 else "specific"
        out.append(OmqSpec(onto, atom(rng.choice(names)), mode, EDB_ATOMS))
    return out


def core_ompeq_battery(count: int, seed: int = 0xC02E) -> list[OmqSpec]:
    """Falsum-free single-body single-head step ontologies with or-queries."""
    from definability.ltl.syntax import Axiom

    rng = random.Random(seed)
    names = EDB_ATOMS + IDB_ATOMS
    out = []
    while len(out) < count:
        axioms = []
        for _ in range(rng.randint(1, 2)):
            axioms.append(
                Axiom(
                    (_chained(rng, rng.choice(names), 1),),
                    (_chained(rng, rng.choice(IDB_ATOMS), 1),),
                )
            )
        onto = Ontology(tuple(axioms))
        if onto.clause_class != "core" or not onto.is_bot_free:
            continue
        query = _positive_query(rng, allow_or=True)
        mode = "boolean" if rng.random() < 0.7 else "specific"
        out.append(OmqSpec(onto, query, mode, EDB_ATOMS))
    return out


def all_aboxes(signature: Sequence[str], max_len: int):
    """Every data word up to the length bound, unmarked."""
    import itertools

    from definability.ltl.syntax import AboxWord

    sig = tuple(signature)
    n = len(sig)
    for length in range(max_len + 1):
        for letters in itertools.product(range(1 << n), repeat=length):
            yield AboxWord(sig, tuple(letters))
