"""JSON interchange for the three machine kinds.

The format is a single object with a ``type`` of "dfa", "nfa", or "2nfa",
an ``alphabet`` list, a state count, initial state(s), finals, and a
transition list. Transition entries are ``[from, symbol, to]`` with an extra
head direction (-1, 0, or 1) for two-way machines; "eps" names the epsilon
symbol in NFAs. Unknown fields are rejected.

Deterministic tables may be partial in the input; a rejecting sink state is
appended to make them total.
"""

from __future__ import annotations

import json
from typing import Any

from .automata import Dfa, Nfa, EPSILON
from .errors import SyntaxError_, UnknownSymbol
from .twoway import TwoNfa

_COMMON = {"type", "alphabet", "states", "finals", "transitions"}
_FIELDS = {
    "dfa": _COMMON | {"initial"},
    "nfa": _COMMON | {"initials"},
    "2nfa": _COMMON | {"initials"},
}


def _load(data: str | dict) -> dict:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SyntaxError_(f"invalid JSON: {exc.msg}", line=exc.lineno, col=exc.colno)
    if not isinstance(data, dict):
        raise SyntaxError_("automaton JSON must be an object")
    return data


def parse_automaton(data: str | dict) -> Dfa | Nfa | TwoNfa:
    obj = _load(data)
    kind = obj.get("type")
    if kind not in _FIELDS:
        raise SyntaxError_(f"unknown automaton type {kind!r}")
    extra = set(obj) - _FIELDS[kind]
    if extra:
        raise SyntaxError_(f"unknown fields for {kind}: {sorted(extra)}")
    missing = _FIELDS[kind] - set(obj)
    if missing:
        raise SyntaxError_(f"missing fields for {kind}: {sorted(missing)}")

    alphabet = tuple(obj["alphabet"])
    if len(set(alphabet)) != len(alphabet):
        raise SyntaxError_("alphabet has repeated symbols")
    n = obj["states"]
    if not isinstance(n, int) or n <= 0:
        raise SyntaxError_("states must be a positive integer")
    finals = frozenset(obj["finals"])
    for f in finals:
        if not isinstance(f, int) or not 0 <= f < n:
            raise SyntaxError_(f"final state {f!r} out of range")

    def check_state(s: Any) -> int:
        if not isinstance(s, int) or not 0 <= s < n:
            raise SyntaxError_(f"state {s!r} out of range")
        return s

    if kind == "dfa":
        initial = check_state(obj["initial"])
        table: dict[tuple[int, str], int] = {}
        for entry in obj["transitions"]:
            if len(entry) != 3:
                raise SyntaxError_(f"dfa transition needs 3 entries: {entry!r}")
            frm, sym, to = entry
            if sym not in alphabet:
                raise UnknownSymbol(f"transition symbol {sym!r} not in alphabet")
            key = (check_state(frm), sym)
            if key in table:
                raise SyntaxError_(f"duplicate transition for state {frm} on {sym!r}")
            table[key] = check_state(to)
        total = all((q, a) in table for q in range(n) for a in alphabet)
        n_total = n if total else n + 1
        sink = n  # only used when the table is partial
        delta = {
            a: tuple(table.get((q, a), sink) for q in range(n_total))
            for a in alphabet
        }
        return Dfa(alphabet, n_total, initial, finals, delta)

    initials = frozenset(check_state(s) for s in obj["initials"])

    if kind == "nfa":
        moves = {a: [0] * n for a in alphabet}
        eps = [0] * n
        has_eps = False
        for entry in obj["transitions"]:
            if len(entry) != 3:
                raise SyntaxError_(f"nfa transition needs 3 entries: {entry!r}")
            frm, sym, to = entry
            frm, to = check_state(frm), check_state(to)
            if sym == EPSILON:
                eps[frm] |= 1 << to
                has_eps = True
            elif sym in alphabet:
                moves[sym][frm] |= 1 << to
            else:
                raise UnknownSymbol(f"transition symbol {sym!r} not in alphabet")
        return Nfa(
            alphabet,
            n,
            initials,
            finals,
            {a: tuple(rows) for a, rows in moves.items()},
            tuple(eps) if has_eps else (),
        )

    # two-way machine
    triples = {a: ([0] * n, [0] * n, [0] * n) for a in alphabet}
    for entry in obj["transitions"]:
        if len(entry) != 4:
            raise SyntaxError_(f"2nfa transition needs 4 entries: {entry!r}")
        frm, sym, to, direction = entry
        if sym not in alphabet:
            raise UnknownSymbol(f"transition symbol {sym!r} not in alphabet")
        if direction not in (-1, 0, 1):
            raise SyntaxError_(f"2nfa head direction must be -1, 0, or 1: {entry!r}")
        frm, to = check_state(frm), check_state(to)
        triples[sym][direction + 1][frm] |= 1 << to
    moves2 = {a: tuple(tuple(rows) for rows in triple) for a, triple in triples.items()}
    return TwoNfa(alphabet, n, initials, finals, moves2)


def format_automaton(machine: Dfa | Nfa | TwoNfa) -> dict:
    """Serialize a machine back to the interchange shape."""
    if isinstance(machine, Dfa):
        transitions = [
            [q, a, machine.delta[a][q]]
            for q in range(machine.n_states)
            for a in machine.alphabet
        ]
        return {
            "type": "dfa",
            "alphabet": list(machine.alphabet),
            "states": machine.n_states,
            "initial": machine.initial,
            "finals": sorted(machine.finals),
            "transitions": transitions,
        }
    if isinstance(machine, Nfa):
        transitions = []
        for a in machine.alphabet:
            for q, row in enumerate(machine.moves[a]):
                transitions.extend([q, a, t] for t in _bits(row))
        if machine.eps:
            for q, row in enumerate(machine.eps):
                transitions.extend([q, EPSILON, t] for t in _bits(row))
        return {
            "type": "nfa",
            "alphabet": list(machine.alphabet),
            "states": machine.n_states,
            "initials": sorted(machine.initials),
            "finals": sorted(machine.finals),
            "transitions": transitions,
        }
    transitions = []
    for a in machine.alphabet:
        for direction, rows in zip((-1, 0, 1), machine.moves[a]):
            for q, row in enumerate(rows):
                transitions.extend([q, a, t, direction] for t in _bits(row))
    return {
        "type": "2nfa",
        "alphabet": list(machine.alphabet),
        "states": machine.n_states,
        "initials": sorted(machine.initials),
        "finals": sorted(machine.finals),
        "transitions": transitions,
    }


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        out.append((mask & -mask).bit_length() - 1)
        mask &= mask - 1
    return out
