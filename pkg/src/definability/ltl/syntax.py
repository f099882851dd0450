"""Concepts, axioms, ontologies, queries, and data words.

Concrete syntax (one axiom per line, ``#`` starts a comment):

    operators   Of Op   next-time / previous-time
                Bf Bp   always-in-future / always-in-past
                Df Dp   sometime-in-future / sometime-in-past
    connectives &  |  ->  !  bot  top

An axiom is ``body -> head`` where the body is a conjunction and the head a
disjunction of (possibly negated) operator-prefixed atoms; negations are
normalized away by moving the literal across the arrow, so stored axioms
relate positive concepts only, with an empty head meaning falsum.

An OMQ file has sections ``[ontology]``, ``[query]``, ``[mode boolean]`` or
``[mode specific]``, and optionally ``[signature A B C]``. Data instances use
``Atom@position`` lines plus optional ``window lo hi`` and ``mark position``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

from ..errors import PositionOutOfRange, SyntaxError_, UnknownOperator

UNARY_OPS = {
    "Of": "next_f",
    "Op": "next_p",
    "Bf": "box_f",
    "Bp": "box_p",
    "Df": "dia_f",
    "Dp": "dia_p",
}
_OP_TOKEN = {v: k for k, v in UNARY_OPS.items()}

_FUTURE_OF = {"next_f": "next_p", "box_f": "box_p", "dia_f": "dia_p"}
TEMPORAL_KINDS = frozenset(UNARY_OPS.values())


@dataclass(frozen=True)
class Concept:
    """A temporal concept: an atom, a constant, or an operator application."""

    kind: str
    name: str | None = None
    args: tuple["Concept", ...] = ()

    def __str__(self) -> str:
        if self.kind == "atom":
            return self.name  # type: ignore[return-value]
        if self.kind in ("top", "bot"):
            return self.kind
        if self.kind in TEMPORAL_KINDS:
            return f"{_OP_TOKEN[self.kind]} {self.args[0]}"
        sep = " & " if self.kind == "and" else " | "
        return "(" + sep.join(str(a) for a in self.args) + ")"

    def subconcepts(self) -> Iterator["Concept"]:
        """This concept and all concepts below it, pre-order."""
        yield self
        for a in self.args:
            yield from a.subconcepts()

    def atoms(self) -> frozenset[str]:
        return frozenset(c.name for c in self.subconcepts() if c.kind == "atom")

    def atom_occurrences(self) -> int:
        return sum(1 for c in self.subconcepts() if c.kind == "atom")


def atom(name: str) -> Concept:
    return Concept("atom", name)


TOP = Concept("top")
BOT = Concept("bot")


def wrap(kind: str, inner: Concept) -> Concept:
    return Concept(kind, args=(inner,))


def conj(parts: Sequence[Concept]) -> Concept:
    parts = tuple(parts)
    if not parts:
        return TOP
    if len(parts) == 1:
        return parts[0]
    return Concept("and", args=parts)


def disj(parts: Sequence[Concept]) -> Concept:
    parts = tuple(parts)
    if not parts:
        return BOT
    if len(parts) == 1:
        return parts[0]
    return Concept("or", args=parts)


@dataclass(frozen=True)
class Axiom:
    """body (conjunction) implies head (disjunction); empty head is falsum."""

    lhs: tuple[Concept, ...]
    rhs: tuple[Concept, ...]

    def __str__(self) -> str:
        body = " & ".join(str(c) for c in self.lhs) if self.lhs else "top"
        head = " | ".join(str(c) for c in self.rhs) if self.rhs else "bot"
        return f"{body} -> {head}"


@dataclass(frozen=True)
class Ontology:
    axioms: tuple[Axiom, ...]

    @cached_property
    def signature(self) -> tuple[str, ...]:
        out: set[str] = set()
        for ax in self.axioms:
            for c in ax.lhs + ax.rhs:
                out |= c.atoms()
        return tuple(sorted(out))

    @cached_property
    def clause_class(self) -> str:
        """Most specific clause class: core, krom, horn, or bool."""
        core = krom = horn = True
        for ax in self.axioms:
            k, m = len(ax.lhs), len(ax.rhs)
            if k + m > 2:
                krom = False
            if m > 1:
                horn = False
            if k + m > 2 or m > 1:
                core = False
        if core:
            return "core"
        if krom:
            return "krom"
        if horn:
            return "horn"
        return "bool"

    @cached_property
    def operator_profile(self) -> str:
        """Which temporal operators the axioms use: Box, Next, or BoxNext."""
        has_box = has_next = False
        for ax in self.axioms:
            for c in ax.lhs + ax.rhs:
                for sub in c.subconcepts():
                    if sub.kind in ("box_f", "box_p"):
                        has_box = True
                    elif sub.kind in ("next_f", "next_p"):
                        has_next = True
        if has_box and has_next:
            return "BoxNext"
        if has_box:
            return "Box"
        return "Next"

    @cached_property
    def idb_atoms(self) -> frozenset[str]:
        """Atoms an axiom can derive (those occurring in some head)."""
        out: set[str] = set()
        for ax in self.axioms:
            for c in ax.rhs:
                out |= c.atoms()
        return frozenset(out)

    @cached_property
    def is_bot_free(self) -> bool:
        return all(ax.rhs for ax in self.axioms)

    @cached_property
    def is_linear(self) -> bool:
        """Every axiom body mentions at most one derivable atom."""
        for ax in self.axioms:
            count = sum(1 for c in ax.lhs if c.atoms() & self.idb_atoms)
            if count > 1:
                return False
        return True


@dataclass(frozen=True)
class OmqSpec:
    """An ontology-mediated query: ontology, query concept, mode, signature."""

    ontology: Ontology
    query: Concept
    mode: str = "boolean"  # "boolean" | "specific"
    signature: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in ("boolean", "specific"):
            raise ValueError(f"mode must be boolean or specific, got {self.mode!r}")
        if not self.signature:
            sig = set(self.ontology.signature) | self.query.atoms()
            object.__setattr__(self, "signature", tuple(sorted(sig)))

    @cached_property
    def kind(self) -> str:
        kinds = {c.kind for c in self.query.subconcepts()}
        if kinds == {"atom"}:
            return "OMAQ"
        if kinds <= {"atom", "and", "dia_f", "dia_p", "next_f", "next_p"}:
            return "OMPQ"
        if kinds <= {"atom", "and", "or", "dia_f", "dia_p", "next_f", "next_p"}:
            return "OMPEQ"
        return "OMQ"


# ---------------------------------------------------------------------------
# data words


@dataclass(frozen=True)
class AboxWord:
    """A data instance as a word over subsets of the signature.

    ``letters[i]`` is a bitmask over ``signature`` giving the atoms asserted
    at timestamp ``origin + i``. ``marked_pos`` is a word index (not a
    timestamp) singling out the answer candidate, when present.
    """

    signature: tuple[str, ...]
    letters: tuple[int, ...]
    marked_pos: int | None = None
    origin: int = 0

    def __post_init__(self):
        full = (1 << len(self.signature)) - 1
        if any(l & ~full for l in self.letters):
            raise ValueError("letter bitmask outside the signature")
        if self.marked_pos is not None and not 0 <= self.marked_pos < len(self.letters):
            raise PositionOutOfRange(f"marked position {self.marked_pos} outside the word")

    def __len__(self) -> int:
        return len(self.letters)

    def atoms_at(self, index: int) -> frozenset[str]:
        mask = self.letters[index]
        return frozenset(a for i, a in enumerate(self.signature) if mask >> i & 1)

    def assertions(self) -> Iterator[tuple[str, int]]:
        for i in range(len(self.letters)):
            for a in self.atoms_at(i):
                yield a, self.origin + i


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"->|[&|!()]|[A-Za-z_][A-Za-z0-9_']*|\S")


class _Tokens:
    def __init__(self, text: str, line: int):
        self.items = [(m.group(0), m.start()) for m in _TOKEN_RE.finditer(text)]
        self.pos = 0
        self.line = line

    def peek(self) -> str | None:
        return self.items[self.pos][0] if self.pos < len(self.items) else None

    def next(self) -> tuple[str, int]:
        if self.pos >= len(self.items):
            raise SyntaxError_("unexpected end of line", line=self.line)
        tok = self.items[self.pos]
        self.pos += 1
        return tok

    def expect(self, what: str):
        tok, col = self.next()
        if tok != what:
            raise SyntaxError_(f"expected {what!r}, found {tok!r}", line=self.line, col=col)


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def _parse_literal(toks: _Tokens) -> tuple[Concept, bool]:
    """One (possibly negated) operator-prefixed atom or constant."""
    negated = False
    while toks.peek() == "!":
        toks.next()
        negated = not negated
    ops: list[str] = []
    while toks.peek() in UNARY_OPS:
        ops.append(UNARY_OPS[toks.next()[0]])
    tok, col = toks.next()
    if tok == "top":
        base = TOP
    elif tok == "bot":
        base = BOT
    elif _NAME_RE.match(tok):
        base = atom(tok)
    else:
        raise SyntaxError_(f"expected an atom, found {tok!r}", line=toks.line, col=col)
    for op in reversed(ops):
        base = wrap(op, base)
    return base, negated


def _parse_side(
    toks: _Tokens, stop: set[str]
) -> tuple[list[tuple[Concept, bool]], str | None]:
    """A &- or |-combination of literals; mixing the two connectives is rejected."""
    literals = [_parse_literal(toks)]
    sep = None
    while toks.peek() is not None and toks.peek() not in stop:
        tok, col = toks.next()
        if tok not in ("&", "|"):
            raise SyntaxError_(f"expected '&' or '|', found {tok!r}", line=toks.line, col=col)
        if sep is None:
            sep = tok
        elif tok != sep:
            raise SyntaxError_("cannot mix '&' and '|' on one side of an axiom", line=toks.line, col=col)
        literals.append(_parse_literal(toks))
    return literals, sep


_GLOBAL_BOX_RE = re.compile(r"^\s*((?:Bf|Bp)\s*)+\(")


def _strip_global_boxes(text: str, line_no: int) -> str:
    """Drop Bf/Bp wrappers around a whole parenthesized axiom.

    Axioms hold at every timestamp already, so an outer always-in-the-future /
    always-in-the-past prefix is redundant and merely tolerated.
    """
    while True:
        m = _GLOBAL_BOX_RE.match(text)
        if not m:
            return text
        open_idx = m.end() - 1
        depth = 0
        close_idx = -1
        for i in range(open_idx, len(text)):
            if text[i] == "(":
                depth += 1
            elif text[i] == ")":
                depth -= 1
                if depth == 0:
                    close_idx = i
                    break
        if close_idx == -1:
            raise SyntaxError_("unbalanced parenthesis in axiom", line=line_no)
        if text[close_idx + 1 :].strip():
            return text  # the boxes wrap a sub-expression, not the whole axiom
        text = text[open_idx + 1 : close_idx]


def _parse_axiom(text: str, line_no: int) -> Axiom | None:
    text = _strip_global_boxes(text, line_no)
    toks = _Tokens(text, line_no)
    body, body_sep = _parse_side(toks, stop={"->"})
    toks.expect("->")
    head, head_sep = _parse_side(toks, stop=set())
    if body_sep == "|":
        raise SyntaxError_("axiom bodies must be conjunctions", line=line_no)
    if head_sep == "&":
        raise SyntaxError_("axiom heads must be disjunctions", line=line_no)
    # the body must be conjunctive, the head disjunctive; single literals are both
    lhs: list[Concept] = []
    rhs: list[Concept] = []
    for c, neg in body:
        (rhs if neg else lhs).append(c)
    for c, neg in head:
        (lhs if neg else rhs).append(c)
    if any(c.kind == "bot" for c in lhs) or any(c.kind == "top" for c in rhs):
        return None  # vacuously true
    lhs = [c for c in lhs if c.kind != "top"]
    rhs = [c for c in rhs if c.kind != "bot"]
    for c in lhs + rhs:
        for sub in c.subconcepts():
            if sub.kind in ("dia_f", "dia_p"):
                raise UnknownOperator(f"diamond operators are not allowed in axioms: {c}")
            if sub.kind in ("and", "or", "top", "bot"):
                raise SyntaxError_(f"nested connective in axiom literal: {c}", line=line_no)
    return Axiom(tuple(lhs), tuple(rhs))


def _logical_lines(text: str) -> Iterator[tuple[int, str]]:
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def parse_ontology(text: str) -> Ontology:
    """Parse one axiom per line; comments and blank lines are skipped."""
    axioms = []
    for line_no, line in _logical_lines(text):
        ax = _parse_axiom(line, line_no)
        if ax is not None:
            axioms.append(ax)
    return Ontology(tuple(axioms))


def parse_query(text: str) -> Concept:
    """Parse a positive existential temporal concept (&, |, Of, Op, Df, Dp)."""
    lines = list(_logical_lines(text))
    if len(lines) != 1:
        raise SyntaxError_("a query must be a single line")
    line_no, line = lines[0]
    toks = _Tokens(line, line_no)
    expr = _parse_query_disj(toks)
    if toks.peek() is not None:
        tok, col = toks.next()
        raise SyntaxError_(f"unexpected {tok!r} after query", line=line_no, col=col)
    for sub in expr.subconcepts():
        if sub.kind in ("box_f", "box_p", "bot"):
            raise UnknownOperator(f"operator not allowed in a positive query: {sub.kind}")
    return expr


def _parse_query_disj(toks: _Tokens) -> Concept:
    parts = [_parse_query_conj(toks)]
    while toks.peek() == "|":
        toks.next()
        parts.append(_parse_query_conj(toks))
    return disj(parts)


def _parse_query_conj(toks: _Tokens) -> Concept:
    parts = [_parse_query_unary(toks)]
    while toks.peek() == "&":
        toks.next()
        parts.append(_parse_query_unary(toks))
    return conj(parts)


def _parse_query_unary(toks: _Tokens) -> Concept:
    if toks.peek() in UNARY_OPS:
        op = UNARY_OPS[toks.next()[0]]
        return wrap(op, _parse_query_unary(toks))
    tok, col = toks.next()
    if tok == "(":
        inner = _parse_query_disj(toks)
        toks.expect(")")
        return inner
    if tok == "top":
        return TOP
    if _NAME_RE.match(tok):
        return atom(tok)
    raise SyntaxError_(f"expected an atom or '(', found {tok!r}", line=toks.line, col=col)


_SECTION_RE = re.compile(r"\[\s*([a-z]+)(?:\s+([^\]]*?))?\s*\]\Z")


def parse_omq_file(text: str) -> OmqSpec:
    """Parse an OMQ description with [ontology], [query], [mode], [signature]."""
    sections: dict[str, list[str]] = {}
    header_arg: dict[str, str] = {}
    current: str | None = None
    for line_no, line in _logical_lines(text):
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1)
            if current not in ("ontology", "query", "mode", "signature"):
                raise SyntaxError_(f"unknown section [{current}]", line=line_no)
            header_arg[current] = (m.group(2) or "").strip()
            sections.setdefault(current, [])
            continue
        if current is None:
            raise SyntaxError_("content before the first section header", line=line_no)
        sections[current].append(line)
    if "ontology" not in sections or "query" not in sections:
        raise SyntaxError_("an OMQ file needs [ontology] and [query] sections")
    ontology = parse_ontology("\n".join(sections["ontology"]))
    query = parse_query("\n".join(sections["query"]))
    mode = header_arg.get("mode", "") or "boolean"
    if sections.get("mode"):
        raise SyntaxError_("mode belongs in the section header: [mode boolean]")
    signature: tuple[str, ...] = ()
    if "signature" in sections:
        names = header_arg["signature"].split() + " ".join(sections["signature"]).split()
        if not names:
            raise SyntaxError_("[signature] section lists no atoms")
        signature = tuple(dict.fromkeys(names))
    return OmqSpec(ontology, query, mode, signature)


_ASSERT_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_']*)\s*@\s*(-?\d+)\Z")


def parse_abox(text: str, signature: Sequence[str]) -> AboxWord:
    """Parse assertion lines into a data word over the given signature."""
    signature = tuple(signature)
    index = {a: i for i, a in enumerate(signature)}
    assertions: list[tuple[str, int]] = []
    window: tuple[int, int] | None = None
    mark: int | None = None
    for line_no, line in _logical_lines(text):
        parts = line.split()
        if parts[0] == "window":
            if len(parts) != 3:
                raise SyntaxError_("window needs two integers", line=line_no)
            window = (int(parts[1]), int(parts[2]))
            if window[0] > window[1]:
                raise SyntaxError_("window lower bound exceeds upper bound", line=line_no)
            continue
        if parts[0] == "mark":
            if len(parts) != 2:
                raise SyntaxError_("mark needs one integer", line=line_no)
            mark = int(parts[1])
            continue
        m = _ASSERT_RE.match(line)
        if not m:
            raise SyntaxError_(f"expected 'Atom@position', found {line!r}", line=line_no)
        name, pos = m.group(1), int(m.group(2))
        if name not in index:
            raise SyntaxError_(f"atom {name!r} is not in the signature", line=line_no)
        assertions.append((name, pos))
    if window is None:
        if not assertions:
            return AboxWord(signature, (), None, 0)
        lo = min(p for _, p in assertions)
        hi = max(p for _, p in assertions)
        window = (lo, hi)
    lo, hi = window
    letters = [0] * (hi - lo + 1)
    for name, pos in assertions:
        if not lo <= pos <= hi:
            raise PositionOutOfRange(f"assertion at {pos} outside window [{lo}, {hi}]")
        letters[pos - lo] |= 1 << index[name]
    marked = None
    if mark is not None:
        if not lo <= mark <= hi:
            raise PositionOutOfRange(f"mark at {mark} outside window [{lo}, {hi}]")
        marked = mark - lo
    return AboxWord(signature, tuple(letters), marked, lo)
