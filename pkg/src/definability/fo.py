"""Monadic first-order formulas over data words.

Formulas talk about timestamp variables ordered by ``<``, unary predicates
given by the data word's letters, fixed-offset shifts ``x + c``, congruence
tests on timestamps, and a counting quantifier whose witness count must be
divisible by a modulus. Evaluation follows the data word's window: the domain
is exactly its timestamps, so an empty word has an empty domain over which
``exists x (x = x)`` is false.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .automata import UnaryProfile
from .errors import PreconditionViolated, SyntaxError_
from .ltl.syntax import AboxWord


@dataclass(frozen=True)
class FoTerm:
    """A timestamp expression: a variable plus a constant offset."""

    var: str
    offset: int = 0

    def __str__(self) -> str:
        if self.offset > 0:
            return f"{self.var}+{self.offset}"
        if self.offset < 0:
            return f"{self.var}{self.offset}"
        return self.var


def var(name: str) -> FoTerm:
    return FoTerm(name, 0)


def shift(term: FoTerm, offset: int) -> FoTerm:
    return FoTerm(term.var, term.offset + offset)


_CONNECTIVES = ("and", "or")
_QUANTIFIERS = ("exists", "forall", "count")


@dataclass(frozen=True)
class FoFormula:
    """One node of a formula tree; ``kind`` selects which fields matter.

    ``pred`` uses name+term; ``lt``/``le``/``eq`` use left+right;
    ``congruent`` uses term, residue, modulus; ``not``/``exists``/``forall``
    use sub (+ bound for quantifiers); ``count`` adds modulus; ``and``/``or``
    use subs; ``top``/``bot`` stand alone.
    """

    kind: str
    name: Optional[str] = None
    term: Optional[FoTerm] = None
    left: Optional[FoTerm] = None
    right: Optional[FoTerm] = None
    residue: int = 0
    modulus: int = 0
    bound: Optional[str] = None
    sub: Optional["FoFormula"] = None
    subs: tuple["FoFormula", ...] = ()

    def __str__(self) -> str:
        k = self.kind
        if k == "top":
            return "top"
        if k == "bot":
            return "bot"
        if k == "pred":
            return f"{self.name}({self.term})"
        if k == "lt":
            return f"{self.left} < {self.right}"
        if k == "le":
            return f"{self.left} <= {self.right}"
        if k == "eq":
            return f"{self.left} = {self.right}"
        if k == "congruent":
            return f"{self.term} % {self.modulus} = {self.residue}"
        if k == "not":
            return f"!({self.sub})"
        if k == "and":
            return "(" + " & ".join(str(s) for s in self.subs) + ")"
        if k == "or":
            return "(" + " | ".join(str(s) for s in self.subs) + ")"
        if k == "exists":
            return f"exists {self.bound} . ({self.sub})"
        if k == "forall":
            return f"forall {self.bound} . ({self.sub})"
        if k == "count":
            return f"count {self.modulus} {self.bound} . ({self.sub})"
        return f"<{k}>"


def pred(name: str, term: FoTerm) -> FoFormula:
    return FoFormula("pred", name=name, term=term)


def lt(left: FoTerm, right: FoTerm) -> FoFormula:
    return FoFormula("lt", left=left, right=right)


def le(left: FoTerm, right: FoTerm) -> FoFormula:
    return FoFormula("le", left=left, right=right)


def eq(left: FoTerm, right: FoTerm) -> FoFormula:
    return FoFormula("eq", left=left, right=right)


def congruent(term: FoTerm, residue: int, modulus: int) -> FoFormula:
    if modulus < 2:
        raise PreconditionViolated("congruence modulus must be at least 2")
    return FoFormula("congruent", term=term, residue=residue % modulus, modulus=modulus)


TRUE = FoFormula("top")
FALSE = FoFormula("bot")


def not_(sub: FoFormula) -> FoFormula:
    return FoFormula("not", sub=sub)


def and_(subs: Sequence[FoFormula]) -> FoFormula:
    subs = tuple(subs)
    if not subs:
        return TRUE
    if len(subs) == 1:
        return subs[0]
    return FoFormula("and", subs=subs)


def or_(subs: Sequence[FoFormula]) -> FoFormula:
    subs = tuple(subs)
    if not subs:
        return FALSE
    if len(subs) == 1:
        return subs[0]
    return FoFormula("or", subs=subs)


def implies(premise: FoFormula, conclusion: FoFormula) -> FoFormula:
    return or_((not_(premise), conclusion))


def exists(bound: str, sub: FoFormula) -> FoFormula:
    return FoFormula("exists", bound=bound, sub=sub)


def forall(bound: str, sub: FoFormula) -> FoFormula:
    return FoFormula("forall", bound=bound, sub=sub)


def count_mod(modulus: int, bound: str, sub: FoFormula) -> FoFormula:
    """Witness-counting quantifier: satisfied when the number of domain
    elements making the body true is divisible by the modulus."""
    if modulus < 2:
        raise PreconditionViolated("counting modulus must be at least 2")
    return FoFormula("count", modulus=modulus, bound=bound, sub=sub)


def free_variables(formula: FoFormula) -> frozenset[str]:
    def walk(f: FoFormula, scope: frozenset[str]) -> Iterator[str]:
        if f.kind == "pred":
            if f.term.var not in scope:
                yield f.term.var
        elif f.kind in ("lt", "le", "eq"):
            for t in (f.left, f.right):
                if t.var not in scope:
                    yield t.var
        elif f.kind == "congruent":
            if f.term.var not in scope:
                yield f.term.var
        elif f.kind == "not":
            yield from walk(f.sub, scope)
        elif f.kind in _CONNECTIVES:
            for s in f.subs:
                yield from walk(s, scope)
        elif f.kind in _QUANTIFIERS:
            yield from walk(f.sub, scope | {f.bound})

    return frozenset(walk(formula, frozenset()))


def eval_fo_formula(
    formula: FoFormula, word: AboxWord
) -> Union[bool, frozenset[int]]:
    """Evaluate a formula over a data word's timestamps.

    A sentence returns a truth value; a formula with exactly one free
    variable returns the set of timestamps satisfying it. Quantifiers range
    over the word's window only, and a predicate holds nowhere outside it.
    """
    free = sorted(free_variables(formula))
    if len(free) > 1:
        raise PreconditionViolated(
            f"at most one free variable is supported, found {free}"
        )
    lo = word.origin
    hi = word.origin + len(word)
    domain = range(lo, hi)
    index = {a: i for i, a in enumerate(word.signature)}

    def term_value(t: FoTerm, env: dict[str, int]) -> int:
        return env[t.var] + t.offset

    def holds(f: FoFormula, env: dict[str, int]) -> bool:
        k = f.kind
        if k == "top":
            return True
        if k == "bot":
            return False
        if k == "pred":
            v = term_value(f.term, env)
            bit = index.get(f.name)
            if bit is None or not lo <= v < hi:
                return False
            return bool(word.letters[v - lo] >> bit & 1)
        if k == "lt":
            return term_value(f.left, env) < term_value(f.right, env)
        if k == "le":
            return term_value(f.left, env) <= term_value(f.right, env)
        if k == "eq":
            return term_value(f.left, env) == term_value(f.right, env)
        if k == "congruent":
            return (term_value(f.term, env) - f.residue) % f.modulus == 0
        if k == "not":
            return not holds(f.sub, env)
        if k == "and":
            return all(holds(s, env) for s in f.subs)
        if k == "or":
            return any(holds(s, env) for s in f.subs)
        if k == "exists":
            return any(holds(f.sub, {**env, f.bound: n}) for n in domain)
        if k == "forall":
            return all(holds(f.sub, {**env, f.bound: n}) for n in domain)
        if k == "count":
            hits = sum(1 for n in domain if holds(f.sub, {**env, f.bound: n}))
            return hits % f.modulus == 0
        raise PreconditionViolated(f"unknown formula kind {k!r}")

    if not free:
        return holds(formula, {})
    x = free[0]
    return frozenset(n for n in domain if holds(formula, {x: n}))


def gap_in_profile(start: FoTerm, end: FoTerm, profile: UnaryProfile) -> FoFormula:
    """Formula stating that ``end - start`` is a length the profile accepts.

    Finite profiles enumerate the accepted gaps; cofinite ones require a
    non-negative gap avoiding each rejected length. Profiles that are neither
    have no such formula in plain order logic.
    """
    if profile.kind == "finite":
        return or_([eq(end, shift(start, n)) for n in sorted(profile.lengths)])
    if profile.kind == "cofinite":
        parts: list[FoFormula] = [le(start, end)]
        for n in sorted(profile.lengths):
            parts.append(not_(eq(end, shift(start, n))))
        return and_(parts)
    raise PreconditionViolated(
        "gap formulas exist only for finite or cofinite length profiles"
    )


# ---------------------------------------------------------------------------
# a compact text syntax, mirroring the ontology grammar's connectives


class _Tokens:
    def __init__(self, text: str):
        self.items: list[tuple[str, str, int, int]] = []
        line, col = 1, 1
        i = 0
        symbols = ("->", "<=", "<", "=", "%", "&", "|", "!", "(", ")", ".", "+", "-")
        while i < len(text):
            ch = text[i]
            if ch == "\n":
                line += 1
                col = 1
                i += 1
                continue
            if ch.isspace():
                i += 1
                col += 1
                continue
            if ch == "#":
                while i < len(text) and text[i] != "\n":
                    i += 1
                continue
            matched = next((s for s in symbols if text.startswith(s, i)), None)
            if matched:
                self.items.append(("sym", matched, line, col))
                i += len(matched)
                col += len(matched)
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.items.append(("num", text[i:j], line, col))
                col += j - i
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.items.append(("name", text[i:j], line, col))
                col += j - i
                i = j
                continue
            raise SyntaxError_(f"unexpected character {ch!r}", line, col)
        self.pos = 0

    def peek(self) -> Optional[tuple[str, str, int, int]]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self) -> tuple[str, str, int, int]:
        tok = self.peek()
        if tok is None:
            last = self.items[-1] if self.items else ("", "", 1, 1)
            raise SyntaxError_("unexpected end of formula", last[2], last[3])
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.next()
        if tok[1] != value:
            raise SyntaxError_(f"expected {value!r}, got {tok[1]!r}", tok[2], tok[3])


def parse_fo(text: str) -> FoFormula:
    """Parse the compact formula syntax.

    Quantifiers: ``exists x . body``, ``forall x . body``,
    ``count N x . body``. Connectives ``& | -> !`` with ``top``/``bot``;
    atoms ``P(term)``, comparisons ``term < term``, ``term <= term``,
    ``term = term``, and congruences ``term % N = r``. Terms are a variable
    with an optional offset, e.g. ``x+2`` or ``y-1``.
    """
    toks = _Tokens(text)

    def parse_formula() -> FoFormula:
        tok = toks.peek()
        if tok and tok[0] == "name" and tok[1] in ("exists", "forall", "count"):
            toks.next()
            if tok[1] == "count":
                num = toks.next()
                if num[0] != "num":
                    raise SyntaxError_("count needs a modulus", num[2], num[3])
                bound = toks.next()
                toks.expect(".")
                return count_mod(int(num[1]), bound[1], parse_formula())
            bound = toks.next()
            if bound[0] != "name":
                raise SyntaxError_("quantifier needs a variable", bound[2], bound[3])
            toks.expect(".")
            body = parse_formula()
            return exists(bound[1], body) if tok[1] == "exists" else forall(bound[1], body)
        return parse_implies()

    def parse_implies() -> FoFormula:
        left = parse_or()
        tok = toks.peek()
        if tok and tok[1] == "->":
            toks.next()
            return implies(left, parse_implies())
        return left

    def parse_or() -> FoFormula:
        parts = [parse_and()]
        while (tok := toks.peek()) and tok[1] == "|":
            toks.next()
            parts.append(parse_and())
        return or_(parts)

    def parse_and() -> FoFormula:
        parts = [parse_unary()]
        while (tok := toks.peek()) and tok[1] == "&":
            toks.next()
            parts.append(parse_unary())
        return and_(parts)

    def parse_unary() -> FoFormula:
        tok = toks.peek()
        if tok is None:
            raise SyntaxError_("unexpected end of formula", 1, 1)
        if tok[1] == "!":
            toks.next()
            return not_(parse_unary())
        if tok[1] == "(":
            toks.next()
            inner = parse_formula()
            toks.expect(")")
            return inner
        if tok[0] == "name" and tok[1] == "top":
            toks.next()
            return TRUE
        if tok[0] == "name" and tok[1] == "bot":
            toks.next()
            return FALSE
        if tok[0] == "name" and tok[1] in ("exists", "forall", "count"):
            return parse_formula()
        return parse_atom()

    def parse_term() -> FoTerm:
        tok = toks.next()
        if tok[0] != "name":
            raise SyntaxError_(f"expected a variable, got {tok[1]!r}", tok[2], tok[3])
        term = var(tok[1])
        nxt = toks.peek()
        if nxt and nxt[1] in ("+", "-"):
            toks.next()
            num = toks.next()
            if num[0] != "num":
                raise SyntaxError_("offset needs a number", num[2], num[3])
            term = shift(term, int(num[1]) if nxt[1] == "+" else -int(num[1]))
        return term

    def parse_atom() -> FoFormula:
        tok = toks.peek()
        if (
            tok
            and tok[0] == "name"
            and toks.pos + 1 < len(toks.items)
            and toks.items[toks.pos + 1][1] == "("
        ):
            name = toks.next()[1]
            toks.expect("(")
            term = parse_term()
            toks.expect(")")
            return pred(name, term)
        left = parse_term()
        op = toks.next()
        if op[1] == "<":
            return lt(left, parse_term())
        if op[1] == "<=":
            return le(left, parse_term())
        if op[1] == "=":
            return eq(left, parse_term())
        if op[1] == "%":
            num = toks.next()
            if num[0] != "num":
                raise SyntaxError_("congruence needs a modulus", num[2], num[3])
            toks.expect("=")
            res = toks.next()
            if res[0] != "num":
                raise SyntaxError_("congruence needs a residue", res[2], res[3])
            return congruent(left, int(res[1]), int(num[1]))
        raise SyntaxError_(f"expected a comparison, got {op[1]!r}", op[2], op[3])

    result = parse_formula()
    leftover = toks.peek()
    if leftover is not None:
        raise SyntaxError_(
            f"unexpected trailing input {leftover[1]!r}", leftover[2], leftover[3]
        )
    return result
