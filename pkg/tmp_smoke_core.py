import sys

sys.path.insert(0, "src")

from definability.automata import dfa_language_equal, dfa_run, words_over
from definability.corefrag import (
    core_ompeq_decide_fo,
    core_to_linear,
    support_language_union,
    upward_closure_dfa,
)
from definability.hornlinear import build_typeset_dfa, criterion_ompq_fo
from definability.ltl.syntax import Axiom, OmqSpec, Ontology, atom, wrap
from definability.ltl.types import omq_language_dfa


def of(c, n=1):
    for _ in range(n):
        c = wrap("next_f", c)
    return c


def op(c, n=1):
    for _ in range(n):
        c = wrap("next_p", c)
    return c


def dia_f(c):
    return wrap("dia_f", c)


def dia_p(c):
    return wrap("dia_p", c)


A, B, C, D = atom("A"), atom("B"), atom("C"), atom("D")

# --- core_to_linear -------------------------------------------------------
# the worked reduction: Op A -> B, Of D -> C, C & B -> bot
onto = Ontology(
    (
        Axiom((op(A),), (B,)),
        Axiom((of(D),), (C,)),
        Axiom((C, B), ()),
    )
)
spec = OmqSpec(onto, dia_p(dia_f(B)), "boolean", ("A", "B", "D"))
lin = core_to_linear(spec)
print("linear axioms:")
for ax in lin.ontology.axioms:
    print("  ", ax)
# linearity: every body has at most one derived atom
idb = lin.ontology.idb_atoms
for ax in lin.ontology.axioms:
    body_idb = sum(
        1
        for concept in ax.lhs
        for sub in concept.subconcepts()
        if sub.kind == "atom" and sub.name in idb
    )
    assert body_idb <= 1, (ax, body_idb)
print("linear: every body chains through at most one derived atom")

lang_core = omq_language_dfa(spec)
lang_lin = omq_language_dfa(lin)
assert dfa_language_equal(lang_core, lang_lin), "certain answers differ"
print("core_to_linear preserves the certain-yes language (boolean)")

# inconsistency example from the construction: A(0), D(2) is inconsistent
w = ("A", "-", "D")
assert dfa_run(lang_core, w)[1] and dfa_run(lang_lin, w)[1]
print("A(0), D(2) flagged certain-yes on both routes")

# specific mode equivalence
spec_s = OmqSpec(onto, dia_f(B), "specific", ("A", "B", "D"))
lin_s = core_to_linear(spec_s)
assert lin_s.mode == "specific"
ls1 = omq_language_dfa(spec_s)
ls2 = omq_language_dfa(lin_s)
assert dfa_language_equal(ls1, ls2), "specific certain answers differ"
print("core_to_linear preserves the certain-yes language (specific)")

# unconditional-head interaction: top -> B plus C & B -> bot makes C impossible
onto2 = Ontology(
    (
        Axiom((), (B,)),
        Axiom((C, B), ()),
    )
)
spec2 = OmqSpec(onto2, dia_p(dia_f(D)), "boolean", ("C", "D"))
lin2 = core_to_linear(spec2)
l1 = omq_language_dfa(spec2)
l2 = omq_language_dfa(lin2)
assert dfa_run(l1, ("C",))[1], "original should flag C(0) inconsistent"
assert dfa_run(l2, ("C",))[1], "shadow of an unconditional head must be impossible"
assert dfa_language_equal(l1, l2)
print("unconditional heads handled (shadow made impossible)")

# --- upward closure -------------------------------------------------------
from definability.automata import Dfa

alpha = ("-", "A", "A,B", "B")
# language: exactly the single-letter word {A}
delta = {
    "-": (3, 3, 3, 3),
    "A": (1, 3, 3, 3),
    "A,B": (3, 3, 3, 3),
    "B": (3, 3, 3, 3),
}
single_a = Dfa(alpha, 4, 0, frozenset({1}), delta)
up = upward_closure_dfa(single_a)
assert dfa_run(up, ("A",))[1]
assert dfa_run(up, ("A,B",))[1]
assert not dfa_run(up, ("B",))[1]
assert not dfa_run(up, ("-",))[1]
assert not dfa_run(up, ("A", "A"))[1]
print("upward closure lifts letters to supersets")

# --- small-support decision ----------------------------------------------
from definability.algebra import criterion_fo

def agree_with_language(spec):
    res = core_ompeq_decide_fo(spec)
    lang = omq_language_dfa(spec) if spec.mode == "boolean" else None
    if lang is not None:
        whole = criterion_fo(lang) is None
        assert res.rewritable == whole, (res, whole)
    return res

# rewritable: B somewhere after an A at distance exactly 2
onto3 = Ontology((Axiom((A,), (of(B, 2),)),))
spec3 = OmqSpec(onto3, dia_p(dia_f(B)), "boolean", ("A", "B"))
r3 = agree_with_language(spec3)
print("decide:", r3.rewritable, "checked", r3.checked, "support words")
assert r3.rewritable

# still rewritable despite even-gap propagation: any A or B makes it yes
onto4 = Ontology((Axiom((A,), (of(A, 2),)), Axiom((A,), (B,))))
spec4 = OmqSpec(onto4, dia_p(dia_f(B)), "boolean", ("A", "B"))
r4 = agree_with_language(spec4)
print("decide:", r4.rewritable, "checked", r4.checked)
assert r4.rewritable

# genuinely non-definable: A propagates two steps, query wants A and B together
onto6 = Ontology((Axiom((A,), (of(A, 2),)),))
from definability.ltl.syntax import conj
spec6 = OmqSpec(onto6, dia_p(dia_f(conj([A, B]))), "boolean", ("A", "B"))
r6 = agree_with_language(spec6)
print("decide:", r6.rewritable, "checked", r6.checked, "blockers:", r6.blockers)
assert not r6.rewritable
assert (("A",), ("B",)) in r6.blockers

# the rebuilt union of closed small-support languages equals the language
union3 = support_language_union(spec3)
assert dfa_language_equal(union3, omq_language_dfa(spec3))
union6 = support_language_union(spec6)
assert dfa_language_equal(union6, omq_language_dfa(spec6))
print("support unions rebuild the certain-yes languages exactly")

# specific mode runs end to end
spec7 = OmqSpec(onto3, dia_f(B), "specific", ("A", "B"))
r7 = core_ompeq_decide_fo(spec7)
print("specific decide:", r7.rewritable, "checked", r7.checked)
assert r7.rewritable

print("all core smoke checks passed")
