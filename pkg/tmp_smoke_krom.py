import sys

sys.path.insert(0, "src")

from definability.automata import nfa_accepts, unary_eventually_constant
from definability.fo import eval_fo_formula
from definability.krom import (
    krom_decide_fo,
    krom_entailment,
    krom_unary_nfa,
)
from definability.ltl.syntax import (
    AboxWord,
    Axiom,
    OmqSpec,
    Ontology,
    atom,
    wrap,
)
from definability.ltl.types import encode_letter, omq_language_dfa



def to_word(sig, letters, marked=None):
    from definability.ltl.types import decode_letter
    masks = []
    for letter in letters:
        atoms, _ = decode_letter(letter)
        m = 0
        for a in atoms:
            m |= 1 << sig.index(a)
        masks.append(m)
    return AboxWord(tuple(sig), tuple(masks), marked_pos=marked)

def of(c, n=1):
    for _ in range(n):
        c = wrap("next_f", c)
    return c


def op(c, n=1):
    for _ in range(n):
        c = wrap("next_p", c)
    return c


A, B, C, Q = atom("A"), atom("B"), atom("C"), atom("Q")

# 1. one-step forcing
o1 = Ontology((Axiom((A,), (of(B),)),))
assert krom_entailment(o1, (True, "A"), (True, "B"), 1)
assert not krom_entailment(o1, (True, "A"), (True, "B"), 0)
assert not krom_entailment(o1, (True, "A"), (True, "B"), 2)
assert krom_entailment(o1, (False, "B"), (False, "A"), -1)
print("1 ok")

# 2. three-step forcing via relays
o2 = Ontology((Axiom((A,), (of(B, 3),)),))
assert krom_entailment(o2, (True, "A"), (True, "B"), 3)
assert not krom_entailment(o2, (True, "A"), (True, "B"), 2)
m = krom_unary_nfa(o2, (True, "A"), (True, "B"))
accepted = [n for n in range(8) if nfa_accepts(m, ("a",) * n)]
assert accepted == [3], accepted
prof = unary_eventually_constant(m)
assert prof.kind == "finite" and prof.lengths == frozenset({3}), prof
print("2 ok")

# 3. self-propagation: cofinite universal forward gaps
o3 = Ontology((Axiom((A,), (of(A),)),))
m = krom_unary_nfa(o3, (True, "A"), (True, "A"))
prof = unary_eventually_constant(m)
assert prof.kind == "cofinite" and not prof.lengths, prof
print("3 ok")

# 4. two-step self-propagation: even gaps, not definable
o4 = Ontology((Axiom((A,), (of(A, 2),)),))
m = krom_unary_nfa(o4, (True, "A"), (True, "A"))
accepted = [n for n in range(9) if nfa_accepts(m, ("a",) * n)]
assert accepted == [0, 2, 4, 6, 8], accepted
prof = unary_eventually_constant(m)
assert prof.kind == "neither", prof
print("4 ok")

# 5. clash at equal timestamps
o5 = Ontology((Axiom((A, B), ()),), )
assert krom_entailment(o5, (True, "A"), (False, "B"), 0)
assert not krom_entailment(o5, (True, "A"), (False, "B"), 1)
print("5 ok")

# 6. units fixpoint: top -> A plus A & B -> bot refutes B everywhere
o6 = Ontology((Axiom((), (A,)), Axiom((A, B), ())))
assert krom_entailment(o6, (True, "B"), (True, "C"), 5)  # B impossible
assert krom_entailment(o6, (True, "C"), (False, "B"), 2)  # ¬B universal
assert not krom_entailment(o6, (True, "C"), (True, "A"), 0) is False  # A universal
assert krom_entailment(o6, (True, "C"), (True, "A"), 0)
print("6 ok")

# 7. inconsistent ontology entails everything
o7 = Ontology((Axiom((), (A,)), Axiom((A,), ())))
assert krom_entailment(o7, (True, "C"), (True, "B"), 4)
print("7 ok")

# 8. decide, boolean mode: clash of A and B at gap 1 with fresh query
o8 = Ontology((Axiom((A, of(B)), ()),))
spec8 = OmqSpec(o8, Q, "boolean", ("A", "B", "Q"))
r8 = krom_decide_fo(spec8)
assert r8.rewritable, r8
lang = omq_language_dfa(spec8)
from definability.automata import dfa_run, words_over

alphabet = lang.alphabet
for w in words_over(alphabet, 4):
    word = to_word(["A", "B", "Q"], w)
    want = dfa_run(lang, w)[1]
    got = eval_fo_formula(r8.formula, word)
    assert got == want, (w, want, got, str(r8.formula))
print("8 ok (boolean emission matches certain answers on all words up to length 4)")

# 9. decide, boolean: parity clash is flagged
o9 = Ontology((Axiom((A,), (of(A, 2),)), Axiom((A, B), ())))
spec9 = OmqSpec(o9, Q, "boolean", ("A", "B", "Q"))
r9 = krom_decide_fo(spec9)
assert not r9.rewritable, r9
assert any("excludes" in b for b in r9.blockers), r9.blockers
print("9 ok", r9.blockers)

# 10. decide, specific mode: A forces Q two steps later
o10 = Ontology((Axiom((A,), (of(Q, 2),)),))
spec10 = OmqSpec(o10, Q, "specific", ("A", "Q"))
r10 = krom_decide_fo(spec10)
assert r10.rewritable, r10
lang10 = omq_language_dfa(spec10)
from definability.ltl.types import powerset_alphabet

plain = powerset_alphabet(("A", "Q"))
for w in words_over(plain, 3):
    for pos in range(len(w)):
        marked = tuple(
            encode_letter(frozenset(x for x in c.split(",") if x and x != "-"), i == pos)
            for i, c in enumerate(w)
        )
        want = dfa_run(lang10, marked)[1]
        word = to_word(["A", "Q"], w)
        got = pos in eval_fo_formula(r10.formula, word)
        assert got == want, (w, pos, want, got, str(r10.formula))
print("10 ok (specific emission matches certain answers on all words up to length 3)")

# 11. specific-mode parity forcing is flagged
o11 = Ontology((Axiom((A,), (of(Q, 2),)), Axiom((A,), (of(A, 2),))))
spec11 = OmqSpec(o11, Q, "specific", ("A", "Q"))
r11 = krom_decide_fo(spec11)
assert not r11.rewritable, r11
print("11 ok", r11.blockers)

print("all krom smoke checks passed")
