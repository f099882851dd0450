import sys

sys.path.insert(0, "src")

from definability.automata import dfa_run, words_over
from definability.fo import eval_fo_formula
from definability.krom import krom_decide_fo, krom_unary_nfa
from definability.automata import unary_eventually_constant
from definability.ltl.syntax import AboxWord, Axiom, OmqSpec, Ontology, atom, wrap
from definability.ltl.types import decode_letter, encode_letter, omq_language_dfa, powerset_alphabet


def of(c, n=1):
    for _ in range(n):
        c = wrap("next_f", c)
    return c


def op(c, n=1):
    for _ in range(n):
        c = wrap("next_p", c)
    return c


def to_word(sig, letters, marked=None):
    masks = []
    for letter in letters:
        atoms, _ = decode_letter(letter)
        m = 0
        for a in atoms:
            m |= 1 << sig.index(a)
        masks.append(m)
    return AboxWord(tuple(sig), tuple(masks), marked_pos=marked)


B, C, Q = atom("B"), atom("C"), atom("Q")

# clash gaps between B and C form the even numbers (not definable), but both
# atoms force the query at every sufficiently large gap, so the rewriting
# only needs the clash gaps below the two cofinite thresholds
P, R = atom("P"), atom("R")
onto = Ontology(
    (
        Axiom((B,), (of(P),)),
        Axiom((P,), (of(P),)),
        Axiom((P,), (Q,)),
        Axiom((C,), (op(R),)),
        Axiom((R,), (op(R),)),
        Axiom((R,), (Q,)),
        Axiom((B,), (of(B, 2),)),
        Axiom((B, C), ()),
    )
)
spec = OmqSpec(onto, Q, "specific", ("B", "C", "Q"))

m = krom_unary_nfa(onto, (True, "B"), (False, "C"))
prof = unary_eventually_constant(m)
assert prof.kind == "neither", prof  # the clash language alone is not definable

from definability.automata import UnaryProfile
pf = unary_eventually_constant(krom_unary_nfa(onto, (True, "B"), (True, "Q")))
pb = unary_eventually_constant(krom_unary_nfa(onto, (False, "Q"), (False, "C")))
assert pf.kind == "cofinite" and pf.lengths == frozenset({0}), pf
assert pb.kind == "cofinite" and pb.lengths == frozenset({0}), pb
res = krom_decide_fo(spec)
assert res.rewritable, res
print("rewritable with truncated clash disjunct")
print(str(res.formula)[:200], "...")

lang = omq_language_dfa(spec)
plain = powerset_alphabet(("B", "C", "Q"))
checked = 0
for w in words_over(plain, 3):
    for pos in range(len(w)):
        marked = tuple(
            encode_letter(frozenset(x for x in c.split(",") if x and x != "-"), i == pos)
            for i, c in enumerate(w)
        )
        want = dfa_run(lang, marked)[1]
        word = to_word(["B", "C", "Q"], w)
        got = pos in eval_fo_formula(res.formula, word)
        assert got == want, (w, pos, want, got)
        checked += 1
print(f"emission matches certain answers on {checked} marked words")

# longer spot checks: clash at even gap 6 (covered by forcing disjuncts)
w = ("B", "-", "-", "-", "-", "-", "C")
marked_words = [
    tuple(encode_letter(frozenset({a} if a != "-" else ()), i == p) for i, a in enumerate(w))
    for p in range(len(w))
]
word = to_word(["B", "C", "Q"], w)
answers = eval_fo_formula(res.formula, word)
want_answers = frozenset(
    p for p, mw in enumerate(marked_words) if dfa_run(lang, mw)[1]
)
assert answers == want_answers, (answers, want_answers)
print("gap-6 clash word agrees:", sorted(answers))
print("threshold smoke passed")
