import sys
sys.path.insert(0, "src")

from definability.automata import dfa_language_equal
from definability.hornlinear import (
    atomic_types_via_behaviors,
    build_typeset_dfa,
    check_ompq_fo_eq_witness,
    check_ompq_fo_witness,
    criterion_ompq_fo,
    criterion_ompq_fo_eq,
    omaq_language_dfa_linear,
)
from definability.ltl.chase import certain_answer, chase_canonical
from definability.ltl.syntax import AboxWord, Axiom, OmqSpec, Ontology, atom, conj, wrap
from definability.ltl.types import encode_letter, omq_language_dfa

A, B, C, D, E = (atom(x) for x in "ABCDE")

# --- fixture 1: A -> next_f B, query B (Boolean OMAQ, EDB-probe rule)
o4 = Ontology((Axiom((A,), (wrap("next_f", B),)),))
q4 = OmqSpec(o4, B, "boolean", ("A", "B"))
lin = omaq_language_dfa_linear(q4)
gen = omq_language_dfa(q4)
print("q4 linear states:", lin.n_states, "generic states:", gen.n_states)
print("q4 languages equal:", dfa_language_equal(lin, gen))
w = encode_letter({"A"})
print("q4 accepts [A]:", lin.delta[w][lin.initial] in lin.finals, "(expect True)")
e = encode_letter(set())
print("q4 accepts empty:", lin.initial in lin.finals, "(expect False)")

# --- fixture 2: chain through an IDB atom
M = atom("M")
o_chain = Ontology((
    Axiom((wrap("next_p", A),), (M,)),
    Axiom((wrap("next_p", M),), (B,)),
))
q_chain = OmqSpec(o_chain, B, "boolean", ("A", "B"))
print("chain languages equal:",
      dfa_language_equal(omaq_language_dfa_linear(q_chain), omq_language_dfa(q_chain)))

# --- fixture 3: trigger offset folding (IDB two steps back)
M2 = atom("M2")
o_fold = Ontology((
    Axiom((A,), (M2,)),
    Axiom((wrap("next_p", wrap("next_p", M2)),), (B,)),
))
q_fold = OmqSpec(o_fold, B, "boolean", ("A", "B"))
print("fold languages equal:",
      dfa_language_equal(omaq_language_dfa_linear(q_fold), omq_language_dfa(q_fold)))

# --- fixture 4: falsum route
Ap, Bp = atom("A1"), atom("B1")
o2 = Ontology((
    Axiom((wrap("next_p", A),), (Bp,)),
    Axiom((wrap("next_p", Bp),), (Ap,)),
    Axiom((A, Bp), ()),
))
q2 = OmqSpec(o2, C, "boolean", ("A", "C"))
lin4 = omaq_language_dfa_linear(q2)
print("bot languages equal:", dfa_language_equal(lin4, omq_language_dfa(q2)))
aa = encode_letter({"A"})
st = lin4.delta[aa][lin4.delta[aa][lin4.initial]]
print("bot accepts [A,A]:", st in lin4.finals, "(expect True: inconsistent)")
print("bot accepts [A]:", lin4.delta[aa][lin4.initial] in lin4.finals, "(expect False)")

# --- fixture 5: specific-mode OMAQ through the linear route
q4x = OmqSpec(o4, B, "specific", ("A", "B"))
print("specific languages equal:",
      dfa_language_equal(omaq_language_dfa_linear(q4x), omq_language_dfa(q4x)))

# --- certain atoms vs chase on the parity ontology
B0, B1, A0, A1 = (atom(x) for x in ("B0", "B1", "A0", "A1"))
o3 = Ontology((
    Axiom((wrap("next_p", B0), A0), (B0,)),
    Axiom((wrap("next_p", B1), A0), (B1,)),
    Axiom((wrap("next_p", B1), A1), (B0,)),
    Axiom((wrap("next_p", B0), A1), (B1,)),
))
sig3 = ("A0", "A1", "B0", "E")
q3 = OmpqSpec = OmqSpec(o3, conj([B0, E]), "boolean", sig3)

word = [encode_letter({"B0"}), encode_letter({"A1"}), encode_letter({"A0"}),
        encode_letter({"A1", "E"})]
taus = atomic_types_via_behaviors(q3, word)
print("certain atoms along word:", [sorted(t) for t in taus])

abox_sig = sig3
masks = []
for atoms in ({"B0"}, {"A1"}, {"A0"}, {"A1", "E"}):
    masks.append(sum(1 << abox_sig.index(a) for a in atoms))
abox = AboxWord(abox_sig, tuple(masks))
win = chase_canonical(o3, abox)
chase_taus = []
for i in range(len(abox)):
    row = win.rows[i - win.lo] if False else win.rows[(0 + i) - win.lo]
    chase_taus.append(sorted(a for j, a in enumerate(win.signature) if row >> j & 1))
print("chase atoms along word:  ", chase_taus)
want = [sorted(t & set(win.signature)) for t in taus]
print("match:", [sorted(t) for t in taus] == chase_taus)

print("boolean certain answer (expect False, two ones... e=101 has two 1s -> even -> True):",
      certain_answer(q3, abox))

# --- type-set automaton and the pumping criteria
tsd = build_typeset_dfa(q3)
print("typeset dfa states:", tsd.dfa.n_states, "types:", tsd.type_count)
gen3dfa = omq_language_dfa(q3)
print("typeset language equals generic:", dfa_language_equal(tsd.dfa, gen3dfa))

res_fo = criterion_ompq_fo(q3)
print("q3 order-rewritable:", res_fo.rewritable, "(expect False)")
print("q3 witness:", res_fo.witness)
if res_fo.witness is not None:
    print("q3 witness replays:", check_ompq_fo_witness(tsd, res_fo.witness))

res_foeq = criterion_ompq_fo_eq(q3)
print("q3 congruence-rewritable:", res_foeq.rewritable, "(expect False)")
if res_foeq.witness is not None:
    print("q3 eq-witness replays:", check_ompq_fo_eq_witness(tsd, res_foeq.witness))
else:
    print("q3 eq-witness: None")

# --- a rewritable OMPQ: next_p A -> B, query somewhere (B and D)
o_simple = Ontology((Axiom((wrap("next_p", A),), (B,)),))
q_simple = OmqSpec(o_simple, conj([B, D]), "boolean", ("A", "B", "D"))
res = criterion_ompq_fo(q_simple)
print("simple OMPQ order-rewritable:", res.rewritable, "(expect True)")
tsd_s = build_typeset_dfa(q_simple)
print("simple typeset language equals generic:",
      dfa_language_equal(tsd_s.dfa, omq_language_dfa(q_simple)))
