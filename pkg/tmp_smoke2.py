import sys
sys.path.insert(0, "src")

from definability.algebra import definability_verdict
from definability.hornlinear import (
    build_typeset_dfa, check_ompq_fo_witness,
    criterion_ompq_fo, criterion_ompq_fo_eq,
)
from definability.ltl.syntax import Axiom, OmqSpec, Ontology, atom, wrap
from definability.ltl.transforms import remove_bot
from definability.ltl.types import omq_language_dfa

A, B, C = atom("A"), atom("B"), atom("C")
# alternation: A(t) forces B(t+1), B(t) forces A(t+1); A and B clash
o2 = Ontology((
    Axiom((wrap("next_p", A),), (B,)),
    Axiom((wrap("next_p", B),), (A,)),
    Axiom((A, B), ()),
))
q2 = OmqSpec(o2, C, "boolean", ("A", "C"))
q2f = remove_bot(q2)

res_fo = criterion_ompq_fo(q2f)
print("q2 order-rewritable:", res_fo.rewritable, "(expect False)")
print("q2 witness:", res_fo.witness)
res_eq = criterion_ompq_fo_eq(q2f)
print("q2 congruence-rewritable:", res_eq.rewritable, "(expect True)")

gen = omq_language_dfa(q2)
print("generic verdict:", definability_verdict(gen).lowest_class)
tsd = build_typeset_dfa(q2f)
print("typeset verdict:", definability_verdict(tsd.dfa).lowest_class)
if res_fo.witness is not None:
    print("q2 witness replays:", check_ompq_fo_witness(tsd, res_fo.witness))
from definability.automata import dfa_language_equal
print("typeset language equals generic:", dfa_language_equal(tsd.dfa, gen))
