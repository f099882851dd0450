import json

from definability.dispatch import decide_rewritability
from definability.ltl.syntax import Axiom, Ontology, OmqSpec, atom, conj, wrap

A, B, C, D = atom("A"), atom("B"), atom("C"), atom("D")


def of(c, n=1):
    for _ in range(n):
        c = wrap("next_f", c)
    return c


def op(c, n=1):
    for _ in range(n):
        c = wrap("next_p", c)
    return c


dia_f = lambda c: wrap("dia_f", c)
dia_p = lambda c: wrap("dia_p", c)


def show(spec, target, **kw):
    rep = decide_rewritability(spec, target, **kw)
    blob = json.dumps(rep.to_jsonable(), sort_keys=True)
    print(f"{target:6} -> {rep.verdict:10} via {rep.route:18} ({len(blob)} bytes json)")
    return rep


# core OMPQ, rewritable
onto3 = Ontology((Axiom((A,), (of(B, 2),)),))
spec3 = OmqSpec(onto3, dia_p(dia_f(B)), "boolean", ("A", "B"))
r = show(spec3, "fo")
assert (r.verdict, r.route) == ("yes", "core-to-linear"), r

# core OMPQ, parity -> not order-definable
onto6 = Ontology((Axiom((A,), (of(A, 2),)),))
spec6 = OmqSpec(onto6, dia_p(dia_f(conj([A, B]))), "boolean", ("A", "B"))
for route in ("auto", "core-to-linear", "generic-monoid", "typeset-cycle"):
    r = show(spec6, "fo", route=route)
    assert r.verdict == "no", (route, r)
r = show(spec6, "fo", route="core-support")
assert r.verdict == "no" and r.route == "core-support"
r = show(spec6, "fo-eq")
assert (r.verdict, r.route) == ("yes", "clause-class-fast")
r = show(spec6, "ladder")
assert r.verdict == "FO_LT_EQ" and r.route == "core-to-linear", r

# the OMPEQ variant takes the small-support scan
from definability.ltl.syntax import disj

spec_or = OmqSpec(onto6, dia_p(dia_f(disj([conj([A, B]), conj([A, C])]))), "boolean", ("A", "B", "C"))
r = show(spec_or, "fo")
assert r.route == "core-support" and r.verdict == "no", r

# krom OMAQ routes
onto_k = Ontology((Axiom((A,), (of(B),)), Axiom((B,), (of(A),))))
spec_k = OmqSpec(onto_k, C, "boolean", ("A", "B", "C"))
r = show(spec_k, "fo")
assert r.route == "krom-unary", r
r = show(spec_k, "ladder")
assert r.route == "krom-unary", r

# genuinely krom (non-horn) OMAQ: headless disjunction is not core
onto_k2 = Ontology((Axiom((), (A, B)), Axiom((A,), (of(C),))))
print("clause class:", onto_k2.clause_class)
assert onto_k2.clause_class == "krom"
spec_k2 = OmqSpec(onto_k2, C, "boolean", ("A", "B", "C"))
r = show(spec_k2, "fo-eq")
assert (r.verdict, r.route) == ("yes", "clause-class-fast"), r

# linear horn OMAQ (three-atom body keeps it out of the binary classes)
onto_l = Ontology((Axiom((A, B), (of(B),)), Axiom((B,), (C,))))
print("clause class:", onto_l.clause_class, "linear:", onto_l.is_linear)
spec_l = OmqSpec(onto_l, C, "boolean", ("A", "B", "C"))
r = show(spec_l, "fo")
assert r.route == "linear-walker", r
r = show(spec_l, "ladder")
assert r.route == "linear-walker", r

# linear horn OMPQ -> typeset; fo-mod -> generic with the open-fragment note
spec_lp = OmqSpec(onto_l, dia_f(conj([B, C])), "boolean", ("A", "B", "C"))
r = show(spec_lp, "fo")
assert r.route == "typeset-cycle", r
r = show(spec_lp, "fo-mod")
assert r.route == "generic-monoid" and any("modulo" in n for n in r.notes), r

# box-profile ontology falls back to the generic pipeline
onto_b = Ontology((Axiom((A,), (wrap("box_f", B),)),))
spec_b = OmqSpec(onto_b, conj([B, C]), "boolean", ("A", "B", "C"))
r = show(spec_b, "fo")
assert r.route == "generic-monoid", r
r = show(spec_b, "ladder")
assert r.verdict == "FO_LT", r

# specific mode through dispatch
spec_s = OmqSpec(onto3, dia_f(B), "specific", ("A", "B"))
r = show(spec_s, "fo")
assert r.verdict == "yes", r

print("dispatch smoke ok")
