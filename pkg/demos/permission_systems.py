"""The four kinds of permission on the running B4 example.

N obliges q under p; P explicitly permits p under q.

    python3 demos/permission_systems.py
"""
from iolog.algebra import catalog
from iolog.norms import NormRelation, close
from iolog.permissions import (check_rule_closure, cross_coherent, dual_negative,
                               dynamic_positive, generalized_dynamic, negative_permission,
                               static_positive)

alg, b = catalog("B4")
p, q = alg.element("p"), alg.element("q")
N = NormRelation.from_pairs(alg, [(p, q)])
P = NormRelation.from_pairs(alg, [(q, p)])


def show(title, rel):
    body = ", ".join(f"({alg.label(a)},{alg.label(x)})" for a, x in rel)
    print(f"{title:<28} {len(rel):>2}  {body}")


closed = close(N, "N1")[0]
show("negative P_N, complement", negative_permission(N).complement())
show("dual negative D_N", dual_negative(closed))
show("static S(P,N)", static_positive(P, N, "N1"))
show("dynamic D(P,N)", dynamic_positive(P, N, "N1"))
show("generalized E, family {N1}", generalized_dynamic(P, N, "N1", [closed]))

print("\ncross-coherent with P:", cross_coherent(P, N, "N1").holds)
bad = cross_coherent(NormRelation.from_pairs(alg, [(p, p)]), N, "N1")
print("cross-coherent with {(p,p)}:", bad.holds, "witness", tuple(alg.label(x) for x in bad.witness))

# N is not SI-closed, so the complement of P_N need not be SI▷-closed
r = check_rule_closure(negative_permission(N).complement(), "SI▷")
print("P_N complement SI▷-closed:", r.holds, "witness", tuple(alg.label(x) for x in r.witness))

empty = NormRelation.empty(alg)
show("\ndynamic with P = N = {}", dynamic_positive(empty, empty, "N1"))
