"""Close a one-norm system over B4 and ask what it outputs.

    python3 demos/closure_and_output.py
"""
from pathlib import Path

from iolog.norms import close, load_norms, out

nf = load_norms(Path(__file__).parent / "data" / "b4_pq.json")
alg, n = nf.alg, nf.relation
lab = alg.label

closed, trace = close(n, "N1")
print(f"N = {n!r}")
print(f"N1 closure ({len(closed)} pairs):", ", ".join(f"({lab(a)},{lab(x)})" for a, x in closed))

print("\nwhy (0,q)?")
for pair, rule, premises in trace.explain((alg.bottom, alg.element("q"))):
    src = " ".join(f"({lab(a)},{lab(x)})" for a, x in premises)
    print(f"  ({lab(pair[0])},{lab(pair[1])})  by {rule:<4} {src}")

for inputs in ([alg.element("p")], [alg.bottom], []):
    got = sorted(lab(x) for x in out(n, "N1", inputs))
    print(f"out({[lab(a) for a in inputs]}) = {got}")
