"""Heap models, biabduction and a frame-rule pitfall."""
from bunchworks import models, slverify as sv, symheap as sh

m = models.heap_ppm(2, 2)
print(m.name, "complex algebra size", models.complex_algebra(m).n)
for clause, (ok, why) in models.check_inttocl(m).items():
    print(f"  {clause:4} {ok}  {why}")

for h, c in (("x |-> a", "x |-> a * y |-> b"), ("x |-> a * y |-> b", "y |-> b")):
    for s in sh.biabduce(h, c):
        print(f"{h} * [{s.to_json()['antiframe']}] |= {c} * [{s.to_json()['frame']}]")

bad = sv.cons_frame_counterexample()
verdict = sv.triple_valid(bad, sv.SLBounds(4, 4), 64)
print("framed triple without the side condition:", verdict.status)
print("  from", verdict.initial, "to", verdict.outcome)
