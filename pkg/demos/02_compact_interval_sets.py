"""How the compact structure works, step by step.

Shows the greedy decomposition into independent sets, the two Elias-Fano
sequences per set, and the two rank operations that answer a query.
"""

import numpy as np

from trajindex import EliasFanoSeq
from trajindex.temporal.iis import decompose_independent_sets

# a small interval family with some nesting
starts = np.array([1, 2, 5, 3, 6, 0])
ends = np.array([4, 3, 8, 9, 7, 10])
print("intervals:", list(zip(starts.tolist(), ends.tolist())))

assignment, m = decompose_independent_sets(starts, ends)
print(f"decomposed into m = {m} independent sets")
for k in range(m):
    members = np.flatnonzero(assignment == k)
    members = members[np.argsort(starts[members])]
    print(f"  set {k}: {[(int(starts[i]), int(ends[i])) for i in members]}")

# inside one set, starts and ends are both strictly increasing, so each
# becomes a monotone sequence with rank support
k = int(assignment[0])
members = np.flatnonzero(assignment == k)
members = members[np.argsort(starts[members])]
u = int(ends.max()) + 1
starts_seq = EliasFanoSeq.from_values(starts[members], u)
ends_seq = EliasFanoSeq.from_values(ends[members], u)
print(f"\nset {k} encoded over universe {u}:")
print(f"  starts {starts_seq.to_array().tolist()} -> {starts_seq.payload_bits} payload bits")
print(f"  ends   {ends_seq.to_array().tolist()} -> {ends_seq.payload_bits} payload bits")

l, r = 4, 6
last = starts_seq.rank(r)        # intervals starting at or before r
first = ends_seq.rank(l - 1)     # intervals ending before l do not qualify
print(f"\nquery [{l}, {r}]: rank(starts, {r}) = {last}, rank(ends, {l - 1}) = {first}")
print("matching set-local positions:", list(range(first, last)))
print("matching intervals:", [(int(starts[members[i]]), int(ends[members[i]]))
                              for i in range(first, last)])
