"""
Stabilizer entropies two ways
=============================

Build a few small states, then read interval entropies from a GF(2) rank and
from clipped-gauge endpoints.  The two must agree exactly.
"""

import numpy as np

from measgeom.stabilizer import (RegionSpec, apply_clifford, clip_gauge, endpoints,
                                 entropy_clipped, entropy_rank, new_product_state)

# a Bell pair shares one bit between its halves
bell = new_product_state(2)
apply_clifford(bell, "H", 0)
apply_clifford(bell, "CNOT", [0, 1])
print("Bell S(0) =", entropy_rank(bell, [0]))

# GHZ on four qubits: every proper interval carries one bit
ghz = new_product_state(4)
apply_clifford(ghz, "H", 0)
for q in range(3):
    apply_clifford(ghz, "CNOT", [q, q + 1])
print("GHZ S(|A|=1..3) =", [entropy_rank(ghz, RegionSpec(0, m)) for m in (1, 2, 3)])

# a scrambled state from random two-qubit Cliffords
rng = np.random.default_rng(0)
st = new_product_state(12)
for _ in range(200):
    a, b = rng.choice(12, 2, replace=False)
    apply_clifford(st, ["SWAP", "ISWAP", "CNOT", "CZ"][rng.integers(4)], [int(a), int(b)])
    apply_clifford(st, "H", int(a))

# the rank route works in any gauge; the clipped route needs clip_gauge first
by_rank = [entropy_rank(st, RegionSpec(0, m)) for m in range(13)]
clip_gauge(st)
by_clip = [entropy_clipped(st, RegionSpec(0, m)) for m in range(13)]
print("rank   :", by_rank)
print("clipped:", by_clip)
assert by_rank == by_clip

# endpoints are the left and right edges of each clipped generator
left, right = endpoints(st)
print("generator spans:", list(zip(left.tolist(), right.tolist())))
