"""
From a function algebra back to a partition
============================================

A unital subalgebra of functions on a finite set is the span of the
indicators of some partition. Here the span is given in a scrambled basis,
and the atoms are recovered three ways.
"""

import numpy as np

from simplexcert import Alphabet, FunctionSubspace, Partition, atoms_oracle, is_unital_subalgebra
from simplexcert import indicator_via_lagrange, partition_from_subalgebra

P = Partition(Alphabet(6), [(0, 4), (1, 2, 5), (3,)])
mix = np.array([[1.0, 2.0, 0.5], [0.0, 1.0, -1.0], [3.0, 0.0, 1.0]])
V = FunctionSubspace.of_partition(P, mix)
print("basis:\n", V.basis)
print("unital subalgebra:", is_unital_subalgebra(V).verdict)

# common refinement of the level sets of the basis
print("refinement:", partition_from_subalgebra(V).blocks)

# brute force over all 2^6 subsets
print("enumeration:", atoms_oracle(V).blocks)

# one element with distinct values per atom, then Lagrange polynomials
f = np.array([1.0, 2.0, 3.0]) @ V.basis
for block in P.blocks:
    print(f"level {f[block[0]]:+.3f} ->", indicator_via_lagrange(f, f[block[0]]).round(12) + 0.0)

# span{1, x} on three points is not closed: x^2 escapes
W = FunctionSubspace(Alphabet(3), [[1, 1, 1], [0, 1, 2]])
v = is_unital_subalgebra(W)
print("span{1, x}:", v.verdict, "witness", [w.tolist() for w in v.witness])
