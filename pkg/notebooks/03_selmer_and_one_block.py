"""
Selmer groups and the one-block criterion
=========================================

For n = 1 mod 8 with every prime 1 mod 4 and h4(n) = 1 the pure 2-Selmer
group has rank 2, and the pairing of its two generators decides whether
Sha[2^inf] = (Z/2)^2 with rank zero.
"""

# %%
from shagate import cassels, genus, selmer

for n in (17, 41, 65, 145, 185):
    b = selmer.selmer_basis_h4_1(n)
    p = cassels.theorem1_pairing(n)
    print(f"n={n:4d} s2={selmer.s2(n)} case {b.case} d={b.d:3d} "
          f"generators {b.first.as_tuple()} {b.second.as_tuple()} "
          f"solution {p.solution.triple} pairing {p.value:+d} "
          f"h8={genus.h8_genus(n)} d(n)={genus.d_of_n(n)}")

# %%
# The same verdict from 8-ranks alone
for n in (17, 41, 65, 145, 185):
    print(n, cassels.parity_criterion(n))
