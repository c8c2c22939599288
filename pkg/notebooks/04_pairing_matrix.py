"""
Pairing matrices for several blocks
===================================

For n = d_1 ... d_k with all primes 1 mod 8, build the 2k x 2k pairing matrix
from explicit conic solutions and compare it with the block formula in
terms of the higher Redei matrix.
"""

# %%
from shagate import cassels, genus
from shagate.classify import auto_decompose

for n in (1513, 4777, 6497):
    (ds,) = auto_decompose(n)
    sols = cassels.build_cassels_solutions(n, ds)
    t = cassels.pairing_table(n, ds, sols)
    print(f"n={n} blocks {ds} c={sols.c} gamma={sols.gamma} cbar={sols.cbar}")
    print("  A* =", t.a_star.to_lists(), " D* =", list(t.d_star))
    for label, row in zip(t.labels, t.matrix.to_lists()):
        print(f"  {label:4s}", row)
    print("  nondegenerate:", t.nondegenerate, " block formula mismatches:", t.block_mismatches)

# %%
# Two blocks: the quartic-symbol criterion agrees with the matrix check
for n, ds in ((1513, (17, 89)), (4777, (17, 281)), (6497, (73, 89))):
    print(n, cassels.cor2_check(n, *ds), cassels.check_mainthm2(n, ds))
