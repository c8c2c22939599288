"""
Genus data for n = 13 * 17
==========================

Redei matrix, norm divisors, C-vectors and the 8-rank of Q(sqrt(-221)),
checked against the explicit class group.
"""

# %%
from shagate import f2linalg as f2, genus
from shagate.classgroup import class_group, h2i_ranks

n = 221
R = genus.redei_matrix(n)
print("Redei matrix:", R.to_lists())
print("h4 =", genus.h4(n))
print("norm divisors:", [e.value for e in genus.norm_divisors(n)])

# %%
# Primitive solutions of z^2 = 13 x^2 + 17 y^2 with small z.  There are three
# below 20, and any of them gives the same verdict on 4A membership.
for sol in genus.all_primitive_solutions(0, 13, n, 20):
    c = genus.c_vector(sol, n)
    print(sol.triple, "C =", c.to_list(), "in Im R:", f2.in_image(R, c))

# %%
print("h8 from genus theory:", genus.h8_genus(n))
g = class_group(n)
print("class group:", g.invariant_factors, "ranks (h2, h4, h8):", h2i_ranks(g))
