"""
The delta bit of a prime p = 1 mod 8
====================================

Six elementary descriptions of the same bit, plus the class-group one
(h8(p) = 0), tabulated over a range of primes.
"""

# %%
import numpy as np

from shagate.classgroup import oracle_ranks
from shagate.ntheory import delta_conditions, primes_in_class, represent_prime

primes = primes_in_class(3000, 8, 1)
table = np.array([[delta_conditions(p)[i] for i in range(1, 7)] + [int(oracle_ranks(p)[2] == 0)]
                  for p in primes])
print(f"{len(primes)} primes, all seven columns agree:", bool((table == table[:, :1]).all()))

# %%
# A few rows: p = u^2 + 8 v^2 = a^2 + 16 b^2 = x^2 - 32 y^2
for p in primes[:8]:
    r = represent_prime(p)
    print(p, (r.u, r.v), (r.a, r.b), (r.x, r.y), "delta =", r.v % 2)

# %%
print("fraction with delta = 1:", table[:, 0].mean().round(3))
