"""
Scanning a range
================

Classify every n = 1 mod 8 below a bound whose primes are all 1 mod 8 and
tally the verdicts by number of blocks.
"""

# %%
from collections import Counter

from shagate.cli import scan

records = scan(1, 50_000, "all-1-mod-8")
tally = Counter((r["k"], r["verdict"]) for r in records)
for key in sorted(tally):
    print(key, tally[key])

# %%
k2 = [r["n"] for r in records if r["k"] == 2 and r["verdict"] == "rank0_sha_2_2k"]
print("two-block instances with the full conclusion:", k2[:10])
