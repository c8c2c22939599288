"""Cross-check suites shared by ``shagate verify`` and the acceptance tests.

Every suite returns a report dict with at least ``name``, ``checked``,
``failures`` (a list of short descriptions) and ``ok``.
"""

from __future__ import annotations

import time

from . import cassels, f2linalg as f2, genus
from .classgroup import class_group, oracle_ranks
from .classify import auto_decompose
from .errors import InternalConsistencyError
from .ntheory import (additive_jacobi, delta_conditions, delta_n, factor_squarefree,
                      is_squarefree, primes_in_class)
from .selmer import s2


def _report(name: str, checked: int, failures: list, start: float, **extra) -> dict:
    out = {"name": name, "checked": checked, "failures": failures[:50],
           "failure_count": len(failures), "ok": not failures,
           "seconds": round(time.perf_counter() - start, 3)}
    out.update(extra)
    return out


def remark1() -> dict:
    """Every worked value for n = 13 * 17."""
    start = time.perf_counter()
    n = 221
    fails = []
    r = genus.redei_matrix(n)
    sols = [s.triple for s in genus.all_primitive_solutions(0, 13, n, 20)]
    checks = {
        "redei": r.to_lists() == [[0, 0, 1], [0, 0, 0]],
        "h4": genus.h4(n) == 1,
        "norm_divisors": [e.value for e in genus.norm_divisors(n)] == [1, 13, 17, 221],
        # (4, 3, 19) is a third primitive solution below 20
        "solutions": sols == [(1, 2, 9), (4, 1, 15), (4, 3, 19)],
        "C": genus.c_vector(9, n).to_list() == [0, 0],
        "C_prime": genus.c_vector(15, n).to_list() == [1, 0],
        "C_in_image": f2.in_image(r, genus.c_vector(9, n)),
        "C_prime_in_image": f2.in_image(r, genus.c_vector(15, n)),
        "in_4A": genus.in_4A_genus(13, n),
        "h8": genus.h8_genus(n) == 1,
        "invariant_factors": class_group(n).invariant_factors == (8, 2),
    }
    fails = [k for k, v in checks.items() if not v]
    return _report("remark1", len(checks), fails, start, checks=checks)


def litian(bound: int = 100_000) -> dict:
    """Seven-way characterization of delta_p for primes p = 1 mod 8 below bound,
    and delta_n odd iff h8(n) = 0 for all-1-mod-8 n with h4 = 1 below bound."""
    start = time.perf_counter()
    fails = []
    primes = primes_in_class(bound, 8, 1)
    for p in primes:
        conds = delta_conditions(p)
        h8 = oracle_ranks(p)[2]
        conds[7] = int(h8 == 0)
        if len(set(conds.values())) != 1:
            fails.append(f"p={p}: {conds}")
    composite = 0
    for n in range(17, bound, 8):
        if not is_squarefree(n):
            continue
        nn = factor_squarefree(n)
        if nn.k < 2 or not nn.all_primes_mod(8, 1) or genus.h4(nn) != 1:
            continue
        composite += 1
        dn = delta_n(nn)
        hg = genus.h8_genus(nn)
        ho = oracle_ranks(nn)[2]
        if (dn == 1) != (hg == 0) or hg != ho:
            fails.append(f"n={n}: delta_n={dn}, h8 genus={hg}, oracle={ho}")
    return _report("litian", len(primes) + composite, fails, start,
                   primes=len(primes), composites=composite)


def genus_vs_oracle(bound: int = 20_000) -> dict:
    start = time.perf_counter()
    fails = []
    n4 = n8 = 0
    for n in range(1, bound + 1):
        if n % 4 in (0, 3) or not is_squarefree(n):
            continue
        nn = factor_squarefree(n)
        o = oracle_ranks(nn)
        n4 += 1
        if genus.h4(nn) != o[1]:
            fails.append(f"h4({n})")
        if nn.all_primes_mod(4, 1):
            n8 += 1
            if genus.h8_genus(nn) != o[2]:
                fails.append(f"h8({n})")
    return _report("genus", n4 + n8, fails, start, h4_checked=n4, h8_checked=n8)


def one_block_dual(bound: int = 100_000) -> dict:
    """Genus criterion vs closed-form pairing value on the one-block family."""
    start = time.perf_counter()
    fails = []
    count = 0
    for n in range(17, bound + 1, 8):
        if not is_squarefree(n):
            continue
        nn = factor_squarefree(n)
        if not nn.all_primes_mod(4, 1) or genus.h4(nn) != 1:
            continue
        count += 1
        crit = cassels.parity_criterion(nn)
        pair = cassels.theorem1_pairing(nn)
        if crit != pair.nondegenerate:
            fails.append(f"n={n}: criterion={crit}, pairing={pair.value}")
        if s2(nn) != 2:
            fails.append(f"n={n}: s2 != 2")
    return _report("one_block", count, fails, start)


def decomposed_instances(bound: int, min_k: int = 1):
    for n in range(17, bound + 1, 8):
        if not is_squarefree(n):
            continue
        nn = factor_squarefree(n)
        if not nn.all_primes_mod(8, 1):
            continue
        for ds in auto_decompose(nn):
            if len(ds) >= min_k:
                yield nn.value, ds


def check_pairing_instance(n: int, ds: tuple[int, ...]) -> list[str]:
    """All consistency properties of one decomposed instance; returns failure notes."""
    out = []
    k = len(ds)
    try:
        sols = cassels.build_cassels_solutions(n, ds)
        table = cassels.pairing_table(n, ds, sols)
    except InternalConsistencyError as e:
        return [f"{n} {ds}: {e}"]
    m = table.matrix
    if not m.is_symmetric() or any(m[i, i] for i in range(2 * k)):
        out.append(f"{n} {ds}: not symmetric with zero diagonal")
    if table.block_mismatches:
        out.append(f"{n} {ds}: block formula differs at {table.block_mismatches}")
    for i in range(k):
        for j in range(k):
            if i != j and (additive_jacobi(sols.cbar[j], ds[i])
                           != additive_jacobi(sols.c[i], ds[j])):
                out.append(f"{n} {ds}: [cbar_{j}/d_{i}] != [c_{i}/d_{j}]")
    hr = genus.higher_redei(n, ds)
    if any(sum(row) % 2 for row in hr.a_star.to_lists()):
        out.append(f"{n} {ds}: A* row sum nonzero")
    if genus.higher_redei(n, ds, order="reversed").a_star != hr.a_star:
        out.append(f"{n} {ds}: A* changes under reversed search order")
    if genus.higher_redei(n, ds, fresh_last=True).a_star != hr.a_star:
        out.append(f"{n} {ds}: fresh c_k changes A*")
    for i in range(2 * k):
        for j in range(2 * k):
            if not cassels.verify_local_pairing_odd(n, ds, i, j, sols, table):
                out.append(f"{n} {ds}: local symbol differs at ({i},{j})")
    return out


def pairing(bound: int = 5_000, min_k: int = 1) -> dict:
    start = time.perf_counter()
    fails = []
    count = 0
    multi = 0
    for n, ds in decomposed_instances(bound, min_k):
        count += 1
        multi += len(ds) >= 2
        fails += check_pairing_instance(n, ds)
    t1 = one_block_dual(bound)
    fails += t1["failures"]
    return _report("pairing", count + t1["checked"], fails, start,
                   decomposed=count, multi_block=multi, one_block=t1["checked"])


SUITES = {
    "remark1": remark1,
    "litian": litian,
    "pairing": pairing,
    "genus": genus_vs_oracle,
}
