"""Pure 2-Selmer groups of y^2 = x^3 - n^2 x via the Monsky matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import f2linalg as f2
from .errors import InternalConsistencyError, PreconditionError
from .f2linalg import BitMatrix, BitVector
from .ntheory import SquarefreeInteger, additive_legendre, factor_squarefree, legendre

MAX_OMEGA = 12


@dataclass(frozen=True, order=True)
class SelmerTriple:
    """(d1, d2, d3) modulo squares with d1 d2 d3 a square."""

    d1: int
    d2: int
    d3: int

    def __post_init__(self):
        prod = self.d1 * self.d2 * self.d3
        if prod <= 0 or math.isqrt(prod) ** 2 != prod:
            raise ValueError(f"{self} does not multiply to a square")

    @classmethod
    def from_pair(cls, d1: int, d2: int) -> "SelmerTriple":
        g = math.gcd(d1, d2)
        return cls(d1, d2, (d1 // g) * (d2 // g))

    def as_tuple(self) -> tuple[int, int, int]:
        return self.d1, self.d2, self.d3


def _odd_n(n) -> SquarefreeInteger:
    n = factor_squarefree(n)
    if n.value % 2 == 0:
        raise PreconditionError(f"n = {n.value} must be odd")
    return n


def a_matrix(n) -> BitMatrix:
    """A with a_ij = [p_j/p_i] off the diagonal and zero row sums."""
    ps = factor_squarefree(n).primes
    k = len(ps)
    rows = []
    for i in range(k):
        row = [0 if i == j else additive_legendre(ps[j], ps[i]) for j in range(k)]
        row[i] = sum(row) % 2
        rows.append(row)
    return BitMatrix.from_rows(rows, k)


def _diag(bits: list[int]) -> BitMatrix:
    return BitMatrix(len(bits), len(bits), tuple(b << i for i, b in enumerate(bits)))


def monsky_matrix(n) -> BitMatrix:
    n = _odd_n(n)
    a = a_matrix(n)
    d2 = _diag([additive_legendre(2, p) for p in n.primes])
    dm2 = _diag([additive_legendre(-2, p) for p in n.primes])
    return BitMatrix.block([[a + dm2, d2], [d2, a + d2]])


def s2(n) -> int:
    n = _odd_n(n)
    return 2 * n.k - f2.rank(monsky_matrix(n))


def _divisor_from_bits(primes, bits) -> int:
    return math.prod(p for p, b in zip(primes, bits) if b)


def kernel_to_triple(x: BitVector, n) -> SelmerTriple:
    n = _odd_n(n)
    m = monsky_matrix(n)
    if len(x) != m.cols:
        raise PreconditionError(f"vector length {len(x)} does not match 2k = {m.cols}")
    if not (m @ x).is_zero():
        raise PreconditionError("vector is not in the kernel of the Monsky matrix")
    bits = x.to_list()
    k = n.k
    return SelmerTriple.from_pair(_divisor_from_bits(n.primes, bits[:k]),
                                  _divisor_from_bits(n.primes, bits[k:]))


def local_conditions(t: SelmerTriple, p: int, n) -> bool:
    """Local solvability at an odd p | n for a normalized triple."""
    n = _odd_n(n)
    nv = n.value
    if nv % p:
        raise PreconditionError(f"{p} does not divide {nv}")
    d1, d2 = t.d1, t.d2
    if d1 <= 0 or d2 <= 0 or nv % d1 or nv % d2:
        raise PreconditionError(f"{t} is not normalized for n = {nv}")
    in1, in2 = d1 % p == 0, d2 % p == 0
    if not in1 and not in2:
        pair = (d1, d2)
    elif not in1:
        pair = (2 * d1, 2 * nv // d2)
    elif not in2:
        pair = (-2 * nv // d1, 2 * d2)
    else:
        pair = (-nv // d1, nv // d2)
    return all(legendre(v, p) == 1 for v in pair)


def enumerate_selmer(n) -> list[SelmerTriple]:
    """Normalized representatives of the pure 2-Selmer group by brute force."""
    n = _odd_n(n)
    if n.k > MAX_OMEGA:
        raise PreconditionError(f"omega(n) = {n.k} exceeds the enumeration guard {MAX_OMEGA}")
    divs = n.divisors()
    out = []
    for d1 in divs:
        for d2 in divs:
            t = SelmerTriple.from_pair(d1, d2)
            if all(local_conditions(t, p, n) for p in n.primes):
                out.append(t)
    m = monsky_matrix(n)
    kernel = {kernel_to_triple(v, n) for v in f2.span(f2.kernel_basis(m), m.cols)}
    if set(out) != kernel:
        raise InternalConsistencyError(
            f"Selmer enumeration for {n.value} has {len(out)} triples, kernel gives {len(kernel)}")
    return sorted(out)


@dataclass(frozen=True)
class SelmerBasis:
    """Generators of the pure 2-Selmer group when it has rank 2."""

    first: SelmerTriple
    second: SelmerTriple
    case: str
    d: int
    x: tuple[int, ...]


def selmer_basis_h4_1(n) -> SelmerBasis:
    """Basis (d, d*, d d*), (n, n, 1) for n = 1 mod 8 with all p = 1 mod 4 and h4 = 1.

    Case I (rank A = k-2): x is a kernel vector of A other than 0 and all-ones, d* = d.
    Case II (rank A = k-1): x solves A x = B with b_i = [2/p_i], d* = n/d.
    """
    from .genus import h4

    n = _odd_n(n)
    if n.mod8 != 1 or not n.all_primes_mod(4, 1):
        raise PreconditionError(f"{n.value} is outside the n = 1 mod 8, p = 1 mod 4 family")
    if h4(n) != 1:
        raise PreconditionError(f"h4({n.value}) != 1")
    k = n.k
    a = a_matrix(n)
    r = f2.rank(a)
    nv = n.value
    if r == k - 2:
        ones = (1 << k) - 1
        ker = f2.kernel_basis(a)
        x = next(v for v in ker if v.bits not in (0, ones))
        d = _divisor_from_bits(n.primes, x.to_list())
        first, case = SelmerTriple.from_pair(d, d), "I"
    elif r == k - 1:
        b = BitVector.from_list([additive_legendre(2, p) for p in n.primes])
        x = f2.solve(a, b)
        if x is None:
            raise InternalConsistencyError(f"B not in Im A for {nv} although rank A = k-1")
        d = _divisor_from_bits(n.primes, x.to_list())
        first, case = SelmerTriple.from_pair(d, nv // d), "II"
    else:
        raise InternalConsistencyError(f"rank A = {r} impossible with h4 = 1 (k = {k})")
    return SelmerBasis(first, SelmerTriple(nv, nv, 1), case, d, tuple(x.to_list()))
