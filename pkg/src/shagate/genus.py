"""Gauss genus theory for Q(sqrt(-n)): Redei matrices, norm equations, 4- and 8-ranks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import f2linalg as f2
from .errors import (InternalConsistencyError, NotANorm, PreconditionError,
                     SearchBudgetExceeded)
from .f2linalg import BitMatrix, BitVector
from .ntheory import (SquarefreeInteger, additive_jacobi, additive_legendre,
                      factor_squarefree, legendre)

DEFAULT_BUDGET = 10 ** 6
ORDERS = ("ascending", "reversed")
# the "reversed" solver returns the largest-c solution with c <= REVERSED_WINDOW * c_min
REVERSED_WINDOW = 5


@dataclass(frozen=True, order=True)
class DivisorElement:
    """A positive square-free divisor 2^r * odd of D = -4n."""

    odd: int
    r: int = 0

    @property
    def value(self) -> int:
        return self.odd << self.r

    def __mul__(self, other: "DivisorElement") -> "DivisorElement":
        g = math.gcd(self.odd, other.odd)
        return DivisorElement(self.odd // g * (other.odd // g), self.r ^ other.r)

    @classmethod
    def of(cls, value: int) -> "DivisorElement":
        r = 0
        while value % 2 == 0:
            value //= 2
            r += 1
        if r > 1:
            raise PreconditionError("divisor must be square-free")
        return cls(value, r)

    def __repr__(self) -> str:
        return f"DivisorElement({self.value})"


@dataclass(frozen=True)
class NormSolution:
    """Primitive (a, b, c) with 2^r c^2 = d a^2 + dprime b^2."""

    r: int
    d: int
    dprime: int
    a: int
    b: int
    c: int

    def __post_init__(self):
        if min(self.a, self.b) < 0 or self.c <= 0:
            raise ValueError(f"coordinates must be non-negative: {self}")
        if (self.c * self.c) << self.r != self.d * self.a ** 2 + self.dprime * self.b ** 2:
            raise InternalConsistencyError(f"identity fails for {self}")
        if math.gcd(math.gcd(self.a, self.b), self.c) != 1:
            raise InternalConsistencyError(f"{self} is not primitive")

    @property
    def n(self) -> int:
        return self.d * self.dprime

    @property
    def triple(self) -> tuple[int, int, int]:
        return self.a, self.b, self.c

    def swapped(self) -> "NormSolution":
        """The same point viewed as a solution for the complementary divisor."""
        return NormSolution(self.r, self.dprime, self.d, self.b, self.a, self.c)


def _family(n: SquarefreeInteger) -> bool:
    return n.all_primes_mod(4, 1)


def _check_disc(n) -> SquarefreeInteger:
    n = factor_squarefree(n)
    if n.value % 4 == 3:
        raise PreconditionError(f"n = {n.value} = 3 mod 4 is not supported (discriminant would be -n)")
    return n


# Redei matrix and 4-rank

@lru_cache(maxsize=4096)
def _redei(nv: int) -> BitMatrix:
    n = factor_squarefree(nv)
    disc = -4 * nv
    odd = n.odd_primes
    cols = list(odd) + [2]
    rows = []
    for i, p in enumerate(odd):
        pstar = p if p % 4 == 1 else -p
        row = []
        for j, q in enumerate(cols):
            row.append(additive_legendre(disc // pstar, p) if i == j else additive_legendre(q, p))
        rows.append(row)
    return BitMatrix(len(odd), len(cols), tuple(f2._pack(r) for r in rows))


def redei_matrix(n) -> BitMatrix:
    """(t-1) x t Redei matrix of discriminant -4n; columns are odd primes of n, then 2."""
    return _redei(_check_disc(n).value)


def h4(n) -> int:
    m = redei_matrix(n)
    return m.rows - f2.rank(m)


def _divisor_from_bits(primes: Sequence[int], bits: Sequence[int]) -> DivisorElement:
    odd = math.prod(p for p, b in zip(primes, bits) if b)
    return DivisorElement(odd, bits[-1])


def norm_divisors(n) -> list[DivisorElement]:
    """Divisors of D that are norms from Q(sqrt(-n)), i.e. the kernel of the Redei matrix."""
    n = _check_disc(n)
    m = redei_matrix(n)
    vecs = f2.span(f2.kernel_basis(m), m.cols)
    return sorted((_divisor_from_bits(n.odd_primes, v.to_list()) for v in vecs),
                  key=lambda e: e.value)


def divisor_vector(e: DivisorElement, n) -> BitVector:
    n = factor_squarefree(n)
    bits = [1 if e.odd % p == 0 else 0 for p in n.odd_primes] + [e.r]
    return BitVector.from_list(bits)


def is_norm_divisor(e: DivisorElement, n) -> bool:
    n = _check_disc(n)
    if n.value % e.odd or e.r not in (0, 1):
        return False
    return (redei_matrix(n) @ divisor_vector(e, n)).is_zero()


# norm equations

def _hits(lhs: int, p_coef: int, q_coef: int, z: np.ndarray) -> list[tuple[int, int, int]]:
    """All (x, y, z) >= 0 with lhs z^2 = p x^2 + q y^2 for z in the given array."""
    if p_coef >= q_coef:
        big, small, swap = p_coef, q_coef, False
    else:
        big, small, swap = q_coef, p_coef, True
    zmax = int(z[-1])
    umax = math.isqrt(lhs * zmax * zmax // big)
    u = np.arange(0, umax + 1, dtype=np.int64)[None, :]
    zz = z.astype(np.int64)[:, None]
    rem = lhs * zz * zz - big * u * u
    ok = rem >= 0
    ok &= rem % small == 0
    q = np.where(ok, rem // small, 0)
    s = np.rint(np.sqrt(q.astype(np.float64))).astype(np.int64)
    ok &= s * s == q
    zi, ui = np.nonzero(ok)
    out = []
    for i, j in zip(zi.tolist(), ui.tolist()):
        zv, uv, sv = int(z[i]), j, int(s[i, j])
        out.append((sv, uv, zv) if swap else (uv, sv, zv))
    return out


def _chunks(start: int, stop: int, step: int, width: int):
    """Yield arrays of z in [start, stop] with the given step, sized to keep grids small."""
    z = start
    size = 64
    while z <= stop:
        end = min(stop, z + step * (size - 1))
        yield np.arange(z, end + 1, step, dtype=np.int64)
        z = end + step
        size = min(size * 2, max(64, (1 << 22) // max(1, width * (z + 1))))


def _primitive_solutions(r: int, d: int, dprime: int, lo: int, hi: int, step: int):
    lhs = 1 << r
    big = max(d, dprime)
    for z in _chunks(lo, hi, step, int(math.isqrt(lhs // big + 1)) + 1):
        hits = [(a, b, c) for a, b, c in _hits(lhs, d, dprime, z)
                if math.gcd(math.gcd(a, b), c) == 1]
        hits.sort(key=lambda t: (t[2], t[0]))
        yield from hits


def _validate_norm(r: int, d: int, n: SquarefreeInteger) -> None:
    if r not in (0, 1) or d < 1 or n.value % d:
        raise PreconditionError(f"need r in (0,1) and d | n, got r={r}, d={d}")
    if not is_norm_divisor(DivisorElement(d, r), n):
        raise NotANorm(f"{d << r} is not a norm divisor for n = {n.value}")


def _step(n: SquarefreeInteger) -> int:
    # for n with all prime factors = 1 mod 4 a primitive solution has odd c
    return 2 if _family(n) else 1


def solve_norm_equation(r: int, d: int, n, budget: int = DEFAULT_BUDGET,
                        order: str = "ascending") -> NormSolution:
    """Primitive solution of 2^r z^2 = d x^2 + (n/d) y^2 with least z (then least x).

    ``order="reversed"`` instead returns the largest-z solution with z within a
    fixed multiple of the least one; it exists to test choice-independence.
    """
    n = _check_disc(n)
    _validate_norm(r, d, n)
    dprime = n.value // d
    step = _step(n)
    first = next(_primitive_solutions(r, d, dprime, 1, budget, step), None)
    if first is None:
        raise SearchBudgetExceeded(f"{1 << r} z^2 = {d} x^2 + {dprime} y^2", budget)
    if order == "ascending":
        best = first
    elif order == "reversed":
        window = min(budget, REVERSED_WINDOW * first[2])
        best = max(_primitive_solutions(r, d, dprime, first[2], window, step),
                   key=lambda t: (t[2], t[0]))
    else:
        raise ValueError(f"order must be one of {ORDERS}")
    return NormSolution(r, d, dprime, *best)


def all_primitive_solutions(r: int, d: int, n, bound: int) -> list[NormSolution]:
    n = _check_disc(n)
    _validate_norm(r, d, n)
    dprime = n.value // d
    return [NormSolution(r, d, dprime, *t)
            for t in _primitive_solutions(r, d, dprime, 1, bound, _step(n))]


# 4A membership

def _check_c_hypothesis(c: int, n: SquarefreeInteger) -> None:
    """c odd, prime to D, and (D/p) = 1 for every p | c."""
    if c % 2 == 0 or math.gcd(c, n.value) != 1:
        raise InternalConsistencyError(f"c = {c} is not odd and prime to {n.value}")
    m = c
    p = 3
    while p * p <= m:
        if m % p == 0:
            if legendre(-n.value, p) != 1:
                raise InternalConsistencyError(f"(D/{p}) != 1 for c = {c}")
            while m % p == 0:
                m //= p
        p += 2
    if m > 1 and legendre(-n.value, m) != 1:
        raise InternalConsistencyError(f"(D/{m}) != 1 for c = {c}")


def c_vector(sol: NormSolution | int, n) -> BitVector:
    """([c/p_1], ..., [c/p_k]) over the odd primes of n."""
    n = factor_squarefree(n)
    c = sol.c if isinstance(sol, NormSolution) else sol
    if math.gcd(c, n.value) != 1:
        raise PreconditionError(f"gcd({c}, {n.value}) > 1")
    return BitVector.from_list([additive_legendre(c, p) for p in n.odd_primes])


def _elem(d: DivisorElement | int | str) -> DivisorElement:
    if isinstance(d, DivisorElement):
        return d
    if d == "2":
        return DivisorElement(1, 1)
    return DivisorElement.of(int(d))


def in_4A_genus(d: DivisorElement | int | str, n, budget: int = DEFAULT_BUDGET,
                order: str = "ascending") -> bool:
    """Whether the class of (2^r d, sqrt(-n)) lies in 4A, via C in Im R."""
    n = _check_disc(n)
    if not _family(n):
        raise PreconditionError("8-rank machinery needs every prime of n to be 1 mod 4")
    e = _elem(d)
    sol = solve_norm_equation(e.r, e.odd, n, budget, order)
    _check_c_hypothesis(sol.c, n)
    return f2.in_image(redei_matrix(n), c_vector(sol, n))


def combine_solutions(s1: NormSolution, s2: NormSolution, n) -> NormSolution:
    """Solution for 2^r1 d1 (.) 2^r2 d2 from the product of the two norms."""
    nv = int(factor_squarefree(n).value)
    if s1.n != nv or s2.n != nv:
        raise PreconditionError("solutions belong to a different n")
    d1, d2 = s1.d, s2.d
    a1, b1, c1 = s1.triple
    a2, b2, c2 = s2.triple
    g = math.gcd(d1, d2)
    d = d1 // g * (d2 // g)
    r = s1.r ^ s2.r
    a = d1 * d2 * a1 * a2 - b1 * b2 * nv
    b = b1 * d2 * a2 + b2 * d1 * a1
    cc = c1 * c2
    c0sq = math.gcd(math.gcd(cc, a), b)
    c0 = math.isqrt(c0sq)
    if c0 * c0 != c0sq:
        raise InternalConsistencyError(f"gcd(c1 c2, a, b) = {c0sq} is not a square")
    two = 1 << (s1.r * s2.r)
    den_a = c0sq * two * d * g
    den_b = c0sq * two * g
    if a % den_a or b % den_b:
        raise InternalConsistencyError(f"divisibility fails combining {s1} and {s2}")
    return NormSolution(r, d, nv // d, abs(a) // den_a, abs(b) // den_b, cc // c0sq)


# higher Redei matrix and 8-rank

def check_decomposition(n, decomposition: Sequence[int]) -> SquarefreeInteger:
    """Validate the block conditions: p = 1 mod 8, h4(d_i) = 1, cross symbols +1."""
    n = factor_squarefree(n)
    ds = list(decomposition)
    if not ds or math.prod(ds) != n.value or any(d < 1 for d in ds):
        raise PreconditionError(f"{ds} is not a factorization of {n.value}")
    if any(math.gcd(x, y) != 1 for i, x in enumerate(ds) for y in ds[i + 1:]):
        raise PreconditionError("blocks must be coprime")
    if not n.all_primes_mod(8, 1):
        raise PreconditionError(f"{n.value} has a prime factor not = 1 mod 8")
    if any(d == 1 for d in ds):
        raise PreconditionError("blocks must be nontrivial")
    for d in ds:
        if h4(d) != 1:
            raise PreconditionError(f"h4({d}) != 1")
    for i, x in enumerate(ds):
        for j, y in enumerate(ds):
            if i != j:
                for p in n.sub(x).primes:
                    for q in n.sub(y).primes:
                        if legendre(p, q) != 1:
                            raise PreconditionError(f"({p}/{q}) = -1 across blocks")
    return n


@dataclass(frozen=True)
class HigherRedei:
    decomposition: tuple[int, ...]
    solutions: tuple[NormSolution, ...]   # k + 1 entries, the last for 2z^2 = x^2 + n y^2
    matrix: BitMatrix                     # R* = (A* | B*)

    @property
    def k(self) -> int:
        return len(self.decomposition)

    @property
    def a_star(self) -> BitMatrix:
        k = self.k
        return BitMatrix(k, k, tuple(row & ((1 << k) - 1) for row in self.matrix.data))

    @property
    def b_star(self) -> BitVector:
        return self.matrix.column(self.k)

    @property
    def c_values(self) -> tuple[int, ...]:
        return tuple(s.c for s in self.solutions)

    @property
    def h8(self) -> int:
        return self.k - f2.rank(self.matrix)


def higher_redei(n, decomposition: Sequence[int], budget: int = DEFAULT_BUDGET,
                 order: str = "ascending", fresh_last: bool = False) -> HigherRedei:
    n = check_decomposition(n, decomposition)
    ds = tuple(decomposition)
    k = len(ds)
    sols = [solve_norm_equation(0, d, n, budget, order) for d in ds[:-1]]
    if fresh_last:
        last = solve_norm_equation(0, ds[-1], n, budget, order)
    else:
        acc = NormSolution(0, 1, n.value, 1, 0, 1)
        for s in sols:
            acc = combine_solutions(acc, s, n)
        last = acc.swapped()
        if last.d != ds[-1]:
            raise InternalConsistencyError("folded solution has the wrong divisor")
    sols.append(last)
    sols.append(solve_norm_equation(1, 1, n, budget, order))
    for s in sols:
        _check_c_hypothesis(s.c, n)
    rows = []
    for d in ds:
        rows.append([additive_jacobi(s.c, d) for s in sols])
    return HigherRedei(ds, tuple(sols), BitMatrix.from_rows(rows, k + 1))


def h8_genus(n, decomposition: Sequence[int] | None = None, budget: int = DEFAULT_BUDGET,
             order: str = "ascending") -> int:
    """8-rank of Q(sqrt(-n)) for n with all prime factors = 1 mod 4.

    With a decomposition this is k - rank R*. Otherwise the C-vectors of a
    basis of norm divisors give a linear map ker R -> F2^k / Im R whose kernel
    maps 2-to-1 onto A[2] cap 4A.
    """
    n = _check_disc(n)
    if not _family(n):
        raise PreconditionError("8-rank machinery needs every prime of n to be 1 mod 4")
    if decomposition is not None:
        return higher_redei(n, decomposition, budget, order).h8
    rm = redei_matrix(n)
    cols = []
    for v in f2.kernel_basis(rm):
        e = _divisor_from_bits(n.odd_primes, v.to_list())
        sol = solve_norm_equation(e.r, e.odd, n, budget, order)
        _check_c_hypothesis(sol.c, n)
        cols.append(c_vector(sol, n))
    phi = BitMatrix(rm.rows, len(cols), tuple(
        sum(col[i] << j for j, col in enumerate(cols)) for i in range(rm.rows)))
    joint = BitMatrix.block([[rm, phi]])
    return h4(n) - f2.rank(joint) + f2.rank(rm)


def d_of_n(n) -> int:
    """Larger odd part of the norm-divisor pair representing the nontrivial class of A[2] cap 2A."""
    n = _check_disc(n)
    if n.mod8 != 1 or not _family(n):
        raise PreconditionError(f"{n.value} is outside the n = 1 mod 8, p = 1 mod 4 family")
    if h4(n) != 1:
        raise PreconditionError(f"h4({n.value}) != 1")
    divs = norm_divisors(n)
    kernel = {DivisorElement(1, 0), DivisorElement(n.value, 0)}
    other = [e for e in divs if e not in kernel]
    if len(other) != 2 or other[0].odd * other[1].odd != n.value:
        raise InternalConsistencyError(f"unexpected norm divisors {divs} for {n.value}")
    return max(e.odd for e in other)
