"""Integer arithmetic: factorization, residue symbols, Hilbert symbols,
modular square roots, prime representations and the delta invariant."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, lru_cache

from .errors import FactorizationError, InternalConsistencyError, NotSquarefree, PreconditionError

INF = "inf"

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
_MAX_INPUT = 1 << 64


@lru_cache(maxsize=1 << 16)
def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int, budget: int, rng: random.Random) -> int | None:
    """One Pollard-Brent attempt; a nontrivial factor or None."""
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    steps = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        steps += r
        if steps > budget:
            return None
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
    return g if g != n else None


def _split(n: int, budget: int) -> list[int]:
    if n == 1:
        return []
    if is_prime(n):
        return [n]
    rng = random.Random(n)  # seeded so factoring is reproducible
    for _ in range(32):
        f = _brent(n, budget, rng)
        if f:
            return _split(f, budget) + _split(n // f, budget)
    raise FactorizationError(f"could not split composite {n}")


def factor(n: int, rho_budget: int = 1 << 22) -> list[int]:
    """Prime factors of n with multiplicity, ascending."""
    if n < 1:
        raise PreconditionError(f"cannot factor {n}")
    out = []
    for p in range(2, 1000):
        if p * p > n:
            break
        while n % p == 0:
            out.append(p)
            n //= p
    if n > 1:
        out.extend(_split(n, rho_budget))
    return sorted(out)


@dataclass(frozen=True)
class SquarefreeInteger:
    """A square-free positive integer with its ascending prime factorization."""

    value: int
    primes: tuple[int, ...]

    def __post_init__(self):
        if math.prod(self.primes) != self.value:
            raise ValueError("primes do not multiply to value")
        if any(a >= b for a, b in zip(self.primes, self.primes[1:])):
            raise ValueError("primes must be strictly increasing")

    @property
    def k(self) -> int:
        return len(self.primes)

    @property
    def mod8(self) -> int:
        return self.value % 8

    @property
    def odd_primes(self) -> tuple[int, ...]:
        return tuple(p for p in self.primes if p != 2)

    def residues(self, m: int) -> tuple[int, ...]:
        return tuple(p % m for p in self.primes)

    def all_primes_mod(self, m: int, r: int) -> bool:
        return all(p % m == r for p in self.primes)

    def divisors(self) -> list[int]:
        """All positive divisors, indexed by bitmask over ``primes``."""
        out = [1]
        for p in self.primes:
            out += [d * p for d in out]
        return out

    def sub(self, d: int) -> "SquarefreeInteger":
        """The divisor d as a SquarefreeInteger."""
        if self.value % d:
            raise PreconditionError(f"{d} does not divide {self.value}")
        return SquarefreeInteger(d, tuple(p for p in self.primes if d % p == 0))

    def __int__(self) -> int:
        return self.value


@cache
def _factor_squarefree(n: int) -> SquarefreeInteger:
    ps = factor(n)
    if len(set(ps)) != len(ps):
        raise NotSquarefree(f"{n} is not square-free")
    return SquarefreeInteger(n, tuple(ps))


def factor_squarefree(n: int | SquarefreeInteger) -> SquarefreeInteger:
    if isinstance(n, SquarefreeInteger):
        return n
    if not isinstance(n, int) or n < 1:
        raise PreconditionError(f"expected a positive integer, got {n!r}")
    if n >= _MAX_INPUT:
        raise PreconditionError("inputs are limited to 64 bits")
    return _factor_squarefree(n)


def is_squarefree(n: int) -> bool:
    try:
        factor_squarefree(n)
    except NotSquarefree:
        return False
    return True


def squarefree_part(n: int) -> int:
    """Sign-preserving square-free kernel of a nonzero integer."""
    if n == 0:
        raise ValueError("zero has no square-free part")
    out = 1
    for p in set(factor(abs(n))):
        e = 0
        m = abs(n)
        while m % p == 0:
            m //= p
            e += 1
        if e % 2:
            out *= p
    return out if n > 0 else -out


def odd_part(n: int) -> int:
    while n and n % 2 == 0:
        n //= 2
    return n


# residue symbols

def _check_odd_prime(p: int):
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise PreconditionError(f"{p} is not an odd prime")


def legendre(a: int, p: int) -> int:
    _check_odd_prime(p)
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def additive_legendre(a: int, p: int) -> int:
    """0 if (a/p) = 1, else 1."""
    return 0 if legendre(a, p) == 1 else 1


def jacobi(a: int, m: int) -> int:
    """Jacobi symbol (a/m) for odd positive m."""
    if m < 1 or m % 2 == 0:
        raise PreconditionError(f"Jacobi modulus {m} must be odd and positive")
    a %= m
    out = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                out = -out
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            out = -out
        a %= m
    return out if m == 1 else 0


def additive_jacobi(a: int, m: int) -> int:
    """Additive form of the Jacobi symbol; requires gcd(a, m) = 1."""
    j = jacobi(a, m)
    if j == 0:
        raise PreconditionError(f"gcd({a}, {m}) > 1")
    return 0 if j == 1 else 1


def quartic_symbol(q: int, p: int) -> int:
    """(q/p)_4 for p = 1 mod 4 and (q/p) = 1."""
    if p % 4 != 1 or not is_prime(p):
        raise PreconditionError(f"{p} is not a prime = 1 mod 4")
    if legendre(q, p) != 1:
        raise PreconditionError(f"{q} is not a nonzero square mod {p}")
    r = pow(q % p, (p - 1) // 4, p)
    return 1 if r == 1 else -1


def quartic_symbol_composite(q: int, d: int | SquarefreeInteger) -> int:
    d = factor_squarefree(d)
    out = 1
    for p in d.primes:
        out *= quartic_symbol(q, p)
    return out


def additive_quartic(q: int, d: int | SquarefreeInteger) -> int:
    return 0 if quartic_symbol_composite(q, d) == 1 else 1


def _rational_to_int(a) -> int:
    """An integer in the same square class as a nonzero rational."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("Hilbert symbol arguments must be nonzero")
    return a.numerator * a.denominator


def _split_val(a: int, p: int) -> tuple[int, int]:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def hilbert_symbol(a, b, place) -> int:
    """Local Hilbert symbol (a, b)_v at a prime v or at INF."""
    a, b = _rational_to_int(a), _rational_to_int(b)
    if place == INF or place == math.inf:
        return -1 if a < 0 and b < 0 else 1
    p = int(place)
    if not is_prime(p):
        raise PreconditionError(f"{p} is not a place")
    alpha, u = _split_val(a, p)
    beta, v = _split_val(b, p)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omega = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * legendre(u, p) ** beta * legendre(v, p) ** alpha


# square roots

def sqrt_mod(a: int, p: int) -> int | None:
    """Smaller square root of a modulo an odd prime p, or None."""
    _check_odd_prime(p)
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return min(r, p - r)


def sqrt_mod_prime_power(a: int, p: int, k: int, root: int | None = None) -> int | None:
    """Hensel lift of a square root of a unit a modulo p^k, starting from ``root`` mod p."""
    r = sqrt_mod(a, p) if root is None else root % p
    if r is None or r == 0:
        return None
    mod = p
    for _ in range(1, k):
        mod *= p
        # Newton step r <- r - (r^2 - a) / (2r)
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r


def is_padic_unit_square(a: int, p: int) -> bool:
    if a % p == 0:
        raise PreconditionError(f"{a} is not a {p}-adic unit")
    return legendre(a, p) == 1


# prime representations and delta

@dataclass(frozen=True)
class PrimeRepresentations:
    p: int
    u: int
    v: int
    a: int
    b: int
    x: int
    y: int

    def __post_init__(self):
        p = self.p
        if (self.u ** 2 + 8 * self.v ** 2 != p or self.a ** 2 + 16 * self.b ** 2 != p
                or self.x ** 2 - 32 * self.y ** 2 != p):
            raise InternalConsistencyError(f"representation identities fail for {p}")


def _check_1_mod_8(p: int):
    if p % 8 != 1 or not is_prime(p):
        raise PreconditionError(f"{p} is not a prime = 1 mod 8")


def _rep_sum(p: int, coef: int) -> tuple[int, int]:
    """(s, t) with p = s^2 + coef t^2, t >= 1 minimal."""
    t = 1
    while coef * t * t < p:
        s = math.isqrt(p - coef * t * t)
        if s * s + coef * t * t == p:
            return s, t
        t += 1
    raise InternalConsistencyError(f"{p} has no representation s^2 + {coef} t^2")


def pell_pair(p: int) -> tuple[int, int]:
    """(x0, y0) with p = x0^2 - 2 y0^2, y0 >= 0 minimal."""
    y0 = 0
    while True:
        s = p + 2 * y0 * y0
        x0 = math.isqrt(s)
        if x0 * x0 == s:
            return x0, y0
        y0 += 1


@lru_cache(maxsize=4096)
def represent_prime(p: int) -> PrimeRepresentations:
    _check_1_mod_8(p)
    u, v = _rep_sum(p, 8)
    a, b = _rep_sum(p, 16)
    x0, y0 = pell_pair(p)
    if y0 % 4:
        # one unit step from either conjugate lands on 4 | y; keep the smaller y
        x0, y0 = min(((abs(3 * x0 + 4 * s * y0), abs(2 * x0 + 3 * s * y0)) for s in (1, -1)),
                     key=lambda t: t[1])
    return PrimeRepresentations(p, u, v, a, b, x0, y0 // 4)


def unit_orbit(x: int, y: int, count: int) -> list[tuple[int, int]]:
    """Further solutions of p = x^2 - 32 y^2 under the unit 17 + 12 sqrt 2.

    (x + 4y sqrt 2)(17 + 12 sqrt 2) = (17x + 96y) + 4(3x + 17y) sqrt 2.
    """
    out = []
    for _ in range(count):
        x, y = 17 * x + 96 * y, 3 * x + 17 * y
        out.append((x, y))
    return out


def delta_conditions(p: int, i_root: int | None = None, j_root: int | None = None) -> dict[int, int]:
    """Conditions (1)-(6) of the seven-way characterization of delta_p, as bits."""
    rep = represent_prime(p)
    i_p = sqrt_mod(-1, p) if i_root is None else i_root
    j_p = sqrt_mod(2, p) if j_root is None else j_root
    return {
        1: rep.v % 2,
        2: ((p - 1) // 8 + rep.b) % 2,
        3: int(not is_padic_unit_square(1 + i_p, p)),
        4: int(not is_padic_unit_square(1 + j_p, p)),
        5: int(quartic_symbol(2, p) == (-1) ** ((p - 9) // 8)),
        6: int(rep.x % 4 == 3),
    }


def delta_p(p: int, verify: bool = False) -> int:
    _check_1_mod_8(p)
    d = represent_prime(p).v % 2
    if verify:
        conds = delta_conditions(p)
        if set(conds.values()) != {d}:
            raise InternalConsistencyError(f"delta conditions disagree at {p}: {conds}")
    return d


def delta_n(n: int | SquarefreeInteger, verify: bool = False) -> int:
    n = factor_squarefree(n)
    if not n.all_primes_mod(8, 1):
        raise PreconditionError(f"{n.value} has a prime factor not = 1 mod 8")
    return sum(delta_p(p, verify) for p in n.primes) % 2


def primes_in_class(limit: int, m: int, r: int) -> list[int]:
    """Primes below limit that are r mod m (simple sieve)."""
    if limit < 3:
        return []
    sieve = bytearray([1]) * limit
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit - 1) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, limit, i)))
    return [i for i in range(r % m, limit, m) if sieve[i]]

