"""Class groups of imaginary quadratic fields as reduced binary quadratic forms.

This is the independent oracle: it knows nothing about Redei matrices or norm
equations, only forms, Gauss composition and reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import PreconditionError
from .ntheory import SquarefreeInteger, factor, factor_squarefree


@dataclass(frozen=True, order=True)
class QuadraticForm:
    """The form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def reduce(self) -> "QuadraticForm":
        a, b, c = self.a, self.b, self.c
        if a <= 0 or self.disc >= 0:
            raise ValueError("only positive definite forms can be reduced")
        while True:
            if b > a or b <= -a:
                # normalize b into (-a, a]
                q, r = divmod(b, 2 * a)
                if r > a:
                    r -= 2 * a
                    q += 1
                c = c - q * (b + r) // 2
                b = r
            if a > c:
                a, b, c = c, -b, a
                continue
            if a == c and b < 0:
                b = -b
            return QuadraticForm(a, b, c)

    def inverse(self) -> "QuadraticForm":
        return QuadraticForm(self.a, -self.b, self.c).reduce()

    def __repr__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def principal_form(disc: int) -> QuadraticForm:
    b = disc % 2
    return QuadraticForm(1, b, (b * b - disc) // 4)


def compose(f: QuadraticForm, g: QuadraticForm) -> QuadraticForm:
    """Gauss composition (Shanks' formulation), followed by reduction."""
    disc = f.disc
    if g.disc != disc:
        raise ValueError("forms have different discriminants")
    if f.a > g.a:
        f, g = g, f
    a1, b1, c1 = f.a, f.b, f.c
    a2, b2, c2 = g.a, g.b, g.c
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    num = b3 * b3 - disc
    if num % (4 * a3):
        raise ArithmeticError("composition produced a non-integral form")
    return QuadraticForm(a3, b3, num // (4 * a3)).reduce()


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def reduced_forms(disc: int) -> list[QuadraticForm]:
    """All primitive reduced forms of a negative discriminant, sorted."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise PreconditionError(f"{disc} is not a negative discriminant")
    amax = math.isqrt(-disc // 3)
    a = np.arange(1, amax + 1, dtype=np.int64)[:, None]
    b = np.arange(-amax, amax + 1, dtype=np.int64)[None, :]
    num = b * b - disc
    ok = (np.abs(b) <= a) & ((b - disc) % 2 == 0) & (num % (4 * a) == 0)
    c = np.where(ok, num // np.where(ok, 4 * a, 1), 0)
    ok &= c >= a
    ok &= ~(((np.abs(b) == a) | (a == c)) & (b < 0))
    ai, bi = np.nonzero(ok)
    out = []
    for i, j in zip(ai.tolist(), bi.tolist()):
        fa, fb = i + 1, j - amax
        fc = int(c[i, j])
        if math.gcd(math.gcd(fa, fb), fc) == 1:
            out.append(QuadraticForm(fa, fb, fc))
    out.sort()
    return out


@dataclass(frozen=True, eq=False)
class ClassGroupSnapshot:
    """Explicit finite abelian group of reduced forms under composition."""

    disc: int
    elements: tuple[QuadraticForm, ...]
    n: int | None = None
    _index: dict = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_index", {f: i for i, f in enumerate(self.elements)})

    @property
    def h(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> int:
        return self._index[principal_form(self.disc)]

    def index(self, f: QuadraticForm) -> int:
        return self._index[f.reduce()]

    def mul(self, i: int, j: int) -> int:
        return self._index[compose(self.elements[i], self.elements[j])]

    def power(self, i: int, m: int) -> int:
        acc, base = self.identity, i
        while m:
            if m & 1:
                acc = self.mul(acc, base)
            m >>= 1
            if m:
                base = self.mul(base, base)
        return acc

    @cached_property
    def squares(self) -> tuple[int, ...]:
        return tuple(self.mul(i, i) for i in range(self.h))

    @cached_property
    def two_torsion(self) -> frozenset[int]:
        e = self.identity
        return frozenset(i for i, s in enumerate(self.squares) if s == e)

    @cached_property
    def doubled(self) -> frozenset[int]:
        """The subgroup 2A of squares."""
        return frozenset(self.squares)

    @cached_property
    def quadrupled(self) -> frozenset[int]:
        """The subgroup 4A of fourth powers."""
        return frozenset(self.squares[i] for i in self.doubled)

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        """Invariant factors m1 | m2 | ... listed largest first, trivial group -> ()."""
        e = self.identity
        per_prime: dict[int, list[int]] = {}
        for ell in sorted(set(factor(self.h))) if self.h > 1 else []:
            cur = list(range(self.h))
            counts = [1]
            while counts[-1] < _ell_part(self.h, ell):
                cur = [self.power(x, ell) for x in cur]
                counts.append(sum(1 for x in cur if x == e))
            # number of cyclic factors of order >= ell^i
            ge = [round(math.log(counts[i] // counts[i - 1], ell)) for i in range(1, len(counts))]
            exps = []
            for i, g in enumerate(ge):
                nxt = ge[i + 1] if i + 1 < len(ge) else 0
                exps += [i + 1] * (g - nxt)
            per_prime[ell] = sorted(exps, reverse=True)
        width = max((len(v) for v in per_prime.values()), default=0)
        factors = []
        for slot in range(width):
            m = 1
            for ell, exps in per_prime.items():
                if slot < len(exps):
                    m *= ell ** exps[slot]
            factors.append(m)
        return tuple(factors)


def _ell_part(h: int, ell: int) -> int:
    out = 1
    while h % ell == 0:
        h //= ell
        out *= ell
    return out


def _check_n(n: int | SquarefreeInteger) -> SquarefreeInteger:
    n = factor_squarefree(n)
    if n.value % 4 == 3:
        raise PreconditionError(f"n = {n.value} = 3 mod 4: -4n is not a fundamental discriminant")
    return n


@lru_cache(maxsize=256)
def _class_group(n: int) -> ClassGroupSnapshot:
    disc = -4 * n
    return ClassGroupSnapshot(disc, tuple(reduced_forms(disc)), n)


def class_group(n: int | SquarefreeInteger) -> ClassGroupSnapshot:
    """Class group of Q(sqrt(-n)) for square-free n = 1, 2 mod 4 (discriminant -4n)."""
    return _class_group(_check_n(n).value)


def _log2(m: int) -> int:
    r = m.bit_length() - 1
    if 1 << r != m:
        raise ArithmeticError(f"{m} is not a power of two")
    return r


def h2i_ranks(g: ClassGroupSnapshot) -> tuple[int, int, int]:
    a2 = g.two_torsion
    return _log2(len(a2)), _log2(len(a2 & g.doubled)), _log2(len(a2 & g.quadrupled))


def divisor_form(d: int | str, n: int) -> QuadraticForm:
    """The form attached to the ideal (d, sqrt(-n)); ``d`` divides 2n or is "2"."""
    if d == "2":
        d = 2
    if not isinstance(d, int) or d < 1 or (2 * n) % d:
        raise PreconditionError(f"{d!r} is not a divisor of {2 * n}")
    if n % d == 0:
        return QuadraticForm(d, 0, n // d).reduce()
    # d = 2 d0 with n odd: the prime above 2 times (d0, sqrt(-n))
    two = QuadraticForm(2, 2, (n + 1) // 2)
    return compose(two, QuadraticForm(d // 2, 0, n // (d // 2)))


def ideal_class_in_4A(d: int | str, g: ClassGroupSnapshot) -> bool:
    if g.n is None:
        raise PreconditionError("snapshot has no associated n")
    return g.index(divisor_form(d, g.n)) in g.quadrupled


def ideal_class_in_2A(d: int | str, g: ClassGroupSnapshot) -> bool:
    return g.index(divisor_form(d, g.n)) in g.doubled


def oracle_ranks(n: int | SquarefreeInteger) -> tuple[int, int, int]:
    return h2i_ranks(class_group(n))
