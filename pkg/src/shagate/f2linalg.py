"""Dense linear algebra over GF(2) with rows packed into Python ints.

Bit ``j`` of a row int is column ``j``. Elimination XORs whole rows, so the
cost is one big-int operation per row update regardless of width.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def _pack(bits: Iterable[int]) -> int:
    out = 0
    for j, bit in enumerate(bits):
        if bit not in (0, 1):
            raise ValueError(f"entry {bit!r} is not a bit")
        out |= bit << j
    return out


@dataclass(frozen=True)
class BitVector:
    """Fixed-length vector over GF(2)."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def from_list(cls, entries: Sequence[int]) -> "BitVector":
        return cls(len(entries), _pack(entries))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.to_list())

    def __add__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.bits ^ other.bits)

    def is_zero(self) -> bool:
        return self.bits == 0

    def dot(self, other: "BitVector") -> int:
        if other.length != self.length:
            raise ValueError("length mismatch")
        return (self.bits & other.bits).bit_count() & 1

    def __repr__(self) -> str:
        return "BitVector(" + "".join(map(str, self.to_list())) + ")"


@dataclass(frozen=True)
class BitMatrix:
    """Immutable rows x cols matrix over GF(2)."""

    rows: int
    cols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if len(self.data) != self.rows:
            raise ValueError("row count does not match data")
        for r in self.data:
            if r < 0 or r >> self.cols:
                raise ValueError("row has bits beyond column count")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "BitMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(_pack(r) for r in rows))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls(size, size, tuple(1 << i for i in range(size)))

    @classmethod
    def block(cls, blocks: Sequence[Sequence["BitMatrix"]]) -> "BitMatrix":
        """Assemble from a grid of blocks with compatible shapes."""
        out = []
        cols = sum(b.cols for b in blocks[0])
        for brow in blocks:
            height = brow[0].rows
            if any(b.rows != height for b in brow) or sum(b.cols for b in brow) != cols:
                raise ValueError("incompatible block shapes")
            for i in range(height):
                word, shift = 0, 0
                for b in brow:
                    word |= b.data[i] << shift
                    shift += b.cols
                out.append(word)
        return cls(len(out), cols, tuple(out))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return (self.data[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])

    def column(self, j: int) -> BitVector:
        return BitVector(self.rows, sum(((r >> j) & 1) << i for i, r in enumerate(self.data)))

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.cols)] for r in self.data]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.cols, self.rows, tuple(self.column(j).bits for j in range(self.cols)))

    T = property(transpose)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if other.shape != self.shape:
            raise ValueError("shape mismatch")
        return BitMatrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.data, other.data)))

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            if other.length != self.cols:
                raise ValueError("dimension mismatch")
            return BitVector(self.rows, sum(((r & other.bits).bit_count() & 1) << i
                                            for i, r in enumerate(self.data)))
        if other.rows != self.cols:
            raise ValueError("dimension mismatch")
        out = []
        for r in self.data:
            acc = 0
            for k in range(self.cols):
                if (r >> k) & 1:
                    acc ^= other.data[k]
            out.append(acc)
        return BitMatrix(self.rows, other.cols, tuple(out))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self == self.transpose()

    def __repr__(self) -> str:
        body = "; ".join("".join(map(str, r)) for r in self.to_lists())
        return f"BitMatrix({self.rows}x{self.cols}: {body})"


def _echelon(m: BitMatrix, rhs: int = 0) -> tuple[list[int], list[int], int]:
    """Reduced row echelon form with leftmost pivot / topmost row.

    ``rhs`` is an optional right-hand side packed as bit ``i`` for row ``i``;
    it is carried along as an extra column. Returns (reduced rows, pivot
    columns, carried rhs bits per reduced row packed the same way).
    """
    rows = list(m.data)
    b = [(rhs >> i) & 1 for i in range(m.rows)]
    pivots: list[int] = []
    top = 0
    for col in range(m.cols):
        if top == len(rows):
            break
        mask = 1 << col
        piv = next((r for r in range(top, len(rows)) if rows[r] & mask), None)
        if piv is None:
            continue
        rows[top], rows[piv] = rows[piv], rows[top]
        b[top], b[piv] = b[piv], b[top]
        for r in range(len(rows)):
            if r != top and rows[r] & mask:
                rows[r] ^= rows[top]
                b[r] ^= b[top]
        pivots.append(col)
        top += 1
    return rows, pivots, sum(bit << i for i, bit in enumerate(b))


def rank(m: BitMatrix) -> int:
    return len(_echelon(m)[1])


def kernel_basis(m: BitMatrix) -> list[BitVector]:
    """Basis of {x : m x = 0}, one vector per free column in increasing order."""
    rows, pivots, _ = _echelon(m)
    pivset = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivset:
            continue
        bits = 1 << free
        for r, col in enumerate(pivots):
            if (rows[r] >> free) & 1:
                bits |= 1 << col
        basis.append(BitVector(m.cols, bits))
    return basis


def solve(m: BitMatrix, b: BitVector) -> BitVector | None:
    """Some x with m x = b, free coordinates set to zero; None if inconsistent."""
    if b.length != m.rows:
        raise ValueError(f"rhs has length {b.length}, matrix has {m.rows} rows")
    rows, pivots, rhs = _echelon(m, b.bits)
    for r in range(len(pivots), m.rows):
        if (rhs >> r) & 1:
            return None
    bits = 0
    for r, col in enumerate(pivots):
        if (rhs >> r) & 1:
            bits |= 1 << col
    return BitVector(m.cols, bits)


def in_image(m: BitMatrix, c: BitVector) -> bool:
    return solve(m, c) is not None


def span(vectors: Sequence[BitVector], length: int) -> list[BitVector]:
    """All 2^r combinations of ``vectors`` (assumed independent), ordered by mask."""
    out = []
    for mask in range(1 << len(vectors)):
        bits = 0
        for i, v in enumerate(vectors):
            if (mask >> i) & 1:
                bits ^= v.bits
        out.append(BitVector(length, bits))
    return out
