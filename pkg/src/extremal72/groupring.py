"""Arithmetic in R = F2<g>, g^4 = 1, and the maps between F2^72 and R^18.

An element of R is a 4-bit int whose bit ``i`` is the coefficient of g^i
(the "g-basis").  With h = 1 + g we have h^4 = 0 and 1, h, h^2, h^3 is a
second basis; the h-basis form packs the coefficient of h^k into bit ``k``.

Binary coordinate ``p`` (0-based) of a length-72 vector belongs to ring
coordinate ``p // 4`` with exponent ``p % 4``, so the permutation
g = (1,2,3,4)(5,6,7,8)...(69,70,71,72) acts as multiplication by g.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

from .gf2 import BitMatrix, BitVector

ZERO, ONE = 0b0000, 0b0001
G = 0b0010
H = 0b0011  # 1 + g


def _mul_slow(a: int, b: int) -> int:
    out = 0
    for i in range(4):
        if (a >> i) & 1:
            for j in range(4):
                if (b >> j) & 1:
                    out ^= 1 << ((i + j) % 4)
    return out


MUL_TABLE: Tuple[Tuple[int, ...], ...] = tuple(
    tuple(_mul_slow(a, b) for b in range(16)) for a in range(16)
)

# g-basis images of 1, h, h^2, h^3
H_POWERS = (0b0001, 0b0011, 0b0101, 0b1111)


def _from_h_slow(d: int) -> int:
    out = 0
    for k in range(4):
        if (d >> k) & 1:
            out ^= H_POWERS[k]
    return out


FROM_H = tuple(_from_h_slow(d) for d in range(16))
TO_H = tuple(FROM_H.index(a) for a in range(16))
CONJ = tuple(
    sum(((a >> i) & 1) << ((-i) % 4) for i in range(4)) for a in range(16)
)


def ring_mul(a: int, b: int) -> int:
    return MUL_TABLE[a][b]


def ring_add(a: int, b: int) -> int:
    return a ^ b


def to_h_basis(a: int) -> Tuple[int, int, int, int]:
    d = TO_H[a]
    return tuple((d >> k) & 1 for k in range(4))


def from_h_basis(d: Sequence[int]) -> int:
    return FROM_H[sum((b & 1) << k for k, b in enumerate(d))]


def conjugate(a: int) -> int:
    """The F2-linear map g^i -> g^-i."""
    return CONJ[a]


def is_unit(a: int) -> bool:
    return TO_H[a] & 1 == 1


def ring_inverse(a: int) -> int:
    for b in range(16):
        if MUL_TABLE[a][b] == ONE:
            return b
    raise ZeroDivisionError(f"{element_str(a)} is not a unit")


def element_str(a: int) -> str:
    """4-character g-basis bitstring, constant term first ("0100" is g)."""
    return "".join(str((a >> i) & 1) for i in range(4))


@dataclass(frozen=True)
class RingElement:
    """Object wrapper around the 4-bit g-basis encoding."""

    value: int

    def __post_init__(self):
        if not 0 <= self.value < 16:
            raise ValueError("ring element must fit in 4 bits")

    @classmethod
    def from_h(cls, d: Sequence[int]) -> "RingElement":
        return cls(from_h_basis(d))

    def __mul__(self, other: "RingElement") -> "RingElement":
        return RingElement(MUL_TABLE[self.value][other.value])

    def __add__(self, other: "RingElement") -> "RingElement":
        return RingElement(self.value ^ other.value)

    def conjugate(self) -> "RingElement":
        return RingElement(CONJ[self.value])

    def h_coeffs(self) -> Tuple[int, int, int, int]:
        return to_h_basis(self.value)

    def is_unit(self) -> bool:
        return is_unit(self.value)

    def __str__(self) -> str:
        return element_str(self.value)


@dataclass(frozen=True)
class RVector:
    entries: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def conjugate(self) -> "RVector":
        return RVector(tuple(CONJ[a] for a in self.entries))

    def scale(self, a: int) -> "RVector":
        row = MUL_TABLE[a]
        return RVector(tuple(row[x] for x in self.entries))

    def __add__(self, other: "RVector") -> "RVector":
        if len(self) != len(other):
            raise ValueError("length mismatch")
        return RVector(tuple(a ^ b for a, b in zip(self.entries, other.entries)))

    def __str__(self) -> str:
        return " ".join(element_str(a) for a in self.entries)

    @classmethod
    def parse(cls, text: str) -> "RVector":
        out = []
        for tok in text.split():
            if len(tok) != 4 or set(tok) - {"0", "1"}:
                raise ValueError(f"bad ring element {tok!r}")
            out.append(sum(int(c) << i for i, c in enumerate(tok)))
        return cls(tuple(out))


def r_inner_product(u: RVector, v: RVector) -> int:
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} != {len(v)}")
    acc = 0
    for a, b in zip(u.entries, v.entries):
        acc ^= MUL_TABLE[a][b]
    return acc


def _check72(v: BitVector) -> None:
    if v.length != 72:
        raise ValueError(f"expected a length-72 vector, got length {v.length}")


def mu(v: BitVector) -> RVector:
    _check72(v)
    x = v.bits
    return RVector(tuple((x >> (4 * k)) & 15 for k in range(18)))


def mu_prime(v: BitVector) -> RVector:
    _check72(v)
    x = v.bits
    return RVector(tuple(CONJ[(x >> (4 * k)) & 15] for k in range(18)))


def mu_inverse(w: RVector) -> BitVector:
    bits = 0
    for k, a in enumerate(w.entries):
        bits |= a << (4 * k)
    return BitVector(4 * len(w), bits)


def g_power_action(v: BitVector, power: int = 1) -> BitVector:
    """Apply the coordinate permutation g^power (g as in the fixed 4-cycle layout)."""
    _check72(v)
    s = power % 4
    x = v.bits
    out = 0
    for k in range(18):
        a = (x >> (4 * k)) & 15
        a = ((a << s) | (a >> (4 - s))) & 15
        out |= a << (4 * k)
    return BitVector(72, out)


def phi(v: BitVector) -> BitVector:
    """(c1+c3, c2+c4, c5+c7, ...): identify the positions swapped by g^2."""
    _check72(v)
    x = v.bits
    out = 0
    for k in range(18):
        a = (x >> (4 * k)) & 15
        out |= ((a ^ (a >> 2)) & 3) << (2 * k)
    return BitVector(36, out)


def pi(v: BitVector) -> BitVector:
    """Restriction of a g^2-fixed vector to one representative per pair."""
    _check72(v)
    x = v.bits
    out = 0
    for k in range(18):
        a = (x >> (4 * k)) & 15
        if (a & 3) != (a >> 2):
            raise ValueError(f"vector is not fixed by g^2 (ring coordinate {k + 1})")
        out |= (a & 3) << (2 * k)
    return BitVector(36, out)


@dataclass(frozen=True)
class RMatrix:
    """Matrix over R, stored as a grid of 4-bit g-basis entries."""

    entries: Tuple[Tuple[int, ...], ...]

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def ncols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> RVector:
        return RVector(self.entries[i])

    @classmethod
    def from_h_planes(cls, planes: Sequence[BitMatrix]) -> "RMatrix":
        """Build sum_k planes[k] * h^k."""
        return cls._from_planes(planes, H_POWERS)

    @classmethod
    def from_g_planes(cls, planes: Sequence[BitMatrix]) -> "RMatrix":
        return cls._from_planes(planes, (1, 2, 4, 8))

    @classmethod
    def _from_planes(cls, planes: Sequence[BitMatrix], basis: Sequence[int]) -> "RMatrix":
        nrows, ncols = planes[0].shape
        grid = [[0] * ncols for _ in range(nrows)]
        for plane, b in zip(planes, basis):
            if plane.shape != (nrows, ncols):
                raise ValueError("plane shapes differ")
            for i, r in enumerate(plane.rows):
                row = grid[i]
                while r:
                    low = r & -r
                    row[low.bit_length() - 1] ^= b
                    r ^= low
        return cls(tuple(tuple(r) for r in grid))

    def g_planes(self) -> List[BitMatrix]:
        return self._planes(lambda a: a)

    def h_planes(self) -> List[BitMatrix]:
        return self._planes(lambda a: TO_H[a])

    def _planes(self, encode) -> List[BitMatrix]:
        out = []
        for k in range(4):
            rows = []
            for r in self.entries:
                bits = 0
                for j, a in enumerate(r):
                    if (encode(a) >> k) & 1:
                        bits |= 1 << j
                rows.append(bits)
            out.append(BitMatrix(self.nrows, self.ncols, tuple(rows)))
        return out

    def __matmul__(self, other: "RMatrix") -> "RMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = list(zip(*other.entries))
        out = []
        for r in self.entries:
            row = []
            for c in cols:
                acc = 0
                for a, b in zip(r, c):
                    acc ^= MUL_TABLE[a][b]
                row.append(acc)
            out.append(tuple(row))
        return RMatrix(tuple(out))

    def __add__(self, other: "RMatrix") -> "RMatrix":
        return RMatrix(
            tuple(tuple(a ^ b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def conjugate_transpose(self) -> "RMatrix":
        return RMatrix(tuple(tuple(CONJ[a] for a in col) for col in zip(*self.entries)))

    def scale_rows(self, units: Sequence[int]) -> "RMatrix":
        return RMatrix(
            tuple(tuple(MUL_TABLE[u][a] for a in r) for u, r in zip(units, self.entries))
        )

    def scale_columns(self, units: Sequence[int]) -> "RMatrix":
        return RMatrix(
            tuple(tuple(MUL_TABLE[a][u] for a, u in zip(r, units)) for r in self.entries)
        )

    def columns(self, idx: Sequence[int]) -> "RMatrix":
        return RMatrix(tuple(tuple(r[j] for j in idx) for r in self.entries))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.entries)

    @classmethod
    def identity(cls, n: int) -> "RMatrix":
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def from_binary(cls, m: BitMatrix) -> "RMatrix":
        return cls.from_g_planes([m, *(BitMatrix.zeros(*m.shape) for _ in range(3))])


def r_inverse(m: RMatrix) -> RMatrix:
    """Inverse of a square matrix over the local ring R.

    Gauss-Jordan elimination with unit pivots; a matrix is invertible exactly
    when its constant (mod h) part is.
    """
    n = m.nrows
    if m.ncols != n:
        raise ValueError("inverse of a non-square matrix")
    work = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(m.entries)]
    for c in range(n):
        p = next((i for i in range(c, n) if is_unit(work[i][c])), None)
        if p is None:
            raise ValueError("matrix is not invertible over R")
        work[c], work[p] = work[p], work[c]
        inv = ring_inverse(work[c][c])
        work[c] = [MUL_TABLE[inv][a] for a in work[c]]
        for i in range(n):
            f = work[i][c]
            if i != c and f:
                frow = MUL_TABLE[f]
                work[i] = [a ^ frow[b] for a, b in zip(work[i], work[c])]
    return RMatrix(tuple(tuple(r[n:]) for r in work))


def binary_row_expansion(rows: Iterable[RVector]) -> List[BitVector]:
    """mu-preimages of the rows g^i r, i = 0..3, for every ``r``; spans the binary code."""
    out = []
    for r in rows:
        for i in range(4):
            out.append(mu_inverse(r.scale(1 << i)))
    return out
