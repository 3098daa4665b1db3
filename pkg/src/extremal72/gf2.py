"""Bit-packed vectors and matrices over GF(2).

Bits are stored in Python ints: position ``p`` (0-based) of a vector is bit
``p`` of the integer, so the text form ``"1100"`` is the integer ``0b0011``.
Matrices are row-major tuples of such ints.  Every value is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

MAX_LENGTH = 4096


class MatrixFormatError(ValueError):
    """Raised when matrix text cannot be parsed; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def popcount(x: int) -> int:
    return x.bit_count()


def _check_length(n: int) -> None:
    if not 0 < n <= MAX_LENGTH:
        raise ValueError(f"length must be in 1..{MAX_LENGTH}, got {n}")


def bits_from_string(s: str) -> int:
    out = 0
    for i, ch in enumerate(s):
        if ch == "1":
            out |= 1 << i
        elif ch != "0":
            raise ValueError(f"invalid bit character {ch!r}")
    return out


def bits_to_string(x: int, n: int) -> str:
    return "".join("1" if (x >> i) & 1 else "0" for i in range(n))


@dataclass(frozen=True)
class BitVector:
    length: int
    bits: int = 0

    def __post_init__(self):
        _check_length(self.length)
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        return cls(n, (1 << n) - 1)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVector":
        """The vector with a single 1 at 0-based index ``i``."""
        if not 0 <= i < n:
            raise IndexError(i)
        return cls(n, 1 << i)

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        return cls(len(s), bits_from_string(s))

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitVector":
        bits = 0
        for i, b in enumerate(values):
            if b & 1:
                bits |= 1 << i
        return cls(len(values), bits)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __iter__(self):
        return (int((self.bits >> i) & 1) for i in range(self.length))

    def __len__(self) -> int:
        return self.length

    def __add__(self, other: "BitVector") -> "BitVector":
        return add(self, other)

    __xor__ = __add__

    def __str__(self) -> str:
        return bits_to_string(self.bits, self.length)

    def to_list(self) -> List[int]:
        return list(self)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> List[int]:
        return [i for i in range(self.length) if (self.bits >> i) & 1]


def weight(v: BitVector) -> int:
    return v.bits.bit_count()


def _same_length(u: BitVector, v: BitVector) -> None:
    if u.length != v.length:
        raise ValueError(f"length mismatch: {u.length} != {v.length}")


def add(u: BitVector, v: BitVector) -> BitVector:
    _same_length(u, v)
    return BitVector(u.length, u.bits ^ v.bits)


def dot(u: BitVector, v: BitVector) -> int:
    """Standard inner product, returned as 0 or 1."""
    _same_length(u, v)
    return (u.bits & v.bits).bit_count() & 1


@dataclass(frozen=True)
class BitMatrix:
    nrows: int
    ncols: int
    rows: Tuple[int, ...]

    def __post_init__(self):
        if self.nrows < 0 or len(self.rows) != self.nrows:
            raise ValueError("row count does not match nrows")
        _check_length(self.ncols)
        limit = 1 << self.ncols
        for r in self.rows:
            if r < 0 or r >= limit:
                raise ValueError("row has bits beyond ncols")

    # constructors

    @classmethod
    def from_ints(cls, rows: Iterable[int], ncols: int) -> "BitMatrix":
        rows = tuple(rows)
        return cls(len(rows), ncols, rows)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, (0,) * nrows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BitMatrix":
        lines = [ln.strip() for ln in lines]
        if not lines:
            raise ValueError("no rows")
        ncols = len(lines[0])
        if any(len(ln) != ncols for ln in lines):
            raise ValueError("ragged rows")
        return cls(len(lines), ncols, tuple(bits_from_string(ln) for ln in lines))

    @classmethod
    def from_lists(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        return cls.from_strings(["".join(str(b & 1) for b in r) for r in rows])

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector]) -> "BitMatrix":
        if not vectors:
            raise ValueError("no rows")
        n = vectors[0].length
        if any(v.length != n for v in vectors):
            raise ValueError("ragged rows")
        return cls(len(vectors), n, tuple(v.bits for v in vectors))

    # access

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        return (self.rows[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def column(self, j: int) -> BitVector:
        return BitVector(self.nrows, sum(((r >> j) & 1) << i for i, r in enumerate(self.rows)))

    def row_vectors(self) -> List[BitVector]:
        return [BitVector(self.ncols, r) for r in self.rows]

    def to_lists(self) -> List[List[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def to_strings(self) -> List[str]:
        return [bits_to_string(r, self.ncols) for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(self.to_strings())

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    def is_zero(self) -> bool:
        return not any(self.rows)

    def diagonal(self) -> List[int]:
        return [(self.rows[i] >> i) & 1 for i in range(min(self.nrows, self.ncols))]

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        return mat_add(self, other)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return mat_mul(self, other)

    @property
    def T(self) -> "BitMatrix":
        return transpose(self)


def mat_add(m: BitMatrix, n: BitMatrix) -> BitMatrix:
    if m.shape != n.shape:
        raise ValueError(f"shape mismatch: {m.shape} vs {n.shape}")
    return BitMatrix(m.nrows, m.ncols, tuple(a ^ b for a, b in zip(m.rows, n.rows)))


def mat_mul(m: BitMatrix, n: BitMatrix) -> BitMatrix:
    if m.ncols != n.nrows:
        raise ValueError(f"cannot multiply {m.shape} by {n.shape}")
    nrows = n.rows
    out = []
    for r in m.rows:
        acc = 0
        k = 0
        while r:
            if r & 1:
                acc ^= nrows[k]
            r >>= 1
            k += 1
        out.append(acc)
    return BitMatrix(m.nrows, n.ncols, tuple(out))


def vec_mat(v: BitVector, m: BitMatrix) -> BitVector:
    """Row vector times matrix."""
    if v.length != m.nrows:
        raise ValueError("length mismatch")
    return BitVector(m.ncols, combine_rows(m.rows, v.bits))


def combine_rows(rows: Sequence[int], mask: int) -> int:
    """XOR of the rows selected by the set bits of ``mask``."""
    acc = 0
    k = 0
    while mask:
        if mask & 1:
            acc ^= rows[k]
        mask >>= 1
        k += 1
    return acc


def transpose(m: BitMatrix) -> BitMatrix:
    if m.nrows == 0:
        raise ValueError("cannot transpose a matrix with no rows")
    cols = [0] * m.ncols
    for i, r in enumerate(m.rows):
        bit = 1 << i
        while r:
            low = r & -r
            cols[low.bit_length() - 1] |= bit
            r ^= low
    return BitMatrix(m.ncols, m.nrows, tuple(cols))


def gram(m: BitMatrix) -> BitMatrix:
    """``m`` times its own transpose, computed row-pair by row-pair."""
    rows = m.rows
    out = []
    for a in rows:
        acc = 0
        for j, b in enumerate(rows):
            if (a & b).bit_count() & 1:
                acc |= 1 << j
        out.append(acc)
    return BitMatrix(m.nrows, m.nrows, tuple(out))


def hstack(*blocks: BitMatrix) -> BitMatrix:
    nrows = blocks[0].nrows
    if any(b.nrows != nrows for b in blocks):
        raise ValueError("row counts differ")
    rows = [0] * nrows
    shift = 0
    for b in blocks:
        for i, r in enumerate(b.rows):
            rows[i] |= r << shift
        shift += b.ncols
    return BitMatrix(nrows, shift, tuple(rows))


def vstack(*blocks: BitMatrix) -> BitMatrix:
    ncols = blocks[0].ncols
    if any(b.ncols != ncols for b in blocks):
        raise ValueError("column counts differ")
    rows: List[int] = []
    for b in blocks:
        rows.extend(b.rows)
    return BitMatrix(len(rows), ncols, tuple(rows))


def permute_columns(m: BitMatrix, perm: Sequence[int]) -> BitMatrix:
    """Column ``j`` of the input becomes column ``perm[j]`` of the result."""
    return BitMatrix(m.nrows, m.ncols, tuple(permute_bits(r, perm) for r in m.rows))


def permute_bits(x: int, perm: Sequence[int]) -> int:
    out = 0
    while x:
        low = x & -x
        out |= 1 << perm[low.bit_length() - 1]
        x ^= low
    return out


def echelon(rows: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Reduced row echelon form.

    Pivots are taken left to right (lowest bit first).  Returns the nonzero
    reduced rows and their pivot columns, in pivot order.
    """
    basis: List[int] = []
    pivots: List[int] = []
    for r in rows:
        for b, p in zip(basis, pivots):
            if (r >> p) & 1:
                r ^= b
        if r:
            p = (r & -r).bit_length() - 1
            for i, b in enumerate(basis):
                if (b >> p) & 1:
                    basis[i] = b ^ r
            basis.append(r)
            pivots.append(p)
    order = sorted(range(len(pivots)), key=pivots.__getitem__)
    return [basis[i] for i in order], [pivots[i] for i in order]


def rank(m: BitMatrix) -> int:
    return len(echelon(m.rows)[0])


def reduce_against(x: int, basis: Sequence[int], pivots: Sequence[int]) -> int:
    for b, p in zip(basis, pivots):
        if (x >> p) & 1:
            x ^= b
    return x


def in_row_space(v: BitVector | int, m: BitMatrix) -> bool:
    x = v.bits if isinstance(v, BitVector) else v
    basis, pivots = echelon(m.rows)
    return reduce_against(x, basis, pivots) == 0


def row_space_contains(big: BitMatrix, small: BitMatrix) -> bool:
    """True when every row of ``small`` lies in the row space of ``big``."""
    if big.ncols != small.ncols:
        return False
    basis, pivots = echelon(big.rows)
    return all(reduce_against(r, basis, pivots) == 0 for r in small.rows)


def same_row_space(m: BitMatrix, n: BitMatrix) -> bool:
    return m.ncols == n.ncols and echelon(m.rows)[0] == echelon(n.rows)[0]


def inverse(m: BitMatrix) -> BitMatrix:
    if m.nrows != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    n = m.nrows
    aug = [r | (1 << (n + i)) for i, r in enumerate(m.rows)]
    basis, pivots = echelon(aug)
    if len(basis) < n or pivots[n - 1] != n - 1:
        raise ValueError("matrix is singular")
    mask = (1 << n) - 1
    return BitMatrix(n, n, tuple((b >> n) & mask for b in basis[:n]))


# text format: "rows cols" header, then one line of 0/1 characters per row


def format_matrix(m: BitMatrix) -> str:
    return f"{m.nrows} {m.ncols}\n" + "".join(s + "\n" for s in m.to_strings())


def parse_matrix_lines(lines: Sequence[str], start_line: int = 1) -> BitMatrix:
    """Parse one matrix block; ``start_line`` numbers the first line in errors."""
    if not lines:
        raise MatrixFormatError("empty input: missing 'rows cols' header", start_line)
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise MatrixFormatError(f"malformed header {lines[0]!r}", start_line)
    nrows, ncols = int(header[0]), int(header[1])
    if not 0 < ncols <= MAX_LENGTH:
        raise MatrixFormatError(f"column count {ncols} out of range", start_line)
    body = lines[1:]
    if len(body) < nrows:
        raise MatrixFormatError(
            f"expected {nrows} rows, found {len(body)}", start_line + len(body) + 1
        )
    if len(body) > nrows:
        raise MatrixFormatError("extra lines after matrix", start_line + nrows + 1)
    rows = []
    for k, text in enumerate(body):
        lineno = start_line + 1 + k
        if len(text) != ncols:
            raise MatrixFormatError(f"expected {ncols} characters, found {len(text)}", lineno)
        bad = set(text) - {"0", "1"}
        if bad:
            raise MatrixFormatError(f"invalid character {sorted(bad)[0]!r}", lineno)
        rows.append(bits_from_string(text))
    return BitMatrix(nrows, ncols, tuple(rows))


def parse_matrix(text: str) -> BitMatrix:
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    return parse_matrix_lines(lines)


def parse_matrix_blocks(text: str) -> List[BitMatrix]:
    """Parse several matrices separated by blank lines."""
    blocks: List[BitMatrix] = []
    current: List[str] = []
    start = 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip() == "":
            if current:
                blocks.append(parse_matrix_lines(current, start))
                current = []
            continue
        if not current:
            start = lineno
        current.append(line)
    if current:
        blocks.append(parse_matrix_lines(current, start))
    return blocks


def read_matrix(path: str | Path) -> BitMatrix:
    return parse_matrix(Path(path).read_text())


def write_matrix(path: str | Path, m: BitMatrix) -> None:
    Path(path).write_text(format_matrix(m))
