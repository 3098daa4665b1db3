"""Candidate [72,36] codes from the structure matrices (B1, B2, B3, A).

The R-code generated by [I + B1 h + B2 h^2 + B3 h^3 | A] is expanded to a
36 x 72 binary matrix whose four block rows are the R-rows multiplied by
1, h, h^2, h^3, and whose columns are grouped as
(left block, g^0), (left, g^1), (left, g^2), (left, g^3), (A block, g^0), ...
each group holding 9 columns.  ``EXPANDED_TO_NATURAL`` maps that column
order to the 4-cycle coordinate layout used by :mod:`extremal72.groupring`.

B2 and B3 are each determined by 36 free parameters sitting above the
diagonal, numbered row by row: x1 -> (1,2), x2 -> (1,3), ..., x36 -> (8,9).
A :class:`ParamVector` stores them as a 36-bit integer with x1 as the most
significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .gf2 import (
    BitMatrix,
    BitVector,
    gram,
    hstack,
    mat_add,
    mat_mul,
    rank,
    transpose,
    vstack,
)
from .groupring import RMatrix

N = 9
NPARAMS = 36
PARAM_MASK = (1 << NPARAMS) - 1

# (row, col), 0-based, of parameter x_{k+1}
CELLS: Tuple[Tuple[int, int], ...] = tuple((i, j) for i in range(N) for j in range(i + 1, N))
CELL_INDEX: Dict[Tuple[int, int], int] = {c: k for k, c in enumerate(CELLS)}

EXPANDED_TO_NATURAL: Tuple[int, ...] = tuple(
    4 * ((c // 36) * N + c % N) + (c % 36) // N for c in range(72)
)
PHI_KRON_TO_NATURAL: Tuple[int, ...] = tuple(
    2 * ((c // 18) * N + c % N) + (c % 18) // N for c in range(36)
)


class ConstructionError(ValueError):
    """The structure matrices violate a precondition of the construction."""


@dataclass(frozen=True, order=True)
class ParamVector:
    value: int
    role: str = "B2"

    def __post_init__(self):
        if not 0 <= self.value <= PARAM_MASK:
            raise ValueError("parameter vector must fit in 36 bits")
        if self.role not in ("B2", "B3"):
            raise ValueError(f"unknown role {self.role!r}")

    def bit(self, k: int) -> int:
        """Value of parameter k (1-based within this vector)."""
        return (self.value >> (NPARAMS - k)) & 1

    def bits(self) -> List[int]:
        return [self.bit(k) for k in range(1, NPARAMS + 1)]

    @classmethod
    def from_bits(cls, bits, role: str = "B2") -> "ParamVector":
        value = 0
        for b in bits:
            value = (value << 1) | (b & 1)
        return cls(value, role)

    @classmethod
    def unit(cls, k: int, role: str = "B2") -> "ParamVector":
        return cls(1 << (NPARAMS - k), role)

    @classmethod
    def parse(cls, text: str, role: str = "B2") -> "ParamVector":
        t = text.strip().lower()
        if t.startswith("0x"):
            t = t[2:]
        if not t or len(t) > 9 or any(c not in "0123456789abcdef" for c in t):
            raise ValueError(f"not a 36-bit hex value: {text!r}")
        return cls(int(t, 16), role)

    def hex(self) -> str:
        return f"{self.value:09x}"

    def __str__(self) -> str:
        return self.hex()


@dataclass(frozen=True)
class StructureParams:
    B1: BitMatrix
    B2: BitMatrix
    B3: BitMatrix
    A: BitMatrix


def _identity() -> BitMatrix:
    return BitMatrix.identity(N)


def _upper_value(m: BitMatrix) -> int:
    v = 0
    for i, j in CELLS:
        v = (v << 1) | ((m.rows[i] >> j) & 1)
    return v


def upper_triangle(m: BitMatrix, role: str = "B2") -> ParamVector:
    return ParamVector(_upper_value(m), role)


def check_conditions(p: StructureParams) -> Dict[str, bool]:
    """Pass/fail for each of the four structure conditions, evaluated independently."""
    b1, b2, b3, a = p.B1, p.B2, p.B3, p.A
    b1sq = mat_mul(b1, b1)
    rhs4 = mat_mul(b2, b1) + mat_mul(b1, b2) + mat_mul(b1sq, b1) + b1
    return {
        "i": mat_mul(a, transpose(a)) == _identity(),
        "ii": transpose(b1) == b1,
        "iii": b2 + transpose(b2) == b1sq + b1,
        "iv": b3 + transpose(b3) == rhs4,
    }


def check_diag_corollary(b1: BitMatrix) -> bool:
    return not any((mat_mul(b1, b1) + b1).diagonal())


def complete_B2(b1: BitMatrix, x: ParamVector) -> BitMatrix:
    """B2 with zero diagonal, upper triangle X and lower triangle forced by (iii)."""
    if transpose(b1) != b1:
        raise ConstructionError("B1 is not symmetric")
    s = mat_mul(b1, b1) + b1
    if any(s.diagonal()):
        raise ConstructionError("B1^2 + B1 has a nonzero diagonal; no B2 exists")
    rows = [0] * N
    for k, (i, j) in enumerate(CELLS):
        xk = (x.value >> (NPARAMS - 1 - k)) & 1
        rows[i] |= xk << j
        rows[j] |= (xk ^ ((s.rows[i] >> j) & 1)) << i
    return BitMatrix(N, N, tuple(rows))


def doubly_even_diagonal(b1: BitMatrix, b2: BitMatrix, a: BitMatrix) -> List[int]:
    """The B3 diagonal that makes the expanded code doubly-even.

    B3[i,i] = (1 + wt(A[i]))/2 + B2[i,i] + sum_j (B1[i,j] + 1) B2[i,j]  (mod 2)
    """
    out = []
    for i in range(N):
        wa = a.rows[i].bit_count()
        if wa % 2 == 0:
            raise ConstructionError(f"row {i + 1} of A has even weight")
        b2i = b2.rows[i]
        corr = (b2i & ~b1.rows[i]).bit_count()
        out.append(((1 + wa) // 2 + ((b2i >> i) & 1) + corr) & 1)
    return out


def b3_rhs(b1: BitMatrix, b2: BitMatrix) -> BitMatrix:
    """B2 B1 + B1 B2 + B1^3 + B1, which must equal B3 + B3^T."""
    b1sq = mat_mul(b1, b1)
    return mat_mul(b2, b1) + mat_mul(b1, b2) + mat_mul(b1sq, b1) + b1


def complete_B3(b1: BitMatrix, b2: BitMatrix, a: BitMatrix, y: ParamVector) -> BitMatrix:
    """B3 with upper triangle Y, lower triangle forced by (iv), doubly-even diagonal."""
    rhs = b3_rhs(b1, b2)
    for i in range(N):
        if (rhs.rows[i] >> i) & 1:
            raise ConstructionError(
                f"diagonal entry {i + 1} of B2B1 + B1B2 + B1^3 + B1 is nonzero"
            )
    diag = doubly_even_diagonal(b1, b2, a)
    rows = [d << i for i, d in enumerate(diag)]
    for k, (i, j) in enumerate(CELLS):
        yk = (y.value >> (NPARAMS - 1 - k)) & 1
        rows[i] |= yk << j
        rows[j] |= (yk ^ ((rhs.rows[i] >> j) & 1)) << i
    return BitMatrix(N, N, tuple(rows))


def build_params(b1: BitMatrix, a: BitMatrix, x: ParamVector | int, y: ParamVector | int) -> StructureParams:
    if isinstance(x, int):
        x = ParamVector(x, "B2")
    if isinstance(y, int):
        y = ParamVector(y, "B3")
    b2 = complete_B2(b1, x)
    b3 = complete_B3(b1, b2, a, y)
    return StructureParams(b1, b2, b3, a)


def params_for(fixture, x: ParamVector | int, y: ParamVector | int) -> StructureParams:
    return build_params(fixture.B1, fixture.A, x, y)


def _require(p: StructureParams, which=("i", "ii", "iii", "iv")) -> None:
    rep = check_conditions(p)
    bad = [k for k in which if not rep[k]]
    if bad:
        raise ConstructionError("structure conditions fail: " + ", ".join(f"({k})" for k in bad))


def r_generator(p: StructureParams) -> RMatrix:
    """The 9 x 18 R-matrix [I + B1 h + B2 h^2 + B3 h^3 | A]."""
    _require(p)
    z = BitMatrix.zeros(N, N)
    left = RMatrix.from_h_planes([_identity(), p.B1, p.B2, p.B3])
    right = RMatrix.from_h_planes([p.A, z, z, z])
    return RMatrix(tuple(l + r for l, r in zip(left.entries, right.entries)))


def _block_rows(b1: BitMatrix, b2: BitMatrix, b3: BitMatrix, a: BitMatrix) -> List[BitMatrix]:
    i9 = _identity()
    z = BitMatrix.zeros(N, N)
    r1 = hstack(i9 + b1 + b2 + b3, b1 + b3, b2 + b3, b3, a, z, z, z)
    r2 = hstack(i9 + b1 + b2, i9 + b2, b1 + b2, b2, a, a, z, z)
    r3 = hstack(i9 + b1, b1, i9 + b1, b1, a, z, a, z)
    r4 = hstack(i9, i9, i9, i9, a, a, a, a)
    return [r1, r2, r3, r4]


def expand_binary(p: StructureParams, check: bool = True) -> BitMatrix:
    """The 36 x 72 binary generator in block-row form; see the module docstring."""
    if check:
        _require(p)
    return vstack(*_block_rows(p.B1, p.B2, p.B3, p.A))


def subcode_D(b1: BitMatrix, b2: BitMatrix, a: BitMatrix, check: bool = True) -> BitMatrix:
    """27 x 72 expansion of [I h + B1 h^2 + B2 h^3 | A h]; independent of B3.

    These are block rows 2-4 of :func:`expand_binary`, so the result is a
    subcode of every completion sharing (B1, B2, A).
    """
    if check:
        rep = check_conditions(StructureParams(b1, b2, BitMatrix.zeros(N, N), a))
        bad = [k for k in ("i", "ii", "iii") if not rep[k]]
        if bad:
            raise ConstructionError("structure conditions fail: " + ", ".join(bad))
    z = BitMatrix.zeros(N, N)
    return vstack(*_block_rows(b1, b2, z, a)[1:])


def is_self_dual(g: BitMatrix) -> bool:
    if rank(g) * 2 != g.ncols:
        return False
    return gram(g).is_zero()


def is_doubly_even(g: BitMatrix) -> bool:
    """Row weights divisible by 4 and rows pairwise orthogonal.

    By wt(u+v) = wt(u) + wt(v) - 2|u & v| this extends to every codeword.
    """
    if any(r.bit_count() % 4 for r in g.rows):
        return False
    return gram(g).is_zero()


def phi_code(p, a: BitMatrix | None = None) -> BitMatrix:
    """[I2 (x) I + J2 (x) B1 | I2 (x) A]: generator of the image code Phi(C).

    Accepts anything with ``B1`` and ``A`` attributes, or ``(B1, A)``.
    Columns follow the Kronecker layout; ``PHI_KRON_TO_NATURAL`` maps them to
    the paired coordinate order in which g-bar = (1,2)(3,4)...(35,36).
    """
    if a is None:
        b1, a = p.B1, p.A
    else:
        b1 = p
    i9 = _identity()
    z = BitMatrix.zeros(N, N)
    top = hstack(i9 + b1, b1, a, z)
    bottom = hstack(b1, i9 + b1, z, a)
    return vstack(top, bottom)


def phi_code_natural(p, a: BitMatrix | None = None) -> BitMatrix:
    from .gf2 import permute_columns

    return permute_columns(phi_code(p, a), PHI_KRON_TO_NATURAL)


def to_natural(g: BitMatrix) -> BitMatrix:
    """Reorder the columns of an expanded generator into the 4-cycle layout."""
    from .gf2 import permute_columns

    return permute_columns(g, EXPANDED_TO_NATURAL)


def codeword_to_natural(v: BitVector) -> BitVector:
    from .gf2 import permute_bits

    return BitVector(72, permute_bits(v.bits, EXPANDED_TO_NATURAL))


# sampled checks shared by the CLI and the acceptance suite


@dataclass
class ConstructionSample:
    total: int = 0
    rank_ok: int = 0
    self_orthogonal: int = 0
    weights_mod4: int = 0
    failures: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def sample_construction(b1: BitMatrix, a: BitMatrix, count: int, rng) -> ConstructionSample:
    """Expand ``count`` random (X, Y) pairs; check rank 36, G G^T = 0, weights 0 mod 4."""
    rep = ConstructionSample()
    for _ in range(count):
        x, y = rng.getrandbits(NPARAMS), rng.getrandbits(NPARAMS)
        g = expand_binary(build_params(b1, a, x, y))
        r = rank(g) == 36
        so = gram(g).is_zero()
        m4 = all(row.bit_count() % 4 == 0 for row in g.rows)
        rep.total += 1
        rep.rank_ok += r
        rep.self_orthogonal += so
        rep.weights_mod4 += m4
        if not (r and so and m4):
            rep.failures.append((x, y))
    return rep


def diagonal_flip_detections(b1: BitMatrix, a: BitMatrix, x: int, y: int) -> List[bool]:
    """For each i, whether flipping B3[i,i] breaks doubly-evenness (it always should)."""
    p = build_params(b1, a, x, y)
    out = []
    for i in range(N):
        b3 = BitMatrix(N, N, tuple(r ^ (1 << i) if k == i else r for k, r in enumerate(p.B3.rows)))
        g = expand_binary(StructureParams(p.B1, p.B2, b3, p.A), check=False)
        out.append(not is_doubly_even(g))
    return out
