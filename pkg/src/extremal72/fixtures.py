"""The three (B1, A) pairs that can underlie an extremal code with a Z4 automorphism.

Each pair comes from one of the self-dual [36,18,8] codes C4, C12, C19 of the
online database of binary self-dual codes, with coordinates reordered so that
(1,2)(3,4)...(35,36) is the fixed-point-free involution.  The first matrix A
is printed with the superscript (2) in its original source; here it is A1.
The coordinate reordering used on the database codes is not published, so
the correspondence to C4/C12/C19 is only checked through the [36,18,8]
parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

from .gf2 import (
    BitMatrix,
    MatrixFormatError,
    format_matrix,
    gram,
    parse_matrix,
    parse_matrix_blocks,
)

_B1 = {
    1: """
        010000010
        100000010
        000001100
        000001010
        000000011
        001100110
        001001011
        110111100
        000010100
    """,
    2: """
        001011100
        001010011
        110111111
        001011111
        111101001
        101110101
        101101011
        011100100
        011111100
    """,
    3: """
        000000101
        001011001
        010010000
        000010010
        011101000
        010010000
        100000010
        000100100
        110000000
    """,
}

_A = {
    1: """
        010010001
        011101111
        101000100
        111000011
        001110101
        010111010
        110000111
        000010011
        001011101
    """,
    2: """
        011010011
        011011010
        011001011
        101011111
        110000010
        101111011
        101100110
        111000000
        000111101
    """,
    3: """
        001111100
        100011011
        011011100
        011111011
        010100111
        101001011
        101010000
        000001110
        000001101
    """,
}

SOURCE_LABELS = {1: "C4", 2: "C12", 3: "C19"}

# |C_{G_j}(gbar)| and its generator count, and the order of the induced affine group K_j
CENTRALIZER_ORDERS = {1: 96, 2: 384, 3: 96}
CENTRALIZER_GENERATOR_COUNTS = {1: 4, 2: 5, 3: 5}
AFFINE_GROUP_ORDERS = {1: 12288, 2: 49152, 3: 12288}
# orbits of parameter vectors whose 27-dimensional subcode has weight 16
ORBIT_COUNTS = {1: 501142, 2: 131840, 3: 925972}


def _matrix(text: str) -> BitMatrix:
    return BitMatrix.from_strings(text.split())


@dataclass(frozen=True)
class Fixture:
    id: int
    B1: BitMatrix
    A: BitMatrix
    source_code_label: str = ""


def load_fixture(j: int) -> Fixture:
    if j not in _B1:
        raise ValueError(f"fixture id must be 1, 2 or 3, got {j!r}")
    return Fixture(j, _matrix(_B1[j]), _matrix(_A[j]), SOURCE_LABELS[j])


def all_fixtures() -> List[Fixture]:
    return [load_fixture(j) for j in (1, 2, 3)]


@dataclass
class FixtureReport:
    fixture_id: int
    checks: Dict[str, bool] = field(default_factory=dict)
    phi_distance: int | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> List[str]:
        return [k for k, v in self.checks.items() if not v]


def verify_fixture(f: Fixture, distance: bool = True) -> FixtureReport:
    """Check symmetry, orthogonality, the B1 diagonal condition and the Phi-code distance."""
    from .codegen import check_diag_corollary, phi_code
    from .oracle import exhaustive_min_weight

    rep = FixtureReport(f.id)
    b1, a = f.B1, f.A
    rep.checks["B1 symmetric"] = b1 == b1.T
    rep.checks["B1 zero diagonal"] = not any(b1.diagonal())
    rep.checks["A orthogonal"] = gram(a) == BitMatrix.identity(a.nrows)
    rep.checks["diag(B1^2+B1) zero"] = check_diag_corollary(b1)
    if distance:
        if rep.checks["B1 symmetric"] and rep.checks["A orthogonal"]:
            rep.phi_distance = exhaustive_min_weight(phi_code(b1, a))
        rep.checks["Phi-code distance 8"] = rep.phi_distance == 8
    return rep


def dump_fixtures() -> str:
    """All six matrices as blank-line separated blocks: B1, A for j = 1, 2, 3.

    The output parses back with :func:`extremal72.gf2.parse_matrix_blocks`.
    """
    blocks = []
    for f in all_fixtures():
        blocks += [format_matrix(f.B1), format_matrix(f.A)]
    return "\n".join(blocks)


def parse_code_file(path: str | Path) -> BitMatrix:
    text = Path(path).read_text()
    if not text.strip():
        raise MatrixFormatError("empty file", 1)
    return parse_matrix(text)


def read_structure_params(path: str | Path) -> Tuple[BitMatrix, BitMatrix, BitMatrix, BitMatrix]:
    """Read B1, B2, B3, A blocks separated by blank lines."""
    blocks = parse_matrix_blocks(Path(path).read_text())
    if len(blocks) != 4:
        raise MatrixFormatError(f"expected 4 matrix blocks, found {len(blocks)}")
    return tuple(blocks)  # type: ignore[return-value]
