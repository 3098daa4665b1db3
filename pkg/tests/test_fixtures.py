import pytest

from extremal72.codegen import phi_code
from extremal72.fixtures import (
    AFFINE_GROUP_ORDERS,
    CENTRALIZER_ORDERS,
    Fixture,
    all_fixtures,
    dump_fixtures,
    load_fixture,
    parse_code_file,
    read_structure_params,
    verify_fixture,
)
from extremal72.gf2 import BitMatrix, MatrixFormatError, format_matrix, parse_matrix_blocks


def test_transcribed_rows():
    assert load_fixture(1).B1.to_strings()[0] == "010000010"
    assert load_fixture(2).A.to_strings()[7] == "111000000"
    assert load_fixture(3).B1.to_strings()[8] == "110000000"


def test_row_weights_of_A():
    expected = {
        1: [3, 7, 3, 5, 5, 5, 5, 3, 5],
        2: [5, 5, 5, 7, 3, 7, 5, 3, 5],
        3: [5, 5, 5, 7, 5, 5, 3, 3, 3],
    }
    for j, w in expected.items():
        assert [r.bit_count() for r in load_fixture(j).A.rows] == w


def test_bad_id():
    for j in (0, 4, -1):
        with pytest.raises(ValueError):
            load_fixture(j)


def test_referentially_transparent():
    assert load_fixture(2) == load_fixture(2)
    assert [f.id for f in all_fixtures()] == [1, 2, 3]
    assert [f.source_code_label for f in all_fixtures()] == ["C4", "C12", "C19"]


def test_verify_passes(fixture):
    rep = verify_fixture(fixture)
    assert rep.ok, rep.failures()
    assert rep.phi_distance == 8


def test_corrupted_fixture_fails_orthogonality():
    f = load_fixture(1)
    a = BitMatrix(9, 9, (f.A.rows[0] ^ 1,) + f.A.rows[1:])
    rep = verify_fixture(Fixture(1, f.B1, a, "C4"), distance=False)
    assert not rep.checks["A orthogonal"]
    assert "A orthogonal" in rep.failures()


def test_dump_round_trips():
    blocks = parse_matrix_blocks(dump_fixtures())
    expected = [m for f in all_fixtures() for m in (f.B1, f.A)]
    assert blocks == expected


def test_parse_code_file(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("2 3\n101\n010")
    assert parse_code_file(p).to_strings() == ["101", "010"]
    p.write_text("")
    with pytest.raises(MatrixFormatError):
        parse_code_file(p)
    g = phi_code(load_fixture(2))
    p.write_text(format_matrix(g))
    assert parse_code_file(p) == g


def test_structure_params_file(tmp_path):
    f = load_fixture(3)
    z = BitMatrix.zeros(9, 9)
    p = tmp_path / "s.txt"
    p.write_text("\n".join(format_matrix(m) for m in (f.B1, z, z, f.A)))
    assert read_structure_params(p) == (f.B1, z, z, f.A)
    p.write_text(format_matrix(f.B1))
    with pytest.raises(MatrixFormatError):
        read_structure_params(p)


def test_reference_constants():
    assert CENTRALIZER_ORDERS == {1: 96, 2: 384, 3: 96}
    assert AFFINE_GROUP_ORDERS == {1: 12288, 2: 49152, 3: 12288}
