import random

import numpy as np
import pytest

from extremal72.codegen import NPARAMS, ParamVector, complete_B2, subcode_D, to_natural, upper_triangle
from extremal72.detector import has_word_below
from extremal72.fixtures import AFFINE_GROUP_ORDERS, CENTRALIZER_ORDERS, load_fixture
from extremal72.gf2 import BitMatrix, permute_columns, same_row_space
from extremal72 import symmetry as S

IDENT36 = list(range(36))


def rand_affine(rng):
    while True:
        t = S.AffineTransform(tuple(rng.getrandbits(36) for _ in range(36)), rng.getrandbits(36))
        if t.is_invertible():
            return t


def test_apply_examples():
    rng = random.Random(0)
    x = ParamVector(rng.getrandbits(36))
    assert S.apply(S.AffineTransform.identity(), x) == x
    e1 = S.AffineTransform.translation(ParamVector.unit(1).value)
    assert e1(e1(x)) == x
    for _ in range(20):
        t = rand_affine(rng)
        y = ParamVector(rng.getrandbits(36))
        assert S.apply(t, S.apply(S.inverse(t), y)) == y
        assert S.apply(S.inverse(t), S.apply(t, y)) == y


def test_compose_order():
    rng = random.Random(1)
    t, s = rand_affine(rng), rand_affine(rng)
    for _ in range(10):
        x = rng.getrandbits(36)
        assert S.apply(S.compose(t, s), x) == S.apply(s, S.apply(t, x))
        assert t.then(s)(x) == s(t(x))


def test_matrix_view():
    t = S.AffineTransform.identity()
    assert t.matrix() == BitMatrix.identity(36)


def test_derive_affine():
    assert S.derive_affine(lambda x: x) == S.AffineTransform.identity()
    rng = random.Random(2)
    t = rand_affine(rng)
    assert S.derive_affine(lambda x: S.apply(t, x).value) == t

    def quadratic(x):
        x1 = (x >> 35) & 1
        x2 = (x >> 34) & 1
        return x ^ (x1 & x2)

    with pytest.raises(S.AffinityError):
        S.derive_affine(quadratic, probes=50)


def test_lift_identity_and_gbar(fixture):
    assert S.lift_transform(IDENT36, fixture) == S.AffineTransform.identity()
    t = S.lift_transform(S.gbar(), fixture)
    assert t.is_invertible()


def test_lift_rejects_bad_permutations(fixture):
    swap = IDENT36[:]
    swap[0], swap[2] = 2, 0  # breaks commuting with g-bar
    with pytest.raises(S.LiftError, match="commute"):
        S.lift_action(swap, fixture)
    pair_swap = IDENT36[:]
    pair_swap[0:4] = [2, 3, 0, 1]  # commutes, but is not a code automorphism
    with pytest.raises(S.LiftError, match="Phi-code"):
        S.lift_action(pair_swap, fixture)
    with pytest.raises(S.LiftError):
        S.lift_action([0] * 36, fixture)


def test_kernel_translations(fixture):
    ks = S.kernel_translations(fixture)
    for k, t in enumerate(ks):
        col = [(fixture.A.rows[i] >> k) & 1 for i in range(9)]
        aat = BitMatrix(9, 9, tuple(sum(col[i] * col[c] << c for c in range(9)) for i in range(9)))
        assert t.T == S.AffineTransform.identity().T
        assert t.v == upper_triangle(aat).value
    assert S.group_closure(ks).order == 256


def test_closure_small_cases():
    assert S.group_closure([S.AffineTransform.identity()]).order == 1
    assert S.group_closure([]).order == 1
    e1 = S.AffineTransform.translation(ParamVector.unit(1).value)
    assert S.group_closure([e1]).order == 2
    gens = [S.AffineTransform.translation(1 << k) for k in range(12)]
    with pytest.raises(S.GroupTooLarge):
        S.group_closure(gens, cap=1000)
    singular = S.AffineTransform((0,) * 36, 0)
    with pytest.raises(ValueError):
        S.group_closure([singular])


def test_closure_contains_and_is_closed():
    gens = [S.AffineTransform.translation(1 << k) for k in range(3)]
    perm_rows = list(S.AffineTransform.identity().T)
    perm_rows[0], perm_rows[1] = perm_rows[1], perm_rows[0]
    swap = S.AffineTransform(tuple(perm_rows), 0)
    grp = S.group_closure(gens + [swap])
    for t in grp.elements():
        assert grp.contains(S.inverse(t))
        assert grp.contains(S.compose(t, swap))
    shuffled = S.group_closure([swap] + gens[::-1])
    assert shuffled.order == grp.order


def test_canonical_form():
    rng = random.Random(3)
    x = ParamVector(rng.getrandbits(36))
    trivial = S.group_closure([])
    assert S.canonical_form(x, trivial) == x
    v = rng.getrandbits(36)
    two = S.group_closure([S.AffineTransform.translation(v)])
    assert S.canonical_form(x, two).value == min(x.value, x.value ^ v)


def _centralizer(data_dir, j):
    return S.read_permutations(data_dir / f"centralizer_j{j}.txt")


@pytest.mark.parametrize("j", [1, 3])
def test_centralizer_files_and_group_orders(data_dir, j):
    f = load_fixture(j)
    perms = _centralizer(data_dir, j)
    chk = S.validate_centralizer(perms, f)
    assert chk.matches(CENTRALIZER_ORDERS[j])
    grp = S.affine_group_for(f, perms)
    assert grp.order == AFFINE_GROUP_ORDERS[j]
    rng = random.Random(j)
    for _ in range(5):
        x = rng.getrandbits(36)
        c = S.canonical_form(x, grp)
        i = rng.randrange(grp.order)
        t = S.AffineTransform(tuple(int(r) for r in grp.T[i]), int(grp.v[i]))
        assert S.canonical_form(t(x), grp) == c


def test_lift_maps_subcode_exactly(data_dir):
    """tau applied to D(X) is D(X T + v) as a set, coordinate for coordinate."""
    f = load_fixture(1)
    rng = random.Random(8)
    for tau_bar in _centralizer(data_dir, 1):
        t = S.lift_transform(tau_bar, f)
        for _ in range(3):
            x = ParamVector(rng.getrandbits(36))
            x2, perm = S.lift_permutation(tau_bar, f, x)
            assert x2 == t(x)
            d = to_natural(subcode_D(f.B1, complete_B2(f.B1, x), f.A))
            d2 = to_natural(subcode_D(f.B1, complete_B2(f.B1, x2), f.A))
            assert same_row_space(permute_columns(d, perm), d2)


def test_lift_preserves_low_weight_profile(data_dir):
    f = load_fixture(3)
    rng = random.Random(9)
    t = S.lift_transform(_centralizer(data_dir, 3)[0], f)
    for _ in range(5):
        x = rng.getrandbits(36)
        d1 = subcode_D(f.B1, complete_B2(f.B1, ParamVector(x)), f.A)
        d2 = subcode_D(f.B1, complete_B2(f.B1, t(x)), f.A)
        for w in (12, 13, 16, 17):
            assert (has_word_below(d1, w) is None) == (has_word_below(d2, w) is None)


def test_orbit_filter():
    f = load_fixture(1)
    trivial = S.group_closure([])
    assert S.orbit_filter(f, trivial, [0], 16) == []
    kept = S.orbit_filter(f, trivial, [0, 1, 2, 3], 0)
    assert [r.x.value for r in kept] == [0, 1, 2, 3]
    assert all(r.min_weight == 12 for r in kept)
    grp = S.group_closure(S.kernel_translations(f))
    x = 0x8ec1d7da0
    t = next(grp.elements())
    reps = S.orbit_filter(f, grp, [x, S.apply(S.kernel_translations(f)[0], x).value], 16)
    assert len(reps) == 1 and reps[0].min_weight == 16
    assert reps[0].x == S.canonical_form(x, grp)


def test_inversion_translation_preserves_subcode_weight():
    # an extra symmetry outside K_j; kept optional
    f = load_fixture(2)
    inv = S.inversion_translation(f)
    rng = random.Random(10)
    for _ in range(10):
        x = rng.getrandbits(36)
        assert S.subcode_min_weight(f, x) == S.subcode_min_weight(f, inv(x))


def test_files(tmp_path):
    rng = random.Random(4)
    perms = []
    for _ in range(3):
        p = list(range(36))
        rng.shuffle(p)
        perms.append(p)
    path = tmp_path / "perms.txt"
    S.write_permutations(path, perms)
    assert S.read_permutations(path) == perms
    path.write_text("1 2 3\n")
    with pytest.raises(ValueError, match="line 1"):
        S.read_permutations(path)
    reps = [S.OrbitRep(ParamVector(5), 16)]
    out = tmp_path / "reps.txt"
    S.write_representatives(out, reps, 1, 12288, 16)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# fixture=1 group_order=12288 bound=16")
    assert lines[1] == "000000005 16"


def test_permutation_group_order():
    assert S.permutation_group_order([S.gbar()]) == 2
    cyc = list(range(1, 36)) + [0]
    assert S.permutation_group_order([cyc]) == 36
