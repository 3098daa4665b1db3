"""Affine symmetries of the B2 parameter space and orbit representatives.

A permutation tau-bar of the 36 Phi-code coordinates that commutes with
g-bar = (1,2)(3,4)...(35,36) and preserves the Phi-code lifts to a
permutation tau of the 72 coordinates commuting with g.  Applying tau to a
code with parameters X gives an equivalent code whose normalised B2 has
upper triangle X*T + v for a nonsingular T, so each generator contributes
an affine map on the parameters.

Conventions: parameter vectors are 36-bit ints with x1 most significant
(see :class:`extremal72.codegen.ParamVector`); ``T`` is stored as 36 row
values, row ``k`` being e_{k+1} * T; maps act on row vectors, X -> X*T + v.
Permutations are 0-based lists of images in code, 1-based in files.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .codegen import (
    N,
    NPARAMS,
    PARAM_MASK,
    ParamVector,
    build_params,
    complete_B2,
    phi_code_natural,
    r_generator,
    subcode_D,
    upper_triangle,
)
from .detector import minimum_weight
from .fixtures import Fixture
from .gf2 import BitMatrix, echelon, permute_bits, reduce_against
from .groupring import MUL_TABLE, RMatrix, r_inverse

MSB = NPARAMS - 1


class AffinityError(ValueError):
    """A probed parameter action is not affine."""


class LiftError(ValueError):
    """A permutation cannot be lifted to a structure-preserving map."""


class GroupTooLarge(RuntimeError):
    pass


# affine maps


def _vec_mat(x: int, t_rows: Sequence[int]) -> int:
    acc = 0
    for k in range(NPARAMS):
        if (x >> (MSB - k)) & 1:
            acc ^= t_rows[k]
    return acc


@dataclass(frozen=True)
class AffineTransform:
    T: Tuple[int, ...]
    v: int = 0

    def __post_init__(self):
        if len(self.T) != NPARAMS:
            raise ValueError("T must have 36 rows")

    @classmethod
    def identity(cls) -> "AffineTransform":
        return cls(tuple(1 << (MSB - k) for k in range(NPARAMS)), 0)

    @classmethod
    def translation(cls, v: int) -> "AffineTransform":
        return cls(cls.identity().T, v)

    def __call__(self, x: ParamVector | int) -> ParamVector:
        return apply(self, x)

    def matrix(self) -> BitMatrix:
        """T as a BitMatrix whose column j corresponds to x_{j+1}."""
        return BitMatrix(NPARAMS, NPARAMS, tuple(_rev(r) for r in self.T))

    def is_invertible(self) -> bool:
        return len(echelon(self.T)[0]) == NPARAMS

    def then(self, other: "AffineTransform") -> "AffineTransform":
        """The map X -> other(self(X))."""
        return compose(self, other)


def apply(t: AffineTransform, x: ParamVector | int) -> ParamVector:
    xv = x.value if isinstance(x, ParamVector) else x
    return ParamVector(_vec_mat(xv, t.T) ^ t.v)


def compose(t: AffineTransform, s: AffineTransform) -> AffineTransform:
    """First ``t`` then ``s``: X -> (X*T_t + v_t)*T_s + v_s."""
    return AffineTransform(tuple(_vec_mat(r, s.T) for r in t.T), _vec_mat(t.v, s.T) ^ s.v)


def inverse(t: AffineTransform) -> AffineTransform:
    # rows of T^-1: solve e_k = y * T, i.e. invert via augmented elimination
    n = NPARAMS
    aug = []
    for k, r in enumerate(t.T):
        aug.append((_rev(r)) | (1 << (n + k)))
    basis, pivots = echelon(aug)
    if len(basis) < n or pivots[n - 1] != n - 1:
        raise ValueError("T is singular")
    inv_rows = [0] * n
    for b, p in zip(basis, pivots):
        # b = e_p (in reversed-bit coords) | (combination of T rows)
        comb = b >> n
        row = 0
        for k in range(n):
            if (comb >> k) & 1:
                row |= 1 << (MSB - k)
        inv_rows[p] = row
    tinv = tuple(inv_rows)
    return AffineTransform(tinv, _vec_mat(t.v, tinv))


def _rev(x: int) -> int:
    """Reverse a 36-bit value so that x1 becomes bit 0."""
    return int(f"{x:036b}"[::-1], 2)


def derive_affine(action: Callable[[int], int], probes: int = 10, seed: int = 0) -> AffineTransform:
    """Recover (T, v) from an action oracle by probing 0 and the unit vectors."""
    v = action(0)
    rows = tuple(action(1 << (MSB - k)) ^ v for k in range(NPARAMS))
    t = AffineTransform(rows, v)
    rng = random.Random(seed)
    for _ in range(probes):
        x = rng.getrandbits(NPARAMS)
        if action(x) != apply(t, x).value:
            raise AffinityError(f"action is not affine (fails at X={x:09x})")
    return t


# lifting centralizer elements


def gbar() -> List[int]:
    return [i ^ 1 for i in range(2 * 2 * N)]


def is_permutation(p: Sequence[int], n: int = 36) -> bool:
    return len(p) == n and sorted(p) == list(range(n))


def commutes_with_gbar(p: Sequence[int]) -> bool:
    return all(p[i ^ 1] == p[i] ^ 1 for i in range(len(p)))


def preserves_phi_code(p: Sequence[int], fixture) -> bool:
    code = phi_code_natural(fixture.B1, fixture.A)
    basis, pivots = echelon(code.rows)
    return all(reduce_against(permute_bits(r, p), basis, pivots) == 0 for r in code.rows)


def _column_map(tau_bar: Sequence[int], twists: Sequence[int] | None) -> Tuple[List[int], List[int]]:
    """Ring-coordinate permutation sigma and the powers of g applied per column."""
    sigma, powers = [], []
    for k in range(2 * N):
        img = tau_bar[2 * k]
        sigma.append(img // 2)
        powers.append((img & 1) + (2 * twists[k] if twists else 0))
    return sigma, powers


def _validate_tau(tau_bar: Sequence[int], fixture: Fixture) -> None:
    if not is_permutation(tau_bar):
        raise LiftError("not a permutation of 36 points")
    if not commutes_with_gbar(tau_bar):
        raise LiftError("permutation does not commute with (1,2)(3,4)...(35,36)")
    if not preserves_phi_code(tau_bar, fixture):
        raise LiftError("permutation does not preserve the Phi-code")


def _lift_once(fixture: Fixture, sigma: Sequence[int], powers: Sequence[int],
               x: int) -> Tuple[int, int]:
    """New parameters for ``x`` and the mask of left columns needing g^2."""
    p = build_params(fixture.B1, fixture.A, ParamVector(x), 0)
    m = r_generator(p).entries
    moved = [[0] * (2 * N) for _ in range(N)]
    for k in range(2 * N):
        unit = 1 << (powers[k] % 4)
        for i in range(N):
            moved[i][sigma[k]] = MUL_TABLE[m[i][k]][unit]
    left = RMatrix(tuple(tuple(r[:N]) for r in moved))
    right = RMatrix(tuple(tuple(r[N:]) for r in moved))
    try:
        rinv = r_inverse(right)
    except ValueError:
        raise LiftError("image of the A block is not invertible") from None
    planes = (RMatrix.from_binary(fixture.A) @ rinv @ left).h_planes()
    if planes[0] != BitMatrix.identity(N) or planes[1] != fixture.B1:
        raise LiftError("lift does not restore I and B1")
    diag = sum(d << i for i, d in enumerate(planes[2].diagonal()))
    b2 = BitMatrix(N, N, tuple(r & ~(1 << i) for i, r in enumerate(planes[2].rows)))
    if b2 + b2.T != fixture.B1 @ fixture.B1 + fixture.B1:
        raise LiftError("lifted B2 violates the structure condition")
    return upper_triangle(b2).value, diag


def lift_action(tau_bar: Sequence[int], fixture: Fixture,
                twists: Sequence[int] | None = None,
                check: bool = True) -> Callable[[int], int]:
    """Parameter action of the lift of ``tau_bar`` (0-based images).

    Ring column k moves to column sigma(k) and is multiplied by g^t_k, where
    t_k is the swap bit of tau-bar on pair k plus 2 * twists[k].  The image
    matrix is brought back to the form [I + B1 h + B2' h^2 + B3' h^3 | A]
    by left multiplication; columns of the left block are then multiplied
    by g^2 = 1 + h^2 where B2' has a 1 on the diagonal, which clears it and
    touches only the h^3 part, so the new parameters are the upper triangle
    of B2'.
    """
    tau_bar = list(tau_bar)
    if check:
        _validate_tau(tau_bar, fixture)
    sigma, powers = _column_map(tau_bar, twists)
    return lambda x: _lift_once(fixture, sigma, powers, x)[0]


def lift_permutation(tau_bar: Sequence[int], fixture: Fixture, x: ParamVector | int,
                     twists: Sequence[int] | None = None) -> Tuple[ParamVector, List[int]]:
    """The image parameters of ``x`` and the full 72-coordinate permutation used.

    Coordinates follow the 4-cycle layout: position 4k + e is ring column k,
    exponent e.  The permutation includes the g^2 corrections on left columns,
    which depend on ``x``.
    """
    tau_bar = list(tau_bar)
    _validate_tau(tau_bar, fixture)
    xv = x.value if isinstance(x, ParamVector) else x
    sigma, powers = _column_map(tau_bar, twists)
    new_x, diag = _lift_once(fixture, sigma, powers, xv)
    perm = [0] * 72
    for k in range(2 * N):
        col = sigma[k]
        shift = powers[k] + (2 if col < N and (diag >> col) & 1 else 0)
        for e in range(4):
            perm[4 * k + e] = 4 * col + (e + shift) % 4
    return ParamVector(new_x), perm


def lift_transform(tau_bar: Sequence[int], fixture: Fixture,
                   twists: Sequence[int] | None = None) -> AffineTransform:
    return derive_affine(lift_action(tau_bar, fixture, twists))


def kernel_translations(fixture: Fixture) -> List[AffineTransform]:
    """Lifts of the identity that multiply one A-block column by g^2.

    They are translations X -> X + upper(a a^T) for the columns a of A and
    span a group of order 256.
    """
    ident = list(range(36))
    out = []
    for k in range(N):
        tw = [0] * (2 * N)
        tw[N + k] = 1
        out.append(lift_transform(ident, fixture, tw))
    return out


def inversion_translation(fixture: Fixture) -> AffineTransform:
    """X -> X + upper(B1), induced by the coordinate map realising g -> g^-1.

    This normalises but does not centralise <g>, so it is not part of K_j;
    it is exposed for experiments only.
    """
    return AffineTransform.translation(upper_triangle(fixture.B1).value)


# permutation groups on 36 points (for validating centralizer files)


def read_permutations(path: str | Path) -> List[List[int]]:
    """One permutation per line, 36 space-separated 1-based images."""
    perms = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            images = [int(tok) - 1 for tok in line.split()]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer image") from None
        if not is_permutation(images):
            raise ValueError(f"line {lineno}: not a permutation of 1..36")
        perms.append(images)
    return perms


def write_permutations(path: str | Path, perms: Iterable[Sequence[int]]) -> None:
    Path(path).write_text("".join(" ".join(str(i + 1) for i in p) + "\n" for p in perms))


def permutation_group_order(gens: Sequence[Sequence[int]], cap: int = 10**6) -> int:
    ident = tuple(range(len(gens[0]))) if gens else ()
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[i] for i in p)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) > cap:
                        raise GroupTooLarge(f"permutation group exceeds {cap} elements")
        frontier = nxt
    return len(seen)


@dataclass
class CentralizerCheck:
    generators: int
    order: int
    commute: bool
    preserve: bool

    def matches(self, expected_order: int | None = None, expected_gens: int | None = None) -> bool:
        ok = self.commute and self.preserve
        if expected_order is not None:
            ok = ok and self.order == expected_order
        if expected_gens is not None:
            ok = ok and self.generators == expected_gens
        return ok


def validate_centralizer(perms: Sequence[Sequence[int]], fixture) -> CentralizerCheck:
    return CentralizerCheck(
        generators=len(perms),
        order=permutation_group_order(perms) if perms else 1,
        commute=all(commutes_with_gbar(p) for p in perms),
        preserve=all(preserves_phi_code(p, fixture) for p in perms),
    )


# affine groups


class AffineGroup:
    """Explicit list of affine maps, stored as numpy arrays.

    ``T[i, k]`` is row k of the i-th matrix and ``v[i]`` its offset.
    """

    def __init__(self, T: np.ndarray, v: np.ndarray):
        self.T = T
        self.v = v

    @property
    def order(self) -> int:
        return len(self.v)

    def __len__(self) -> int:
        return self.order

    def elements(self) -> Iterator[AffineTransform]:
        for t, v in zip(self.T.tolist(), self.v.tolist()):
            yield AffineTransform(tuple(t), v)

    def images(self, x: int) -> np.ndarray:
        """The orbit of ``x`` as an array (with repetitions when stabilised)."""
        out = self.v.copy()
        for k in range(NPARAMS):
            if (x >> (MSB - k)) & 1:
                out ^= self.T[:, k]
        return out

    def contains(self, t: AffineTransform) -> bool:
        row = np.array(list(t.T) + [t.v], dtype=np.uint64)
        table = np.concatenate([self.T, self.v[:, None]], axis=1)
        return bool((table == row).all(axis=1).any())


def _compose_many(T: np.ndarray, v: np.ndarray, s: AffineTransform) -> Tuple[np.ndarray, np.ndarray]:
    """Apply ``s`` after each element: rows and offsets pushed through s."""
    s_rows = np.array(s.T, dtype=np.uint64)
    newT = np.zeros_like(T)
    newv = np.full_like(v, s.v)
    for j in range(NPARAMS):
        shift = np.uint64(MSB - j)
        bitT = (T >> shift) & np.uint64(1)
        newT ^= bitT * s_rows[j]
        newv ^= ((v >> shift) & np.uint64(1)) * s_rows[j]
    return newT, newv


def _keys(table: np.ndarray) -> np.ndarray:
    """One opaque sortable key per row."""
    return np.ascontiguousarray(table).view(f"V{table.shape[1] * 8}").ravel()


def group_closure(gens: Sequence[AffineTransform], cap: int = 1 << 20) -> AffineGroup:
    """Breadth-first closure of ``gens`` under composition (identity included)."""
    for g in gens:
        if not g.is_invertible():
            raise ValueError("generator has a singular linear part")
    ident = AffineTransform.identity()
    frontier = np.array([list(ident.T) + [0]], dtype=np.uint64)
    known = _keys(frontier)
    parts = [frontier]
    total = 1
    while len(frontier):
        level = []
        for g in gens:
            T2, v2 = _compose_many(frontier[:, :NPARAMS], frontier[:, NPARAMS], g)
            cand = np.concatenate([T2, v2[:, None]], axis=1)
            _, first = np.unique(_keys(cand), return_index=True)
            cand = cand[np.sort(first)]
            cand = cand[~np.isin(_keys(cand), known)]
            if len(cand):
                total += len(cand)
                if total > cap:
                    raise GroupTooLarge(f"group order exceeds cap {cap}")
                known = np.concatenate([known, _keys(cand)])
                level.append(cand)
        frontier = np.concatenate(level) if level else frontier[:0]
        parts.append(frontier)
    full = np.concatenate(parts)
    return AffineGroup(full[:, :NPARAMS].copy(), full[:, NPARAMS].copy())


def canonical_form(x: ParamVector | int, group: AffineGroup) -> ParamVector:
    """Least element of the orbit, comparing 36-bit values with x1 most significant."""
    xv = x.value if isinstance(x, ParamVector) else x
    return ParamVector(int(group.images(xv).min()))


def affine_group_for(fixture: Fixture, perms: Sequence[Sequence[int]],
                     include_kernel: bool = True, include_inversion: bool = False,
                     cap: int = 1 << 20) -> AffineGroup:
    """K_j from centralizer generators; optionally extended by X -> X + upper(B1)."""
    gens = [lift_transform(p, fixture) for p in perms]
    if include_kernel:
        gens += kernel_translations(fixture)
    if include_inversion:
        gens.append(inversion_translation(fixture))
    return group_closure(gens, cap)


# orbit filtering


@dataclass(frozen=True, order=True)
class OrbitRep:
    x: ParamVector
    min_weight: int


def subcode_min_weight(fixture: Fixture, x: ParamVector | int) -> int:
    xv = x if isinstance(x, ParamVector) else ParamVector(x)
    d = subcode_D(fixture.B1, complete_B2(fixture.B1, xv), fixture.A, check=False)
    return minimum_weight(d)


def orbit_filter(fixture: Fixture, group: AffineGroup, scope: Iterable[int],
                 bound: int) -> List[OrbitRep]:
    """Canonical representatives of the orbits met by ``scope`` whose subcode weight >= bound."""
    seen = set()
    out = []
    for x in scope:
        c = canonical_form(x, group)
        if c.value in seen:
            continue
        seen.add(c.value)
        w = subcode_min_weight(fixture, c)
        if w >= bound:
            out.append(OrbitRep(c, w))
    out.sort()
    return out


def full_sweep_representatives(fixture: Fixture, group: AffineGroup, bound: int,
                               start: int = 0, end: int = 1 << NPARAMS) -> Iterator[OrbitRep]:
    """Stream canonical representatives over a range of the whole space (long-run mode)."""
    for x in range(start, end):
        if canonical_form(x, group).value != x:
            continue
        w = subcode_min_weight(fixture, x)
        if w >= bound:
            yield OrbitRep(ParamVector(x), w)


def scope_random(count: int, seed: int = 0) -> List[int]:
    rng = random.Random(seed)
    return [rng.getrandbits(NPARAMS) for _ in range(count)]


def scope_subspace(basis: Sequence[int], offset: int = 0) -> List[int]:
    out = [offset]
    for b in basis:
        out += [x ^ b for x in out]
    return out


def write_representatives(path: str | Path, reps: Sequence[OrbitRep], fixture_id: int,
                          group_order: int, bound: int) -> None:
    lines = [f"# fixture={fixture_id} group_order={group_order} bound={bound} "
             f"count={len(reps)} columns=x_hex,subcode_min_weight\n"]
    lines += [f"{r.x.hex()} {r.min_weight}\n" for r in reps]
    Path(path).write_text("".join(lines))
