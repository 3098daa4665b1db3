"""Low-weight codeword detection by information-set enumeration.

The columns are split into disjoint sets J_1, J_2, ... where J_i holds the
pivot columns found when row-reducing on whatever columns earlier sets left
over.  Each J_i is completed to a full information set I_i and the code is
put in systematic form on I_i.  Enumerating all combinations of at most t
systematic rows reaches every codeword of weight <= t on I_i, so a codeword
missed at level t has weight >= t + 1 - (k - |J_i|) on J_i.  Summing over the
disjoint J_i gives the usual lower bound on the weight of anything not yet
seen; once it reaches the requested bound the search is complete.

Before the certifying pass a few seeded random column orders are tried at a
low level, which is where low-weight words usually show up first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .gf2 import BitMatrix, BitVector, echelon, reduce_against

DEFAULT_SEED = 20160722
DEFAULT_PROBES = 2
PROBE_LEVEL = 2


@dataclass(frozen=True)
class LowWord:
    codeword: int
    weight: int


@dataclass(frozen=True)
class DetectorResult:
    """Outcome of a search for a codeword of weight below ``bound``.

    ``lower_bound`` is the certified lower bound on the weight of every
    nonzero codeword not examined; ``complete`` means it reached ``bound``
    (or the code was exhausted), so ``word is None`` proves the minimum
    distance is at least ``bound``.
    """

    word: Optional[LowWord]
    bound: int
    lower_bound: int
    level: int
    complete: bool


class InformationSet:
    """Systematic generator on one information set, packed for enumeration."""

    def __init__(self, basis: Sequence[int], ncols: int, order: Sequence[int], core_size: int):
        k = len(basis)
        rows, pivots = _systematic(basis, order)
        self.k = k
        self.core_size = core_size
        self.rows = rows
        info_mask = 0
        for p in pivots:
            info_mask |= 1 << p
        self.info_mask = info_mask
        red_cols = [c for c in range(ncols) if not (info_mask >> c) & 1]
        self.words = max(1, (len(red_cols) + 63) // 64)
        packed = np.zeros((k, self.words), dtype=np.uint64)
        for i, r in enumerate(rows):
            for b, c in enumerate(red_cols):
                if (r >> c) & 1:
                    packed[i, b // 64] |= np.uint64(1 << (b % 64))
        self.packed = packed

    def slack(self) -> int:
        return self.k - self.core_size


def _systematic(basis: Sequence[int], order: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Row-reduce ``basis`` choosing pivots in the column order ``order``."""
    rows = list(basis)
    pivots: List[int] = []
    used = 0
    for c in order:
        if used == len(rows):
            break
        bit = 1 << c
        p = next((i for i in range(used, len(rows)) if rows[i] & bit), None)
        if p is None:
            continue
        rows[used], rows[p] = rows[p], rows[used]
        piv = rows[used]
        for i in range(len(rows)):
            if i != used and rows[i] & bit:
                rows[i] ^= piv
        pivots.append(c)
        used += 1
    if used != len(rows):
        raise ValueError("column order does not contain an information set")
    return rows, pivots


def _partition(basis: Sequence[int], ncols: int, order: Sequence[int]) -> List[Tuple[List[int], int]]:
    """Disjoint pivot sets J_1, J_2, ... as (completed column order, |J_i|)."""
    remaining = list(order)
    out = []
    while remaining:
        rows = list(basis)
        core: List[int] = []
        used = 0
        for c in remaining:
            bit = 1 << c
            p = next((i for i in range(used, len(rows)) if rows[i] & bit), None)
            if p is None:
                continue
            rows[used], rows[p] = rows[p], rows[used]
            for i in range(len(rows)):
                if i != used and rows[i] & bit:
                    rows[i] ^= rows[used]
            core.append(c)
            used += 1
            if used == len(rows):
                break
        if not core:
            break
        core_set = set(core)
        rest = [c for c in order if c not in core_set]
        out.append((core + rest, len(core)))
        remaining = [c for c in remaining if c not in core_set]
    return out


class _Levels:
    """Packed XOR sums of all t-subsets of the systematic rows, level by level.

    Level t is stored grouped by the largest row index, so the (t-1)-subsets
    with all indices below m are exactly the first comb(m, t-1) entries.
    """

    def __init__(self, info: InformationSet):
        self.info = info
        self.t = 0
        self.level = np.zeros((1, info.words), dtype=np.uint64)

    def advance(self) -> np.ndarray:
        k = self.info.k
        prev = self.level
        t = self.t + 1
        parts = [prev[: comb(m, t - 1)] ^ self.info.packed[m] for m in range(t - 1, k)]
        self.level = np.concatenate(parts) if parts else prev[:0]
        self.t = t
        return self.level

    def combination(self, idx: int) -> int:
        """Row mask of entry ``idx`` at the current level."""
        mask = 0
        t = self.t
        while t > 0:
            m = t - 1
            while comb(m + 1, t) <= idx:
                m += 1
            idx -= comb(m, t)
            mask |= 1 << m
            t -= 1
        return mask


def _combine(rows: Sequence[int], mask: int) -> int:
    acc = 0
    k = 0
    while mask:
        if mask & 1:
            acc ^= rows[k]
        mask >>= 1
        k += 1
    return acc


def _scan(levels: _Levels, bound: int) -> Optional[LowWord]:
    arr = levels.level
    if arr.shape[0] == 0:
        return None
    if arr.shape[1] == 1:
        weights = np.bitwise_count(arr[:, 0]).astype(np.int64)
    else:
        weights = np.bitwise_count(arr).sum(axis=1, dtype=np.int64)
    weights += levels.t
    idx = int(np.argmin(weights))
    w = int(weights[idx])
    if w >= bound:
        return None
    word = _combine(levels.info.rows, levels.combination(idx))
    return LowWord(word, word.bit_count())


def _bound_at(infos: Sequence[InformationSet], t: int) -> int:
    return sum(max(0, t + 1 - info.slack()) for info in infos)


class LowWeightDetector:
    """Reusable detector; ``search`` is deterministic for a fixed seed."""

    def __init__(self, seed: int = DEFAULT_SEED, probes: int = DEFAULT_PROBES,
                 probe_level: int = PROBE_LEVEL, max_level: int | None = None):
        self.seed = seed
        self.probes = probes
        self.probe_level = probe_level
        self.max_level = max_level

    def search(self, g: BitMatrix, bound: int) -> DetectorResult:
        basis, _ = echelon(g.rows)
        return self.search_basis(basis, g.ncols, bound)

    def search_basis(self, basis: Sequence[int], ncols: int, bound: int) -> DetectorResult:
        k = len(basis)
        if k == 0 or bound <= 1:
            return DetectorResult(None, bound, bound, 0, True)
        rng = random.Random(self.seed)
        for _ in range(self.probes):
            order = list(range(ncols))
            rng.shuffle(order)
            levels = _Levels(InformationSet(basis, ncols, order, k))
            for _t in range(min(self.probe_level, k)):
                levels.advance()
                hit = _scan(levels, bound)
                if hit is not None:
                    return DetectorResult(hit, bound, 0, levels.t, False)
        infos = [InformationSet(basis, ncols, order, core)
                 for order, core in _partition(basis, ncols, range(ncols))]
        levels = [_Levels(info) for info in infos]
        t = 0
        lower = _bound_at(infos, 0)
        while lower < bound and t < k:
            if self.max_level is not None and t >= self.max_level:
                return DetectorResult(None, bound, lower, t, False)
            t += 1
            for lv in levels:
                lv.advance()
                hit = _scan(lv, bound)
                if hit is not None:
                    return DetectorResult(hit, bound, lower, t, False)
            lower = _bound_at(infos, t)
        return DetectorResult(None, bound, lower if t < k else max(lower, bound), t, True)


def has_word_below(g: BitMatrix, w: int, seed: int = DEFAULT_SEED,
                   detector: LowWeightDetector | None = None) -> Optional[Tuple[BitVector, int]]:
    """Some codeword of weight in [1, w-1], or None when the minimum is at least w."""
    det = detector or LowWeightDetector(seed=seed)
    basis, pivots = echelon(g.rows)
    res = det.search_basis(basis, g.ncols, w)
    if res.word is None:
        return None
    if reduce_against(res.word.codeword, basis, pivots) != 0:
        raise AssertionError("detector returned a vector outside the code")
    return BitVector(g.ncols, res.word.codeword), res.word.weight


def minimum_weight(g: BitMatrix, seed: int = DEFAULT_SEED) -> int:
    """Exact minimum distance by repeatedly lowering the target bound."""
    basis, _ = echelon(g.rows)
    if not basis:
        return 0
    det = LowWeightDetector(seed=seed)
    best = min(r.bit_count() for r in basis)
    while True:
        res = det.search_basis(basis, g.ncols, best)
        if res.word is None:
            return best
        best = res.word.weight
