"""Brute-force references: full codeword sweeps for small dimension.

Kept deliberately naive so that they can check the fast detector.
"""

from __future__ import annotations

import random
from typing import Dict, List, Sequence

import numpy as np

from .gf2 import BitMatrix, hstack, permute_bits, permute_columns, rank

MAX_ORACLE_DIM = 20
_LOW = 16


class OracleTooLarge(ValueError):
    pass


def pack_rows(rows: Sequence[int], ncols: int) -> np.ndarray:
    """Rows as an (n, words) uint64 array, least significant word first."""
    words = max(1, (ncols + 63) // 64)
    out = np.zeros((len(rows), words), dtype=np.uint64)
    mask = (1 << 64) - 1
    for i, r in enumerate(rows):
        for w in range(words):
            out[i, w] = (r >> (64 * w)) & mask
    return out


def unpack_row(arr: np.ndarray) -> int:
    return sum(int(x) << (64 * w) for w, x in enumerate(arr))


def _span(packed: np.ndarray) -> np.ndarray:
    """All 2^k combinations of the given packed rows, in binary-counter order."""
    out = np.zeros((1, packed.shape[1]), dtype=np.uint64)
    for row in packed:
        out = np.concatenate([out, out ^ row])
    return out


def _weights(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr).sum(axis=1, dtype=np.int64)


def _check_dim(g: BitMatrix, max_dim: int) -> None:
    if g.nrows > max_dim:
        raise OracleTooLarge(
            f"exhaustive sweep limited to dimension {max_dim}; got {g.nrows} rows"
        )


def weight_distribution(g: BitMatrix, max_dim: int = MAX_ORACLE_DIM) -> Dict[int, int]:
    """Weight enumerator of the row space (generator rows must be independent)."""
    _check_dim(g, max_dim)
    counts: Dict[int, int] = {}
    for w in _iter_weights(g):
        vals, cnt = np.unique(w, return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            counts[v] = counts.get(v, 0) + c
    return dict(sorted(counts.items()))


def _iter_weights(g: BitMatrix):
    packed = pack_rows(g.rows, g.ncols)
    low = _span(packed[:_LOW])
    high = _span(packed[_LOW:])
    for h in high:
        yield _weights(low ^ h)


def exhaustive_min_weight(g: BitMatrix, max_dim: int = MAX_ORACLE_DIM) -> int:
    """Minimum nonzero weight over all 2^k combinations of the rows.

    Dependent rows produce zero words, which are skipped; returns 0 only when
    every combination is zero.
    """
    _check_dim(g, max_dim)
    best = None
    for w in _iter_weights(g):
        nz = w[w > 0]
        if nz.size:
            m = int(nz.min())
            best = m if best is None else min(best, m)
    return best or 0


def all_codewords(g: BitMatrix, max_dim: int = MAX_ORACLE_DIM) -> List[int]:
    _check_dim(g, max_dim)
    return [unpack_row(r) for r in _span(pack_rows(g.rows, g.ncols))]


# random instances for cross-checks


def random_orthogonal(k: int, rng: random.Random) -> BitMatrix:
    """Random k x k matrix with A A^T = I.

    Built from transvections x -> x + (x.u) u with u of even weight, which
    preserve the dot product, interleaved with coordinate permutations.
    """
    rows = [1 << i for i in range(k)]
    for _ in range(4 * k):
        u = rng.getrandbits(k)
        if u.bit_count() % 2:
            u ^= 1 << rng.randrange(k)
        rows = [r ^ u if (r & u).bit_count() % 2 else r for r in rows]
        perm = list(range(k))
        rng.shuffle(perm)
        rows = [permute_bits(r, perm) for r in rows]
    return BitMatrix(k, k, tuple(rows))


def random_self_dual(k: int, rng: random.Random) -> BitMatrix:
    """Generator of a random self-dual [2k, k] code, columns shuffled."""
    g = hstack(BitMatrix.identity(k), random_orthogonal(k, rng))
    perm = list(range(2 * k))
    rng.shuffle(perm)
    return permute_columns(g, perm)


def random_code(n: int, k: int, rng: random.Random) -> BitMatrix:
    """Random full-rank k x n generator."""
    while True:
        rows = tuple(rng.getrandbits(n) for _ in range(k))
        if rank(BitMatrix(k, n, rows)) == k:
            return BitMatrix(k, n, rows)
