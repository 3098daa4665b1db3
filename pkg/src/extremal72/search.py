"""Gray-code sweep over the 36 B3 parameters with checkpointed shards.

For a fixed fixture and B2 parameter vector X the 2^36 generator matrices
are visited in binary reflected Gray order.  Consecutive matrices differ by
one of 36 precomputed masks, each touching two rows of the first block row.

Index ``i`` of the sweep is the plain counter; its parameter vector is the
Gray value ``i ^ (i >> 1)`` read as a :class:`ParamVector` (y1 is the most
significant bit), so bit position ``p`` (1 = least significant) of the Gray
value is parameter y_{37-p}.

Every visited code is classified by a canonical witness, a function of
(fixture, X, Y, bound) alone:

1. a word of weight < bound in the Y-independent 27-dimensional subcode,
   found once per X by the detector;
2. otherwise the lightest single generator row or sum of two rows (ties
   broken by the lowest row pair);
3. otherwise the detector run on the whole matrix.

Carrying the witness forward from one code to the next, and updating only
the row pairs touched by the last mask, reproduces that choice exactly, so
logs do not depend on how a range is split, interrupted or scheduled.
"""

from __future__ import annotations

import hashlib
import logging
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .codegen import (
    CELLS,
    NPARAMS,
    ParamVector,
    build_params,
    complete_B2,
    expand_binary,
    subcode_D,
)
from .detector import DEFAULT_SEED, LowWeightDetector
from .fixtures import Fixture, load_fixture
from .gf2 import BitMatrix, bits_to_string, echelon

log = logging.getLogger(__name__)

WIDTH = NPARAMS
SPACE = 1 << WIDTH
DEFAULT_BOUND = 16
CHECKPOINT_EVERY = 4096


class EndOfSequence(Exception):
    pass


class CheckpointError(ValueError):
    pass


def gray(i: int) -> int:
    return i ^ (i >> 1)


def ruler(i: int) -> int:
    """1-based position of the bit flipped between Gray values i-1 and i."""
    return (i & -i).bit_length()


def param_of_position(p: int) -> int:
    """1-based parameter index (within Y) controlled by Gray bit position ``p``."""
    return WIDTH + 1 - p


class GrayEnumerator:
    def __init__(self, width: int = WIDTH, index: int = 0):
        if not 0 <= index < (1 << width):
            raise ValueError("index out of range")
        self.width = width
        self.index = index

    @property
    def value(self) -> int:
        return gray(self.index)

    @property
    def current(self) -> ParamVector:
        if self.width != WIDTH:
            raise ValueError("only 36-bit enumerators map to parameter vectors")
        return ParamVector(self.value, "B3")

    def step(self) -> Tuple[int, int]:
        """Advance by one; returns (flipped position, new Gray value)."""
        if self.index >= (1 << self.width) - 1:
            raise EndOfSequence
        self.index += 1
        return ruler(self.index), self.value

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        while True:
            try:
                yield self.step()
            except EndOfSequence:
                return


def gray_step(e: GrayEnumerator) -> Tuple[int, int]:
    return e.step()


# masks


@dataclass(frozen=True)
class MaskSet:
    """mask[k] = expand(X, Y + e_{k+1}) + expand(X, Y), k = 0..35, plus sparse views."""

    masks: Tuple[BitMatrix, ...]
    sparse: Tuple[Tuple[Tuple[int, int], ...], ...]

    def for_position(self, p: int) -> Tuple[Tuple[int, int], ...]:
        return self.sparse[param_of_position(p) - 1]

    def zero_rows(self, k: int) -> int:
        return sum(1 for r in self.masks[k].rows if r == 0)


class MaskValidationError(RuntimeError):
    pass


def build_masks(fixture: Fixture, x: ParamVector | int, validate: int = 100,
                seed: int = DEFAULT_SEED) -> MaskSet:
    x = _pv(x, "B2")
    base = expand_binary(build_params(fixture.B1, fixture.A, x, 0))
    masks = []
    for k in range(1, WIDTH + 1):
        flipped = expand_binary(build_params(fixture.B1, fixture.A, x, ParamVector.unit(k, "B3")))
        masks.append(base + flipped)
    sparse = tuple(tuple((i, r) for i, r in enumerate(m.rows) if r) for m in masks)
    ms = MaskSet(tuple(masks), sparse)
    rng = random.Random(seed)
    for _ in range(validate):
        y = rng.getrandbits(WIDTH)
        k = rng.randrange(WIDTH)
        g0 = expand_binary(build_params(fixture.B1, fixture.A, x, y))
        g1 = expand_binary(build_params(fixture.B1, fixture.A, x, y ^ (1 << (WIDTH - 1 - k))))
        if g0 + masks[k] != g1:
            raise MaskValidationError(f"mask {k + 1} fails the update identity at Y={y:09x}")
    return ms


def gray_matrices(fixture: Fixture, x: ParamVector | int, start: int, end: int,
                  masks: MaskSet | None = None) -> Iterator[Tuple[int, List[int]]]:
    """Yield (index, rows) for index in [start, end), updating rows by single masks.

    The same list object is yielded each time and mutated in place.
    """
    if start >= end:
        return
    x = _pv(x, "B2")
    masks = masks or build_masks(fixture, x, validate=0)
    rows = list(expand_binary(build_params(fixture.B1, fixture.A, x, gray(start))).rows)
    yield start, rows
    for index in range(start + 1, end):
        for r, delta in masks.for_position(ruler(index)):
            rows[r] ^= delta
        yield index, rows


def _pv(v, role: str) -> ParamVector:
    return v if isinstance(v, ParamVector) else ParamVector(v, role)


# shards


@dataclass(frozen=True)
class SearchShard:
    fixture_id: int
    x: ParamVector
    start: int
    end: int
    bound: int = DEFAULT_BOUND

    def __post_init__(self):
        if not 0 <= self.start <= self.end <= SPACE:
            raise ValueError(f"invalid index range [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    @property
    def name(self) -> str:
        return f"j{self.fixture_id}_x{self.x.hex()}_{self.start:011x}_{self.end:011x}_b{self.bound}"

    def descriptor(self) -> str:
        return (f"fixture={self.fixture_id} x={self.x.hex()} start={self.start} "
                f"end={self.end} bound={self.bound}")

    @classmethod
    def parse(cls, text: str) -> "SearchShard":
        fields = _parse_kv(text.split())
        try:
            return cls(int(fields["fixture"]), ParamVector.parse(fields["x"]),
                       int(fields["start"]), int(fields["end"]),
                       int(fields.get("bound", DEFAULT_BOUND)))
        except KeyError as exc:
            raise ValueError(f"shard descriptor missing field {exc.args[0]}") from None


def _parse_kv(tokens: Sequence[str]) -> Dict[str, str]:
    out = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {tok!r}")
        out[key] = value
    return out


def read_shard_list(path: str | Path) -> List[SearchShard]:
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(SearchShard.parse(line))
    return out


def split_range(start: int, end: int, parts: int) -> List[Tuple[int, int]]:
    """Split [start, end) into ``parts`` contiguous pieces of near-equal length."""
    if parts < 1:
        raise ValueError("parts must be positive")
    n = end - start
    cuts = [start + (n * i) // parts for i in range(parts + 1)]
    return [(a, b) for a, b in zip(cuts, cuts[1:])]


def prefix_shards(fixture_id: int, x: ParamVector, prefix_bits: int,
                  bound: int = DEFAULT_BOUND) -> List[SearchShard]:
    """Cover all 2^36 indices with shards keyed by the top ``prefix_bits`` bits."""
    size = SPACE >> prefix_bits
    return [SearchShard(fixture_id, x, p * size, (p + 1) * size, bound)
            for p in range(1 << prefix_bits)]


# records


@dataclass(frozen=True)
class HitRecord:
    fixture_id: int
    x: ParamVector
    index: int
    codeword: int
    weight: int

    @property
    def y(self) -> ParamVector:
        return ParamVector(gray(self.index), "B3")

    def line(self) -> str:
        return (f"{self.fixture_id} {self.x.hex()} {self.index} "
                f"{bits_to_string(self.codeword, 72)} {self.weight}\n")

    @classmethod
    def parse(cls, line: str) -> "HitRecord":
        j, x, idx, word, w = line.split()
        if len(word) != 72:
            raise ValueError("codeword field must have 72 characters")
        bits = sum(1 << i for i, c in enumerate(word) if c == "1")
        return cls(int(j), ParamVector.parse(x), int(idx), bits, int(w))


@dataclass(frozen=True)
class SurvivorRecord:
    fixture_id: int
    x: ParamVector
    index: int
    lower_bound: int
    complete: bool

    def line(self) -> str:
        return (f"{self.fixture_id} {self.x.hex()} {self.index} "
                f"{gray(self.index):09x} {self.lower_bound} {int(self.complete)}\n")

    @classmethod
    def parse(cls, line: str) -> "SurvivorRecord":
        j, x, idx, _y, lb, complete = line.split()
        return cls(int(j), ParamVector.parse(x), int(idx), int(lb), complete == "1")


@dataclass
class ShardReport:
    shard: SearchShard
    hits: int = 0
    survivors: List[SurvivorRecord] = field(default_factory=list)
    completed: bool = False
    next_index: int = 0
    paths: Dict[str, Path] = field(default_factory=dict)
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def certified_survivors(self) -> List[SurvivorRecord]:
        return [s for s in self.survivors if s.complete]


# classification engine


class CodeClassifier:
    """Holds the per-X state and classifies codes by their canonical witness."""

    def __init__(self, fixture: Fixture, x: ParamVector, bound: int,
                 detector: LowWeightDetector | None = None):
        self.fixture = fixture
        self.x = x
        self.bound = bound
        self.detector = detector or LowWeightDetector()
        self.b2 = complete_B2(fixture.B1, x)
        self.subcode_witness = self._subcode_witness(
            subcode_D(fixture.B1, self.b2, fixture.A, check=False).rows
        )

    def _subcode_witness(self, rows: Sequence[int]) -> Optional[int]:
        basis, _ = echelon(rows)
        res = self.detector.search_basis(basis, 72, self.bound)
        return res.word.codeword if res.word is not None else None

    def matrix_rows(self, index: int) -> List[int]:
        p = build_params(self.fixture.B1, self.fixture.A, self.x, gray(index))
        return list(expand_binary(p, check=False).rows)

    def full_search(self, rows: Sequence[int]):
        basis, _ = echelon(rows)
        return self.detector.search_basis(basis, 72, self.bound)


# rows of the first block row, the only ones a mask can touch
_TOP = 9


class PairTable:
    """Weights of single rows and row pairs that involve at least one top row.

    Pairs of subcode rows never change and are covered by the subcode witness.
    Candidates are ordered by (weight, i, j) with i <= j, i == j meaning a
    single row.
    """

    def __init__(self, rows: List[int]):
        self.rows = rows
        self.n = len(rows)
        self.weights: Dict[Tuple[int, int], int] = {}
        for i in range(_TOP):
            for j in range(i, self.n):
                self._set(i, j)

    def _set(self, i: int, j: int) -> None:
        r = self.rows
        self.weights[(i, j)] = (r[i] if i == j else r[i] ^ r[j]).bit_count()

    def touch(self, a: int) -> None:
        for j in range(a, self.n):
            self._set(a, j)
        for i in range(min(a, _TOP)):
            self._set(i, a)

    def best(self) -> Tuple[int, Tuple[int, int]]:
        w = self.weights
        key = min(w, key=lambda ij: (w[ij], ij))
        return w[key], key

    def word(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i] if i == j else self.rows[i] ^ self.rows[j]


def _classify(clf: CodeClassifier, rows: List[int], pairs: PairTable | None,
              subcode_witness: Optional[int]):
    """Returns ('hit', word) or ('survivor', DetectorResult)."""
    if subcode_witness is not None:
        return "hit", subcode_witness
    if pairs is None:
        pairs = PairTable(rows)
    w, ij = pairs.best()
    if w < clf.bound and w > 0:
        return "hit", pairs.word(ij)
    res = clf.full_search(rows)
    if res.word is not None:
        return "hit", res.word.codeword
    return "survivor", res


# checkpoints


@dataclass(frozen=True)
class Checkpoint:
    shard: SearchShard
    next_index: int
    hits_offset: int
    survivors_offset: int

    def serialize(self) -> str:
        body = (f"fixture={self.shard.fixture_id}\nx={self.shard.x.hex()}\n"
                f"start={self.shard.start}\nend={self.shard.end}\nbound={self.shard.bound}\n"
                f"next_index={self.next_index}\nhits_offset={self.hits_offset}\n"
                f"survivors_offset={self.survivors_offset}\n")
        return body + f"digest={hashlib.sha256(body.encode()).hexdigest()}\n"

    @classmethod
    def deserialize(cls, text: str) -> "Checkpoint":
        lines = text.splitlines(keepends=True)
        if not lines or not lines[-1].startswith("digest="):
            raise CheckpointError("checkpoint is truncated: missing digest line")
        body = "".join(lines[:-1])
        digest = lines[-1].strip().partition("=")[2]
        if hashlib.sha256(body.encode()).hexdigest() != digest:
            raise CheckpointError("checkpoint digest mismatch")
        fields = {}
        for ln in lines[:-1]:
            key, sep, value = ln.strip().partition("=")
            if not sep:
                raise CheckpointError(f"malformed checkpoint line {ln.strip()!r}")
            fields[key] = value
        names = ("fixture", "x", "start", "end", "bound", "next_index",
                 "hits_offset", "survivors_offset")
        for name in names:
            if name not in fields:
                raise CheckpointError(f"checkpoint field {name!r} missing")
        try:
            shard = SearchShard(int(fields["fixture"]), ParamVector.parse(fields["x"]),
                                int(fields["start"]), int(fields["end"]), int(fields["bound"]))
        except ValueError as exc:
            raise CheckpointError(f"checkpoint shard fields invalid: {exc}") from None
        try:
            nxt = int(fields["next_index"])
        except ValueError:
            raise CheckpointError("checkpoint field 'next_index' is not an integer") from None
        if not shard.start <= nxt <= shard.end:
            raise CheckpointError("checkpoint field 'next_index' outside the shard")
        for name in ("hits_offset", "survivors_offset"):
            if not fields[name].isdigit():
                raise CheckpointError(f"checkpoint field {name!r} is not an integer")
        return cls(shard, nxt, int(fields["hits_offset"]), int(fields["survivors_offset"]))


def save_checkpoint(path: str | Path, ckpt: Checkpoint) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(ckpt.serialize())
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load_checkpoint(path: str | Path) -> Checkpoint:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint: {exc}") from None
    return Checkpoint.deserialize(text)


def shard_paths(shard: SearchShard, directory: str | Path) -> Dict[str, Path]:
    d = Path(directory)
    return {
        "hits": d / f"{shard.name}.hits",
        "survivors": d / f"{shard.name}.survivors",
        "checkpoint": d / f"{shard.name}.ckpt",
    }


class Interrupted(Exception):
    """Raised by ``run_shard`` when ``stop_after`` codes have been processed."""


def run_shard(shard: SearchShard, directory: str | Path, *, carry_forward: bool = True,
              seed: int = DEFAULT_SEED, max_level: int | None = None,
              checkpoint_every: int = CHECKPOINT_EVERY, stop_after: int | None = None,
              resume: bool = True) -> ShardReport:
    """Classify every index of ``shard``; logs and checkpoint go to ``directory``.

    An existing checkpoint for the same shard is resumed unless ``resume`` is
    false.  Log files are truncated back to the offsets recorded in the
    checkpoint, discarding anything written after it.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = shard_paths(shard, directory)
    report = ShardReport(shard, paths=paths)

    nxt, hoff, soff = shard.start, 0, 0
    if resume and paths["checkpoint"].exists():
        ck = load_checkpoint(paths["checkpoint"])
        if ck.shard != shard:
            raise CheckpointError("checkpoint belongs to a different shard")
        nxt, hoff, soff = ck.next_index, ck.hits_offset, ck.survivors_offset
    for key, off in (("hits", hoff), ("survivors", soff)):
        with open(paths[key], "a+b") as fh:
            fh.truncate(off)

    if nxt < shard.end:
        detector = LowWeightDetector(seed=seed, max_level=max_level)
        clf = CodeClassifier(load_fixture(shard.fixture_id), shard.x, shard.bound, detector)
        masks = build_masks(clf.fixture, shard.x, validate=0) if carry_forward else None
        processed = 0
        with open(paths["hits"], "ab") as hits_fh, open(paths["survivors"], "ab") as surv_fh:
            rows: List[int] = []
            pairs: PairTable | None = None
            witness = clf.subcode_witness
            for index in range(nxt, shard.end):
                if not carry_forward:
                    # independent path: everything rebuilt for this index alone
                    rows = clf.matrix_rows(index)
                    witness = clf._subcode_witness(rows[_TOP:])
                elif witness is not None:
                    pass
                elif index == nxt:
                    rows = clf.matrix_rows(index)
                    pairs = PairTable(rows)
                else:
                    for r, delta in masks.for_position(ruler(index)):
                        rows[r] ^= delta
                        pairs.touch(r)
                kind, payload = _classify(clf, rows, pairs, witness)
                if kind == "hit":
                    rec = HitRecord(shard.fixture_id, shard.x, index, payload, payload.bit_count())
                    hits_fh.write(rec.line().encode())
                    hits_fh.flush()
                else:
                    srec = SurvivorRecord(shard.fixture_id, shard.x, index,
                                          payload.lower_bound, payload.complete)
                    surv_fh.write(srec.line().encode())
                    surv_fh.flush()
                    if srec.complete:
                        log.warning("survivor at fixture %d X=%s index %d: no word below %d",
                                    shard.fixture_id, shard.x.hex(), index, shard.bound)
                processed += 1
                done = index + 1
                if done == shard.end or done % checkpoint_every == 0:
                    save_checkpoint(paths["checkpoint"], Checkpoint(
                        shard, done, hits_fh.tell(), surv_fh.tell()))
                if stop_after is not None and processed >= stop_after and done < shard.end:
                    save_checkpoint(paths["checkpoint"], Checkpoint(
                        shard, done, hits_fh.tell(), surv_fh.tell()))
                    raise Interrupted(f"stopped after {processed} codes at index {done}")
    else:
        save_checkpoint(paths["checkpoint"], Checkpoint(shard, shard.end, hoff, soff))

    return collect_report(shard, directory)


def collect_report(shard: SearchShard, directory: str | Path) -> ShardReport:
    paths = shard_paths(shard, directory)
    report = ShardReport(shard, paths=paths)
    ck = load_checkpoint(paths["checkpoint"])
    report.next_index = ck.next_index
    report.completed = ck.next_index == shard.end
    with open(paths["hits"], "rb") as fh:
        report.hits = fh.read(ck.hits_offset).count(b"\n")
    with open(paths["survivors"], "rb") as fh:
        data = fh.read(ck.survivors_offset).decode()
    report.survivors = [SurvivorRecord.parse(ln) for ln in data.splitlines() if ln]
    return report


def _run_shard_job(args) -> ShardReport:
    shard, directory, kwargs = args
    return run_shard(shard, directory, **kwargs)


def run_shards(shards: Sequence[SearchShard], directory: str | Path, workers: int = 1,
               **kwargs) -> List[ShardReport]:
    """Run shards, at most ``workers`` at a time, each in its own process when workers > 1."""
    jobs = [(s, directory, kwargs) for s in shards]
    if workers <= 1:
        return [_run_shard_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_shard_job, jobs))


def merge_logs(shards: Sequence[SearchShard], directory: str | Path,
               out_dir: str | Path) -> Dict[str, Path]:
    """Concatenate per-shard logs in index order into ``hits.log`` and ``survivors.log``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ordered = sorted(shards, key=lambda s: (s.fixture_id, s.x.value, s.start))
    out = {}
    for key in ("hits", "survivors"):
        target = out_dir / f"{key}.log"
        with open(target, "wb") as dst:
            for s in ordered:
                paths = shard_paths(s, directory)
                ck = load_checkpoint(paths["checkpoint"])
                off = ck.hits_offset if key == "hits" else ck.survivors_offset
                with open(paths[key], "rb") as src:
                    dst.write(src.read(off))
        out[key] = target
    return out
