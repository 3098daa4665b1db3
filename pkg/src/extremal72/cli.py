"""Command-line entry point: ``extremal72 <subcommand> ...``.

Exit codes: 0 success, 1 failed check or incomplete search, 2 usage error,
3 a certified survivor (no word of weight below the bound) was found.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import codegen, fixtures, oracle, search, symmetry
from .codegen import ParamVector
from .detector import DEFAULT_SEED, has_word_below
from .gf2 import MatrixFormatError, format_matrix, parse_matrix_blocks, write_matrix

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SURVIVOR = 0, 1, 2, 3

# ranges longer than this, and full sweeps, need --i-understand-long-run
DESK_LIMIT = 1 << 24
RUN_CONFIG = "run.cfg"
SHARD_LIST = "shards.txt"

log = logging.getLogger("extremal72")


class UsageError(Exception):
    pass


def _hex36(text: str) -> ParamVector:
    try:
        return ParamVector.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fixture_id(text: str) -> int:
    if text not in ("1", "2", "3"):
        raise argparse.ArgumentTypeError("fixture must be 1, 2 or 3")
    return int(text)


def _index(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v <= search.SPACE:
        raise argparse.ArgumentTypeError("index outside [0, 2^36]")
    return v


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _header(args: argparse.Namespace) -> None:
    """Echo the resolved configuration so every run can be replayed."""
    print(f"# extremal72 {args.command}")
    for key in sorted(vars(args)):
        if key in ("command", "func"):
            continue
        val = getattr(args, key)
        if isinstance(val, ParamVector):
            val = val.hex()
        elif isinstance(val, list) and val and isinstance(val[0], ParamVector):
            val = ",".join(v.hex() for v in val)
        print(f"# {key} = {val}")
    sys.stdout.flush()


# verify


def _load_custom(path: str) -> fixtures.Fixture:
    blocks = parse_matrix_blocks(Path(path).read_text())
    if len(blocks) != 2 or any(b.shape != (9, 9) for b in blocks):
        raise MatrixFormatError("expected two 9x9 blocks (B1 then A)")
    return fixtures.Fixture(0, blocks[0], blocks[1], "custom")


def cmd_verify(args: argparse.Namespace) -> int:
    if args.dump:
        text = fixtures.dump_fixtures()
        if args.dump == "-":
            sys.stdout.write(text)
        else:
            Path(args.dump).write_text(text)
            print(f"wrote six fixture matrices to {args.dump}")
        return EXIT_OK
    if args.matrices:
        targets = [_load_custom(args.matrices)]
    elif args.fixture:
        targets = [fixtures.load_fixture(args.fixture)]
    else:
        targets = fixtures.all_fixtures()
    rng = random.Random(args.seed)
    failed: List[str] = []
    for f in targets:
        label = f"fixture {f.id} ({f.source_code_label})"
        rep = fixtures.verify_fixture(f, distance=not args.skip_distance)
        for name, ok in rep.checks.items():
            print(f"{label}: {name}: {'pass' if ok else 'FAIL'}")
            if not ok:
                failed.append(f"{label}: {name}")
        if rep.phi_distance is not None:
            print(f"{label}: Phi-code minimum distance {rep.phi_distance}")
        if not (rep.checks["B1 symmetric"] and rep.checks["A orthogonal"]
                and rep.checks["diag(B1^2+B1) zero"]):
            continue
        sample = codegen.sample_construction(f.B1, f.A, args.samples, rng)
        ok = sample.ok
        print(f"{label}: construction on {sample.total} random (X, Y): rank 36 {sample.rank_ok}, "
              f"self-orthogonal {sample.self_orthogonal}, weights 0 mod 4 {sample.weights_mod4}: "
              f"{'pass' if ok else 'FAIL'}")
        if not ok:
            failed.append(f"{label}: construction")
        flips = codegen.diagonal_flip_detections(f.B1, f.A, rng.getrandbits(36), rng.getrandbits(36))
        ok = all(flips)
        print(f"{label}: B3 diagonal flips detected {sum(flips)}/9: {'pass' if ok else 'FAIL'}")
        if not ok:
            failed.append(f"{label}: doubly-even diagonal")
    if failed:
        print("FAILED: " + "; ".join(failed))
        return EXIT_FAIL
    print(f"all checks passed for {len(targets)} fixture(s)")
    return EXIT_OK


# expand


def cmd_expand(args: argparse.Namespace) -> int:
    f = fixtures.load_fixture(args.fixture)
    p = codegen.params_for(f, args.x, ParamVector(args.y.value, "B3"))
    g = codegen.expand_binary(p)
    if args.order == "natural":
        g = codegen.to_natural(g)
    sd = codegen.is_self_dual(g)
    de = codegen.is_doubly_even(g)
    if args.out:
        write_matrix(args.out, g)
        print(f"wrote 36x72 generator to {args.out}")
    else:
        sys.stdout.write(format_matrix(g))
    print(f"self-dual: {'yes' if sd else 'no'}")
    print(f"doubly-even: {'yes' if de else 'no'}")
    return EXIT_OK if sd and de else EXIT_FAIL


# orbits


def _scope(args: argparse.Namespace) -> List[int]:
    if args.x_list:
        return [v.value for v in args.x_list]
    if args.x_file:
        return [ParamVector.parse(t).value for t in Path(args.x_file).read_text().split()]
    if args.random:
        return symmetry.scope_random(args.random, args.seed)
    if args.subspace:
        return symmetry.scope_subspace([v.value for v in args.subspace])
    raise UsageError("choose a scope: --x-list, --x-file, --random, --subspace or --full-sweep")


def cmd_orbits(args: argparse.Namespace) -> int:
    f = fixtures.load_fixture(args.fixture)
    perms = symmetry.read_permutations(args.group_file) if args.group_file else []
    if perms:
        chk = symmetry.validate_centralizer(perms, f)
        exp_order = fixtures.CENTRALIZER_ORDERS[f.id]
        exp_gens = fixtures.CENTRALIZER_GENERATOR_COUNTS[f.id]
        print(f"generators: {chk.generators} (reference {exp_gens}); permutation group order "
              f"{chk.order} (reference {exp_order}); commute with g-bar: {chk.commute}; "
              f"preserve Phi-code: {chk.preserve}")
        if not (chk.commute and chk.preserve):
            print("error: group file does not describe centralizer elements")
            return EXIT_FAIL
    try:
        group = symmetry.affine_group_for(f, perms, include_kernel=not args.no_kernel,
                                          include_inversion=args.with_inversion, cap=args.cap)
    except symmetry.GroupTooLarge as exc:
        print(f"error: {exc}")
        return EXIT_FAIL
    print(f"affine group order: {group.order}")
    if args.full_sweep:
        reps = list(symmetry.full_sweep_representatives(f, group, args.bound))
    else:
        scope = _scope(args)
        print(f"scope size: {len(scope)}")
        reps = symmetry.orbit_filter(f, group, scope, args.bound)
    weights: Dict[int, int] = {}
    for r in reps:
        weights[r.min_weight] = weights.get(r.min_weight, 0) + 1
    print(f"representatives with subcode minimum weight >= {args.bound}: {len(reps)}")
    for w in sorted(weights):
        print(f"  minimum weight {w}: {weights[w]}")
    if args.full_sweep:
        print(f"reference count for fixture {f.id}: {fixtures.ORBIT_COUNTS[f.id]}")
    if args.out:
        symmetry.write_representatives(args.out, reps, f.id, group.order, args.bound)
        print(f"wrote {len(reps)} representatives to {args.out}")
    else:
        for r in reps:
            print(f"{r.x.hex()} {r.min_weight}")
    return EXIT_OK


# search and resume


def _write_run_config(directory: Path, args: argparse.Namespace) -> None:
    cfg = {"seed": args.seed, "carry_forward": int(not args.no_carry_forward),
           "max_level": args.max_level if args.max_level is not None else "none",
           "checkpoint_every": args.checkpoint_every}
    (directory / RUN_CONFIG).write_text("".join(f"{k}={v}\n" for k, v in cfg.items()))


def _read_run_config(directory: Path) -> Dict[str, object]:
    raw = {}
    for line in (directory / RUN_CONFIG).read_text().splitlines():
        k, _, v = line.partition("=")
        raw[k.strip()] = v.strip()
    return {
        "seed": int(raw["seed"]),
        "carry_forward": raw["carry_forward"] == "1",
        "max_level": None if raw["max_level"] == "none" else int(raw["max_level"]),
        "checkpoint_every": int(raw["checkpoint_every"]),
    }


def _finish(shards: Sequence[search.SearchShard], directory: Path, workers: int,
            kw: Dict[str, object], out: Optional[str]) -> int:
    t0 = time.time()
    reports = search.run_shards(shards, directory, workers=workers, **kw)
    merged = search.merge_logs(shards, directory, out or directory)
    hits = sum(r.hits for r in reports)
    survivors = [s for r in reports for s in r.survivors]
    certified = [s for s in survivors if s.complete]
    total = sum(len(s) for s in shards)
    print(f"classified {total} codes in {time.time() - t0:.1f} s: {hits} hits, "
          f"{len(survivors)} survivors ({len(certified)} certified)")
    print(f"merged logs: {merged['hits']} {merged['survivors']}")
    if certified:
        print("!" * 72)
        for s in certified:
            print(f"!!! SURVIVOR fixture {s.fixture_id} X={s.x.hex()} index {s.index}: "
                  f"no codeword of weight below the bound")
        print("!" * 72)
        return EXIT_SURVIVOR
    if survivors or hits + len(survivors) != total:
        print("search incomplete: some codes were not certified")
        return EXIT_FAIL
    return EXIT_OK


def cmd_search(args: argparse.Namespace) -> int:
    if args.shard_file:
        shards = search.read_shard_list(args.shard_file)
    else:
        if args.fixture is None or args.x is None:
            raise UsageError("--fixture and --x are required without --shard-file")
        end = args.end if args.end is not None else args.start + args.count
        if end > search.SPACE or end < args.start:
            raise UsageError("range must satisfy start <= end <= 2^36")
        shards = [search.SearchShard(args.fixture, args.x, a, b, args.bound)
                  for a, b in search.split_range(args.start, end, args.shards)]
    total = sum(len(s) for s in shards)
    if total > DESK_LIMIT and not args.i_understand_long_run:
        raise UsageError(f"{total} codes exceeds the desk limit of {DESK_LIMIT}; "
                         "pass --i-understand-long-run to proceed")
    directory = Path(args.dir)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / SHARD_LIST).write_text("".join(s.descriptor() + "\n" for s in shards))
    _write_run_config(directory, args)
    kw = {"seed": args.seed, "carry_forward": not args.no_carry_forward,
          "max_level": args.max_level, "checkpoint_every": args.checkpoint_every}
    return _finish(shards, directory, args.workers, kw, args.out)


def cmd_resume(args: argparse.Namespace) -> int:
    directory = Path(args.dir)
    if not (directory / SHARD_LIST).exists() or not (directory / RUN_CONFIG).exists():
        raise UsageError(f"{directory} holds no search run (missing {SHARD_LIST} or {RUN_CONFIG})")
    shards = search.read_shard_list(directory / SHARD_LIST)
    kw = _read_run_config(directory)
    for k, v in kw.items():
        print(f"# stored {k} = {v}")
    return _finish(shards, directory, args.workers, kw, args.out)


# oracle


def cmd_oracle(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    if args.phi is not None:
        f = fixtures.load_fixture(args.phi)
        g = codegen.phi_code(f)
        print(f"Phi-code of fixture {f.id}: [{g.ncols},{g.nrows}] self-dual "
              f"{'yes' if codegen.is_self_dual(g) else 'no'}")
        _report_code(g, args.max_dim)
        return EXIT_OK
    if args.matrix_file:
        _report_code(fixtures.parse_code_file(args.matrix_file), args.max_dim)
        return EXIT_OK
    if args.random_code:
        n, k = args.random_code
        if k > n:
            raise UsageError("dimension exceeds length")
        _report_code(oracle.random_code(n, k, rng), args.max_dim)
        return EXIT_OK
    if args.cross_check:
        n, k = args.length, args.length // 2
        bad = 0
        for i in range(args.cross_check):
            g = oracle.random_code(n, k, rng)
            d = oracle.exhaustive_min_weight(g, args.max_dim)
            below = has_word_below(g, d, seed=args.seed)
            at = has_word_below(g, d + 1, seed=args.seed)
            agree = below is None and at is not None and at[1] == d
            bad += not agree
            print(f"code {i}: oracle {d}, detector {'agrees' if agree else 'DISAGREES'}")
        print(f"{args.cross_check - bad}/{args.cross_check} agreements on [{n},{k}] codes")
        return EXIT_OK if bad == 0 else EXIT_FAIL
    raise UsageError("choose --phi, --matrix-file, --random-code or --cross-check")


def _report_code(g, max_dim: int) -> None:
    dist = oracle.weight_distribution(g, max_dim)
    nz = [w for w in dist if w]
    print(f"dimension {g.nrows}, length {g.ncols}, sweep over 2^{g.nrows} words")
    print(f"minimum distance {min(nz) if nz else 0}")
    print("weight distribution: " + " ".join(f"{w}:{c}" for w, c in dist.items()))


# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="extremal72", description=__doc__.splitlines()[0])
    p.add_argument("--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"seed for all randomized internals (default {DEFAULT_SEED})")

    v = sub.add_parser("verify", help="check fixtures and construction invariants")
    common(v)
    g = v.add_mutually_exclusive_group()
    g.add_argument("--fixture", type=_fixture_id)
    g.add_argument("--matrices", metavar="PATH", help="verify a B1/A pair read from a file")
    g.add_argument("--dump", metavar="PATH", help="write the six fixture matrices ('-' for stdout)")
    v.add_argument("--samples", type=_positive, default=50, help="random (X, Y) pairs per fixture")
    v.add_argument("--skip-distance", action="store_true", help="skip the 2^18 Phi-code sweep")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("expand", help="write the 36x72 generator for (j, X, Y)")
    common(e)
    e.add_argument("--fixture", type=_fixture_id, required=True)
    e.add_argument("--x", type=_hex36, required=True, help="36-bit hex, x1 most significant")
    e.add_argument("--y", type=_hex36, required=True)
    e.add_argument("--order", choices=("blocks", "natural"), default="blocks",
                   help="column order: block rows as constructed, or 4-cycle layout")
    e.add_argument("--out", metavar="PATH")
    e.set_defaults(func=cmd_expand)

    o = sub.add_parser("orbits", help="orbit representatives of B2 parameters")
    common(o)
    o.add_argument("--fixture", type=_fixture_id, required=True)
    o.add_argument("--group-file", metavar="PATH", help="centralizer permutations, 1-based")
    o.add_argument("--no-kernel", action="store_true",
                   help="leave out the translations coming from g^2 on A-block columns")
    o.add_argument("--with-inversion", action="store_true",
                   help="also include X -> X + upper(B1), induced by g -> g^-1")
    o.add_argument("--bound", type=int, default=16)
    o.add_argument("--cap", type=_positive, default=1 << 20, help="maximum group order")
    sc = o.add_mutually_exclusive_group()
    sc.add_argument("--x-list", type=lambda s: [_hex36(t) for t in s.split(",")])
    sc.add_argument("--x-file", metavar="PATH")
    sc.add_argument("--random", type=_positive, metavar="N")
    sc.add_argument("--subspace", type=lambda s: [_hex36(t) for t in s.split(",")],
                    metavar="HEX,...")
    sc.add_argument("--full-sweep", action="store_true", help="all 2^36 values (long run)")
    o.add_argument("--i-understand-long-run", action="store_true")
    o.add_argument("--out", metavar="PATH")
    o.set_defaults(func=cmd_orbits)

    s = sub.add_parser("search", help="classify codes over a range of Gray indices")
    common(s)
    s.add_argument("--fixture", type=_fixture_id)
    s.add_argument("--x", type=_hex36)
    s.add_argument("--start", type=_index, default=0)
    rg = s.add_mutually_exclusive_group()
    rg.add_argument("--end", type=_index)
    rg.add_argument("--count", type=_index, default=1 << 10)
    s.add_argument("--shard-file", metavar="PATH", help="one shard descriptor per line")
    s.add_argument("--bound", type=int, default=search.DEFAULT_BOUND)
    s.add_argument("--shards", type=_positive, default=1, help="split the range into N shards")
    s.add_argument("--workers", type=_positive, default=1)
    s.add_argument("--dir", required=True, help="per-shard logs and checkpoints")
    s.add_argument("--out", metavar="DIR", help="where merged logs go (default --dir)")
    s.add_argument("--no-carry-forward", action="store_true",
                   help="rebuild every code from scratch")
    s.add_argument("--max-level", type=int, help="cap on detector enumeration depth")
    s.add_argument("--checkpoint-every", type=_positive, default=search.CHECKPOINT_EVERY)
    s.add_argument("--i-understand-long-run", action="store_true")
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("resume", help="continue an interrupted search directory")
    common(r)
    r.add_argument("--dir", required=True)
    r.add_argument("--workers", type=_positive, default=1)
    r.add_argument("--out", metavar="DIR")
    r.set_defaults(func=cmd_resume)

    q = sub.add_parser("oracle", help="exhaustive reference computations")
    common(q)
    qg = q.add_mutually_exclusive_group()
    qg.add_argument("--phi", type=_fixture_id, metavar="J", help="Phi-code of fixture J")
    qg.add_argument("--matrix-file", metavar="PATH")
    qg.add_argument("--random-code", type=int, nargs=2, metavar=("N", "K"))
    qg.add_argument("--cross-check", type=_positive, metavar="COUNT",
                    help="detector vs sweep on random codes")
    q.add_argument("--length", type=_positive, default=30, help="length for --cross-check")
    q.add_argument("--max-dim", type=int, default=oracle.MAX_ORACLE_DIM)
    q.set_defaults(func=cmd_oracle)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "full_sweep", False) and not args.i_understand_long_run:
        parser.error("--full-sweep needs --i-understand-long-run")
    if getattr(args, "max_dim", 0) > oracle.MAX_ORACLE_DIM:
        parser.error(f"--max-dim cannot exceed {oracle.MAX_ORACLE_DIM}")
    _header(args)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except oracle.OracleTooLarge as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MatrixFormatError, symmetry.LiftError, search.CheckpointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
