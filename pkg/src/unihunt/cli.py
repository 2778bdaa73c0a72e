"""Command-line entry point: ``unihunt <subcommand> ...``.

Exit status is 0 on success, 1 when a check fails (verification, a failed
basis search) and 2 on bad input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from .bv import MULTISET, SET, bv
from .characteristic import characteristic_vectors, companions, singular_companion
from .hunt import (
    FormatError,
    MassError,
    RunConfig,
    bne,
    format_list,
    format_mass_table,
    ne,
    parse_list,
    parse_mass_table,
    strict_two_neighbors,
    strict_two_patterns,
    verify,
)
from .isometry import aut_order
from .lattice import Lattice, LatticeError, format_gram, norm_counts, parse_gram
from .neighbors import LiftError, NeighborSpec, neighbor, spec_neighbor
from .reduction import reduce
from .roots import RootSystem, root_system

log = logging.getLogger("unihunt")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _load_lattice(args) -> Lattice:
    if getattr(args, "spec", None):
        return spec_neighbor(NeighborSpec.parse(args.spec))
    if not getattr(args, "gram", None):
        raise InputError("give --gram FILE or --spec d:x[:eps]")
    try:
        return parse_gram(_read(args.gram))
    except LatticeError as exc:
        raise InputError(f"{args.gram}: {exc}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise InputError(f"expected comma separated integers, got {text!r}") from None


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


# -- lattice subcommands ----------------------------------------------------------


def cmd_neighbor(args) -> int:
    x = _ints(args.x)
    if args.n is not None and len(x) != args.n:
        raise InputError(f"--x has {len(x)} coordinates, --n is {args.n}")
    lat = neighbor(args.d, x, args.eps)
    _emit(format_gram(lat), args.out)
    r = norm_counts(lat, 3)
    print(f"r1 = {r[1]}  r2 = {r[2]}  r3 = {r[3]}", file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_shorts(args) -> int:
    lat = _load_lattice(args)
    vs = lat.short_vectors(args.bound)
    for k in range(1, args.bound + 1):
        print(f"r{k} = {2 * int((vs.norms == k).sum())}")
    if args.list:
        for v, nv in zip(vs.vectors.tolist(), vs.norms.tolist()):
            print(nv, " ".join(map(str, v)))
    return 0


def cmd_roots(args) -> int:
    print(root_system(_load_lattice(args)))
    return 0


def cmd_bv(args) -> int:
    inv = bv(_load_lattice(args), MULTISET if args.multiset else SET)
    print(inv.hex)
    print(f"vertices {inv.vertices}  edges {inv.edges}  arrows {inv.arrows}")
    return 0


def cmd_reduce(args) -> int:
    lat = _load_lattice(args)
    log.info("reduce seed %d", args.seed)
    res = reduce(lat, args.b, args.t, seed=args.seed)
    if not res.ok:
        print(f"no basis of norm <= {args.b} after {res.tries_used} tries")
        return 1
    print(f"basis of max norm {res.achieved_bound} after {res.tries_used} tries")
    if args.out:
        _emit(format_gram(lat.transform(res.basis)), args.out)
    for v in res.basis:
        print(" ".join(map(str, v)))
    return 0


def cmd_aut(args) -> int:
    rep = aut_order(_load_lattice(args))
    print(f"|O| = {rep.order}")
    print(f"|O/W| = {rep.reduced_order}")
    print(f"reduced mass = {rep.reduced_mass}")
    return 0


def cmd_exc(args) -> int:
    rep = characteristic_vectors(_load_lattice(args), args.bound)
    print(f"|Exc| = {rep.exc_size}")
    print(f"min characteristic norm <= {args.bound}: {rep.min_char_norm}")
    if args.list:
        for v, nv in zip(rep.vectors, rep.norms):
            print(nv, " ".join(map(str, v)))
    return 0


def cmd_companions(args) -> int:
    lat = _load_lattice(args)
    pair = companions(lat)
    sing = singular_companion(lat)
    for k, c in enumerate(pair, start=1):
        tag = " (singular)" if sing is not None and c.gram == sing.gram else ""
        print(f"companion {k}: root system {root_system(c)}{tag}")
        if args.out_prefix:
            Path(f"{args.out_prefix}{k}.gram").write_text(format_gram(c))
    return 0


# -- search subcommands ---------------------------------------------------------------


def _config(args, sub: str) -> RunConfig:
    if args.config:
        try:
            cfg = RunConfig.from_json(_read(args.config))
        except (TypeError, ValueError) as exc:
            raise InputError(f"{args.config}: {exc}") from None
    else:
        cfg = RunConfig(subcommand=sub)
    over = {
        "n": args.n,
        "d_min": args.d_min,
        "d_max": args.d_max,
        "d_parity": args.d_parity,
        "d_modulus": args.d_modulus,
        "d_residue": args.d_residue,
        "chunk": args.chunk,
        "tries": args.tries,
        "seed": args.seed,
        "threads": args.threads,
        "output": args.out,
        "progress": args.progress,
        "state": args.state,
    }
    if sub == "bne":
        over.update(root=args.root, rmass=args.rmass, e=args.e)
        if args.partition is not None:
            over["partition"] = tuple(_ints(args.partition.replace("+", ",")))
    else:
        over["mass_table"] = args.mass
    for k, v in over.items():
        if v is not None:
            setattr(cfg, k, v)
    cfg.subcommand = sub
    cfg.__post_init__()
    if args.dump_config:
        Path(args.dump_config).write_text(cfg.to_json())
    return cfg


def _finish(cfg: RunConfig, result) -> int:
    _emit(format_list(result.entries), cfg.output or None)
    prog = "".join(f"{row}\n" for row in result.progress)
    if cfg.progress:
        Path(cfg.progress).write_text(prog)
    else:
        sys.stderr.write(prog)
    state = "complete" if result.complete else f"partial, remaining {result.ledger.total_remaining}"
    print(f"{len(result.entries)} classes, {state}", file=sys.stderr)
    return 0


def cmd_bne(args) -> int:
    cfg = _config(args, "bne")
    if not cfg.root or not cfg.rmass or not cfg.partition:
        raise InputError("bne needs --root, --rmass and --partition")
    log.info("bne n=%d R=%s seed=%d threads=%d", cfg.n, cfg.root, cfg.seed, cfg.threads)
    try:
        rmass = Fraction(cfg.rmass)
    except ValueError:
        raise InputError(f"bad rmass {cfg.rmass!r}") from None
    res = bne(cfg.n, cfg.root, rmass, cfg.partition, cfg.e, cfg)
    return _finish(cfg, res)


def cmd_ne(args) -> int:
    cfg = _config(args, "ne")
    if not cfg.mass_table:
        raise InputError("ne needs --mass FILE")
    table = parse_mass_table(_read(cfg.mass_table))
    log.info("ne n=%d seed=%d threads=%d", cfg.n, cfg.seed, cfg.threads)
    return _finish(cfg, ne(cfg.n, table, cfg))


def cmd_strict2(args) -> int:
    spec = NeighborSpec(args.d, tuple(_ints(args.x)))
    if args.count:
        total = sum(1 for _ in strict_two_patterns(spec))
        iso = sum(1 for _ in strict_two_neighbors(spec))
        print(f"candidates {total}  isotropic specs {iso}")
        return 0
    for s in strict_two_neighbors(spec):
        print(s)
    return 0


def cmd_verify(args) -> int:
    entries = parse_list(_read(args.list))
    table = parse_mass_table(_read(args.mass))
    rep = verify(entries, table)
    print(rep)
    return 0 if rep.ok else 1


def cmd_oracle_mass(args) -> int:
    from .oracle import classify

    res = classify(args.n)
    table = res.mass_table(root_free_only=not args.all)
    _emit(format_mass_table(table), args.out)
    for c in res.classes:
        print(f"# {c.root} even={int(c.even)} r1={c.r1} |O|={c.order}", file=sys.stderr)
    return 0


# -- parser -------------------------------------------------------------------------------


def _lattice_source(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gram", help="Gram file: n, then n rows")
    g.add_argument("--spec", help="neighbor spec d:x1,...,xn[:eps]")


def _search_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="RunConfig JSON; flags override it")
    p.add_argument("--dump-config", help="write the effective config as JSON")
    p.add_argument("--n", type=int)
    p.add_argument("--d-min", type=int)
    p.add_argument("--d-max", type=int)
    p.add_argument("--d-parity", choices=["odd", "even", "any"])
    p.add_argument("--d-modulus", type=int)
    p.add_argument("--d-residue", type=int)
    p.add_argument("--chunk", type=int)
    p.add_argument("--tries", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--out", help="list file (default stdout)")
    p.add_argument("--progress", help="progress log file (default stderr)")
    p.add_argument("--state", help="resume state file, updated after every chunk")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="unihunt", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("neighbor", help="Gram matrix of N_d(x; eps)")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--eps", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_neighbor)

    p = sub.add_parser("shorts", help="short vector counts")
    _lattice_source(p)
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_shorts)

    p = sub.add_parser("roots", help="root system symbol")
    _lattice_source(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("bv", help="BV invariant")
    _lattice_source(p)
    p.add_argument("--multiset", action="store_true")
    p.set_defaults(func=cmd_bv)

    p = sub.add_parser("reduce", help="randomized search for a basis of short vectors")
    _lattice_source(p)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--t", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("aut", help="automorphism group order")
    _lattice_source(p)
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("exc", help="short characteristic vectors")
    _lattice_source(p)
    p.add_argument("--bound", type=int, default=7)
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_exc)

    p = sub.add_parser("companions", help="companions of an odd lattice, n = 4 mod 8")
    _lattice_source(p)
    p.add_argument("--out-prefix")
    p.set_defaults(func=cmd_companions)

    p = sub.add_parser("bne", help="biased search for one root system")
    _search_options(p)
    p.add_argument("--root")
    p.add_argument("--rmass")
    p.add_argument("--partition", help="e.g. 3+3+2+1+1")
    p.add_argument("--e", type=int)
    p.set_defaults(func=cmd_bne)

    p = sub.add_parser("ne", help="non-biased search against a mass table")
    _search_options(p)
    p.add_argument("--mass")
    p.set_defaults(func=cmd_ne)

    p = sub.add_parser("strict2", help="strict 2-neighbors of N_d(x), d odd")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_strict2)

    p = sub.add_parser("verify", help="check a list file against a mass table")
    p.add_argument("--list", required=True)
    p.add_argument("--mass", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle-mass", help="mass table from the 2-neighbor closure (n <= 18)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--all", action="store_true", help="include classes with r1 > 0")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle_mass)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if hasattr(args, "threads") and args.threads is None and args.config is None:
        args.threads = os.cpu_count() or 1
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MassError as exc:
        print(f"inconsistent mass: {exc}", file=sys.stderr)
        return 1
    except (LatticeError, LiftError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
