"""Coupon-collector search for unimodular lattices among cyclic neighbors of Z^n.

A run walks d upward, enumerates normalized isotropic lines at each d,
builds the neighbors whose root system is still wanted and keeps those with
a new BV invariant. Each new class pays its reduced mass into an exact
ledger; the run ends when the ledger is empty or the d-limit is reached.

Candidate work runs in chunks, possibly in worker processes. Chunks are
merged in enumeration order by a single writer, so the output does not
depend on the number of workers.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .bv import SET, BVInvariant, bv
from .isometry import aut_order
from .lattice import Lattice
from .neighbors import (
    NeighborSpec,
    enumerate_normalized,
    is_isotropic,
    is_line_leader,
    is_normalized,
    lift,
    spec_neighbor,
)
from .reduction import best_basis
from .roots import RootSystem, root_system_of_vectors

log = logging.getLogger(__name__)


class MassError(RuntimeError):
    """The ledger went negative: wrong rmass input or a wrong group order."""


class FormatError(ValueError):
    """Malformed list, mass-table or config file (message carries the line)."""


# -- formats ------------------------------------------------------------------


def _frac(text: str) -> Fraction:
    num, _, den = text.partition("/")
    return Fraction(int(num), int(den or 1))


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ClassEntry:
    """One isometry class found by the search, named by its neighbor spec."""

    spec: NeighborSpec
    mu: Fraction
    beta: int
    root: str
    gram: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False, repr=False)

    def to_line(self) -> str:
        s = self.spec
        return f"{s.d}:{','.join(map(str, s.x))}:{s.eps}:{_frac_str(self.mu)}:{self.beta:016x}:{self.root}"

    @classmethod
    def from_line(cls, line: str) -> "ClassEntry":
        parts = line.strip().split(":")
        if len(parts) != 6:
            raise ValueError(f"expected 6 fields, got {len(parts)}")
        d, x, eps, mu, beta, root = parts
        if len(beta) != 16:
            raise ValueError("beta must be 16 hex digits")
        spec = NeighborSpec(int(d), tuple(int(v) for v in x.split(",")), int(eps))
        return cls(spec, _frac(mu), int(beta, 16), str(RootSystem.parse(root)))


def format_list(entries: Iterable[ClassEntry]) -> str:
    return "".join(e.to_line() + "\n" for e in entries)


def parse_list(text: str) -> list[ClassEntry]:
    out = []
    for k, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            out.append(ClassEntry.from_line(line))
        except ValueError as exc:
            raise FormatError(f"line {k}: {exc}") from None
    return out


def format_mass_table(table: dict[str, Fraction]) -> str:
    return "".join(f"{r}:{_frac_str(q)}\n" for r, q in table.items())


def parse_mass_table(text: str) -> dict[str, Fraction]:
    table: dict[str, Fraction] = {}
    for k, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        root, sep, q = line.strip().rpartition(":")
        try:
            if not sep:
                raise ValueError("expected R:num/den")
            r = str(RootSystem.parse(root))
            val = _frac(q)
        except ValueError as exc:
            raise FormatError(f"line {k}: {exc}") from None
        if val <= 0:
            raise FormatError(f"line {k}: rmass must be positive")
        if r in table:
            raise FormatError(f"line {k}: duplicate root system {r}")
        table[r] = val
    return table


@dataclass(frozen=True)
class ProgressRow:
    """Per-d summary: isotropic lines, neighbors passing the root filter,
    new classes and the remaining reduced mass after d."""

    d: int
    iso: int
    found: int
    new: int
    remaining: Fraction

    def __str__(self) -> str:
        return f"{self.d} {self.iso} {self.found} {self.new} {_frac_str(self.remaining)}"

    @classmethod
    def parse(cls, line: str) -> "ProgressRow":
        d, iso, found, new, rem = line.split()
        return cls(int(d), int(iso), int(found), int(new), _frac(rem))


# -- ledger --------------------------------------------------------------------


@dataclass
class MassLedger:
    """Exact reduced-mass bookkeeping per root system."""

    target: dict[str, Fraction]
    found: list[ClassEntry] = field(default_factory=list)
    remaining: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.target = {str(RootSystem.parse(r)): Fraction(q) for r, q in self.target.items()}
        if not self.remaining:
            self.remaining = dict(self.target)
            for e in self.found:
                self.remaining[e.root] -= e.mu

    def wants(self, root: str) -> bool:
        return self.remaining.get(root, 0) > 0

    def pay(self, entry: ClassEntry) -> Fraction:
        """Record a new class; returns what is left for its root system."""
        if entry.root not in self.remaining:
            raise MassError(f"{entry.to_line()}: root system {entry.root} not in the mass table")
        rest = self.remaining[entry.root] - entry.mu
        if rest < 0:
            raise MassError(f"{entry.to_line()}: remaining mass for {entry.root} would be {rest}")
        self.remaining[entry.root] = rest
        self.found.append(entry)
        return rest

    @property
    def total_remaining(self) -> Fraction:
        return sum(self.remaining.values(), Fraction(0))

    @property
    def done(self) -> bool:
        return all(q == 0 for q in self.remaining.values())

    def conserved(self) -> bool:
        paid: dict[str, Fraction] = {}
        for e in self.found:
            paid[e.root] = paid.get(e.root, Fraction(0)) + e.mu
        return all(self.target[r] == self.remaining[r] + paid.get(r, 0) for r in self.target)


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    """Everything that determines a run; round-trips through JSON."""

    subcommand: str = "ne"
    n: int = 8
    d_min: int = 2
    d_max: int = 30
    d_parity: str = "any"  # any, odd or even
    d_modulus: int = 1  # keep d = d_residue mod d_modulus
    d_residue: int = 0
    partition: tuple[int, ...] = ()
    e: int = 0
    root: str = ""
    rmass: str = ""
    chunk: int = 256
    tries: int = 200
    seed: int = 0
    mass_table: str = ""
    output: str = ""
    progress: str = ""
    state: str = ""
    threads: int = 1

    def __post_init__(self):
        self.partition = tuple(int(p) for p in self.partition)
        if self.d_parity not in ("any", "odd", "even"):
            raise ValueError("d_parity must be any, odd or even")
        if self.chunk < 1 or self.d_modulus < 1 or self.threads < 1:
            raise ValueError("chunk, d_modulus and threads must be positive")

    def d_values(self) -> Iterator[int]:
        for d in range(max(self.d_min, 2), self.d_max + 1):
            if self.d_parity == "odd" and d % 2 == 0:
                continue
            if self.d_parity == "even" and d % 2:
                continue
            if d % self.d_modulus != self.d_residue % self.d_modulus:
                continue
            yield d

    def to_json(self) -> str:
        data = asdict(self)
        data["partition"] = list(self.partition)
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"line {exc.lineno}: {exc.msg}") from None
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise FormatError(f"unknown config keys: {', '.join(sorted(extra))}")
        return cls(**data)

    def search_key(self) -> dict:
        """Fields that fix the search; a resume state must agree on them.

        d_max is left out so a finished run can be extended to larger d.
        """
        keep = ("subcommand", "n", "d_min", "d_parity", "d_modulus", "d_residue",
                "partition", "e", "root", "rmass", "chunk", "tries", "seed")
        data = asdict(self)
        data["partition"] = list(self.partition)
        return {k: data[k] for k in keep}


# -- per-candidate work (Steps 3 to 6 and 7b) ----------------------------------


@dataclass(frozen=True)
class Candidate:
    """A neighbor that passed the root filter, with its BV invariant."""

    spec: NeighborSpec
    root: str
    bv: BVInvariant
    gram: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class LineResult:
    x: tuple[int, ...]
    isotropic: bool
    candidates: tuple[Candidate, ...] = ()


def eps_values(d: int, x: Sequence[int]) -> tuple[int, ...]:
    """Both eps only for even d with no coordinate d/2; else just 0."""
    if d % 2 or d // 2 in x:
        return (0,)
    return (0, 1)


def examine(spec: NeighborSpec) -> tuple[str, BVInvariant, Lattice] | None:
    """Root system and BV of N_d(x; eps), or None when r1 > 0."""
    lat = spec_neighbor(spec)
    vs = lat.short_vectors(3)
    if (vs.norms == 1).any():
        return None
    rs = root_system_of_vectors(vs.of_norm(2), lat.array)
    return str(rs), bv(lat, SET, vs.vectors), lat


def _process_chunk(args) -> list[LineResult]:
    d, xs, wanted = args
    out = []
    for x in xs:
        if not is_isotropic(d, x):
            out.append(LineResult(x, False))
            continue
        if not is_line_leader(d, x):
            continue
        cands = []
        for eps in eps_values(d, x):
            spec = NeighborSpec(d, x, eps)
            res = examine(spec)
            if res is None or res[0] not in wanted:
                continue
            root, inv, lat = res
            cands.append(Candidate(spec, root, inv, lat.gram))
        out.append(LineResult(x, True, tuple(cands)))
    return out


def _chunks(stream: Iterator[tuple[int, ...]], size: int) -> Iterator[list[tuple[int, ...]]]:
    while True:
        block = list(itertools.islice(stream, size))
        if not block:
            return
        yield block


def partitions(m: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of m, parts non-increasing, in reverse lexicographic order."""
    if m == 0:
        yield ()
        return
    top = m if largest is None else min(m, largest)
    for p in range(top, 0, -1):
        for rest in partitions(m - p, p):
            yield (p,) + rest


def all_normalized(n: int, d: int) -> Iterator[tuple[int, ...]]:
    """Every normalized x at d, by end e, then type, then the BNE order."""
    ends = range(0, n) if d % 2 == 0 else (0,)
    for e in ends:
        for part in partitions(n - e):
            yield from enumerate_normalized(n, d, part, e)


# -- the driver ------------------------------------------------------------------


@dataclass
class HuntResult:
    entries: list[ClassEntry]
    ledger: MassLedger
    progress: list[ProgressRow]
    complete: bool
    last_d: int | None = None


class _Registry:
    """BV invariants seen so far, per root system (full comparison on hash ties)."""

    def __init__(self):
        self._seen: dict[tuple[str, int], list[bytes]] = {}

    def add(self, root: str, inv: BVInvariant) -> bool:
        key = (root, inv.hash64)
        datas = self._seen.setdefault(key, [])
        if inv.data in datas:
            return False
        if datas:
            log.warning("BV hash collision %016x in %s", inv.hash64, root)
        datas.append(inv.data)
        return True


def _ordered_map(pool: ProcessPoolExecutor, jobs: Iterable, ahead: int) -> Iterator[list[LineResult]]:
    # bounded look-ahead keeps memory flat on long streams
    pending: deque = deque()
    for job in jobs:
        pending.append(pool.submit(_process_chunk, job))
        if len(pending) >= ahead:
            yield pending.popleft().result()
    while pending:
        yield pending.popleft().result()


def _write_state(path: str, cfg: RunConfig, ledger: MassLedger, progress, d, chunk_no, counters) -> None:
    state = {
        "config": cfg.search_key(),
        "d": d,
        "next_chunk": chunk_no,
        "counters": counters,
        "entries": [e.to_line() for e in ledger.found],
        "remaining": {r: _frac_str(q) for r, q in ledger.remaining.items()},
        "progress": [str(p) for p in progress],
    }
    tmp = Path(path).with_suffix(".tmp")
    tmp.write_text(json.dumps(state, indent=1) + "\n")
    os.replace(tmp, path)


def _hunt(
    n: int,
    target: dict[str, Fraction],
    stream_for: Callable[[int], Iterator[tuple[int, ...]]],
    cfg: RunConfig,
    stop_when_empty_root: bool,
) -> HuntResult:
    ledger = MassLedger(dict(target))
    registry = _Registry()
    progress: list[ProgressRow] = []
    start_d, skip = None, 0
    counters = [0, 0, 0]
    if cfg.state and Path(cfg.state).exists():
        state = json.loads(Path(cfg.state).read_text())
        if state["config"] != cfg.search_key():
            raise FormatError(f"{cfg.state}: state belongs to a different search")
        for line in state["entries"]:
            e = ClassEntry.from_line(line)
            lat = spec_neighbor(e.spec)
            registry.add(e.root, bv(lat))
            ledger.found.append(e)
        ledger.remaining = {r: _frac(q) for r, q in state["remaining"].items()}
        progress = [ProgressRow.parse(p) for p in state["progress"]]
        start_d, skip, counters = state["d"], state["next_chunk"], state["counters"]
        log.info("resuming at d=%s chunk %s", start_d, skip)
    pool = ProcessPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    last_d = progress[-1].d if progress else None
    try:
        for d in cfg.d_values():
            if ledger.done:
                break
            if start_d is not None:
                if d < start_d:
                    continue
                if d > start_d:
                    skip, counters = 0, [0, 0, 0]
                start_d = None
            else:
                skip, counters = 0, [0, 0, 0]
            wanted = frozenset(r for r in ledger.remaining if ledger.remaining[r] > 0)
            blocks = _chunks(stream_for(d), cfg.chunk)
            blocks = itertools.islice(blocks, skip, None)
            jobs = ((d, blk, wanted) for blk in blocks)
            results = _ordered_map(pool, jobs, 2 * cfg.threads) if pool else map(_process_chunk, jobs)
            chunk_no = skip
            stop = False
            for lines in results:
                for res in lines:
                    if not res.isotropic:
                        continue
                    counters[0] += 1
                    for c in res.candidates:
                        if not ledger.wants(c.root):
                            continue
                        counters[1] += 1
                        if not registry.add(c.root, c.bv):
                            continue
                        lat = Lattice(c.gram)
                        rep = aut_order(lat, best_basis(lat, cfg.tries, cfg.seed))
                        entry = ClassEntry(c.spec, rep.reduced_mass, c.bv.hash64, c.root, c.gram)
                        rest = ledger.pay(entry)
                        counters[2] += 1
                        log.info("d=%d new %s mu=%s left %s", d, c.root, entry.mu, rest)
                        if ledger.done or (stop_when_empty_root and rest == 0):
                            stop = True
                            break
                    if stop:
                        break
                chunk_no += 1
                if stop:
                    break
                if cfg.state:
                    _write_state(cfg.state, cfg, ledger, progress, d, chunk_no, counters)
            row = ProgressRow(d, counters[0], counters[1], counters[2], ledger.total_remaining)
            progress.append(row)
            last_d = d
            log.info("progress %s", row)
            if cfg.state:
                _write_state(cfg.state, cfg, ledger, progress, d + 1, 0, [0, 0, 0])
            if stop or ledger.done:
                break
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    return HuntResult(list(ledger.found), ledger, progress, ledger.done, last_d)


def bne(
    n: int,
    root: str | RootSystem,
    rmass: Fraction,
    partition: Sequence[int],
    e: int = 0,
    config: RunConfig | None = None,
) -> HuntResult:
    """Biased search for the classes with root system R among neighbors of type partition + e."""
    cfg = config or RunConfig(subcommand="bne", n=n)
    rmass = Fraction(rmass)
    if rmass <= 0:
        raise ValueError("rmass must be positive")
    if sum(partition) + e != n:
        raise ValueError("partition plus end must sum to n")
    r = str(root if isinstance(root, RootSystem) else RootSystem.parse(root))
    return _hunt(n, {r: rmass}, lambda d: enumerate_normalized(n, d, partition, e), cfg, True)


def ne(n: int, mass_table: dict[str, Fraction], config: RunConfig | None = None) -> HuntResult:
    """Non-biased search over all types at each d; finds the classes with r1 = 0."""
    cfg = config or RunConfig(subcommand="ne", n=n)
    table = {r: Fraction(q) for r, q in mass_table.items() if q}
    return _hunt(n, table, lambda d: all_normalized(n, d), cfg, False)


# -- strict 2-neighbors ----------------------------------------------------------


def strict_two_patterns(spec: NeighborSpec) -> Iterator[tuple[int, ...]]:
    """Candidate y before isotropy: y = x mod d, y_1 = 1, parity constant on
    each class of equal x_i. Coordinates are folded into [0, d]."""
    d, x = spec.d, spec.x
    if d % 2 == 0:
        raise ValueError("strict 2-neighbors need odd d")
    if not is_normalized(d, x):
        raise ValueError("(d, x) must be normalized")
    values = sorted(set(x))
    free = [v for v in values if v != x[0]]
    for bits in itertools.product((0, 1), repeat=len(free)):
        flip = dict(zip(free, bits))
        y = []
        for v in x:
            w = v + d * flip.get(v, 0)
            y.append(min(w, 2 * d - w))
        yield tuple(y)


def strict_two_neighbors(spec: NeighborSpec) -> Iterator[NeighborSpec]:
    """Specs N_{2d}(y; eps) for the isotropic strict-2 candidates y."""
    d2 = 2 * spec.d
    for y in strict_two_patterns(spec):
        if not is_isotropic(d2, y):
            continue
        for eps in eps_values(d2, y):
            yield NeighborSpec(d2, y, eps)


# -- exceptional-biased enumeration -----------------------------------------------


def _char_eps(d: int, x: Sequence[int], k: int) -> list[int]:
    """The eps for which (0..0, 1^k) is characteristic in N_d(x; eps)."""
    out = []
    for eps in (0, 1):
        xp = lift(d, x, eps)
        # xi.(x'/d) must match (x'/d)^2 mod 2
        a = sum(xp[len(x) - k :]) // d
        b = sum(v * v for v in xp) // (d * d)
        if (a - b) % 2 == 0:
            out.append(eps)
    return out


def exceptional_biased_stream(n: int, k: int, d: int) -> Iterator[NeighborSpec]:
    """Lines whose neighbors contain the characteristic vector (0..0, 1^k).

    The first n-k coordinates are odd and strictly increasing in [1, d/2],
    the last k are even and strictly increasing in [2, d/2] with sum = 0
    mod d; x must be d-isotropic. Each spec carries an eps making the vector
    characteristic (both when d/2 is not a coordinate and both qualify).
    """
    if d % 2:
        raise ValueError("d must be even")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    odd = range(1, d // 2 + 1, 2)
    even = range(2, d // 2 + 1, 2)
    for head in itertools.combinations(odd, n - k):
        if not head:
            return
        for tail in itertools.combinations(even, k):
            if sum(tail) % d:
                continue
            x = head + tail
            if not is_isotropic(d, x):
                continue
            good = _char_eps(d, x, k)
            if d // 2 in x:
                good = good[:1]
            for eps in good:
                yield NeighborSpec(d, x, eps)


# -- verification -------------------------------------------------------------------


@dataclass
class VerifyReport:
    ok: bool
    failures: list[str]
    checked: int

    @property
    def first(self) -> str | None:
        return self.failures[0] if self.failures else None

    def __str__(self) -> str:
        if self.ok:
            return f"PASS: {self.checked} entries"
        return f"FAIL: {self.first}" + "".join(f"\n  {f}" for f in self.failures[1:])


def verify(entries: Sequence[ClassEntry], table: dict[str, Fraction]) -> VerifyReport:
    """Recompute every entry, then check mass sums and BV distinctness."""
    failures: list[str] = []
    invs: list[BVInvariant | None] = []
    for e in entries:
        try:
            lat = spec_neighbor(e.spec)
        except ValueError as exc:
            failures.append(f"integrity: {e.to_line()}: {exc}")
            invs.append(None)
            continue
        vs = lat.short_vectors(3)
        root = str(root_system_of_vectors(vs.of_norm(2), lat.array))
        inv = bv(lat, SET, vs.vectors)
        invs.append(inv)
        if (vs.norms == 1).any():
            failures.append(f"integrity: {e.to_line()}: neighbor has norm 1 vectors")
        if root != e.root:
            failures.append(f"integrity: {e.to_line()}: root system is {root}")
        if inv.hash64 != e.beta:
            failures.append(f"integrity: {e.to_line()}: BV hash is {inv.hex}")
        mu = aut_order(lat).reduced_mass
        if mu != e.mu:
            failures.append(f"integrity: {e.to_line()}: reduced mass is {_frac_str(mu)}")
    sums: dict[str, Fraction] = {}
    for e in entries:
        sums[e.root] = sums.get(e.root, Fraction(0)) + e.mu
    for r in sorted(set(sums) | set(table)):
        got, want = sums.get(r, Fraction(0)), table.get(r)
        if want is None:
            failures.append(f"mass: {r} is not in the mass table")
        elif got > want:
            failures.append(f"mass overshoot: {r} sums to {_frac_str(got)} > {_frac_str(want)}")
        elif got < want:
            failures.append(f"mass deficit: {r} sums to {_frac_str(got)} < {_frac_str(want)}")
    seen: dict[tuple[str, bytes], ClassEntry] = {}
    for e, inv in zip(entries, invs):
        if inv is None:
            continue
        key = (e.root, inv.data)
        if key in seen:
            failures.append(f"BV: {e.to_line()} repeats the invariant of {seen[key].to_line()}")
        else:
            seen[key] = e
    # integrity problems come first, then mass, then BV
    order = {"integrity": 0, "mass": 1, "BV": 2}
    failures.sort(key=lambda f: order[f.split(":")[0].split()[0]])
    return VerifyReport(not failures, failures, len(entries))


def entry_for(spec: NeighborSpec) -> ClassEntry:
    """A fresh ClassEntry for a spec (root system, reduced mass and BV recomputed)."""
    lat = spec_neighbor(spec)
    vs = lat.short_vectors(3)
    root = str(root_system_of_vectors(vs.of_norm(2), lat.array))
    inv = bv(lat, SET, vs.vectors)
    return ClassEntry(spec, aut_order(lat).reduced_mass, inv.hash64, root, lat.gram)
