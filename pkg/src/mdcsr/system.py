"""Separate coding of independent files into one storage system.

A system with parameters (n, d, l1, l2) stores one file per level
j in [l+1 : d] (l = l1 + l2), each encoded by its own (n, j, d, l) level
code, with per-node segments simply concatenated.  Levels 1..l carry no
data and are represented as absent.  File sizes must be multiples of the
per-stripe capacity so the accounting stays exact: level j with B_j
symbols uses B_j / level_capacity(d, j, l) stripes, every node stores
alpha = d * total_stripes symbols, and repairing any node downloads
beta = total_stripes symbols from each of d helpers.

By construction the achieved normalized pair (alpha, beta) / total size
is exactly the minimum-bandwidth corner of the bounds module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from . import mbr
from .bounds import NormalizedRates, TradeoffPoint, level_capacity
from .errors import (
    BadParameters,
    EmptySystem,
    IndivisibleFileSize,
    LengthMismatch,
    UnknownLevel,
    WrongHelperCount,
    WrongShareCount,
)
from .galois import FieldModulus, modulus_of, rank_of_rows
from .mbr import LevelCodeSpec, NodeVector, RepairSymbol

Row = tuple[int, ...]
Tag = tuple


@dataclass(frozen=True)
class SystemParams:
    """The defining tuple of one storage instance.

    file_sizes maps level -> size in symbols; levels with no entry carry
    no data.  Sizes are validated here, divisibility in build_system.
    """

    n: int
    d: int
    l1: int
    l2: int
    p: int
    file_sizes: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.l1 < 0 or self.l2 < 0:
            raise BadParameters("l1 and l2 must be nonnegative")
        if not self.total_compromised < self.d:
            raise BadParameters(
                f"l1 + l2 < d violated: {self.total_compromised} >= {self.d}"
            )
        if not self.d < self.n:
            raise BadParameters(f"d < n violated: d = {self.d}, n = {self.n}")
        lo = self.total_compromised + 1
        seen = set()
        for level, size in self.file_sizes:
            if level in seen:
                raise BadParameters(f"level {level} repeated in file_sizes")
            seen.add(level)
            if not lo <= level <= self.d:
                raise BadParameters(f"level {level} outside [{lo}:{self.d}]")
            if size <= 0:
                raise BadParameters(f"level {level} has nonpositive size {size}")

    @classmethod
    def create(
        cls,
        n: int,
        d: int,
        l1: int,
        l2: int,
        file_sizes: Mapping[int, int],
        p: int = 257,
    ) -> "SystemParams":
        items = tuple(sorted((int(j), int(s)) for j, s in file_sizes.items()))
        return cls(n=n, d=d, l1=l1, l2=l2, p=p, file_sizes=items)

    @property
    def total_compromised(self) -> int:
        return self.l1 + self.l2

    @property
    def sizes(self) -> dict[int, int]:
        return dict(self.file_sizes)

    @property
    def total_size(self) -> int:
        return sum(s for _, s in self.file_sizes)


@dataclass(frozen=True)
class NodeShare:
    """One node's full stored content: per-level vectors, ascending."""

    node_id: int
    segments: tuple[tuple[int, NodeVector], ...]

    def segment(self, level: int) -> NodeVector:
        for lv, vec in self.segments:
            if lv == level:
                return vec
        raise UnknownLevel(f"share holds no segment for level {level}")

    @property
    def symbols(self) -> tuple[int, ...]:
        out: list[int] = []
        for _, vec in self.segments:
            out.extend(vec.symbols)
        return tuple(out)


@dataclass(frozen=True)
class RepairPacketBundle:
    """Everything one helper uploads to rebuild one target node."""

    helper: int
    target: int
    packets: tuple[tuple[int, tuple[RepairSymbol, ...]], ...]

    @property
    def total_symbols(self) -> int:
        return sum(len(syms) for _, syms in self.packets)


class System:
    """An immutable built system: level codes plus exact accounting.

    Also the single source of observation rows: every stored symbol,
    repair symbol, message symbol, and key symbol resolves to a linear
    functional over the global column space [messages | keys], with
    messages of all levels first.  Ranks of row sets are cached, keyed by
    the set of rows, since audits and entropy sweeps revisit the same
    collections many times.
    """

    def __init__(self, params: SystemParams, corrupted: frozenset[int] = frozenset()):
        self.params = params
        self.modulus: FieldModulus = modulus_of(params.p)
        if params.n > self.modulus.p - 1:
            raise BadParameters(
                f"n <= p - 1 violated: n = {params.n}, p = {self.modulus.p}"
            )
        l = params.total_compromised
        self.levels: tuple[int, ...] = tuple(sorted(params.sizes))
        self.specs: dict[int, LevelCodeSpec] = {}
        self.stripes: dict[int, int] = {}
        for j in self.levels:
            size = params.sizes[j]
            cap = level_capacity(params.d, j, l)
            if size % cap:
                raise IndivisibleFileSize(
                    f"level {j}: size {size} is not a multiple of capacity {cap}"
                )
            self.stripes[j] = size // cap
            self.specs[j] = mbr.build_level_code(
                params.n, j, params.d, l, self.modulus, self.stripes[j]
            )
        self.msg_offsets: dict[int, int] = {}
        self.key_offsets: dict[int, int] = {}
        msg_at = 0
        for j in self.levels:
            self.msg_offsets[j] = msg_at
            msg_at += params.sizes[j]
        self.msg_cols = msg_at
        key_at = 0
        for j in self.levels:
            self.key_offsets[j] = key_at
            key_at += self.specs[j].key_count * self.stripes[j]
        self.key_cols = key_at
        self._corrupted = corrupted
        self._rank_cache: dict[frozenset[Row], int] = {}
        self._row_cache: dict[tuple, list[tuple[Row, Tag]]] = {}

    # -- basic accounting ------------------------------------------------

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def ell(self) -> int:
        return self.params.total_compromised

    @property
    def alpha(self) -> int:
        """Symbols stored per node."""
        return self.params.d * sum(self.stripes.values())

    @property
    def beta(self) -> int:
        """Symbols downloaded per helper during one repair."""
        return sum(self.stripes.values())

    @property
    def total_cols(self) -> int:
        return self.msg_cols + self.key_cols

    def achieved_point(self) -> tuple[TradeoffPoint, NormalizedRates]:
        total = self.params.total_size
        if total == 0:
            raise EmptySystem("no nonempty levels")
        rates = NormalizedRates.from_mapping(
            self.params.d,
            self.params.l1,
            self.params.l2,
            {j: Fraction(self.params.sizes[j], total) for j in self.levels},
        )
        point = TradeoffPoint(Fraction(self.alpha, total), Fraction(self.beta, total))
        return point, rates

    # -- encode / recover / repair ----------------------------------------

    def encode(self, messages: Mapping[int, Sequence[int]], seed: int) -> tuple[NodeShare, ...]:
        """Encode all level files; key sub-seeds are labeled per level."""
        extra = set(messages) - set(self.levels)
        if extra:
            raise LengthMismatch(f"messages given for unknown levels {sorted(extra)}")
        per_level: dict[int, tuple[NodeVector, ...]] = {}
        for j in self.levels:
            if j not in messages:
                raise LengthMismatch(f"no message supplied for level {j}")
            msg = messages[j]
            if len(msg) != self.params.sizes[j]:
                raise LengthMismatch(
                    f"level {j}: expected {self.params.sizes[j]} symbols, got {len(msg)}"
                )
            per_level[j] = mbr.encode_level(
                self.specs[j], msg, seed, label=j.to_bytes(2, "little")
            )
        return tuple(
            NodeShare(
                node_id=i + 1,
                segments=tuple((j, per_level[j][i]) for j in self.levels),
            )
            for i in range(self.params.n)
        )

    def recover_file(self, level: int, shares: Sequence[NodeShare]) -> tuple[int, ...]:
        """Decode the level file from exactly `level` distinct shares."""
        if not self.ell + 1 <= level <= self.params.d:
            raise UnknownLevel(
                f"level {level} outside [{self.ell + 1}:{self.params.d}]"
            )
        ids = [sh.node_id for sh in shares]
        if len(ids) != level or len(set(ids)) != level:
            raise WrongShareCount(f"need exactly {level} distinct shares, got {ids}")
        if level not in self.levels:
            return ()
        return mbr.collect_level(self.specs[level], [sh.segment(level) for sh in shares])

    def repair_packets(self, helper_share: NodeShare, target: int) -> RepairPacketBundle:
        """All symbols one helper uploads for one target (beta in total)."""
        packets = tuple(
            (j, mbr.repair_symbol(self.specs[j], helper_share.segment(j), target))
            for j in self.levels
        )
        return RepairPacketBundle(helper_share.node_id, target, packets)

    def repair_node(self, target: int, helper_shares: Sequence[NodeShare]) -> NodeShare:
        """Rebuild a node bit-exactly from any d distinct helpers."""
        ids = [sh.node_id for sh in helper_shares]
        if len(ids) != self.params.d or len(set(ids)) != self.params.d or target in ids:
            raise WrongHelperCount(
                f"need exactly {self.params.d} distinct helpers != target, got {ids}"
            )
        segments = []
        for j in self.levels:
            packets: list[RepairSymbol] = []
            for sh in helper_shares:
                packets.extend(mbr.repair_symbol(self.specs[j], sh.segment(j), target))
            segments.append((j, mbr.regenerate_node(self.specs[j], packets, target)))
        return NodeShare(node_id=target, segments=tuple(segments))

    # -- observation rows --------------------------------------------------

    def with_corrupted_node(self, node: int) -> "System":
        """A copy whose evaluation row for `node` is zeroed everywhere.

        Negative-control device: the copy is deliberately asymmetric, so
        permutation-invariance checks must fail on it.
        """
        if not 1 <= node <= self.params.n:
            raise BadParameters(f"node {node} outside [1:{self.params.n}]")
        return System(self.params, self._corrupted | {node})

    def _psi(self, level: int, node: int) -> tuple[int, ...]:
        if node in self._corrupted:
            return (0,) * self.params.d
        return self.specs[level].psi(node)

    def _lift(
        self, level: int, msg_part: Row, key_part: Row
    ) -> Row:
        row = [0] * self.total_cols
        at = self.msg_offsets[level]
        row[at : at + len(msg_part)] = msg_part
        at = self.msg_cols + self.key_offsets[level]
        row[at : at + len(key_part)] = key_part
        return tuple(row)

    def stored_rows(self, node: int) -> list[tuple[Row, Tag]]:
        """Functional rows of every symbol stored at a node, with tags."""
        key = ("W", node)
        if key not in self._row_cache:
            if not 1 <= node <= self.params.n:
                raise BadParameters(f"node {node} outside [1:{self.params.n}]")
            rows: list[tuple[Row, Tag]] = []
            for j in self.levels:
                spec = self.specs[j]
                psi = self._psi(j, node)
                for s in range(spec.stripes):
                    for q in range(spec.d):
                        msg_part, key_part = mbr.stored_functional(spec, psi, s, q)
                        rows.append((self._lift(j, msg_part, key_part), ("W", node, j, s, q)))
            self._row_cache[key] = rows
        return self._row_cache[key]

    def repair_rows(self, helper: int, target: int) -> list[tuple[Row, Tag]]:
        """Functional rows of the repair symbols helper -> target."""
        key = ("S", helper, target)
        if key not in self._row_cache:
            for node in (helper, target):
                if not 1 <= node <= self.params.n:
                    raise BadParameters(f"node {node} outside [1:{self.params.n}]")
            if helper == target:
                raise BadParameters("helper and target coincide")
            rows: list[tuple[Row, Tag]] = []
            for j in self.levels:
                spec = self.specs[j]
                psi_h = self._psi(j, helper)
                psi_t = self._psi(j, target)
                for s in range(spec.stripes):
                    msg_part, key_part = mbr.repair_functional(spec, psi_h, psi_t, s)
                    rows.append((self._lift(j, msg_part, key_part), ("S", helper, target, j, s)))
            self._row_cache[key] = rows
        return self._row_cache[key]

    def message_rows(self, level: int) -> list[tuple[Row, Tag]]:
        """Unit rows for the message symbols of one level (may be empty)."""
        if not 1 <= level <= self.params.d:
            raise BadParameters(f"level {level} outside [1:{self.params.d}]")
        if level not in self.levels:
            return []
        key = ("M", level)
        if key not in self._row_cache:
            rows: list[tuple[Row, Tag]] = []
            base = self.msg_offsets[level]
            for idx in range(self.params.sizes[level]):
                row = [0] * self.total_cols
                row[base + idx] = 1
                rows.append((tuple(row), ("M", level, idx)))
            self._row_cache[key] = rows
        return self._row_cache[key]

    def key_rows(self) -> list[tuple[Row, Tag]]:
        """Unit rows for every key symbol in the system."""
        key = ("K",)
        if key not in self._row_cache:
            rows: list[tuple[Row, Tag]] = []
            for idx in range(self.key_cols):
                row = [0] * self.total_cols
                row[self.msg_cols + idx] = 1
                rows.append((tuple(row), ("K", idx)))
            self._row_cache[key] = rows
        return self._row_cache[key]

    def rank_of(self, rows: Iterable[Row]) -> int:
        """Cached row rank; the cache key is the set of rows."""
        key = frozenset(rows)
        cached = self._rank_cache.get(key)
        if cached is None:
            cached = rank_of_rows(key, self.modulus)
            self._rank_cache[key] = cached
        return cached


def build_system(params: SystemParams) -> System:
    return System(params)


def minimal_file_sizes(
    d: int, l1: int, l2: int, rates: Mapping[int, Fraction]
) -> dict[int, int]:
    """Smallest integer file sizes realizing a target normalized vector.

    Each level needs B_j = share_j * total to be an integer multiple of
    its per-stripe capacity, so the minimal total is the lcm of the
    per-level requirements.
    """
    l = l1 + l2
    need = 1
    cleaned = {int(j): Fraction(v) for j, v in rates.items() if Fraction(v) != 0}
    if not cleaned:
        return {}
    total_share = sum(cleaned.values())
    if total_share != 1:
        raise BadParameters(f"rate vector must sum to 1, got {total_share}")
    for j, share in cleaned.items():
        if not l + 1 <= j <= d:
            raise BadParameters(f"level {j} outside [{l + 1}:{d}]")
        cap = level_capacity(d, j, l)
        den = share.denominator
        num = share.numerator
        need = lcm(need, den * cap // gcd(num, cap))
    return {j: int(share * need) for j, share in cleaned.items()}
