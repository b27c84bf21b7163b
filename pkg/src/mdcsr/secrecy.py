"""Eavesdropper observations and exact leakage accounting.

An eavesdropper sees the stored contents of its type I nodes and every
repair symbol ever downloadable to rebuild its type II nodes.  Both are
linear functionals of (messages, keys), assembled here purely from code
coefficients; sampled values never enter.  With uniform independent
messages and keys the information the observation carries about the
messages is exactly

    rank([message cols | key cols]) - rank(key cols)

in symbol units, so a zero difference is a proof of perfect secrecy for
the instance, and any positive difference is a concrete break.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import IndexOutOfRange, OverlappingSets
from .system import Row, System, Tag


@dataclass(frozen=True)
class EavesdropperSpec:
    """Disjoint sets of type I (contents) and type II (repair) nodes."""

    e1: frozenset[int]
    e2: frozenset[int]

    def __post_init__(self) -> None:
        overlap = self.e1 & self.e2
        if overlap:
            raise OverlappingSets(f"nodes {sorted(overlap)} appear in both sets")

    @classmethod
    def of(cls, e1: Iterable[int] = (), e2: Iterable[int] = ()) -> "EavesdropperSpec":
        return cls(frozenset(e1), frozenset(e2))

    def describe(self) -> dict:
        return {"e1": sorted(self.e1), "e2": sorted(self.e2)}


class ObservationSystem:
    """A set of observation rows over [message | key] columns.

    Rows carry provenance tags naming the stored or repair symbol each
    came from.  Ranks are computed through the owning system's cache.
    The column split defaults to the system's global layout; restricted
    views pass their own.
    """

    def __init__(
        self,
        system: System,
        tagged_rows: Sequence[tuple[Row, Tag]],
        msg_cols: "int | None" = None,
        key_cols: "int | None" = None,
    ):
        self.system = system
        self.rows: tuple[Row, ...] = tuple(r for r, _ in tagged_rows)
        self.tags: tuple[Tag, ...] = tuple(t for _, t in tagged_rows)
        self.msg_cols = system.msg_cols if msg_cols is None else msg_cols
        self.key_cols = system.key_cols if key_cols is None else key_cols

    def __len__(self) -> int:
        return len(self.rows)

    def rank_full(self) -> int:
        return self.system.rank_of(self.rows)

    def rank_keys_only(self) -> int:
        return self.system.rank_of(tuple(r[self.msg_cols :] for r in self.rows))

    def reclassified_as_messages(self) -> "ObservationSystem":
        """Negative control: treat every key column as a message column.

        The returned observation has no key columns, so its conditional
        rank is zero and any nontrivial observation shows as leakage.
        """
        return ObservationSystem(
            self.system,
            tuple(zip(self.rows, self.tags)),
            msg_cols=self.msg_cols + self.key_cols,
            key_cols=0,
        )

    def restricted_to_level(self, level: int) -> "ObservationSystem":
        """Only the rows and columns of one level (block of the system)."""
        sys = self.system
        size = sys.params.sizes.get(level, 0)
        m0 = sys.msg_offsets.get(level, 0)
        k0 = sys.msg_cols + sys.key_offsets.get(level, 0)
        kc = sys.specs[level].key_count * sys.stripes[level] if level in sys.specs else 0
        picked = []
        for row, tag in zip(self.rows, self.tags):
            if len(tag) >= 4 and tag[0] in ("W", "S"):
                row_level = tag[3] if tag[0] == "S" else tag[2]
                if row_level != level:
                    continue
            sub = row[m0 : m0 + size] + row[k0 : k0 + kc]
            picked.append((sub, tag))
        return ObservationSystem(sys, picked, msg_cols=size, key_cols=kc)


@dataclass(frozen=True)
class LeakageReport:
    """Exact leakage of one observation, in symbols (units of log p)."""

    h_obs: int
    h_obs_given_messages: int

    @property
    def leakage_rank(self) -> int:
        return self.h_obs - self.h_obs_given_messages

    @property
    def secure(self) -> bool:
        return self.leakage_rank == 0

    @property
    def verdict(self) -> str:
        return "secure" if self.secure else "insecure"


def observation_of(system: System, spec: EavesdropperSpec) -> ObservationSystem:
    """Assemble the full observation of one eavesdropper.

    Type I nodes contribute their stored rows.  Type II nodes contribute
    the inbound repair rows from every helper in every repair group; for
    n > d + 1 the same functional is emitted once per group containing
    the helper (the construction makes repair data group-independent, so
    these extra rows collapse under rank).
    """
    n, d = system.params.n, system.params.d
    for node in sorted(spec.e1 | spec.e2):
        if not 1 <= node <= n:
            raise IndexOutOfRange(f"node {node} outside [1:{n}]")
    tagged: list[tuple[Row, Tag]] = []
    for node in sorted(spec.e1):
        tagged.extend(system.stored_rows(node))
    for node in sorted(spec.e2):
        survivors = [i for i in range(1, n + 1) if i != node]
        if n == d + 1:
            groups = [tuple(survivors)]
        else:
            groups = list(itertools.combinations(survivors, d))
        for group in groups:
            for helper in group:
                for row, tag in system.repair_rows(helper, node):
                    full_tag = tag if n == d + 1 else tag + (group,)
                    tagged.append((row, full_tag))
    return ObservationSystem(system, tagged)


def leakage(obs: ObservationSystem) -> LeakageReport:
    return LeakageReport(obs.rank_full(), obs.rank_keys_only())


@dataclass(frozen=True)
class AuditEntry:
    spec: EavesdropperSpec
    report: LeakageReport
    compliant: bool


@dataclass(frozen=True)
class AuditSummary:
    entries: tuple[AuditEntry, ...]

    @property
    def secure(self) -> bool:
        return all(e.report.secure for e in self.entries)

    @property
    def max_leakage(self) -> int:
        return max((e.report.leakage_rank for e in self.entries), default=0)


def audit_all(
    system: System,
    e1_size: Optional[int] = None,
    e2_size: Optional[int] = None,
) -> AuditSummary:
    """Audit every disjoint (E1, E2) pair of the requested sizes.

    Defaults to the sizes the code was keyed for, (l1, l2); other sizes
    are allowed as negative or exploratory controls and the entries are
    then flagged non-compliant.  Enumeration order is deterministic.
    """
    n = system.params.n
    s1 = system.params.l1 if e1_size is None else e1_size
    s2 = system.params.l2 if e2_size is None else e2_size
    if not 0 <= s1 <= n or not 0 <= s2 <= n:
        raise IndexOutOfRange(f"set sizes ({s1}, {s2}) outside [0:{n}]")
    compliant = (s1, s2) == (system.params.l1, system.params.l2)
    entries = []
    nodes = range(1, n + 1)
    for e1 in itertools.combinations(nodes, s1):
        rest = [i for i in nodes if i not in e1]
        for e2 in itertools.combinations(rest, s2):
            spec = EavesdropperSpec.of(e1, e2)
            entries.append(AuditEntry(spec, leakage(observation_of(system, spec)), compliant))
    return AuditSummary(tuple(entries))
