"""Variable collections and inequality checks on an instantiated code.

For linear codes over uniform independent (messages, keys), the joint
entropy of any collection of system variables equals, in symbol units,
the rank of the stacked coefficient rows; conditional entropy is a rank
difference.  That turns every converse-style inequality into an exact
rational comparison on a concrete system, which this module performs
over the full stated parameter range of each statement.

Collections follow the standard families: W_A (stored contents), S_{i->j}
(repair symbols), M^(m) (the first m level files, empty levels
contributing nothing), and

    U^(t, s) = (W_{[1:t]}, inbound-from-above of nodes t+1 .. s)

where inbound-from-above of node j means S_{[j+1:n] -> j}.  Everything
here requires n = d + 1, where the repair group of a node is unique.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .bounds import level_capacity
from .errors import BadRange, IndexOutOfRange, NotSquareSystem
from .secrecy import ObservationSystem
from .system import System


@dataclass(frozen=True)
class VarId:
    """One system variable: kind 'W', 'S', 'M', or 'K' plus indices."""

    kind: str
    a: int = 0
    b: int = 0


def W(i: int) -> VarId:
    return VarId("W", i)


def S(src: int, dst: int) -> VarId:
    return VarId("S", src, dst)


def M(level: int) -> VarId:
    return VarId("M", level)


KEY = VarId("K")


def w_range(lo: int, hi: int) -> tuple[VarId, ...]:
    """W_lo .. W_hi inclusive (empty when hi < lo)."""
    return tuple(W(i) for i in range(lo, hi + 1))


def s_from(src: int, targets: Iterable[int]) -> tuple[VarId, ...]:
    return tuple(S(src, t) for t in targets)


def s_into(dst: int, helpers: Iterable[int]) -> tuple[VarId, ...]:
    return tuple(S(h, dst) for h in helpers)


def inbound(n: int, dst: int) -> tuple[VarId, ...]:
    """Everything downloadable to rebuild dst: S_{i -> dst} for all i != dst."""
    return s_into(dst, (i for i in range(1, n + 1) if i != dst))


def lower_inbound(dst: int) -> tuple[VarId, ...]:
    """S_{[1:dst-1] -> dst}."""
    return s_into(dst, range(1, dst))


def upper_inbound(n: int, dst: int) -> tuple[VarId, ...]:
    """S_{[dst+1:n] -> dst}."""
    return s_into(dst, range(dst + 1, n + 1))


def u_ids(n: int, t: int, s: int) -> tuple[VarId, ...]:
    """U^(t, s): W_{[1:t]} plus inbound-from-above of nodes t+1 .. s."""
    if not 0 <= t <= s <= n:
        raise BadRange(f"need 0 <= t <= s <= n, got (t, s) = ({t}, {s})")
    ids = list(w_range(1, t))
    for j in range(t + 1, s + 1):
        ids.extend(upper_inbound(n, j))
    return tuple(ids)


def m_upto(system: System, m: int) -> tuple[VarId, ...]:
    """M^(m): the level files 1..m (absent levels contribute no rows)."""
    if not 0 <= m <= system.d:
        raise BadRange(f"need 0 <= m <= d, got m = {m}")
    return tuple(M(j) for j in system.levels if j <= m)


@dataclass(frozen=True)
class VarCollection:
    """An ordered, de-duplicated set of VarIds resolved to coefficient rows."""

    ids: tuple[VarId, ...]
    observation: ObservationSystem

    @property
    def rows(self):
        return self.observation.rows


def _resolve(system: System, var: VarId):
    n, d = system.n, system.d
    if var.kind == "W":
        if not 1 <= var.a <= n:
            raise IndexOutOfRange(f"node {var.a} outside [1:{n}]")
        return system.stored_rows(var.a)
    if var.kind == "S":
        if var.a == var.b or not (1 <= var.a <= n and 1 <= var.b <= n):
            raise IndexOutOfRange(f"bad repair pair ({var.a} -> {var.b})")
        return system.repair_rows(var.a, var.b)
    if var.kind == "M":
        if not 1 <= var.a <= d:
            raise IndexOutOfRange(f"level {var.a} outside [1:{d}]")
        return system.message_rows(var.a)
    if var.kind == "K":
        return system.key_rows()
    raise IndexOutOfRange(f"unknown variable kind {var.kind!r}")


def build_collection(system: System, ids: Iterable[VarId]) -> VarCollection:
    """Resolve VarIds against a system with n = d + 1."""
    if system.n != system.d + 1:
        raise NotSquareSystem(
            f"collections are defined for n = d + 1, got n = {system.n}, d = {system.d}"
        )
    deduped: list[VarId] = []
    seen: set[VarId] = set()
    for var in ids:
        if var not in seen:
            seen.add(var)
            deduped.append(var)
    tagged = []
    for var in deduped:
        tagged.extend(_resolve(system, var))
    return VarCollection(tuple(deduped), ObservationSystem(system, tagged))


def entropy(collection: VarCollection) -> int:
    """Joint entropy in symbol units: the rank of the stacked rows."""
    return collection.observation.rank_full()


def cond_entropy(x: VarCollection, given: VarCollection) -> int:
    """H(x | given) = rank(x u given) - rank(given)."""
    system = x.observation.system
    joint = system.rank_of(x.rows + given.rows)
    return joint - system.rank_of(given.rows)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one inequality check, lhs >= rhs, all exact."""

    name: str
    params: dict
    lhs: Fraction
    rhs: Fraction

    @property
    def satisfied(self) -> bool:
        return self.lhs >= self.rhs

    @property
    def slack(self) -> Fraction:
        return self.lhs - self.rhs

    def describe(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "slack": str(self.slack),
            "satisfied": self.satisfied,
        }


class _Ranks:
    """Small helper evaluating entropies of id-tuples against one system."""

    def __init__(self, system: System):
        if system.n != system.d + 1:
            raise NotSquareSystem(
                f"need n = d + 1, got n = {system.n}, d = {system.d}"
            )
        self.system = system
        self.n = system.n
        self.d = system.d

    def rows(self, ids: Sequence[VarId]):
        out = []
        for var in ids:
            out.extend(row for row, _ in _resolve(self.system, var))
        return tuple(out)

    def H(self, ids: Sequence[VarId]) -> Fraction:
        return Fraction(self.system.rank_of(self.rows(ids)))

    def Hc(self, ids: Sequence[VarId], cond: Sequence[VarId]) -> Fraction:
        cond_rows = self.rows(cond)
        joint = self.system.rank_of(self.rows(ids) + cond_rows)
        return Fraction(joint - self.system.rank_of(cond_rows))

    def u(self, t: int, s: int) -> tuple[VarId, ...]:
        return u_ids(self.n, t, s)


def check_lemma1(system: System, t: int, s: int) -> CheckResult:
    """W and lower-inbound of nodes t+1..s are determined by U^(t, s).

    Equivalently the rank does not grow when they are adjoined; lhs is
    the rank of U^(t, s), rhs the rank of the extended collection.
    """
    rk = _Ranks(system)
    if not (1 <= s <= rk.n and 0 <= t <= s - 1):
        raise BadRange(f"need s in [1:{rk.n}] and t in [0:s-1], got ({t}, {s})")
    base = rk.u(t, s)
    extras: list[VarId] = []
    for j in range(t + 1, s + 1):
        extras.extend(lower_inbound(j))
        extras.append(W(j))
    return CheckResult(
        "lemma1",
        {"t": t, "s": s},
        lhs=rk.H(base),
        rhs=rk.H(tuple(base) + tuple(extras)),
    )


def check_exchange1(system: System, m: int, i: int, i2: int, j: int) -> CheckResult:
    """Trade one inbound collection for another around level m.

    With weight w = (d+1-j)/(d-m), conditioned on the first m level
    files:  w H(U^(i,m)) + H(U^(i2,j)) >= w H(U^(i,m+1)) + H(U^(i2,j-1)).
    """
    rk = _Ranks(system)
    d = rk.d
    if not 1 <= m <= d - 1:
        raise BadRange(f"need m in [1:{d - 1}], got {m}")
    if not 0 <= i <= m - 1:
        raise BadRange(f"need i in [0:{m - 1}], got {i}")
    if not 0 <= i2 <= i:
        raise BadRange(f"need i' in [0:{i}], got {i2}")
    if not i2 + 1 <= j <= m - i + i2 + 1:
        raise BadRange(f"need j in [{i2 + 1}:{m - i + i2 + 1}], got {j}")
    cond = m_upto(system, m)
    w = Fraction(d + 1 - j, d - m)
    lhs = w * rk.Hc(rk.u(i, m), cond) + rk.Hc(rk.u(i2, j), cond)
    rhs = w * rk.Hc(rk.u(i, m + 1), cond) + rk.Hc(rk.u(i2, j - 1), cond)
    return CheckResult("exchange1", {"m": m, "i": i, "i2": i2, "j": j}, lhs, rhs)


def check_coro1(system: System, j1: int, j2: int, i: int, i2: int) -> CheckResult:
    """Telescoped exchange: with weight level_capacity(d,j1,j2)/(d-j1),
    conditioned on the first j1 level files,
    w H(U^(i,j1)) + H(U^(i2,j1)) >= w H(U^(i,j1+1)) + H(U^(i2,j2))."""
    rk = _Ranks(system)
    d = rk.d
    if not 1 <= j1 <= d - 1:
        raise BadRange(f"need j1 in [1:{d - 1}], got {j1}")
    if not 0 <= i <= j1:
        raise BadRange(f"need i in [0:{j1}], got {i}")
    if not max(0, i - 1) <= i2 <= i:
        raise BadRange(f"need i' in [{max(0, i - 1)}:{i}], got {i2}")
    if not i2 <= j2 <= j1 - 1:
        raise BadRange(f"need j2 in [{i2}:{j1 - 1}], got {j2}")
    cond = m_upto(system, j1)
    w = Fraction(level_capacity(d, j1, j2), d - j1)
    lhs = w * rk.Hc(rk.u(i, j1), cond) + rk.Hc(rk.u(i2, j1), cond)
    rhs = w * rk.Hc(rk.u(i, j1 + 1), cond) + rk.Hc(rk.u(i2, j2), cond)
    return CheckResult("coro1", {"j1": j1, "j2": j2, "i": i, "i2": i2}, lhs, rhs)


def check_coro2(system: System, l: int, l1: int, m: int) -> CheckResult:
    """Capacity-weighted descent step, conditioned on the first m files:
    H(U^(l1,m))/T_m >= H(U^(l1,m+1))/T_{m+1} + (1/T_m - 1/T_{m+1}) H(U^(l1,l))."""
    rk = _Ranks(system)
    d = rk.d
    if not 0 <= l <= d - 1:
        raise BadRange(f"need l in [0:{d - 1}], got {l}")
    if not 0 <= l1 <= l:
        raise BadRange(f"need l1 in [0:{l}], got {l1}")
    if not l + 1 <= m <= d - 1:
        raise BadRange(f"need m in [{l + 1}:{d - 1}], got {m}")
    cond = m_upto(system, m)
    inv_a = Fraction(1, level_capacity(d, m, l))
    inv_b = Fraction(1, level_capacity(d, m + 1, l))
    lhs = inv_a * rk.Hc(rk.u(l1, m), cond)
    rhs = inv_b * rk.Hc(rk.u(l1, m + 1), cond) + (inv_a - inv_b) * rk.Hc(
        rk.u(l1, l), cond
    )
    return CheckResult("coro2", {"l": l, "l1": l1, "m": m}, lhs, rhs)


def check_exchange2(system: System, l: int, l1: int) -> CheckResult:
    """The second exchange: with weight (d-l1)/(d-l) and the uploads of
    node l1+1 into [1:l1] joined on both sides,
    w H(U^(l1,l)) + H(U^(l1,l1+1), joined) >= w H(U^(l1,l+1)) + H(U^(l1,l1), joined).

    At l1 = 0 this computes the same two sides as exchange1 at
    (m=l, i=i2=0, j=1) whenever the first l level files are empty.
    """
    rk = _Ranks(system)
    d = rk.d
    if not 1 <= l <= d - 1:
        raise BadRange(f"need l in [1:{d - 1}], got {l}")
    if not 0 <= l1 <= l // 2:
        raise BadRange(f"need l1 in [0:{l // 2}], got {l1}")
    w = Fraction(d - l1, d - l)
    joined = s_from(l1 + 1, range(1, l1 + 1))
    lhs = w * rk.H(rk.u(l1, l)) + rk.H(rk.u(l1, l1 + 1) + joined)
    rhs = w * rk.H(rk.u(l1, l + 1)) + rk.H(rk.u(l1, l1) + joined)
    return CheckResult("exchange2", {"l": l, "l1": l1}, lhs, rhs)


def check_props(system: System) -> list[CheckResult]:
    """Instantiate the full chain from the code's own (l, l1, l2).

    Covers the induction step and closed form of the bandwidth argument,
    the upload-counting inequality, the storage-chain step and closed
    form, and the two final bounds in raw symbol units, where the
    minimum-bandwidth construction must meet both with zero slack.
    """
    rk = _Ranks(system)
    d, l, l1 = rk.d, system.ell, system.params.l1
    sizes = system.params.sizes
    b = {j: sizes.get(j, 0) for j in range(1, d + 1)}
    cap = {j: level_capacity(d, j, l) for j in range(l + 1, d + 1)}
    csum = lambda hi: sum(Fraction(b[j], cap[j]) for j in range(l + 1, hi + 1))
    results: list[CheckResult] = []
    u_low = rk.H(rk.u(l1, l))
    u_next = rk.H(rk.u(l1, l + 1))
    for m in range(l + 1, d + 1):
        lhs = Fraction(1, d - l) * u_next
        rhs = (
            csum(m)
            + Fraction(1, cap[m]) * rk.Hc(rk.u(l1, m), m_upto(system, m))
            + (Fraction(1, d - l) - Fraction(1, cap[m])) * u_low
        )
        results.append(CheckResult("prop1_step", {"m": m}, lhs, rhs))
    results.append(
        CheckResult(
            "prop1",
            {},
            Fraction(1, d - l) * u_next,
            csum(d) + Fraction(1, d - l) * u_low,
        )
    )
    uploads = s_from(l1 + 1, range(1, l1 + 1))
    results.append(
        CheckResult(
            "prop2",
            {},
            rk.H(uploads) + Fraction(l1, d - l) * u_low,
            Fraction(l1, d - l) * u_next,
        )
    )
    for m in range(l + 1, d):
        lhs = rk.H(rk.u(l1 + 1, m)) + Fraction(d - m, d - l) * u_next
        rhs = (
            (d - m) * csum(m)
            + rk.H(rk.u(l1 + 1, m + 1))
            + Fraction(d - m, d - l) * u_low
        )
        results.append(CheckResult("prop3_step", {"m": m}, lhs, rhs))
    results.append(
        CheckResult(
            "prop3",
            {},
            rk.H(rk.u(l1 + 1, l + 1))
            + Fraction(level_capacity(d, d, l + 1), d - l) * u_next,
            level_capacity(d, d, l) * csum(d)
            + Fraction(level_capacity(d, d, l), d - l) * u_low,
        )
    )
    results.append(
        CheckResult("b3_chain", {}, Fraction(system.beta), csum(d))
    )
    if l1 <= system.params.l2:
        lhs = Fraction(system.alpha) + level_capacity(d, d, l1 + 1) * Fraction(
            system.beta
        )
        rhs = (level_capacity(d, d, l1) + l1) * csum(d)
        results.append(CheckResult("b4_chain", {}, lhs, rhs))
    return results


def _symmetry_family(n: int) -> list[tuple[VarId, ...]]:
    family: list[tuple[VarId, ...]] = []
    for s in range(n + 1):
        for t in range(s + 1):
            family.append(u_ids(n, t, s))
    for j in range(1, n + 1):
        family.append(inbound(n, j))
        family.append(lower_inbound(j))
        family.append(upper_inbound(n, j))
    return [ids for ids in family if ids]


def _permute_ids(ids: Sequence[VarId], image: dict[int, int]) -> tuple[VarId, ...]:
    out = []
    for var in ids:
        if var.kind == "W":
            out.append(W(image[var.a]))
        elif var.kind == "S":
            out.append(S(image[var.a], image[var.b]))
        else:
            out.append(var)
    return tuple(out)


def check_symmetry(
    system: System, permutations: Optional[Sequence[Sequence[int]]] = None
) -> CheckResult:
    """Rank invariance of a representative family under node relabeling.

    Runs every permutation of [1:n] by default (n <= 5 keeps that small)
    or a supplied sample.  Reported rhs is the largest absolute rank
    deviation seen, so the check is satisfied exactly when it is zero.
    """
    rk = _Ranks(system)
    n = rk.n
    if permutations is None:
        if n > 5:
            raise BadRange("pass an explicit permutation sample for n > 5")
        permutations = list(itertools.permutations(range(1, n + 1)))
    family = _symmetry_family(n)
    baseline = [rk.system.rank_of(rk.rows(ids)) for ids in family]
    worst = 0
    for perm in permutations:
        image = {i + 1: perm[i] for i in range(n)}
        for ids, base in zip(family, baseline):
            got = rk.system.rank_of(rk.rows(_permute_ids(ids, image)))
            worst = max(worst, abs(got - base))
    return CheckResult(
        "symmetry",
        {"permutations": len(permutations), "collections": len(family)},
        lhs=Fraction(0),
        rhs=Fraction(worst),
    )


def sweep_lemma1(system: System) -> list[CheckResult]:
    n = system.n
    return [
        check_lemma1(system, t, s) for s in range(1, n + 1) for t in range(s)
    ]


def sweep_exchange1(system: System) -> list[CheckResult]:
    d = system.d
    out = []
    for m in range(1, d):
        for i in range(m):
            for i2 in range(i + 1):
                for j in range(i2 + 1, m - i + i2 + 2):
                    out.append(check_exchange1(system, m, i, i2, j))
    return out


def sweep_coro1(system: System) -> list[CheckResult]:
    d = system.d
    out = []
    for j1 in range(1, d):
        for i in range(j1 + 1):
            for i2 in range(max(0, i - 1), i + 1):
                for j2 in range(i2, j1):
                    out.append(check_coro1(system, j1, j2, i, i2))
    return out


def sweep_coro2(system: System) -> list[CheckResult]:
    d = system.d
    out = []
    for l in range(d):
        for l1 in range(l + 1):
            for m in range(l + 1, d):
                out.append(check_coro2(system, l, l1, m))
    return out


def sweep_exchange2(system: System) -> list[CheckResult]:
    d = system.d
    return [
        check_exchange2(system, l, l1)
        for l in range(1, d)
        for l1 in range(l // 2 + 1)
    ]


SUITES = ("lemma1", "exchange1", "coro", "exchange2", "props", "symmetry")


def run_suite(system: System, suite: str) -> list[CheckResult]:
    """Run one named suite (or 'all') over its full parameter range."""
    if suite == "all":
        out: list[CheckResult] = []
        for name in SUITES:
            out.extend(run_suite(system, name))
        return out
    if suite == "lemma1":
        return sweep_lemma1(system)
    if suite == "exchange1":
        return sweep_exchange1(system)
    if suite == "coro":
        return sweep_coro1(system) + sweep_coro2(system)
    if suite == "exchange2":
        return sweep_exchange2(system)
    if suite == "props":
        return check_props(system)
    if suite == "symmetry":
        return [check_symmetry(system)]
    raise BadRange(f"unknown suite {suite!r}")
