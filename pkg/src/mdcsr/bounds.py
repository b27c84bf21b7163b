"""Exact-rational outer bounds and the achievable corner of the tradeoff.

All quantities here are normalized by the total file size and kept as
`fractions.Fraction`, so every comparison is exact: no tolerance appears
anywhere in this module.  The central combinatorial quantity is

    level_capacity(d, k, l) = sum_{t=l+1..k} (d + 1 - t)

which is the per-stripe message capacity of a level code with recovery
threshold k, repair degree d, and l compromised nodes.  The corner point
where storage equals d times bandwidth is

    (alpha_bar, beta_bar) = (d * S, S),   S = sum_j B_bar_j / capacity_j

and the outer bounds below all touch it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import BadRange, SplitOutOfRegime


def level_capacity(d: int, k: int, l: int) -> int:
    """Per-stripe message capacity: sum_{t=l+1..k} (d + 1 - t).

    The empty sum (l = k) is 0.  Raises BadRange unless 0 <= l <= k <= d.
    """
    if not 0 <= l <= k <= d:
        raise BadRange(f"need 0 <= l <= k <= d, got (d, k, l) = ({d}, {k}, {l})")
    return sum(d + 1 - t for t in range(l + 1, k + 1))


@dataclass(frozen=True)
class TradeoffPoint:
    """A normalized (storage, bandwidth) pair, both exact rationals."""

    alpha_bar: Fraction
    beta_bar: Fraction

    def __post_init__(self) -> None:
        if self.alpha_bar < 0 or self.beta_bar < 0:
            raise BadRange("tradeoff coordinates must be nonnegative")


@dataclass(frozen=True)
class NormalizedRates:
    """Per-level normalized file sizes for a (d, l1, l2) instance.

    `shares` maps each level j in [l+1 : d] to its fraction of the total
    file size.  Fractions must be nonnegative and sum to 1; the all-zero
    vector is also accepted so degenerate queries stay expressible.
    """

    d: int
    l1: int
    l2: int
    shares: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        if self.l1 < 0 or self.l2 < 0:
            raise BadRange("l1 and l2 must be nonnegative")
        if self.total_compromised >= self.d:
            raise BadRange(f"need l1 + l2 < d, got {self.total_compromised} >= {self.d}")
        lo = self.total_compromised + 1
        seen = set()
        total = Fraction(0)
        for level, share in self.shares:
            if level in seen:
                raise BadRange(f"level {level} repeated")
            seen.add(level)
            if not lo <= level <= self.d:
                raise BadRange(f"level {level} outside [{lo}:{self.d}]")
            if share < 0:
                raise BadRange(f"share of level {level} is negative")
            total += share
        if total not in (Fraction(0), Fraction(1)):
            raise BadRange(f"shares must sum to 1 (or all be 0), got {total}")

    @classmethod
    def from_mapping(
        cls, d: int, l1: int, l2: int, shares: Mapping[int, Fraction]
    ) -> "NormalizedRates":
        items = tuple(sorted((int(j), Fraction(v)) for j, v in shares.items()))
        return cls(d, l1, l2, items)

    @property
    def total_compromised(self) -> int:
        return self.l1 + self.l2

    @property
    def mapping(self) -> dict[int, Fraction]:
        return dict(self.shares)

    def share(self, level: int) -> Fraction:
        return self.mapping.get(level, Fraction(0))


def weighted_capacity_sum(rates: NormalizedRates) -> Fraction:
    """sum_j B_bar_j / level_capacity(d, j, l), the quantity all bounds share."""
    l = rates.total_compromised
    total = Fraction(0)
    for level, share in rates.shares:
        if share:
            total += share / level_capacity(rates.d, level, l)
    return total


def mbr_point(rates: NormalizedRates) -> TradeoffPoint:
    """The minimum-bandwidth corner (d * S, S) with S = weighted_capacity_sum."""
    s = weighted_capacity_sum(rates)
    return TradeoffPoint(rates.d * s, s)


def bound_beta(rates: NormalizedRates) -> Fraction:
    """Floor on normalized repair bandwidth: beta_bar >= weighted_capacity_sum."""
    return weighted_capacity_sum(rates)


@dataclass(frozen=True)
class LinearBound:
    """A half-plane constraint alpha_bar + beta_coeff * beta_bar >= rhs."""

    label: str
    beta_coeff: Fraction
    rhs: Fraction

    def line_value(self, beta_bar: Fraction) -> Fraction:
        """The boundary line rhs - beta_coeff * beta_bar, unclamped."""
        return self.rhs - self.beta_coeff * beta_bar

    def alpha_floor(self, beta_bar: Fraction) -> Fraction:
        """Implied lower bound on alpha_bar at a given beta_bar (>= 0 floor)."""
        floor = self.line_value(beta_bar)
        return floor if floor > 0 else Fraction(0)

    def slack(self, point: TradeoffPoint) -> Fraction:
        return point.alpha_bar + self.beta_coeff * point.beta_bar - self.rhs

    def satisfied_by(self, point: TradeoffPoint) -> bool:
        return self.slack(point) >= 0

    def render(self) -> str:
        coeff = (
            str(self.beta_coeff)
            if self.beta_coeff.denominator != 1
            else str(self.beta_coeff.numerator)
        )
        return f"alpha + {coeff}*beta >= {self.rhs}"


def bound_general(rates: NormalizedRates) -> LinearBound:
    """Storage-bandwidth bound for a (l1, l2) split with l1 <= l2.

    alpha_bar + capacity(d, d, l1+1) * beta_bar
        >= (capacity(d, d, l1) + l1) * weighted_capacity_sum.
    """
    if rates.l1 > rates.l2:
        raise SplitOutOfRegime(
            f"bound asserted only for l1 <= l2, got ({rates.l1}, {rates.l2})"
        )
    d, l1 = rates.d, rates.l1
    coeff = Fraction(level_capacity(d, d, l1 + 1))
    rhs = (level_capacity(d, d, l1) + l1) * weighted_capacity_sum(rates)
    return LinearBound("b4", coeff, rhs)


def bound_prior(rates: NormalizedRates) -> LinearBound:
    """All-type-II bound: alpha_bar + (d(d-l) - l) beta_bar >= (d-l)(d+1) * S."""
    d, l = rates.d, rates.total_compromised
    coeff = Fraction(d * (d - l) - l)
    rhs = (d - l) * (d + 1) * weighted_capacity_sum(rates)
    return LinearBound("type2_2", coeff, rhs)


def bound_l1_zero(rates: NormalizedRates) -> LinearBound:
    """The l1 = 0 form: alpha_bar + (d(d-1)/2) beta_bar >= (d(d+1)/2) * S."""
    d = rates.d
    coeff = Fraction(d * (d - 1), 2)
    rhs = Fraction(d * (d + 1), 2) * weighted_capacity_sum(rates)
    return LinearBound("b", coeff, rhs)


@dataclass(frozen=True)
class IntersectionResult:
    point: TradeoffPoint
    matches_mbr: bool
    prior_tight: bool

    @property
    def ok(self) -> bool:
        return self.matches_mbr and self.prior_tight


def intersection_check(rates: NormalizedRates) -> IntersectionResult:
    """Solve the two tight constraints and compare with the corner point.

    Setting the bandwidth floor and the storage-bandwidth bound to
    equalities gives a 2x2 rational system; its solution must be the
    minimum-bandwidth corner, and the all-type-II bound must also be
    tight there.  Raises SplitOutOfRegime when l1 > l2.
    """
    beta = bound_beta(rates)
    general = bound_general(rates)
    alpha = general.rhs - general.beta_coeff * beta
    point = TradeoffPoint(alpha, beta)
    corner = mbr_point(rates)
    prior = bound_prior(rates)
    return IntersectionResult(
        point=point,
        matches_mbr=(point == corner),
        prior_tight=(prior.slack(corner) == 0),
    )


@dataclass(frozen=True)
class DominanceResult:
    """Which of the two l1 = 0 outer bounds dominates for a given (d, l).

    Both half-planes pass through the minimum-bandwidth corner, so one
    exact comparison of their boundary lines at twice the bandwidth
    floor decides which implied storage floor is higher everywhere
    right of the corner (the shallower line wins; clamped floors agree
    where both are vacuous).
    """

    d: int
    l: int
    verdict: str  # "b", "type2_2", or "tie"
    witness_beta: Fraction
    line_b: Fraction
    line_type2_2: Fraction


def dominance(d: int, l: int) -> DominanceResult:
    if not 0 <= l < d:
        raise BadRange(f"need 0 <= l < d, got (d, l) = ({d}, {l})")
    # Work in units of the capacity sum S (everything scales linearly in S).
    rates = NormalizedRates.from_mapping(d, 0, l, {d: Fraction(1)})
    s = weighted_capacity_sum(rates)
    b = bound_l1_zero(rates)
    t = bound_prior(rates)
    if b.line_value(s) != t.line_value(s):  # both tight at the corner
        raise AssertionError("bounds disagree at the corner point")
    witness = 2 * s
    fb, ft = b.line_value(witness), t.line_value(witness)
    verdict = "tie" if fb == ft else ("b" if fb > ft else "type2_2")
    return DominanceResult(d, l, verdict, witness, fb, ft)


@dataclass(frozen=True)
class RegionRow:
    """One grid row of the exported tradeoff table.

    Floor values are exact; None marks a column that does not apply
    (the split-restricted bound outside its regime) and feasible=False
    marks grid points left of the bandwidth floor.
    """

    beta_bar: Fraction
    feasible: bool
    floor_b4: "Fraction | None"
    floor_type2_2: Fraction
    floor_b: Fraction
    envelope: "Fraction | None"


REGION_COLUMNS = (
    "beta_bar",
    "alpha_floor_B3_marker",
    "alpha_floor_B4",
    "alpha_floor_type2_2",
    "alpha_floor_B",
    "envelope",
)


def region_export(rates: NormalizedRates, grid: Sequence[Fraction]) -> list[RegionRow]:
    """Evaluate every bound's storage floor over a bandwidth grid.

    All columns are always computed from their closed forms so plots can
    show every line, but the envelope only uses bounds valid for the
    instance: the split bound needs l1 <= l2 and the other two storage
    bounds are asserted for l1 = 0 only.
    """
    beta_floor = bound_beta(rates)
    prior = bound_prior(rates)
    lz = bound_l1_zero(rates)
    general = None if rates.l1 > rates.l2 else bound_general(rates)
    rows = []
    for beta in grid:
        beta = Fraction(beta)
        feasible = beta >= beta_floor
        fb4 = None if general is None else general.alpha_floor(beta)
        ft = prior.alpha_floor(beta)
        fb = lz.alpha_floor(beta)
        if not feasible:
            env = None
        else:
            applicable = [Fraction(0)]
            if general is not None:
                applicable.append(fb4)
            if rates.l1 == 0:
                applicable.extend([ft, fb])
            env = max(applicable)
        rows.append(RegionRow(beta, feasible, fb4, ft, fb, env))
    return rows


def region_row_strings(row: RegionRow) -> dict[str, str]:
    """Render one row with rationals as "num/den" strings (CSV/JSON cells)."""

    def frac(v: "Fraction | None") -> str:
        return "n/a" if v is None else str(v)

    return {
        "beta_bar": str(row.beta_bar),
        "alpha_floor_B3_marker": "0" if row.feasible else "inf",
        "alpha_floor_B4": frac(row.floor_b4),
        "alpha_floor_type2_2": str(row.floor_type2_2),
        "alpha_floor_B": str(row.floor_b),
        "envelope": "inf" if row.envelope is None else str(row.envelope),
    }
