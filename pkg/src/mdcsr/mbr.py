"""One secure product-matrix level code at the minimum-bandwidth point.

A level code with parameters (n, k, d, l) stores, per stripe, the row
psi_i^T M at node i, where psi_i = (1, x_i, ..., x_i^(d-1)) and M is a
d x d symmetric matrix whose bottom-right (d-k) x (d-k) block is zero.
The free upper-triangle cells of M number level_capacity(d, k, 0); the
cells in rows 1..l hold uniformly random key symbols and the remaining
level_capacity(d, k, l) cells hold message symbols.

Repair of node i downloads one symbol psi_h^T M psi_i per helper h (the
value does not depend on which repair group contains the helper), and
any d such symbols determine M psi_i, which is the lost row.  Any k
shares determine all free cells of M by a two-stage solve: the right
block first, then the symmetric left block.

Whether the key placement actually hides the messages is never assumed
here; the secrecy module re-derives it from coefficient ranks.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .bounds import level_capacity
from .errors import (
    BadParameters,
    LengthMismatch,
    SelfRepair,
    WrongHelperCount,
    WrongShareCount,
)
from .galois import FieldMatrix, FieldModulus, cached_vandermonde, modulus_of


@dataclass(frozen=True)
class MatrixLayout:
    """Deterministic cell bookkeeping for the symmetric message matrix.

    Cells are 0-based (r, c) with r <= c, enumerated row-major over the
    upper triangle, skipping the zero block (r >= k and c >= k).  Key
    cells are exactly the free cells with r < l.
    """

    d: int
    k: int
    l: int
    cell_order: tuple[tuple[int, int], ...]
    key_cells: tuple[tuple[int, int], ...]
    message_cells: tuple[tuple[int, int], ...]


@lru_cache(maxsize=None)
def matrix_layout(d: int, k: int, l: int) -> MatrixLayout:
    cells = [
        (r, c)
        for r in range(d)
        for c in range(r, d)
        if not (r >= k and c >= k)
    ]
    keys = tuple((r, c) for (r, c) in cells if r < l)
    msgs = tuple((r, c) for (r, c) in cells if r >= l)
    layout = MatrixLayout(d, k, l, tuple(cells), keys, msgs)
    assert len(keys) + len(msgs) == level_capacity(d, k, 0)
    assert len(msgs) == level_capacity(d, k, l)
    return layout


class KeyStream:
    """Deterministic uniform field symbols from a SHA-256 counter.

    Draw i of the stream hashes (domain tag || seed as 8 LE bytes ||
    label || counter as 8 LE bytes) and splits the digest into 8-byte
    words; words are rejected above the largest multiple of p so symbols
    are exactly uniform.  The construction is stable across runs,
    platforms, and interpreter versions.
    """

    _DOMAIN = b"mdcsr-key-v1"

    def __init__(self, seed: int, label: bytes = b"") -> None:
        if not 0 <= seed < 2**64:
            raise BadParameters(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._prefix = self._DOMAIN + seed.to_bytes(8, "little") + label
        self._counter = 0
        self._words: list[int] = []

    def _refill(self) -> None:
        digest = hashlib.sha256(
            self._prefix + self._counter.to_bytes(8, "little")
        ).digest()
        self._counter += 1
        self._words = [
            int.from_bytes(digest[i : i + 8], "little") for i in range(0, 32, 8)
        ]

    def draw(self, p: int) -> int:
        limit = (2**64 // p) * p
        while True:
            if not self._words:
                self._refill()
            word = self._words.pop()
            if word < limit:
                return word % p


@dataclass(frozen=True)
class LevelCodeSpec:
    """Parameters of one (n, k, d, l) level code over GF(p).

    Evaluation points are fixed to 1..n for reproducibility; any distinct
    nonzero points would do.
    """

    n: int
    k: int
    d: int
    l: int
    modulus: FieldModulus
    eval_points: tuple[int, ...]
    stripes: int

    @property
    def layout(self) -> MatrixLayout:
        return matrix_layout(self.d, self.k, self.l)

    @property
    def message_count(self) -> int:
        """Message symbols per stripe."""
        return len(self.layout.message_cells)

    @property
    def key_count(self) -> int:
        """Key symbols per stripe."""
        return len(self.layout.key_cells)

    @property
    def alpha(self) -> int:
        """Stored symbols per node (d per stripe)."""
        return self.d * self.stripes

    @property
    def beta(self) -> int:
        """Repair symbols per helper (1 per stripe)."""
        return self.stripes

    def psi(self, node_id: int) -> tuple[int, ...]:
        """Width-d evaluation row of a node (1-based id)."""
        if not 1 <= node_id <= self.n:
            raise BadParameters(f"node id {node_id} outside [1:{self.n}]")
        vm = cached_vandermonde(self.eval_points, self.d, self.modulus.p)
        return vm.row(node_id - 1)


@dataclass(frozen=True)
class NodeVector:
    """The stored content of one node at one level, stripe-major."""

    node_id: int
    symbols: tuple[int, ...]

    def stripe(self, s: int, d: int) -> tuple[int, ...]:
        return self.symbols[s * d : (s + 1) * d]


@dataclass(frozen=True)
class RepairSymbol:
    """One downloaded repair symbol (helper -> target, one stripe)."""

    helper: int
    target: int
    stripe: int
    value: int

    def __post_init__(self) -> None:
        if self.helper == self.target:
            raise SelfRepair(f"node {self.target} cannot help repair itself")


def build_level_code(
    n: int,
    k: int,
    d: int,
    l: int,
    p: "int | FieldModulus",
    stripes: int = 1,
) -> LevelCodeSpec:
    """Validate parameters and fix evaluation points to 1..n."""
    modulus = modulus_of(p)
    if l < 0:
        raise BadParameters(f"l >= 0 violated: l = {l}")
    if not l < k:
        raise BadParameters(f"l < k violated: l = {l}, k = {k}")
    if not k <= d:
        raise BadParameters(f"k <= d violated: k = {k}, d = {d}")
    if not d < n:
        raise BadParameters(f"d < n violated: d = {d}, n = {n}")
    if not n <= modulus.p - 1:
        raise BadParameters(f"n <= p - 1 violated: n = {n}, p = {modulus.p}")
    if stripes < 1:
        raise BadParameters(f"stripes >= 1 violated: stripes = {stripes}")
    return LevelCodeSpec(
        n=n,
        k=k,
        d=d,
        l=l,
        modulus=modulus,
        eval_points=tuple(range(1, n + 1)),
        stripes=stripes,
    )


def _message_matrix(
    spec: LevelCodeSpec, message: Sequence[int], keys: Sequence[int]
) -> list[list[int]]:
    """Assemble the full symmetric d x d matrix for one stripe."""
    d = spec.d
    m = [[0] * d for _ in range(d)]
    for (r, c), v in zip(spec.layout.message_cells, message):
        m[r][c] = v
        m[c][r] = v
    for (r, c), v in zip(spec.layout.key_cells, keys):
        m[r][c] = v
        m[c][r] = v
    return m


def encode_level(
    spec: LevelCodeSpec,
    message: Sequence[int],
    seed: int,
    label: bytes = b"",
) -> tuple[NodeVector, ...]:
    """Encode message symbols into n node vectors, keys drawn from seed.

    The message is consumed stripe by stripe, message_count symbols per
    stripe, each stripe filling its message cells in cell order.  Key
    cells are filled from the KeyStream in the same stripe-major order.
    """
    p = spec.modulus.p
    want = spec.message_count * spec.stripes
    if len(message) != want:
        raise LengthMismatch(f"expected {want} message symbols, got {len(message)}")
    for v in message:
        if not 0 <= v < p:
            raise BadParameters(f"message symbol {v} outside [0, {p - 1}]")
    stream = KeyStream(seed, label)
    vm = cached_vandermonde(spec.eval_points, spec.d, p)
    per_node: list[list[int]] = [[] for _ in range(spec.n)]
    mc = spec.message_count
    for s in range(spec.stripes):
        keys = [stream.draw(p) for _ in range(spec.key_count)]
        m = _message_matrix(spec, message[s * mc : (s + 1) * mc], keys)
        for i in range(spec.n):
            psi = vm.row(i)
            for q in range(spec.d):
                per_node[i].append(sum(psi[r] * m[r][q] for r in range(spec.d)) % p)
    return tuple(
        NodeVector(node_id=i + 1, symbols=tuple(per_node[i])) for i in range(spec.n)
    )


def repair_symbol(
    spec: LevelCodeSpec, helper_share: NodeVector, target: int
) -> tuple[RepairSymbol, ...]:
    """One repair symbol per stripe: the helper row dotted with psi_target."""
    if helper_share.node_id == target:
        raise SelfRepair(f"node {target} cannot help repair itself")
    p = spec.modulus.p
    psi_t = spec.psi(target)
    out = []
    for s in range(spec.stripes):
        row = helper_share.stripe(s, spec.d)
        value = sum(a * b for a, b in zip(row, psi_t)) % p
        out.append(
            RepairSymbol(helper=helper_share.node_id, target=target, stripe=s, value=value)
        )
    return tuple(out)


def regenerate_node(
    spec: LevelCodeSpec, packets: Iterable[RepairSymbol], target: int
) -> NodeVector:
    """Rebuild the lost node vector from d helpers' repair symbols.

    Needs exactly d distinct helpers, the same set on every stripe.  The
    d x d evaluation system is invertible for valid points, so a singular
    solve here indicates an internal fault, not a caller error.
    """
    by_stripe: dict[int, dict[int, int]] = {}
    helpers: set[int] = set()
    for pkt in packets:
        if pkt.target != target:
            raise BadParameters(f"packet targets node {pkt.target}, expected {target}")
        stripe = by_stripe.setdefault(pkt.stripe, {})
        if pkt.helper in stripe:
            raise WrongHelperCount(f"duplicate packet from helper {pkt.helper}")
        stripe[pkt.helper] = pkt.value
        helpers.add(pkt.helper)
    if len(helpers) != spec.d:
        raise WrongHelperCount(f"need exactly {spec.d} helpers, got {len(helpers)}")
    if set(by_stripe) != set(range(spec.stripes)):
        raise WrongHelperCount("packets must cover every stripe")
    for s, got in by_stripe.items():
        if set(got) != helpers:
            raise WrongHelperCount(f"stripe {s} has a different helper set")
    ordered = sorted(helpers)
    points = tuple(spec.eval_points[h - 1] for h in ordered)
    a = cached_vandermonde(points, spec.d, spec.modulus.p)
    symbols: list[int] = []
    for s in range(spec.stripes):
        b = FieldMatrix.from_rows([[by_stripe[s][h]] for h in ordered], spec.modulus)
        y = a.solve(b)  # y = M psi_target; the stored row is its transpose
        symbols.extend(y.at(r, 0) for r in range(spec.d))
    return NodeVector(node_id=target, symbols=tuple(symbols))


def collect_level(
    spec: LevelCodeSpec, shares: Sequence[NodeVector]
) -> tuple[int, ...]:
    """Recover the message symbols from any k distinct shares.

    Stage one inverts the k x k evaluation block against the right block
    of the stored rows to get the rectangular part of M; stage two
    removes its reflected contribution and solves for the symmetric
    part.  Key cells are recovered too but discarded.
    """
    ids = [sh.node_id for sh in shares]
    if len(ids) != spec.k or len(set(ids)) != spec.k:
        raise WrongShareCount(f"need exactly {spec.k} distinct shares, got {ids}")
    p = spec.modulus.p
    k, d = spec.k, spec.d
    points = tuple(spec.eval_points[i - 1] for i in ids)
    phi = cached_vandermonde(points, k, p)
    full = cached_vandermonde(points, d, p)
    delta_rows = [full.row(i)[k:] for i in range(k)]  # powers x^k .. x^(d-1)
    out: list[int] = []
    for s in range(spec.stripes):
        rows = [sh.stripe(s, d) for sh in shares]
        right = FieldMatrix.from_rows([r[k:] for r in rows], spec.modulus)
        t_block = (
            phi.solve(right).to_rows() if d > k else [[] for _ in range(k)]
        )  # k x (d-k)
        adj = []
        for i in range(k):
            drow = delta_rows[i]
            adj.append(
                [
                    (rows[i][c] - sum(drow[u] * t_block[c][u] for u in range(d - k))) % p
                    for c in range(k)
                ]
            )
        s_block = phi.solve(FieldMatrix.from_rows(adj, spec.modulus)).to_rows()
        for r, c in spec.layout.message_cells:
            out.append(s_block[r][c] if c < k else t_block[r][c - k])
    return tuple(out)


@lru_cache(maxsize=None)
def _cell_column(spec: LevelCodeSpec) -> dict[tuple[int, int], tuple[bool, int]]:
    """Map each free cell to (is_message, index within its group)."""
    table: dict[tuple[int, int], tuple[bool, int]] = {}
    for idx, cell in enumerate(spec.layout.message_cells):
        table[cell] = (True, idx)
    for idx, cell in enumerate(spec.layout.key_cells):
        table[cell] = (False, idx)
    return table


def stored_functional(
    spec: LevelCodeSpec, psi: Sequence[int], stripe: int, position: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Coefficients of one stored symbol over (message, key) columns.

    Columns are stripe-major within each group, matching the symbol
    order of encode_level.  The psi row is passed explicitly so callers
    can substitute a zeroed row for corrupted-node controls.
    """
    p = spec.modulus.p
    msg = [0] * (spec.message_count * spec.stripes)
    key = [0] * (spec.key_count * spec.stripes)
    for (r, c), (is_msg, idx) in _cell_column(spec).items():
        if r == c:
            coeff = psi[r] if position == r else 0
        else:
            coeff = (psi[r] if position == c else 0) + (psi[c] if position == r else 0)
        coeff %= p
        if coeff:
            target = msg if is_msg else key
            per = spec.message_count if is_msg else spec.key_count
            target[stripe * per + idx] = coeff
    return tuple(msg), tuple(key)


def repair_functional(
    spec: LevelCodeSpec, psi_helper: Sequence[int], psi_target: Sequence[int], stripe: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Coefficients of one repair symbol psi_h^T M psi_t over (message, key)."""
    p = spec.modulus.p
    msg = [0] * (spec.message_count * spec.stripes)
    key = [0] * (spec.key_count * spec.stripes)
    for (r, c), (is_msg, idx) in _cell_column(spec).items():
        if r == c:
            coeff = psi_helper[r] * psi_target[r]
        else:
            coeff = psi_helper[r] * psi_target[c] + psi_helper[c] * psi_target[r]
        coeff %= p
        if coeff:
            target = msg if is_msg else key
            per = spec.message_count if is_msg else spec.key_count
            target[stripe * per + idx] = coeff
    return tuple(msg), tuple(key)
