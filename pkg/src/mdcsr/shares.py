"""On-disk share files.

Layout, all little-endian:

    bytes 0..3   magic "MDCS"
    byte  4      version, 0x01
    bytes 5..8   header length (u32)
    header       UTF-8 JSON {node_id, params, stripe_plan, level_offsets}
    payload      symbols as u16, level-major then stripe-major then position

The params object echoes the full configuration document, so any share
alone suffices to rebuild the system and regenerate its peers, and the
prime bound p < 2^16 guarantees the 2-byte symbol width.  Headers are
serialized canonically (sorted keys, no whitespace), which makes a
repaired file byte-identical to the lost original.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

from .errors import ShareFormatError
from .mbr import NodeVector
from .system import NodeShare, System

MAGIC = b"MDCS"
VERSION = 1


def canonical_json(doc: dict) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def pack_symbols(symbols) -> bytes:
    return struct.pack(f"<{len(symbols)}H", *symbols)


def unpack_symbols(payload: bytes) -> tuple[int, ...]:
    if len(payload) % 2:
        raise ShareFormatError("payload length is odd")
    return struct.unpack(f"<{len(payload) // 2}H", payload)


def share_header(system: System, config_doc: dict, node_id: int) -> dict:
    offsets: dict[str, int] = {}
    at = 0
    for j in system.levels:
        offsets[str(j)] = at
        at += system.specs[j].alpha
    return {
        "node_id": node_id,
        "params": config_doc,
        "stripe_plan": {str(j): system.stripes[j] for j in system.levels},
        "level_offsets": offsets,
    }


def share_bytes(system: System, config_doc: dict, share: NodeShare) -> bytes:
    header = canonical_json(share_header(system, config_doc, share.node_id))
    return (
        MAGIC
        + bytes([VERSION])
        + struct.pack("<I", len(header))
        + header
        + pack_symbols(share.symbols)
    )


def write_share(path: Path, system: System, config_doc: dict, share: NodeShare) -> None:
    path.write_bytes(share_bytes(system, config_doc, share))


@dataclass(frozen=True)
class ShareRecord:
    """A parsed share file: header fields plus the raw symbol sequence."""

    node_id: int
    params: dict
    stripe_plan: dict[int, int]
    level_offsets: dict[int, int]
    symbols: tuple[int, ...]

    def to_node_share(self, system: System) -> NodeShare:
        expected_plan = {j: system.stripes[j] for j in system.levels}
        if self.stripe_plan != expected_plan:
            raise ShareFormatError(
                f"stripe plan {self.stripe_plan} disagrees with config-derived "
                f"{expected_plan}"
            )
        segments = []
        at = 0
        for j in system.levels:
            if self.level_offsets.get(j) != at:
                raise ShareFormatError(
                    f"level {j} offset {self.level_offsets.get(j)} is not "
                    f"the canonical {at}"
                )
            seg = self.symbols[at : at + system.specs[j].alpha]
            segments.append((j, NodeVector(self.node_id, tuple(seg))))
            at += system.specs[j].alpha
        return NodeShare(self.node_id, tuple(segments))


def read_share(path: Path) -> ShareRecord:
    blob = path.read_bytes()
    if blob[:4] != MAGIC:
        raise ShareFormatError(f"{path}: bad magic {blob[:4]!r}")
    if len(blob) < 9:
        raise ShareFormatError(f"{path}: truncated file")
    if blob[4] != VERSION:
        raise ShareFormatError(f"{path}: unsupported version {blob[4]}")
    (header_len,) = struct.unpack("<I", blob[5:9])
    header_end = 9 + header_len
    if len(blob) < header_end:
        raise ShareFormatError(f"{path}: truncated header")
    try:
        header = json.loads(blob[9:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ShareFormatError(f"{path}: bad header: {exc}") from exc
    for key in ("node_id", "params", "stripe_plan", "level_offsets"):
        if key not in header:
            raise ShareFormatError(f"{path}: header missing {key!r}")
    symbols = unpack_symbols(blob[header_end:])
    p = header["params"].get("p")
    d = header["params"].get("d")
    if not isinstance(p, int) or not isinstance(d, int):
        raise ShareFormatError(f"{path}: header params carry no modulus or degree")
    alpha = d * sum(header["stripe_plan"].values())
    if len(symbols) != alpha:
        raise ShareFormatError(
            f"{path}: payload has {len(symbols)} symbols, expected {alpha}"
        )
    for v in symbols:
        if v >= p:
            raise ShareFormatError(f"{path}: symbol {v} >= modulus {p}")
    return ShareRecord(
        node_id=header["node_id"],
        params=header["params"],
        stripe_plan={int(k): v for k, v in header["stripe_plan"].items()},
        level_offsets={int(k): v for k, v in header["level_offsets"].items()},
        symbols=symbols,
    )
