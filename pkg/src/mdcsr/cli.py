"""Command-line front end.

Subcommands: encode, repair, recover (against on-disk share files),
audit (secrecy), bounds and region (exact rational tables), and
verify-lemmas (inequality suites).  Exit codes: 0 success or secure,
2 usage or validation failure, 3 property violation (leakage or a
failed inequality).

Every command is deterministic given its inputs: all randomness flows
from the single config seed, per-level sub-seeds are derived by a fixed
labeling scheme, and reports are emitted in a fixed order.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds as bnd
from . import entropy as ent
from . import secrecy as sec
from . import shares as sio
from .errors import MdcError
from .system import (
    NodeShare,
    System,
    SystemParams,
    build_system,
    minimal_file_sizes,
)

CONFIG_KEYS = {"n", "d", "l1", "l2", "p", "files", "seed"}


def load_config(path: Path) -> dict:
    try:
        doc = json.loads(path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MdcError(f"config {path}: {exc}") from exc
    return validate_config(doc, where=str(path))


def validate_config(doc: dict, where: str = "config") -> dict:
    if not isinstance(doc, dict):
        raise MdcError(f"{where}: top level must be an object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise MdcError(f"{where}: unknown keys {sorted(unknown)}")
    missing = CONFIG_KEYS - set(doc)
    if missing:
        raise MdcError(f"{where}: missing keys {sorted(missing)}")
    for key in ("n", "d", "l1", "l2", "p", "seed"):
        if not isinstance(doc[key], int):
            raise MdcError(f"{where}: field {key!r} must be an integer")
    if not 0 <= doc["seed"] < 2**64:
        raise MdcError(f"{where}: seed must be a 64-bit unsigned integer")
    if not isinstance(doc["files"], dict):
        raise MdcError(f"{where}: field 'files' must be an object")
    files: dict[int, int] = {}
    for key, size in doc["files"].items():
        try:
            level = int(key)
        except ValueError as exc:
            raise MdcError(f"{where}: files key {key!r} is not a level") from exc
        if not isinstance(size, int):
            raise MdcError(f"{where}: files[{key}] must be an integer")
        files[level] = size
    doc = dict(doc)
    doc["files"] = {str(j): files[j] for j in sorted(files)}
    return doc


def system_from_config(doc: dict) -> System:
    params = SystemParams.create(
        n=doc["n"],
        d=doc["d"],
        l1=doc["l1"],
        l2=doc["l2"],
        file_sizes={int(j): s for j, s in doc["files"].items()},
        p=doc["p"],
    )
    return build_system(params)


def parse_node_list(text: str) -> list[int]:
    if not text.strip():
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError as exc:
        raise MdcError(f"bad node list {text!r}") from exc


def parse_rates(text: str, d: int, l1: int, l2: int) -> bnd.NormalizedRates:
    lo = l1 + l2 + 1
    parts = text.split(",")
    if len(parts) != d - lo + 1:
        raise MdcError(
            f"--rates needs {d - lo + 1} values for levels {lo}..{d}, got {len(parts)}"
        )
    try:
        values = [Fraction(tok.strip()) for tok in parts]
    except (ValueError, ZeroDivisionError) as exc:
        raise MdcError(f"bad rate vector {text!r}: {exc}") from exc
    return bnd.NormalizedRates.from_mapping(
        d, l1, l2, {lo + idx: v for idx, v in enumerate(values)}
    )


def read_message_file(path: Path, level: int, size: int, p: int) -> tuple[int, ...]:
    """Message bytes as little-endian u16 symbols; values >= p are rejected."""
    blob = path.read_bytes()
    if len(blob) != 2 * size:
        raise MdcError(
            f"level {level}: message file {path} has {len(blob)} bytes, "
            f"expected {2 * size}"
        )
    symbols = struct.unpack(f"<{size}H", blob)
    for v in symbols:
        if v >= p:
            raise MdcError(f"level {level}: symbol value {v} >= modulus {p}")
    return symbols


def symbols_to_bytes(symbols) -> bytes:
    return struct.pack(f"<{len(symbols)}H", *symbols)


def share_path(out_dir: Path, node_id: int) -> Path:
    return out_dir / f"node_{node_id}.mdcs"


def load_shares(out_dir: Path, nodes: list[int]) -> tuple[System, dict, list[NodeShare]]:
    """Read share files, cross-check their configs, rebuild the system."""
    records = []
    for i in nodes:
        path = share_path(out_dir, i)
        if not path.exists():
            raise MdcError(f"missing share file {path}")
        rec = sio.read_share(path)
        if rec.node_id != i:
            raise MdcError(f"{path}: header names node {rec.node_id}, expected {i}")
        records.append(rec)
    doc = validate_config(records[0].params, where="share header")
    for rec, i in zip(records[1:], nodes[1:]):
        if rec.params != records[0].params:
            raise MdcError(f"share {i} was produced under a different config")
    system = system_from_config(doc)
    return system, doc, [rec.to_node_share(system) for rec in records]


def cmd_encode(args) -> int:
    doc = load_config(Path(args.config))
    system = system_from_config(doc)
    given = {}
    for item in args.message or []:
        level_text, _, path = item.partition("=")
        try:
            level = int(level_text)
        except ValueError as exc:
            raise MdcError(f"--message wants LEVEL=PATH, got {item!r}") from exc
        given[level] = Path(path)
    messages = {}
    for j in system.levels:
        if j not in given:
            raise MdcError(f"no --message supplied for level {j}")
        messages[j] = read_message_file(
            given[j], j, system.params.sizes[j], system.modulus.p
        )
    extra = set(given) - set(system.levels)
    if extra:
        raise MdcError(f"--message given for unknown levels {sorted(extra)}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for share in system.encode(messages, doc["seed"]):
        sio.write_share(share_path(out_dir, share.node_id), system, doc, share)
    print(f"wrote {system.params.n} share files to {out_dir}")
    return 0


def cmd_recover(args) -> int:
    nodes = parse_node_list(args.nodes)
    system, _, shares = load_shares(Path(args.out), nodes)
    message = system.recover_file(args.level, shares)
    blob = symbols_to_bytes(message)
    if args.output:
        Path(args.output).write_bytes(blob)
    else:
        sys.stdout.buffer.write(blob)
        sys.stdout.buffer.flush()
    return 0


def default_helpers(out_dir: Path, target: int) -> list[int]:
    """The d lowest-indexed surviving nodes with a share file present."""
    present = sorted(
        int(p.stem.split("_", 1)[1])
        for p in out_dir.glob("node_*.mdcs")
        if p.stem.split("_", 1)[1].isdigit()
    )
    survivors = [i for i in present if i != target]
    if not survivors:
        raise MdcError(f"no share files found in {out_dir}")
    d = sio.read_share(share_path(out_dir, survivors[0])).params.get("d")
    if not isinstance(d, int):
        raise MdcError("share header carries no repair degree")
    return survivors[:d]


def cmd_repair(args) -> int:
    out_dir = Path(args.out)
    if args.helpers is None:
        helpers = default_helpers(out_dir, args.target)
    else:
        helpers = parse_node_list(args.helpers)
    system, doc, shares = load_shares(out_dir, helpers)
    rebuilt = system.repair_node(args.target, shares)
    sio.write_share(share_path(out_dir, args.target), system, doc, rebuilt)
    print(f"restored node_{args.target}.mdcs from helpers {helpers}")
    return 0


def cmd_audit(args) -> int:
    doc = load_config(Path(args.config))
    system = system_from_config(doc)
    if args.exhaustive:
        summary = sec.audit_all(system, args.e1_size, args.e2_size)
    else:
        spec = sec.EavesdropperSpec.of(
            parse_node_list(args.e1), parse_node_list(args.e2)
        )
        report = sec.leakage(sec.observation_of(system, spec))
        compliant = (len(spec.e1), len(spec.e2)) == (doc["l1"], doc["l2"])
        summary = sec.AuditSummary((sec.AuditEntry(spec, report, compliant),))
    out = {
        "params": {k: doc[k] for k in ("n", "d", "l1", "l2", "p")},
        "files": doc["files"],
        "reports": [
            {
                **entry.spec.describe(),
                "h_obs": entry.report.h_obs,
                "h_obs_given_messages": entry.report.h_obs_given_messages,
                "leakage": entry.report.leakage_rank,
                "compliant": entry.compliant,
                "verdict": entry.report.verdict,
            }
            for entry in summary.entries
        ],
        "overall": "secure" if summary.secure else "insecure",
    }
    print(json.dumps(out, indent=2))
    return 0 if summary.secure else 3


def cmd_bounds(args) -> int:
    rates = parse_rates(args.rates, args.d, args.l1, args.l2)
    corner = bnd.mbr_point(rates)
    out: dict = {"beta_floor": str(bnd.bound_beta(rates))}
    if args.l1 <= args.l2:
        out["b4"] = bnd.bound_general(rates).render()
    else:
        out["b4"] = None
        out["b4_reason"] = "split out of regime"
    out["type2_2"] = bnd.bound_prior(rates).render()
    out["mbr"] = [str(corner.alpha_bar), str(corner.beta_bar)]
    if args.sizes:
        sizes = minimal_file_sizes(args.d, args.l1, args.l2, rates.mapping)
        out["min_file_sizes"] = {str(j): sizes[j] for j in sorted(sizes)}
    print(json.dumps(out, indent=2))
    return 0


def cmd_region(args) -> int:
    rates = parse_rates(args.rates, args.d, args.l1, args.l2)
    try:
        grid = [Fraction(tok.strip()) for tok in args.grid.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise MdcError(f"bad grid {args.grid!r}: {exc}") from exc
    rows = [bnd.region_row_strings(r) for r in bnd.region_export(rates, grid)]
    if args.json:
        text = json.dumps({"columns": list(bnd.REGION_COLUMNS), "rows": rows}, indent=2)
    else:
        lines = [",".join(bnd.REGION_COLUMNS)]
        lines.extend(",".join(row[c] for c in bnd.REGION_COLUMNS) for row in rows)
        text = "\n".join(lines)
    if args.output:
        Path(args.output).write_text(text + "\n", "utf-8")
    else:
        print(text)
    return 0


def cmd_verify_lemmas(args) -> int:
    doc = load_config(Path(args.config))
    system = system_from_config(doc)
    if args.corrupt_node is not None:
        system = system.with_corrupted_node(args.corrupt_node)
    results = ent.run_suite(system, args.suite)
    all_ok = True
    for res in results:
        print(json.dumps(res.describe()))
        all_ok = all_ok and res.satisfied
    return 0 if all_ok else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdcsr",
        description="Secure multilevel storage codes: encode, repair, audit, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode message files into share files")
    p.add_argument("--config", required=True, help="JSON config path")
    p.add_argument(
        "--message",
        action="append",
        metavar="LEVEL=PATH",
        help="message file for one level (repeatable)",
    )
    p.add_argument("--out", required=True, help="output directory for share files")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("recover", help="decode one level file from shares")
    p.add_argument("--out", required=True, help="directory holding share files")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--nodes", required=True, help="comma-separated node ids")
    p.add_argument("--output", help="write message bytes here (default stdout)")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("repair", help="regenerate one node's share file")
    p.add_argument("--out", required=True, help="directory holding share files")
    p.add_argument("--target", type=int, required=True)
    p.add_argument(
        "--helpers",
        default=None,
        help="comma-separated helper ids (default: the d lowest-indexed survivors)",
    )
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("audit", help="compute exact leakage of eavesdropper sets")
    p.add_argument("--config", required=True)
    p.add_argument("--exhaustive", action="store_true", help="audit all disjoint pairs")
    p.add_argument("--e1-size", type=int, default=None, help="override |E1| (exhaustive)")
    p.add_argument("--e2-size", type=int, default=None, help="override |E2| (exhaustive)")
    p.add_argument("--e1", default="", help="explicit type I nodes, comma-separated")
    p.add_argument("--e2", default="", help="explicit type II nodes, comma-separated")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bounds", help="evaluate the outer bounds for a rate vector")
    p.add_argument("--n", type=int, default=None, help="accepted, not used by bounds")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--rates", required=True, help="levels l+1..d, e.g. 0,1/3,2/3")
    p.add_argument(
        "--sizes",
        action="store_true",
        help="also emit the minimal integer file sizes realizing the rates",
    )
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("region", help="export the tradeoff table on a bandwidth grid")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--l1", type=int, required=True)
    p.add_argument("--l2", type=int, required=True)
    p.add_argument("--rates", required=True)
    p.add_argument("--grid", required=True, help="comma-separated beta values")
    p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    p.add_argument("--output", help="write table here (default stdout)")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("verify-lemmas", help="run inequality suites on a built system")
    p.add_argument("--config", required=True)
    p.add_argument(
        "--suite",
        required=True,
        choices=("all",) + ent.SUITES,
    )
    p.add_argument(
        "--corrupt-node",
        type=int,
        default=None,
        help="zero one node's evaluation row first (negative control)",
    )
    p.set_defaults(func=cmd_verify_lemmas)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except MdcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
