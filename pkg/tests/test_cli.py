import itertools
import json
import struct

import pytest

from mdcsr import shares as sio
from mdcsr.cli import main
from mdcsr.errors import ShareFormatError

FIG_CONFIG = {
    "n": 4,
    "d": 3,
    "l1": 0,
    "l2": 0,
    "p": 257,
    "files": {"2": 15, "3": 30},
    "seed": 1234,
}
SPLIT_CONFIG = {
    "n": 5,
    "d": 4,
    "l1": 1,
    "l2": 1,
    "p": 257,
    "files": {"3": 2, "4": 3},
    "seed": 77,
}
LEMMA_CONFIG = {
    "n": 4,
    "d": 3,
    "l1": 0,
    "l2": 0,
    "p": 257,
    "files": {"1": 3, "2": 5, "3": 6},
    "seed": 9,
}


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def pack(values):
    return struct.pack(f"<{len(values)}H", *values)


@pytest.fixture()
def encoded_dir(tmp_path):
    cfg = write_json(tmp_path / "cfg.json", FIG_CONFIG)
    m2 = tmp_path / "m2.bin"
    m3 = tmp_path / "m3.bin"
    m2.write_bytes(pack(range(1, 16)))
    m3.write_bytes(pack(range(200, 230)))
    out = tmp_path / "shares"
    rc = main(
        ["encode", "--config", cfg, "--out", str(out),
         "--message", f"2={m2}", "--message", f"3={m3}"]
    )
    assert rc == 0
    return tmp_path, out


def test_encode_writes_all_share_files(encoded_dir):
    tmp, out = encoded_dir
    files = sorted(p.name for p in out.glob("*.mdcs"))
    assert files == [f"node_{i}.mdcs" for i in range(1, 5)]
    rec = sio.read_share(out / "node_1.mdcs")
    assert rec.node_id == 1
    assert len(rec.symbols) == 24  # alpha
    assert rec.stripe_plan == {2: 3, 3: 5}


def test_encode_is_byte_deterministic(encoded_dir, tmp_path):
    tmp, out = encoded_dir
    cfg = write_json(tmp_path / "cfg2.json", FIG_CONFIG)
    m2 = tmp_path / "n2.bin"
    m3 = tmp_path / "n3.bin"
    m2.write_bytes(pack(range(1, 16)))
    m3.write_bytes(pack(range(200, 230)))
    out2 = tmp_path / "again"
    rc = main(
        ["encode", "--config", cfg, "--out", str(out2),
         "--message", f"2={m2}", "--message", f"3={m3}"]
    )
    assert rc == 0
    for i in range(1, 5):
        assert (out / f"node_{i}.mdcs").read_bytes() == (
            out2 / f"node_{i}.mdcs"
        ).read_bytes()


def test_recover_round_trip_every_subset(encoded_dir, capsysbinary):
    tmp, out = encoded_dir
    for level, expect in ((2, pack(range(1, 16))), (3, pack(range(200, 230)))):
        for subset in itertools.combinations("1234", level):
            rc = main(
                ["recover", "--out", str(out), "--level", str(level),
                 "--nodes", ",".join(subset)]
            )
            assert rc == 0
            assert capsysbinary.readouterr().out == expect


def test_recover_validation_exits_2(encoded_dir, capsys):
    tmp, out = encoded_dir
    assert main(["recover", "--out", str(out), "--level", "2", "--nodes", "1,2,3"]) == 2
    assert main(["recover", "--out", str(out), "--level", "9", "--nodes", "1,2,3"]) == 2
    assert "error:" in capsys.readouterr().err


def test_repair_restores_byte_identical_file(encoded_dir):
    tmp, out = encoded_dir
    original = (out / "node_1.mdcs").read_bytes()
    (out / "node_1.mdcs").unlink()
    rc = main(["repair", "--out", str(out), "--target", "1", "--helpers", "2,3,4"])
    assert rc == 0
    assert (out / "node_1.mdcs").read_bytes() == original
    # idempotent when the target is still present
    rc = main(["repair", "--out", str(out), "--target", "1", "--helpers", "2,3,4"])
    assert rc == 0
    assert (out / "node_1.mdcs").read_bytes() == original


def test_repair_with_too_few_helpers_exits_2(encoded_dir, capsys):
    tmp, out = encoded_dir
    assert main(["repair", "--out", str(out), "--target", "1", "--helpers", "2,3"]) == 2
    capsys.readouterr()


def test_repair_defaults_to_lowest_indexed_survivors(encoded_dir, capsys):
    tmp, out = encoded_dir
    original = (out / "node_2.mdcs").read_bytes()
    (out / "node_2.mdcs").unlink()
    rc = main(["repair", "--out", str(out), "--target", "2"])
    assert rc == 0
    assert "helpers [1, 3, 4]" in capsys.readouterr().out
    assert (out / "node_2.mdcs").read_bytes() == original


def test_encode_rejects_wrong_length_and_large_symbols(tmp_path, capsys):
    cfg = write_json(tmp_path / "cfg.json", FIG_CONFIG)
    short = tmp_path / "short.bin"
    short.write_bytes(pack(range(14)))
    ok3 = tmp_path / "m3.bin"
    ok3.write_bytes(pack(range(30)))
    rc = main(
        ["encode", "--config", cfg, "--out", str(tmp_path / "o"),
         "--message", f"2={short}", "--message", f"3={ok3}"]
    )
    assert rc == 2
    big = tmp_path / "big.bin"
    big.write_bytes(pack([300] * 15))  # 300 >= p = 257: reject, never wrap
    rc = main(
        ["encode", "--config", cfg, "--out", str(tmp_path / "o"),
         "--message", f"2={big}", "--message", f"3={ok3}"]
    )
    assert rc == 2
    assert "symbol value" in capsys.readouterr().err


def test_config_validation(tmp_path, capsys):
    doc = dict(FIG_CONFIG)
    doc["extra"] = 1
    cfg = write_json(tmp_path / "bad.json", doc)
    assert main(["audit", "--config", cfg, "--exhaustive"]) == 2
    assert "unknown keys" in capsys.readouterr().err
    doc = {k: v for k, v in FIG_CONFIG.items() if k != "seed"}
    cfg = write_json(tmp_path / "missing.json", doc)
    assert main(["audit", "--config", cfg, "--exhaustive"]) == 2
    capsys.readouterr()


def test_audit_exhaustive_and_negative_control(tmp_path, capsys):
    cfg = write_json(tmp_path / "cfg.json", SPLIT_CONFIG)
    rc = main(["audit", "--config", cfg, "--exhaustive"])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert len(doc["reports"]) == 20
    assert doc["overall"] == "secure"
    assert all(r["leakage"] == 0 and r["compliant"] for r in doc["reports"])
    rc = main(
        ["audit", "--config", cfg, "--exhaustive", "--e1-size", "1", "--e2-size", "2"]
    )
    doc = json.loads(capsys.readouterr().out)
    assert rc == 3
    assert doc["overall"] == "insecure"
    assert all(not r["compliant"] for r in doc["reports"])


def test_audit_explicit_pair(tmp_path, capsys):
    cfg = write_json(tmp_path / "cfg.json", SPLIT_CONFIG)
    rc = main(["audit", "--config", cfg, "--e1", "1", "--e2", "5"])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0 and doc["reports"][0]["e1"] == [1]
    rc = main(["audit", "--config", cfg, "--e1", "", "--e2", ""])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0 and doc["reports"][0]["h_obs"] == 0
    assert main(["audit", "--config", cfg, "--e1", "1", "--e2", "1"]) == 2
    capsys.readouterr()


def test_bounds_fig1_exact(capsys):
    rc = main(["bounds", "--n", "4", "--d", "3", "--l1", "0", "--l2", "0",
               "--rates", "0,1/3,2/3"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {
        "beta_floor": "8/45",
        "b4": "alpha + 3*beta >= 16/15",
        "type2_2": "alpha + 9*beta >= 32/15",
        "mbr": ["8/15", "8/45"],
    }


def test_bounds_emits_minimal_sizes_on_request(capsys):
    rc = main(["bounds", "--d", "3", "--l1", "0", "--l2", "0",
               "--rates", "0,1/3,2/3", "--sizes"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["min_file_sizes"] == {"2": 15, "3": 30}


def test_bounds_out_of_regime_split(capsys):
    rc = main(["bounds", "--d", "4", "--l1", "2", "--l2", "1", "--rates", "1"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["b4"] is None
    assert doc["b4_reason"] == "split out of regime"


def test_bounds_rejects_bad_rates(capsys):
    assert main(["bounds", "--d", "3", "--l1", "0", "--l2", "0",
                 "--rates", "1/3,2/3"]) == 2
    assert main(["bounds", "--d", "3", "--l1", "0", "--l2", "0",
                 "--rates", "0,1/3,1/3"]) == 2
    capsys.readouterr()


def test_region_csv_and_json(tmp_path, capsys):
    args = ["region", "--d", "3", "--l1", "0", "--l2", "0",
            "--rates", "0,1/3,2/3", "--grid", "8/45,16/45"]
    rc = main(args)
    lines = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert lines[0] == (
        "beta_bar,alpha_floor_B3_marker,alpha_floor_B4,"
        "alpha_floor_type2_2,alpha_floor_B,envelope"
    )
    assert lines[1].split(",")[0] == "8/45"
    assert lines[1].split(",")[-1] == "8/15"
    assert lines[2].split(",")[-1] == "0"
    rc = main(args + ["--json"])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert doc["rows"][0]["envelope"] == "8/15"
    out = tmp_path / "table.csv"
    assert main(args + ["--output", str(out)]) == 0
    assert out.read_text().splitlines()[1].endswith("8/15")


def test_verify_lemmas_suites(tmp_path, capsys):
    cfg = write_json(tmp_path / "cfg.json", LEMMA_CONFIG)
    rc = main(["verify-lemmas", "--config", cfg, "--suite", "all"])
    lines = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    docs = [json.loads(line) for line in lines]
    assert all(d["satisfied"] for d in docs)
    assert {"lemma1", "exchange1", "coro1", "coro2", "exchange2", "prop1", "symmetry"} <= {
        d["name"] for d in docs
    }
    rc = main(["verify-lemmas", "--config", cfg, "--suite", "symmetry",
               "--corrupt-node", "2"])
    capsys.readouterr()
    assert rc == 3


def test_verify_lemmas_unknown_suite_exits_2(tmp_path, capsys):
    cfg = write_json(tmp_path / "cfg.json", LEMMA_CONFIG)
    assert main(["verify-lemmas", "--config", cfg, "--suite", "bogus"]) == 2
    capsys.readouterr()


def test_verify_lemmas_requires_square_system(tmp_path, capsys):
    doc = dict(LEMMA_CONFIG)
    doc["n"] = 5
    cfg = write_json(tmp_path / "cfg.json", doc)
    assert main(["verify-lemmas", "--config", cfg, "--suite", "lemma1"]) == 2
    capsys.readouterr()


def test_share_format_guards(encoded_dir, tmp_path):
    tmp, out = encoded_dir
    blob = (out / "node_1.mdcs").read_bytes()
    bad = tmp_path / "bad.mdcs"
    bad.write_bytes(b"XXXX" + blob[4:])
    with pytest.raises(ShareFormatError):
        sio.read_share(bad)
    bad.write_bytes(blob[:4] + b"\x02" + blob[5:])
    with pytest.raises(ShareFormatError):
        sio.read_share(bad)
    bad.write_bytes(blob[:-2])  # truncated payload
    with pytest.raises(ShareFormatError):
        sio.read_share(bad)
    bad.write_bytes(blob[:-2] + struct.pack("<H", 300))  # symbol >= p
    with pytest.raises(ShareFormatError):
        sio.read_share(bad)


def test_share_header_layout(encoded_dir):
    tmp, out = encoded_dir
    blob = (out / "node_2.mdcs").read_bytes()
    assert blob[:4] == b"MDCS" and blob[4] == 1
    (header_len,) = struct.unpack("<I", blob[5:9])
    header = json.loads(blob[9 : 9 + header_len])
    assert header["node_id"] == 2
    assert header["params"]["files"] == {"2": 15, "3": 30}
    assert len(blob) - 9 - header_len == 2 * 24  # alpha symbols, 2 bytes each
