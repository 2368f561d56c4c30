import random

import pytest

from rigging.errors import EncodingError, UnknownReference
from rigging.graph import TwistStore
from rigging.scenarios import build_scenario
from rigging.serialize import (
    decode_rig,
    decode_rig_file,
    encode_rig,
    encode_rig_file,
)

NAMES = ["half-hitch", "spliced-chain(3)", "lashed(3)", "custody-transfer", "double-spend"]


@pytest.mark.parametrize("name", NAMES)
def test_round_trip(name):
    sc = build_scenario(name)
    for rig in sc.rigs.values():
        data = encode_rig(rig)
        back = decode_rig(data, sc.store)
        assert back == rig
        assert encode_rig(back) == data


@pytest.mark.parametrize("embed", [False, True])
def test_file_round_trip(embed):
    sc = build_scenario("lashed(2)")
    rig = sc.rigs["tower"]
    data = encode_rig_file(rig, embed=embed)
    assert data[:4] == b"RIG1"
    back = decode_rig_file(data, sc.store if not embed else None)
    assert encode_rig_file(back, embed=embed) == data


def test_embedded_needs_no_store():
    sc = build_scenario("custody-transfer")
    rig = sc.rigs["transfer"]
    assert decode_rig_file(encode_rig_file(rig, embed=True)) == rig


def test_detached_missing_twist():
    sc = build_scenario("half-hitch")
    data = encode_rig_file(sc.rigs["half-hitch"])
    with pytest.raises(UnknownReference):
        decode_rig_file(data, TwistStore())


@pytest.mark.parametrize(
    "patch",
    [
        lambda d: b"RIG2" + d[4:],
        lambda d: d[:4] + b"\x02" + d[5:],
        lambda d: d[:5] + b"\x07" + d[6:],
        lambda d: d + b"\x00",
        lambda d: d[:-1],
    ],
)
def test_header_and_framing_strict(patch):
    sc = build_scenario("spliced-chain(2)")
    data = encode_rig_file(sc.rigs["chain"])
    with pytest.raises((EncodingError, UnknownReference)):
        decode_rig_file(patch(data), sc.store)


def test_embedded_order_and_unreferenced():
    sc = build_scenario("half-hitch")
    rig = sc.rigs["half-hitch"]
    twists = sorted(rig.twists.values(), key=lambda t: t.ref.digest)
    body = encode_rig(rig)
    swapped = b"RIG1\x01\x01" + len(twists).to_bytes(4, "big") + b"".join(
        t.encode() for t in [twists[1], twists[0]] + twists[2:]) + body
    with pytest.raises(EncodingError):
        decode_rig_file(swapped)
    extra = list(twists) + [sc.store[next(iter(sc.store))]]
    padded = b"RIG1\x01\x01" + (len(twists) + 1).to_bytes(4, "big") + b"".join(
        t.encode() for t in sorted(extra, key=lambda t: t.ref.digest)) + body
    with pytest.raises(EncodingError):
        decode_rig_file(padded)


def test_random_byte_mutations_never_decode_equal():
    sc = build_scenario("spliced-chain(2)")
    rig = sc.rigs["chain"]
    data = encode_rig_file(rig)
    rng = random.Random(1)
    for _ in range(300):
        raw = bytearray(data)
        i = rng.randrange(len(raw))
        raw[i] ^= rng.randrange(1, 256)
        try:
            back = decode_rig_file(bytes(raw), sc.store)
        except (EncodingError, UnknownReference):
            continue
        assert back != rig
