import json
import socket

import pytest

from rigging.cli import main
from rigging.encoding import HashRef


@pytest.fixture(autouse=True)
def no_network(monkeypatch):
    def refuse(*args, **kwargs):
        raise AssertionError("network access attempted")

    monkeypatch.setattr(socket, "socket", refuse)
    monkeypatch.setattr(socket, "create_connection", refuse)


def demo(tmp_path, name, *extra):
    out = tmp_path / "demo"
    assert main(["demo", name, str(out), *extra]) == 0
    return out


def test_demo_half_hitch(tmp_path, capsys):
    out = demo(tmp_path, "half-hitch")
    assert len(list((out / "store").glob("*.twist"))) == 4
    assert [p.name for p in out.glob("*.rig")] == ["half-hitch.rig"]
    capsys.readouterr()
    assert main(["verify", str(out / "half-hitch.rig"), "--store", str(out / "store")]) == 0
    assert capsys.readouterr().out.strip() == "GH"


def test_demo_spliced_chain_length(tmp_path, capsys):
    out = demo(tmp_path, "spliced-chain(3)")
    capsys.readouterr()
    assert main(["verify", str(out / "chain.rig"), "--store", str(out / "store"), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report == {"status": "accepted", "guild": "GUp", "length": 3, "height": 1}


def test_demo_custody_transfer(tmp_path, capsys):
    out = demo(tmp_path, "custody-transfer")
    assert main(["verify", str(out / "transfer.rig"), "--store", str(out / "store")]) == 0


def test_demo_deterministic(tmp_path):
    a = demo(tmp_path / "a", "lashed(2)", "--seed", "5")
    b = demo(tmp_path / "b", "lashed(2)", "--seed", "5")
    assert (a / "tower.rig").read_bytes() == (b / "tower.rig").read_bytes()
    assert sorted(p.name for p in (a / "store").iterdir()) == sorted(p.name for p in (b / "store").iterdir())


def test_unknown_scenario(tmp_path, capsys):
    assert main(["demo", "nonsense", str(tmp_path)]) == 2
    assert "unknown scenario" in capsys.readouterr().err


def test_verify_missing_twist(tmp_path, capsys):
    out = demo(tmp_path, "half-hitch")
    victim = next((out / "store").glob("*.twist"))
    victim.unlink()
    capsys.readouterr()
    assert main(["verify", str(out / "half-hitch.rig"), "--store", str(out / "store")]) == 1
    assert "UnknownReference" in capsys.readouterr().out


def test_verify_unreadable(tmp_path):
    assert main(["verify", str(tmp_path / "absent.rig"), "--store", str(tmp_path)]) == 2


def test_verify_flipped_byte_never_accepts(tmp_path):
    out = demo(tmp_path, "spliced-chain(2)")
    data = (out / "chain.rig").read_bytes()
    target = tmp_path / "m.rig"
    for i in range(0, len(data), 7):
        raw = bytearray(data)
        raw[i] ^= 0x01
        target.write_bytes(bytes(raw))
        assert main(["verify", str(target), "--store", str(out / "store")]) in (1, 2)


def test_check_conflict_self(tmp_path):
    out = demo(tmp_path, "half-hitch")
    rig = str(out / "half-hitch.rig")
    assert main(["check-conflict", rig, rig, "--store", str(out / "store")]) == 0


def test_double_spend(tmp_path, capsys):
    out = demo(tmp_path, "double-spend")
    store = str(out / "store")
    honest, rival = str(out / "honest.rig"), str(out / "rival.rig")
    assert main(["verify", honest, "--store", store]) == 0
    assert main(["verify", rival, "--store", store]) == 1
    assert main(["check-conflict", honest, rival, "--store", store]) == 1
    capsys.readouterr()
    code = main(["check-conflict", honest, rival, "--store", store, "--assume-valid", "--format", "json"])
    assert code == 3
    report = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert report["verdict"] == "Misaligned" and len(report["evidence"]) == 3


def test_inspect(tmp_path, capsys):
    out = demo(tmp_path, "double-spend")
    store = out / "store"
    capsys.readouterr()
    # the hoist twists are loose
    hexes = [p.stem for p in store.glob("*.twist")]
    loose = []
    for h in hexes:
        assert main(["inspect", h, "--store", str(store)]) == 0
        text = capsys.readouterr().out
        if "tether:  null (loose)" in text:
            loose.append(h)
    assert loose


def test_inspect_lead_shows_fastener(tmp_path, capsys):
    from rigging.scenarios import half_hitch_scenario

    notes = half_hitch_scenario().notes
    out = demo(tmp_path, "half-hitch")
    capsys.readouterr()
    assert main(["inspect", notes["lead"].hex(), "--store", str(out / "store"), "--format", "json"]) == 0
    fields = json.loads(capsys.readouterr().out)
    assert fields["tether"] == notes["fastener"].hex()
    assert fields["fast"] is True


def test_inspect_errors(tmp_path):
    out = demo(tmp_path, "half-hitch")
    assert main(["inspect", "not-hex", "--store", str(out / "store")]) == 2
    assert main(["inspect", HashRef.of(b"x").hex(), "--store", str(out / "store")]) == 2


def test_usage_error():
    assert main(["verify"]) == 2
