"""Roster schema, validation, and file round-trip."""

import json

import pytest

from tta.env.characters import (
    BUILTIN_ROSTER,
    RosterError,
    load_roster,
    roster_from_dict,
    roster_names,
    write_roster,
)


def test_builtin_roster_shape():
    roster = load_roster()
    assert len(roster) == 4
    assert roster_names(roster) == ["Kazan", "Riko", "Volt", "Gorn"]
    for i, spec in enumerate(roster):
        assert spec.character_id == i
        assert spec.max_hp == 176
        assert len(spec.normals) == 6
        assert len(spec.specials) >= 1
        for m in spec.specials:
            assert m.recovery_frames >= 1
            assert m.damage > 0


def test_write_and_reload(tmp_path):
    p = tmp_path / "roster.json"
    write_roster(p)
    roster = load_roster(p)
    assert [s.name for s in roster] == [s.name for s in load_roster()]
    doc = json.loads(p.read_text())
    assert doc["spec_version"] == 1


def test_validation_rejects_bad_recovery():
    doc = json.loads(json.dumps(BUILTIN_ROSTER))
    doc["characters"][0]["specials"][0]["recovery_frames"] = 0
    with pytest.raises(RosterError):
        roster_from_dict(doc)


def test_validation_rejects_bad_damage():
    doc = json.loads(json.dumps(BUILTIN_ROSTER))
    doc["characters"][1]["specials"][0]["damage"] = 0
    with pytest.raises(RosterError):
        roster_from_dict(doc)


def test_validation_rejects_bad_trigger():
    doc = json.loads(json.dumps(BUILTIN_ROSTER))
    doc["characters"][0]["specials"][0]["trigger"] = "headbutt"
    with pytest.raises(RosterError):
        roster_from_dict(doc)


def test_validation_rejects_id_gap():
    doc = json.loads(json.dumps(BUILTIN_ROSTER))
    doc["characters"][2]["character_id"] = 7
    with pytest.raises(RosterError):
        roster_from_dict(doc)


def test_charge_move_declares_threshold():
    roster = load_roster()
    volt = roster[2]
    (move,) = volt.specials
    assert move.is_charge()
    assert move.charge_frames >= 1
