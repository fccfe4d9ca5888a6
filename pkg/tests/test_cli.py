import json
import subprocess
import sys

import pytest

from toylocal.cli import main
from toylocal.formats import bundled_measurement, dumps, measurement_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else dumps(obj))
    return str(p)


def test_validate_bell(tmp_path, capsys):
    path = _write(tmp_path, "bell.json", measurement_to_json(bundled_measurement("bell")))
    code, out, _ = run(capsys, "validate", path)
    assert code == 0 and "valid" in out


def test_validate_singleton_injected(tmp_path, capsys):
    obj = measurement_to_json(bundled_measurement("A"))
    obj["outcomes"] = [[[0], [1], [2]], [[3]]]
    code, out, _ = run(capsys, "validate", _write(tmp_path, "bad.json", obj))
    assert code == 1 and "Postulate 5" in out


def test_validate_malformed(tmp_path, capsys):
    code, _, err = run(capsys, "validate", _write(tmp_path, "broken.json", '{"num_particles": 1,\n  "outcomes": [[[0]'))
    assert code == 2 and "line 2" in err
    code, _, _ = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 2
    code, _, _ = run(capsys, "validate", _write(tmp_path, "shape.json", {"num_particles": 1, "outcomes": [[[7]]]}))
    assert code == 2


def test_enumerate_round_trips_through_validate(tmp_path, capsys):
    code, out, _ = run(capsys, "enumerate", "1")
    assert code == 0
    entries = json.loads(out)
    assert len(entries) == 4
    assert {"num_particles": 1, "outcomes": [[[0], [1]], [[2], [3]]]} in entries
    code, out, _ = run(capsys, "enumerate", "2", "--generator-subclass")
    entries += json.loads(out)
    for i, e in enumerate(entries):
        code, _, _ = run(capsys, "validate", _write(tmp_path, f"m{i}.json", e))
        assert code == 0


def test_enumerate_unsupported(capsys):
    assert run(capsys, "enumerate", "5")[0] == 2


def test_teleport_batch(capsys):
    code, out, _ = run(capsys, "teleport", "--trials", "10000", "--seed", "42")
    assert code == 0
    stats = json.loads(out)
    assert stats["success_rate"] == 1.0 and stats["success_rate_exact"] == "1/1"


def test_teleport_single_god_view(capsys):
    code, out, _ = run(capsys, "teleport", "--trials", "1", "--god-view", "--seed", "3", "--distance", "4")
    assert code == 0
    t = json.loads(out)
    assert t["god_view"]["input_x"] == t["god_view"]["final_state_particle3"]
    assert t["locality_audit"] == "locality audit passed"
    code, out, _ = run(capsys, "teleport", "--seed", "3")
    assert "god_view" not in json.loads(out)


def test_clone_null(capsys, tmp_path):
    out_path = tmp_path / "res.json"
    code, _, _ = run(capsys, "clone", "--seed", "1", "--output", str(out_path))
    assert code == 0
    res = json.loads(out_path.read_text())
    assert res["trials"] == 10_000 and res["passes"] < 10_000
    assert "/" in res["pass_rate"]


def test_clone_errors(capsys, tmp_path):
    assert run(capsys, "clone", "--trials", "0")[0] == 2
    bad = _write(tmp_path, "s.json", {"num_particles": 2, "strategy": {"leaf": [1, 1]}})
    assert run(capsys, "clone", "--strategy", bad)[0] == 2
    junk = _write(tmp_path, "j.json", "{nope")
    assert run(capsys, "clone", "--strategy", junk)[0] == 2
    assert run(capsys, "clone", "--prepare", "Q")[0] == 2


def test_clone_search(capsys):
    code, out, _ = run(capsys, "clone-search", "--particles", "2", "--depth", "1", "--trials", "500")
    assert code == 0
    res = json.loads(out)
    assert res["max_pass_probability"] == "1/2" and not res["perfect_cloning_found"]
    assert res["empirical_check"]["trials"] == 500


def test_bad_arguments(capsys):
    assert run(capsys, "teleport", "--trials", "-3")[0] == 2
    assert run(capsys, "teleport", "--seed", "abc")[0] == 2
    assert run(capsys)[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["teleport", "--trials", "2000", "--seed", "7"],
        ["teleport", "--seed", "7", "--god-view"],
        ["clone", "--trials", "500", "--seed", "7", "--god-view"],
        ["clone-search", "--depth", "1"],
        ["enumerate", "1"],
    ],
)
def test_byte_identical_across_processes(argv):
    outs = [
        subprocess.run([sys.executable, "-m", "toylocal", *argv], capture_output=True, check=True).stdout
        for _ in range(2)
    ]
    assert outs[0] == outs[1] and outs[0]


def test_audit_saved_transcript(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert run(capsys, "teleport", "--seed", "4", "--output", str(out))[0] == 0
    code, text, _ = run(capsys, "audit", str(out))
    assert code == 0 and "passed" in text
    t = json.loads(out.read_text())
    recv = next(e for e in t["events"] if e["kind"] == "msg_recv")
    send = next(e for e in t["events"] if e["kind"] == "msg_send")
    recv["tick"] = send["tick"] + 1
    t["events"] = [e for e in t["events"] if e["tick"] <= recv["tick"] or e is recv]
    t["events"].sort(key=lambda e: e["tick"])
    code, text, _ = run(capsys, "audit", _write(tmp_path, "forged.json", t))
    assert code == 1 and "superluminal" in text
    assert run(capsys, "audit", _write(tmp_path, "junk.json", [{"tick": 0}]))[0] == 2
