import json
import subprocess
import sys
from fractions import Fraction

import pytest

from gaussred import serialize
from gaussred.cli import main
from gaussred.constants import CurveParams
from gaussred.elliptic import WeierstrassCurve
from gaussred.morphism import Morphism


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, [json.loads(line) for line in out.splitlines()], err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def _params():
    return CurveParams(
        g=2, s=1, deg_C=1, K0=Fraction(1), K1=Fraction(1), K2=Fraction(1), K3=Fraction(1),
        vojta_c1=Fraction(1), bogomolov_c={None: Fraction(1)}, c_double_prime=Fraction(1),
        min_p_norm=Fraction(1), max_p_norm=Fraction(1), c_p=Fraction(1), eps_p=Fraction(1, 10),
    )


def test_reduce_fixture(capsys, tmp_path):
    code, out, _ = run(capsys, "reduce", write(tmp_path, "m.json", [[2, 4, 6], [1, 3, 5]]))
    assert code == 0
    (doc,) = out
    assert doc["type"] == "reduce"
    assert Morphism.from_json(doc["phi"]).to_ints() == [[2, 1, 0], [0, 1, 2]]
    assert serialize.verify(doc) == []


def test_approx_and_enumerate(capsys, tmp_path):
    code, out, _ = run(capsys, "approx", write(tmp_path, "m.json", [[100, 0, 37], [0, 100, -51]]), "--Q", "7")
    assert code == 0 and out[0]["type"] == "approx" and serialize.verify(out[0]) == []
    code, _, err = run(capsys, "approx", write(tmp_path, "n.json", [[1, 0, 3], [0, 1, 5]]))
    assert code == 2 and "not Gauss-reduced" in err
    code, out, _ = run(capsys, "enumerate", "--g", "2", "--r", "1", "--M", "1")
    assert code == 0 and out[0]["count"] == 5


def test_bounds_and_heights(capsys, tmp_path):
    code, out, _ = run(capsys, "bounds", "--params", write(tmp_path, "p.json", _params().to_json()))
    assert code == 0 and serialize.verify(out[0]) == []
    spec = {"curve": WeierstrassCurve(0, 0, 1, -1, 0).to_json(), "points": [["0", "0"]]}
    code, out, _ = run(capsys, "heights", write(tmp_path, "h.json", spec), "--precision", "1/1000")
    assert code == 0 and serialize.verify(out[0]) == []


@pytest.mark.parametrize("kind", ["prop_a", "special", "quasi_special", "reverse"])
def test_simulate_kinds_verify(capsys, tmp_path, kind):
    sc = write(tmp_path, "s.json", {"kind": kind, "trials": 3, "g": 3, "r": 2})
    code, out, _ = run(capsys, "simulate", "--scenario", sc, "--seed", "5")
    assert code == 0 and len(out) == 3
    assert [d["trial"] for d in out] == [0, 1, 2]
    assert all(serialize.verify(d) == [] for d in out)


def test_simulate_is_deterministic(tmp_path):
    sc = write(tmp_path, "s.json", {"kind": "prop_a", "trials": 4, "g": 3, "r": 2})
    outs = []
    for name in ("a", "b"):
        path = tmp_path / name
        assert main(["simulate", "--scenario", sc, "--seed", "11", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    path = tmp_path / "c"
    main(["simulate", "--scenario", sc, "--seed", "12", "--out", str(path)])
    assert path.read_bytes() != outs[0]


def test_verify_accepts_fresh_and_rejects_corrupted(capsys, tmp_path):
    sc = write(tmp_path, "s.json", {"kind": "prop_a", "trials": 2})
    certs = tmp_path / "certs.jsonl"
    main(["simulate", "--scenario", sc, "--seed", "1", "--out", str(certs)])
    code, out, _ = run(capsys, "verify", str(certs))
    assert code == 0 and all(r["ok"] for r in out)

    lines = certs.read_text().splitlines()
    doc = json.loads(lines[1])
    doc["f"] = str(int(doc["f"]) + 1)
    bad = tmp_path / "bad.jsonl"
    bad.write_text(lines[0] + "\n" + json.dumps(doc) + "\n")
    code, out, _ = run(capsys, "verify", str(bad))
    assert code == 1
    assert out[0]["ok"] and not out[1]["ok"]


def test_bad_input_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "reduce", str(tmp_path / "missing.json"))
    assert code == 2 and "error" in json.loads(err)
    code, _, err = run(capsys, "reduce", write(tmp_path, "m.json", {"nope": 1}))
    assert code == 2
    code, _, _ = run(capsys, "bounds")
    assert code == 2
    code, _, _ = run(capsys, "no-such-command")
    assert code == 2


def test_console_script_runs(tmp_path):
    path = write(tmp_path, "m.json", [[3, 1]])
    proc = subprocess.run([sys.executable, "-m", "gaussred", "reduce", path], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["type"] == "reduce"


def test_digest_ignores_trial_and_pins_content():
    doc = serialize.reduce_certificate(Morphism.from_ints([[2, 4]]))
    assert serialize.verify({**doc, "trial": 9}) == []
    tampered = {**doc, "N": "7"}
    assert "digest mismatch" in serialize.verify(tampered)
    assert serialize.verify(tampered, check_digest=False)


def test_verify_rejects_garbage():
    assert serialize.verify([1, 2])
    assert serialize.verify({"type": "nonsense"})
    assert serialize.verify({"type": "reduce"})
