import io
import json

import pytest

from cayleyci.main import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, run

EXAMPLE_TWO = {"n": 2, "mode": "undirected", "set": [[2, 0], [0, 1], [2, 1]]}
STRETCHED_THREE = {"n": 2, "mode": "undirected", "set": [[3, 0], [0, 1]]}


def invoke(command, payload=None, *options, stdin=""):
    argv = [command]
    if payload is not None:
        argv.append(payload if isinstance(payload, str) else json.dumps(payload))
    argv.extend(options)
    out = io.StringIO()
    code = run(argv, stdin=io.StringIO(stdin), stdout=out)
    text = out.getvalue()
    return code, (json.loads(text) if text else None)


def verify(document):
    return invoke("verify", document)


def test_decide_ci_positive():
    code, doc = invoke("decide-ci", EXAMPLE_TWO)
    assert code == EXIT_OK
    assert doc["schema_version"] == 1
    result = doc["result"]
    assert result["is_ci"] is True
    assert result["reason"] == "PRODUCT_CONDITION_HOLDS"
    assert result["k"] == 2
    assert result["certificate"]["Q_order"] == 6
    code, checked = verify(doc)
    assert code == EXIT_OK
    assert checked["result"]["ok"] is True


def test_decide_ci_negative_still_exits_zero():
    code, doc = invoke("decide-ci", STRETCHED_THREE)
    assert code == EXIT_OK
    assert doc["result"]["is_ci"] is False
    assert doc["result"]["witness"]["set"]["n"] == 2
    code, checked = verify(doc)
    assert code == EXIT_OK
    assert checked["result"]["problems"] == []


def test_tampered_certificate_is_rejected():
    _, doc = invoke("decide-ci", STRETCHED_THREE)
    doc["result"]["certificate"]["stabilizer_order"] = 16
    code, checked = verify(doc)
    assert code == EXIT_NEGATIVE
    assert checked["result"]["ok"] is False
    assert checked["result"]["problems"]


def test_output_is_deterministic():
    assert invoke("decide-ci", EXAMPLE_TWO) == invoke("decide-ci", EXAMPLE_TWO)


def test_payload_from_stdin():
    code, doc = invoke("stab", stdin=json.dumps(EXAMPLE_TWO))
    assert code == EXIT_OK
    assert doc["result"]["order"] == 12
    assert verify(doc)[0] == EXIT_OK


def test_output_file(tmp_path):
    target = tmp_path / "snf.json"
    out = io.StringIO()
    code = run(["snf", json.dumps({"matrix": [[2, 4], [6, 8]]}), "--output", str(target)],
               stdin=io.StringIO(), stdout=out)
    assert code == EXIT_OK
    assert out.getvalue() == ""
    doc = json.loads(target.read_text(encoding="utf-8"))
    assert doc["result"]["smith"]["diagonal"] == [2, 4]
    assert doc["result"]["det"] == -8


def test_input_file(tmp_path):
    source = tmp_path / "input.json"
    source.write_text(json.dumps({"S": [1, 3], "S_prime": [-1, -3]}), encoding="utf-8")
    code, doc = invoke("z-iso", None, "--input", str(source))
    assert code == EXIT_OK
    assert doc["result"] == {"isomorphic": True, "sign": -1}


def test_iso_exit_codes():
    code, doc = invoke("iso", {"S": EXAMPLE_TWO, "S_prime": STRETCHED_THREE})
    assert code == EXIT_NEGATIVE
    assert doc["result"]["witness"]["kind"] == "NONE"
    assert verify(doc)[0] == EXIT_OK

    shear = {"n": 2, "mode": "undirected", "set": [[1, 0], [1, 1]]}
    grid = {"n": 2, "mode": "undirected", "set": [[1, 0], [0, 1]]}
    code, doc = invoke("iso", {"S": grid, "S_prime": shear})
    assert code == EXIT_OK
    assert doc["result"]["witness"]["kind"] == "AMBIENT_AUTOMORPHISM"
    assert verify(doc)[0] == EXIT_OK


def test_z_iso_negative():
    code, doc = invoke("z-iso", {"S": [1, -1, 3, -3], "S_prime": [1, -1, 2, -2]})
    assert code == EXIT_NEGATIVE
    assert doc["result"]["sign"] is None


def test_rerun_verification():
    for command, payload in [
        ("demo-mod5", {"N": 30}),
        ("z-iso", {"S": [2], "S_prime": [2]}),
        ("torsion", {"groups": [[3], [3, 3]], "embeddings": [[[1, 0]]], "alpha0": [2],
                     "S": [1], "S_prime": [2]}),
        ("equivariance", dict(EXAMPLE_TWO, trials=2, seed=3)),
        ("ci-finite", {"moduli": [5], "mode": "undirected", "set": [1]}),
    ]:
        code, doc = invoke(command, payload)
        assert code == EXIT_OK, command
        assert verify(doc)[0] == EXIT_OK, command


def test_torsion_result():
    payload = {"groups": [[3], [3, 3], [3, 3, 5]], "embeddings": [[[1, 0]], [[1, 0, 0], [0, 1, 0]]],
               "alpha0": [2]}
    code, doc = invoke("torsion", payload)
    assert code == EXIT_OK
    assert doc["result"]["final"] == [[2, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert doc["result"]["verified"] is True


def test_normality_command():
    payload = {"n": 2, "mode": "undirected", "set": [[1, 0], [0, 1]], "m": 7}
    code, doc = invoke("normality", payload)
    assert code == EXIT_OK
    assert doc["result"]["automorphisms_fixing_zero"] == 8


@pytest.mark.parametrize("command, payload, error_type", [
    ("decide-ci", "{not json", "invalid_input"),
    ("decide-ci", {"n": 2, "set": [[0, 0]]}, "invalid_input"),
    ("decide-ci", {"n": 2, "set": [[1, 0, 0]]}, "invalid_input"),
    ("decide-ci", {"n": 2, "mode": "sideways", "set": [[1, 0]]}, "invalid_input"),
    ("z-iso", {"S": [0], "S_prime": [1]}, "invalid_input"),
    ("scan-finite", {"moduli": [17]}, "precondition"),
    ("normality", dict(EXAMPLE_TWO, m=7), "precondition"),
    ("verify", {"command": "snf"}, "invalid_input"),
])
def test_error_documents(command, payload, error_type):
    code, doc = invoke(command, payload)
    assert code == EXIT_ERROR
    assert doc["error"]["type"] == error_type
    assert "result" not in doc


def test_unknown_command_is_argparse_error():
    with pytest.raises(SystemExit) as info:
        run(["bogus"], stdin=io.StringIO(), stdout=io.StringIO())
    assert info.value.code == 2
