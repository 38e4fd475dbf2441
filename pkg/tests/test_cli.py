import json

import pytest

from todatau.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_omega_text(capsys):
    code, out, _ = run(capsys, "omega", "--indices", "0,1")
    assert code == 0
    assert out.strip() == "Omega_0,1 = v_{-1}*w_0 + v_0*w_0"


def test_tau_poly_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "tau-poly", "--p", "1")
    doc = json.loads(out)
    assert code == 0 and doc["name"] == "S_1"
    assert doc["text"] == "w_0 + w_1 + v_0^2"
    assert {"monomial": {"v_0": 2}, "coefficient": "1"} in doc["value"]


def test_omega2_matches_omega(capsys):
    _, a, _ = run(capsys, "--format", "json", "tau-poly", "--p", "1", "--q", "2")
    _, b, _ = run(capsys, "--format", "json", "omega", "--indices", "1,2")
    assert json.loads(a)["value"] == json.loads(b)["value"]


def test_resolvent_blocks(capsys):
    code, out, _ = run(capsys, "--format", "json", "resolvent", "--order", "2")
    doc = json.loads(out)
    assert code == 0 and doc["order"] == 2
    assert [b["power"] for b in doc["blocks"]] == [0, -1, -2, -3]


@pytest.mark.parametrize("method", ["mr", "kernel", "wave"])
def test_correlators_methods_agree(capsys, method):
    code, out, _ = run(capsys, "correlators", "--f", "0", "--g", "n", "--indices", "1,1", "--method", method)
    assert code == 0
    assert out.strip() == "Omega_1,1 = 2*n^2"


def test_gue_at_n(capsys):
    code, out, _ = run(capsys, "gue", "--degrees", "2,2", "--at-n", "3")
    assert code == 0 and out.strip().endswith("= 18")


def test_gw_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "gw", "--indices", "1,1", "--genus-max", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["value"] == [{"eps_power": -2, "value": "1/2"}]


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "correlators", "--f", "0", "--g", "n+", "--indices", "1,1")
    assert code == 2 and "cannot parse" in err


def test_value_error_exit_code(capsys):
    code, _, err = run(capsys, "gw", "--indices", "1", "--genus-max", "1")
    assert code == 2 and err.startswith("error:")


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "--format", "json", "verify", "--suite", "tau", "--order", "3")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert all(r["passed"] for r in doc["reports"])
