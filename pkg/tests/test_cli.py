import io
import json
import subprocess
import sys

import pytest

from fchar import __version__
from fchar.cli import EXIT_CAP, EXIT_MISMATCH, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE, run

QUARTIC_GAP = "4,0;3,1;1,3;0,4"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def result(*argv):
    code, out, err = call(*argv)
    assert code == EXIT_OK, err
    report = json.loads(out)
    assert set(report) == {"command", "input_digest", "result", "tool_version", "timing_ms"}
    assert report["tool_version"] == __version__
    return report["result"]


@pytest.mark.parametrize(
    "argv, key, expected",
    [
        (["gb", "--char", "3", "--ideal", "x^2-y,x*y-1"], "gb", ["y^2+2*x", "x*y+2", "x^2+2*y"]),
        (["gb", "--char", "7", "--vars", "x,y", "--ideal", "x^2+y^2-1,x-y", "--order", "lex"], "gb",
         ["y^2+3", "x+6*y"]),
        (["member", "--char", "2", "--ideal", "a^2", "--poly", "b^2", "--modulus", "a^3-b^2"], "member", True),
        (["colon", "--char", "5", "--ideal", "x^2,x*y", "--poly", "x"], "colon", ["y", "x"]),
        (["intersect", "--char", "5", "--ideal", "x", "--ideal2", "y"], "intersection", ["x*y"]),
        (["eliminate", "--char", "5", "--vars", "t,x,y", "--ideal", "x-t^2,y-t^3", "--drop", "t"], "eliminated",
         ["x^3+4*y^2"]),
        (["bracket", "--char", "3", "--ideal", "x+y", "--e", "1"], "bracket", ["x^3+y^3"]),
        (["froot", "--char", "2", "--ideal", "x^2*y^3"], "root", ["x*y"]),
        (["fedder", "--char", "3", "--vars", "x,y", "--ideal", "y^2-x^3-x^2"], "f_pure", True),
        (["fedder", "--char", "2", "--vars", "x,y", "--ideal", "y^2-x^3"], "f_pure", False),
        (["identity-check", "--char", "2", "--ideal", "x^2,x*y", "--poly", "y"], "left", ["x^2"]),
        (["sg", "member", "--gens", QUARTIC_GAP, "--vector", "2,2"], "member", False),
        (["sg", "normal", "--gens", QUARTIC_GAP], "witness", ["2", "2"]),
        (["sg", "certificate", "--char", "2", "--gens", QUARTIC_GAP], "e", 2),
        (["sg", "classify", "--char", "2", "--gens", QUARTIC_GAP], "certificate", {"e": 2}),
        (["sg", "classify", "--char", "3", "--gens", "4,0;2,1;1,2;0,4"], "status", "NotFCoherent"),
        (["sg", "pi-test", "--char", "3", "--gens", QUARTIC_GAP], "passed", True),
        (["sg", "group", "--gens", QUARTIC_GAP], "rank", 2),
        (["sg", "cone", "--gens", QUARTIC_GAP], "rays", [["1", "0"], ["0", "1"]]),
        (["sg", "retract", "--gens", QUARTIC_GAP, "--face-rays", "1,0"], "multiplicative", True),
        (["curve", "classify", "--char", "2", "--gens", "u^2-1,u^3-u"], "certificate", {"e": 1}),
        (["curve", "pi-test", "--char", "3", "--gens", "u^2-1,u^3-u", "--emax", "2"], "status",
         "NoCertificateUpToBound"),
        (["ns", "classify", "--char", "13", "--gens", "2,3"], "status", "FCoherent"),
        (["ns", "info", "--gens", "3,5"], "gaps", [1, 2, 4, 7]),
    ],
)
def test_commands(argv, key, expected):
    assert result(*argv)[key] == expected


def test_closure_commands():
    base = ["--char", "2", "--ideal", "a", "--poly", "b", "--modulus", "a^3-b^2"]
    f = result("fclosure", *base, "--emax", "3")
    assert (f["status"], f["exponent"]) == ("Member", 1)
    t = result("tclosure", *base, "--witnesses", "a")
    assert t["status"] == "Member" and t["caveat"]
    assert result("fclosure", "--char", "2", "--ideal", "x^2,y^2", "--poly", "x*y")["status"] == "NotMemberUpToBound"


def test_file_input_and_flag_precedence(tmp_path):
    f = tmp_path / "in.json"
    f.write_text(json.dumps({"char": 3, "vars": ["x", "y"], "ideal": ["x^2-y", "x*y-1"]}))
    assert result("gb", "--file", str(f))["gb"] == ["y^2+2*x", "x*y+2", "x^2+2*y"]
    assert result("gb", "--file", str(f), "--ideal", "x")["gb"] == ["x"]
    g = tmp_path / "sg.json"
    g.write_text(json.dumps({"dim": 2, "gens": [[4, 0], [3, 1], [1, 3], [0, 4]]}))
    assert result("sg", "classify", "--char", "2", "--file", str(g))["status"] == "FCoherent"


def test_output_is_deterministic():
    argv = ["sg", "classify", "--char", "5", "--gens", "4,0;2,1;1,2;0,4"]
    runs = [json.loads(call(*argv)[1]) for _ in range(3)]
    for r in runs:
        r.pop("timing_ms")
    assert runs[0] == runs[1] == runs[2]
    assert call("gb", "--char", "3", "--ideal", "x")[1] != call("gb", "--char", "5", "--ideal", "x")[1]


def test_text_format():
    code, out, _ = call("ns", "info", "--gens", "3,5", "--text")
    assert code == EXIT_OK
    assert "frobenius_number: 7" in out.splitlines()


@pytest.mark.parametrize(
    "argv",
    [
        ["gb", "--char", "4", "--ideal", "x"],
        ["gb", "--char", "3"],
        ["gb", "--ideal", "x"],
        ["gb", "--char", "3", "--ideal", "x+"],
        ["member", "--char", "3", "--ideal", "x"],
        ["sg", "member", "--gens", "1,0", "--vector", "1"],
        ["sg", "retract", "--gens", QUARTIC_GAP],
        ["sg", "classify", "--char", "3"],
        ["ns", "classify", "--char", "3", "--gens", "4,6"],
        ["curve", "classify", "--char", "3", "--gens", "u^2,u^4"],
        ["eliminate", "--char", "3", "--ideal", "x", "--drop", "q"],
    ],
)
def test_precondition_errors_exit_2(argv):
    code, out, err = call(*argv)
    assert code == EXIT_PRECONDITION
    assert out == ""
    assert "error" in json.loads(err)


def test_bad_json_file(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{nope")
    code, _, err = call("gb", "--file", str(f))
    assert code == EXIT_PRECONDITION
    assert str(f) in json.loads(err)["error"]
    code, _, _ = call("gb", "--file", str(tmp_path / "missing.json"))
    assert code == EXIT_PRECONDITION


def test_resource_cap_exit_3():
    code, _, err = call("sg", "member", "--gens", "2,0,0;0,2,0;0,0,2;1,1,1", "--vector", "401,401,401")
    assert code == EXIT_CAP
    assert json.loads(err)["kind"] == "ResourceCapError"


@pytest.mark.parametrize("argv", [[], ["bogus"], ["gb", "--nope"], ["sg", "fly"], ["gb", "--order", "weird"]])
def test_usage_errors_exit_64(argv):
    code, out, err = call(*argv)
    assert code == EXIT_USAGE
    assert "usage: fchar" in err


def test_verify_paper_exit_codes(tmp_path):
    code, out, _ = call("verify-paper", "--only", "fedder")
    assert code == EXIT_OK
    assert json.loads(out)["result"]["failed"] == 0

    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps([{"id": "w", "group": "fedder", "op": "fedder",
                                  "input": {"char": 2, "vars": ["x", "y"], "ideal": ["x*y"]},
                                  "expect": {"f_pure": False}}]))
    code, out, _ = call("verify-paper", "--fixtures", str(wrong))
    assert code == EXIT_MISMATCH
    fx = json.loads(out)["result"]["fixtures"][0]
    assert fx["diff"] == {"f_pure": {"expected": False, "got": True}}

    corrupt = tmp_path / "corrupt.json"
    corrupt.write_text("[{]")
    code, _, err = call("verify-paper", "--fixtures", str(corrupt))
    assert code == EXIT_PRECONDITION
    assert json.loads(err)["path"] == str(corrupt)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fchar", "ns", "info", "--gens", "2,3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["frobenius_number"] == 1
    proc = subprocess.run([sys.executable, "-m", "fchar", "bogus"], capture_output=True, text=True, check=False)
    assert proc.returncode == EXIT_USAGE
