import json
import subprocess
import sys

import pytest

from banana_nano.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_invalid_n_exits_2():
    res = subprocess.run([sys.executable, "-m", "banana_nano.cli", "dt", "--N", "4"],
                         capture_output=True, text=True)
    assert res.returncode == 2
    assert "N must be one of 5,6,8,9" in res.stderr


def test_dt_deterministic_with_unit_constant(capsys):
    argv = ("dt", "--N", "6", "--pcap", "3", "--qcap", "1", "--Qcap", "1", "--ycap", "6")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    terms = {tuple(e): (n, d) for e, n, d in json.loads(first)["terms"]}
    assert terms[(0, 0, 0, 0)] == (1, 1)


def test_dt_alias_and_csv(capsys):
    code, out, _ = run(capsys, "dt-expand", "--N", "5", "--pcap", "2", "--qcap", "1", "--Qcap", "1",
                       "--ycap", "5", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p,y,q,Q,coeff"
    assert "0,0,0,0,1" in lines


def test_gv_json(capsys):
    code, out, _ = run(capsys, "gv", "--N", "5", "--beta", "0,0,-5", "--g", "0")
    d = json.loads(out)
    assert code == 0 and d["n"] == 4 and d["a"] == "-1"


def test_gv_needs_three_components():
    with pytest.raises(SystemExit):
        main(["gv", "--N", "5", "--beta", "1,2"])


def test_gw_y_exponents(capsys):
    _, out, _ = run(capsys, "gw", "--N", "9", "--g", "2", "--qcap", "1", "--Qcap", "1")
    terms = json.loads(out)["terms"]
    assert terms and all(e[2] % 9 == 0 for e, _, _ in terms)


def test_cuspform(capsys):
    _, out, _ = run(capsys, "cuspform", "--N", "9", "--terms", "50")
    coeffs = json.loads(out)["coeffs"]
    assert len(coeffs) == 50 and coeffs[0] == 1


def test_verify_ap(capsys):
    code, out, err = run(capsys, "verify", "ap", "--N", "8", "--pmax", "50")
    d = json.loads(out)
    assert code == 0 and d["ok"]
    assert d["checks"][0]["report"]["primes_checked"] == 14
    assert "PASS" in err


def test_verify_dtgwgv_flags_provisional(capsys):
    code, _, err = run(capsys, "verify", "dtgwgv", "--N", "6", "--A", "1", "--B", "1", "--C", "6",
                       "--P", "3", "--G", "1")
    assert code == 0
    assert "provisional genera: [0, 1]" in err


@pytest.mark.parametrize("action", ("verify-ap", "j", "action"))
def test_arith(capsys, action):
    extra = {"verify-ap": ("--pmax", "60"), "j": (), "action": ("--p", "103", "--trials", "20")}[action]
    code, out, _ = run(capsys, "arith", action, "--N", "9", *extra)
    assert code == 0 and json.loads(out)["ok"]


def test_siegel_verify(capsys):
    code, out, _ = run(capsys, "siegel", "verify", "--N", "5", "--samples", "100")
    assert code == 0 and json.loads(out)["ok"]
