import json
import subprocess
import sys
from pathlib import Path

import pytest

from rsconn.cli import main
from rsconn.io import parse_system

CORPUS = Path(__file__).resolve().parents[1] / "corpus"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def corpus(name):
    return CORPUS / f"{name}.json"


def test_exponents_of_jordan_file(capsys):
    code, out, _ = run(capsys, "exponents", corpus("jordan5"))
    assert code == 0
    assert json.loads(out) == {"exponents": ["5", "5"]}


def test_normalize_diag01(capsys):
    code, out, _ = run(capsys, "normalize", corpus("diag01"), "--tau-offset", "0")
    assert code == 0
    report = json.loads(out)
    assert report["B"] == [["0", "0"], ["0", "0"]]
    assert report["shears"] == [{"eigenvalue": "1", "direction": -1}]
    assert report["P"]["matrix"][1][1] == [{"xpow": 1, "coeff": {"1": "1"}}]


def test_monodromy_half(capsys):
    code, out, _ = run(capsys, "monodromy", corpus("half"))
    assert code == 0
    assert json.loads(out) == {"classes": ["1/2"], "nilpotent": [["0"]]}


def test_monodromy_numeric(capsys):
    code, out, _ = run(capsys, "monodromy", corpus("half"), "--numeric")
    assert code == 0
    assert json.loads(out)["numeric"] == [[[-1.0, 0.0]]]


def test_p1_lattice_half(capsys):
    code, out, _ = run(capsys, "p1-lattice", corpus("half"))
    assert code == 0
    assert json.loads(out) == {"euler": [["1/2"]], "twists": [1]}


def test_parametric_monodromy(capsys):
    code, out, _ = run(capsys, "monodromy", corpus("parametric"))
    assert code == 0
    assert json.loads(out)["nilpotent"] == [[{"t1": "1"}, {}], [{}, {}]]


def test_p1_lattice_needs_plain_coefficients(capsys):
    code, _, err = run(capsys, "p1-lattice", corpus("parametric"))
    assert code == 1 and "p1-lattice" in err


@pytest.mark.parametrize("cmd,name,code", [
    ("exponents", "pole", 2),
    ("normalize", "pole", 2),
    ("exponents", "irrational", 4),
    ("normalize", "irrational", 4),
])
def test_exit_codes(capsys, cmd, name, code):
    got, out, err = run(capsys, cmd, corpus(name))
    assert got == code
    assert out == "" and err


def test_resonance_exit_code(capsys):
    code, out, err = run(capsys, "normalize", corpus("resonant"), "--no-shear")
    assert code == 3
    assert "0 and 2" in err
    code, out, _ = run(capsys, "normalize", corpus("half"), "--no-shear")
    assert code == 0 and json.loads(out)["tau_offset"] is None


def test_shear_output_is_a_system(capsys, tmp_path):
    code, out, _ = run(capsys, "shear", corpus("diag01"), "--rho", "1", "--direction", "1")
    assert code == 0
    sheared = tmp_path / "sheared.json"
    sheared.write_text(out)
    code, out, _ = run(capsys, "exponents", sheared)
    assert json.loads(out) == {"exponents": ["0", "2"]}


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"size": 1,')
    code, _, err = run(capsys, "exponents", bad)
    assert code == 1
    assert "line 1" in err
    code, _, err = run(capsys, "exponents", tmp_path / "missing.json")
    assert code == 1


def test_usage_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["normalize", str(corpus("half")), "--tau-offset", "2/4"])
    assert err.value.code == 1
    capsys.readouterr()


def test_order_x_flag(capsys):
    code, out, _ = run(capsys, "truncate", corpus("parametric"), "--k", "1", "--order-x", "2")
    assert code == 0
    c = parse_system(out)
    assert c.order == 2 and c.algebra.trunc_order == 1
    code, _, _ = run(capsys, "exponents", corpus("half"), "--order-x", "9")
    assert code == 1


def test_tensor_and_hom(capsys, tmp_path):
    code, out, _ = run(capsys, "tensor", corpus("half"), corpus("half"))
    assert code == 0
    square = tmp_path / "square.json"
    square.write_text(out)
    code, out, _ = run(capsys, "exponents", square)
    assert json.loads(out) == {"exponents": ["1"]}
    code, out, _ = run(capsys, "hom", corpus("half"), corpus("diag01"))
    assert json.loads(out)["dimension"] == 0
    code, out, _ = run(capsys, "hom", corpus("diag01"), corpus("resonant"))
    assert json.loads(out)["dimension"] == 4


def test_text_output(capsys):
    code, out, _ = run(capsys, "exponents", corpus("thirds"), "--output", "text")
    assert out == "exponents: {-2/3, 1/3, 4/3}\n"
    code, out, _ = run(capsys, "normalize", corpus("jordan5"), "--output", "text")
    assert "move 5 by -1" in out


def test_negative_tau_offset(capsys):
    code, out, _ = run(capsys, "normalize", corpus("thirds"), "--tau-offset=-1")
    assert code == 0
    assert json.loads(out)["exponents"] == ["-2/3", "-2/3", "-2/3"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rsconn", "exponents", str(corpus("half"))],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"exponents": ["1/2"]}
