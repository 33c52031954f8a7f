import io
import json
import subprocess
import sys

import pytest

from rbx.cli import main
from rbx.deformation import InfinitesimalDeformation, coboundary
from rbx.fileformat import dumps, example
from rbx.foundation import Matrix


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run("--report", "json", *argv)
    return code, json.loads(text)


def _no_floats(x):
    if isinstance(x, float):
        return False
    if isinstance(x, dict):
        return all(_no_floats(v) for v in x.values())
    if isinstance(x, list):
        return all(_no_floats(v) for v in x)
    return True


def _rows(m: Matrix):
    return [[str(v) for v in row] for row in m.to_rows()]


def deformation_file(tmp_path, name, d: InfinitesimalDeformation):
    omega = {}
    for ((i, j), o), v in d.omega1.data.items():
        if i < j and v:
            omega.setdefault(f"[{i},{j}]", {})[str(o)] = str(v)
    obj = {"deformation": {"omega": omega, "varrho": [_rows(m) for m in d.varrho1], "T": _rows(d.T1)}}
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_verify_registry_entries():
    assert run("verify", "rrb", "aff1-T0")[0] == 0
    assert run("verify", "cybe", "sl2-r-he")[0] == 0
    assert run("verify", "lie", "heis3")[0] == 0
    assert run("verify", "hrbo", "dgla-2term")[0] == 0
    assert run("verify", "linf", "prelie-r3")[0] == 0
    assert run("verify", "rbo", "aff1-nil")[0] == 0


def test_verify_from_file(tmp_path):
    p = tmp_path / "a.json"
    p.write_text(dumps(example("aff1-T0")))
    code, rep = run_json("verify", "rrb", str(p))
    assert code == 0
    assert rep["verdicts"] == {"lie": True, "representation": True, "relative_rota_baxter": True}
    assert rep["exit_code"] == 0


def test_broken_jacobi_gives_witness(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text(json.dumps({"lie": {"dim": 3, "brackets": {"[0,1]": {"0": "1"}, "[0,2]": {"1": "1"}, "[1,2]": {"0": "1"}}}}))
    code, rep = run_json("verify", "lie", str(p))
    assert code == 1
    assert rep["verdicts"]["jacobi"] is False
    w = rep["witnesses"]["jacobi"]
    assert len(w) == 3 and all(isinstance(i, int) for i in w)


def test_non_rbo_operator(tmp_path):
    s = example("aff1-T0")
    s.T = Matrix.identity(2)
    p = tmp_path / "bad.json"
    p.write_text(dumps(s))
    assert run("verify", "rrb", str(p))[0] == 1


def test_cohomology_rb_degree_one():
    code, rep = run_json("cohomology", "rb", "aff1-T0", "--degree", "1")
    assert code == 0
    (row,) = rep["tables"]["cohomology"]
    assert row["betti"] == 1
    assert rep["verdicts"]["d_squared_zero"] is True


def test_cohomology_max_degree():
    code, rep = run_json("cohomology", "ce", "aff1", "--max-degree", "2")
    assert code == 0
    assert [r["betti"] for r in rep["tables"]["cohomology"]] == [0, 0, 0]
    assert run("cohomology", "ce", "aff1")[0] == 2


def test_les():
    code, rep = run_json("les", "rrb", "aff1-T0", "--max-degree", "2")
    assert code == 0 and rep["verdicts"]["exact"] is True
    code, rep = run_json("les", "tlb", "sl2-r-he", "--max-degree", "2")
    assert code == 0
    assert run("les", "rrb", "aff1-T0", "--max-degree", "-1")[0] == 2


def test_examples_commands():
    code, text = run("examples", "list")
    assert code == 0 and "aff1-T0" in text and "prelie-r3" in text
    code, text = run("examples", "show", "sl2-r-he")
    assert code == 0 and json.loads(text)["name"] == "sl2-r-he"
    assert run("examples", "show", "nope")[0] == 2
    assert run("examples", "show")[0] == 2


def test_prelie_commands():
    code, rep = run_json("prelie", "phi", "prelie-r3")
    assert code == 0 and rep["tables"]["brackets"]
    code, rep = run_json("prelie", "from-rbo", "aff1-T0")
    assert code == 0 and rep["verdicts"]["prelie"] is True
    code, rep = run_json("prelie", "subadjacent", "aff1-T0")
    assert code == 0 and rep["tables"]["brackets"] == {"[0,1]": {"1": "1"}}


def test_usage_errors(tmp_path):
    assert run("verify", "rrb", str(tmp_path / "missing.json"))[0] == 2
    assert run("bogus")[0] == 2
    assert run()[0] == 2
    assert run("verify", "cybe", "aff1-T0")[0] == 2
    p = tmp_path / "float.json"
    p.write_text('{"lie": {"dim": 1, "brackets": {}}, "operator": [[0.5]]}')
    code, rep = run_json("verify", "rrb", str(p))
    assert code == 2 and "error" in rep


def test_deform(tmp_path):
    base = example("aff1-T0").relative()
    zero = InfinitesimalDeformation.zero(base)
    cob = coboundary(base, Matrix.from_rows([[0, 1], [0, 0]]), Matrix.zeros(2, 2))
    t_only = InfinitesimalDeformation(base, zero.omega1, zero.varrho1, Matrix.from_rows([[0, 0], [0, 1]]))
    broken = InfinitesimalDeformation(base, zero.omega1, zero.varrho1, Matrix.from_rows([[0, 1], [0, 0]]))
    fz = deformation_file(tmp_path, "zero.json", zero)
    fc = deformation_file(tmp_path, "cob.json", cob)
    ft = deformation_file(tmp_path, "t.json", t_only)
    fb = deformation_file(tmp_path, "broken.json", broken)
    assert run("deform", "check", "aff1-T0", fz, fc, ft)[0] == 0
    assert run("deform", "check", "aff1-T0", fb)[0] == 1
    code, rep = run_json("deform", "equiv", "aff1-T0", fz, fc)
    assert code == 0 and rep["verdicts"]["witness_verified"] is True
    assert run("deform", "equiv", "aff1-T0", fz, ft)[0] == 1
    assert run("deform", "equiv", "aff1-T0", fz)[0] == 2
    assert run("deform", "check", "aff1-T0", str(tmp_path / "none.json"))[0] == 2


@pytest.mark.parametrize("argv", [
    ("verify", "rrb", "aff1-T0"),
    ("cohomology", "tlb", "sl2-r-he", "--max-degree", "3"),
    ("les", "rb", "aff1-nil", "--max-degree", "2"),
    ("verify", "hrbo", "dgla-2term"),
    ("prelie", "phi", "prelie-r3"),
])
def test_json_reports_have_no_floats(argv):
    code, text = run("--report", "json", *argv)
    rep = json.loads(text)
    assert code == 0 and _no_floats(rep)
    assert set(rep) >= {"command", "verdicts", "witnesses", "tables", "exit_code", "elapsed_ms"}


def test_table_report():
    code, text = run("verify", "rrb", "aff1-T0")
    assert "PASS  relative_rota_baxter" in text


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rbx.cli", "verify", "cybe", "sl2-r-he"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS  cybe" in proc.stdout
