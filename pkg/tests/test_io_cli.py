import io as stdio
import json
import re

import numpy as np
import pytest

from lieshull import io
from lieshull import linalg as la
from lieshull.cli import run
from lieshull.groups import catalog
from lieshull.lie import LieAlgebra
from lieshull.rigidity import input_from_map

CATALOG_CASES = [("heisenberg", {"n": 3}), ("heisenberg", {"n": 5}), ("abelian", {"n": 2}), ("aff1", {}),
                 ("paper_example", {}), ("semidirect_integer", {"a": [[1, 1], [0, 1]]})]


def cli(*argv, env_tol=None, monkeypatch=None):
    out, err = stdio.StringIO(), stdio.StringIO()
    code = run([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def cli_json(*argv):
    code, out, err = cli(*argv)
    return code, (json.loads(out) if out else None), err


@pytest.fixture
def files(tmp_path):
    """Emit a few catalog entries into a temp dir; returns the directory."""
    for name, n in [("heisenberg", 3), ("paper_example", None), ("aff1", None), ("abelian", 2)]:
        args = ["catalog", name, "--dir", tmp_path] + (["--n", n] if n else [])
        assert cli(*args)[0] == 0
    return tmp_path


# ---------------------------------------------------------------- formats


def test_algebra_round_trip():
    g = LieAlgebra(("X", "Y", "Z"), {(0, 1): {2: "1/3"}}, "h")
    d = json.loads(json.dumps(io.algebra_to_json(g)))
    assert d["brackets"] == [{"i": 0, "j": 1, "coeffs": {"2": "1/3"}}]
    assert io.algebra_from_json(d) == g


def test_algebra_rejects_bad_pairs():
    base = {"name": "x", "dim": 2, "basis": ["a", "b"]}
    with pytest.raises(io.FormatError):
        io.algebra_from_json({**base, "brackets": [{"i": 1, "j": 0, "coeffs": {"0": "1"}}]})
    with pytest.raises(io.FormatError):
        io.algebra_from_json({**base, "brackets": [{"i": 0, "j": 1, "coeffs": {"5": "1"}}]})
    with pytest.raises(io.FormatError):
        io.algebra_from_json({**base, "brackets": [{"i": 0, "j": 1, "coeffs": {"0": "x/y"}}]})


def test_numeric_scalars_keep_17_digits():
    x = 0.1 + 0.2
    s = io.scalar_to_str(x)
    assert len(re.sub(r"[^0-9]", "", s.split("e")[0]).lstrip("0")) <= 17
    assert float(s) == x
    assert io.parse_scalar("3/4") == la.frac("3/4")
    assert isinstance(io.parse_scalar("0.5"), float)


@pytest.mark.parametrize("name, kw", CATALOG_CASES)
def test_catalog_json_round_trip(name, kw):
    g, r, gamma = catalog(name, **kw)
    d = json.loads(json.dumps(io.realization_to_json(r)))
    r2 = io.realization_from_json(d)
    assert r2.mode == r.mode and r2.algebra == r.algebra
    assert io.realization_to_json(r2) == d
    s = json.loads(json.dumps(io.subgroup_to_json(gamma)))
    gamma2 = io.subgroup_from_json(s, r2)
    assert io.subgroup_to_json(gamma2) == s


def test_realization_without_algebra_derives_constants():
    _, r, _ = catalog("heisenberg", n=3)
    d = io.realization_to_json(r)
    del d["algebra"]
    assert io.realization_from_json(d).algebra.brackets == r.algebra.brackets


def test_polynomial_json():
    from lieshull.poly import RationalPolynomial

    p = RationalPolynomial([1, "-1/2", 1])
    assert io.polynomial_to_json(p) == ["1", "-1/2", "1"]
    assert io.polynomial_from_json(["1", "-1/2", "1"]) == p


# ---------------------------------------------------------------- CLI


def test_validate_catalog_files(files):
    code, rep, _ = cli_json("validate", files / "heisenberg.realization.json", files / "heisenberg.subgroup.json")
    assert code == 0 and rep["result"]["valid"] and rep["result"]["generators"] == 2


def test_validate_reports_violation(tmp_path):
    bad = {"name": "bad", "dim": 3, "basis": ["X", "Y", "Z"],
           "brackets": [{"i": 0, "j": 1, "coeffs": {"2": "1"}}, {"i": 1, "j": 2, "coeffs": {"1": "1"}}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    code, rep, _ = cli_json("validate", path)
    assert code == 1
    assert rep["result"]["violations"][0]["triple"] == [0, 1, 2]


def test_classify_heisenberg(files):
    code, rep, _ = cli_json("classify", files / "heisenberg.realization.json")
    assert code == 0 and rep["result"]["nilpotent"] is True and rep["exactness"] == "exact"


def test_classify_paper_example_note(files):
    code, rep, _ = cli_json("classify", files / "paper_example.realization.json")
    assert code == 0
    res = rep["result"]
    assert res["exponential"] is False and res["completely_solvable"] is False
    assert any(n.startswith("discrepancy") for n in res["notes"])


def test_hull_with_verify(files):
    code, rep, _ = cli_json("hull", files / "heisenberg.realization.json", files / "heisenberg.subgroup.json", "--verify")
    assert code == 0 and rep["result"]["dim"] == 3 and rep["result"]["passed"]
    code, rep, _ = cli_json("hull", files / "heisenberg.realization.json", files / "heisenberg.subgroup.json",
                            "--method", "recursive")
    assert code == 0 and rep["result"]["trace"]["root"]["children"]


def test_hull_precondition_exit_code(files):
    code, _, err = cli("hull", files / "paper_example.realization.json", files / "paper_example.subgroup.json",
                       "--method", "recursive")
    assert code == 3 and "precondition" in err
    code, _, _ = cli("hull", files / "heisenberg.realization.json", files / "heisenberg.subgroup.json",
                     "--method", "abelian")
    assert code == 3


def test_density_single_generator(files, tmp_path):
    sub = json.loads((files / "heisenberg.subgroup.json").read_text())
    sub["generators"] = sub["generators"][:1]
    single = tmp_path / "single.json"
    single.write_text(json.dumps(sub))
    code, rep, _ = cli_json("density", files / "heisenberg.realization.json", single)
    assert code == 0 and rep["result"]["dense"] is False
    ideal = tmp_path / "center.json"
    ideal.write_text(json.dumps({"basis": [["0", "0", "1"]]}))
    code, rep, _ = cli_json("density", files / "heisenberg.realization.json", single, "--quotient", ideal)
    assert code == 0 and rep["result"]["quotient"]["dense"] is True
    code, _, _ = cli("density", files / "aff1.realization.json", files / "aff1.subgroup.json")
    assert code == 3


def _rigidity_file(tmp_path, phi, name):
    _, r, gamma = catalog("abelian", n=2)
    path = tmp_path / name
    path.write_text(json.dumps(io.rigidity_input_to_json(input_from_map(gamma, r, la.qarray(phi)))))
    return path


def test_rigidity_exit_codes(tmp_path):
    code, rep, _ = cli_json("rigidity", _rigidity_file(tmp_path, [[2, 1], [1, 1]], "ok.json"))
    assert code == 0 and rep["result"]["verdict"] == "extended"
    assert rep["result"]["phi_star"]["matrix"] == [["2", "1"], ["1", "1"]] and rep["result"]["unique"]
    code, rep, _ = cli_json("rigidity", _rigidity_file(tmp_path, [[1, 2], [0, 0]], "bad.json"))
    assert code == 2 and rep["result"]["verdict"] == "failed"


def test_catalog_errors_and_usage(tmp_path):
    code, _, err = cli("catalog", "semidirect_integer", "--a", "[[-1,0],[0,-1]]", "--dir", tmp_path)
    assert code == 1 and "no principal real logarithm" in err
    assert cli("bogus")[0] == 1
    assert cli()[0] == 1
    assert cli("classify", tmp_path / "missing.json")[0] == 1
    assert cli("--tolerance", "-1", "classify", tmp_path / "x.json")[0] == 1


def test_emitted_files_match_catalog(files):
    _, r, gamma = catalog("paper_example")
    assert json.loads((files / "paper_example.realization.json").read_text()) == io.realization_to_json(r)
    assert len(json.loads((files / "paper_example.subgroup.json").read_text())["generators"]) == 3


def _leaves(data, prefix=""):
    if isinstance(data, dict):
        for k, v in data.items():
            yield from _leaves(v, f"{prefix}.{k}" if prefix else k)
    elif isinstance(data, list):
        for i, v in enumerate(data):
            yield from _leaves(v, f"{prefix}[{i}]")
    else:
        yield prefix, data


def test_text_and_json_share_numbers(files):
    args = ["classify", files / "paper_example.realization.json"]
    _, js, _ = cli(*args)
    _, txt, _ = cli("--output", "text", *args)
    text = txt.replace('"', "")
    for key, value in _leaves(json.loads(js)):
        if key == "timing_s" or isinstance(value, bool) or value is None:
            continue
        assert str(value) in text, key


def test_tolerance_env_fallback(files, monkeypatch):
    monkeypatch.setenv("LIESHULL_TOLERANCE", "1e-7")
    _, rep, _ = cli_json("classify", files / "aff1.realization.json")
    assert rep["tolerance"] == 1e-7
    _, rep, _ = cli_json("--tolerance", "1e-6", "classify", files / "aff1.realization.json")
    assert rep["tolerance"] == 1e-6
    monkeypatch.setenv("LIESHULL_TOLERANCE", "abc")
    assert cli("classify", files / "aff1.realization.json")[0] == 1


def test_seed_is_echoed(files):
    _, rep, _ = cli_json("--seed", "42", "classify", files / "aff1.realization.json")
    assert rep["seed"] == 42
