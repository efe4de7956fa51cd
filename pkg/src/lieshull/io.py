"""JSON formats for algebras, realizations, subgroups and reports.

Rationals are written as ``"p/q"`` strings and doubles as 17-significant-digit
decimal strings, so every emitted file parses back to the same values.
"""

from __future__ import annotations

import dataclasses
import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from . import linalg as la
from .groups import EXACT, GeneratedSubgroup, GroupElement, MatrixRealization
from .lie import LieAlgebra, LinearMap, Subspace
from .poly import RationalPolynomial


class FormatError(ValueError):
    pass


_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


def scalar_to_str(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(la.frac(x))


def parse_scalar(s, numeric: bool = False):
    if isinstance(s, bool):
        raise FormatError(f"not a number: {s!r}")
    if isinstance(s, int):
        return float(s) if numeric else Fraction(s)
    if isinstance(s, float):
        return s
    if not isinstance(s, str):
        raise FormatError(f"not a number: {s!r}")
    try:
        if _RATIONAL.match(s) and not numeric:
            return Fraction(s.replace(" ", ""))
        return float(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"not a number: {s!r}") from exc


def matrix_to_json(m) -> list:
    return [[scalar_to_str(x) for x in row] for row in np.asarray(m)]


def parse_matrix(rows, numeric: bool = False) -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise FormatError("matrix must be a list of rows")
    if len({len(r) for r in rows}) > 1:
        raise FormatError("ragged matrix")
    vals = [[parse_scalar(x, numeric) for x in r] for r in rows]
    if numeric or any(isinstance(x, float) for r in vals for x in r):
        return np.array(vals, dtype=float).reshape(len(rows), -1)
    return la.qarray(vals).reshape(len(rows), -1)


# ---------------------------------------------------------------- algebras


def algebra_to_json(g: LieAlgebra) -> dict:
    src = g.exact_source or g
    brackets = [
        {"i": i, "j": j, "coeffs": {str(k): scalar_to_str(c) for k, c in sorted(row.items())}}
        for (i, j), row in sorted(src.brackets.items())
    ]
    out = {"name": src.name, "dim": src.dim, "basis": list(src.basis), "brackets": brackets}
    if src.numeric:
        out["numeric"] = True
    return out


def _require(d: dict, *keys):
    if not isinstance(d, dict):
        raise FormatError("expected a JSON object")
    missing = [k for k in keys if k not in d]
    if missing:
        raise FormatError(f"missing field(s): {', '.join(missing)}")


def algebra_from_json(d: dict, tolerance: float = la.DEFAULT_TOL) -> LieAlgebra:
    _require(d, "dim", "brackets")
    n = d["dim"]
    if not isinstance(n, int) or n < 0:
        raise FormatError("dim must be a non-negative integer")
    basis = d.get("basis") or [f"b{k + 1}" for k in range(n)]
    if len(basis) != n:
        raise FormatError(f"basis has {len(basis)} names, dim is {n}")
    numeric = bool(d.get("numeric", False))
    brackets: dict = {}
    for entry in d["brackets"]:
        _require(entry, "i", "j", "coeffs")
        i, j = entry["i"], entry["j"]
        if not (isinstance(i, int) and isinstance(j, int) and 0 <= i < j < n):
            raise FormatError(f"bracket pair ({i}, {j}) must satisfy 0 <= i < j < {n}")
        if (i, j) in brackets:
            raise FormatError(f"duplicate bracket pair ({i}, {j})")
        row = {}
        for k, c in entry["coeffs"].items():
            try:
                k = int(k)
            except ValueError as exc:
                raise FormatError(f"bad coefficient index {k!r}") from exc
            if not 0 <= k < n:
                raise FormatError(f"coefficient index {k} out of range")
            row[k] = parse_scalar(c, numeric)
        brackets[(i, j)] = row
    return LieAlgebra(tuple(basis), brackets, d.get("name", ""), tolerance, numeric)


def algebra_from_matrices(mats, exact: bool, tolerance: float = la.DEFAULT_TOL) -> LieAlgebra:
    """Structure constants read off matrix commutators of a basis."""
    n = len(mats)
    flat = np.column_stack([np.asarray(m).reshape(-1) for m in mats]) if n else None
    tol = None if exact else tolerance
    brackets = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = mats[i] @ mats[j] - mats[j] @ mats[i]
            x = la.solve(flat, c.reshape(-1), tol)
            if x is None:
                raise FormatError(f"commutator of basis matrices {i}, {j} leaves their span")
            brackets[(i, j)] = {k: v for k, v in enumerate(x) if v != 0}
    return LieAlgebra(tuple(f"b{k + 1}" for k in range(n)), brackets, "", tolerance, not exact)


# ---------------------------------------------------------------- realizations


def realization_to_json(r: MatrixRealization) -> dict:
    return {
        "matrix_size": r.size,
        "mode": r.mode,
        "basis_matrices": [matrix_to_json(m) for m in r.basis_matrices],
        "algebra": algebra_to_json(r.algebra),
    }


def realization_from_json(d: dict, tolerance: float = la.DEFAULT_TOL) -> MatrixRealization:
    _require(d, "matrix_size", "mode", "basis_matrices")
    exact = d["mode"] == EXACT
    mats = [parse_matrix(m, not exact) for m in d["basis_matrices"]]
    size = d["matrix_size"]
    if any(m.shape != (size, size) for m in mats):
        raise FormatError(f"basis matrices must be {size}x{size}")
    if "algebra" in d:
        g = algebra_from_json(d["algebra"], tolerance)
    else:
        g = algebra_from_matrices(mats, exact, tolerance)
    return MatrixRealization(g, tuple(mats), d["mode"], tolerance)


def subgroup_to_json(gamma: GeneratedSubgroup) -> dict:
    return {"name": gamma.name, "generators": [{"matrix": matrix_to_json(x.matrix)} for x in gamma.generators]}


def elements_from_json(items, r: MatrixRealization) -> tuple[GroupElement, ...]:
    out = []
    for item in items:
        _require(item, "matrix")
        m = parse_matrix(item["matrix"], not r.exact)
        if m.shape != (r.size, r.size):
            raise FormatError(f"generator matrix must be {r.size}x{r.size}")
        out.append(r.element(m))
    return tuple(out)


def subgroup_from_json(d: dict, r: MatrixRealization) -> GeneratedSubgroup:
    _require(d, "generators")
    return GeneratedSubgroup(r, elements_from_json(d["generators"], r), d.get("name", ""))


def rigidity_input_to_json(inp) -> dict:
    return {
        "source": realization_to_json(inp.r1),
        "target": realization_to_json(inp.r2),
        "generators": [{"matrix": matrix_to_json(x.matrix)} for x in inp.generators],
        "images": [{"matrix": matrix_to_json(x.matrix)} for x in inp.images],
    }


def rigidity_input_from_json(d: dict, tolerance: float = la.DEFAULT_TOL):
    from .rigidity import RigidityInput

    _require(d, "source", "target", "generators", "images")
    r1 = realization_from_json(d["source"], tolerance)
    r2 = realization_from_json(d["target"], tolerance)
    return RigidityInput(r1, r2, elements_from_json(d["generators"], r1), elements_from_json(d["images"], r2))


def subspace_from_json(d, g: LieAlgebra) -> Subspace:
    """``{"basis": [[...], ...]}`` (or a bare list of vectors) in algebra coordinates."""
    rows = d["basis"] if isinstance(d, dict) else d
    vecs = [g.vector([parse_scalar(x, not g.exact) for x in v]) for v in rows]
    return Subspace.span(g, vecs)


def polynomial_to_json(p: RationalPolynomial) -> list[str]:
    return p.to_strings()


def polynomial_from_json(items) -> RationalPolynomial:
    return RationalPolynomial.from_strings(items)


# ---------------------------------------------------------------- reports


def to_jsonable(obj: Any) -> Any:
    """Generic conversion of report objects into plain JSON values."""
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, LieAlgebra):
        return algebra_to_json(obj)
    if isinstance(obj, Subspace):
        return {"dim": obj.dim, "basis": [[scalar_to_str(x) for x in v] for v in obj.vectors]}
    if isinstance(obj, LinearMap):
        return {"matrix": matrix_to_json(obj.matrix)}
    if isinstance(obj, MatrixRealization):
        return realization_to_json(obj)
    if isinstance(obj, RationalPolynomial):
        return polynomial_to_json(obj)
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return matrix_to_json(obj)
        return [scalar_to_str(x) for x in obj.reshape(-1)]
    if hasattr(obj, "to_json") and not isinstance(obj, type):
        return obj.to_json()
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def dump(obj, path) -> None:
    Path(path).write_text(json.dumps(to_jsonable(obj), indent=2) + "\n")

