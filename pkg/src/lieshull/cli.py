"""Command-line front end.

Exit codes: 0 success, 1 input or validation error, 2 computation failure,
3 precondition not met.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import io
from .density import (
    DensityError,
    NonUnipotentError,
    density_in_quotient,
    hull_via_density,
    is_algebraically_dense_unipotent,
)
from .groups import CATALOG, GroupError, catalog
from .hull import METHODS, HullError, NonCommutingError, PreconditionError, hull_verify
from .lie import LieError, validate_structure
from .linalg import DEFAULT_TOL
from .rigidity import RigidityError, UniquenessError, check_uniqueness, extend_isomorphism
from .spectra import SpectraError, classify

OK, INPUT_ERROR, COMPUTE_ERROR, PRECONDITION = 0, 1, 2, 3

# Catalog entries whose published description disagrees with what the classifier can
# decide; see discrepancy_notes.
DOCUMENTED_CLAIMS = {
    "paper_example": {
        "exponential": True,
        "completely_solvable": False,
        "why": "every real logarithm of an SL(2,Z) matrix with |trace| = 1 has purely imaginary "
        "eigenvalues (here +-i*pi/3), so exp is not injective on the one-parameter subgroup exp(tT)",
    },
}


class UsageError(Exception):
    pass


@dataclass
class SessionConfig:
    tolerance: float = DEFAULT_TOL
    output: str = "json"
    seed: int = 0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise UsageError(f"tolerance must be positive, got {self.tolerance}")
        if self.output not in ("json", "text"):
            raise UsageError(f"unknown output format {self.output!r}")


@dataclass
class Report:
    subcommand: str
    inputs: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    exactness: str = ""
    warnings: list = field(default_factory=list)
    timing: float = 0.0
    seed: Optional[int] = None
    tolerance: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "result": io.to_jsonable(self.result),
            "exactness": self.exactness,
            "warnings": list(self.warnings),
            "timing_s": round(self.timing, 6),
            "seed": self.seed,
            "tolerance": self.tolerance,
        }


def _digest(path: str) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
    except OSError as exc:
        raise io.FormatError(f"cannot read {path}: {exc.strerror}") from exc


def _render_text(data, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(data, dict):
        for k, v in data.items():
            key = f"{prefix}.{k}" if prefix else str(k)
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.extend(_render_text(v, key))
            else:
                lines.append(f"{key}: {_inline(v)}")
    elif isinstance(data, list):
        for i, v in enumerate(data):
            lines.extend(_render_text(v, f"{prefix}[{i}]") if isinstance(v, (dict, list)) else [f"{prefix}[{i}]: {_inline(v)}"])
    else:
        lines.append(f"{prefix}: {_inline(data)}")
    return lines


def _flat_list(v) -> bool:
    if not isinstance(v, list):
        return False
    return all(not isinstance(x, (dict, list)) for x in v) or all(
        isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x) for x in v
    )


def _inline(v) -> str:
    return json.dumps(v) if not isinstance(v, str) else v


def emit(report: Report, cfg: SessionConfig, out=None) -> None:
    out = out or sys.stdout
    data = report.to_json()
    if cfg.output == "json":
        out.write(json.dumps(data, indent=2) + "\n")
    else:
        out.write("\n".join(_render_text(data)) + "\n")


# ---------------------------------------------------------------- loading


def _load_algebra_like(path: str, cfg: SessionConfig):
    """An algebra file, or a realization file (whose algebra is used)."""
    d = io.load(path)
    if isinstance(d, dict) and "basis_matrices" in d:
        r = io.realization_from_json(d, cfg.tolerance)
        return r.algebra, r
    return io.algebra_from_json(d, cfg.tolerance), None


def _load_subgroup(real_path: str, sub_path: str, cfg: SessionConfig):
    r = io.realization_from_json(io.load(real_path), cfg.tolerance)
    return io.subgroup_from_json(io.load(sub_path), r)


# ---------------------------------------------------------------- subcommands


def discrepancy_notes(g, verdicts: dict) -> list[str]:
    """Notes for catalog entries whose documented description the classifier contradicts."""
    claim = DOCUMENTED_CLAIMS.get(g.name)
    if not claim:
        return []
    notes = []
    if verdicts["exponential"] is False and claim["exponential"]:
        notes.append(
            f"discrepancy: {g.name} is documented as exponential, computed exponential=false; {claim['why']}"
        )
    if verdicts["completely_solvable"] is not None and verdicts["completely_solvable"] != claim["completely_solvable"]:
        notes.append(f"discrepancy: {g.name} completely_solvable computed {verdicts['completely_solvable']}")
    return notes


def cmd_validate(args, cfg: SessionConfig, report: Report) -> int:
    g, r = _load_algebra_like(args.file, cfg)
    rep = validate_structure(g)
    result = {"valid": rep.valid, "dim": g.dim, "violations": [{"triple": list(t), "jacobi_sum": res} for t, res in rep.violations]}
    if r is not None:
        result["realization_mode"] = r.mode
        result["realization_residual"] = r.consistency_residual()
    if args.subgroup:
        if r is None:
            raise io.FormatError("a subgroup file needs a realization file, not a bare algebra")
        gamma = io.subgroup_from_json(io.load(args.subgroup), r)
        result["generators"] = len(gamma)
    report.result = result
    report.exactness = "exact" if g.exact else "numeric"
    return OK if rep.valid else INPUT_ERROR


def cmd_classify(args, cfg: SessionConfig, report: Report) -> int:
    g, _ = _load_algebra_like(args.file, cfg)
    cls = classify(g, cfg.tolerance)
    verdicts = cls.verdicts()
    notes = list(cls.notes) + discrepancy_notes(g, verdicts)
    report.result = {
        "name": g.name,
        "dim": g.dim,
        **verdicts,
        "roots": [rt.to_json() for rt in cls.roots],
        "witnesses": cls.witnesses,
        "notes": notes,
    }
    report.exactness = cls.exactness
    return OK


def cmd_hull(args, cfg: SessionConfig, report: Report) -> int:
    gamma = _load_subgroup(args.realization, args.subgroup, cfg)
    if args.method == "density":
        hr, trace = hull_via_density(gamma), None
    else:
        hr, trace = METHODS[args.method](gamma)
    result = {
        "method": hr.method,
        "dim": hr.hull.dim,
        "hull": hr.hull,
        "justification": hr.justification,
        "checks": hr.checks,
    }
    ok = hr.passed
    if args.verify:
        v = hull_verify(gamma, hr.hull)
        result["verify"] = v.checks
        ok = ok and v.passed
    result["passed"] = ok
    if trace is not None:
        result["trace"] = _trace_json(trace)
    report.result = result
    report.warnings.extend(hr.warnings)
    report.exactness = hr.exactness
    return OK if ok else COMPUTE_ERROR


def _trace_json(trace) -> dict:
    def step(s):
        return {
            "name": s.name,
            "dim": s.subspace.dim if s.subspace is not None else None,
            "detail": s.detail,
            "children": [step(c) for c in s.children],
        }

    return {"root": step(trace.root), "notes": list(trace.notes)}


def cmd_rigidity(args, cfg: SessionConfig, report: Report) -> int:
    inp = io.rigidity_input_from_json(io.load(args.file), cfg.tolerance)
    rep = extend_isomorphism(inp, cfg.tolerance)
    result = {
        "verdict": rep.verdict,
        "reason": rep.reason,
        "phi_star": rep.phi_star,
        "hull_hat": rep.hull_hat,
        "certificates": rep.certificates,
    }
    report.warnings.extend(rep.warnings)
    report.exactness = rep.exactness
    report.result = result
    if not rep.extended:
        return COMPUTE_ERROR
    if args.trials:
        result["unique"] = check_uniqueness(inp, args.trials, cfg.seed, cfg.tolerance)
        result["trials"] = args.trials
    return OK


def cmd_density(args, cfg: SessionConfig, report: Report) -> int:
    gamma = _load_subgroup(args.realization, args.subgroup, cfg)
    g = gamma.realization.algebra
    dens = is_algebraically_dense_unipotent(gamma)
    result = {"dense": dens.dense, "closure_dim": dens.closure.dim, "ad_image_dim": dens.ad_image.dim}
    if args.quotient:
        ideal = io.subspace_from_json(io.load(args.quotient), g)
        q = density_in_quotient(gamma, ideal)
        result["quotient"] = {"ideal_dim": ideal.dim, "dense": q.dense, "closure_dim": q.closure.dim,
                              "ad_image_dim": q.ad_image.dim}
    if args.hull:
        hr = hull_via_density(gamma)
        result["hull"] = {"dim": hr.hull.dim, "basis": hr.hull, "justification": hr.justification}
    report.result = result
    report.exactness = dens.exactness
    return OK


def cmd_catalog(args, cfg: SessionConfig, report: Report) -> int:
    params = {}
    if args.n is not None:
        params["n"] = args.n
    if args.a is not None:
        try:
            params["a"] = json.loads(args.a)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--a must be a JSON matrix: {exc.msg}") from exc
    try:
        g, r, gamma = catalog(args.name, **params)
    except TypeError as exc:
        raise UsageError(f"invalid parameters for {args.name}: {exc}") from exc
    outdir = Path(args.dir)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = args.prefix or args.name
    rpath, spath = outdir / f"{stem}.realization.json", outdir / f"{stem}.subgroup.json"
    io.dump(r, rpath)
    io.dump(io.subgroup_to_json(gamma), spath)
    report.result = {"name": args.name, "dim": g.dim, "mode": r.mode, "generators": len(gamma),
                     "files": [str(rpath), str(spath)]}
    report.warnings.extend(r.warnings)
    report.exactness = "exact" if r.exact else "numeric"
    return OK


# ---------------------------------------------------------------- dispatch


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS,
                        help="numeric tolerance (env LIESHULL_TOLERANCE, default 1e-9)")
    common.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="lieshull", description="Syndetic hulls and lattices in solvable Lie groups.")
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--output", choices=("json", "text"), default="json")
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    s = sub.add_parser(parents=[common], name="validate", help="check an algebra or realization file (and optionally a subgroup)")
    s.add_argument("file")
    s.add_argument("subgroup", nargs="?")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser(parents=[common], name="classify", help="solvable / nilpotent / completely solvable / exponential")
    s.add_argument("file")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser(parents=[common], name="hull", help="syndetic hull of a generated subgroup")
    s.add_argument("realization")
    s.add_argument("subgroup")
    s.add_argument("--method", choices=sorted(set(METHODS) | {"density"}), default="log-span")
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_hull)

    s = sub.add_parser(parents=[common], name="rigidity", help="extend a lattice homomorphism to an isomorphism")
    s.add_argument("file")
    s.add_argument("--trials", type=int, default=10, help="uniqueness trials (0 to skip)")
    s.set_defaults(func=cmd_rigidity)

    s = sub.add_parser(parents=[common], name="density", help="algebraic density of Ad(Gamma) (unipotent regime)")
    s.add_argument("realization")
    s.add_argument("subgroup")
    s.add_argument("--quotient", help="ideal file: {\"basis\": [[...], ...]}")
    s.add_argument("--hull", action="store_true", help="also compute the hull through density")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser(parents=[common], name="catalog", help="write realization and subgroup files for a named example")
    s.add_argument("name", choices=sorted(CATALOG))
    s.add_argument("--n", type=int)
    s.add_argument("--a", help="integer matrix as JSON, for semidirect_integer")
    s.add_argument("--dir", default=".")
    s.add_argument("--prefix")
    s.set_defaults(func=cmd_catalog)
    return p


def _tolerance(arg: Optional[float]) -> float:
    if arg is not None:
        return arg
    env = os.environ.get("LIESHULL_TOLERANCE")
    if env:
        try:
            return float(env)
        except ValueError:
            raise UsageError(f"LIESHULL_TOLERANCE is not a number: {env!r}") from None
    return DEFAULT_TOL


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else INPUT_ERROR
    if not getattr(args, "func", None):
        parser.print_usage(err)
        return INPUT_ERROR
    try:
        cfg = SessionConfig(_tolerance(args.tolerance), args.output, args.seed)
    except UsageError as exc:
        err.write(f"lieshull: {exc}\n")
        return INPUT_ERROR
    report = Report(args.command, seed=cfg.seed, tolerance=cfg.tolerance)
    for name in ("file", "subgroup", "realization", "quotient"):
        path = getattr(args, name, None)
        if path and args.command != "catalog":
            try:
                report.inputs[path] = _digest(path)
            except io.FormatError as exc:
                err.write(f"lieshull: {exc}\n")
                return INPUT_ERROR
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = args.func(args, cfg, report)
        report.warnings.extend(str(w.message) for w in caught if str(w.message) not in report.warnings)
    except (PreconditionError, NonCommutingError, NonUnipotentError) as exc:
        err.write(f"lieshull: precondition not met: {exc}\n")
        return PRECONDITION
    except (HullError, DensityError, SpectraError, UniquenessError) as exc:
        err.write(f"lieshull: computation failed: {exc}\n")
        return COMPUTE_ERROR
    except (io.FormatError, LieError, GroupError, UsageError, RigidityError, KeyError, ValueError) as exc:
        err.write(f"lieshull: {exc}\n")
        return INPUT_ERROR
    report.timing = time.perf_counter() - start
    emit(report, cfg, out)
    return code


def main() -> None:
    sys.exit(run())
