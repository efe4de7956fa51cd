"""Syndetic hulls of finitely generated subgroups, with verification certificates.

All hulls are returned as Lie subalgebras of the ambient algebra; the hull group
is ``exp`` of that subalgebra. Three constructions are available:

``log_span_hull``   Lie closure of the generator logs. For unipotent realizations
                    this is the algebra of the Zariski closure; for completely
                    solvable groups it is the minimal connected subgroup, which is
                    the unique syndetic hull.
``abelian_hull``    plain span of the logs of pairwise commuting generators.
``hull_recursive``  the commutator / normalizer / quotient / abelian-base-case
                    construction, traced step by step and cross-checked against
                    ``log_span_hull``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import linalg as la
from .groups import (
    GeneratedSubgroup,
    GroupError,
    adjoint_of,
    commutator,
    group_log,
    inverse,
)
from .lie import (
    LieAlgebra,
    LinearMap,
    Subspace,
    bracket,
    bracket_space,
    is_ideal,
    lie_closure,
    normalizer_subalg,
    quotient_algebra,
)
from .spectra import classify

SATURATION_NOTE = (
    "Gamma intersected with [G,G] is approximated from below by conjugation-saturated "
    "commutators of the generators, iterated until the hull dimension is stable for two rounds"
)


class HullError(ValueError):
    pass


class NonCommutingError(HullError):
    pass


class SaturationError(HullError):
    pass


class PreconditionError(HullError):
    pass


@dataclass
class TraceStep:
    name: str
    subspace: Optional[Subspace] = None
    detail: dict = field(default_factory=dict)
    children: list["TraceStep"] = field(default_factory=list)

    def leaves(self) -> list["TraceStep"]:
        if not self.children:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]


@dataclass
class DerivationTrace:
    root: TraceStep
    notes: list[str] = field(default_factory=list)

    def steps(self) -> list[TraceStep]:
        out, stack = [], [self.root]
        while stack:
            s = stack.pop(0)
            out.append(s)
            stack = s.children + stack
        return out

    def find(self, name: str) -> Optional[TraceStep]:
        return next((s for s in self.steps() if s.name == name), None)


@dataclass
class HullReport:
    hull: Subspace
    method: str
    exactness: str
    justification: str = ""
    checks: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    trace: Optional[DerivationTrace] = None

    @property
    def passed(self) -> bool:
        """True when every boolean certificate in ``checks`` holds."""
        flags = [v for v in self.checks.values() if isinstance(v, bool)]
        return all(flags)


def _exactness(gamma: GeneratedSubgroup) -> str:
    return "exact" if gamma.realization.exact else "numeric"


def _logs(gamma: GeneratedSubgroup) -> list[np.ndarray]:
    r = gamma.realization
    out = []
    for i, x in enumerate(gamma.generators):
        try:
            out.append(group_log(r, x))
        except GroupError as exc:
            raise HullError(f"generator {i} has no logarithm: {exc}") from exc
    return out


def residual(sub: Subspace, v) -> float:
    """Size of the component of ``v`` outside ``sub`` (after RREF reduction)."""
    v = np.asarray(v)
    for row, p in zip(sub.basis, sub.pivots):
        v = v - v[p] * row
    return la.max_abs(v)


def _membership(sub: Subspace, logs) -> list[dict]:
    return [{"generator": i, "in_hull": sub.contains(v), "residual": residual(sub, v)} for i, v in enumerate(logs)]


def _justify(g: LieAlgebra, realization_exact: bool) -> tuple[str, list[str]]:
    cls = classify(g)
    if cls.nilpotent and realization_exact:
        return "Zariski closure of the unipotent group generated by Gamma (unique syndetic hull)", []
    if cls.completely_solvable:
        return "minimal connected subgroup containing Gamma; unique syndetic hull in a completely solvable group", []
    return "minimal connected subgroup", [
        "minimal connected subgroup only - syndetic property not guaranteed "
        "(ambient group is not known to be nilpotent or completely solvable; density not checked)"
    ]


def log_span_hull(gamma: GeneratedSubgroup) -> HullReport:
    r = gamma.realization
    g = r.algebra
    logs = _logs(gamma)
    h = lie_closure(g, logs)
    why, warn = _justify(g, r.exact)
    report = HullReport(h, "log-span", _exactness(gamma), why, warnings=warn)
    report.checks["membership"] = _membership(h, logs)
    report.checks["logs_in_hull"] = all(m["in_hull"] for m in report.checks["membership"])
    report.checks["bracket_closed"] = lie_closure(g, h.vectors).dim == h.dim
    return report


def _commute(a, b) -> bool:
    c = commutator(a, b)
    r = a.realization
    return la.equal(c.matrix, r.identity().matrix, None if r.exact else r.tolerance * 1e3)


def abelian_hull(gamma: GeneratedSubgroup) -> HullReport:
    """Span of the generator logs, for pairwise commuting generators."""
    r = gamma.realization
    g = r.algebra
    gens = gamma.generators
    for i, j in combinations(range(len(gens)), 2):
        if not _commute(gens[i], gens[j]):
            raise NonCommutingError(f"generators {i} and {j} do not commute")
    logs = _logs(gamma)
    h = Subspace.span(g, logs)
    report = HullReport(h, "abelian", _exactness(gamma), "span of the logs of a commuting generating set")
    fixed, vanish = [], []
    for i, j in combinations(range(len(gens)), 2):
        ad_i = adjoint_of(r, gens[i])
        fixed.append(la.all_zero(ad_i(logs[j]) - logs[j], r.tol if r.tol is None else 1e3 * r.tol))
        vanish.append(la.all_zero(bracket(g, logs[i], logs[j]), r.tol if r.tol is None else 1e3 * r.tol))
    if not all(vanish):
        raise HullError("brackets of commuting logs do not vanish: realization outside the exponential regime")
    report.checks["membership"] = _membership(h, logs)
    report.checks["logs_in_hull"] = all(m["in_hull"] for m in report.checks["membership"])
    report.checks["ad_fixes_logs"] = all(fixed)
    report.checks["log_brackets_vanish"] = True
    report.checks["bracket_closed"] = True
    return report


def _ad_image(ad_map: LinearMap, h: Subspace) -> Subspace:
    return Subspace.span(h.parent, [ad_map(v) for v in h.vectors])


def hull_verify(gamma: GeneratedSubgroup, h: Subspace) -> HullReport:
    """Certificates for ``h`` as a hull of ``gamma``.

    (a) every generator log lies in ``h``; (b) ``Ad(gamma_i) h = h``; (c) the logs
    span ``h`` modulo ``[h, h]``, the checkable necessary condition for
    cocompactness at the level of the abelianization.
    """
    r = gamma.realization
    g = r.algebra
    logs = _logs(gamma)
    report = HullReport(h, "verify", _exactness(gamma), "certificate check of a supplied subalgebra")
    report.checks["bracket_closed"] = lie_closure(g, h.vectors).dim == h.dim
    report.checks["membership"] = _membership(h, logs)
    report.checks["logs_in_hull"] = all(m["in_hull"] for m in report.checks["membership"])
    invariant = [_ad_image(adjoint_of(r, x), h) == h for x in gamma.generators]
    report.checks["ad_invariance"] = invariant
    report.checks["ad_invariant"] = all(invariant)
    hh = bracket_space(g, h, h)
    inside = [v for v in logs if h.contains(v)]
    rank = Subspace.span(g, hh.vectors + inside).dim - hh.dim
    report.checks["abelianization_rank"] = [rank, h.dim - hh.dim]
    report.checks["abelianization_spans"] = rank == h.dim - hh.dim
    return report


def subalgebra_as_algebra(g: LieAlgebra, h: Subspace) -> tuple[LieAlgebra, LinearMap]:
    """``h`` as a Lie algebra on its RREF basis, with the inclusion into ``g``."""
    basis = h.vectors
    brackets = {}
    for a, b in combinations(range(len(basis)), 2):
        c = h.coordinates(bracket(g, basis[a], basis[b]))
        if c is None:
            raise HullError("subspace is not bracket-closed")
        brackets[(a, b)] = {k: v for k, v in enumerate(c) if v != 0}
    names = tuple(f"h{k + 1}" for k in range(len(basis)))
    sub = LieAlgebra(names, brackets, f"{g.name}|sub", g.tolerance, numeric=not g.exact)
    incl = la.zeros_like_mode((g.dim, len(basis)), g.exact)
    for k, v in enumerate(basis):
        incl[:, k] = v
    return sub, LinearMap(sub, g, incl)


def _saturate(gamma: GeneratedSubgroup, seeds: list) -> tuple[Subspace, int]:
    r = gamma.realization
    g = r.algebra
    ads = []
    for x in gamma.generators:
        ads += [adjoint_of(r, x), adjoint_of(r, inverse(x))]
    s = lie_closure(g, seeds)
    stable = 0
    rounds = 0
    while stable < 2:
        rounds += 1
        if rounds > g.dim + 2:
            raise SaturationError(f"commutator saturation exceeded {g.dim + 2} rounds")
        vecs = list(s.vectors)
        for a in ads:
            vecs += [a(v) for v in s.vectors]
        nxt = lie_closure(g, vecs)
        stable = stable + 1 if nxt.dim == s.dim else 0
        s = nxt
    return s, rounds


def hull_recursive(gamma: GeneratedSubgroup) -> tuple[HullReport, DerivationTrace]:
    """Hull via the commutator subgroup, its normalizer, a quotient and an abelian base case."""
    r = gamma.realization
    g = r.algebra
    cls = classify(g)
    if not cls.completely_solvable:
        raise PreconditionError("hull_recursive needs a completely solvable ambient algebra")
    gens = gamma.generators
    logs = _logs(gamma)
    derived = bracket_space(g, Subspace.whole(g), Subspace.whole(g))
    comms = [commutator(gens[i], gens[j]) for i, j in combinations(range(len(gens)), 2)]
    comm_logs = [group_log(r, c) for c in comms]
    s1, rounds = _saturate(gamma, comm_logs)
    if not s1.issubset(derived):
        raise SaturationError("saturated commutator hull left [g, g]")
    root = TraceStep("hull", detail={"ambient_dim": g.dim})
    trace = DerivationTrace(root, [SATURATION_NOTE])
    invariant = all(_ad_image(adjoint_of(r, x), s1) == s1 for x in gens)

    norm = normalizer_subalg(g, s1)
    if not all(norm.contains(v) for v in logs):
        raise SaturationError("a generator log is outside the normalizer of the commutator hull")
    n_alg, incl = subalgebra_as_algebra(g, norm)
    s1_n = Subspace.span(n_alg, [norm.coordinates(v) for v in s1.vectors])
    if not is_ideal(n_alg, s1_n):
        raise SaturationError("the commutator hull is not an ideal of its normalizer")
    q, proj = quotient_algebra(n_alg, s1_n)
    images = [proj(norm.coordinates(v)) for v in logs]
    tol = q.tol if q.tol is None else 1e3 * q.tol
    for i, j in combinations(range(len(images)), 2):
        if not la.all_zero(bracket(q, images[i], images[j]), tol):
            raise SaturationError(
                f"images of generators {i} and {j} do not commute in the quotient: saturation incomplete"
            )
    base = Subspace.span(q, images)
    leaf = TraceStep(
        "abelian base case",
        base,
        {"quotient_dim": q.dim, "images_dim": base.dim, "method": "span of commuting logs"},
    )
    lifted = [incl(norm.coordinates(v)) for v in logs]
    hull = Subspace.span(g, s1.vectors + lifted)

    if s1.dim == 0:
        leaf.detail["note"] = "commutator step empty"
        root.children = [leaf]
    else:
        # a chain: each step feeds the next, the abelian base case is the only leaf
        quot = TraceStep("quotient", None, {"dim": q.dim}, [leaf])
        nstep = TraceStep("normalizer", norm, {"generators_inside": True}, [quot])
        cstep = TraceStep(
            "commutator hull",
            s1,
            {"commutators": len(comms), "saturation_rounds": rounds, "ad_invariant": invariant},
            [nstep],
        )
        root.children = [TraceStep("derived algebra", derived, {}, [cstep])]
    root.subspace = hull
    why, warn = _justify(g, r.exact)
    report = HullReport(hull, "recursive", _exactness(gamma), why, warnings=warn, trace=trace)
    report.checks["membership"] = _membership(hull, logs)
    report.checks["logs_in_hull"] = all(m["in_hull"] for m in report.checks["membership"])
    report.checks["generators_normalize_commutator_hull"] = invariant
    report.checks["bracket_closed"] = lie_closure(g, hull.vectors).dim == hull.dim
    report.checks["agrees_with_log_span"] = hull == log_span_hull(gamma).hull
    return report, trace


METHODS = {
    "log-span": lambda gamma: (log_span_hull(gamma), None),
    "abelian": lambda gamma: (abelian_hull(gamma), None),
    "recursive": hull_recursive,
}
