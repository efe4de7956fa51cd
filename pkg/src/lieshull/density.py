"""Algebraic density of subgroups whose adjoint images are unipotent.

For a group generated by unipotent operators the Zariski closure is ``exp`` of
the Lie closure of their logarithms, so density reduces to comparing two
subalgebras of ``gl(g)``: that Lie closure and ``ad(g)``. Operator-space
computations reuse :mod:`lieshull.lie` on the ``n^2``-dimensional algebra
``gl(n)`` with the commutator bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from . import linalg as la
from .groups import GeneratedSubgroup, adjoint_of
from .hull import HullReport, log_span_hull, subalgebra_as_algebra
from .lie import (
    LieAlgebra,
    Subspace,
    ad,
    is_ideal,
    is_solvable,
    lie_closure,
    quotient_algebra,
    quotient_section,
)
from .spectra import unipotent_log


class DensityError(ValueError):
    pass


class NonUnipotentError(DensityError):
    """An adjoint image is not unipotent; general real-algebraic closures are not computed."""


class InvarianceError(DensityError):
    def __init__(self, generator: int, message: str):
        super().__init__(message)
        self.generator = generator


@lru_cache(maxsize=None)
def gl_algebra(n: int, numeric: bool = False) -> LieAlgebra:
    """``gl(n)`` on the basis ``E_ij`` (index ``i*n + j``)."""
    brackets: dict = {}
    for a in range(n * n):
        i, j = divmod(a, n)
        for b in range(a + 1, n * n):
            k, l = divmod(b, n)
            # [E_ij, E_kl] = d_jk E_il - d_li E_kj
            row: dict = {}
            if j == k:
                row[i * n + l] = row.get(i * n + l, 0) + 1
            if l == i:
                row[k * n + j] = row.get(k * n + j, 0) - 1
            row = {key: v for key, v in row.items() if v}
            if row:
                brackets[(a, b)] = {key: (float(v) if numeric else Fraction(v)) for key, v in row.items()}
    names = tuple(f"E{i}{j}" for i in range(n) for j in range(n))
    return LieAlgebra(names, brackets, f"gl{n}", numeric=numeric)


def _flat(m) -> np.ndarray:
    return np.asarray(m).reshape(-1)


@dataclass
class DensityReport:
    dense: bool
    closure: Subspace
    ad_image: Subspace
    generator_ad: list = field(default_factory=list)
    unipotent: list = field(default_factory=list)
    exactness: str = "exact"
    notes: list[str] = field(default_factory=list)


def _operator_density(g: LieAlgebra, ad_mats: list, exact: bool) -> DensityReport:
    n = g.dim
    gl = gl_algebra(n, not exact)
    tol = None if exact else g.tolerance
    flags = [la.is_nilpotent(m - la.eye_like_mode(n, exact), tol) for m in ad_mats]
    if not all(flags):
        bad = flags.index(False)
        raise NonUnipotentError(f"Ad of generator {bad} is not unipotent: Zariski closure out of scope")
    logs = [_flat(unipotent_log(m, tol)) for m in ad_mats]
    closure = lie_closure(gl, logs)
    image = Subspace.span(gl, [_flat(ad(g, g.unit(i)).matrix) for i in range(n)])
    return DensityReport(closure == image, closure, image, ad_mats, flags, "exact" if exact else "numeric")


def adjoint_subgroup(gamma: GeneratedSubgroup) -> list:
    r = gamma.realization
    return [adjoint_of(r, x).matrix for x in gamma.generators]


def is_algebraically_dense_unipotent(gamma: GeneratedSubgroup) -> DensityReport:
    """Whether ``Ad(G)`` lies in the Zariski closure of ``Ad(Gamma)`` (unipotent regime)."""
    r = gamma.realization
    return _operator_density(r.algebra, adjoint_subgroup(gamma), r.exact)


@dataclass
class IdealReport:
    invariant: list[bool]
    dense: bool
    is_ideal: bool

    @property
    def conforms(self) -> bool:
        """Density plus invariance must force an ideal."""
        return not (self.dense and all(self.invariant)) or self.is_ideal


def invariant_implies_ideal(gamma: GeneratedSubgroup, h: Subspace, dense: Optional[bool] = None) -> IdealReport:
    """Check ``Ad(gamma_i) h = h`` and, under density, that ``h`` is an ideal.

    Raises :class:`InvarianceError` naming the first generator that moves ``h``.
    """
    r = gamma.realization
    g = r.algebra
    invariant = []
    for i, x in enumerate(gamma.generators):
        a = adjoint_of(r, x)
        ok = Subspace.span(g, [a(v) for v in h.vectors]) == h
        invariant.append(ok)
        if not ok:
            raise InvarianceError(i, f"generator {i} does not preserve the subspace")
    if dense is None:
        dense = is_algebraically_dense_unipotent(gamma).dense
    report = IdealReport(invariant, dense, is_ideal(g, h))
    if not report.conforms:
        raise DensityError("dense and invariant subspace is not an ideal")  # pragma: no cover
    return report


def density_in_quotient(gamma: GeneratedSubgroup, ideal: Subspace) -> DensityReport:
    """Density of the image of ``gamma`` in ``g / ideal``."""
    r = gamma.realization
    g = r.algebra
    q, proj = quotient_algebra(g, ideal)
    sec = quotient_section(g, ideal, q)
    mats = [proj.matrix @ m @ sec.matrix for m in adjoint_subgroup(gamma)]
    return _operator_density(q, mats, r.exact)


def ad_preimage(g: LieAlgebra, k: Subspace) -> Subspace:
    """``{X in g : ad(X) in k}`` for a subspace ``k`` of ``gl(g)``."""
    cols = np.column_stack([_flat(ad(g, g.unit(i)).matrix) for i in range(g.dim)])
    if k.dim == 0:
        return Subspace.span(g, list(la.nullspace(cols, g.tol)))
    ann = la.nullspace(k.basis, g.tol)
    if ann.shape[0] == 0:
        return Subspace.whole(g)
    return Subspace.span(g, list(la.nullspace(ann @ cols, g.tol)))


def hull_via_density(gamma: GeneratedSubgroup) -> HullReport:
    """Hull from algebraic density, or inside the ``Ad``-preimage of the closure otherwise."""
    r = gamma.realization
    g = r.algebra
    if not is_solvable(g):
        raise DensityError("ambient algebra is not solvable")
    dens = is_algebraically_dense_unipotent(gamma)
    report = log_span_hull(gamma)
    report.method = "density"
    report.checks["dense"] = dens.dense
    if dens.dense:
        report.justification = "algebraically dense: hull is the minimal connected subgroup containing Gamma"
        report.warnings = []
        return report
    pre = ad_preimage(g, dens.closure)
    if not lie_closure(g, pre.vectors).dim == pre.dim:
        raise DensityError("Ad-preimage is not bracket-closed")
    sub, incl = subalgebra_as_algebra(g, pre)
    mats = []
    for a in dens.generator_ad:
        cols = []
        for v in pre.vectors:
            c = pre.coordinates(a @ v)
            if c is None:
                raise DensityError("Ad-preimage is not invariant under the generators")
            cols.append(c)
        mats.append(np.column_stack(cols) if cols else la.zeros_like_mode((0, 0), g.exact))
    inner = _operator_density(sub, mats, r.exact) if pre.dim else None
    report.checks["preimage_dim"] = pre.dim
    report.checks["dense_in_preimage"] = True if inner is None else inner.dense
    report.checks["hull_in_preimage"] = report.hull.issubset(pre)
    report.justification = (
        "algebraically connected (unipotent closure): hull taken inside the Ad-preimage "
        "of the Zariski closure of Ad(Gamma)"
    )
    report.warnings = []
    report.trace = None
    report.checks["preimage"] = pre
    return report
