"""Characteristic polynomials, nilpotent exp / unipotent log, and root analysis.

:func:`classify` decides whether a solvable algebra is completely solvable or
exponential by computing its roots along a flag of ideals. A root is a complex
linear functional ``alpha + i*beta`` on the algebra. In the exact path ``beta`` is
kept as ``sqrt(scale_sq) * gamma`` with rational ``gamma`` and ``scale_sq``, so both
verdicts are decided without rounding:

* completely solvable  iff every ``beta`` vanishes;
* exponential          iff every ``beta`` is a real multiple of its ``alpha``
  (equivalently no ``X`` has ``alpha(X) = 0`` and ``beta(X) != 0``, which is the
  same as ``ad(X)`` having a nonzero purely imaginary eigenvalue).

The criterion is only applied to solvable algebras; anything else is reported
as neither completely solvable nor exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.linalg
import sympy

from . import linalg as la
from .lie import (
    LieAlgebra,
    Subspace,
    ad,
    ad_matrices,
    bracket_space,
    is_nilpotent,
    is_solvable,
    projection_matrix,
    quotient_section,
    validate_structure,
)
from .linalg import DEFAULT_TOL
from .poly import (
    RationalPolynomial,
    count_real_roots,
    count_real_roots_with_multiplicity,
    has_purely_imaginary_nonzero_root,
)

__all__ = [
    "ClassificationReport",
    "LogResult",
    "RootFunctional",
    "SpectraError",
    "char_poly",
    "classify",
    "count_real_roots",
    "has_purely_imaginary_nonzero_root",
    "nilpotent_exp",
    "numeric_exp",
    "triangular_log_numeric",
    "unipotent_log",
]


class SpectraError(ValueError):
    pass


class _Inexact(Exception):
    """Raised when an eigenvalue leaves Q or Q(sqrt(-s)); triggers the numeric path."""


def _square(m) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpectraError(f"expected a square matrix, got shape {m.shape}")
    return m


def char_poly(m) -> RationalPolynomial:
    """Exact ``det(x*I - m)`` by Faddeev-LeVerrier."""
    m = la.qarray(_square(m))
    n = m.shape[0]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = la.qzeros(n, n)
    eye = la.qeye(n)
    for k in range(1, n + 1):
        mk = m @ mk + coeffs[n - k + 1] * eye
        coeffs[n - k] = -sum((m @ mk)[i, i] for i in range(n)) / k
    return RationalPolynomial(coeffs)


# ---------------------------------------------------------------- exp / log


def nilpotent_exp(n_mat, tol=None) -> np.ndarray:
    """``sum_{k<n} N^k / k!`` for nilpotent ``N`` (exact for rational input)."""
    n_mat = _square(n_mat)
    exact = tol is None
    if exact:
        n_mat = la.qarray(n_mat)
    if not la.is_nilpotent(n_mat, tol):
        raise SpectraError("matrix is not nilpotent")
    size = n_mat.shape[0]
    out = la.eye_like_mode(size, exact)
    term = la.eye_like_mode(size, exact)
    for k in range(1, size):
        term = term @ n_mat
        out = out + term * (Fraction(1, math.factorial(k)) if exact else 1.0 / math.factorial(k))
    return out


def unipotent_log(m, tol=None) -> np.ndarray:
    """``sum_{k=1}^{n} (-1)^(k+1) (M - I)^k / k`` for unipotent ``M``."""
    m = _square(m)
    exact = tol is None
    if exact:
        m = la.qarray(m)
    size = m.shape[0]
    x = m - la.eye_like_mode(size, exact)
    if not la.is_nilpotent(x, tol):
        raise SpectraError("matrix is not unipotent")
    out = la.zeros_like_mode((size, size), exact)
    power = la.eye_like_mode(size, exact)
    for k in range(1, size + 1):
        power = power @ x
        c = Fraction((-1) ** (k + 1), k) if exact else (-1) ** (k + 1) / k
        out = out + c * power
    return out


@dataclass(frozen=True)
class LogResult:
    matrix: np.ndarray
    residual: float


def numeric_exp(m) -> np.ndarray:
    return scipy.linalg.expm(np.asarray(m, dtype=float))


def triangular_log_numeric(m, tol: float = DEFAULT_TOL) -> LogResult:
    """Principal real logarithm with its re-exponentiation residual.

    Rejects spectra touching the closed negative real axis, where no principal
    real logarithm exists.
    """
    m = np.asarray(_square(m), dtype=float)
    eig = np.linalg.eigvals(m)
    for lam in eig:
        if abs(lam.imag) <= tol and lam.real <= tol:
            raise SpectraError(f"eigenvalue {lam.real:.6g} on the closed negative real axis")
    log = scipy.linalg.logm(m)
    if np.iscomplexobj(log):
        if np.max(np.abs(log.imag), initial=0.0) > tol * max(1.0, np.max(np.abs(log.real), initial=0.0)):
            raise SpectraError("principal logarithm is not real")
        log = log.real
    residual = float(np.max(np.abs(scipy.linalg.expm(log) - m), initial=0.0))
    if residual > tol * max(1.0, float(np.max(np.abs(m)))) * 1e3:
        raise SpectraError(f"logarithm did not converge (residual {residual:.3g})")
    return LogResult(log, residual)


# ---------------------------------------------------------------- roots


@dataclass(frozen=True)
class RootFunctional:
    """Root ``alpha + i*beta`` with ``beta = sqrt(beta_scale_sq) * gamma``.

    Numeric roots carry ``gamma = beta`` and ``beta_scale_sq = 1``.
    """

    alpha: np.ndarray
    gamma: np.ndarray
    beta_scale_sq: object = Fraction(1)

    @property
    def beta(self) -> np.ndarray:
        return np.sqrt(float(self.beta_scale_sq)) * self.gamma.astype(float)

    @property
    def exact(self) -> bool:
        return la.is_exact(self.alpha)

    def to_json(self) -> dict:
        conv = (lambda v: [str(c) for c in v]) if self.exact else (lambda v: [repr(float(c)) for c in v])
        return {
            "alpha": conv(self.alpha),
            "beta_direction": conv(self.gamma),
            "beta_scale_squared": str(self.beta_scale_sq),
            "beta": [repr(float(c)) for c in self.beta],
        }


@dataclass
class ClassificationReport:
    solvable: Optional[bool]
    nilpotent: Optional[bool]
    completely_solvable: Optional[bool]
    exponential: Optional[bool]
    exactness: str
    roots: list[RootFunctional] = field(default_factory=list)
    flag: list[Subspace] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def verdicts(self) -> dict:
        return {
            "solvable": self.solvable,
            "nilpotent": self.nilpotent,
            "completely_solvable": self.completely_solvable,
            "exponential": self.exponential,
        }

    def chain_holds(self) -> bool:
        """nilpotent => completely solvable => exponential => solvable (on determined flags)."""
        chain = [self.nilpotent, self.completely_solvable, self.exponential, self.solvable]
        for a, b in zip(chain, chain[1:]):
            if a is True and b is False:
                return False
        return True


def _factor_over_q(p: RationalPolynomial) -> list[RationalPolynomial]:
    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x**k for k, c in enumerate(p.coeffs))
    _, factors = sympy.Poly(expr, x, domain="QQ").factor_list()
    out = []
    for f, _mult in factors:
        cs = [Fraction(int(c.p), int(c.q)) for c in reversed(f.all_coeffs())]
        out.append(RationalPolynomial(cs).monic())
    return out


def _rational_sqrt(q: Fraction) -> Optional[Fraction]:
    if q < 0:
        return None
    n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if n * n == q.numerator and d * d == q.denominator:
        return Fraction(n, d)
    return None


def _restrict(a, w, tol):
    """Matrix of ``a`` on the invariant subspace spanned by the rows of ``w``."""
    k = w.shape[0]
    cols = []
    for j in range(k):
        c = la.solve(w.T, a @ w[j], tol)
        if c is None:
            raise SpectraError("subspace is not invariant")
        cols.append(c)
    out = la.zeros_like_mode((k, k), tol is None)
    for j, c in enumerate(cols):
        out[:, j] = c
    return out


def _matpoly(p: RationalPolynomial, b):
    out = la.zeros_like_mode(b.shape, True)
    for c in reversed(p.coeffs):
        out = out @ b + c * la.qeye(b.shape[0])
    return out


def _module_maps(g: LieAlgebra, ideal: Subspace):
    proj = projection_matrix(g, ideal)
    sec = quotient_section(g, ideal, None).matrix
    return proj, sec


def _exact_roots(g: LieAlgebra):
    """Roots and flag of ideals for exact solvable ``g`` (raises ``_Inexact``)."""
    n = g.dim
    derived = bracket_space(g, Subspace.whole(g), Subspace.whole(g))
    ads = ad_matrices(g)
    ideal = Subspace.zero(g)
    roots: list[RootFunctional] = []
    flag: list[Subspace] = []
    while ideal.dim < n:
        p, s = _module_maps(g, ideal)
        d = n - ideal.dim
        ops = [p @ a @ s for a in ads]
        if derived.dim:
            kern = la.nullspace(np.vstack([p @ ad(g, y).matrix @ s for y in derived.vectors]), None)
        else:
            kern = la.qeye(d)
        w = kern
        alpha = la.qzeros(n)
        gamma = la.qzeros(n)
        cplx = None  # (index, shift, scale_sq) defining the complex structure
        for i in range(n):
            b = _restrict(ops[i], w, None)
            candidates = []
            for f in _factor_over_q(char_poly(b)):
                if f.degree == 1:
                    mu = -f.coeffs[0]
                    candidates.append(((0, abs(mu), mu), f))
                elif f.degree == 2 and f.coeffs[1] ** 2 - 4 * f.coeffs[0] < 0:
                    candidates.append(((1, f.coeffs[1], f.coeffs[0]), f))
            if not candidates:
                raise _Inexact(f"eigenvalues of ad({g.basis[i]}) outside Q and Q(sqrt(-s))")
            candidates.sort(key=lambda t: t[0])
            f = candidates[0][1]
            if f.degree == 1:
                mu = -f.coeffs[0]
                w = la.nullspace(b - mu * la.qeye(b.shape[0]), None) @ w
                alpha[i] = mu
                continue
            shift = -f.coeffs[1] / 2
            scale_sq = f.coeffs[0] - shift**2
            alpha[i] = shift
            if cplx is None:
                w = la.nullspace(_matpoly(f, b), None) @ w
                cplx = (i, shift, scale_sq)
                gamma[i] = Fraction(1)
                continue
            j, shift_j, scale_j = cplx
            r = _rational_sqrt(scale_sq / scale_j)
            if r is None:
                raise _Inexact("imaginary parts are not rationally related")
            kj = _restrict(ops[j], w, None) - shift_j * la.qeye(b.shape[0])
            ki = b - shift * la.qeye(b.shape[0])
            for sign in (1, -1):
                sub = la.nullspace(ki - sign * r * kj, None)
                if sub.shape[0]:
                    w = sub @ w
                    gamma[i] = sign * r
                    break
            else:  # pragma: no cover - excluded by commutativity on the kernel
                raise SpectraError("no joint eigenvector")
        v = w[0]
        if cplx is None:
            new = [s @ v]
            roots.append(RootFunctional(alpha, gamma, Fraction(1)))
        else:
            j, shift_j, scale_j = cplx
            v2 = (ops[j] - shift_j * la.qeye(d)) @ v
            new = [s @ v, s @ v2]
            roots.append(RootFunctional(alpha.copy(), gamma.copy(), scale_j))
            roots.append(RootFunctional(alpha.copy(), -gamma, scale_j))
        ideal = Subspace.span(g, ideal.vectors + new)
        flag.append(ideal)
    return roots, flag


def _float_algebra(g: LieAlgebra) -> LieAlgebra:
    brackets = {k: {i: float(c) for i, c in row.items()} for k, row in g.brackets.items()}
    return LieAlgebra(g.basis, brackets, g.name, g.tolerance, True)


def _nullspace_c(m, thresh):
    if m.shape[0] == 0:
        return np.eye(m.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(m)
    k = int(np.sum(s > thresh))
    return vh[k:].conj().T


def _numeric_roots(g: LieAlgebra, tol: float):
    n = g.dim
    rank_tol = max(math.sqrt(tol), tol)
    derived = bracket_space(g, Subspace.whole(g), Subspace.whole(g))
    ads = [a.astype(float) for a in ad_matrices(g)]
    ideal = Subspace.zero(g)
    roots, flag = [], []
    rng = np.random.default_rng(0)
    ambiguous = False
    while ideal.dim < n:
        p, s = _module_maps(g, ideal)
        p, s = p.astype(float), s.astype(float)
        d = n - ideal.dim
        ops = [p @ a @ s for a in ads]
        if derived.dim:
            stack = np.vstack([p @ ad(g, y).matrix.astype(float) @ s for y in derived.vectors])
            kern = _nullspace_c(stack, rank_tol).real
            kern, _ = np.linalg.qr(kern)
        else:
            kern = np.eye(d)
        if kern.shape[1] == 0:
            raise SpectraError("derived algebra acts without common kernel")
        restricted = [np.linalg.lstsq(kern, a @ kern, rcond=None)[0] for a in ops]
        combo = sum(c * b for c, b in zip(rng.normal(size=n), restricted))
        eig = np.linalg.eigvals(combo)
        order = sorted(eig, key=lambda z: (abs(z.imag) > tol, abs(z), z.real, -z.imag))
        mu = order[0]
        w = _nullspace_c(combo - mu * np.eye(combo.shape[0]), rank_tol)
        if w.shape[1] == 0:
            w = _nullspace_c(combo - mu * np.eye(combo.shape[0]), 1e3 * rank_tol)
        lam = np.zeros(n, dtype=complex)
        for i, b in enumerate(restricted):
            bw = np.linalg.pinv(w) @ b @ w
            lam[i] = np.trace(bw) / bw.shape[0]
            sub = _nullspace_c(bw - lam[i] * np.eye(bw.shape[0]), rank_tol)
            if sub.shape[1]:
                w = w @ sub
        v = kern @ w[:, 0]
        v = v / v[int(np.argmax(np.abs(v)))]
        imag = float(np.max(np.abs(lam.imag)))
        if tol < imag < 100 * tol:
            ambiguous = True
        if imag <= tol:
            new = [s @ v.real]
            roots.append(RootFunctional(lam.real.copy(), np.zeros(n), 1.0))
        else:
            new = [s @ v.real, s @ v.imag]
            roots.append(RootFunctional(lam.real.copy(), lam.imag.copy(), 1.0))
            roots.append(RootFunctional(lam.real.copy(), -lam.imag.copy(), 1.0))
        ideal = Subspace.span(g, ideal.vectors + new, tol=rank_tol)
        flag.append(ideal)
    return roots, flag, ambiguous


def _beta_off_alpha(root: RootFunctional) -> tuple[bool, Optional[np.ndarray]]:
    """Exact test whether ``gamma`` is not a multiple of ``alpha``, with a witness ``X``."""
    a, c = root.alpha, root.gamma
    if all(x == 0 for x in c):
        return False, None
    aa = sum(x * x for x in a)
    if aa == 0:
        return True, c.copy()
    x = c - (sum(p * q for p, q in zip(c, a)) / aa) * a
    if all(v == 0 for v in x):
        return False, None
    return True, x


def classify(g: LieAlgebra, tol: float | None = None) -> ClassificationReport:
    """Solvable / nilpotent / completely solvable / exponential verdicts for ``g``."""
    if not validate_structure(g).valid:
        raise SpectraError("structure constants violate the Jacobi identity")
    tol = g.tolerance if tol is None else tol
    if g.exact_source is not None:
        return classify(g.exact_source, tol)
    solvable = is_solvable(g)
    nilpotent = is_nilpotent(g)
    if not solvable:
        return ClassificationReport(
            False, nilpotent, False, False, "exact" if g.exact else "numeric",
            notes=["not solvable: the root criteria do not apply"],
        )
    if g.exact:
        try:
            roots, flag = _exact_roots(g)
        except _Inexact as exc:
            return _classify_mixed(g, tol, solvable, nilpotent, str(exc))
        report = ClassificationReport(solvable, nilpotent, None, None, "exact", roots, flag)
        complex_roots = [r for r in roots if any(x != 0 for x in r.gamma)]
        report.completely_solvable = not complex_roots
        if complex_roots:
            report.witnesses["complex_root"] = complex_roots[0]
        report.exponential = True
        for r in roots:
            off, x = _beta_off_alpha(r)
            if off:
                report.exponential = False
                report.witnesses["imaginary_direction"] = x
                break
        if report.completely_solvable:
            report.witnesses["flag_dims"] = [f.dim for f in flag]
        _sturm_crosscheck(g, report)
        return report
    return _classify_numeric(g, tol, solvable, nilpotent)


def _classify_numeric(g, tol, solvable, nilpotent) -> ClassificationReport:
    roots, flag, ambiguous = _numeric_roots(g, tol)
    report = ClassificationReport(solvable, nilpotent, None, None, "numeric", roots, flag)
    imag = max((float(np.max(np.abs(r.beta), initial=0.0)) for r in roots), default=0.0)
    if imag <= tol:
        report.completely_solvable = True
    elif imag >= 100 * tol:
        report.completely_solvable = False
    if ambiguous:
        report.completely_solvable = None
    verdict: Optional[bool] = True
    for r in roots:
        a, b = r.alpha.astype(float), r.beta
        if np.linalg.norm(b) <= tol:
            continue
        na = np.linalg.norm(a)
        off = b if na <= tol else b - (b @ a) / (a @ a) * a
        dist = float(np.linalg.norm(off))
        if dist >= 100 * tol:
            verdict = False
            report.witnesses["imaginary_direction"] = off
            break
        if dist > tol:
            verdict = None
    report.exponential = verdict
    if nilpotent:
        report.completely_solvable = report.exponential = True
    if report.completely_solvable is None or report.exponential is None:
        report.notes.append("numeric roots could not be separated from the decision boundary at this tolerance")
    return report


def _classify_mixed(g, tol, solvable, nilpotent, reason) -> ClassificationReport:
    """Exact Sturm verdicts where they settle the question, numeric roots otherwise.

    For solvable ``g`` the eigenvalues of ``ad(b_i)`` are the values of the roots
    at ``b_i``, so all of them being real is equivalent to complete solvability.
    """
    report = _classify_numeric(_float_algebra(g), tol, solvable, nilpotent)
    report.notes.append(f"exact root path abandoned: {reason}")
    polys = [char_poly(ad(g, g.unit(i)).matrix) for i in range(g.dim)]
    all_real = all(count_real_roots_with_multiplicity(p) == g.dim for p in polys)
    report.completely_solvable = all_real
    imaginary = [i for i, p in enumerate(polys) if has_purely_imaginary_nonzero_root(p)]
    if all_real:
        report.exponential = True
    elif imaginary:
        report.exponential = False
        report.witnesses["imaginary_direction"] = g.unit(imaginary[0])
    if report.exponential is not None:
        report.exactness = "exact"
        report.notes.append("verdicts decided by Sturm counts on ad of the basis elements")
    return report


def _sturm_crosscheck(g: LieAlgebra, report: ClassificationReport) -> None:
    """Per-basis-element necessary conditions, decided by Sturm sequences."""
    for i in range(g.dim):
        p = char_poly(ad(g, g.unit(i)).matrix)
        if has_purely_imaginary_nonzero_root(p) and report.exponential:
            raise SpectraError(f"inconsistent: ad({g.basis[i]}) has a purely imaginary root")  # pragma: no cover
        if count_real_roots_with_multiplicity(p) < g.dim and report.completely_solvable:
            raise SpectraError(f"inconsistent: ad({g.basis[i]}) has a non-real root")  # pragma: no cover
