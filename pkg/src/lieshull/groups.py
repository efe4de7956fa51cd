"""Matrix realizations of simply connected solvable groups and a small catalog.

A realization assigns to each basis vector of a Lie algebra a square matrix. In
``unipotent-exact`` mode all basis matrices are nilpotent and every group
element is an exact rational unipotent matrix; in ``triangular-numeric`` mode
elements are float matrices and every comparison uses the realization's
tolerance. The two modes never mix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from . import linalg as la
from .lie import LieAlgebra, LinearMap, Subspace, ad, bracket, center, is_nilpotent, semidirect_abelian
from .linalg import DEFAULT_TOL
from .spectra import SpectraError, nilpotent_exp, numeric_exp, triangular_log_numeric, unipotent_log

EXACT = "unipotent-exact"
NUMERIC = "triangular-numeric"
MODES = (EXACT, NUMERIC)


class GroupError(ValueError):
    pass


class NotInGroupError(GroupError):
    """A matrix (or conjugate) lies outside the realized group within tolerance."""


@dataclass(frozen=True, eq=False)
class MatrixRealization:
    algebra: LieAlgebra
    basis_matrices: tuple
    mode: str
    tolerance: float = DEFAULT_TOL
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.mode not in MODES:
            raise GroupError(f"unknown mode {self.mode!r}")
        mats = []
        for m in self.basis_matrices:
            m = np.asarray(m)
            mats.append(la.qarray(m) if self.mode == EXACT else m.astype(float))
        if len(mats) != self.algebra.dim:
            raise GroupError(f"{len(mats)} basis matrices for an algebra of dim {self.algebra.dim}")
        size = mats[0].shape[0] if mats else 0
        if any(m.shape != (size, size) for m in mats):
            raise GroupError("basis matrices must be square and of equal size")
        if self.mode == EXACT and not self.algebra.exact:
            raise GroupError("unipotent-exact mode needs rational structure constants")
        if self.mode == NUMERIC and self.algebra.exact:
            object.__setattr__(self, "algebra", self.algebra.as_numeric())
        object.__setattr__(self, "basis_matrices", tuple(mats))
        if self.mode == EXACT:
            for i, m in enumerate(mats):
                if not la.is_nilpotent(m):
                    raise GroupError(f"basis matrix {i} is not nilpotent")
        res = self.consistency_residual()
        if res > (0 if self.mode == EXACT else self.tolerance):
            raise GroupError(f"matrix commutators disagree with the structure constants (residual {res:.3g})")

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    @property
    def tol(self):
        return None if self.exact else self.tolerance

    @property
    def size(self) -> int:
        return self.basis_matrices[0].shape[0] if self.basis_matrices else 0

    def identity(self) -> "GroupElement":
        return GroupElement(la.eye_like_mode(self.size, self.exact), self)

    def consistency_residual(self) -> float:
        g = self.algebra
        worst = 0.0
        for i, j in combinations(range(g.dim), 2):
            a, b = self.basis_matrices[i], self.basis_matrices[j]
            lhs = a @ b - b @ a
            rhs = self.hat(bracket(g, g.unit(i), g.unit(j)))
            worst = max(worst, la.max_abs(np.asarray(lhs - rhs, dtype=object if self.exact else float)))
        return worst

    def hat(self, x) -> np.ndarray:
        """Matrix of the algebra element with coordinates ``x``."""
        out = la.zeros_like_mode((self.size, self.size), self.exact)
        for c, m in zip(np.asarray(x), self.basis_matrices):
            if c != 0:
                out = out + (la.frac(c) if self.exact else float(c)) * m
        return out

    @cached_property
    def _flat_basis(self) -> np.ndarray:
        cols = [m.reshape(-1) for m in self.basis_matrices]
        if not cols:
            return la.zeros_like_mode((self.size * self.size, 0), self.exact)
        return np.column_stack(cols)

    def coordinates(self, m) -> np.ndarray:
        """Coordinates of a matrix in the realized algebra; raises if it is outside."""
        flat = np.asarray(m).reshape(-1)
        x = la.solve(self._flat_basis, flat, self.tol)
        if x is None:
            raise NotInGroupError("matrix is not in the realized subalgebra")
        return la.qarray(x) if self.exact else np.asarray(x, dtype=float)

    def element(self, m) -> "GroupElement":
        m = np.asarray(m)
        return GroupElement(la.qarray(m) if self.exact else m.astype(float), self)

    def to_json(self) -> dict:
        from .io import realization_to_json

        return realization_to_json(self)


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    realization: MatrixRealization

    def __post_init__(self):
        r = self.realization
        if self.matrix.shape != (r.size, r.size):
            raise GroupError(f"element of shape {self.matrix.shape} in a realization of size {r.size}")
        if r.exact and not la.is_nilpotent(self.matrix - la.qeye(r.size)):
            raise GroupError("element is not unipotent")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.realization is other.realization and la.equal(self.matrix, other.matrix, self.realization.tol)

    def __hash__(self):
        return id(self)


@dataclass(frozen=True, eq=False)
class GeneratedSubgroup:
    realization: MatrixRealization
    generators: tuple[GroupElement, ...]
    name: str = ""

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise GroupError("a generated subgroup needs at least one generator")
        for x in gens:
            if x.realization is not self.realization:
                raise GroupError("generators must share the subgroup's realization")
            if la.rank(x.matrix, self.realization.tol) < self.realization.size:
                raise GroupError("generator is not invertible")
        object.__setattr__(self, "generators", gens)

    def __len__(self):
        return len(self.generators)

    def replace(self, generators) -> "GeneratedSubgroup":
        return GeneratedSubgroup(self.realization, tuple(generators), self.name)


def _same(a: GroupElement, b: GroupElement) -> MatrixRealization:
    if a.realization is not b.realization:
        raise GroupError("realization mismatch")
    return a.realization


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    r = _same(a, b)
    return GroupElement(a.matrix @ b.matrix, r)


def inverse(a: GroupElement) -> GroupElement:
    r = a.realization
    return GroupElement(la.inverse(a.matrix, r.tol), r)


def conjugate(x: GroupElement, by: GroupElement) -> GroupElement:
    """``by * x * by^-1``."""
    _same(x, by)
    return by * x * inverse(by)


def commutator(a: GroupElement, b: GroupElement) -> GroupElement:
    """``a b a^-1 b^-1``."""
    return a * b * inverse(a) * inverse(b)


def power(a: GroupElement, k: int) -> GroupElement:
    base = a if k >= 0 else inverse(a)
    out = a.realization.identity()
    for _ in range(abs(k)):
        out = out * base
    return out


def group_exp(r: MatrixRealization, x) -> GroupElement:
    m = r.hat(x)
    if r.exact:
        return GroupElement(nilpotent_exp(m), r)
    return GroupElement(numeric_exp(m), r)


def matrix_log(r: MatrixRealization, m) -> np.ndarray:
    if r.exact:
        return unipotent_log(m)
    try:
        return triangular_log_numeric(m, r.tolerance).matrix
    except SpectraError as exc:
        raise NotInGroupError(str(exc)) from exc


def group_log(r: MatrixRealization, x: GroupElement) -> np.ndarray:
    """Algebra coordinates of ``log(x)``; raises :class:`NotInGroupError` off the image of exp."""
    if x.realization is not r:
        raise GroupError("realization mismatch")
    coords = r.coordinates(matrix_log(r, x.matrix))
    if not r.exact:
        back = numeric_exp(r.hat(coords))
        if la.max_abs(back - x.matrix) > r.tolerance * max(1.0, la.max_abs(x.matrix)) * 1e3:
            raise NotInGroupError("log residual exceeds tolerance")
    return coords


def adjoint_of(r: MatrixRealization, x: GroupElement) -> LinearMap:
    """Matrix of ``Y -> x Y x^-1`` on the algebra."""
    xi = inverse(x).matrix
    g = r.algebra
    cols = [r.coordinates(x.matrix @ b @ xi) for b in r.basis_matrices]
    m = la.zeros_like_mode((g.dim, g.dim), r.exact)
    for j, c in enumerate(cols):
        m[:, j] = c
    return LinearMap(g, g, m)


def realize_adjoint(g: LieAlgebra) -> MatrixRealization:
    """The adjoint representation as a realization (faithful iff the center is zero)."""
    notes = []
    z = center(g)
    if z.dim:
        notes.append(f"adjoint realization is not faithful: center has dimension {z.dim}")
        warnings.warn(notes[-1], stacklevel=2)
    mode = EXACT if g.exact and is_nilpotent(g) else NUMERIC
    mats = [ad(g, g.unit(i)).matrix for i in range(g.dim)]
    return MatrixRealization(g, tuple(mats), mode, g.tolerance, tuple(notes))


# ---------------------------------------------------------------- catalog


def _unit_matrix(size, i, j, exact=True):
    m = la.zeros_like_mode((size, size), exact)
    m[i, j] = Fraction(1) if exact else 1.0
    return m


def heisenberg(n: int = 3):
    if n < 3 or n % 2 == 0:
        raise GroupError("heisenberg dimension must be odd and at least 3")
    k = (n - 1) // 2
    if k == 1:
        names = ("X", "Y", "Z")
    else:
        names = tuple(f"X{i + 1}" for i in range(k)) + tuple(f"Y{i + 1}" for i in range(k)) + ("Z",)
    brackets = {(i, k + i): {2 * k: 1} for i in range(k)}
    g = LieAlgebra(names, brackets, f"heisenberg{n}")
    size = k + 2
    mats = [_unit_matrix(size, 0, i + 1) for i in range(k)]
    mats += [_unit_matrix(size, i + 1, k + 1) for i in range(k)]
    mats.append(_unit_matrix(size, 0, k + 1))
    r = MatrixRealization(g, tuple(mats), EXACT)
    gens = [group_exp(r, g.unit(i)) for i in range(2 * k)]
    return g, r, GeneratedSubgroup(r, tuple(gens), f"heisenberg{n} lattice")


def abelian(n: int = 2):
    if n < 1:
        raise GroupError("abelian dimension must be positive")
    g = LieAlgebra(tuple(f"e{i + 1}" for i in range(n)), {}, f"abelian{n}")
    mats = [_unit_matrix(n + 1, i, n) for i in range(n)]
    r = MatrixRealization(g, tuple(mats), EXACT)
    gens = [group_exp(r, g.unit(i)) for i in range(n)]
    return g, r, GeneratedSubgroup(r, tuple(gens), f"Z^{n}")


def aff1():
    g = LieAlgebra(("T", "X"), {(0, 1): {1: 1}}, "aff1")
    mats = [_unit_matrix(2, 0, 0), _unit_matrix(2, 0, 1)]
    r = MatrixRealization(g, tuple(mats), NUMERIC)
    gens = [group_exp(r, g.unit(0)), group_exp(r, g.unit(1))]
    return r.algebra, r, GeneratedSubgroup(r, tuple(gens), "aff1 generators")


def semidirect_integer(a, name: str = ""):
    """``R^n x|_A R`` with ``A(t) = exp(tB)``, ``B`` the principal real log of ``A``.

    Realized block-diagonally as ``[[A(t), v], [0, 1]] (+) [[1, t], [0, 1]]``; the
    second block keeps the realization faithful when ``A(t)`` is periodic.
    """
    a = la.qarray(a)
    n = a.shape[0]
    if a.shape != (n, n) or any(x.denominator != 1 for x in a.flat):
        raise GroupError("A must be a square integer matrix")
    from .spectra import char_poly

    det = (-1) ** n * char_poly(a).coeffs[0]
    if det <= 0:
        raise GroupError(f"det A = {det} <= 0: no principal real logarithm")
    if det != 1:
        raise GroupError(f"det A = {det}: Z^n x|_A Z is a subgroup only for det A = 1")
    unipotent = la.is_nilpotent(a - la.qeye(n))
    if unipotent:
        b = unipotent_log(a)
        mode = EXACT
    else:
        try:
            b = triangular_log_numeric(a.astype(float)).matrix
        except SpectraError as exc:
            raise GroupError(f"no principal real logarithm: {exc}") from exc
        mode = NUMERIC
    exact = mode == EXACT
    g = semidirect_abelian(b, name=name or "semidirect")
    size = n + 3
    mats = []
    for i in range(n):
        mats.append(_unit_matrix(size, i, n, exact))
    t = la.zeros_like_mode((size, size), exact)
    t[:n, :n] = b
    t[n + 1, n + 2] = Fraction(1) if exact else 1.0
    mats.append(t)
    r = MatrixRealization(g, tuple(mats), mode)
    gens = [r.element(la.eye_like_mode(size, exact) + _unit_matrix(size, i, n, exact)) for i in range(n)]
    tg = la.eye_like_mode(size, exact)
    tg[:n, :n] = a if exact else a.astype(float)
    tg[n + 1, n + 2] = Fraction(1) if exact else 1.0
    gens.append(r.element(tg))
    return r.algebra, r, GeneratedSubgroup(r, tuple(gens), f"Z^{n} x|_A Z")


PAPER_EXAMPLE_A = ((1, -1), (1, 0))

CATALOG = {
    "heisenberg": heisenberg,
    "abelian": abelian,
    "aff1": aff1,
    "semidirect_integer": semidirect_integer,
    "paper_example": lambda: semidirect_integer(PAPER_EXAMPLE_A, name="paper_example"),
}


def catalog(name: str, **params):
    """``(algebra, realization, lattice generators)`` for a named example."""
    try:
        build = CATALOG[name]
    except KeyError:
        raise GroupError(f"unknown catalog entry {name!r}; known: {', '.join(CATALOG)}") from None
    return build(**params)
