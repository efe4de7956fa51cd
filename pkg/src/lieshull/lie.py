"""Finite-dimensional real Lie algebras given by structure constants.

Structure constants are stored for ``i < j`` only, so antisymmetry holds by
construction while the Jacobi identity is checked by :func:`validate_structure`.
Algebras whose constants are all rational are *exact*; any float constant makes
the algebra numeric and every subspace computation then runs with ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Mapping, Optional, Sequence

import numpy as np

from . import linalg as la
from .linalg import DEFAULT_TOL


class LieError(ValueError):
    pass


def _scalar(c):
    if isinstance(c, (float, np.floating)):
        return float(c)
    return la.frac(c)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    basis: tuple[str, ...]
    brackets: Mapping[tuple[int, int], Mapping[int, object]]
    name: str = ""
    tolerance: float = DEFAULT_TOL
    numeric: bool = False
    exact_source: Optional["LieAlgebra"] = None

    def __post_init__(self):
        n = len(self.basis)
        clean: dict[tuple[int, int], dict[int, object]] = {}
        for (i, j), coeffs in self.brackets.items():
            if not (0 <= i < j < n):
                raise LieError(f"bracket pair ({i}, {j}) must satisfy 0 <= i < j < {n}")
            row = {}
            for k, c in coeffs.items():
                if not 0 <= int(k) < n:
                    raise LieError(f"coefficient index {k} out of range")
                c = _scalar(c)
                if c != 0:
                    row[int(k)] = c
            if row:
                clean[(i, j)] = row
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "brackets", clean)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def exact(self) -> bool:
        if self.numeric:
            return False
        return all(isinstance(c, Fraction) for row in self.brackets.values() for c in row.values())

    def as_numeric(self) -> "LieAlgebra":
        """Float copy that remembers its exact source."""
        if not self.exact:
            return self
        brackets = {k: {i: float(c) for i, c in row.items()} for k, row in self.brackets.items()}
        return LieAlgebra(self.basis, brackets, self.name, self.tolerance, True, self)

    @property
    def tol(self):
        """``None`` for exact algebras, the numeric tolerance otherwise."""
        return None if self.exact else self.tolerance

    @cached_property
    def structure(self) -> np.ndarray:
        """Dense tensor ``c[i, j, k]`` with ``[b_i, b_j] = sum_k c[i, j, k] b_k``."""
        n = self.dim
        c = la.zeros_like_mode((n, n, n), self.exact)
        for (i, j), row in self.brackets.items():
            for k, v in row.items():
                c[i, j, k] = v
                c[j, i, k] = -v
        return c

    def zero(self) -> np.ndarray:
        return la.zeros_like_mode((self.dim,), self.exact)

    def unit(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = Fraction(1) if self.exact else 1.0
        return v

    def vector(self, coords) -> np.ndarray:
        coords = list(coords)
        if len(coords) != self.dim:
            raise LieError(f"vector of length {len(coords)} in algebra of dim {self.dim}")
        if self.exact:
            return la.qarray(coords)
        return np.asarray(coords, dtype=float)

    def index(self, name: str) -> int:
        return self.basis.index(name)

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.basis == other.basis and self.brackets == other.brackets

    def __hash__(self):
        return hash((self.basis, tuple(sorted((k, tuple(sorted(v.items()))) for k, v in self.brackets.items()))))

    def __repr__(self):
        return f"LieAlgebra({self.name or '?'}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of ``parent`` stored as its RREF basis (rows)."""

    parent: LieAlgebra
    basis: np.ndarray
    pivots: tuple[int, ...] = field(default=())

    @classmethod
    def span(cls, parent: LieAlgebra, vectors, tol="auto") -> "Subspace":
        tol = parent.tol if tol == "auto" else tol
        vecs = [np.asarray(v) for v in vectors]
        if not vecs:
            return cls(parent, la.zeros_like_mode((0, parent.dim), parent.exact), ())
        m = np.vstack([v.reshape(1, -1) for v in vecs])
        if parent.exact:
            m = la.qarray(m)
        r, piv = la.rref(m, tol)
        return cls(parent, r, tuple(piv))

    @classmethod
    def whole(cls, parent: LieAlgebra) -> "Subspace":
        return cls.span(parent, [parent.unit(i) for i in range(parent.dim)])

    @classmethod
    def zero(cls, parent: LieAlgebra) -> "Subspace":
        return cls.span(parent, [])

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def vectors(self) -> list[np.ndarray]:
        return [self.basis[i] for i in range(self.dim)]

    def coordinates(self, v):
        return la.span_coordinates(self.basis, np.asarray(v), self.parent.tol)

    def contains(self, v) -> bool:
        return self.coordinates(v) is not None

    def issubset(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.vectors)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.parent, self.vectors + other.vectors)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.parent.exact:
            return la.equal(self.basis, other.basis)
        return self.issubset(other)

    def __hash__(self):
        return hash(tuple(map(tuple, self.basis.tolist())))

    def __repr__(self):
        rows = [" + ".join(f"{c}*{self.parent.basis[k]}" for k, c in enumerate(r) if c != 0) for r in self.basis]
        return f"Subspace({{{', '.join(rows)}}})"


@dataclass(frozen=True, eq=False)
class LinearMap:
    domain: LieAlgebra
    codomain: LieAlgebra
    matrix: np.ndarray

    def __call__(self, v):
        return self.matrix @ np.asarray(v)

    def image(self, u: Subspace) -> Subspace:
        return Subspace.span(self.codomain, [self(v) for v in u.vectors])


@dataclass
class ValidationReport:
    violations: list[tuple[tuple[int, int, int], np.ndarray]]

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_structure(g: LieAlgebra) -> ValidationReport:
    """Check the Jacobi identity on every basis triple ``i < j < k``."""
    bad = []
    for i, j, k in combinations(range(g.dim), 3):
        x, y, z = g.unit(i), g.unit(j), g.unit(k)
        res = bracket(g, x, bracket(g, y, z)) + bracket(g, y, bracket(g, z, x)) + bracket(g, z, bracket(g, x, y))
        if not la.all_zero(res, g.tol):
            bad.append(((i, j, k), res))
    return ValidationReport(bad)


def bracket(g: LieAlgebra, x, y) -> np.ndarray:
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != (g.dim,) or y.shape != (g.dim,):
        raise LieError(f"dimension mismatch: expected vectors of length {g.dim}")
    if g.dim == 0:
        return g.zero()
    if not g.exact:
        # sum_ij x_i y_j c_ijk
        return np.tensordot(np.tensordot(x, g.structure, axes=(0, 0)), y, axes=(0, 0))
    # object arrays: walk the sparse table instead of the dense tensor
    out = g.zero()
    for (i, j), row in g.brackets.items():
        coef = x[i] * y[j] - x[j] * y[i]
        if coef:
            for k, c in row.items():
                out[k] += coef * c
    return out


def ad(g: LieAlgebra, x) -> LinearMap:
    x = np.asarray(x)
    if x.shape != (g.dim,):
        raise LieError(f"dimension mismatch: expected vector of length {g.dim}")
    if g.dim == 0:
        return LinearMap(g, g, la.zeros_like_mode((0, 0), g.exact))
    if not g.exact:
        # column j is [x, b_j]
        return LinearMap(g, g, np.tensordot(x, g.structure, axes=(0, 0)).T)
    m = la.qzeros(g.dim, g.dim)
    for (i, j), row in g.brackets.items():
        for k, c in row.items():
            if x[i]:
                m[k, j] += x[i] * c
            if x[j]:
                m[k, i] -= x[j] * c
    return LinearMap(g, g, m)


def ad_matrices(g: LieAlgebra) -> list[np.ndarray]:
    return [ad(g, g.unit(i)).matrix for i in range(g.dim)]


def lie_closure(g: LieAlgebra, seeds) -> Subspace:
    """Smallest subalgebra containing ``seeds``: span, add all brackets, repeat."""
    s = Subspace.span(g, list(seeds))
    vecs = s.vectors
    frontier = list(combinations(vecs, 2))
    for _ in range(g.dim + 1):
        fresh = []
        for a, b in frontier:
            c = bracket(g, a, b)
            if not s.contains(c):
                fresh.append(c)
                s = Subspace.span(g, s.vectors + [c])
        if not fresh:
            return s
        # only pairs involving a new vector can produce anything new
        frontier = [(a, b) for a in fresh for b in vecs] + list(combinations(fresh, 2))
        vecs = vecs + fresh
    raise LieError("lie_closure did not reach a fixpoint")  # pragma: no cover


def _annihilator(u: Subspace) -> np.ndarray:
    return la.nullspace(u.basis, u.parent.tol) if u.dim else Subspace.whole(u.parent).basis


def normalizer_subalg(g: LieAlgebra, u: Subspace) -> Subspace:
    """``{Y : [Y, u] in u}`` as an RREF subspace."""
    ann = _annihilator(u)
    if u.dim == 0 or ann.shape[0] == 0:
        return Subspace.whole(g)
    # w . [Y, u_j] = -w . ad(u_j) Y
    rows = [w @ ad(g, uj).matrix for uj in u.vectors for w in ann]
    return Subspace.span(g, list(la.nullspace(np.vstack(rows), g.tol)))


def centralizer_subalg(g: LieAlgebra, u: Subspace) -> Subspace:
    if u.dim == 0:
        return Subspace.whole(g)
    m = np.vstack([ad(g, uj).matrix for uj in u.vectors])
    return Subspace.span(g, list(la.nullspace(m, g.tol)))


def center(g: LieAlgebra) -> Subspace:
    return centralizer_subalg(g, Subspace.whole(g))


def bracket_space(g: LieAlgebra, a: Subspace, b: Subspace) -> Subspace:
    return Subspace.span(g, [bracket(g, x, y) for x in a.vectors for y in b.vectors])


def derived_series(g: LieAlgebra) -> list[Subspace]:
    series = [Subspace.whole(g)]
    while True:
        nxt = bracket_space(g, series[-1], series[-1])
        if nxt.dim == series[-1].dim:
            return series
        series.append(nxt)
        if nxt.dim == 0:
            return series


def lower_central_series(g: LieAlgebra) -> list[Subspace]:
    whole = Subspace.whole(g)
    series = [whole]
    while True:
        nxt = bracket_space(g, whole, series[-1])
        if nxt.dim == series[-1].dim:
            return series
        series.append(nxt)
        if nxt.dim == 0:
            return series


def is_solvable(g: LieAlgebra) -> bool:
    return derived_series(g)[-1].dim == 0


def is_nilpotent(g: LieAlgebra) -> bool:
    return lower_central_series(g)[-1].dim == 0


def is_subalgebra(g: LieAlgebra, h: Subspace) -> bool:
    return all(h.contains(bracket(g, x, y)) for x, y in combinations(h.vectors, 2))


def is_ideal(g: LieAlgebra, h: Subspace) -> bool:
    return all(h.contains(bracket(g, g.unit(i), y)) for i in range(g.dim) for y in h.vectors)


def quotient_algebra(g: LieAlgebra, ideal: Subspace) -> tuple[LieAlgebra, LinearMap]:
    """``g / ideal`` on the standard complement of the ideal's pivot columns."""
    if not is_ideal(g, ideal):
        raise LieError("subspace is not an ideal")
    comp = la.complement_columns(list(ideal.pivots), g.dim)
    proj = projection_matrix(g, ideal)
    brackets = {}
    for a, b in combinations(range(len(comp)), 2):
        w = proj @ bracket(g, g.unit(comp[a]), g.unit(comp[b]))
        brackets[(a, b)] = {k: c for k, c in enumerate(w) if c != 0}
    name = f"{g.name}/ideal" if g.name else ""
    q = LieAlgebra(tuple(g.basis[c] for c in comp), brackets, name, g.tolerance, not g.exact)
    return q, LinearMap(g, q, proj)


def projection_matrix(g: LieAlgebra, sub: Subspace) -> np.ndarray:
    """Matrix of ``g -> g/sub`` in the coordinates of the complement columns."""
    comp = la.complement_columns(list(sub.pivots), g.dim)
    proj = la.zeros_like_mode((len(comp), g.dim), g.exact)
    for col in range(g.dim):
        v = g.unit(col)
        for row, p in zip(sub.basis, sub.pivots):
            v = v - v[p] * row
        proj[:, col] = v[comp]
    return proj


def quotient_section(g: LieAlgebra, ideal: Subspace, q: LieAlgebra) -> LinearMap:
    """Linear lift ``g/ideal -> g`` sending each quotient basis vector to its complement column."""
    comp = la.complement_columns(list(ideal.pivots), g.dim)
    s = la.zeros_like_mode((g.dim, len(comp)), g.exact)
    for k, c in enumerate(comp):
        s[c, k] = Fraction(1) if g.exact else 1.0
    return LinearMap(q, g, s)


def semidirect_abelian(d, names: Sequence[str] | None = None, name: str = "") -> LieAlgebra:
    """``R^n x|_d R.T`` with ``[T, e_i] = d e_i``; ``T`` is the last basis vector."""
    d = np.asarray(d, dtype=object if not np.asarray(d).dtype.kind == "f" else float)
    n = d.shape[0]
    if d.shape != (n, n):
        raise LieError("derivation must be square")
    if names is None:
        names = [f"e{i + 1}" for i in range(n)] + ["T"]
    brackets = {}
    for i in range(n):
        # [e_i, T] = -d e_i
        brackets[(i, n)] = {k: -d[k, i] for k in range(n)}
    return LieAlgebra(tuple(names), brackets, name)


def direct_sum(g1: LieAlgebra, g2: LieAlgebra, name: str = "") -> LieAlgebra:
    n1 = g1.dim
    brackets = {(i, j): dict(row) for (i, j), row in g1.brackets.items()}
    for (i, j), row in g2.brackets.items():
        brackets[(i + n1, j + n1)] = {k + n1: c for k, c in row.items()}
    basis = tuple(f"{b}_1" for b in g1.basis) + tuple(f"{b}_2" for b in g2.basis)
    numeric = not (g1.exact and g2.exact)
    if numeric:
        brackets = {k: {i: float(c) for i, c in row.items()} for k, row in brackets.items()}
    return LieAlgebra(basis, brackets, name or f"{g1.name}+{g2.name}", min(g1.tolerance, g2.tolerance), numeric)


def stabilizer_subalg(g: LieAlgebra, rho: Sequence, v) -> Subspace:
    """``{X : d_rho(X) v = 0}`` for ``rho[i] = d_rho(b_i)`` acting on ``v``."""
    v = np.asarray(v)
    if len(rho) != g.dim:
        raise LieError(f"need {g.dim} representation matrices, got {len(rho)}")
    mats = [np.asarray(getattr(r, "matrix", r)) for r in rho]
    for m in mats:
        if m.shape != (v.shape[0], v.shape[0]):
            raise LieError("representation matrix does not match the vector")
    if g.dim == 0:
        return Subspace.zero(g)
    cols = np.column_stack([m @ v for m in mats])
    if g.exact:
        cols = la.qarray(cols)
    return Subspace.span(g, list(la.nullspace(cols, g.tol)))


def homomorphism_residual(f: LinearMap) -> float:
    """Largest entry of ``f[b_i, b_j] - [f b_i, f b_j]`` over basis pairs."""
    g, h = f.domain, f.codomain
    worst = 0.0
    for i, j in combinations(range(g.dim), 2):
        lhs = f(bracket(g, g.unit(i), g.unit(j)))
        rhs = bracket(h, f(g.unit(i)), f(g.unit(j)))
        worst = max(worst, la.max_abs(np.asarray(lhs - rhs, dtype=object if la.is_exact(lhs) else float)))
    return worst
