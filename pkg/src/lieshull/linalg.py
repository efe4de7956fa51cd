"""Row reduction, kernels and solves over Q (exact) or floats (with tolerance).

Matrices are numpy arrays. ``dtype=object`` arrays hold :class:`fractions.Fraction`
entries and are reduced exactly; float arrays are reduced with partial pivoting
and an absolute tolerance. Every function takes ``tol``: ``None`` means exact.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

DEFAULT_TOL = 1e-9


class LinalgError(ValueError):
    pass


def frac(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact scalar: {x!r}")


def qarray(rows) -> np.ndarray:
    """Exact object array of Fractions from nested sequences."""
    a = np.array(rows, dtype=object)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = frac(v)
    return out


def qzeros(*shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


def qeye(n: int) -> np.ndarray:
    out = qzeros(n, n)
    for i in range(n):
        out[i, i] = Fraction(1)
    return out


def is_exact(a) -> bool:
    return isinstance(a, np.ndarray) and a.dtype == object


def zeros_like_mode(shape, exact: bool) -> np.ndarray:
    return qzeros(*shape) if exact else np.zeros(shape)


def eye_like_mode(n: int, exact: bool) -> np.ndarray:
    return qeye(n) if exact else np.eye(n)


def to_float(a) -> np.ndarray:
    return np.asarray(a, dtype=float)


def is_zero(x, tol=None) -> bool:
    if tol is None:
        return x == 0
    return abs(x) <= tol


def all_zero(a, tol=None) -> bool:
    a = np.asarray(a)
    if a.size == 0:
        return True
    if tol is None:
        return all(v == 0 for v in a.flat)
    return float(np.max(np.abs(a.astype(float)))) <= tol


def max_abs(a) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a.astype(float))))


def rref(m, tol=None) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form and pivot columns; zero rows are dropped.

    Exact mode takes the first nonzero entry as pivot, so the result depends only
    on the row space. Numeric mode pivots on the largest entry of the column.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise LinalgError("rref expects a 2-d array")
    nrows, ncols = m.shape
    exact = tol is None
    a = m.copy() if exact else m.astype(float).copy()
    if exact and a.dtype != object:
        a = qarray(a)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        if exact:
            piv = next((i for i in range(r, nrows) if a[i, c] != 0), None)
        else:
            i = r + int(np.argmax(np.abs(a[r:, c])))
            piv = i if abs(a[i, c]) > tol else None
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] / a[r, c]
        for i in range(nrows):
            if i != r and not is_zero(a[i, c], None if exact else 0.0):
                a[i] = a[i] - a[i, c] * a[r]
        if not exact:
            a[np.abs(a) <= tol * 1e-3] = 0.0
            a[r, c] = 1.0
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m, tol=None) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, tol)[1])


def nullspace(m, tol=None) -> np.ndarray:
    """Basis (as rows, in RREF) of ``{x : m @ x = 0}``."""
    m = np.asarray(m)
    ncols = m.shape[1]
    exact = tol is None
    if m.shape[0] == 0:
        return eye_like_mode(ncols, exact)
    if not exact:
        # SVD is the stable route for floats
        _, s, vh = np.linalg.svd(m.astype(float))
        k = int(np.sum(s > tol))
        basis = vh[k:]
        if basis.shape[0] == 0:
            return np.zeros((0, ncols))
        return rref(basis, tol)[0]
    r, pivots = rref(m, None)
    free = [c for c in range(ncols) if c not in pivots]
    out = qzeros(len(free), ncols)
    for k, f in enumerate(free):
        out[k, f] = Fraction(1)
        for row, p in enumerate(pivots):
            out[k, p] = -r[row, f]
    return rref(out, None)[0] if len(free) else out


def solve(a, b, tol=None):
    """One solution ``x`` of ``a @ x = b`` or ``None`` if inconsistent.

    In numeric mode the least-squares solution is returned when its residual
    is within ``tol``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if tol is None:
        rows, cols = a.shape
        aug = qzeros(rows, cols + 1)
        aug[:, :cols] = a
        aug[:, cols] = b
        r, pivots = rref(aug, None)
        if cols in pivots:
            return None
        x = qzeros(cols)
        for row, p in enumerate(pivots):
            x[p] = r[row, cols]
        return x
    af = a.astype(float)
    bf = b.astype(float)
    if af.shape[1] == 0:
        return np.zeros(0) if np.linalg.norm(bf) <= tol else None
    x, *_ = np.linalg.lstsq(af, bf, rcond=None)
    if np.linalg.norm(af @ x - bf) > tol * max(1.0, np.linalg.norm(bf)):
        return None
    return x


def span_coordinates(basis_rows, v, tol=None):
    """Coordinates of ``v`` in the span of ``basis_rows`` or ``None``."""
    basis_rows = np.asarray(basis_rows)
    if basis_rows.shape[0] == 0:
        return (qzeros(0) if tol is None else np.zeros(0)) if all_zero(v, tol) else None
    return solve(basis_rows.T, v, tol)


def inverse(m, tol=None) -> np.ndarray:
    m = np.asarray(m)
    n = m.shape[0]
    if tol is not None:
        if rank(m, tol) < n:
            raise LinalgError("matrix is singular")
        return np.linalg.inv(m.astype(float))
    aug = qzeros(n, 2 * n)
    aug[:, :n] = m
    aug[:, n:] = qeye(n)
    r, pivots = rref(aug, None)
    if pivots[:n] != list(range(n)) or len(pivots) < n or r.shape[0] < n:
        raise LinalgError("matrix is singular")
    return r[:, n:]


def complement_columns(pivots: list[int], n: int) -> list[int]:
    """Lexicographically first standard-basis complement of a pivot set."""
    return [c for c in range(n) if c not in pivots]


def matpow(m, k: int):
    n = m.shape[0]
    out = eye_like_mode(n, is_exact(m))
    for _ in range(k):
        out = out @ m
    return out


def is_nilpotent(m, tol=None) -> bool:
    n = m.shape[0]
    if n == 0:
        return True
    return all_zero(matpow(m, n), tol)


def equal(a, b, tol=None) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    if tol is None:
        return all(x == y for x, y in zip(a.flat, b.flat))
    return max_abs(a.astype(float) - b.astype(float)) <= tol
