"""Independent oracles and random generators shared by the test modules.

The oracles here deliberately avoid the package's own linear algebra so that a
bug there cannot hide behind a matching bug in the check.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import numpy as np

from lieshull import linalg as la
from lieshull.density import gl_algebra
from lieshull.io import algebra_from_matrices
from lieshull.lie import LieAlgebra, lie_closure


def rand_rational(rng: random.Random, num: int = 5, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def rand_strict_upper(rng: random.Random, n: int, density: float = 1.0) -> np.ndarray:
    m = la.qzeros(n, n)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                m[i, j] = rand_rational(rng)
    return m


def rand_unipotent(rng: random.Random, n: int) -> np.ndarray:
    return la.qeye(n) + rand_strict_upper(rng, n)


# ---------------------------------------------------------------- matrix oracles


def mat_mul(a, b):
    """Plain triple loop over Fractions."""
    n, k, m = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def to_lists(m) -> list:
    return [[Fraction(x) for x in row] for row in np.asarray(m)]


def series_log_oracle(u) -> list:
    """log(U) = sum_{k>=1} (-1)^{k+1} (U-I)^k / k, accumulating powers term by term."""
    u = to_lists(u)
    n = len(u)
    x = [[u[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
    total = [[Fraction(0)] * n for _ in range(n)]
    power = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        power = mat_mul(power, x)
        sign = 1 if k % 2 else -1
        for i in range(n):
            for j in range(n):
                total[i][j] += sign * power[i][j] / k
    return total


def series_exp_oracle(nmat) -> list:
    x = to_lists(nmat)
    n = len(x)
    total = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    term = [row[:] for row in total]
    for k in range(1, n + 1):
        term = [[v / k for v in row] for row in mat_mul(term, x)]
        total = [[total[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    return total


# ---------------------------------------------------------------- structure-constant oracles


def jacobi_oracle(n: int, brackets: dict) -> set:
    """Triples (i<j<k) on which the Jacobi identity fails, computed on plain dicts."""

    def br(u: dict, v: dict) -> dict:
        out: dict = {}
        for a, ca in u.items():
            for b, cb in v.items():
                if a == b:
                    continue
                key, sign = ((a, b), 1) if a < b else ((b, a), -1)
                for c, cc in brackets.get(key, {}).items():
                    out[c] = out.get(c, 0) + sign * ca * cb * cc
        return {k: v for k, v in out.items() if v != 0}

    def add(*vs):
        out: dict = {}
        for v in vs:
            for k, c in v.items():
                out[k] = out.get(k, 0) + c
        return {k: v for k, v in out.items() if v != 0}

    bad = set()
    for i, j, k in combinations(range(n), 3):
        e = lambda t: {t: Fraction(1)}
        s = add(br(e(i), br(e(j), e(k))), br(e(j), br(e(k), e(i))), br(e(k), br(e(i), e(j))))
        if s:
            bad.add((i, j, k))
    return bad


def random_nilpotent_algebra(rng: random.Random, max_dim: int = 6) -> LieAlgebra:
    """Lie closure of random strictly upper triangular matrices, read back as structure constants.

    Jacobi holds by construction (the bracket is a matrix commutator).
    """
    while True:
        size = rng.randint(3, 5)
        gl = gl_algebra(size)
        seeds = [rand_strict_upper(rng, size, density=0.5).reshape(-1) for _ in range(rng.randint(1, 3))]
        sub = lie_closure(gl, seeds)
        if 2 <= sub.dim <= max_dim:
            mats = [v.reshape(size, size) for v in sub.vectors]
            return algebra_from_matrices(mats, exact=True)


def filiform4() -> LieAlgebra:
    return LieAlgebra(("e1", "e2", "e3", "e4"), {(0, 1): {2: 1}, (0, 2): {3: 1}}, "n4")


def free_nilpotent_5():
    """Free 3-step nilpotent algebra on two generators, realized in 5x5 unipotent matrices.

    The two seed matrices were found by a small search; basis A, B, [A,B], [A,[A,B]], [B,[A,B]].
    """
    from lieshull.groups import EXACT, GeneratedSubgroup, MatrixRealization, group_exp

    a = la.qzeros(5, 5)
    b = la.qzeros(5, 5)
    for (i, j), v in {(0, 2): 1, (1, 2): 1, (1, 3): -1, (2, 3): -1}.items():
        a[i, j] = Fraction(v)
    for (i, j), v in {(0, 1): -1, (0, 2): 1, (1, 2): -1, (1, 3): 1, (2, 3): 1, (3, 4): 1}.items():
        b[i, j] = Fraction(v)
    c = a @ b - b @ a
    d = a @ c - c @ a
    e = b @ c - c @ b
    g = LieAlgebra(("A", "B", "C", "D", "E"), {(0, 1): {2: 1}, (0, 2): {3: 1}, (1, 2): {4: 1}}, "free_nilpotent_2_3")
    r = MatrixRealization(g, (a, b, c, d, e), EXACT)
    gens = (group_exp(r, g.unit(0)), group_exp(r, g.unit(1)))
    return g, r, GeneratedSubgroup(r, gens, "free nilpotent lattice")


def h3_automorphism(a, b, c, d, e, f):
    """X -> aX + cY + eZ, Y -> bX + dY + fZ, Z -> (ad - bc) Z, as a matrix on (X, Y, Z)."""
    return la.qarray([[a, b, 0], [c, d, 0], [e, f, a * d - b * c]])


def random_unipotent_automorphism(rng: random.Random):
    """An integer unipotent automorphism of h3: unitriangular SL2 block plus a random Z part."""
    if rng.random() < 0.5:
        a, b, c, d = 1, rng.randint(-3, 3), 0, 1
    else:
        a, b, c, d = 1, 0, rng.randint(-3, 3), 1
    return h3_automorphism(a, b, c, d, rng.randint(-3, 3), rng.randint(-3, 3))
