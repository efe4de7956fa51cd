import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lieshull import linalg as la
from lieshull.poly import (
    PolynomialError,
    RationalPolynomial,
    count_real_roots,
    count_real_roots_with_multiplicity,
    gcd,
    has_purely_imaginary_nonzero_root,
    rational_roots,
    squarefree_decomposition,
    sturm_sequence,
)

P = RationalPolynomial


def test_rref_exact_and_rank():
    m = la.qarray([[2, 4, 6], [1, 2, 3], [0, 1, 1]])
    r, piv = la.rref(m)
    assert piv == [0, 1]
    assert r[:2].tolist() == [[1, 0, 1], [0, 1, 1]]
    assert la.rank(m) == 2


def test_nullspace_exact():
    ns = la.nullspace(la.qarray([[1, 1, 0], [0, 0, 1]]))
    assert ns.shape == (1, 3)
    assert ns[0].tolist() == [1, -1, 0]


def test_solve_and_inverse():
    a = la.qarray([[2, 1], [1, 1]])
    assert la.inverse(a).tolist() == [[1, -1], [-1, 2]]
    x = la.solve(a, la.qarray([3, 2]))
    assert x.tolist() == [1, 1]
    assert la.solve(la.qarray([[1, 0], [0, 0]]), la.qarray([0, 1])) is None
    with pytest.raises(la.LinalgError):
        la.inverse(la.qarray([[1, 2], [2, 4]]))


def test_numeric_mode_uses_tolerance():
    m = np.array([[1.0, 2.0], [2.0, 4.0 + 1e-13]])
    assert la.rank(m, 1e-9) == 1
    assert la.rank(m.astype(float), 1e-15) == 2


def test_polynomial_arithmetic():
    p = P([1, -1, 1])  # x^2 - x + 1
    q, r = divmod(p * P([-2, 1]) + P([3]), P([-2, 1]))
    assert q == p and r == P([3])
    assert P([0, 0, 1]).degree == 2 and P().degree == -1
    assert p.derivative() == P([-1, 2])
    assert p(Fraction(1, 2)) == Fraction(3, 4)


def test_gcd_and_squarefree():
    a = P.from_roots([1, 1, 2])
    b = P.from_roots([1, 3])
    assert gcd(a, b) == P.from_roots([1])
    parts = dict((m, f) for f, m in squarefree_decomposition(a))
    assert parts[1] == P.from_roots([2]) and parts[2] == P.from_roots([1])


@pytest.mark.parametrize(
    "coeffs, expected",
    [([1, 0, 1], 0), ([1, -1, 1], 0), ([0, -1, 1], 2), ([0, 0, 0, 1], 1), ([-2, 0, 1], 2)],
)
def test_count_real_roots_examples(coeffs, expected):
    assert count_real_roots(P(coeffs)) == expected


def test_count_real_roots_interval_is_half_open():
    p = P.from_roots([0, 1, 2])
    assert count_real_roots(p, (0, 2)) == 2
    assert count_real_roots(p, (Fraction(-1, 2), 0)) == 1
    assert count_real_roots(p, (None, 1)) == 2
    with pytest.raises(PolynomialError):
        count_real_roots(P())


@pytest.mark.parametrize(
    "coeffs, expected", [([1, 0, 1], True), ([1, -1, 1], False), ([0, 0, 0, 1], False), ([4, 0, 5, 0, 1], True)]
)
def test_purely_imaginary_roots(coeffs, expected):
    assert has_purely_imaginary_nonzero_root(P(coeffs)) is expected


def test_rational_roots():
    assert sorted(rational_roots(P.from_roots([Fraction(1, 2), -3, -3]) * P([1, 0, 1]))) == [-3, Fraction(1, 2)]


def test_string_round_trip():
    p = P([Fraction(1, 3), 0, -2])
    assert p.to_strings() == ["1/3", "0", "-2"]
    assert P.from_strings(p.to_strings()) == p


def _grid_count(roots) -> int:
    """Oracle: distinct real roots via sign changes on a grid finer than the root spacing."""
    p = P.from_roots(roots)
    pts = sorted(set(roots))
    count = 0
    # every root is rational and known, so bracket each candidate and test sign change or exact zero
    grid = [Fraction(k, 8) for k in range(-80, 81)]
    vals = [p(x) for x in grid]
    for a, b, va, vb in zip(grid, grid[1:], vals, vals[1:]):
        if vb == 0:
            count += 1
        elif va != 0 and (va > 0) != (vb > 0):
            count += 1
    assert all(-10 < x <= 10 for x in pts)
    return count


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=8), min_size=1, max_size=4),
    st.integers(min_value=0, max_value=1),
)
def test_sturm_matches_grid_oracle(roots, with_complex):
    roots = [Fraction(r.numerator * 8 // r.denominator, 8) for r in roots]  # snap onto the grid
    p = P.from_roots(roots)
    if with_complex:
        p = p * P([1, 0, 1])
    assert count_real_roots(p) == _grid_count(roots)
    assert count_real_roots_with_multiplicity(p) == len(roots)


def test_sturm_sequence_ends_in_constant():
    seq = sturm_sequence(P.from_roots([1, 2, 3]))
    assert seq[-1].degree == 0


def test_random_degree_six_polynomials():
    rng = random.Random(7)
    for _ in range(30):
        roots = [Fraction(rng.randint(-40, 40), 4) for _ in range(rng.randint(1, 6))]
        assert count_real_roots(P.from_roots(roots)) == _grid_count(roots)
