"""Univariate polynomials over Q and Sturm-sequence root counting."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from .linalg import frac


class PolynomialError(ValueError):
    pass


class RationalPolynomial:
    """Immutable polynomial with Fraction coefficients, constant term first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, k: int, c=1) -> "RationalPolynomial":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots) -> "RationalPolynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-frac(r), 1])
        return p

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalPolynomial([other])
        return isinstance(other, RationalPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_poly(other))

    def __rsub__(self, other):
        return _poly(other) - self

    def __mul__(self, other):
        other = _poly(other)
        if self.is_zero() or other.is_zero():
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RationalPolynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def __divmod__(self, other):
        other = _poly(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        while len(rem) - 1 >= d and rem:
            shift = len(rem) - 1 - d
            c = rem[-1] / other.lead
            q[shift] = c
            for k, b in enumerate(other.coeffs):
                rem[shift + k] -= c * b
            while rem and rem[-1] == 0:
                rem.pop()
        return RationalPolynomial(q), RationalPolynomial(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "RationalPolynomial":
        if self.is_zero():
            return self
        return RationalPolynomial(c / self.lead for c in self.coeffs)

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def shift_out_zero_roots(self) -> tuple["RationalPolynomial", int]:
        """Return ``(p / x^k, k)`` with ``k`` the multiplicity of the root 0."""
        k = 0
        while k < len(self.coeffs) and self.coeffs[k] == 0:
            k += 1
        return RationalPolynomial(self.coeffs[k:]), k

    def to_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items) -> "RationalPolynomial":
        return cls(frac(s) for s in items)

    def __repr__(self):
        if self.is_zero():
            return "RationalPolynomial(0)"
        terms = []
        for k, c in reversed(list(enumerate(self.coeffs))):
            if c:
                terms.append(f"{c}" + ("" if k == 0 else "*x" if k == 1 else f"*x^{k}"))
        return "RationalPolynomial(" + " + ".join(terms) + ")"


def _poly(x) -> RationalPolynomial:
    return x if isinstance(x, RationalPolynomial) else RationalPolynomial([x])


def gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    """Monic gcd (zero only if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: RationalPolynomial) -> RationalPolynomial:
    if p.degree <= 0:
        return p.monic()
    return (p // gcd(p, p.derivative())).monic()


def squarefree_decomposition(p: RationalPolynomial) -> list[tuple[RationalPolynomial, int]]:
    """Yun's algorithm: ``p = lead * prod f_k^k`` with squarefree, coprime ``f_k``."""
    if p.is_zero():
        raise PolynomialError("zero polynomial")
    out = []
    if p.degree == 0:
        return out
    dp = p.derivative()
    a = gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.derivative()
    k = 1
    while b.degree > 0:
        a = gcd(b, d)
        if a.degree > 0:
            out.append((a, k))
        b = b // a
        c = d // a
        d = c - b.derivative()
        k += 1
    return out


def sturm_sequence(p: RationalPolynomial) -> list[RationalPolynomial]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _sign_changes(values) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _sign_at_infinity(q: RationalPolynomial, positive: bool) -> int:
    s = 1 if q.lead > 0 else -1
    if not positive and q.degree % 2 == 1:
        s = -s
    return s


def count_real_roots(p: RationalPolynomial, interval=None) -> int:
    """Number of distinct real roots, optionally in the half-open interval ``(a, b]``.

    Either end of ``interval`` may be ``None`` for an infinite end.
    """
    if p.is_zero():
        raise PolynomialError("zero polynomial has infinitely many roots")
    q = squarefree_part(p)
    if q.degree <= 0:
        return 0
    seq = sturm_sequence(q)
    lo, hi = interval if interval is not None else (None, None)
    va = _sign_changes([_sign_at_infinity(s, False) for s in seq]) if lo is None else _sign_changes([s(frac(lo)) for s in seq])
    vb = _sign_changes([_sign_at_infinity(s, True) for s in seq]) if hi is None else _sign_changes([s(frac(hi)) for s in seq])
    return va - vb


def real_root_multiplicities(p: RationalPolynomial) -> list[tuple[int, int]]:
    """``[(distinct_real_roots, multiplicity), ...]`` over the squarefree factors."""
    return [(count_real_roots(f), k) for f, k in squarefree_decomposition(p)]


def count_real_roots_with_multiplicity(p: RationalPolynomial) -> int:
    return sum(n * k for n, k in real_root_multiplicities(p))


def imaginary_axis_parts(p: RationalPolynomial) -> tuple[RationalPolynomial, RationalPolynomial]:
    """Real polynomials ``u, v`` with ``p(i*mu) = u(mu) + i*v(mu)``."""
    u = [Fraction(0)] * len(p.coeffs)
    v = [Fraction(0)] * len(p.coeffs)
    for k, c in enumerate(p.coeffs):
        unit = (1, 0, -1, 0)[k % 4], (0, 1, 0, -1)[k % 4]
        u[k] += unit[0] * c
        v[k] += unit[1] * c
    return RationalPolynomial(u), RationalPolynomial(v)


def has_purely_imaginary_nonzero_root(p: RationalPolynomial) -> bool:
    if p.is_zero():
        raise PolynomialError("zero polynomial")
    u, v = imaginary_axis_parts(p)
    common = gcd(u, v)
    if common.is_zero() or common.degree <= 0:
        return False
    reduced, _ = common.shift_out_zero_roots()
    return reduced.degree > 0 and count_real_roots(reduced) > 0


def rational_roots(p: RationalPolynomial) -> list[Fraction]:
    """Distinct rational roots in ascending order (rational root theorem)."""
    from math import gcd as igcd, lcm

    if p.is_zero():
        raise PolynomialError("zero polynomial")
    q, k = p.shift_out_zero_roots()
    roots = {Fraction(0)} if k else set()
    if q.degree <= 0:
        return sorted(roots)
    den = 1
    for c in q.coeffs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in q.coeffs]
    g = 0
    for c in ints:
        g = igcd(g, c)
    ints = [c // g for c in ints]
    a0, an = abs(ints[0]), abs(ints[-1])
    for num in _divisors(a0):
        for dd in _divisors(an):
            for r in (Fraction(num, dd), Fraction(-num, dd)):
                if q(r) == 0:
                    roots.add(r)
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i * i != n:
                out.append(n // i)
        i += 1
    return out
