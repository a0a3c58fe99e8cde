"""Multivariate monomials and polynomials with the graded monomial ordering.

The basis V_d lists all monomials of total degree at most d, grouped by
ascending degree; within one degree, exponent tuples are ordered
lexicographically with the first variable most significant.  For n=2, d=2
that gives 1, X1, X2, X1^2, X1*X2, X2^2.  Every matrix in this package is
labeled by this ordering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

NEG_INF = float("-inf")


@dataclass(frozen=True)
class Monomial:
    """A power product X^alpha, stored as the exponent tuple alpha."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if len(self.exponents) != len(other.exponents):
            raise ValueError("variable counts differ")
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def evaluate(self, x) -> float:
        if len(x) != len(self.exponents):
            raise ValueError("dimension mismatch")
        val = 1.0
        for xi, e in zip(x, self.exponents):
            if e:
                val *= xi**e
        return val

    def sort_key(self):
        return (self.degree, tuple(-e for e in self.exponents))


def _exact_degree_tuples(n: int, total: int):
    if n == 1:
        yield (total,)
        return
    for e in range(total, -1, -1):
        for rest in _exact_degree_tuples(n - 1, total - e):
            yield (e,) + rest


def _monomial_tuples(n: int, d: int):
    for deg in range(d + 1):
        yield from _exact_degree_tuples(n, deg)


@dataclass(frozen=True)
class MonomialBasis:
    """The ordered monomial basis V_d of R[X]_d in n variables."""

    n: int
    d: int
    items: tuple[Monomial, ...] = field(default=None)

    def __post_init__(self):
        if self.items is None:
            items = tuple(Monomial(t) for t in _monomial_tuples(self.n, self.d))
            object.__setattr__(self, "items", items)
        index = {m: i for i, m in enumerate(self.items)}
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i: int) -> Monomial:
        return self.items[i]

    def index(self, m: Monomial) -> int:
        return self._index[m]

    def __contains__(self, m: Monomial) -> bool:
        return m in self._index


def monomials_up_to(n: int, d: int) -> MonomialBasis:
    """Return the V_d basis: all monomials of degree <= d in graded order."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    return MonomialBasis(n, d)


def basis_size(n: int, d: int) -> int:
    """s_d = C(n + d, n), the dimension of R[X]_d."""
    return math.comb(n + d, n)


@dataclass(frozen=True)
class Polynomial:
    """Sparse real polynomial: a map from monomials to nonzero coefficients."""

    n: int
    terms: dict

    @staticmethod
    def from_terms(n: int, terms) -> "Polynomial":
        acc: dict[Monomial, float] = {}
        for mono, coeff in dict(terms).items():
            if not isinstance(mono, Monomial):
                mono = Monomial(tuple(mono))
            if len(mono.exponents) != n:
                raise ValueError("term dimension mismatch")
            c = acc.get(mono, 0.0) + float(coeff)
            acc[mono] = c
        return Polynomial(n, {m: c for m, c in acc.items() if c != 0.0})

    @staticmethod
    def zero(n: int) -> "Polynomial":
        return Polynomial(n, {})

    @staticmethod
    def constant(n: int, c: float) -> "Polynomial":
        return Polynomial.from_terms(n, {Monomial((0,) * n): c})

    @staticmethod
    def variable(n: int, i: int) -> "Polynomial":
        e = [0] * n
        e[i] = 1
        return Polynomial(n, {Monomial(tuple(e)): 1.0})

    @property
    def degree(self):
        """Total degree; -inf for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        return max(m.degree for m in self.terms)

    def coefficient(self, m: Monomial) -> float:
        return self.terms.get(m, 0.0)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0.0) + c
        return Polynomial(self.n, {m: c for m, c in acc.items() if c != 0.0})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            acc: dict[Monomial, float] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = m1 * m2
                    acc[m] = acc.get(m, 0.0) + c1 * c2
            return Polynomial(self.n, {m: c for m, c in acc.items() if c != 0.0})
        c = float(other)
        return Polynomial(self.n, {m: v * c for m, v in self.terms.items() if v * c != 0.0})

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return self * -1.0

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self.n, 1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def coeff_norm(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)


def evaluate(p: Polynomial, x) -> float:
    """Evaluate p at the point x."""
    if len(x) != p.n:
        raise ValueError("dimension mismatch")
    return sum(c * m.evaluate(x) for m, c in p.terms.items())


def vectorize(p: Polynomial, basis: MonomialBasis):
    """Coefficient vector of p in the given V_d basis."""
    import numpy as np

    vec = np.zeros(len(basis))
    for m, c in p.terms.items():
        if m not in basis:
            raise ValueError(f"monomial {m.exponents} exceeds basis degree {basis.d}")
        vec[basis.index(m)] = c
    return vec


def devectorize(vec, basis: MonomialBasis) -> Polynomial:
    """Inverse of vectorize: rebuild the polynomial from its coefficients."""
    if len(vec) != len(basis):
        raise ValueError("vector length does not match basis")
    return Polynomial.from_terms(basis.n, {basis[i]: float(v) for i, v in enumerate(vec) if v != 0.0})
