"""Exact rational scalars, dense polynomials and truncated bivariate series.

``fractions.Fraction`` is the scalar type throughout: it is always kept in
lowest terms with a positive denominator, which is exactly the canonical
form the rest of the package relies on for equality and serialization.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
Number = Union[int, Fraction]

__all__ = [
    "Rational",
    "PGF",
    "BiSeries",
    "SingularSeriesError",
    "biseries_invert",
    "format_rational",
    "parse_rational",
    "poly_mul",
    "poly_derivative",
    "derivative_at_one",
    "falling_factorial",
]


def format_rational(q: Number) -> str:
    """Canonical ``"p/q"`` string, or ``"p"`` for integers."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def falling_factorial(x: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= x - i
    return out


class PGF:
    """Dense polynomial in ``z`` with rational coefficients.

    ``coeffs[k]`` is the coefficient of ``z**k``; for a probability
    generating function that is ``P{cost = k}``.  Trailing zeros are
    stripped so that equal polynomials compare equal.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> PGF:
        return cls([0] * k + [c])

    @classmethod
    def one(cls) -> PGF:
        return cls([1])

    @classmethod
    def from_counts(cls, counts: Sequence[int], total: int | None = None) -> PGF:
        if total is None:
            total = sum(counts)
        return cls(Fraction(c, total) for c in counts)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PGF):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"PGF([{', '.join(format_rational(c) for c in self.coeffs)}])"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            terms.append(f"({format_rational(c)}){mono}" if mono else format_rational(c))
        return " + ".join(terms) if terms else "0"

    def __add__(self, other: PGF) -> PGF:
        size = max(len(self), len(other))
        return PGF(self[k] + other[k] for k in range(size))

    def __mul__(self, other: PGF | Number) -> PGF:
        if isinstance(other, PGF):
            return poly_mul(self, other)
        return PGF(c * other for c in self.coeffs)

    __rmul__ = __mul__

    def shift(self, k: int) -> PGF:
        """Multiply by ``z**k``."""
        if self.is_zero():
            return self
        return PGF([0] * k + list(self.coeffs))

    def __call__(self, z: Number) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self, order: int = 1) -> PGF:
        return poly_derivative(self, order)

    def mean(self) -> Fraction:
        return derivative_at_one(self, 1)

    def variance(self) -> Fraction:
        g = derivative_at_one(self, 1)
        return derivative_at_one(self, 2) - g * g + g

    def is_distribution(self) -> bool:
        return all(c >= 0 for c in self.coeffs) and self(1) == 1

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    def to_list(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, text: str) -> PGF:
        return cls(parse_rational(s) for s in json.loads(text))


def poly_mul(a: PGF, b: PGF) -> PGF:
    if a.is_zero() or b.is_zero():
        return PGF()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a.coeffs):
        if ai == 0:
            continue
        for j, bj in enumerate(b.coeffs):
            out[i + j] += ai * bj
    return PGF(out)


def poly_derivative(p: PGF, order: int = 1) -> PGF:
    if order < 1:
        raise ValueError("derivative order must be >= 1")
    return PGF(falling_factorial(k, order) * c for k, c in enumerate(p.coeffs) if k >= order)


def derivative_at_one(p: PGF, order: int) -> Fraction:
    """``p^(order)(1)`` without building the derivative polynomial."""
    if order == 0:
        return p(1)
    return sum(
        (falling_factorial(k, order) * c for k, c in enumerate(p.coeffs) if k >= order),
        Fraction(0),
    )


class SingularSeriesError(ZeroDivisionError):
    """Raised when inverting a series whose constant term is zero."""


class BiSeries:
    """Truncated power series in ``x`` and ``y``.

    Holds coefficients of ``x**i y**j`` for ``i <= nx`` and ``j <= ny``.
    Binary operations truncate to the smaller of the two orders.
    """

    __slots__ = ("nx", "ny", "c")

    def __init__(self, nx: int, ny: int, coeffs: dict[tuple[int, int], Number] | None = None):
        self.nx = nx
        self.ny = ny
        self.c = [[Fraction(0)] * (ny + 1) for _ in range(nx + 1)]
        for (i, j), v in (coeffs or {}).items():
            if i <= nx and j <= ny:
                self.c[i][j] = Fraction(v)

    @classmethod
    def constant(cls, v: Number, nx: int, ny: int) -> BiSeries:
        return cls(nx, ny, {(0, 0): v})

    @classmethod
    def linear(cls, c0: Number, cx: Number, cy: Number, nx: int, ny: int) -> BiSeries:
        """The series ``c0 + cx*x + cy*y``."""
        return cls(nx, ny, {(0, 0): c0, (1, 0): cx, (0, 1): cy})

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if i <= self.nx and j <= self.ny:
            return self.c[i][j]
        raise IndexError(f"coefficient ({i},{j}) beyond truncation ({self.nx},{self.ny})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiSeries):
            return NotImplemented
        return (self.nx, self.ny, self.c) == (other.nx, other.ny, other.c)

    def __repr__(self) -> str:
        nz = {(i, j): format_rational(v) for i, row in enumerate(self.c) for j, v in enumerate(row) if v}
        return f"BiSeries({self.nx}, {self.ny}, {nz})"

    def _orders(self, other: BiSeries) -> tuple[int, int]:
        return min(self.nx, other.nx), min(self.ny, other.ny)

    def __add__(self, other: BiSeries) -> BiSeries:
        nx, ny = self._orders(other)
        out = BiSeries(nx, ny)
        for i in range(nx + 1):
            for j in range(ny + 1):
                out.c[i][j] = self.c[i][j] + other.c[i][j]
        return out

    def __neg__(self) -> BiSeries:
        out = BiSeries(self.nx, self.ny)
        out.c = [[-v for v in row] for row in self.c]
        return out

    def __sub__(self, other: BiSeries) -> BiSeries:
        return self + (-other)

    def scale(self, k: Number) -> BiSeries:
        out = BiSeries(self.nx, self.ny)
        out.c = [[v * k for v in row] for row in self.c]
        return out

    def __mul__(self, other: BiSeries | Number) -> BiSeries:
        if not isinstance(other, BiSeries):
            return self.scale(other)
        nx, ny = self._orders(other)
        out = BiSeries(nx, ny)
        for i1 in range(nx + 1):
            for j1 in range(ny + 1):
                a = self.c[i1][j1]
                if a == 0:
                    continue
                for i2 in range(nx - i1 + 1):
                    row = other.c[i2]
                    dst = out.c[i1 + i2]
                    for j2 in range(ny - j1 + 1):
                        if row[j2]:
                            dst[j1 + j2] += a * row[j2]
        return out

    __rmul__ = __mul__

    def invert(self) -> BiSeries:
        return biseries_invert(self)


def biseries_invert(s: BiSeries) -> BiSeries:
    """Reciprocal of ``s`` up to its truncation orders.

    Solves ``(s * b)[i, j] = [i == j == 0]`` for ``b`` in graded order.
    """
    c00 = s.c[0][0]
    if c00 == 0:
        raise SingularSeriesError("series has zero constant term")
    inv0 = 1 / c00
    b = BiSeries(s.nx, s.ny)
    for i in range(s.nx + 1):
        for j in range(s.ny + 1):
            if i == 0 and j == 0:
                b.c[0][0] = inv0
                continue
            acc = Fraction(0)
            for p in range(i + 1):
                srow = s.c[p]
                brow = b.c[i - p]
                for q in range(j + 1):
                    if (p or q) and srow[q]:
                        acc += srow[q] * brow[j - q]
            b.c[i][j] = -acc * inv0
    return b
