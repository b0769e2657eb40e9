"""Leading constants of the cumulants of BST path length.

The order-``s`` cumulant of ``L_n`` grows like ``K_s * n**s`` with
``K_s = a_s + (-1)**(s+1) * 2**s * (s-1)! * zeta(s)``.  The rationals
``a_s`` follow from an auxiliary sequence ``c_s`` built from tiered
binomial coefficients ``T(i, n, m)``; ``a_s`` is then the
cumulant-from-moments transform of ``c_1 .. c_s`` via partial Bell
polynomials.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath

from .rational import BiSeries, format_rational

__all__ = [
    "CumulantTable",
    "MAX_ORDER",
    "tiered_binomial",
    "hennequin_c",
    "hennequin_a",
    "partial_bell",
    "kappa_leading_constant",
    "cumulant_table",
    "zeta_int",
    "stirling2",
    "raw_from_factorial",
    "central_from_raw",
    "cumulants_from_central",
    "cumulants_from_factorial",
]

MAX_ORDER = 8


def multinomial(*ks: int) -> int:
    out, total = 1, 0
    for k in ks:
        total += k
        out *= comb(total, k)
    return out


# -- tiered binomial coefficients ------------------------------------------


def _binomial_series(i: int, with_y: bool, order: int) -> BiSeries:
    """``Binomial[i - x (- y), i] = prod_{j=1..i} (j - x (- y)) / i!`` as a series."""
    acc = BiSeries.constant(1, order, order)
    for j in range(1, i + 1):
        acc = acc * BiSeries.linear(j, -1, -1 if with_y else 0, order, order)
    return acc.scale(Fraction(1, factorial(i)))


@lru_cache(maxsize=None)
def _generating_series(i: int, order: int) -> BiSeries:
    # f(i,x,y) = 1/(i+1-x-y) * Binomial[i-x,i] / Binomial[i-x-y,i]
    pole = BiSeries.linear(i + 1, -1, -1, order, order).invert()
    ratio = _binomial_series(i, False, order) * _binomial_series(i, True, order).invert()
    return pole * ratio


_series_lock = threading.Lock()


def tiered_binomial(i: int, n: int, m: int) -> Fraction:
    """``T(i, n, m)``: coefficient of ``x**n y**m`` in ``f(i, x, y)``."""
    if min(i, n, m) < 0:
        raise ValueError("arguments must be nonnegative")
    if n + m == 0:
        return Fraction(1, 1 + i)
    order = max(MAX_ORDER, n, m)
    with _series_lock:
        series = _generating_series(i, order)
    return series[n, m]


# -- the c_s and a_s sequences ---------------------------------------------

_c_cache: dict[int, Fraction] = {0: Fraction(1), 1: Fraction(0)}
_c_lock = threading.RLock()


def _inner(k1: int, k2: int, k3: int) -> Fraction:
    total = Fraction(0)
    for n in range(k3 + 1):
        for m in range(k3 - n + 1):
            p = k3 - n - m
            weight = multinomial(n, m, p) * (-2) ** (n + m) * factorial(n) * factorial(m)
            s = Fraction(0)
            for j in range(m + k2 + 1):
                s += comb(m + k2, j) * (-1) ** j * tiered_binomial(n + k1 + j, n, m)
            total += weight * s
    return total


def hennequin_c(s: int) -> Fraction:
    if not 0 <= s <= MAX_ORDER:
        raise ValueError(f"s must be in 0..{MAX_ORDER}")
    with _c_lock:
        if s in _c_cache:
            return _c_cache[s]
        total = Fraction(0)
        for k1 in range(s):
            for k2 in range(s):
                k3 = s - k1 - k2
                if k3 < 0:
                    continue
                ck1, ck2 = hennequin_c(k1), hennequin_c(k2)
                if ck1 == 0 or ck2 == 0:
                    continue
                total += multinomial(k1, k2, k3) * ck1 * ck2 * _inner(k1, k2, k3)
        value = Fraction(s + 1, s - 1) * total
        _c_cache[s] = value
        return value


def partial_bell(s: int, j: int, xs) -> Fraction:
    """Partial Bell polynomial ``B_{s,j}(x_1, ..., x_{s-j+1})``.

    ``xs[0]`` is ``x_1``.  Uses ``B_{s,j} = sum_k C(s-1,k-1) x_k B_{s-k,j-1}``.
    """
    if s < 0 or j < 0:
        raise ValueError("s and j must be nonnegative")
    if j > s:
        return Fraction(0)
    if s > 0 and len(xs) < s - j + 1:
        raise ValueError(f"B_{{{s},{j}}} needs {s - j + 1} arguments, got {len(xs)}")
    xs = [Fraction(x) for x in xs]
    table: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}

    def b(ss: int, jj: int) -> Fraction:
        if (ss, jj) in table:
            return table[ss, jj]
        if jj == 0 or jj > ss:
            val = Fraction(0)
        else:
            val = sum(
                (comb(ss - 1, k - 1) * xs[k - 1] * b(ss - k, jj - 1) for k in range(1, ss - jj + 2)),
                Fraction(0),
            )
        table[ss, jj] = val
        return val

    return b(s, j)


def hennequin_a(s: int) -> Fraction:
    if not 2 <= s <= MAX_ORDER:
        raise ValueError(f"s must be in 2..{MAX_ORDER}")
    cs = [hennequin_c(i) for i in range(1, s + 1)]
    return sum(
        ((-1) ** (j - 1) * factorial(j - 1) * partial_bell(s, j, cs[: s - j + 1]) for j in range(1, s + 1)),
        Fraction(0),
    )


# -- zeta and the real constants -------------------------------------------


def zeta_int(s: int, dps: int = 30) -> mpmath.mpf:
    """Riemann zeta at an integer ``s >= 2``."""
    if s < 2:
        raise ValueError("zeta_int needs s >= 2")
    with mpmath.workdps(dps + 5):
        return +mpmath.zeta(s)


def kappa_leading_constant(s: int, precision: int = 30) -> mpmath.mpf:
    """``a_s + (-1)**(s+1) * 2**s * (s-1)! * zeta(s)`` to ``precision`` digits."""
    a = hennequin_a(s)
    with mpmath.workdps(precision + 10):
        z = zeta_int(s, precision + 10)
        val = mpmath.mpf(a.numerator) / a.denominator + (-1) ** (s + 1) * 2**s * factorial(s - 1) * z
    with mpmath.workdps(precision):
        return +val


@dataclass(frozen=True)
class CumulantTable:
    S: int
    c: tuple[Fraction, ...]
    a: tuple[Fraction, ...]
    kappa_const: tuple[mpmath.mpf, ...]
    precision: int

    def rows(self) -> list[dict]:
        out = []
        for s in range(2, self.S + 1):
            out.append(
                {
                    "s": s,
                    "c_s": format_rational(self.c[s]),
                    "a_s": format_rational(self.a[s - 2]),
                    "kappa_const_s": mpmath.nstr(self.kappa_const[s - 2], self.precision),
                }
            )
        return out


def cumulant_table(S: int = MAX_ORDER, precision: int = 20) -> CumulantTable:
    if not 2 <= S <= MAX_ORDER:
        raise ValueError(f"max order must be in 2..{MAX_ORDER}")
    return CumulantTable(
        S,
        tuple(hennequin_c(s) for s in range(S + 1)),
        tuple(hennequin_a(s) for s in range(2, S + 1)),
        tuple(kappa_leading_constant(s, precision) for s in range(2, S + 1)),
        precision,
    )


# -- moment conversions ----------------------------------------------------


@lru_cache(maxsize=None)
def stirling2(r: int, j: int) -> int:
    if r == j:
        return 1
    if j == 0 or j > r:
        return 0
    return j * stirling2(r - 1, j) + stirling2(r - 1, j - 1)


def raw_from_factorial(fm) -> list[Fraction]:
    """``E[X^r] = sum_j S(r, j) E[(X)_j]`` for ``r = 0..len(fm)-1``."""
    return [sum((stirling2(r, j) * fm[j] for j in range(r + 1)), Fraction(0)) for r in range(len(fm))]


def central_from_raw(raw) -> list[Fraction]:
    mu = raw[1]
    return [
        sum((comb(r, i) * raw[i] * (-mu) ** (r - i) for i in range(r + 1)), Fraction(0))
        for r in range(len(raw))
    ]


def cumulants_from_central(mean, central) -> list[Fraction]:
    """Cumulants ``kappa_0..kappa_R``; ``kappa_0`` is reported as 0."""
    R = len(central) - 1
    kappa = [Fraction(0)] * (R + 1)
    if R >= 1:
        kappa[1] = Fraction(mean)
    for r in range(2, R + 1):
        # central moments are the raw moments of X - mean, whose cumulants
        # agree with those of X from order 2 on
        kappa[r] = central[r] - sum(
            (comb(r - 1, m - 1) * kappa[m] * central[r - m] for m in range(2, r - 1)),
            Fraction(0),
        )
    return kappa


def cumulants_from_factorial(fm) -> list[Fraction]:
    raw = raw_from_factorial(fm)
    return cumulants_from_central(raw[1], central_from_raw(raw))
