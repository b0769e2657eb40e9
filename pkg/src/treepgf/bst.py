"""Exact search-cost and path-length distributions for random binary search trees.

Three cost families are covered, each for a tree built from a uniformly
random permutation of ``n`` keys:

* unsuccessful search: comparisons made by a probe absent from the tree,
* successful search: comparisons made by a probe equal to a random key,
* total internal path length ``L_n``.

PGFs are built from their recursions in ``z``; moments come from dedicated
scalar recursions so that large ``n`` stays cheap.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .rational import PGF, falling_factorial, format_rational

__all__ = [
    "BstMoments",
    "FactorialMomentVector",
    "bst_unsuccessful_pgf",
    "bst_unsuccessful_moments",
    "bst_successful_pgf",
    "bst_successful_moments",
    "bst_path_length_pgf",
    "bst_path_length_moments",
    "bst_path_length_means",
    "bst_path_length_factorial_moments",
]

MAX_FACTORIAL_ORDER = 8


@dataclass(frozen=True)
class BstMoments:
    n: int
    g: Fraction
    h: Fraction

    @property
    def variance(self) -> Fraction:
        return self.h - self.g * self.g + self.g

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": format_rational(self.g),
            "second_factorial_moment": format_rational(self.h),
            "variance": format_rational(self.variance),
        }


@dataclass(frozen=True)
class FactorialMomentVector:
    n: int
    m: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.m) - 1


def _check_n(n: int, lowest: int) -> None:
    if not isinstance(n, int) or n < lowest:
        raise ValueError(f"n must be an integer >= {lowest}, got {n!r}")


# -- unsuccessful search ---------------------------------------------------


def bst_unsuccessful_pgf(n: int) -> PGF:
    _check_n(n, 1)
    f = PGF.monomial(1)
    for k in range(2, n + 1):
        # f_k = ((2z + k - 1)/(k + 1)) f_{k-1}
        f = f * PGF([Fraction(k - 1, k + 1), Fraction(2, k + 1)])
    return f


def bst_unsuccessful_moments(n: int) -> BstMoments:
    _check_n(n, 1)
    g, h = Fraction(1), Fraction(0)
    for k in range(2, n + 1):
        g, h = g + Fraction(2, k + 1), h + Fraction(4, k + 1) * g
    return BstMoments(n, g, h)


# -- successful search -----------------------------------------------------


def bst_successful_pgf(n: int) -> PGF:
    _check_n(n, 1)
    f = PGF.monomial(1)
    for k in range(2, n + 1):
        # k^2 f_k = (k-1)(2z + k - 1) f_{k-1} + z
        step = f * PGF([(k - 1) * (k - 1), 2 * (k - 1)]) + PGF.monomial(1)
        f = step * Fraction(1, k * k)
    return f


def bst_successful_moments(n: int) -> BstMoments:
    _check_n(n, 1)
    g, h = Fraction(1), Fraction(0)
    for k in range(2, n + 1):
        k2 = k * k
        g, h = (
            ((2 * k - 1) + (k2 - 1) * g) / k2,
            (4 * (k - 1) * g + (k2 - 1) * h) / k2,
        )
    return BstMoments(n, g, h)


# -- total path length -----------------------------------------------------

_path_pgfs: list[PGF] = [PGF.one()]
_path_lock = threading.Lock()


def bst_path_length_pgf(n: int) -> PGF:
    """PGF of ``L_n``; degree ``n(n-1)/2``.

    Every ``f_k`` with ``k < n`` is retained in a process-wide cache, so
    memory grows roughly like ``n**4`` rationals.  Keep ``n`` modest
    (a few dozen); use the moment functions for larger trees.
    """
    _check_n(n, 0)
    with _path_lock:
        while len(_path_pgfs) <= n:
            m = len(_path_pgfs)
            acc = PGF()
            for k in range(m):
                acc = acc + _path_pgfs[k] * _path_pgfs[m - 1 - k]
            _path_pgfs.append(acc.shift(m - 1) * Fraction(1, m))
        return _path_pgfs[n]


def bst_path_length_means(n: int) -> list[Fraction]:
    """``[g_0, ..., g_n]`` by the linear-time mean recursion."""
    _check_n(n, 0)
    g = [Fraction(0)]
    running = Fraction(0)
    for m in range(1, n + 1):
        running += g[-1]
        g.append(m - 1 + 2 * running / m)
    return g


def bst_path_length_moments(n: int) -> BstMoments:
    _check_n(n, 0)
    g = bst_path_length_means(n)
    h = [Fraction(0)]
    h_sum = Fraction(0)
    for m in range(1, n + 1):
        h_sum += h[-1]
        conv = sum((g[k] * g[m - 1 - k] for k in range(m)), Fraction(0))
        h.append(-(m - 1) * m + 2 * (m - 1) * g[m] + 2 * conv / m + 2 * h_sum / m)
    return BstMoments(n, g[n], h[n])


_fm_cache: dict[int, list[list[int]]] = {}
_fm_lock = threading.Lock()


def _scaled_factorial_moments(n: int, order: int) -> list[list[int]]:
    # G[k][r] = k! * f_k^(r)(1) is an integer: k! f_k(z) counts permutations
    # by path length.  The convolution then becomes
    #   G[m][r] = sum_b C(r,b) (m-1)_b sum_k C(m-1,k) sum_a C(t,a) G[k][a] G[m-1-k][t-a],
    # with t = r - b.
    with _fm_lock:
        table = _fm_cache.get(order)
        if table is None:
            table = [[1] + [0] * order]
            _fm_cache[order] = table
        for m in range(len(table), n + 1):
            conv = [0] * (order + 1)
            for k in range(m):
                left, right = table[k], table[m - 1 - k]
                w = comb(m - 1, k)
                for t in range(order + 1):
                    s = 0
                    for a in range(t + 1):
                        s += comb(t, a) * left[a] * right[t - a]
                    conv[t] += w * s
            row = []
            for r in range(order + 1):
                row.append(
                    sum(comb(r, b) * falling_factorial(m - 1, b) * conv[r - b] for b in range(r + 1))
                )
            table.append(row)
        return table


def bst_path_length_factorial_moments(n: int, order: int) -> FactorialMomentVector:
    """Exact ``f_n^(r)(1)`` for ``r = 0..order`` where ``f_n`` is the PGF of ``L_n``.

    Uses the Leibniz rule on the convolution recursion evaluated at ``z = 1``;
    no polynomial in ``z`` is ever formed.
    """
    _check_n(n, 0)
    if not 1 <= order <= MAX_FACTORIAL_ORDER:
        raise ValueError(f"order must be in 1..{MAX_FACTORIAL_ORDER}")
    table = _scaled_factorial_moments(n, order)
    nfact = 1
    for i in range(2, n + 1):
        nfact *= i
    return FactorialMomentVector(n, tuple(Fraction(v, nfact) for v in table[n]))
