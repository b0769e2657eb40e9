"""Exact PGFs and moments for digital search trees.

The infinite-key model (every key an infinite random bit string) has
recursions for the search costs and for the total path length.  The
finite-key model (``n`` distinct ``n``-bit keys) has none; its small-``n``
distributions are kept here as golden tables and can otherwise only be
obtained by enumeration (see :mod:`treepgf.dst_enum`).
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb

from .bst import BstMoments
from .rational import PGF

__all__ = [
    "DstMoments",
    "FAMILIES",
    "dst_path_length_pgf",
    "dst_path_length_moments",
    "dst_path_length_means",
    "dst_unsuccessful_pgf_infinite",
    "dst_successful_pgf_infinite",
    "dst_successful_moments",
    "dst_pair_covariance",
    "golden_table",
]


class DstMoments(BstMoments):
    pass


def _half_pow(e: int) -> Fraction:
    """Exact ``2**e`` for any integer ``e``."""
    return Fraction(2) ** e


def _split_weights(m: int) -> list[Fraction]:
    # P{k of the m non-root keys go left} = C(m, k) / 2^m
    scale = _half_pow(-m)
    return [comb(m, k) * scale for k in range(m + 1)]


class _Memo:
    """Append-only sequence memo, filled in order under a lock."""

    def __init__(self, first: list, step):
        self.items = list(first)
        self.step = step
        self.lock = threading.Lock()

    def get(self, n: int):
        with self.lock:
            while len(self.items) <= n:
                self.items.append(self.step(self.items, len(self.items)))
            return self.items[n]


def _path_step(f: list[PGF], n: int) -> PGF:
    acc = PGF()
    for k, w in enumerate(_split_weights(n - 1)):
        acc = acc + (f[k] * f[n - 1 - k]) * w
    return acc.shift(n - 1)


def _unsuccessful_step(u: list[PGF], n: int) -> PGF:
    # root holds one key; the probe falls left or right with probability 1/2
    acc = PGF()
    for k, w in enumerate(_split_weights(n - 1)):
        acc = acc + u[k] * w
    return acc.shift(1)


def _successful_step(s: list[PGF], n: int) -> PGF:
    # probe is the root with probability 1/n; otherwise it is one of the k
    # keys of a subtree chosen with probability proportional to k
    acc = PGF()
    for k, w in enumerate(_split_weights(n - 1)):
        if k:
            acc = acc + s[k] * (w * k)
    return PGF.monomial(1, Fraction(1, n)) + acc.shift(1) * Fraction(2, n)


_path_memo = _Memo([PGF.one()], _path_step)
_unsucc_memo = _Memo([PGF.one()], _unsuccessful_step)
_succ_memo = _Memo([PGF(), PGF.monomial(1)], _successful_step)


def dst_path_length_pgf(n: int) -> PGF:
    if n < 0:
        raise ValueError("n must be >= 0")
    return _path_memo.get(n)


def dst_unsuccessful_pgf_infinite(n: int) -> PGF:
    if n < 0:
        raise ValueError("n must be >= 0")
    return _unsucc_memo.get(n)


def dst_successful_pgf_infinite(n: int) -> PGF:
    if n < 1:
        raise ValueError("successful search needs n >= 1")
    return _succ_memo.get(n)


# Moments of L_n have denominators 2^e with e ~ n^2/2, so Fraction's gcd
# work dominates for large n.  Values are kept as dyadic pairs (A, e)
# meaning A / 2^e, normalized so that A is odd whenever e > 0.


def _norm(a: int, e: int) -> tuple[int, int]:
    if a == 0:
        return 0, 0
    tz = (a & -a).bit_length() - 1
    s = min(tz, e)
    return a >> s, e - s


def _dyadic_sum(terms: list[tuple[int, int, int]]) -> tuple[int, int]:
    """Sum of ``c * A / 2^e`` over ``(c, A, e)`` triples."""
    if not terms:
        return 0, 0
    top = max(e for _, _, e in terms)
    return sum((c * a) << (top - e) for c, a, e in terms), top


def _dyadic_moments(n: int, second: bool) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    g: list[tuple[int, int]] = [(0, 0)]
    h: list[tuple[int, int]] = [(0, 0)]
    for m in range(1, n + 1):
        binoms = [comb(m - 1, k) for k in range(m)]
        # g_m = m - 1 + 2^(2-m) sum_k C(m-1,k) g_k
        s, e = _dyadic_sum([(binoms[k], *g[k]) for k in range(m)])
        e += m - 2
        gm = _norm(((m - 1) << e) + s if e >= 0 else (m - 1) + (s << -e), max(e, 0))
        g.append(gm)
        if not second:
            continue
        # h_m = -(m-1)m + 2(m-1)g_m
        #       + 2^(2-m) [sum C g_k g_{m-1-k} + sum C h_k]
        terms = [(binoms[k], g[k][0] * g[m - 1 - k][0], g[k][1] + g[m - 1 - k][1]) for k in range(m)]
        terms += [(binoms[k], *h[k]) for k in range(m)]
        s, e = _dyadic_sum(terms)
        e += m - 2
        if e < 0:
            s, e = s << -e, 0
        t, et = _dyadic_sum([(-(m - 1) * m, 1, 0), (2 * (m - 1), *gm), (1, s, e)])
        h.append(_norm(t, et))
    return g, h


def _dyadic_successful(n: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    # T_m(z) = m S_m(z) = z + z 2^(2-m) sum_k C(m-1,k) T_k(z) has dyadic
    # coefficients; t1, t2 are T_m'(1) and T_m''(1).
    t1: list[tuple[int, int]] = [(0, 0)]
    t2: list[tuple[int, int]] = [(0, 0)]
    for m in range(1, n + 1):
        binoms = [comb(m - 1, k) for k in range(m)]
        r1, e1 = _dyadic_sum([(binoms[k], *t1[k]) for k in range(m)])
        r2, e2 = _dyadic_sum([(binoms[k], *t2[k]) for k in range(m)])
        # multiply by 2^(2-m)
        r1, e1 = (r1 << 1, 0) if m == 1 else (r1, e1 + m - 2)
        r2, e2 = (r2 << 1, 0) if m == 1 else (r2, e2 + m - 2)
        t1.append(_norm(*_dyadic_sum([(m, 1, 0), (1, r1, e1)])))
        t2.append(_norm(*_dyadic_sum([(2, r1, e1), (1, r2, e2)])))
    return t1, t2


def dst_successful_moments(n: int) -> DstMoments:
    """Mean and second factorial moment of the infinite-key successful search cost."""
    if n < 1:
        raise ValueError("successful search needs n >= 1")
    t1, t2 = _dyadic_successful(n)
    return DstMoments(n, _to_fraction(t1[n]) / n, _to_fraction(t2[n]) / n)


def dst_pair_covariance(n: int) -> Fraction:
    """Exact covariance of the successful costs of two distinct random keys.

    Summing ``Var L_n = sum_i Var d_i + sum_{i != j} Cov(d_i, d_j)`` over
    keys in a uniformly random order gives
    ``Cov = (Var L_n - n Var S_n) / (n (n - 1))``.
    """
    if n < 2:
        raise ValueError("need n >= 2 for two distinct keys")
    return (dst_path_length_moments(n).variance - n * dst_successful_moments(n).variance) / (n * (n - 1))


def _to_fraction(v: tuple[int, int]) -> Fraction:
    return Fraction(v[0], 1 << v[1])


def dst_path_length_means(n: int) -> list[Fraction]:
    """``[g_0, ..., g_n]`` for the infinite-key DST path length."""
    if n < 0:
        raise ValueError("n must be >= 0")
    g, _ = _dyadic_moments(n, second=False)
    return [_to_fraction(v) for v in g]


def dst_path_length_moments(n: int) -> DstMoments:
    if n < 0:
        raise ValueError("n must be >= 0")
    g, h = _dyadic_moments(n, second=True)
    return DstMoments(n, _to_fraction(g[n]), _to_fraction(h[n]))


# Displayed distributions for n = 2..5, coefficient lists from z^0 upward.
F = Fraction
_GOLDEN: dict[str, dict[int, list[Fraction]]] = {
    "unsuccessful-infinite": {
        2: [0, F(1, 2), F(1, 2)],
        3: [0, F(1, 4), F(5, 8), F(1, 8)],
        4: [0, F(1, 8), F(19, 32), F(17, 64), F(1, 64)],
        5: [0, F(1, 16), F(65, 128), F(195, 512), F(49, 1024), F(1, 1024)],
    },
    "unsuccessful-finite": {
        2: [0, F(2, 3), F(1, 3)],
        3: [0, F(2, 7), F(2, 3), F(1, 21)],
        4: [0, F(8, 65), F(302, 455), F(22, 105), F(1, 273)],
        5: [0, F(52, 899), F(7384, 13485), F(34502, 94395), F(26, 899), F(1, 6293)],
    },
    "successful-infinite": {
        2: [0, F(1, 2), F(1, 2)],
        3: [0, F(1, 3), F(1, 2), F(1, 6)],
        4: [0, F(1, 4), F(7, 16), F(9, 32), F(1, 32)],
        5: [0, F(1, 5), F(3, 8), F(11, 32), F(5, 64), F(1, 320)],
    },
    "successful-finite": {
        2: [0, F(1, 2), F(1, 2)],
        3: [0, F(1, 3), F(11, 21), F(1, 7)],
        4: [0, F(1, 4), F(9, 20), F(39, 140), F(3, 140)],
        5: [0, F(1, 5), F(1707, 4495), F(23561, 67425), F(4657, 67425), F(39, 22475)],
    },
    "pathlength-finite": {
        2: [0, 1],
        3: [0, 0, F(4, 7), F(3, 7)],
        4: [0, 0, 0, 0, F(4, 5), F(4, 35), F(3, 35)],
        5: [0] * 6 + [F(8984, 13485), F(3136, 13485), F(364, 4495), F(52, 4495), F(39, 4495)],
    },
}
del F

FAMILIES = tuple(_GOLDEN)


def golden_table(family: str, n: int) -> PGF:
    if family not in _GOLDEN:
        raise KeyError(f"unknown family {family!r}; expected one of {FAMILIES}")
    table = _GOLDEN[family]
    if n not in table:
        raise ValueError(f"golden tables cover n = 2..5, got {n}")
    return PGF(table[n])
