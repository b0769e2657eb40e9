"""Digital-search-tree constants and large-``n`` expansions of the moments.

Real numbers are ``mpmath`` floats evaluated at a caller-chosen number of
decimal digits.  Series constants come with an explicit truncation bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Callable, Iterable

import mpmath
from mpmath import mpf

from . import bst, dst
from .rational import format_rational

__all__ = [
    "HighReal",
    "AsymptoticReport",
    "FAMILIES",
    "constant_alpha",
    "constant_beta",
    "constant_Q",
    "partial_Q",
    "phi",
    "constant_C",
    "c_triple_sum",
    "c_tail_bound",
    "constant_D",
    "asymptotic_prediction",
    "exact_value",
    "convergence_report",
]

GUARD = 10


@dataclass(frozen=True)
class HighReal:
    value: mpf
    error: mpf
    digits: int

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return mpmath.nstr(self.value, self.digits)

    def as_dict(self) -> dict:
        return {
            "value": str(self),
            "digits": self.digits,
            "error_bound": mpmath.nstr(self.error, 3),
        }


def _eps(digits: int) -> mpf:
    return mpf(10) ** (-(digits + 2))


def to_mpf(q: Fraction | int) -> mpf:
    q = Fraction(q)
    return mpf(q.numerator) / q.denominator


@lru_cache(maxsize=None)
def constant_alpha(precision: int = 20) -> HighReal:
    """``sum_{j>=1} 1/(2^j - 1)``; the tail after ``J`` terms is below ``2^(1-J)``."""
    with mpmath.workdps(precision + GUARD):
        eps = _eps(precision)
        total, j = mpf(0), 0
        while True:
            j += 1
            total += 1 / (mpf(2) ** j - 1)
            tail = mpf(2) ** (1 - j)
            if tail < eps:
                return HighReal(+total, tail, precision)


@lru_cache(maxsize=None)
def constant_beta(precision: int = 20) -> HighReal:
    """``sum_{j>=1} 1/(2^j - 1)^2``; tail after ``J`` terms below ``(4/3) 4^-J``."""
    with mpmath.workdps(precision + GUARD):
        eps = _eps(precision)
        total, j = mpf(0), 0
        while True:
            j += 1
            total += 1 / (mpf(2) ** j - 1) ** 2
            tail = mpf(4) / 3 * mpf(4) ** (-j)
            if tail < eps:
                return HighReal(+total, tail, precision)


def partial_Q(l: int) -> Fraction:
    """``prod_{j=1..l} (1 - 2^-j)``, with the empty product equal to 1."""
    out = Fraction(1)
    for j in range(1, l + 1):
        out *= 1 - Fraction(1, 2**j)
    return out


@lru_cache(maxsize=None)
def constant_Q(precision: int = 20) -> HighReal:
    """``prod_{j>=1} (1 - 2^-j)``.

    ``Q_J >= Q >= Q_J (1 - 2^-J)``, so the error after ``J`` factors is at
    most ``2^-J``.
    """
    with mpmath.workdps(precision + GUARD):
        eps = _eps(precision)
        prod, j = mpf(1), 0
        while True:
            j += 1
            prod *= 1 - mpf(2) ** (-j)
            tail = mpf(2) ** (-j)
            if tail < eps:
                return HighReal(+prod, tail, precision)


def phi(x) -> mpf:
    """``(x - ln x - 1)/(x - 1)^2``, continued by ``1/2`` at ``x = 1``.

    Near 1 the quotient cancels badly, so for ``|x - 1| < 1/8`` the series
    ``sum_k (-1)^k t^k / (k + 2)`` with ``t = x - 1`` is used instead.
    """
    x = mpf(x)
    if x <= 0:
        raise ValueError("phi is defined for x > 0")
    t = x - 1
    if abs(t) < mpf(1) / 8:
        eps = mpf(2) ** (-mpmath.mp.prec - 4)
        total, term, k = mpf(0), mpf(1), 0
        while True:
            contrib = term / (k + 2)
            total += contrib
            if abs(contrib) < eps:
                return total
            k += 1
            term *= -t
    return (x - mpmath.log(x) - 1) / (t * t)


def c_triple_sum(J: int, K: int, dps: int) -> mpf:
    """Truncated triple sum for ``C`` over ``j <= J`` and ``k, l <= K``.

    Summation order is fixed: ``j`` ascending, then ``k``, then ``l >= k``
    (the summand is symmetric in ``k`` and ``l``).
    """
    with mpmath.workdps(dps):
        Qs = [mpf(1)]
        for i in range(1, max(J, K) + 1):
            Qs.append(Qs[-1] * (1 - mpf(2) ** (-i)))
        total = mpf(0)
        for j in range(J + 1):
            wj = (-1) ** j * mpf(2) ** (-(j * (j + 1) // 2)) / Qs[j]
            for k in range(K + 1):
                for l in range(k, K + 1):
                    x = mpf(2) ** (-j - k) + mpf(2) ** (-j - l)
                    term = wj / (Qs[k] * Qs[l]) * mpf(2) ** (-k - l) * phi(x)
                    total += term if k == l else 2 * term
        Q = constant_Q(dps).value
        return Q / mpmath.log(2) * total


def c_tail_bound(J: int, K: int) -> mpf:
    """Upper bound on what :func:`c_triple_sum` drops.

    With ``x = 2^(-j-k) + 2^(-j-l)`` we have ``x >= 2^-(j+k+l)`` and
    ``phi(x) <= 1 + |ln x|`` on ``(0, 2]``, while ``1/(Q_j Q_k Q_l) <= Q^-3``.
    Each term is therefore at most
    ``Q^-3 w_j 2^(-k-l) (1 + (j+k+l) ln 2)`` with ``w_j = 2^(-j(j+1)/2)``,
    and the three tails (j > J, k > K, l > K) sum in closed form.
    """
    ln2 = mpmath.log(2)
    ws = [mpf(2) ** (-(j * (j + 1) // 2)) for j in range(J + 80)]
    W0 = sum(ws)
    W1 = sum(j * w for j, w in enumerate(ws))
    # sum_{k>K} 2^-k = 2^-K, sum_{k>K} k 2^-k = (K+2) 2^-K,
    # sum_l 2^-l = 2, sum_l l 2^-l = 2
    tail_k = mpf(2) ** (1 - K) * (W0 + ln2 * W1 + ln2 * (K + 3) * W0)
    tail_j = sum((w * (4 + 4 * j * ln2 + 8 * ln2) for j, w in enumerate(ws) if j > J), mpf(0))
    Q_lower = mpf(1) / 4
    return (tail_j + 2 * tail_k) / (ln2 * Q_lower**2)


def _c_cutoffs(precision: int) -> tuple[int, int]:
    eps = _eps(precision)
    J = 1
    while c_tail_bound(J, 200) > eps / 2:
        J += 1
    K = 8
    while c_tail_bound(J, K) > eps:
        K += 4
    return J, K


@lru_cache(maxsize=None)
def constant_C(precision: int = 12) -> HighReal:
    """Leading variance constant of the DST path length."""
    if precision > 40:
        raise ValueError("constant_C supports at most 40 digits")
    J, K = _c_cutoffs(precision)
    value = c_triple_sum(J, K, precision + GUARD)
    return HighReal(value, c_tail_bound(J, K), precision)


@lru_cache(maxsize=None)
def constant_D(precision: int = 12) -> HighReal:
    """``C - 1/12 - pi^2/(6 ln(2)^2) + alpha + beta``."""
    C = constant_C(precision)
    a = constant_alpha(precision)
    b = constant_beta(precision)
    with mpmath.workdps(precision + GUARD):
        ln2 = mpmath.log(2)
        value = C.value - mpf(1) / 12 - mpmath.pi**2 / (6 * ln2**2) + a.value + b.value
    return HighReal(value, C.error + a.error + b.error, precision)


# -- expansions in n -------------------------------------------------------


def _bst_unsucc_mean(n, c):
    return 2 * c.ln(n) + 2 * (c.gamma - 1) + mpf(3) / n


def _bst_unsucc_var(n, c):
    return 2 * c.ln(n) + 2 * (c.gamma - c.pi2 / 3 + 1) + mpf(7) / n


def _bst_succ_mean(n, c):
    L = c.ln(n)
    return 2 * L + (2 * c.gamma - 3) + 2 * L / n + (2 * c.gamma + 1) / n


def _bst_succ_var(n, c):
    L, g = c.ln(n), c.gamma
    return (
        2 * L
        + 2 * (g - c.pi2 / 3 + 2)
        - 4 * L**2 / n
        + 2 * (5 - 4 * g) * L / n
        + (5 + 10 * g - 4 * g**2 - 2 * c.pi2 / 3) / n
    )


def _bst_L_mean(n, c):
    L, g = c.ln(n), c.gamma
    return 2 * n * L + 2 * (g - 2) * n + 2 * L + (2 * g + 1)


def _bst_L_var(n, c):
    L, g = c.ln(n), c.gamma
    return (
        (7 - 2 * c.pi2 / 3) * n**2
        - 2 * n * L
        + (17 - 2 * g - 4 * c.pi2 / 3) * n
        - 2 * L
        + (5 - 2 * g - 2 * c.pi2 / 3)
    )


def _dst_L_mean(n, c):
    # fluctuating terms delta_1, delta_2 taken as 0
    L, g, ln2, a = c.ln(n), c.gamma, c.ln2, c.alpha
    return n * L / ln2 + n * ((g - 1) / ln2 + mpf(1) / 2 - a) + L / ln2 + ((2 * g - 1) / (2 * ln2) + mpf(5) / 2 - a)


def _dst_L_var(n, c):
    return n * c.C


@dataclass
class _Consts:
    dps: int
    gamma: mpf = field(init=False)
    pi2: mpf = field(init=False)
    ln2: mpf = field(init=False)
    _alpha: mpf | None = None
    _C: mpf | None = None

    def __post_init__(self):
        with mpmath.workdps(self.dps):
            self.gamma = +mpmath.euler
            self.pi2 = mpmath.pi**2
            self.ln2 = mpmath.log(2)

    def ln(self, n) -> mpf:
        return mpmath.log(n)

    @property
    def alpha(self) -> mpf:
        if self._alpha is None:
            self._alpha = constant_alpha(self.dps).value
        return self._alpha

    @property
    def C(self) -> mpf:
        if self._C is None:
            self._C = constant_C(min(self.dps, 30)).value
        return self._C


# family -> (expansion, scale of first omitted term as a function of n, decay asserted?)
_FAMILY_TABLE: dict[str, tuple[Callable, Callable[[int], mpf], bool]] = {
    "bst-unsucc-mean": (_bst_unsucc_mean, lambda n: mpf(n), True),
    "bst-unsucc-var": (_bst_unsucc_var, lambda n: mpf(n), True),
    "bst-succ-mean": (_bst_succ_mean, lambda n: mpf(n), True),
    "bst-succ-var": (_bst_succ_var, lambda n: mpf(n), True),
    "bst-L-mean": (_bst_L_mean, lambda n: mpf(1), True),
    "bst-L-var": (_bst_L_var, lambda n: mpf(1), True),
    "dst-L-mean": (_dst_L_mean, lambda n: 1 / mpf(n), False),
    "dst-L-var": (_dst_L_var, lambda n: 1 / mpf(n), False),
}
FAMILIES = tuple(_FAMILY_TABLE)


def _family(name: str):
    try:
        return _FAMILY_TABLE[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}") from None


def asymptotic_prediction(family: str, n: int, precision: int = 30) -> HighReal:
    """The family's expansion at ``n`` without its ``o()`` / fluctuation terms."""
    fn, _, _ = _family(family)
    if n < 2:
        raise ValueError("expansions need n >= 2")
    with mpmath.workdps(precision + GUARD):
        value = fn(n, _Consts(precision + GUARD))
    return HighReal(value, mpf(10) ** (-precision), precision)


def exact_value(family: str, n: int) -> Fraction:
    """Exact mean or variance from the matching moments routine."""
    _family(family)
    if family == "bst-unsucc-mean":
        return bst.bst_unsuccessful_moments(n).g
    if family == "bst-unsucc-var":
        return bst.bst_unsuccessful_moments(n).variance
    if family == "bst-succ-mean":
        return bst.bst_successful_moments(n).g
    if family == "bst-succ-var":
        return bst.bst_successful_moments(n).variance
    if family == "bst-L-mean":
        return bst.bst_path_length_means(n)[n]
    if family == "bst-L-var":
        _, g, h = bst.bst_path_length_factorial_moments(n, 2).m
        return h - g * g + g
    if family == "dst-L-mean":
        return dst.dst_path_length_means(n)[n]
    return dst.dst_path_length_moments(n).variance


@dataclass
class AsymptoticReport:
    family: str
    rows: list[dict]
    decay_asserted: bool

    @property
    def scaled(self) -> list[mpf]:
        return [r["scaled"] for r in self.rows]

    @property
    def decreasing(self) -> bool:
        s = self.scaled
        return all(b < a for a, b in zip(s, s[1:]))

    def as_dict(self, digits: int = 15) -> dict:
        return {
            "family": self.family,
            "decay_asserted": self.decay_asserted,
            "scaled_residuals_decreasing": self.decreasing,
            "rows": [
                {
                    "n": r["n"],
                    "exact": format_rational(r["exact"]) if r["n"] <= 64 else mpmath.nstr(r["exact_real"], digits),
                    "predicted": mpmath.nstr(r["predicted"], digits),
                    "residual": mpmath.nstr(r["residual"], 6),
                    "scaled": mpmath.nstr(r["scaled"], 6),
                }
                for r in self.rows
            ],
        }


def convergence_report(family: str, grid: Iterable[int], precision: int = 30) -> AsymptoticReport:
    """Exact value, prediction and scaled residual for every ``n`` in ``grid``.

    The residual is multiplied by the inverse order of the first dropped
    term (``n`` for ``o(1/n)`` claims, 1 for ``o(1)``); for the DST families
    it is divided by ``n`` instead, since the fluctuation terms are unknown
    and only a bounded band can be expected.
    """
    _, scale, asserted = _family(family)
    rows = []
    with mpmath.workdps(precision + GUARD):
        for n in sorted(set(grid)):
            exact = exact_value(family, n)
            pred = asymptotic_prediction(family, n, precision).value
            ex = to_mpf(exact)
            res = abs(ex - pred)
            rows.append(
                {"n": n, "exact": exact, "exact_real": ex, "predicted": pred, "residual": res, "scaled": res * scale(n)}
            )
    return AsymptoticReport(family, rows, asserted)
