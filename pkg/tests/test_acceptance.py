"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import io
import json
import time
from fractions import Fraction
from math import factorial

import mpmath
import pytest

from treepgf import asymptotics, bst, cli, cumulants, dst, dst_enum
from treepgf.montecarlo import (
    DEFAULT_SEED,
    SimConfig,
    chi_square_test,
    covariance_sampling_sd,
    simulate_bst,
    simulate_dst,
    simulate_dst_cost_covariance,
)

F = Fraction
RESULTS: dict[int, str] = {}


@contextlib.contextmanager
def criterion(number: int, title: str, limit: float | None = None):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - t0
        RESULTS[number] = f"FAIL criterion {number}: {title} ({elapsed:.1f}s) {type(exc).__name__}: {exc}"
        print(RESULTS[number])
        raise
    RESULTS[number] = f"PASS criterion {number}: {title} ({elapsed:.1f}s)"
    print(RESULTS[number])


def test_criterion_1_bst_exact_moments():
    with criterion(1, "BST exact moments", limit=1.0):
        u2, u3 = bst.bst_unsuccessful_moments(2), bst.bst_unsuccessful_moments(3)
        assert (u2.g, u3.g, u2.h, u3.h) == (F(5, 3), F(13, 6), F(4, 3), 3)
        assert (u2.variance, u3.variance) == (F(2, 9), F(17, 36))
        s2, s3 = bst.bst_successful_moments(2), bst.bst_successful_moments(3)
        assert (s2.g, s3.g, s2.h, s3.h) == (F(3, 2), F(17, 9), 1, F(20, 9))
        assert (s2.variance, s3.variance) == (F(1, 4), F(44, 81))
        assert bst.bst_path_length_means(4) == [0, 0, 1, F(8, 3), F(29, 6)]
        l3, l4 = bst.bst_path_length_moments(3), bst.bst_path_length_moments(4)
        assert (l3.h, l4.h, l3.variance, l4.variance) == (F(14, 3), F(58, 3), F(2, 9), F(29, 36))


def test_criterion_2_dst_path_length_moments():
    with criterion(2, "DST path-length moments", limit=1.0):
        g = dst.dst_path_length_means(4)
        assert (g[2], g[3], g[4]) == (1, F(5, 2), F(35, 8))
        l3, l4 = dst.dst_path_length_moments(3), dst.dst_path_length_moments(4)
        assert (l3.h, l4.h, l3.variance, l4.variance) == (4, F(61, 4), F(1, 4), F(31, 64))


TABLES = {
    ("unsuccessful", "infinite"): {
        2: [0, F(1, 2), F(1, 2)],
        3: [0, F(1, 4), F(5, 8), F(1, 8)],
        4: [0, F(1, 8), F(19, 32), F(17, 64), F(1, 64)],
        5: [0, F(1, 16), F(65, 128), F(195, 512), F(49, 1024), F(1, 1024)],
    },
    ("unsuccessful", "finite"): {
        2: [0, F(2, 3), F(1, 3)],
        3: [0, F(2, 7), F(2, 3), F(1, 21)],
        4: [0, F(8, 65), F(302, 455), F(22, 105), F(1, 273)],
        5: [0, F(52, 899), F(7384, 13485), F(34502, 94395), F(26, 899), F(1, 6293)],
    },
    ("successful", "infinite"): {
        2: [0, F(1, 2), F(1, 2)],
        3: [0, F(1, 3), F(1, 2), F(1, 6)],
        4: [0, F(1, 4), F(7, 16), F(9, 32), F(1, 32)],
        5: [0, F(1, 5), F(3, 8), F(11, 32), F(5, 64), F(1, 320)],
    },
    ("successful", "finite"): {
        2: [0, F(1, 2), F(1, 2)],
        3: [0, F(1, 3), F(11, 21), F(1, 7)],
        4: [0, F(1, 4), F(9, 20), F(39, 140), F(3, 140)],
        5: [0, F(1, 5), F(1707, 4495), F(23561, 67425), F(4657, 67425), F(39, 22475)],
    },
    ("pathlength", "finite"): {
        2: [0, 1],
        3: [0, 0, F(4, 7), F(3, 7)],
        4: [0, 0, 0, 0, F(4, 5), F(4, 35), F(3, 35)],
        5: [0] * 6 + [F(8984, 13485), F(3136, 13485), F(364, 4495), F(52, 4495), F(39, 4495)],
    },
}


def _enumerated(search, keys, n):
    if search == "pathlength":
        res = dst_enum.enumerate_path_length(n, keys, symmetry=n == 5)
    else:
        res = dst_enum.enumerate_search(n, search, keys, symmetry=n == 5)
    return [res.counts.get(k, 0) for k in range(max(res.counts) + 1)], res.total


def test_criterion_3_dst_tables():
    with criterion(3, "DST tables by enumeration and recursion"):
        for (search, keys), table in TABLES.items():
            for n, want in table.items():
                counts, total = _enumerated(search, keys, n)
                assert [F(c, total) for c in counts] == want, (search, keys, n)
        for n in range(2, 6):
            assert list(dst.dst_unsuccessful_pgf_infinite(n).coeffs) == TABLES["unsuccessful", "infinite"][n]
            assert list(dst.dst_successful_pgf_infinite(n).coeffs) == TABLES["successful", "infinite"][n]


def test_criterion_4_spot_probabilities():
    spots = [
        (2, "infinite", 2, F(1, 2)),
        (2, "finite", 2, F(1, 3)),
        (3, "finite", 3, F(1, 21)),
        (3, "finite", 1, F(2, 7)),
        (4, "infinite", 4, F(1, 64)),
        (4, "finite", 4, F(1, 273)),
        (4, "finite", 1, F(8, 65)),
    ]
    with criterion(4, "spot probabilities and matrix totals"):
        for n, keys, cost, prob in spots:
            res = dst_enum.enumerate_search(n, "unsuccessful", keys)
            if keys == "infinite":
                assert res.total == 2 ** ((n + 1) * n)
            else:
                assert res.total == factorial(2**n) // factorial(2**n - n - 1)
            assert F(res.counts[cost], res.total) == prob


def test_criterion_5_cumulant_tables():
    c = [7, -19, F(2260, 9), F(-229621, 108), F(74250517, 2700), F(-30532750703, 81000), F(90558126238639, 14883750)]
    a = [7, -19, F(937, 9), F(-85981, 108), F(21096517, 2700), F(-7527245453, 81000), F(19281922400989, 14883750)]
    with criterion(5, "cumulant tables c_s and a_s", limit=30.0):
        assert [cumulants.hennequin_c(s) for s in range(2, 9)] == c
        assert [cumulants.hennequin_a(s) for s in range(2, 9)] == a


def test_criterion_6_constants():
    with criterion(6, "constants C, D and kappa_2", limit=10.0):
        C, D = asymptotics.constant_C(12), asymptotics.constant_D(12)
        assert mpmath.nstr(C.value, 12).startswith("0.2660036454")
        assert mpmath.nstr(D.value, 12).startswith("-0.4970105417")
        assert C.error < 1e-11 and D.error < 1e-11
        with mpmath.workdps(30):
            k2 = cumulants.kappa_leading_constant(2, 20)
            assert abs(k2 - (7 - 2 * mpmath.pi**2 / 3)) < mpmath.mpf(10) ** -12


def test_criterion_7_asymptotics():
    with criterion(7, "asymptotic residuals shrink"):
        for family in ("bst-unsucc-mean", "bst-succ-mean"):
            rep = asymptotics.convergence_report(family, [100, 1000, 10000])
            s = rep.scaled
            assert s[0] > s[1] > s[2], family
        rep = asymptotics.convergence_report("bst-L-mean", [2**k for k in range(5, 11)])
        s = rep.scaled
        assert all(a > b for a, b in zip(s, s[1:])) and max(s) < 1
        grid = [20, 40, 80, 160]
        dist = {s: [] for s in range(2, 6)}
        for n in grid:
            kappa = cumulants.cumulants_from_factorial(list(bst.bst_path_length_factorial_moments(n, 5).m))
            for s in range(2, 6):
                with mpmath.workdps(30):
                    k = mpmath.mpf(kappa[s].numerator) / kappa[s].denominator / mpmath.mpf(n) ** s
                    dist[s].append(abs(k - cumulants.kappa_leading_constant(s, 25)))
        for s, d in dist.items():
            assert all(a > b for a, b in zip(d, d[1:])), s


def _dst_reference(mode, keys, n):
    if keys == "infinite":
        return {
            "unsuccessful": dst.dst_unsuccessful_pgf_infinite,
            "successful": dst.dst_successful_pgf_infinite,
            "pathlength": dst.dst_path_length_pgf,
        }[mode](n)
    if mode == "pathlength":
        return dst_enum.enumerate_path_length(n, keys, symmetry=True).pgf
    if n == 5:
        return dst.golden_table(f"{mode}-{keys}", n)
    return dst_enum.enumerate_search(n, mode, keys).pgf


def test_criterion_8_simulation_agreement():
    trials = 10**6
    worst = 1.0
    with criterion(8, "simulation vs exact PGFs", limit=60.0):
        bst_pgf = {
            "unsuccessful": bst.bst_unsuccessful_pgf,
            "successful": bst.bst_successful_pgf,
            "pathlength": bst.bst_path_length_pgf,
        }
        for n in range(1, 6):
            for mode in ("unsuccessful", "successful", "pathlength"):
                summary = simulate_bst(SimConfig(n, trials, DEFAULT_SEED, mode))
                p = chi_square_test(summary, bst_pgf[mode](n))[2]
                worst = min(worst, p)
                assert p >= 1e-4, ("bst", n, mode, p)
                for keys in ("infinite", "finite"):
                    summary = simulate_dst(SimConfig(n, trials, DEFAULT_SEED, mode, keys))
                    p = chi_square_test(summary, _dst_reference(mode, keys, n))[2]
                    worst = min(worst, p)
                    assert p >= 1e-4, ("dst", n, mode, keys, p)
        summary = simulate_bst(SimConfig(100, trials, DEFAULT_SEED, "unsuccessful"))
        exact = float(bst.bst_unsuccessful_moments(100).g)
        assert abs(summary.mean - exact) < 4 * summary.stderr
    print(f"  smallest chi-square p-value: {worst:.4f}")


def test_criterion_9_covariance_experiment():
    with criterion(9, "covariance report and two-key oracle"):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = cli.main(["simulate", "covariance", "--n", "64", "--trials", "10000000"])
        assert code == 0
        payload = json.loads(buf.getvalue())["payload"]
        for key in ("n_times_covariance", "n_times_stderr", "D", "stderr"):
            assert key in payload
        joint = dst_enum.enumerate_successful_pairs(2)
        exact = float(dst_enum.covariance_of(joint))
        est = simulate_dst_cost_covariance(2, 10**6)
        assert abs(est.covariance - exact) < 4 * covariance_sampling_sd(joint, 10**6)
    print(
        "  n=64: n*cov = {:.4f} +/- {:.4f}, exact {:.4f}, D = {:.4f}".format(
            payload["n_times_covariance"], payload["n_times_stderr"], payload["exact_n_times_covariance"], payload["D"]
        )
    )


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
