from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import pytest

from treepgf import bst
from treepgf.cumulants import cumulants_from_factorial
from treepgf.rational import PGF

F = Fraction


def _harmonic(n: int, power: int = 1) -> Fraction:
    return sum((F(1, k**power) for k in range(1, n + 1)), F(0))


def _insert_depths(order):
    """Depth (root = 0) of each key when inserted in ``order``."""
    tree: dict = {}
    depth = {}
    root = None
    for key in order:
        if root is None:
            root, depth[key] = key, 0
            continue
        node, d = root, 0
        while True:
            side = 0 if key < node else 1
            child = tree.get((node, side))
            d += 1
            if child is None:
                tree[node, side] = key
                depth[key] = d
                break
            node = child
    return depth


def _brute(n: int):
    """Exact PGFs of all three costs by walking every permutation."""
    unsucc: dict[int, int] = {}
    succ: dict[int, int] = {}
    path: dict[int, int] = {}
    perms = 0
    for order in permutations(range(n)):
        perms += 1
        depth = _insert_depths(order)
        for k, d in depth.items():
            succ[d + 1] = succ.get(d + 1, 0) + 1
        total = sum(depth.values())
        path[total] = path.get(total, 0) + 1
        # gap g lies between keys g-1 and g; its cost is the number of
        # keys on the search path, i.e. the larger depth of its neighbours + 1
        for g in range(n + 1):
            cost = 1 + max(depth.get(g - 1, -1), depth.get(g, -1))
            unsucc[cost] = unsucc.get(cost, 0) + 1

    def pgf(counts, total):
        return PGF(F(counts.get(k, 0), total) for k in range(max(counts) + 1))

    return pgf(unsucc, perms * (n + 1)), pgf(succ, perms * n), pgf(path, perms)


@pytest.mark.parametrize("n", range(1, 7))
def test_recursions_match_permutation_walk(n):
    u, s, p = _brute(n)
    assert bst.bst_unsuccessful_pgf(n) == u
    assert bst.bst_successful_pgf(n) == s
    assert bst.bst_path_length_pgf(n) == p


def test_quoted_unsuccessful_values():
    m2, m3 = bst.bst_unsuccessful_moments(2), bst.bst_unsuccessful_moments(3)
    assert (m2.g, m2.h, m2.variance) == (F(5, 3), F(4, 3), F(2, 9))
    assert (m3.g, m3.h, m3.variance) == (F(13, 6), F(3), F(17, 36))


def test_quoted_successful_values():
    m2, m3 = bst.bst_successful_moments(2), bst.bst_successful_moments(3)
    assert (m2.g, m2.h, m2.variance) == (F(3, 2), F(1), F(1, 4))
    assert (m3.g, m3.h, m3.variance) == (F(17, 9), F(20, 9), F(44, 81))


def test_quoted_path_length_values():
    assert bst.bst_path_length_means(4) == [0, 0, 1, F(8, 3), F(29, 6)]
    m3, m4 = bst.bst_path_length_moments(3), bst.bst_path_length_moments(4)
    assert (m3.h, m4.h) == (F(14, 3), F(58, 3))
    assert (m3.variance, m4.variance) == (F(2, 9), F(29, 36))


@pytest.mark.parametrize("n", range(1, 13))
def test_pgf_and_scalar_routes_agree(n):
    for pgf_fn, mom_fn in [
        (bst.bst_unsuccessful_pgf, bst.bst_unsuccessful_moments),
        (bst.bst_successful_pgf, bst.bst_successful_moments),
        (bst.bst_path_length_pgf, bst.bst_path_length_moments),
    ]:
        p, m = pgf_fn(n), mom_fn(n)
        assert p(1) == 1 and p.is_distribution()
        assert (p.mean(), p.derivative(2)(1)) == (m.g, m.h)


def test_harmonic_closed_forms():
    # independent closed forms for the means and variances
    for n in (1, 2, 5, 17, 60, 200):
        H, H2 = _harmonic(n), _harmonic(n, 2)
        H1, H12 = _harmonic(n + 1), _harmonic(n + 1, 2)
        u, s, p = bst.bst_unsuccessful_moments(n), bst.bst_successful_moments(n), bst.bst_path_length_moments(n)
        assert u.g == 2 * (H1 - 1)
        assert u.variance == 2 * H1 - 4 * H12 + 2
        assert s.g == 2 * (1 + F(1, n)) * H - 3
        assert s.variance == (2 + F(10, n)) * H - 4 * (1 + F(1, n)) * (H * H / n + H2) + 4
        assert p.g == 2 * (n + 1) * H - 4 * n
        assert p.variance == 7 * n * n - 4 * (n + 1) ** 2 * H2 - 2 * (n + 1) * H + 13 * n


def test_telescoped_means_at_large_n():
    n = 3000
    H = _harmonic(n)
    assert bst.bst_unsuccessful_moments(n).g == 2 * (H + F(1, n + 1) - 1)
    assert bst.bst_successful_moments(n).g == 2 * (1 + F(1, n)) * H - 3
    assert bst.bst_path_length_means(n)[n] == 2 * (n + 1) * H - 4 * n


def test_successful_and_path_means_are_linked():
    g = bst.bst_path_length_means(40)
    for n in range(1, 41):
        assert g[n] == n * (bst.bst_successful_moments(n).g - 1)


def test_means_increase():
    gs = [bst.bst_unsuccessful_moments(n).g for n in range(1, 40)]
    assert all(b > a for a, b in zip(gs, gs[1:]))
    gs = [bst.bst_successful_moments(n).g for n in range(1, 40)]
    assert all(b > a for a, b in zip(gs, gs[1:]))


@pytest.mark.parametrize("n", [0, 1, 2, 5, 9])
def test_factorial_moments_against_pgf(n):
    fm = bst.bst_path_length_factorial_moments(n, 5)
    p = bst.bst_path_length_pgf(n)
    for r in range(6):
        assert fm.m[r] == (p(1) if r == 0 else p.derivative(r)(1))


def test_factorial_moments_match_second_moment_route():
    for n in (10, 30, 70):
        _, g, h = bst.bst_path_length_factorial_moments(n, 2).m
        m = bst.bst_path_length_moments(n)
        assert (g, h) == (m.g, m.h)


def test_third_cumulant_from_factorial_moments():
    # small-n third cumulant through the PGF agrees with the integer table route
    p = bst.bst_path_length_pgf(8)
    pmf = {k: c for k, c in enumerate(p.coeffs)}
    mean = sum(k * c for k, c in pmf.items())
    k3 = sum(c * (k - mean) ** 3 for k, c in pmf.items())
    assert cumulants_from_factorial(list(bst.bst_path_length_factorial_moments(8, 3).m))[3] == k3


def test_errors():
    with pytest.raises(ValueError):
        bst.bst_unsuccessful_pgf(0)
    with pytest.raises(ValueError):
        bst.bst_successful_moments(0)
    with pytest.raises(ValueError):
        bst.bst_path_length_moments(-1)
    with pytest.raises(ValueError):
        bst.bst_path_length_factorial_moments(5, 9)
    assert bst.bst_path_length_pgf(0) == PGF.one()
