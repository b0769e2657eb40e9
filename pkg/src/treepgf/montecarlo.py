"""Monte Carlo simulation of BST and DST search costs.

Trials are grouped into fixed-size blocks.  Block ``b`` draws from its own
stream ``SeedSequence(seed, spawn_key=(b,))``, so results depend only on
``(seed, n, trials, mode, keys)`` and never on how blocks are scheduled.
Histograms are merged by integer addition and all summary statistics are
computed from the merged histogram.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import stats

from . import _kernels
from .rational import PGF

__all__ = [
    "DEFAULT_SEED",
    "SimConfig",
    "SimSummary",
    "CovarianceEstimate",
    "simulate_bst",
    "simulate_dst",
    "simulate_dst_cost_covariance",
    "chi_square_test",
    "covariance_sampling_sd",
    "block_size",
]

DEFAULT_SEED = 271828
MODES = ("unsuccessful", "successful", "pathlength")
_MODE_CODES = {
    "unsuccessful": _kernels.UNSUCCESSFUL,
    "successful": _kernels.SUCCESSFUL,
    "pathlength": _kernels.PATH_LENGTH,
}


@dataclass(frozen=True)
class SimConfig:
    n: int
    trials: int
    seed: int = DEFAULT_SEED
    mode: str = "unsuccessful"
    keys: str = "infinite"
    jobs: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.keys not in ("infinite", "finite"):
            raise ValueError("keys must be 'infinite' or 'finite'")


@dataclass
class SimSummary:
    trials: int
    histogram: dict[int, int] = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(self._mean())

    def _mean(self) -> Fraction:
        return Fraction(sum(k * c for k, c in self.histogram.items()), self.trials)

    @property
    def variance(self) -> float:
        if self.trials < 2:
            return 0.0
        m = self._mean()
        ss = sum(c * (k - m) ** 2 for k, c in self.histogram.items())
        return float(ss / (self.trials - 1))

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.trials)

    def proportions(self) -> dict[int, float]:
        return {k: c / self.trials for k, c in sorted(self.histogram.items())}

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean": self.mean,
            "variance": self.variance,
            "stderr": self.stderr,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def block_size(n: int) -> int:
    """Trials per RNG block; depends only on ``n``."""
    return max(1024, min(1 << 16, (1 << 22) // n))


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _run_blocks(cfg: SimConfig, draw: Callable[[np.random.Generator, int], np.ndarray]) -> SimSummary:
    size = block_size(cfg.n)
    nblocks = -(-cfg.trials // size)

    def one(b: int) -> np.ndarray:
        count = min(size, cfg.trials - b * size)
        return np.bincount(draw(_block_rng(cfg.seed, b), count))

    if cfg.jobs > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            parts = list(pool.map(one, range(nblocks)))
    else:
        parts = [one(b) for b in range(nblocks)]
    width = max(len(p) for p in parts)
    hist = np.zeros(width, np.int64)
    for p in parts:
        hist[: len(p)] += p
    return SimSummary(cfg.trials, {k: int(v) for k, v in enumerate(hist) if v})


def simulate_bst(cfg: SimConfig) -> SimSummary:
    """Keys ``1, 3, ..., 2n-1`` in random order; probes even (absent) or odd (present)."""
    n = cfg.n
    keys = np.arange(1, 2 * n, 2, dtype=np.int32)
    mode = _MODE_CODES[cfg.mode]

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        perms = rng.permuted(np.broadcast_to(keys, (count, n)), axis=1)
        if cfg.mode == "unsuccessful":
            probes = 2 * rng.integers(0, n + 1, count)
        else:
            probes = 2 * rng.integers(0, n, count) + 1
        return _kernels.bst_costs(perms, probes, mode)

    return _run_blocks(cfg, draw)


def _random_keys(rng: np.random.Generator, count: int, rows: int, n: int, finite: bool) -> np.ndarray:
    """Key array of shape ``(count, rows, words)``.

    Infinite keys only ever have bits ``1 .. n-1`` inspected, so
    ``ceil((n-1)/64)`` random words per key reproduce them exactly.
    Finite keys are ``n``-bit integers, redrawn until pairwise distinct.
    """
    if not finite:
        words = max(1, -(-(n - 1) // 64))
        return rng.integers(0, 1 << 64, size=(count, rows, words), dtype=np.uint64, endpoint=False)
    if n > 62:
        raise ValueError("finite-key simulation supports n <= 62")
    vals = rng.integers(0, 1 << n, size=(count, rows), dtype=np.int64)
    while True:
        srt = np.sort(vals, axis=1)
        dup = (np.diff(srt, axis=1) == 0).any(axis=1)
        if not dup.any():
            break
        vals[dup] = rng.integers(0, 1 << n, size=(int(dup.sum()), rows), dtype=np.int64)
    return vals.astype(np.uint64).reshape(count, rows, 1)


def simulate_dst(cfg: SimConfig) -> SimSummary:
    """Digital search tree searches under either key model."""
    n = cfg.n
    finite = cfg.keys == "finite"
    mode = _MODE_CODES[cfg.mode]
    if finite and cfg.mode == "unsuccessful" and n + 1 > 2**n:
        raise ValueError("no room for a distinct probe")

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        if cfg.mode == "unsuccessful":
            allk = _random_keys(rng, count, n + 1, n, finite)
            keys = np.ascontiguousarray(allk[:, :n, :])
            probes = np.ascontiguousarray(allk[:, n, :])
            index = np.full(count, -1, np.int64)
        else:
            keys = _random_keys(rng, count, n, n, finite)
            index = rng.integers(0, n, count)
            probes = np.ascontiguousarray(keys[np.arange(count), index, :])
        return _kernels.dst_costs(keys, probes, index, n, mode, finite)

    return _run_blocks(cfg, draw)


@dataclass
class CovarianceEstimate:
    n: int
    trials: int
    joint: dict[tuple[int, int], int]

    def _moments(self) -> tuple[Fraction, Fraction, Fraction]:
        T = self.trials
        ex = Fraction(sum(a * c for (a, _), c in self.joint.items()), T)
        ey = Fraction(sum(b * c for (_, b), c in self.joint.items()), T)
        exy = Fraction(sum(a * b * c for (a, b), c in self.joint.items()), T)
        return ex, ey, exy

    @property
    def covariance(self) -> float:
        ex, ey, exy = self._moments()
        T = self.trials
        return float((exy - ex * ey) * Fraction(T, T - 1))

    @property
    def stderr(self) -> float:
        # Jackknife over trials, done per histogram cell.  When X + Y is
        # constant (n = 2) the estimator's spread is second order and any
        # data-based error bar is unreliable; see covariance_sampling_sd.
        T = self.trials
        if T < 3:
            return math.inf
        sx = sum(a * c for (a, _), c in self.joint.items())
        sy = sum(b * c for (_, b), c in self.joint.items())
        sxy = sum(a * b * c for (a, b), c in self.joint.items())
        loo = {
            cell: (Fraction(sxy - a * b) - Fraction((sx - a) * (sy - b), T - 1)) / (T - 2)
            for cell in self.joint
            for a, b in [cell]
        }
        mean = sum(loo[cell] * c for cell, c in self.joint.items()) / T
        v = Fraction(T - 1, T) * sum(c * (loo[cell] - mean) ** 2 for cell, c in self.joint.items())
        return math.sqrt(float(v))

    def as_dict(self, D: float | None = None, exact: Fraction | None = None) -> dict:
        out = {
            "n": self.n,
            "trials": self.trials,
            "covariance": self.covariance,
            "stderr": self.stderr,
            "n_times_covariance": self.n * self.covariance,
            "n_times_stderr": self.n * self.stderr,
        }
        if D is not None:
            out["D"] = D
        if exact is not None:
            out["exact_n_times_covariance"] = self.n * float(exact)
            out["z_score"] = (self.covariance - float(exact)) / self.stderr if self.stderr else None
        return out


def simulate_dst_cost_covariance(
    n: int, trials: int, seed: int = DEFAULT_SEED, jobs: int = 1
) -> CovarianceEstimate:
    """Joint successful costs of two distinct random keys in one infinite-key tree."""
    if n < 2:
        raise ValueError("need n >= 2 for two distinct keys")
    if trials < 2:
        raise ValueError("covariance needs at least two trials")
    cfg = SimConfig(n, trials, seed, "successful", "infinite", jobs)
    side = n + 1

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        keys = _random_keys(rng, count, n, n, False)
        first = rng.integers(0, n, count)
        second = rng.integers(0, n - 1, count)
        second += second >= first
        costs = _kernels.dst_pair_costs(keys, first, second, n)
        return costs[:, 0] * side + costs[:, 1]

    flat = _run_blocks(cfg, draw)
    joint = {divmod(cell, side): c for cell, c in flat.histogram.items()}
    return CovarianceEstimate(n, trials, joint)


def covariance_sampling_sd(joint: dict[tuple[int, int], Fraction], trials: int) -> float:
    """Exact standard deviation of the unbiased sample covariance.

    ``joint`` is the true joint law of ``(X, Y)``;
    ``Var(s_xy) = mu_22 / T - (T-2) sigma_xy^2 / (T (T-1)) + sigma_x^2 sigma_y^2 / (T (T-1))``.
    """
    T = trials
    if T < 2:
        raise ValueError("need at least two trials")
    ex = sum(p * a for (a, _), p in joint.items())
    ey = sum(p * b for (_, b), p in joint.items())
    sxy = sum(p * (a - ex) * (b - ey) for (a, b), p in joint.items())
    sxx = sum(p * (a - ex) ** 2 for (a, _), p in joint.items())
    syy = sum(p * (b - ey) ** 2 for (_, b), p in joint.items())
    m22 = sum(p * (a - ex) ** 2 * (b - ey) ** 2 for (a, b), p in joint.items())
    v = Fraction(m22) / T - Fraction(T - 2, T * (T - 1)) * sxy**2 + sxx * syy / (T * (T - 1))
    return math.sqrt(float(v))


def chi_square_test(summary: SimSummary, pgf: PGF, min_expected: float = 5.0) -> tuple[float, int, float]:
    """Pearson goodness of fit; returns ``(statistic, dof, p_value)``.

    Adjacent cells are pooled until every expected count reaches
    ``min_expected``.  Observations outside the support of ``pgf`` make
    the p-value 0.
    """
    T = summary.trials
    support = [k for k, p in enumerate(pgf.coeffs) if p > 0]
    if any(k not in support for k in summary.histogram):
        return math.inf, 0, 0.0
    cells: list[tuple[float, int]] = []
    exp_acc, obs_acc = 0.0, 0
    for k in support:
        exp_acc += float(pgf[k]) * T
        obs_acc += summary.histogram.get(k, 0)
        if exp_acc >= min_expected:
            cells.append((exp_acc, obs_acc))
            exp_acc, obs_acc = 0.0, 0
    if exp_acc or obs_acc:
        if cells:
            e, o = cells.pop()
            cells.append((e + exp_acc, o + obs_acc))
        else:
            cells.append((exp_acc, obs_acc))
    if len(cells) < 2:
        return 0.0, 0, 1.0
    expected = np.array([e for e, _ in cells])
    observed = np.array([o for _, o in cells], dtype=float)
    stat = float(((observed - expected) ** 2 / expected).sum())
    dof = len(cells) - 1
    return stat, dof, float(stats.chi2.sf(stat, dof))
