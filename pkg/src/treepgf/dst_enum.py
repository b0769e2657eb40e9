"""Exhaustive enumeration of DST search costs over explicit bit matrices.

Every ``(rows x width)`` binary matrix is visited once; each is turned
into a digital search tree by inserting its rows in order, and the cost of
the probe is recorded.  Two key models are supported:

``infinite``
    keys are truncations of infinite bit strings; they carry identity tags
    so two keys that happen to agree on every stored bit are still
    different keys.  Width ``n`` is enough for every cost to be decided.

``finite``
    keys are ``n``-bit vectors that must be pairwise distinct (the probe
    too, in unsuccessful search); matrices with repeated rows are skipped.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .rational import PGF

__all__ = [
    "BitMatrix",
    "EnumResult",
    "WidthExhausted",
    "InfeasibleEnumeration",
    "MAX_CASES",
    "dst_search_cost",
    "enumerate_search",
    "enumerate_path_length",
    "enumerate_successful_pairs",
    "expected_total",
    "case_count",
    "width_stability_check",
    "brute_force_counts",
    "covariance_of",
]

MODES = ("unsuccessful", "successful", "pathlength")
KEYS = ("infinite", "finite")
MAX_CASES = 1 << 30
_CHUNK = 1 << 22
_MODE_CODES = {
    "unsuccessful": _kernels.UNSUCCESSFUL,
    "successful": _kernels.SUCCESSFUL,
    "pathlength": _kernels.PATH_LENGTH,
    "pairs": _kernels.PAIRS,
}


class WidthExhausted(RuntimeError):
    """Routing needed a bit beyond the stored key width."""


class InfeasibleEnumeration(ValueError):
    pass


@dataclass(frozen=True)
class BitMatrix:
    """Keys in insertion order plus a probe.

    ``rows[i]`` and ``probe`` are bit tuples of a common width, first digit
    first.  ``tags`` identify keys; in infinite mode equality is tag
    equality, in finite mode it is bit-vector equality.
    """

    rows: tuple[tuple[int, ...], ...]
    probe: tuple[int, ...]
    finite: bool = False
    tags: tuple[int, ...] = ()
    probe_tag: int = -1

    def __post_init__(self):
        if not self.tags:
            object.__setattr__(self, "tags", tuple(range(len(self.rows))))
        if len(self.tags) != len(self.rows) or len(set(self.tags)) != len(self.tags):
            raise ValueError("tags must be unique, one per row")
        w = len(self.probe)
        if w < 1 or any(len(r) != w for r in self.rows):
            raise ValueError("all rows and the probe need the same width >= 1")
        if self.finite and len(set(self.rows)) != len(self.rows):
            raise ValueError("finite keys must be distinct")

    @property
    def width(self) -> int:
        return len(self.probe)

    @classmethod
    def from_code(cls, code: int, n: int, width: int, probe: int | None, finite: bool) -> BitMatrix:
        """Decode the integer layout used by the enumeration kernel.

        ``probe`` is a row index for a successful search, or ``None`` for an
        unsuccessful one (the probe is then row ``n`` of the code).
        """
        nrows = n + 1 if probe is None else n
        vals = [(code >> (i * width)) & ((1 << width) - 1) for i in range(nrows)]
        bits = [tuple((v >> p) & 1 for p in range(width)) for v in vals]
        if probe is None:
            return cls(tuple(bits[:n]), bits[n], finite)
        return cls(tuple(bits), bits[probe], finite, probe_tag=probe)

    def complement(self) -> BitMatrix:
        flip = lambda r: tuple(1 - b for b in r)  # noqa: E731
        return BitMatrix(tuple(map(flip, self.rows)), flip(self.probe), self.finite, self.tags, self.probe_tag)


def dst_search_cost(m: BitMatrix) -> int:
    """Comparisons until the probe is found or falls off the tree.

    Follows the list-filtering search directly: compare with the first
    remaining key; on a mismatch drop it and keep only keys agreeing with
    the probe on the next bit.
    """
    remaining = list(range(len(m.rows)))
    p = 0
    k = 0
    while remaining:
        head = remaining[0]
        k += 1
        if m.finite:
            if m.rows[head] == m.probe:
                return k
        elif m.tags[head] == m.probe_tag:
            return k
        remaining = remaining[1:]
        if not remaining:
            break
        if p >= m.width:
            raise WidthExhausted(f"needed bit {p + 1} of {m.width}")
        remaining = [i for i in remaining if m.rows[i][p] == m.probe[p]]
        p += 1
    return k


@dataclass
class EnumResult:
    n: int
    mode: str
    keys: str
    width: int
    counts: dict[int, int] = field(default_factory=dict)
    total: int = 0

    @property
    def pgf(self) -> PGF:
        top = max(self.counts, default=0)
        return PGF(Fraction(self.counts.get(k, 0), self.total) for k in range(top + 1))

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "keys": self.keys,
            "width": self.width,
            "counts": {str(k): str(v) for k, v in sorted(self.counts.items())},
            "total": str(self.total),
            "pgf": self.pgf.to_list(),
        }


def case_count(n: int, mode: str, width: int | None = None) -> int:
    """Number of matrix codes the kernel visits."""
    width = n if width is None else width
    nrows = n + 1 if mode == "unsuccessful" else n
    return 1 << (nrows * width)


def expected_total(n: int, mode: str, keys: str) -> int:
    """Number of equally likely outcomes the counts must add up to."""
    nrows = n + 1 if mode == "unsuccessful" else n
    base = 2 ** (nrows * n) if keys == "infinite" else math.perm(2**n, nrows)
    if mode == "successful":
        return base * n
    if mode == "pairs":
        return base * n * (n - 1)
    return base


def _check(n: int, mode: str, keys: str, width: int) -> None:
    if mode not in MODES and mode != "pairs":
        raise ValueError(f"unknown mode {mode!r}")
    if keys not in KEYS:
        raise ValueError(f"unknown key model {keys!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if keys == "finite" and width != n:
        raise ValueError("finite keys have width n")
    if mode == "unsuccessful" and keys == "finite" and n + 1 > 2**n:
        raise ValueError("no room for a distinct probe")
    cases = case_count(n, mode, width)
    if cases > MAX_CASES:
        raise InfeasibleEnumeration(
            f"n={n}, width={width} needs {cases:,} cases (limit {MAX_CASES:,}); use montecarlo instead"
        )


def _run(n: int, mode: str, keys: str, width: int, jobs: int, symmetry: bool) -> tuple[dict[int, int], int]:
    _check(n, mode, keys, width)
    nrows = n + 1 if mode == "unsuccessful" else n
    codes = 1 << (nrows * width)
    stride = 2 if symmetry else 1
    units = codes // stride
    nbins = (n + 1) * (n + 1) if mode == "pairs" else max(n + 1, n * (n - 1) // 2 + 1)
    code = _MODE_CODES[mode]
    finite = keys == "finite"
    bounds = [(s, min(s + _CHUNK, units)) for s in range(0, units, _CHUNK)]

    def work(b):
        return _kernels.enumerate_chunk(n, width, code, finite, b[0], b[1], stride, nbins)

    hist = np.zeros(nbins, np.int64)
    bad = 0
    if jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    for h, nb in parts:
        hist += h
        bad += nb
    if bad:
        raise WidthExhausted(f"{bad} walks ran out of bits at width {width}")
    counts = {k: int(v) * stride for k, v in enumerate(hist) if v}
    return counts, sum(counts.values())


def enumerate_search(
    n: int, mode: str, keys: str, *, width: int | None = None, jobs: int = 1, symmetry: bool = False
) -> EnumResult:
    """Exact search-cost PGF by counting every matrix.

    With ``symmetry=True`` only matrices whose first key starts with 0 are
    visited and counts are doubled; complementing every bit maps the other
    half onto this one without changing any cost.
    """
    width = n if width is None else width
    if mode not in ("unsuccessful", "successful"):
        raise ValueError("mode must be 'unsuccessful' or 'successful'")
    counts, total = _run(n, mode, keys, width, jobs, symmetry)
    return EnumResult(n, mode, keys, width, counts, total)


def enumerate_path_length(
    n: int, keys: str, *, width: int | None = None, jobs: int = 1, symmetry: bool = False
) -> EnumResult:
    width = n if width is None else width
    counts, total = _run(n, "pathlength", keys, width, jobs, symmetry)
    return EnumResult(n, "pathlength", keys, width, counts, total)


def enumerate_successful_pairs(n: int, keys: str = "infinite") -> dict[tuple[int, int], Fraction]:
    """Joint law of the successful costs of two distinct random keys."""
    if n < 2:
        raise ValueError("need at least two keys")
    counts, total = _run(n, "pairs", keys, n, 1, False)
    return {divmod(cell, n + 1): Fraction(c, total) for cell, c in counts.items()}


def covariance_of(joint: dict[tuple[int, int], Fraction]) -> Fraction:
    ex = sum(p * a for (a, _), p in joint.items())
    ey = sum(p * b for (_, b), p in joint.items())
    exy = sum(p * a * b for (a, b), p in joint.items())
    return exy - ex * ey


def width_stability_check(n: int, mode: str) -> bool:
    """True iff widths ``n`` and ``n + 1`` give the same infinite-key PGF."""
    if n > 4:
        raise ValueError("width n+1 enumeration is limited to n <= 4")
    if mode == "pathlength":
        a = enumerate_path_length(n, "infinite")
        b = enumerate_path_length(n, "infinite", width=n + 1)
    else:
        a = enumerate_search(n, mode, "infinite")
        b = enumerate_search(n, mode, "infinite", width=n + 1)
    return a.pgf == b.pgf


def brute_force_counts(n: int, mode: str, keys: str, width: int | None = None) -> dict[int, int]:
    """Pure-Python enumeration through :func:`dst_search_cost`; tiny ``n`` only."""
    width = n if width is None else width
    nrows = n + 1 if mode == "unsuccessful" else n
    counts: dict[int, int] = {}
    finite = keys == "finite"
    for code in range(1 << (nrows * width)):
        vals = [(code >> (i * width)) & ((1 << width) - 1) for i in range(nrows)]
        if finite and len(set(vals)) != nrows:
            continue
        if mode == "unsuccessful":
            costs: Sequence[int] = [dst_search_cost(BitMatrix.from_code(code, n, width, None, finite))]
        else:
            costs = [dst_search_cost(BitMatrix.from_code(code, n, width, j, finite)) for j in range(n)]
        if mode == "pathlength":
            costs = [sum(c - 1 for c in costs)]
        for c in costs:
            counts[c] = counts.get(c, 0) + 1
    return counts
