"""Binomial path enumeration and the (ups, area) recombination table.

A path of ``n`` moves is the integer ``index`` in ``[0, 2**n)``: bit ``k`` set
means move ``k + 1`` is up. Along a path ``S_i = S0 * u_adj**a_i * d_adj**b_i``
with ``a_i``/``b_i`` the cumulative up/down counts. The area statistic
``A = sum(a_i)`` fixes the geometric mean, and an up move at step ``j`` adds
``n + 1 - j`` to it, so ``A`` is a k-subset sum of ``{1, ..., n}``. That is
what lets the geometric price collapse from ``2**n`` paths to an
``(n + 1) x (n(n+1)/2 + 1)`` table.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, CountOverflow
from .impact import AdjustedModel, MarketSpec

DEFAULT_CAP = 24
EXACT_COUNT_MAX_N = 60
BLOCK_BITS = 16


@dataclass(frozen=True)
class PathWord:
    index: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 0 or not 0 <= self.index < (1 << self.n):
            raise ValueError(f"index {self.index} out of range for n={self.n}")

    @classmethod
    def from_moves(cls, moves: str) -> PathWord:
        moves = moves.upper()
        if set(moves) - {"U", "D"}:
            raise ValueError(f"moves must be a string over U/D, got {moves!r}")
        index = sum(1 << k for k, m in enumerate(moves) if m == "U")
        return cls(index, len(moves))

    @property
    def moves(self) -> str:
        return "".join("U" if self.is_up(k) else "D" for k in range(self.n))

    def is_up(self, k: int) -> bool:
        return bool((self.index >> k) & 1)

    @property
    def n_up(self) -> int:
        return self.index.bit_count()

    def __str__(self) -> str:
        return self.moves


@dataclass(frozen=True)
class PathStats:
    n_up: int
    n_down: int
    area_up: int
    area_down: int
    s_min: float
    s_max: float
    geo_mean: float
    arith_mean: float


def path_prices(market: MarketSpec, model: AdjustedModel, path: PathWord) -> list[float]:
    prices = [market.s0]
    s = market.s0
    for k in range(path.n):
        s *= model.u_adj if path.is_up(k) else model.d_adj
        prices.append(s)
    return prices


def path_stats(market: MarketSpec, model: AdjustedModel, path: PathWord) -> PathStats:
    n = path.n
    prices = path_prices(market, model, path)
    ln_u, ln_d = math.log(model.u_adj), math.log(model.d_adj)
    ups = area = 0
    log_s = log_sum = math.log(market.s0)
    for k in range(n):
        if path.is_up(k):
            ups += 1
            log_s += ln_u
        else:
            log_s += ln_d
        area += ups
        log_sum += log_s
    return PathStats(
        n_up=ups,
        n_down=n - ups,
        area_up=area,
        area_down=n * (n + 1) // 2 - area,
        s_min=min(prices),
        s_max=max(prices),
        geo_mean=math.exp(log_sum / (n + 1)),
        arith_mean=sum(prices) / (n + 1),
    )


def path_probability(model: AdjustedModel, path: PathWord) -> float:
    k = path.n_up
    return model.p_adj**k * (1.0 - model.p_adj) ** (path.n - k)


def check_cap(n: int, cap: int = DEFAULT_CAP) -> None:
    if n > cap:
        raise CapExceeded(
            f"n={n} needs 2**{n} paths, above the enumeration cap {cap}; "
            "use the recombined method or raise the cap"
        )


def enumerate_paths(n: int, cap: int = DEFAULT_CAP) -> Iterator[PathWord]:
    """All ``2**n`` paths in ascending index order."""
    check_cap(n, cap)
    return (PathWord(i, n) for i in range(1 << n))


@dataclass(frozen=True)
class AreaCountTable:
    """Multiplicities ``counts[k, A]`` of paths with ``k`` ups and area ``A``."""

    n: int
    counts: np.ndarray  # int64, shape (n + 1, n(n+1)/2 + 1)

    def __getitem__(self, key: tuple[int, int]) -> int:
        k, a = key
        if not (0 <= k <= self.n and 0 <= a < self.counts.shape[1]):
            return 0
        return int(self.counts[k, a])

    def row(self, k: int) -> dict[int, int]:
        return {int(a): int(c) for a, c in enumerate(self.counts[k]) if c}

    def items(self) -> Iterator[tuple[tuple[int, int], int]]:
        """Nonzero entries in ascending (k, A) order."""
        for k, a in zip(*np.nonzero(self.counts)):
            yield (int(k), int(a)), int(self.counts[k, a])


def area_count_table(n: int) -> AreaCountTable:
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > EXACT_COUNT_MAX_N:
        raise CountOverflow(
            f"exact counts are only guaranteed for n <= {EXACT_COUNT_MAX_N}, got {n}"
        )
    max_area = n * (n + 1) // 2
    counts = np.zeros((n + 1, max_area + 1), dtype=np.int64)
    counts[0, 0] = 1
    for m in range(1, n + 1):
        # include element m: one more up, area grows by m
        counts[1:, m:] += counts[:-1, : max_area + 1 - m].copy()
    return AreaCountTable(n, counts)


def area_weights(n: int, p: float) -> np.ndarray:
    """Total probability of each area value, built in floating point.

    Used when ``n`` is past the exact-count range; ``weights[A]`` equals
    ``sum_k counts[k, A] * p**k * (1 - p)**(n - k)``.
    """
    max_area = n * (n + 1) // 2
    w = np.zeros(max_area + 1)
    w[0] = 1.0
    top = 0
    for m in range(1, n + 1):
        new = (1.0 - p) * w
        new[m : top + m + 1] += p * w[: top + 1]
        w = new
        top += m
    return w


@dataclass(frozen=True)
class PathBlock:
    """Per-path aggregates for a contiguous run of path indices."""

    start: int
    n_up: np.ndarray
    log_sum: np.ndarray  # sum of ln S_i over i = 0..n
    price_sum: np.ndarray
    s_min: np.ndarray
    s_max: np.ndarray


def iter_path_blocks(
    market: MarketSpec,
    model: AdjustedModel,
    cap: int = DEFAULT_CAP,
    block_bits: int = BLOCK_BITS,
) -> Iterator[PathBlock]:
    """Vectorised version of :func:`path_stats`, in ascending index order.

    Mirrors the scalar recurrences step by step so the two agree to rounding.
    """
    n = model.n
    check_cap(n, cap)
    total = 1 << n
    size = min(total, 1 << block_bits)
    ln_u, ln_d = math.log(model.u_adj), math.log(model.d_adj)
    ln_s0 = math.log(market.s0)
    for start in range(0, total, size):
        idx = np.arange(start, start + size, dtype=np.int64)
        s = np.full(size, float(market.s0))
        log_s = np.full(size, ln_s0)
        log_sum = log_s.copy()
        price_sum = s.copy()
        s_min = s.copy()
        s_max = s.copy()
        n_up = np.zeros(size, dtype=np.int64)
        for k in range(n):
            up = ((idx >> k) & 1).astype(bool)
            n_up += up
            s = s * np.where(up, model.u_adj, model.d_adj)
            log_s = log_s + np.where(up, ln_u, ln_d)
            log_sum += log_s
            price_sum += s
            np.minimum(s_min, s, out=s_min)
            np.maximum(s_max, s, out=s_max)
        yield PathBlock(start, n_up, log_sum, price_sum, s_min, s_max)
