"""Geometric and arithmetic Asian calls on the impact-adjusted lattice.

The geometric price is exact, either by summing all ``2**n`` paths or by
grouping paths on (ups, area). The arithmetic price is bracketed:

    V_G <= V_A <= V_G + disc * sum_w P(w) (rho(w) - 1) G(w)     (pathwise)
                 <= V_G + disc * (rho* - 1) E[G]                 (global)

where ``rho(w) = exp((S_max - S_min)**2 / (4 S_min S_max))`` is the reverse
AM-GM factor of a path and ``rho*`` the same factor over the whole lattice.
Small lattices also get the exact arithmetic price by enumeration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .impact import AdjustedModel, ImpactSpec, MarketSpec, adjust_factors
from .paths import (
    DEFAULT_CAP,
    EXACT_COUNT_MAX_N,
    PathStats,
    area_count_table,
    area_weights,
    check_cap,
    iter_path_blocks,
)


class Method(enum.Enum):
    ENUM = "enum"
    RECOMBINED = "recombined"
    AUTO = "auto"


@dataclass(frozen=True)
class GeometricPriceResult:
    value: float
    method: Method
    n: int
    model: AdjustedModel


@dataclass(frozen=True)
class ArithmeticBounds:
    lower: float
    upper_pathwise: float | None  # None when n is above the enumeration cap
    upper_global: float
    rho_star: float
    expected_geo: float  # undiscounted E[G_n] under p_adj
    exact_enum: float | None = None


@dataclass(frozen=True)
class _EnumSums:
    # undiscounted expectations over all paths
    geo_payoff: float
    arith_payoff: float
    gap: float  # sum P (rho - 1) G


def _safe_exp(x):
    with np.errstate(over="ignore"):
        return np.exp(x)


def _enumerate(market: MarketSpec, model: AdjustedModel, cap: int) -> _EnumSums:
    n, p, k_strike = model.n, model.p_adj, market.strike
    ks = np.arange(n + 1)
    prob_by_ups = p**ks * (1.0 - p) ** (n - ks)
    geo_payoff = arith_payoff = gap = 0.0
    for block in iter_path_blocks(market, model, cap):
        prob = prob_by_ups[block.n_up]
        g = np.exp(block.log_sum / (n + 1))
        a = block.price_sum / (n + 1)
        spread = block.s_max - block.s_min
        rho = _safe_exp(0.25 * spread * spread / (block.s_min * block.s_max))
        # blocks are combined in ascending index order so sums are reproducible
        geo_payoff += float(np.sum(prob * np.maximum(g - k_strike, 0.0)))
        arith_payoff += float(np.sum(prob * np.maximum(a - k_strike, 0.0)))
        # zero-probability paths may carry rho = inf
        with np.errstate(invalid="ignore"):
            gap += float(np.sum(np.where(prob > 0, prob * (rho - 1.0) * g, 0.0)))
    return _EnumSums(geo_payoff, arith_payoff, gap)


def _grouped_geo(market: MarketSpec, model: AdjustedModel) -> tuple[np.ndarray, np.ndarray]:
    """Probability and geometric mean for every reachable area value."""
    n, p = model.n, model.p_adj
    max_area = n * (n + 1) // 2
    areas = np.arange(max_area + 1)
    log_g = math.log(market.s0) + (
        areas * math.log(model.u_adj) + (max_area - areas) * math.log(model.d_adj)
    ) / (n + 1)
    g = np.exp(log_g)
    if n <= EXACT_COUNT_MAX_N:
        table = area_count_table(n)
        ks = np.arange(n + 1)
        prob_by_ups = p**ks * (1.0 - p) ** (n - ks)
        # (k, A) grid; summed over k in ascending order for each A
        weights = (table.counts.astype(np.float64) * prob_by_ups[:, None]).sum(axis=0)
    else:
        weights = area_weights(n, p)
    return weights, g


def resolve_method(method: Method, n: int, cap: int) -> Method:
    method = Method(method)
    if method is Method.AUTO:
        return Method.RECOMBINED if n > cap else Method.ENUM
    return method


def price_geometric_enum(
    market: MarketSpec, impact: ImpactSpec, cap: int = DEFAULT_CAP
) -> GeometricPriceResult:
    model = adjust_factors(market, impact)
    sums = _enumerate(market, model, cap)
    return GeometricPriceResult(model.discount * sums.geo_payoff, Method.ENUM, market.n, model)


def price_geometric_recombined(market: MarketSpec, impact: ImpactSpec) -> GeometricPriceResult:
    model = adjust_factors(market, impact)
    weights, g = _grouped_geo(market, model)
    value = model.discount * float(np.sum(weights * np.maximum(g - market.strike, 0.0)))
    return GeometricPriceResult(value, Method.RECOMBINED, market.n, model)


def price_geometric(
    market: MarketSpec,
    impact: ImpactSpec,
    method: Method = Method.AUTO,
    cap: int = DEFAULT_CAP,
) -> GeometricPriceResult:
    if resolve_method(method, market.n, cap) is Method.ENUM:
        return price_geometric_enum(market, impact, cap)
    return price_geometric_recombined(market, impact)


def price_arithmetic_exact_enum(
    market: MarketSpec, impact: ImpactSpec, cap: int = DEFAULT_CAP
) -> float:
    model = adjust_factors(market, impact)
    return model.discount * _enumerate(market, model, cap).arith_payoff


def rho_path(stats: PathStats) -> float:
    """Reverse AM-GM factor: ``arith_mean <= geo_mean * rho`` along the path."""
    lo, hi = stats.s_min, stats.s_max
    if not lo > 0:
        raise ValueError("path minimum must be positive")
    x = 0.25 * (hi - lo) ** 2 / (lo * hi)
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def rho_star(model: AdjustedModel) -> float:
    """Lattice-wide reverse AM-GM factor.

    Extremes are ``S0 * max(1, u_adj)**n`` and ``S0 * min(1, d_adj)**n``;
    with ``d_adj < 1 < u_adj`` this is the usual ``u_adj**n`` / ``d_adj**n``.
    """
    n = model.n
    log_ratio = n * (math.log(max(1.0, model.u_adj)) - math.log(min(1.0, model.d_adj)))
    # (hi - lo)**2 / (hi lo) = x + 1/x - 2 with x = hi / lo
    try:
        x = math.exp(log_ratio)
        return math.exp(0.25 * (x + 1.0 / x - 2.0))
    except OverflowError:
        return math.inf


def bound_upper_pathwise(market: MarketSpec, impact: ImpactSpec, cap: int = DEFAULT_CAP) -> float:
    model = adjust_factors(market, impact)
    sums = _enumerate(market, model, cap)
    return model.discount * sums.geo_payoff + model.discount * sums.gap


def _expected_geo(market: MarketSpec, model: AdjustedModel) -> float:
    weights, g = _grouped_geo(market, model)
    return float(np.sum(weights * g))


def bound_upper_global(market: MarketSpec, impact: ImpactSpec) -> tuple[float, float]:
    """Returns ``(upper bound, rho*)``; no enumeration needed."""
    model = adjust_factors(market, impact)
    v_g = price_geometric_recombined(market, impact).value
    rs = rho_star(model)
    return v_g + (rs - 1.0) * model.discount * _expected_geo(market, model), rs


def two_sided_bounds(
    market: MarketSpec,
    impact: ImpactSpec,
    method: Method = Method.AUTO,
    cap: int = DEFAULT_CAP,
) -> ArithmeticBounds:
    """Geometric lower bound, both upper bounds and (for small n) the exact price.

    The geometric price, pathwise bound and exact arithmetic price share a
    single pass over the paths when ``n <= cap``.
    """
    model = adjust_factors(market, impact)
    method = resolve_method(method, market.n, cap)
    if method is Method.ENUM:
        check_cap(market.n, cap)
    disc = model.discount

    sums = _enumerate(market, model, cap) if market.n <= cap else None
    if method is Method.ENUM:
        lower = disc * sums.geo_payoff
    else:
        lower = price_geometric_recombined(market, impact).value

    expected_geo = _expected_geo(market, model)
    rs = rho_star(model)
    return ArithmeticBounds(
        lower=lower,
        upper_pathwise=None if sums is None else lower + disc * sums.gap,
        upper_global=lower + (rs - 1.0) * disc * expected_geo,
        rho_star=rs,
        expected_geo=expected_geo,
        exact_enum=None if sums is None else disc * sums.arith_payoff,
    )
