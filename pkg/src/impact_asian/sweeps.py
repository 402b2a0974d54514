"""Single-point evaluation and parameter sweeps written as CSV."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .errors import ArbitrageViolation, CapExceeded, ConfigError, DegenerateLattice
from .impact import AdjustedModel, ImpactSpec, MarketSpec, adjust_factors
from .pricing import Method, resolve_method, two_sided_bounds

VALUE_COLUMNS = (
    "u_adj", "d_adj", "p_adj", "geom_price", "arith_lb",
    "arith_ub_pathwise", "arith_ub_global", "arith_exact", "error_marker",
)
AXIS_COLUMNS = {
    "lambda": ("lambda",),
    "vu": ("v_u",),
    "vd": ("v_d",),
    "moneyness": ("regime", "lambda", "moneyness"),
    "maturity": ("n",),
}


@dataclass(frozen=True)
class PointResult:
    model: AdjustedModel
    geom_price: float
    geom_method: Method
    arith_lb: float
    arith_ub_pathwise: float | None
    arith_ub_global: float
    rho_star: float
    arith_exact: float | None


@dataclass(frozen=True)
class SweepRow:
    axis: tuple  # values matching AXIS_COLUMNS[axis]
    result: PointResult | None
    error_marker: str = ""


def evaluate_point(market: MarketSpec, impact: ImpactSpec, method: Method, cap: int) -> PointResult:
    """Everything the ``price`` command reports for one parameter set.

    The geometric price doubles as the arithmetic lower bound, so both come
    from the same computation.
    """
    model = adjust_factors(market, impact)
    resolved = resolve_method(method, market.n, cap)
    bounds = two_sided_bounds(market, impact, resolved, cap)
    return PointResult(
        model=model,
        geom_price=bounds.lower,
        geom_method=resolved,
        arith_lb=bounds.lower,
        arith_ub_pathwise=bounds.upper_pathwise,
        arith_ub_global=bounds.upper_global,
        rho_star=bounds.rho_star,
        arith_exact=bounds.exact_enum,
    )


def fmt(x: float | None) -> str:
    if x is None:
        return ""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.10g}"


def _axis_values(config: RunConfig) -> list[float]:
    lo, hi, count = config.sweep_from, config.sweep_to, config.points
    if lo is None or hi is None or count is None:
        raise ConfigError("sweep needs --from, --to and --points")
    if count < 2 or not lo < hi:
        raise ConfigError("sweep needs points >= 2 and from < to")
    values = [round(float(v), 12) for v in np.linspace(lo, hi, count)]
    if config.axis == "maturity":
        ints = [int(round(v)) for v in values]
        if len(set(ints)) != len(ints) or ints[0] < 1:
            raise ConfigError("maturity sweep needs distinct integer steps >= 1")
        return ints
    return values


def _points(config: RunConfig) -> list[tuple[tuple, MarketSpec, ImpactSpec]]:
    """(axis values, market, impact) per row, in output order."""
    axis = config.axis
    if axis is None:
        raise ConfigError("sweep needs --axis")
    values = _axis_values(config)
    base_market = config.market()
    out = []
    if axis == "moneyness":
        regimes = config.regime or (None,)
        lambdas = config.lambdas or (config.lam,)
        for regime in regimes:
            v_u, v_d = config.volumes(regime) if regime else (config.v_u, config.v_d)
            for lam in lambdas:
                impact = ImpactSpec(lam=lam, v_u=v_u, v_d=v_d)
                for m in values:
                    market = config.market(strike=m * config.s0)
                    out.append(((regime or "custom", lam, m), market, impact))
        return out
    for v in values:
        if axis == "lambda":
            out.append(((v,), base_market, config.impact(lam=v)))
        elif axis == "vu":
            out.append(((v,), base_market, config.impact(v_u=v)))
        elif axis == "vd":
            out.append(((v,), base_market, config.impact(v_d=v)))
        else:
            out.append(((v,), config.market(n=v), config.impact()))
    return out


def _run_point(config: RunConfig, point) -> SweepRow:
    axis_vals, market, impact = point
    try:
        result = evaluate_point(market, impact, config.method, config.enumeration_cap)
    except ArbitrageViolation:
        return SweepRow(axis_vals, None, "arbitrage")
    except DegenerateLattice:
        return SweepRow(axis_vals, None, "degenerate")
    except CapExceeded:
        return SweepRow(axis_vals, None, "cap_exceeded")
    return SweepRow(axis_vals, result)


def run_sweep(config: RunConfig) -> list[SweepRow]:
    points = _points(config)
    if config.workers > 1:
        # map() yields in submission order whatever the completion order
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(lambda p: _run_point(config, p), points))
    return [_run_point(config, p) for p in points]


def row_cells(row: SweepRow) -> list[str]:
    cells = [v if isinstance(v, str) else fmt(v) for v in row.axis]
    r = row.result
    if r is None:
        return cells + [""] * (len(VALUE_COLUMNS) - 1) + [row.error_marker]
    return cells + [
        fmt(r.model.u_adj), fmt(r.model.d_adj), fmt(r.model.p_adj), fmt(r.geom_price),
        fmt(r.arith_lb), fmt(r.arith_ub_pathwise), fmt(r.arith_ub_global),
        fmt(r.arith_exact), row.error_marker,
    ]


def sweep_csv(config: RunConfig, rows: list[SweepRow] | None = None) -> str:
    if rows is None:
        rows = run_sweep(config)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AXIS_COLUMNS[config.axis] + VALUE_COLUMNS)
    for row in rows:
        writer.writerow(row_cells(row))
    return buf.getvalue()

