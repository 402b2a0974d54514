"""Frictionless closed-form benchmark for the geometric Asian call.

Under lognormal dynamics the geometric average is itself lognormal, so the
call has a Black-Scholes form. The horizon is normalised to one period of
length 1 with continuously compounded rate ``rate_cont``; the lattice is
mapped onto it with total volatility ``sigma_step * sqrt(n)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import NonPositiveInputs
from .impact import NO_IMPACT, MarketSpec, RateConvention
from .pricing import price_geometric_recombined


class Averaging(enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class KvInputs:
    s0: float
    strike: float
    rate_cont: float
    sigma_step: float
    n: int
    averaging: Averaging = Averaging.CONTINUOUS

    @property
    def sigma_total(self) -> float:
        return self.sigma_step * math.sqrt(self.n)


@dataclass(frozen=True)
class KvRow:
    n: int
    lattice: float
    kv: float
    abs_diff: float
    pct_error: float


def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def kv_geometric_price(inputs: KvInputs) -> float:
    if not inputs.s0 > 0 or inputs.sigma_step < 0 or inputs.strike < 0 or inputs.n < 1:
        raise NonPositiveInputs(
            f"need s0 > 0, strike >= 0, sigma_step >= 0, n >= 1; got {inputs}"
        )
    big_r = inputs.rate_cont
    sig2 = inputs.sigma_total**2
    mean = math.log(inputs.s0) + 0.5 * (big_r - 0.5 * sig2)
    if inputs.averaging is Averaging.CONTINUOUS:
        var = sig2 / 3.0
    else:
        n = inputs.n
        var = sig2 * (2 * n + 1) / (6.0 * (n + 1))
    forward = math.exp(mean + 0.5 * var)  # E[G]
    disc = math.exp(-big_r)
    if var == 0.0:
        return disc * max(forward - inputs.strike, 0.0)
    if inputs.strike == 0.0:
        return disc * forward
    sd = math.sqrt(var)
    d1 = (mean - math.log(inputs.strike) + var) / sd
    d2 = d1 - sd
    return max(disc * (forward * std_normal_cdf(d1) - inputs.strike * std_normal_cdf(d2)), 0.0)


def default_kv_inputs(market: MarketSpec, averaging: Averaging = Averaging.CONTINUOUS) -> KvInputs:
    """Calibrate the benchmark to a lattice: ``rate_cont = ln(total gross return)``,
    ``sigma_step = ln(u)``."""
    if market.rate_convention is RateConvention.TOTAL_HORIZON:
        rate_cont = math.log(market.rate)
    else:
        rate_cont = market.n * math.log(market.rate)
    return KvInputs(
        s0=market.s0,
        strike=market.strike,
        rate_cont=rate_cont,
        sigma_step=math.log(market.u),
        n=market.n,
        averaging=averaging,
    )


def kv_comparison_table(
    market: MarketSpec,
    ns: list[int],
    averaging: Averaging = Averaging.CONTINUOUS,
    sigma_step: float | None = None,
) -> list[KvRow]:
    """Frictionless lattice price against the closed form, one row per ``n``."""
    rows = []
    for n in ns:
        m = MarketSpec(
            s0=market.s0, u=market.u, d=market.d, rate=market.rate, n=n,
            strike=market.strike, rate_convention=market.rate_convention,
        )
        lattice = price_geometric_recombined(m, NO_IMPACT).value
        inputs = default_kv_inputs(m, averaging)
        if sigma_step is not None:
            inputs = KvInputs(inputs.s0, inputs.strike, inputs.rate_cont, sigma_step, n, averaging)
        kv = kv_geometric_price(inputs)
        diff = abs(lattice - kv)
        rows.append(KvRow(n, lattice, kv, diff, diff / kv * 100.0 if kv > 0 else math.inf))
    return rows
