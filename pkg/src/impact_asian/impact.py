"""Binomial lattice with permanent linear price impact.

Hedging trades of size ``v_u`` (after an up move) and ``v_d`` (after a down
move) shift the log price by ``lambda * v``, so the lattice moves by

    u_adj = u * exp(lambda * v_u)
    d_adj = d * exp(-lambda * v_d)

and the discounted stock is a martingale under

    p_adj = (r_step - d_adj) / (u_adj - d_adj).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ArbitrageViolation, DegenerateLattice, ZeroImpact


class RateConvention(enum.Enum):
    PER_STEP = "per-step"
    TOTAL_HORIZON = "total"


@dataclass(frozen=True)
class MarketSpec:
    s0: float
    u: float
    d: float
    rate: float  # gross return, per step or over the whole horizon
    n: int
    strike: float
    rate_convention: RateConvention = RateConvention.TOTAL_HORIZON

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not self.s0 > 0:
            raise ValueError(f"s0 must be positive, got {self.s0}")
        if not 0 < self.d < self.u:
            raise ValueError(f"need 0 < d < u, got u={self.u}, d={self.d}")
        if not self.rate > 0:
            raise ValueError(f"rate must be a positive gross return, got {self.rate}")
        if not self.strike >= 0:
            raise ValueError(f"strike must be non-negative, got {self.strike}")
        if not isinstance(self.rate_convention, RateConvention):
            object.__setattr__(self, "rate_convention", RateConvention(self.rate_convention))

    @property
    def r_step(self) -> float:
        if self.rate_convention is RateConvention.TOTAL_HORIZON:
            return self.rate ** (1.0 / self.n)
        return self.rate


@dataclass(frozen=True)
class ImpactSpec:
    lam: float = 0.0
    v_u: float = 0.0
    v_d: float = 0.0

    def __post_init__(self) -> None:
        if not self.lam >= 0:
            raise ValueError(f"impact coefficient must be >= 0, got {self.lam}")
        if not (math.isfinite(self.v_u) and math.isfinite(self.v_d)):
            raise ValueError("hedging volumes must be finite")


NO_IMPACT = ImpactSpec()


@dataclass(frozen=True)
class AdjustedModel:
    u_adj: float
    d_adj: float
    r_step: float
    p_adj: float
    n: int

    @property
    def discount(self) -> float:
        """Discount factor over the full horizon, ``r_step ** -n``."""
        return self.r_step ** -self.n


@dataclass(frozen=True)
class ReplicationResult:
    delta: float
    bond: float
    node_value: float


@dataclass(frozen=True)
class NoArbRegion:
    v_u_min: float
    v_d_min: float
    admissible: bool


def adjusted_factors(market: MarketSpec, impact: ImpactSpec) -> tuple[float, float]:
    u_adj = market.u * math.exp(impact.lam * impact.v_u)
    d_adj = market.d * math.exp(-impact.lam * impact.v_d)
    return u_adj, d_adj


def _check_admissible(u_adj: float, d_adj: float, r_step: float) -> None:
    # Single source of truth for admissibility; no_arb_region reuses it.
    # Arbitrage is checked first: u_adj <= d_adj breaks d_adj <= r <= u_adj
    # unless all three coincide.
    if r_step < d_adj:
        raise ArbitrageViolation(
            f"r_step={r_step:.10g} < d_adj={d_adj:.10g}: "
            "need d_adj <= r_step <= u_adj (stock dominates the bond)"
        )
    if r_step > u_adj:
        raise ArbitrageViolation(
            f"r_step={r_step:.10g} > u_adj={u_adj:.10g}: "
            "need d_adj <= r_step <= u_adj (bond dominates the stock)"
        )
    if not u_adj > d_adj:
        raise DegenerateLattice(
            f"degenerate lattice: u_adj={u_adj:.10g} <= d_adj={d_adj:.10g}"
        )


def adjust_factors(market: MarketSpec, impact: ImpactSpec) -> AdjustedModel:
    """Build the impact-adjusted lattice, failing on arbitrage instead of clamping."""
    u_adj, d_adj = adjusted_factors(market, impact)
    r_step = market.r_step
    _check_admissible(u_adj, d_adj, r_step)
    p_adj = (r_step - d_adj) / (u_adj - d_adj)
    return AdjustedModel(u_adj=u_adj, d_adj=d_adj, r_step=r_step, p_adj=p_adj, n=market.n)


def is_admissible(market: MarketSpec, impact: ImpactSpec) -> bool:
    u_adj, d_adj = adjusted_factors(market, impact)
    try:
        _check_admissible(u_adj, d_adj, market.r_step)
    except (DegenerateLattice, ArbitrageViolation):
        return False
    return True


def no_arb_region(market: MarketSpec, impact: ImpactSpec) -> NoArbRegion:
    """Minimal admissible hedging volumes for the configured lambda.

    Raises ZeroImpact when lambda is zero; the exception still carries the
    classical ``d <= r_step <= u`` verdict.
    """
    r_step = market.r_step
    if impact.lam == 0:
        ok = market.d <= r_step <= market.u
        raise ZeroImpact(
            "lambda = 0: minimal volumes are undefined; every volume pair is "
            f"admissible iff d <= r_step <= u ({market.d:.10g} <= {r_step:.10g} "
            f"<= {market.u:.10g}: {'yes' if ok else 'no'})",
            admissible=ok,
        )
    v_u_min = math.log(r_step / market.u) / impact.lam
    v_d_min = -math.log(r_step / market.d) / impact.lam
    return NoArbRegion(v_u_min=v_u_min, v_d_min=v_d_min, admissible=is_admissible(market, impact))


def replicate_node(s: float, v_up: float, v_down: float, model: AdjustedModel) -> ReplicationResult:
    """Delta-bond portfolio matching ``v_up`` / ``v_down`` one step ahead of price ``s``."""
    spread = model.u_adj - model.d_adj
    if not spread > 0:
        raise DegenerateLattice(f"u_adj={model.u_adj} <= d_adj={model.d_adj}")
    delta = (v_up - v_down) / (s * spread)
    bond = (v_down - delta * s * model.d_adj) / model.r_step
    return ReplicationResult(delta=delta, bond=bond, node_value=delta * s + bond)


def martingale_check(model: AdjustedModel) -> float:
    """Residual of ``E[S_{m+1} / S_m] = r_step`` under p_adj."""
    p = model.p_adj
    return p * model.u_adj + (1.0 - p) * model.d_adj - model.r_step
