import numpy as np
import pytest

from impact_asian import ImpactSpec, MarketSpec, RateConvention

# criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")


@pytest.fixture
def table_market():
    """Reference lattice: S0 = K = 100, u = 1.2, d = 0.8, total return 1.05."""

    def make(n=2, **changes):
        values = dict(s0=100.0, u=1.2, d=0.8, rate=1.05, n=n, strike=100.0,
                      rate_convention=RateConvention.TOTAL_HORIZON)
        values.update(changes)
        return MarketSpec(**values)

    return make


def random_admissible(rng, n_range=(1, 12), lam_max=0.3):
    """Draw (market, impact) in the acceptance box, retrying until admissible."""
    from impact_asian.impact import is_admissible

    while True:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        market = MarketSpec(
            s0=float(rng.uniform(50, 150)),
            u=float(rng.uniform(1.05, 1.5)),
            d=float(rng.uniform(0.6, 0.95)),
            rate=float(rng.uniform(1.0, 1.1)),
            n=n,
            strike=float(rng.uniform(50, 150)),
            rate_convention=RateConvention.TOTAL_HORIZON if rng.random() < 0.5 else RateConvention.PER_STEP,
        )
        impact = ImpactSpec(
            lam=float(rng.uniform(0, lam_max)),
            v_u=float(rng.uniform(0, 2)),
            v_d=float(rng.uniform(0, 2)),
        )
        if is_admissible(market, impact):
            return market, impact


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
