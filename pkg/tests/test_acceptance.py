"""Acceptance gate. Each test records one pass/fail line, printed after the run."""

import math
import time

import mpmath
import numpy as np
import pytest

import conftest
from conftest import random_admissible
from impact_asian import (
    Averaging,
    ImpactSpec,
    KvInputs,
    adjust_factors,
    area_count_table,
    kv_comparison_table,
    kv_geometric_price,
    enumerate_paths,
    martingale_check,
    path_stats,
    price_arithmetic_exact_enum,
    price_geometric,
    price_geometric_enum,
    price_geometric_recombined,
    std_normal_cdf,
    two_sided_bounds,
)
from impact_asian.config import parse_config
from impact_asian.impact import is_admissible
from impact_asian.paths import iter_path_blocks
from impact_asian.sweeps import sweep_csv
from oracles import classical_crr_asian

NS = list(range(2, 21, 2))
REF_GEOMETRIC = dict(zip(NS, [7.14, 9.15, 10.74, 12.03, 13.13, 14.08, 14.92, 15.67, 16.34, 16.96]))
REF_UPPER = dict(zip(NS, [9.71, 16.09, 22.93, 30.43, 38.90, 48.85, 61.26, 78.95, 138.15, 12961.48]))
LAMBDAS = [0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35]
REF_SENSITIVITY = {
    (1.3, 1.0): [10.74, 12.92, 14.94, 16.67, 18.11, 19.30, 20.24, 21.01],
    (1.0, 1.3): [10.74, 12.94, 14.91, 16.65, 18.14, 19.40, 20.44, 21.25],
}


def record(key, failures, detail):
    ok = not failures
    conftest.ACCEPTANCE_RESULTS[key] = (ok, detail if ok else f"{detail}; " + "; ".join(failures[:5]))
    assert ok, failures


def test_01_geometric_table(table_market):
    failures = []
    start = time.perf_counter()
    prices = {n: price_geometric(table_market(n), ImpactSpec()).value for n in NS}
    elapsed = time.perf_counter() - start
    for n, value in prices.items():
        tol = 0.005 if n <= 4 else 0.01
        if abs(value - REF_GEOMETRIC[n]) > tol:
            failures.append(f"n={n}: {value:.6f} vs {REF_GEOMETRIC[n]} (tol {tol})")
    if elapsed >= 1.0:
        failures.append(f"runtime {elapsed:.2f}s >= 1s")
    worst = max(abs(prices[n] - REF_GEOMETRIC[n]) for n in NS)
    record("1 geometric table", failures, f"10 rows, max |diff| {worst:.4f}, {elapsed * 1e3:.0f} ms")


def test_02_pathwise_upper_bound(table_market):
    failures = []
    start = time.perf_counter()
    ubs = {n: two_sided_bounds(table_market(n), ImpactSpec()).upper_pathwise for n in NS}
    elapsed = time.perf_counter() - start
    if abs(ubs[2] - REF_UPPER[2]) > 0.005:
        failures.append(f"n=2: {ubs[2]:.6f} vs 9.71")
    for n in NS[1:]:
        if abs(ubs[n] / REF_UPPER[n] - 1) > 0.01:
            failures.append(f"n={n}: {ubs[n]:.4f} vs {REF_UPPER[n]} (1%)")
    if elapsed >= 10.0:
        failures.append(f"runtime {elapsed:.2f}s >= 10s")
    worst = max(abs(ubs[n] / REF_UPPER[n] - 1) for n in NS)
    record("2 pathwise upper bound", failures,
           f"n=20 -> {ubs[20]:.2f}, max rel diff {worst:.2e}, {elapsed:.2f} s")


def test_03_impact_sensitivity(table_market):
    failures = []
    worst = 0.0
    for vols, expected in REF_SENSITIVITY.items():
        geoms = []
        for lam, target in zip(LAMBDAS, expected):
            impact = ImpactSpec(lam, *vols)
            geom = price_geometric(table_market(6), impact).value
            lower = two_sided_bounds(table_market(6), impact).lower
            geoms.append(geom)
            worst = max(worst, abs(geom - target))
            if abs(geom - target) > 0.02:
                failures.append(f"{vols} lambda={lam}: {geom:.4f} vs {target}")
            if lower != geom:
                failures.append(f"{vols} lambda={lam}: lower bound {lower!r} != geometric {geom!r}")
        if not all(b > a for a, b in zip(geoms, geoms[1:])):
            failures.append(f"{vols}: not increasing in lambda")
    record("3 impact sensitivity", failures, f"16 cells, max |diff| {worst:.4f}, LB == Geom, increasing")


def test_04_bound_chain():
    rng = np.random.default_rng(4)
    failures = []
    start = time.perf_counter()
    for i in range(200):
        market, impact = random_admissible(rng)
        b = two_sided_bounds(market, impact)
        chain = (b.lower, b.exact_enum, b.upper_pathwise, b.upper_global)
        if not all(x <= y for x, y in zip(chain, chain[1:])):
            failures.append(f"draw {i}: {chain}")
    elapsed = time.perf_counter() - start
    if elapsed >= 30.0:
        failures.append(f"runtime {elapsed:.1f}s >= 30s")
    record("4 bound chain", failures, f"200 admissible draws, {len(failures)} failures, {elapsed:.2f} s")


def test_05_oracle_equivalence():
    rng = np.random.default_rng(5)
    failures = []
    worst = 0.0
    for i in range(100):
        market, impact = random_admissible(rng, n_range=(1, 14))
        a = price_geometric_enum(market, impact).value
        b = price_geometric_recombined(market, impact).value
        rel = abs(a - b) / max(abs(a), abs(b)) if max(abs(a), abs(b)) > 0 else 0.0
        worst = max(worst, rel)
        if rel > 1e-12:
            failures.append(f"draw {i}: enum {a!r} recombined {b!r}")
    for n in range(31):
        counts = area_count_table(n).counts
        for k in range(n + 1):
            if int(counts[k].sum()) != math.comb(n, k):
                failures.append(f"row sum n={n} k={k}")
    record("5 oracle equivalence", failures, f"100 draws, max rel diff {worst:.1e}; count rows exact for n <= 30")


def test_06_martingale_and_classical_limit():
    rng = np.random.default_rng(6)
    failures = []
    worst = 0.0
    for i in range(1000):
        market, impact = random_admissible(rng)
        resid = abs(martingale_check(adjust_factors(market, impact)))
        worst = max(worst, resid)
        if resid > 1e-12:
            failures.append(f"draw {i}: residual {resid:.2e}")
    worst_rel = 0.0
    for i in range(60):
        market, _ = random_admissible(rng, n_range=(1, 12))
        while not is_admissible(market, ImpactSpec()):
            market, _ = random_admissible(rng, n_range=(1, 12))
        geo, arith = classical_crr_asian(market.s0, market.u, market.d, market.r_step, market.n, market.strike)
        ours = (
            price_geometric_enum(market, ImpactSpec()).value,
            price_geometric_recombined(market, ImpactSpec()).value,
            price_arithmetic_exact_enum(market, ImpactSpec()),
        )
        for got, want in zip(ours, (geo, geo, arith)):
            rel = abs(got - want) / abs(want) if want else abs(got)
            worst_rel = max(worst_rel, rel)
            if rel > 1e-12:
                failures.append(f"classical draw {i}: {got!r} vs {want!r}")
    record("6 martingale and lambda=0 limit", failures,
           f"max residual {worst:.1e} over 1000 draws; max rel diff vs classical tree {worst_rel:.1e}")


def test_07_identities(table_market):
    failures = []
    impact = ImpactSpec(0.1, 1.3, 1.0)
    for n in range(1, 13):
        market = table_market(n)
        model = adjust_factors(market, impact)
        log_u, log_d = math.log(model.u_adj), math.log(model.d_adj)
        for w in enumerate_paths(n):
            s = path_stats(market, model, w)
            if s.area_up + s.area_down != n * (n + 1) // 2:
                failures.append(f"n={n} path {w.moves}: A + B = {s.area_up + s.area_down}")
            g = market.s0 * math.exp((s.area_up * log_u + s.area_down * log_d) / (n + 1))
            if abs(g / s.geo_mean - 1) > 1e-13:
                failures.append(f"n={n} path {w.moves}: G from areas")
    worst = 0.0
    for n in range(1, 21):
        market = table_market(n)
        model = adjust_factors(market, impact)
        p = model.p_adj
        total = math.fsum(
            float(np.sum(p**b.n_up * (1 - p) ** (n - b.n_up))) for b in iter_path_blocks(market, model)
        )
        worst = max(worst, abs(total - 1))
        if abs(total - 1) > 1e-10:
            failures.append(f"n={n}: sum P = {total!r}")
    record("7 identities", failures, f"A + B exhaustive for n <= 12; max |sum P - 1| {worst:.1e} for n <= 20")


def test_08_closed_form_benchmark(table_market):
    failures = []
    xs = np.linspace(-10, 10, 2001)
    phi_err = max(abs(std_normal_cdf(x) - float(mpmath.ncdf(x))) for x in xs)
    if phi_err > 1e-10:
        failures.append(f"Phi error {phi_err:.1e}")
    if std_normal_cdf(0.0) != 0.5:
        failures.append("Phi(0) != 0.5")

    for averaging in Averaging:
        # sigma -> 0 limit
        limit = math.exp(-0.05) * max(100 * math.exp(0.025) - 95, 0)
        if abs(kv_geometric_price(KvInputs(100, 95, 0.05, 0.0, 4, averaging)) - limit) > 1e-12:
            failures.append(f"{averaging.value}: zero-volatility limit")
        # spot and strike monotonicity over a broad grid
        grid = np.linspace(50, 150, 41)
        for sigma in (0.05, 0.2, 0.4):
            by_s0 = [kv_geometric_price(KvInputs(s, 100, 0.05, sigma, 4, averaging)) for s in grid]
            by_k = [kv_geometric_price(KvInputs(100, k, 0.05, sigma, 4, averaging)) for k in grid]
            if np.any(np.diff(by_s0) < 0) or np.any(np.diff(by_k) > 0):
                failures.append(f"{averaging.value}: spot/strike monotonicity at sigma {sigma}")
        # volatility monotonicity at the default calibration, over the sigma_tot
        # range the comparison rows use (0.26 to 0.82), widened on both sides
        sig = np.linspace(0.1, 1.2, 500)
        by_sig = [kv_geometric_price(KvInputs(100, 100, math.log(1.05), s, 1, averaging)) for s in sig]
        if np.any(np.diff(by_sig) < 0):
            failures.append(f"{averaging.value}: volatility monotonicity")

    rows = kv_comparison_table(table_market(), list(range(4, 21)))
    worst = max(r.pct_error for r in rows)
    if worst >= 25:
        failures.append(f"max lattice-vs-closed-form error {worst:.2f}%")
    record("8 closed-form benchmark", failures,
           f"Phi error {phi_err:.1e}; limits and monotonicities hold; max error {worst:.2f}% for n in 4..20")


SWEEPS = [
    {"axis": "lambda", "sweep_from": "0", "sweep_to": "0.35", "points": "8", "n": "6", "regime": "down-biased"},
    {"axis": "vu", "sweep_from": "-2", "sweep_to": "2", "points": "9", "n": "8", "lambda": "0.2"},
    {"axis": "vd", "sweep_from": "-3", "sweep_to": "2", "points": "11", "n": "1", "lambda": "0.1",
     "rate_convention": "per-step"},
    {"axis": "moneyness", "sweep_from": "0.8", "sweep_to": "1.2", "points": "5", "n": "10",
     "regime": "all", "lambdas": "0,0.1,0.2"},
    {"axis": "maturity", "sweep_from": "2", "sweep_to": "22", "points": "11", "n": "2", "lambda": "0.05",
     "v_u": "1.3", "v_d": "1.0", "enumeration_cap": "18"},
]


@pytest.mark.parametrize("sweep", SWEEPS, ids=[s["axis"] for s in SWEEPS])
def test_09_deterministic_sweeps(sweep):
    base = {"s0": "100", "strike": "100", "u": "1.2", "d": "0.8", "rate": "1.05"}
    serial = sweep_csv(parse_config(None, base | sweep))
    outputs = [sweep_csv(parse_config(None, base | sweep)) for _ in range(2)]
    outputs += [sweep_csv(parse_config(None, base | sweep | {"workers": str(w)})) for w in (2, 4, 8)]
    failures = [f"run {i} differs" for i, out in enumerate(outputs) if out != serial]
    key = "9 deterministic sweeps"
    prev_ok, prev_detail = conftest.ACCEPTANCE_RESULTS.get(key, (True, ""))
    axes = (prev_detail.split(": ", 1)[1] + ", " if prev_detail else "") + sweep["axis"]
    ok = prev_ok and not failures
    conftest.ACCEPTANCE_RESULTS[key] = (ok, f"byte-identical across repeats and 1/2/4/8 workers: {axes}")
    assert not failures, failures
