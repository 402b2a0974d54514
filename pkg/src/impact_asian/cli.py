"""Command-line front end: ``price``, ``region``, ``sweep`` and ``benchmark``."""

from __future__ import annotations

import argparse
import csv
import io
import sys

from .benchmark import Averaging, kv_comparison_table
from .config import AXES, REGIMES, RunConfig, parse_config
from .errors import (
    ArbitrageViolation,
    CapExceeded,
    ConfigError,
    DegenerateLattice,
    ZeroImpact,
)
from .impact import no_arb_region
from .sweeps import evaluate_point, fmt, sweep_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ARBITRAGE = 3
EXIT_CAP = 4

# argparse dest -> config key
_FLAG_KEYS = {
    "s0": "s0", "strike": "strike", "up": "u", "down": "d", "rate": "rate",
    "rate_convention": "rate_convention", "steps": "n", "lam": "lambda",
    "vu": "v_u", "vd": "v_d", "method": "method", "cap": "enumeration_cap",
    "out": "output_path", "workers": "workers", "axis": "axis",
    "sweep_from": "sweep_from", "sweep_to": "sweep_to", "points": "points",
    "regime": "regime", "lambdas": "lambdas", "ns": "ns",
    "averaging": "averaging", "sigma_step": "sigma_step",
}


def _emit(text: str, path: str | None, stdout) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def price_report(config: RunConfig) -> str:
    market, impact = config.market(), config.impact()
    r = evaluate_point(market, impact, config.method, config.enumeration_cap)
    m = r.model
    na = "n/a (n above enumeration cap)"
    rows = [
        ("u_adj", fmt(m.u_adj)),
        ("d_adj", fmt(m.d_adj)),
        ("r_step", fmt(m.r_step)),
        ("p_adj", fmt(m.p_adj)),
        ("geometric price", f"{fmt(r.geom_price)}  ({r.geom_method.value})"),
        ("arith lower bound", fmt(r.arith_lb)),
        ("arith upper (path)", fmt(r.arith_ub_pathwise) if r.arith_ub_pathwise is not None else na),
        ("arith upper (glob)", fmt(r.arith_ub_global)),
        ("rho*", fmt(r.rho_star)),
        ("arith exact", fmt(r.arith_exact) if r.arith_exact is not None else na),
    ]
    lines = [f"{label:<20}{value}" for label, value in rows]
    return "\n".join(lines) + "\n"


def cmd_price(config: RunConfig, stdout=sys.stdout) -> int:
    _emit(price_report(config), config.output_path, stdout)
    return EXIT_OK


def cmd_region(config: RunConfig, stdout=sys.stdout) -> int:
    market, impact = config.market(), config.impact()
    try:
        region = no_arb_region(market, impact)
    except ZeroImpact as exc:
        _emit(f"{exc}\n", config.output_path, stdout)
        return EXIT_OK
    lines = [
        f"r_step      {fmt(market.r_step)}",
        f"v_u_min     {fmt(region.v_u_min)}",
        f"v_d_min     {fmt(region.v_d_min)}",
        f"v_u, v_d    {fmt(impact.v_u)}, {fmt(impact.v_d)}",
        f"admissible  {'yes' if region.admissible else 'no'}",
    ]
    if region.v_u_min < 0 and region.v_d_min < 0:
        lines.append("both minima are negative: every non-negative volume pair is admissible")
    _emit("\n".join(lines) + "\n", config.output_path, stdout)
    return EXIT_OK


def cmd_sweep(config: RunConfig, stdout=sys.stdout) -> int:
    _emit(sweep_csv(config), config.output_path, stdout)
    return EXIT_OK


def cmd_benchmark(config: RunConfig, stdout=sys.stdout) -> int:
    if config.lam != 0:
        raise ConfigError("benchmark compares the frictionless lattice; set lambda = 0")
    rows = kv_comparison_table(
        config.market(), list(config.ns), Averaging(config.averaging), config.sigma_step
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "lattice", "kv", "abs_diff", "pct_error"])
    for row in rows:
        writer.writerow([row.n, fmt(row.lattice), fmt(row.kv), fmt(row.abs_diff), fmt(row.pct_error)])
    _emit(buf.getvalue(), config.output_path, stdout)
    return EXIT_OK


COMMANDS = {"price": cmd_price, "region": cmd_region, "sweep": cmd_sweep, "benchmark": cmd_benchmark}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("market and impact")
    g.add_argument("--s0", type=str)
    g.add_argument("--strike", type=str)
    g.add_argument("--up", type=str, help="frictionless up factor u")
    g.add_argument("--down", type=str, help="frictionless down factor d")
    g.add_argument("--rate", type=str, help="gross risk-free return")
    g.add_argument("--rate-convention", choices=["per-step", "total"])
    g.add_argument("--steps", type=str, help="number of lattice steps n")
    g.add_argument("--lambda", dest="lam", type=str, help="impact coefficient")
    g.add_argument("--vu", type=str, help="hedging volume after an up move")
    g.add_argument("--vd", type=str, help="hedging volume after a down move")
    g.add_argument("--method", choices=["enum", "recombined", "auto"])
    g.add_argument("--cap", type=str, help="largest n priced by full enumeration")
    g.add_argument("--config", help="key = value file; flags override it")
    g.add_argument("--out", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="impact-asian",
        description="Asian options on a binomial lattice with permanent price impact.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("price", parents=[common], help="price one parameter set")
    sub.add_parser("region", parents=[common], help="no-arbitrage volume region")
    sw = sub.add_parser("sweep", parents=[common], help="parameter sweep as CSV")
    sw.add_argument("--axis", choices=AXES)
    sw.add_argument("--from", dest="sweep_from", type=str)
    sw.add_argument("--to", dest="sweep_to", type=str)
    sw.add_argument("--points", type=str)
    sw.add_argument(
        "--regime",
        help=f"volume preset(s), comma separated: {', '.join(REGIMES)} or all",
    )
    sw.add_argument("--lambdas", help="comma-separated lambdas for the moneyness axis")
    sw.add_argument("--workers", type=str)
    bm = sub.add_parser("benchmark", parents=[common], help="lattice vs closed-form table")
    bm.add_argument("--ns", help="comma-separated step counts")
    bm.add_argument("--averaging", choices=["continuous", "discrete"])
    bm.add_argument("--sigma-step", type=str, help="override the per-step volatility")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data = None
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    overrides = {
        key: getattr(args, dest)
        for dest, key in _FLAG_KEYS.items()
        if getattr(args, dest, None) is not None
    }
    return parse_config(data, overrides)


def _region_hint(config: RunConfig) -> str:
    try:
        region = no_arb_region(config.market(), config.impact())
    except ZeroImpact as exc:
        return str(exc)
    return f"minimal volumes: v_u >= {fmt(region.v_u_min)}, v_d >= {fmt(region.v_d_min)}"


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    config = None
    try:
        config = config_from_args(args)
        return COMMANDS[args.command](config, stdout)
    except (ArbitrageViolation, DegenerateLattice) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        if config is not None:
            print(_region_hint(config), file=stderr)
        return EXIT_ARBITRAGE
    except CapExceeded as exc:
        print(f"error: CapExceeded: {exc}", file=stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
