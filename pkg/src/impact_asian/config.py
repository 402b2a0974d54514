"""Run configuration: flat ``key = value`` files plus command-line overrides."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from .errors import ConfigError, InvalidValue, MissingRequired, UnknownKey
from .impact import ImpactSpec, MarketSpec, RateConvention
from .paths import DEFAULT_CAP
from .pricing import Method

REGIMES = {
    "up-biased": (1.3, 1.0),
    "down-biased": (1.0, 1.3),
    "symmetric": (1.0, 1.0),
}
AXES = ("lambda", "vu", "vd", "moneyness", "maturity")
REQUIRED = ("s0", "strike", "u", "d", "rate", "n")


def _float_list(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def _regimes(text) -> tuple[str, ...]:
    items = text if isinstance(text, (list, tuple)) else [x.strip() for x in str(text).split(",")]
    if list(items) == ["all"]:
        return tuple(REGIMES)
    for item in items:
        if item not in REGIMES:
            raise ValueError(f"unknown regime {item!r}; choose from {', '.join(REGIMES)} or all")
    return tuple(items)


def _axis(text) -> str:
    if text not in AXES:
        raise ValueError(f"axis must be one of {', '.join(AXES)}")
    return text


def _rate_convention(text) -> RateConvention:
    if isinstance(text, RateConvention):
        return text
    aliases = {"per-step": "per-step", "per_step": "per-step", "total": "total",
               "total-horizon": "total", "total_horizon": "total"}
    return RateConvention(aliases[str(text).lower()])


def _int(text) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


# key -> (attribute, converter)
_KEYS = {
    "s0": ("s0", float),
    "strike": ("strike", float),
    "u": ("u", float),
    "d": ("d", float),
    "rate": ("rate", float),
    "rate_convention": ("rate_convention", _rate_convention),
    "n": ("n", _int),
    "lambda": ("lam", float),
    "v_u": ("v_u", float),
    "v_d": ("v_d", float),
    "method": ("method", lambda x: Method(str(x).lower()) if not isinstance(x, Method) else x),
    "enumeration_cap": ("enumeration_cap", _int),
    "output_path": ("output_path", str),
    "workers": ("workers", _int),
    "axis": ("axis", _axis),
    "sweep_from": ("sweep_from", float),
    "sweep_to": ("sweep_to", float),
    "points": ("points", _int),
    "regime": ("regime", _regimes),
    "lambdas": ("lambdas", _float_list),
    "ns": ("ns", lambda x: tuple(_int(v) for v in _float_list(x))),
    "averaging": ("averaging", str),
    "sigma_step": ("sigma_step", float),
}


@dataclass(frozen=True)
class RunConfig:
    s0: float
    strike: float
    u: float
    d: float
    rate: float
    n: int
    rate_convention: RateConvention = RateConvention.TOTAL_HORIZON
    lam: float = 0.0
    v_u: float = 0.0
    v_d: float = 0.0
    method: Method = Method.AUTO
    enumeration_cap: int = DEFAULT_CAP
    output_path: str | None = None
    workers: int = 1
    axis: str | None = None
    sweep_from: float | None = None
    sweep_to: float | None = None
    points: int | None = None
    regime: tuple[str, ...] = ()
    lambdas: tuple[float, ...] = ()
    ns: tuple[int, ...] = (2, 4, 6, 8, 10, 12, 14, 16, 18, 20)
    averaging: str = "continuous"
    sigma_step: float | None = None

    def market(self, **changes) -> MarketSpec:
        values = dict(
            s0=self.s0, u=self.u, d=self.d, rate=self.rate, n=self.n,
            strike=self.strike, rate_convention=self.rate_convention,
        )
        values.update(changes)
        return MarketSpec(**values)

    def volumes(self, regime: str | None = None) -> tuple[float, float]:
        if regime is None and len(self.regime) == 1:
            regime = self.regime[0]
        if regime is not None:
            return REGIMES[regime]
        return self.v_u, self.v_d

    def impact(self, **changes) -> ImpactSpec:
        v_u, v_d = self.volumes()
        values = dict(lam=self.lam, v_u=v_u, v_d=v_d)
        values.update(changes)
        return ImpactSpec(**values)


def valid_keys() -> list[str]:
    return sorted(_KEYS)


def read_config_text(data: bytes | str | None) -> dict[str, str]:
    if data is None:
        return {}
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"config file is not valid UTF-8: {exc}") from None
    values = {}
    for lineno, raw in enumerate(data.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def parse_config(data: bytes | str | None = None, overrides: Mapping[str, object] | None = None) -> RunConfig:
    """Merge file values with overrides (overrides win) into a RunConfig."""
    merged: dict[str, object] = dict(read_config_text(data))
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})

    unknown = sorted(set(merged) - set(_KEYS))
    if unknown:
        raise UnknownKey(
            f"unknown config key(s): {', '.join(unknown)}; valid keys: {', '.join(valid_keys())}"
        )
    missing = [k for k in REQUIRED if k not in merged]
    if missing:
        raise MissingRequired(f"missing required setting(s): {', '.join(missing)}")

    kwargs = {}
    for key, raw in merged.items():
        attr, convert = _KEYS[key]
        try:
            kwargs[attr] = convert(raw)
        except (ValueError, KeyError, TypeError) as exc:
            raise InvalidValue(f"bad value for {key!r}: {raw!r} ({exc})") from None
    config = RunConfig(**kwargs)
    _validate(config)
    return config


def _validate(config: RunConfig) -> None:
    if config.enumeration_cap < 0:
        raise ConfigError("enumeration_cap must be >= 0")
    if config.workers < 1:
        raise ConfigError("workers must be >= 1")
    if config.averaging not in ("continuous", "discrete"):
        raise ConfigError("averaging must be 'continuous' or 'discrete'")
    try:
        config.market()
        config.impact()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
