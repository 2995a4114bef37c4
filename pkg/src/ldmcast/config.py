"""Scenario configuration shared by the optimization and simulation layers."""

import configparser
import io
import math
from dataclasses import dataclass, field, fields, replace

REQUIRED = ("k", "k_prime", "n_tx")


def dbm_to_mw(dbm):
    return 10.0 ** (dbm / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    k: int
    k_prime: int
    n_tx: int
    n_rx: int = 1
    l_rx: int = 4
    p_tx_dbm: float = 35.0
    p_rx_dbm: float = 0.0
    sigma2_dbm: float = 10.0
    gamma_min: float = 4.0
    omega: float = 0.5
    n_conv: int = 20
    epsilon: float = 1e-3
    paths: int = 3
    aoa_range: tuple = (-math.pi, math.pi)
    aod_range: tuple = (-math.pi / 3, math.pi / 3)
    master_seed: int = 0
    n_seeds: int = 100
    xhaus_cap: int = 10_000

    def __post_init__(self):
        validate(self)

    @property
    def p_tx_mw(self):
        return dbm_to_mw(self.p_tx_dbm)

    @property
    def p_rx_mw(self):
        return dbm_to_mw(self.p_rx_dbm)

    @property
    def sigma2_mw(self):
        return dbm_to_mw(self.sigma2_dbm)

    def with_(self, **changes):
        return replace(self, **changes)


class ConfigError(ValueError):
    """Invalid or incomplete configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


def validate(cfg):
    def need(cond, name, msg):
        if not cond:
            raise ConfigError(f"{name}: {msg}", name)

    for name in ("k", "k_prime", "n_tx", "n_rx", "l_rx", "n_conv", "paths", "n_seeds", "xhaus_cap"):
        need(isinstance(getattr(cfg, name), int) and getattr(cfg, name) >= 1, name, "must be a positive integer")
    need(cfg.k_prime <= cfg.k, "k_prime", f"must not exceed k={cfg.k}")
    need(cfg.k_prime <= cfg.n_tx, "k_prime", f"must not exceed n_tx={cfg.n_tx}")
    need(cfg.gamma_min > 0, "gamma_min", "must be positive")
    need(0.0 <= cfg.omega <= 1.0, "omega", "must lie in [0, 1]")
    need(cfg.epsilon >= 0, "epsilon", "must be nonnegative")
    for name in ("aoa_range", "aod_range"):
        lo, hi = getattr(cfg, name)
        need(lo <= hi, name, "lower bound exceeds upper bound")


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian grid over one or more config fields, plus the schemes to run.

    ``k_prime_ratio``, when set, derives ``k_prime = round(k * ratio)`` in
    every cell (used for sweeps over ``k`` with a fixed scheduled fraction).
    """

    axes: tuple
    schemes: tuple
    k_prime_ratio: float = None

    def __post_init__(self):
        if not self.schemes:
            raise ConfigError("sweep needs at least one scheme", "schemes")
        for name, values in self.axes:
            if name not in _FIELD_TYPES:
                raise ConfigError(f"unknown sweep axis {name!r}", name)
            if not values:
                raise ConfigError(f"sweep axis {name!r} has no values", name)

    @property
    def axis(self):
        return self.axes[0][0] if self.axes else None

    @property
    def values(self):
        return self.axes[0][1] if self.axes else ()

    def cells(self, base):
        """Yield ``(scenario_id, config)`` for every grid point, first axis outermost."""
        import itertools

        names = [name for name, _ in self.axes]
        for combo in itertools.product(*(values for _, values in self.axes)):
            changes = dict(zip(names, combo))
            if self.k_prime_ratio is not None:
                k = changes.get("k", base.k)
                changes["k_prime"] = max(1, int(round(k * self.k_prime_ratio)))
            scenario_id = ";".join(f"{n}={v}" for n, v in changes.items()) or "base"
            yield scenario_id, replace(base, **changes)


_FIELD_TYPES = {f.name: f.type for f in fields(SystemConfig)}
_INT_FIELDS = {"k", "k_prime", "n_tx", "n_rx", "l_rx", "n_conv", "paths", "master_seed", "n_seeds", "xhaus_cap"}
_RANGE_FIELDS = {"aoa_range", "aod_range"}


def _parse_value(name, text):
    text = text.strip()
    try:
        if name in _INT_FIELDS:
            return int(text)
        if name in _RANGE_FIELDS:
            lo, hi = (float(eval_angle(p)) for p in text.split(","))
            return (lo, hi)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r}", name) from exc


def eval_angle(text):
    """Parse a float, allowing the forms ``pi``, ``-pi/3`` and ``2*pi``."""
    t = text.strip().replace(" ", "")
    sign = -1.0 if t.startswith("-") else 1.0
    t = t.lstrip("+-")
    if "pi" not in t:
        return sign * float(t)
    num, _, den = t.partition("/")
    mult = num.replace("pi", "").rstrip("*") or "1"
    return sign * float(mult) * math.pi / (float(den) if den else 1.0)


def parse_config(text):
    """Parse an INI-style document with ``[system]`` and optional ``[sweep]`` sections.

    Returns ``(SystemConfig, SweepSpec or None)``.
    """
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if not parser.has_section("system"):
        raise ConfigError("missing [system] section", "system")
    system = parser["system"]
    for name in REQUIRED:
        if name not in system:
            raise ConfigError(f"missing required field {name!r}", name)
    values = {}
    for name, raw in system.items():
        if name not in _FIELD_TYPES:
            raise ConfigError(f"unknown field {name!r}", name)
        values[name] = _parse_value(name, raw)
    cfg = SystemConfig(**values)

    sweep = None
    if parser.has_section("sweep"):
        sec = parser["sweep"]
        schemes = tuple(s.strip() for s in sec.get("schemes", "").split(",") if s.strip())
        ratio = sec.get("k_prime_ratio")
        axes = []
        for name, raw in sec.items():
            if name in ("schemes", "k_prime_ratio"):
                continue
            if name not in _FIELD_TYPES:
                raise ConfigError(f"unknown sweep axis {name!r}", name)
            axes.append((name, tuple(_parse_value(name, v) for v in raw.split(",") if v.strip())))
        sweep = SweepSpec(tuple(axes), schemes, float(ratio) if ratio else None)
    return cfg, sweep


def serialize_config(cfg, sweep=None):
    out = io.StringIO()
    out.write("[system]\n")
    for f in fields(SystemConfig):
        v = getattr(cfg, f.name)
        if f.name in _RANGE_FIELDS:
            v = f"{v[0]!r}, {v[1]!r}"
        elif isinstance(v, float):
            v = repr(v)
        out.write(f"{f.name} = {v}\n")
    if sweep is not None:
        out.write("\n[sweep]\n")
        for name, vals in sweep.axes:
            out.write(f"{name} = {', '.join(repr(v) if isinstance(v, float) else str(v) for v in vals)}\n")
        if sweep.k_prime_ratio is not None:
            out.write(f"k_prime_ratio = {sweep.k_prime_ratio!r}\n")
        out.write(f"schemes = {', '.join(sweep.schemes)}\n")
    return out.getvalue()
