"""Run configuration: flat key=value format with bracketed sections.

Recognized sections and keys (defaults in parentheses):

    [grid]      n1 (128), n2 (128)
    [phys]      mu (1), lambda (0), gamma (1.4), linear_pressure (false)
    [init]      seed (1234), epsilon (1e-3), decay_rate (0.5),
                enable_rho (true), enable_u (true), enable_b (true)
    [stepping]  dt (auto), auto_cfl (true), scheme (IFRK4), filter (false)
    [diag]      s (4), sigma (0.25), sample_interval (0.1)
    [run]       t_end (none), out_dir (out), checkpoint_every (0 = off)

Unknown sections or keys are rejected with the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .diagnostics import DiagnosticsConfig
from .dynamics import PhysParams, PressureLaw
from .spectral import Grid
from .stepping import StepConfig


class ConfigError(ValueError):
    pass


def _parse_bool(raw: str, where: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{where}: expected a boolean, got {raw!r}")


@dataclass(frozen=True)
class RunConfig:
    n1: int = 128
    n2: int = 128
    mu: float = 1.0
    lam: float = 0.0
    gamma: float = 1.4
    linear_pressure: bool = False
    seed: int = 1234
    epsilon: float = 1e-3
    decay_rate: float = 0.5
    enable_rho: bool = True
    enable_u: bool = True
    enable_b: bool = True
    dt: float | None = None
    auto_cfl: bool = True
    scheme: str = "IFRK4"
    filter: bool = False
    s: float = 4.0
    sigma: float = 0.25
    sample_interval: float = 0.1
    t_end: float | None = None
    out_dir: str = "out"
    checkpoint_every: float = 0.0

    def grid(self) -> Grid:
        return Grid(self.n1, self.n2)

    def phys(self) -> PhysParams:
        gamma = 1.0 if self.linear_pressure else self.gamma
        return PhysParams(self.mu, self.lam, PressureLaw(gamma))

    def step_config(self) -> StepConfig:
        return StepConfig(dt=self.dt, scheme=self.scheme,
                          filter_enabled=self.filter)

    def diag_config(self) -> DiagnosticsConfig:
        return DiagnosticsConfig(s=self.s, sigma=self.sigma,
                                 sample_interval=self.sample_interval)

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **kw)


_SCHEMA = {
    ("grid", "n1"): ("n1", int),
    ("grid", "n2"): ("n2", int),
    ("phys", "mu"): ("mu", float),
    ("phys", "lambda"): ("lam", float),
    ("phys", "gamma"): ("gamma", float),
    ("phys", "linear_pressure"): ("linear_pressure", bool),
    ("init", "seed"): ("seed", int),
    ("init", "epsilon"): ("epsilon", float),
    ("init", "decay_rate"): ("decay_rate", float),
    ("init", "enable_rho"): ("enable_rho", bool),
    ("init", "enable_u"): ("enable_u", bool),
    ("init", "enable_b"): ("enable_b", bool),
    ("stepping", "dt"): ("dt", float),
    ("stepping", "auto_cfl"): ("auto_cfl", bool),
    ("stepping", "scheme"): ("scheme", str),
    ("stepping", "filter"): ("filter", bool),
    ("diag", "s"): ("s", float),
    ("diag", "sigma"): ("sigma", float),
    ("diag", "sample_interval"): ("sample_interval", float),
    ("run", "t_end"): ("t_end", float),
    ("run", "out_dir"): ("out_dir", str),
    ("run", "checkpoint_every"): ("checkpoint_every", float),
}

_SECTIONS = {sec for sec, _ in _SCHEMA}


def parse_config(text: str) -> RunConfig:
    """Parse and validate the key=value configuration format."""
    values: dict = {}
    explicit: set = set()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, _, raw_val = line.partition("=")
        key, raw_val = key.strip(), raw_val.strip()
        entry = _SCHEMA.get((section, key))
        if entry is None:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{section}]")
        attr, typ = entry
        where = f"line {lineno}: [{section}] {key}"
        try:
            if typ is bool:
                value = _parse_bool(raw_val, where)
            elif typ is int:
                value = int(raw_val)
            elif typ is float:
                if attr == "dt" and raw_val.lower() == "auto":
                    value = None
                else:
                    value = float(raw_val)
            else:
                value = raw_val
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        values[attr] = value
        explicit.add(attr)

    cfg = RunConfig(**values)
    _validate(cfg, explicit)
    return cfg


def _validate(cfg: RunConfig, explicit: set) -> None:
    if cfg.n1 < 8 or cfg.n1 % 2 or cfg.n2 < 8 or cfg.n2 % 2:
        raise ConfigError("grid sizes must be even and >= 8")
    if cfg.mu <= 0:
        raise ConfigError("mu must be positive")
    if cfg.mu + cfg.lam <= 0:
        raise ConfigError("mu + lambda must be positive")
    if cfg.gamma <= 0:
        raise ConfigError("gamma must be positive")
    if not 0.0 < cfg.sigma < 0.5:
        raise ConfigError("sigma must satisfy 0 < sigma < 1/2")
    if cfg.s < 2:
        raise ConfigError("s must be >= 2")
    if cfg.epsilon < 0:
        raise ConfigError("epsilon must be nonnegative")
    if cfg.decay_rate <= 0:
        raise ConfigError("decay_rate must be positive")
    if cfg.sample_interval <= 0:
        raise ConfigError("sample_interval must be positive")
    if cfg.t_end is not None and cfg.t_end <= 0:
        raise ConfigError("t_end must be positive")
    if cfg.checkpoint_every < 0:
        raise ConfigError("checkpoint_every must be nonnegative")
    if cfg.scheme not in ("IFRK3", "IFRK4"):
        raise ConfigError("scheme must be IFRK3 or IFRK4")
    if cfg.dt is not None and cfg.dt <= 0:
        raise ConfigError("dt must be positive (or 'auto')")
    if cfg.dt is not None and cfg.auto_cfl and "auto_cfl" in explicit:
        raise ConfigError("dt and auto_cfl=true conflict; choose one")
