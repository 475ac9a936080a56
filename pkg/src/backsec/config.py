"""Flat ``key = value`` run configuration.

Every key is optional and defaults to the standard simulation setting. Powers
are given in dBm here and converted to watts when the library objects are built.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, ContractError
from .model import SystemParams, dbm_to_watt
from .montecarlo import GeometryParams, SweepSpec
from .solver import SolverConfig


@dataclass
class RunConfig:
    # system
    m_tx: int = 3
    n_rx: int = 2
    l_tag: int = 2
    k_eve: int = 3
    total_power_dbm: float = 10.0
    sigma2_reader_dbm: float = -20.0
    sigma2_eve_dbm: float = -20.0
    alpha: float = 0.6
    beta: float = 0.3
    # geometry
    d_tp: float = 2.0
    d_pr: float = 2.0
    d_pe: float = 2.0
    d_te: float = 2.0
    gamma: float = 2.0
    # solver
    eps_outer: float = 1e-3
    eps_inner: float = 1e-5
    mu0: float = 1.0
    shrink: float = 0.5
    delta: float = 0.1
    max_outer: int = 200
    max_inner: int = 2000
    max_backtrack: int = 60
    step_memory: bool = True
    # sweep
    swept_name: str = "total_power_dbm"
    swept_values: tuple = (10.0,)
    trials: int = 1000
    schemes: tuple = ("general", "nsi_an", "nbs_an", "no_an")
    seed: int = 0
    t_grid_points: int = 2001

    def system_params(self) -> SystemParams:
        return SystemParams(
            self.m_tx,
            self.n_rx,
            self.l_tag,
            self.k_eve,
            dbm_to_watt(self.total_power_dbm),
            dbm_to_watt(self.sigma2_reader_dbm),
            dbm_to_watt(self.sigma2_eve_dbm),
            self.alpha,
            self.beta,
        )

    def geometry(self) -> GeometryParams:
        return GeometryParams(self.d_tp, self.d_pr, self.d_pe, self.d_te, self.gamma)

    def solver_config(self) -> SolverConfig:
        names = [f.name for f in fields(SolverConfig)]
        return SolverConfig(**{n: getattr(self, n) for n in names})

    def sweep_spec(self) -> SweepSpec:
        return SweepSpec(
            params=self.system_params(),
            geometry=self.geometry(),
            swept_name=self.swept_name,
            swept_values=self.swept_values,
            trials=self.trials,
            schemes=self.schemes,
            seed=self.seed,
            solver=self.solver_config(),
            t_grid_points=self.t_grid_points,
        )

    def validate(self) -> "RunConfig":
        """Build every library object once so bad values surface as ConfigError."""
        try:
            self.system_params()
            self.geometry()
            self.solver_config()
        except (ContractError, ValueError) as e:
            raise ConfigError(str(e)) from None
        return self

    def replace(self, **changes) -> "RunConfig":
        unknown = set(changes) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        return dataclasses.replace(self, **changes)


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _convert(name: str, default, text: str):
    try:
        if isinstance(default, bool):
            return _BOOL[text.lower()]
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            items = [s.strip() for s in text.split(",") if s.strip()]
            if default and isinstance(default[0], float):
                return tuple(float(s) for s in items)
            return tuple(items)
        return text
    except (KeyError, ValueError):
        raise ConfigError(f"bad value for {name}: {text!r}") from None


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment; unknown keys are rejected."""
    base = base or RunConfig()
    defaults = {f.name: getattr(base, f.name) for f in fields(RunConfig)}
    changes = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in defaults:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        changes[key] = _convert(key, defaults[key], value)
    return base.replace(**changes).validate()


def load_config(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    return parse_config(text)


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ", ".join(str(x) for x in v)
        elif isinstance(v, bool):
            v = str(v).lower()
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
