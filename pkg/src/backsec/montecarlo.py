"""Seeded channel generation and Monte-Carlo parameter sweeps.

Channels for trial ``i`` come from ``SeedSequence(seed, spawn_key=(i,))``, so a
trial sees the same small-scale fading at every point of a sweep (common random
numbers) and results never depend on execution order or worker count.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, NumericalError
from .model import Solution, SystemChannels, SystemParams, dbm_to_watt
from .schemes import Scheme, SchemeResult, check_compatible, run_scheme
from .solver import SolverConfig

SWEEPABLE = ("total_power_dbm", "alpha", "beta", "m_tx", "k_eve", "d_pe")
_INTEGER_AXES = ("m_tx", "k_eve")


@dataclass(frozen=True)
class GeometryParams:
    """Link distances in meters and the path-loss exponent."""

    d_tp: float = 2.0
    d_pr: float = 2.0
    d_pe: float = 2.0
    d_te: float = 2.0
    gamma: float = 2.0

    def __post_init__(self):
        for name in ("d_tp", "d_pr", "d_pe", "d_te"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ContractError(f"{name} must be a positive distance, got {v}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ContractError(f"gamma must be >= 0, got {self.gamma}")

    def gain(self, name: str) -> float:
        """Amplitude scaling d^(-gamma/2) for one link."""
        return getattr(self, name) ** (-self.gamma / 2)


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def generate_channels(
    params: SystemParams, geometry: GeometryParams, seed: int, trial_index: int
) -> SystemChannels:
    """CN(0, 1) fading with path loss on the four tag/eve links; H_tr has unit gain."""
    m, n, l, k = params.m_tx, params.n_rx, params.l_tag, params.k_eve
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial_index,)))
    h_tp = _cn(rng, (l, m))
    h_pr = _cn(rng, (n, l))
    h_tr = _cn(rng, (n, m))
    h_pe = _cn(rng, (k, l))
    h_te = _cn(rng, (k, m))
    return SystemChannels(
        h_reader_to_tag=geometry.gain("d_tp") * h_tp,
        h_tag_to_reader=geometry.gain("d_pr") * h_pr,
        h_self_interference=h_tr,
        h_tag_to_eve=geometry.gain("d_pe") * h_pe,
        h_reader_to_eve=geometry.gain("d_te") * h_te,
    )


@dataclass(frozen=True)
class SweepSpec:
    params: SystemParams = field(default_factory=SystemParams.reference_defaults)
    geometry: GeometryParams = field(default_factory=GeometryParams)
    swept_name: str = "total_power_dbm"
    swept_values: tuple = (10.0,)
    trials: int = 1000
    schemes: tuple = ("general", "nsi_an", "nbs_an", "no_an")
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    t_grid_points: int = 2001

    def __post_init__(self):
        if self.swept_name not in SWEEPABLE:
            raise ContractError(f"cannot sweep {self.swept_name!r}; choose one of {SWEEPABLE}")
        vals = tuple(float(v) for v in self.swept_values)
        if not vals or not all(math.isfinite(v) for v in vals):
            raise ContractError("swept values must be a non-empty list of finite numbers")
        if self.swept_name in _INTEGER_AXES:
            if any(v != int(v) or v < 1 for v in vals):
                raise ContractError(f"{self.swept_name} values must be positive integers")
        object.__setattr__(self, "swept_values", vals)
        if self.trials < 1:
            raise ContractError(f"trials must be >= 1, got {self.trials}")
        schemes = tuple(Scheme(s).value for s in self.schemes)
        if not schemes:
            raise ContractError("at least one scheme is required")
        object.__setattr__(self, "schemes", schemes)
        for i in range(len(vals)):
            p, _ = self.point(i)
            for s in schemes:
                check_compatible(s, p)

    def point(self, index: int) -> tuple[SystemParams, GeometryParams]:
        """System and geometry parameters at swept value ``index``."""
        v = self.swept_values[index]
        name = self.swept_name
        if name == "total_power_dbm":
            return dataclasses.replace(self.params, total_power=dbm_to_watt(v)), self.geometry
        if name == "d_pe":
            return self.params, dataclasses.replace(self.geometry, d_pe=v)
        if name in _INTEGER_AXES:
            return dataclasses.replace(self.params, **{name: int(v)}), self.geometry
        return dataclasses.replace(self.params, **{name: v}), self.geometry

    def config_hash(self) -> str:
        blob = json.dumps(dataclasses.asdict(self), sort_keys=True, default=repr)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class PointStats:
    scheme: str
    swept_value: float
    mean_cs: float
    stderr_cs: float
    trials: int
    failures: int
    mean_solve_ms: float

    @property
    def degraded(self) -> bool:
        return self.failures > 0.01 * self.trials


@dataclass
class SweepResult:
    spec: SweepSpec
    points: list[PointStats]
    # rates[scheme][point, trial]; NaN marks a failed solve
    rates: dict[str, np.ndarray]
    config_hash: str

    @property
    def seed(self) -> int:
        return self.spec.seed

    @property
    def degraded(self) -> bool:
        return any(pt.degraded for pt in self.points)

    def stats(self, scheme: str, swept_value: float) -> PointStats:
        for pt in self.points:
            if pt.scheme == scheme and pt.swept_value == swept_value:
                return pt
        raise KeyError((scheme, swept_value))

    def mean(self, scheme: str) -> np.ndarray:
        return np.array([pt.mean_cs for pt in self.points if pt.scheme == scheme])


# order inside a trial: nullspace designs first so the general design can reuse them
_RUN_ORDER = ("no_an", "nbs_an", "nsi_an", "single_nullspace", "single_optimal", "general")


def _run_trial(spec: SweepSpec, trial: int):
    """All points and schemes of one trial: rates and solve times, shape (points, schemes)."""
    n_pts, n_sch = len(spec.swept_values), len(spec.schemes)
    cs = np.full((n_pts, n_sch), np.nan)
    secs = np.full((n_pts, n_sch), np.nan)
    order = sorted(spec.schemes, key=_RUN_ORDER.index)
    prev_general: Solution | None = None
    for i in range(n_pts):
        p, geom = spec.point(i)
        ch = generate_channels(p, geom, spec.seed, trial)
        done: dict[str, SchemeResult] = {}
        for name in order:
            warm = {}
            if name == "general":
                warm = {k: done[k].solution for k in ("nbs_an", "nsi_an") if k in done}
                if prev_general is not None and prev_general.an_cov.shape == (p.m_tx, p.m_tx):
                    warm["previous_point"] = prev_general
            t0 = time.perf_counter()
            try:
                res = run_scheme(name, ch, p, spec.solver, warm, spec.t_grid_points)
            except (NumericalError, np.linalg.LinAlgError, FloatingPointError):
                continue
            secs[i, spec.schemes.index(name)] = time.perf_counter() - t0
            cs[i, spec.schemes.index(name)] = res.secrecy_rate
            done[name] = res
        if "general" in done:
            prev_general = done["general"].solution
    return cs, secs


def _run_trials(args):
    spec, trials = args
    return [_run_trial(spec, t) for t in trials]


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Run every (point, trial, scheme); the result does not depend on ``workers``."""
    if workers < 1:
        raise ContractError(f"workers must be >= 1, got {workers}")
    trials = list(range(spec.trials))
    if workers == 1:
        outs = _run_trials((spec, trials))
    else:
        chunks = [trials[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_trials, [(spec, c) for c in chunks]))
        outs = [None] * spec.trials
        for c, part in zip(chunks, parts):
            for t, out in zip(c, part):
                outs[t] = out
    cs = np.stack([o[0] for o in outs], axis=-1)  # points x schemes x trials
    secs = np.stack([o[1] for o in outs], axis=-1)
    points, rates = [], {}
    for j, name in enumerate(spec.schemes):
        rates[name] = cs[:, j, :]
        for i, v in enumerate(spec.swept_values):
            ok = ~np.isnan(cs[i, j])
            vals = cs[i, j][ok]
            n_ok = int(ok.sum())
            mean = float(vals.mean()) if n_ok else float("nan")
            se = float(vals.std(ddof=1) / math.sqrt(n_ok)) if n_ok > 1 else 0.0
            ms = float(np.nanmean(secs[i, j]) * 1e3) if n_ok else float("nan")
            points.append(PointStats(name, v, mean, se, spec.trials, spec.trials - n_ok, ms))
    return SweepResult(spec, points, rates, spec.config_hash())
