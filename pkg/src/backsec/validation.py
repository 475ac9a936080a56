"""Oracle-backed property checks, grouped into suites for the ``validate`` command."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracles
from .model import Solution, SystemParams
from .montecarlo import GeometryParams, generate_channels
from .projection import project_feasible, waterfill_level
from .single_tag import (
    SingleTagInstance,
    coefficients,
    ps_candidates,
    r_of_t,
    solve_single,
    solve_single_nullspace,
    t_coordinates,
    y_value,
)
from .solver import ao_objective, build_context, solve_srm, surrogate_gradient

SUITES = ("gradients", "projection", "single_tag", "equivalence", "monotonicity")


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        margin = self.tolerance - self.measured
        return (
            f"{status} {self.name}: measured {self.measured:.3e}, "
            f"tolerance {self.tolerance:.3e}, margin {margin:.3e}"
        )


def _instances(p: SystemParams, seed: int, count: int):
    geom = GeometryParams()
    return [generate_channels(p, geom, seed, i) for i in range(count)]


def _flat(g_ps, g_lam):
    return np.concatenate([[g_ps], np.ravel(g_lam)])


def gradient_error(ch, p, ctx, x) -> float:
    """max |analytic - FD| / max |analytic| over P_s and all matrix entries."""
    a = _flat(*surrogate_gradient(ch, p, ctx, x))
    f = _flat(*oracles.fd_gradient(ch, p, ctx, x))
    return float(np.abs(a - f).max() / max(np.abs(a).max(), 1e-300))


def check_gradients(seed: int = 0, points: int = 50) -> list[Check]:
    p = SystemParams.reference_defaults()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for ch in _instances(p, seed, points):
        anchor = oracles.random_feasible(rng, p.total_power, p.m_tx)
        x = oracles.random_feasible(rng, p.total_power, p.m_tx)
        worst = max(worst, gradient_error(ch, p, build_context(ch, p, anchor), x))
    return [Check("surrogate gradient vs central differences (max rel err)", worst, 1e-4)]


def _random_target(rng, m):
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return 0.5 * (g + g.conj().T) * rng.uniform(0.2, 3.0)


def projection_grid_errors(rng) -> tuple[float, float, float]:
    """One random 2x2 case: (closer-than-grid excess, distance gap / h, point gap / bound)."""
    p_total = rng.uniform(0.5, 3.0)
    p_cw = 2.0 * rng.standard_normal()
    lam = _random_target(rng, 2)
    proj = project_feasible(p_total, p_cw, lam)
    d_grid, best, h = oracles.projection_grid_2x2(p_total, p_cw, lam)
    d_proj = math.hypot(proj.p_cw - p_cw, np.linalg.norm(proj.an_cov - lam))
    gap = math.hypot(proj.p_cw - best.p_cw, np.linalg.norm(proj.an_cov - best.an_cov))
    delta = math.sqrt(3.0) * h
    # strong convexity of the squared distance bounds how far a near-optimal point can sit
    bound = math.sqrt(2.0 * d_proj * delta + delta**2)
    return max(d_proj - d_grid, 0.0), (d_grid - d_proj) / delta, gap / bound


def variational_worst(rng, p_total: float, m: int, n_y: int = 200) -> float:
    p_cw = 2.0 * rng.standard_normal() * p_total
    lam = _random_target(rng, m) * p_total
    proj = project_feasible(p_total, p_cw, lam)
    x = Solution(p_cw, lam)
    return max(
        oracles.variational_gap(x, proj, oracles.random_feasible(rng, p_total, m))
        for _ in range(n_y)
    )


def waterfill_worst(rng, count: int = 1000) -> float:
    worst = 0.0
    for _ in range(count):
        v = rng.standard_normal(rng.integers(1, 9)) * rng.uniform(0.1, 10.0)
        p_total = rng.uniform(0.0, 5.0)
        worst = max(worst, abs(waterfill_level(v, p_total) - oracles.bisection_level(v, p_total)))
    return worst


def check_projection(seed: int = 0, cases: int = 50) -> list[Check]:
    rng = np.random.default_rng(seed)
    errs = np.array([projection_grid_errors(rng) for _ in range(cases)])
    vi = max(variational_worst(rng, rng.uniform(0.5, 3.0), 2) for _ in range(cases))
    return [
        Check("projection no farther than best grid point", float(errs[:, 0].max()), 1e-12),
        Check("grid distance gap / (sqrt(3) h)", float(errs[:, 1].max()), 1.0),
        Check("grid point gap / strong-convexity bound", float(errs[:, 2].max()), 1.0),
        Check("variational inequality <x - P(x), y - P(x)>", vi, 1e-8),
        Check("waterfill level vs bisection", waterfill_worst(rng), 1e-10),
    ]


def single_tag_params() -> SystemParams:
    return SystemParams.reference_defaults(l_tag=1, beta=0.0)


def single_instances(seed: int, count: int) -> list[SingleTagInstance]:
    p = single_tag_params()
    return [SingleTagInstance.from_channels(ch, p) for ch in _instances(p, seed, count)]


def stationarity_error(inst, tc, t) -> float:
    """Largest relative derivative of y(P_s) at interior candidates, by central differences."""
    p = inst.total_power
    co = coefficients(inst, tc, t)
    worst = 0.0
    for ps in ps_candidates(inst, tc, t):
        if not 0.0 < ps < p:
            continue
        h = 1e-7 * p
        dy = (y_value(co, ps + h) - y_value(co, ps - h)) / (2 * h)
        worst = max(worst, abs(dy) * p / max(y_value(co, ps), 1e-300))
    return worst


def check_single_tag(seed: int = 0, count: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    r_err = grid_err = stat = 0.0
    gaps = []
    for inst in single_instances(seed, count):
        tc = t_coordinates(inst)
        for t in rng.uniform(0.0, 1.0, 5):
            r_err = max(r_err, abs(oracles.r_plane_search(tc, t) - float(r_of_t(tc, t))))
            stat = max(stat, stationarity_error(inst, tc, t))
        opt = solve_single(inst)
        y_grid = oracles.grid_single(inst, tc)[0]
        grid_err = max(grid_err, abs(y_grid - opt.objective) / y_grid)
        gaps.append(solve_single_nullspace(inst).objective - opt.objective)
    return [
        Check("r(t) vs plane search", r_err, 1e-6),
        Check("interior P_s candidates zero dy/dP_s (relative)", stat, 1e-6),
        Check("solve_single vs (t, P_s) grid (relative)", grid_err, 1e-3),
        Check("nullspace objective above optimal", max(gaps), 1e-9),
    ]


def equivalence_errors(ch, p, anchor, x) -> tuple[float, float]:
    """(gradient mismatch, objective mismatch) between AO and SPCA subproblem forms."""
    ctx = build_context(ch, p, anchor)
    a = _flat(*surrogate_gradient(ch, p, ctx, x))
    s = _flat(*oracles.spca_gradient(ch, p, anchor, x))
    g_err = float(np.abs(a - s).max() / max(np.abs(a).max(), 1e-300))
    ao = ao_objective(ch, p, ctx, x)
    o_err = abs(ao - oracles.spca_objective(ch, p, anchor, x)) / max(abs(ao), 1.0)
    return g_err, o_err


def check_equivalence(seed: int = 0, points: int = 100) -> list[Check]:
    p = SystemParams.reference_defaults()
    rng = np.random.default_rng(seed)
    errs = []
    for ch in _instances(p, seed, points):
        anchor = oracles.random_feasible(rng, p.total_power, p.m_tx)
        x = oracles.random_feasible(rng, p.total_power, p.m_tx)
        errs.append(equivalence_errors(ch, p, anchor, x))
    errs = np.array(errs)
    return [
        Check("AO vs SPCA subproblem gradients (max rel err)", float(errs[:, 0].max()), 1e-10),
        Check("AO vs SPCA subproblem objectives (rel diff)", float(errs[:, 1].max()), 1e-10),
    ]


def check_monotonicity(seed: int = 0, count: int = 10) -> list[Check]:
    p = SystemParams.reference_defaults()
    drop, outer = 0.0, 0
    for ch in _instances(p, seed, count):
        rep = solve_srm(ch, p)
        tr = rep.signed_trace
        drop = max(drop, float(np.max(tr[:-1] - tr[1:], initial=0.0)))
        outer = max(outer, len(rep.iterates) - 1)
    return [
        Check("largest drop in outer secrecy-rate trace", drop, 1e-9),
        Check("outer iterations used (must stay under 200)", outer, 199),
    ]


_RUNNERS = {
    "gradients": check_gradients,
    "projection": check_projection,
    "single_tag": check_single_tag,
    "equivalence": check_equivalence,
    "monotonicity": check_monotonicity,
}


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name not in _RUNNERS:
        raise KeyError(f"unknown suite {name!r}; choose one of {SUITES}")
    return _RUNNERS[name](seed=seed)
