"""Secrecy-rate maximization by minorize-maximize outer steps and projected-gradient inner steps.

Each outer step linearizes the two convex ``-ln det`` terms of the secrecy rate at
the previous solution, which gives the concave surrogate ``g``. The surrogate is
maximized over the power-budget set with projected gradient ascent, using an
Armijo backtracking rule for the step size and the water-filling projection.

A nullspace variant optimizes ``(P_s, W)`` with ``Lambda = V W V^H`` for a fixed
orthonormal basis ``V``; the same code path runs with ``basis=V``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, NumericalError
from .model import (
    LN2,
    Solution,
    SystemChannels,
    SystemParams,
    hermitian_part,
    hpd_inverse,
    interference_cov_eve,
    interference_cov_reader,
    logdet,
    real_inner,
    signed_secrecy_rate,
)
from .projection import project_feasible


@dataclass(frozen=True)
class SolverConfig:
    eps_outer: float = 1e-3
    eps_inner: float = 1e-5
    mu0: float = 1.0
    shrink: float = 0.5
    delta: float = 0.1
    max_outer: int = 200
    max_inner: int = 2000
    max_backtrack: int = 60
    # start each line search at mu_prev / shrink (capped at mu0) instead of mu0
    step_memory: bool = True

    def __post_init__(self):
        if not (0 < self.shrink < 1):
            raise ContractError(f"shrink must be in (0, 1), got {self.shrink}")
        if not (0 < self.delta < 1):
            raise ContractError(f"delta must be in (0, 1), got {self.delta}")
        if not (self.eps_outer > 0 and self.eps_inner > 0 and self.mu0 > 0):
            raise ContractError("eps_outer, eps_inner and mu0 must be positive")
        for name in ("max_outer", "max_inner", "max_backtrack"):
            if getattr(self, name) < 1:
                raise ContractError(f"{name} must be >= 1")


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    MAX_OUTER_HIT = "max_outer_hit"
    MAX_INNER_HIT = "max_inner_hit"


@dataclass(frozen=True)
class SurrogateContext:
    s0: np.ndarray  # inverse reader interference covariance at the anchor
    s1: np.ndarray  # inverse of (eve covariance + P_s B) at the anchor
    anchor: Solution


@dataclass(frozen=True)
class OuterStep:
    outer: int
    inner_count: int
    surrogate: float
    secrecy_rate: float
    signed_rate: float


@dataclass
class SolverReport:
    iterates: list[OuterStep]
    final: Solution
    termination: Termination
    reduced: np.ndarray | None = None
    warm_start: str = "no_an"
    inner_cap_hits: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def secrecy_rate(self) -> float:
        return self.iterates[-1].secrecy_rate

    @property
    def rate_trace(self) -> np.ndarray:
        return np.array([it.secrecy_rate for it in self.iterates])

    @property
    def signed_trace(self) -> np.ndarray:
        return np.array([it.signed_rate for it in self.iterates])

    @property
    def total_inner(self) -> int:
        return sum(it.inner_count for it in self.iterates)


def relative_change(new: float, old: float) -> float:
    return abs(new - old) / max(abs(old), 1e-12)


def build_context(ch: SystemChannels, p: SystemParams, anchor: Solution) -> SurrogateContext:
    rr = interference_cov_reader(ch, p, anchor)
    re = interference_cov_eve(ch, p, anchor)
    s0 = hpd_inverse(rr)
    s1 = hpd_inverse(re + anchor.p_cw * ch.effective.b_mat)
    return SurrogateContext(s0, s1, anchor)


def _surrogate_terms(ch, p, ctx, x):
    eff = ch.effective
    rr = interference_cov_reader(ch, p, x)
    re = interference_cov_eve(ch, p, x)
    f = rr + x.p_cw * eff.a_mat
    val = (
        logdet(f)
        + logdet(re)
        - real_inner(ctx.s0, rr)
        - real_inner(ctx.s1, re + x.p_cw * eff.b_mat)
    )
    if not math.isfinite(val):
        raise NumericalError("surrogate value is not finite")
    return val, f, re


def surrogate_value(ch: SystemChannels, p: SystemParams, ctx: SurrogateContext, x: Solution) -> float:
    """Concave surrogate g(x; anchor) in nats, without the constant terms."""
    return _surrogate_terms(ch, p, ctx, x)[0]


def _gradient_from(ch, p, ctx, f, re):
    eff = ch.effective
    h = ch.h_reader_to_tag
    hpr, htr = ch.h_tag_to_reader, ch.h_self_interference
    hpe, hte = ch.h_tag_to_eve, ch.h_reader_to_eve
    f_inv = hpd_inverse(f)
    re_inv = hpd_inverse(re)
    dr = f_inv - ctx.s0
    de = re_inv - ctx.s1
    # weights multiplying E_i = H_tp e_i e_i^T H_tp^H, i.e. conj(h_i) h_i^T
    c = p.alpha * np.einsum("ji,jk,ki->i", hpr.conj(), dr, hpr).real + np.einsum(
        "ji,jk,ki->i", hpe.conj(), de, hpe
    ).real
    g_lam = (
        p.beta * htr.conj().T @ dr @ htr
        + hte.conj().T @ de @ hte
        + (h.conj().T * c) @ h
    )
    g_ps = real_inner(f_inv, eff.a_mat) - real_inner(ctx.s1, eff.b_mat)
    return g_ps, hermitian_part(g_lam)


def surrogate_gradient(
    ch: SystemChannels, p: SystemParams, ctx: SurrogateContext, x: Solution
) -> tuple[float, np.ndarray]:
    """Gradient of g w.r.t. (P_s, Lambda).

    The matrix part is the Hermitian G with dg = Re Tr(G^H dLambda) for
    Hermitian perturbations, i.e. the gradient in the Frobenius metric that the
    projection uses.
    """
    _, f, re = _surrogate_terms(ch, p, ctx, x)
    return _gradient_from(ch, p, ctx, f, re)


def covariance_maps(
    ch: SystemChannels, p: SystemParams, basis: np.ndarray | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Matrices K_r, K_e with vec(R_r - s_r I) = K_r vec(X), vec(R_e - s_e I) = K_e vec(X).

    ``X`` is the AN covariance (or W when Lambda = V W V^H); vec is row-major.
    Uses (A X B) row-major vec = kron(A, B^T) vec(X).
    """
    h = ch.h_reader_to_tag
    htr, hte = ch.h_self_interference, ch.h_reader_to_eve
    if basis is not None:
        h, htr, hte = h @ basis, htr @ basis, hte @ basis
    # q_i = h_i X h_i^H as a row functional on vec(X)
    q_rows = np.einsum("ij,ik->ijk", h, h.conj()).reshape(h.shape[0], -1)

    def outer_cols(g):
        return np.einsum("ai,bi->abi", g, g.conj()).reshape(-1, g.shape[1])

    k_r = p.alpha * outer_cols(ch.h_tag_to_reader) @ q_rows + p.beta * np.kron(htr, htr.conj())
    k_e = outer_cols(ch.h_tag_to_eve) @ q_rows + np.kron(hte, hte.conj())
    return k_r, k_e


class _Problem:
    """Optimization variables (P_s, X) with Lambda = V X V^H (V = I if no basis)."""

    def __init__(self, ch: SystemChannels, p: SystemParams, basis: np.ndarray | None = None):
        ch.check_params(p)
        self.ch, self.p, self.basis = ch, p, basis
        self.k_r, self.k_e = covariance_maps(ch, p, basis)
        n, k = p.n_rx, p.k_eve
        self.noise_r = p.sigma2_reader * np.eye(n)
        self.noise_e = p.sigma2_eve * np.eye(k)
        eff = ch.effective
        self.a_mat, self.b_mat = eff.a_mat, eff.b_mat

    def lift(self, x: Solution) -> Solution:
        if self.basis is None:
            return x
        v = self.basis
        return Solution(x.p_cw, hermitian_part(v @ x.an_cov @ v.conj().T))

    def _covs(self, x):
        vx = x.an_cov.ravel()
        n, k = self.noise_r.shape[0], self.noise_e.shape[0]
        rr = hermitian_part((self.k_r @ vx).reshape(n, n)) + self.noise_r
        re = hermitian_part((self.k_e @ vx).reshape(k, k)) + self.noise_e
        return rr, re

    def _terms(self, ctx, x):
        rr, re = self._covs(x)
        f = rr + x.p_cw * self.a_mat
        val = (
            logdet(f)
            + logdet(re)
            - real_inner(ctx.s0, rr)
            - real_inner(ctx.s1, re + x.p_cw * self.b_mat)
        )
        if not math.isfinite(val):
            raise NumericalError("surrogate value is not finite")
        return val, f, re

    def value(self, ctx, x):
        return self._terms(ctx, x)[0]

    def value_and_grad(self, ctx, x):
        val, f, re = self._terms(ctx, x)
        g_ps, g_lam = _gradient_from(self.ch, self.p, ctx, f, re)
        if self.basis is not None:
            v = self.basis
            g_lam = hermitian_part(v.conj().T @ g_lam @ v)
        return val, g_ps, g_lam

    def signed_rate(self, x):
        return signed_secrecy_rate(self.ch, self.p, self.lift(x))


@dataclass(frozen=True)
class ArmijoResult:
    x_next: Solution
    mu: float
    backtracks: int
    stalled: bool
    value: float


def _armijo(
    prob: _Problem, ctx, x_k: Solution, g_k: float, grad, cfg: SolverConfig, mu_start=None
) -> ArmijoResult:
    g_ps, g_lam = grad
    total = prob.p.total_power
    step_floor = 1e-13 * max(total, 1e-300)
    mu = cfg.mu0 if mu_start is None else mu_start
    for j in range(cfg.max_backtrack):
        cand = project_feasible(total, x_k.p_cw + mu * g_ps, x_k.an_cov + mu * g_lam)
        d_ps = cand.p_cw - x_k.p_cw
        d_lam = cand.an_cov - x_k.an_cov
        if abs(d_ps) + np.abs(d_lam).sum() <= step_floor:
            # the projected step no longer moves the iterate
            return ArmijoResult(x_k, mu, j, True, g_k)
        g_new = prob.value(ctx, cand)
        if g_new > g_k + cfg.delta * (real_inner(g_lam, d_lam) + g_ps * d_ps):
            return ArmijoResult(cand, mu, j, False, g_new)
        mu *= cfg.shrink
    return ArmijoResult(x_k, mu, cfg.max_backtrack, True, g_k)


def armijo_step(
    ch: SystemChannels,
    p: SystemParams,
    ctx: SurrogateContext,
    x_k: Solution,
    grad: tuple[float, np.ndarray],
    cfg: SolverConfig | None = None,
) -> ArmijoResult:
    """One backtracking projected-gradient step from ``x_k``.

    Returns ``x_k`` itself with ``stalled=True`` when no step size in the
    backtracking schedule passes the sufficient-increase test.
    """
    cfg = cfg or SolverConfig()
    prob = _Problem(ch, p)
    return _armijo(prob, ctx, x_k, prob.value(ctx, x_k), grad, cfg)


@dataclass(frozen=True)
class InnerResult:
    solution: Solution
    inner_count: int
    surrogate: float
    hit_cap: bool
    trace: tuple[float, ...]


def _solve_inner(prob: _Problem, ctx, x_start: Solution, cfg: SolverConfig) -> InnerResult:
    total = prob.p.total_power
    x = x_start
    if total == 0.0:
        zero = Solution(0.0, np.zeros_like(x.an_cov))
        return InnerResult(zero, 1, prob.value(ctx, zero), False, (prob.value(ctx, zero),))
    g_prev = prob.value(ctx, x)
    trace = [g_prev]
    count = 0
    mu_start = None
    for _ in range(cfg.max_inner):
        g_cur, g_ps, g_lam = prob.value_and_grad(ctx, x)
        step = _armijo(prob, ctx, x, g_cur, (g_ps, g_lam), cfg, mu_start)
        if step.stalled:
            if mu_start is None or mu_start >= cfg.mu0:
                return InnerResult(x, count, g_cur, False, tuple(trace))
            # a remembered step may start below the working range; retry from mu0
            step = _armijo(prob, ctx, x, g_cur, (g_ps, g_lam), cfg)
            if step.stalled:
                return InnerResult(x, count, g_cur, False, tuple(trace))
        if cfg.step_memory:
            mu_start = min(cfg.mu0, step.mu / cfg.shrink)
        count += 1
        x = step.x_next
        trace.append(step.value)
        done = relative_change(step.value, g_prev) <= cfg.eps_inner
        g_prev = step.value
        if done:
            return InnerResult(x, count, g_prev, False, tuple(trace))
    return InnerResult(x, count, g_prev, True, tuple(trace))


def solve_inner(
    ch: SystemChannels,
    p: SystemParams,
    ctx: SurrogateContext,
    x_start: Solution,
    cfg: SolverConfig | None = None,
) -> InnerResult:
    return _solve_inner(_Problem(ch, p), ctx, x_start, cfg or SolverConfig())


def _solve(prob: _Problem, x_init: Solution, cfg: SolverConfig) -> SolverReport:
    p = prob.p
    viol = prob.lift(x_init).violations(p.total_power)
    if viol:
        raise ContractError("initial point infeasible: " + "; ".join(viol))
    x = x_init
    c_prev = prob.signed_rate(x)
    iterates = [OuterStep(0, 0, float("nan"), max(c_prev, 0.0), c_prev)]
    termination = Termination.MAX_OUTER_HIT
    cap_hits = 0
    for n in range(1, cfg.max_outer + 1):
        ctx = build_context(prob.ch, p, prob.lift(x))
        inner = _solve_inner(prob, ctx, x, cfg)
        cap_hits += inner.hit_cap
        x = inner.solution
        c_new = prob.signed_rate(x)
        iterates.append(OuterStep(n, inner.inner_count, inner.surrogate, max(c_new, 0.0), c_new))
        if relative_change(c_new, c_prev) <= cfg.eps_outer:
            termination = Termination.MAX_INNER_HIT if inner.hit_cap else Termination.CONVERGED
            break
        c_prev = c_new
    final = prob.lift(x)
    reduced = x.an_cov if prob.basis is not None else None
    return SolverReport(iterates, final, termination, reduced=reduced, inner_cap_hits=cap_hits)


def solve_srm(
    ch: SystemChannels,
    p: SystemParams,
    x_init: Solution | None = None,
    cfg: SolverConfig | None = None,
) -> SolverReport:
    """Maximize the secrecy rate over (P_s, Lambda) from ``x_init`` (default: all power to CW)."""
    cfg = cfg or SolverConfig()
    if x_init is None:
        x_init = Solution.no_an(p.total_power, p.m_tx)
    return _solve(_Problem(ch, p), x_init, cfg)


def solve_srm_reduced(
    ch: SystemChannels,
    p: SystemParams,
    basis: np.ndarray,
    x_init: Solution | None = None,
    cfg: SolverConfig | None = None,
) -> SolverReport:
    """Same iteration over (P_s, W) with Lambda = basis @ W @ basis^H."""
    cfg = cfg or SolverConfig()
    r = basis.shape[1]
    if x_init is None:
        x_init = Solution.no_an(p.total_power, r)
    return _solve(_Problem(ch, p, basis), x_init, cfg)


def projected_gradient_residual(
    ch: SystemChannels, p: SystemParams, x: Solution, mu: float = 1.0
) -> float:
    """Frobenius distance between x and one projected surrogate-gradient step from it.

    With the surrogate anchored at x itself its gradient equals the gradient of
    ln(2) * signed secrecy rate, so a small value indicates a stationary point.
    """
    ctx = build_context(ch, p, x)
    g_ps, g_lam = surrogate_gradient(ch, p, ctx, x)
    y = project_feasible(p.total_power, x.p_cw + mu * g_ps, x.an_cov + mu * g_lam)
    return math.sqrt((y.p_cw - x.p_cw) ** 2 + np.linalg.norm(y.an_cov - x.an_cov) ** 2)


def ao_objective(ch: SystemChannels, p: SystemParams, ctx: SurrogateContext, x: Solution) -> float:
    """Alternating-optimization objective with the auxiliary matrices at their closed-form optimum.

    Equals g plus ln det S0 + ln det S1 + N + K, so it touches ln(2) * signed
    secrecy rate at the anchor.
    """
    n = ctx.s0.shape[0]
    k = ctx.s1.shape[0]
    return surrogate_value(ch, p, ctx, x) + logdet(ctx.s0) + logdet(ctx.s1) + n + k
