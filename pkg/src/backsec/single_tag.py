"""Global solver for a single-antenna tag with an MRC eavesdropper and no AN self-interference.

The optimal AN covariance is rank one and uses all remaining power, so the design
reduces to a CW power P_s and a unit direction v. Writing t = |d1^H v|^2 for the
share of AN that hits the tag, the best direction for a given t has a closed
form, the best P_s for a given t is one of the roots of a quadratic or P, and t
is found by a 1-D search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import NumericalError, UnsupportedConfigError
from .model import LN2, Solution, SystemChannels, SystemParams


class DegenerateAlignment(NumericalError):
    """The tag direction and the eavesdropper's direct AN direction coincide (kappa = 1)."""


def _guard(den, what: str):
    if np.any(np.abs(den) < 1e-300):
        raise NumericalError(f"division by (near) zero in {what}")
    return den


@dataclass(frozen=True)
class SingleTagInstance:
    h_tp: np.ndarray  # M, reader -> tag (conjugated: the tag sees h_tp^H x)
    h_pr: np.ndarray  # N, tag -> reader
    h_pe: np.ndarray  # K, tag -> eve
    h_te: np.ndarray  # K x M, reader -> eve
    alpha: float
    sigma2_reader: float
    sigma2_eve: float
    total_power: float

    @property
    def m(self) -> int:
        return self.h_tp.shape[0]

    @property
    def d_tp(self) -> complex:
        return complex(self.h_tp.conj().sum() / math.sqrt(self.m))

    @classmethod
    def from_channels(cls, ch: SystemChannels, p: SystemParams) -> "SingleTagInstance":
        """Build from a general L=1 instance; the beta of ``p`` is ignored (taken as 0)."""
        ch.check_params(p)
        if p.l_tag != 1:
            raise UnsupportedConfigError(f"single-tag solver needs L=1, got L={p.l_tag}")
        return cls(
            h_tp=ch.h_reader_to_tag[0].conj().copy(),
            h_pr=ch.h_tag_to_reader[:, 0].copy(),
            h_pe=ch.h_tag_to_eve[:, 0].copy(),
            h_te=np.array(ch.h_reader_to_eve),
            alpha=p.alpha,
            sigma2_reader=p.sigma2_reader,
            sigma2_eve=p.sigma2_eve,
            total_power=p.total_power,
        )

    def to_channels(self, h_self_interference: np.ndarray | None = None) -> SystemChannels:
        n = self.h_pr.shape[0]
        htr = np.zeros((n, self.m)) if h_self_interference is None else h_self_interference
        return SystemChannels(
            self.h_tp.conj()[None, :], self.h_pr[:, None], htr, self.h_pe[:, None], self.h_te
        )

    def params(self, beta: float = 0.0) -> SystemParams:
        return SystemParams(
            self.m,
            self.h_pr.shape[0],
            1,
            self.h_pe.shape[0],
            self.total_power,
            self.sigma2_reader,
            self.sigma2_eve,
            self.alpha,
            beta,
        )


@dataclass(frozen=True)
class TCoordinates:
    d1: np.ndarray
    d2: np.ndarray
    kappa: float
    phi: float
    # |H_te^H h_pe|; zero means the eavesdropper gets no direct AN at all
    direct_gain: float

    @property
    def aligned(self) -> bool:
        return abs(1.0 - self.kappa) <= 1e-10


def _orthogonal_unit(d1: np.ndarray) -> np.ndarray:
    m = d1.shape[0]
    if m < 2:
        raise UnsupportedConfigError("no direction orthogonal to the tag channel when M=1")
    # the basis vector least aligned with d1, orthogonalized
    e = np.zeros(m, dtype=complex)
    e[int(np.argmin(np.abs(d1)))] = 1.0
    u = e - d1 * np.vdot(d1, e)
    return u / np.linalg.norm(u)


def t_coordinates(inst: SingleTagInstance) -> TCoordinates:
    n_tp = float(np.linalg.norm(inst.h_tp))
    _guard(n_tp, "tag channel norm")
    d1 = inst.h_tp / n_tp
    g = inst.h_te.conj().T @ inst.h_pe
    n_g = float(np.linalg.norm(g))
    if n_g <= 1e-300:
        d2 = _orthogonal_unit(d1)
    else:
        d2 = g / n_g
    inner = complex(np.vdot(d2, d1))  # d2^H d1
    kappa = min(abs(inner), 1.0)
    phi = math.atan2(inner.imag, inner.real)
    if phi == -math.pi:
        phi = math.pi
    return TCoordinates(d1, d2, kappa, phi, n_g)


def r_of_t(tc: TCoordinates, t):
    """Largest |d2^H v|^2 over unit v with |d1^H v|^2 = t."""
    if tc.aligned:
        raise DegenerateAlignment("kappa = 1: tag and eavesdropper AN directions coincide")
    t = np.asarray(t, dtype=float)
    k = tc.kappa
    val = 1.0 - (k * np.sqrt(1.0 - t) - np.sqrt((1.0 - k * k) * t)) ** 2
    return np.clip(val, 0.0, 1.0)


def v_of_t(tc: TCoordinates, t: float) -> np.ndarray:
    """Unit AN direction attaining ``r_of_t``."""
    if tc.aligned:
        raise DegenerateAlignment("kappa = 1: tag and eavesdropper AN directions coincide")
    k = tc.kappa
    s = math.sqrt(max(1.0 - t, 0.0) / (1.0 - k * k))
    coef = (k * s - math.sqrt(t)) * np.exp(1j * (math.pi - tc.phi))
    return coef * tc.d1 + s * tc.d2


def _aligned_r(t):
    return np.asarray(t, dtype=float)


def _aligned_v(tc: TCoordinates, t: float) -> np.ndarray:
    if t >= 1.0:
        return tc.d1.astype(complex)
    u = _orthogonal_unit(tc.d1)
    return math.sqrt(t) * tc.d1 + math.sqrt(1.0 - t) * u


def _r(tc, t):
    return _aligned_r(t) if tc.aligned else r_of_t(tc, t)


def _v(tc, t):
    return _aligned_v(tc, t) if tc.aligned else v_of_t(tc, t)


@dataclass(frozen=True)
class Coefficients:
    """Per-t coefficients of y(P_s) = (1 + a P_s/(1 + b P_s)) / (1 + c P_s/(1 + d P_s))."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    l1: np.ndarray
    l2: np.ndarray


def coefficients(inst: SingleTagInstance, tc: TCoordinates, t) -> Coefficients:
    t = np.asarray(t, dtype=float)
    p = inst.total_power
    dd = abs(inst.d_tp) ** 2
    hp2 = float(np.vdot(inst.h_pr, inst.h_pr).real)
    he2 = float(np.vdot(inst.h_pe, inst.h_pe).real)
    ht2 = float(np.vdot(inst.h_tp, inst.h_tp).real)
    l1 = inst.alpha * hp2 * ht2 * t
    if he2 > 0:
        l2 = he2 * ht2 * t + tc.direct_gain**2 * _r(tc, t) / he2
    else:
        l2 = np.zeros_like(t)
    den_r = _guard(inst.sigma2_reader + p * l1, "reader coefficients")
    den_e = _guard(inst.sigma2_eve + p * l2, "eve coefficients")
    return Coefficients(
        a=dd * hp2 / den_r,
        b=-l1 / den_r,
        c=dd * he2 / den_e,
        d=-l2 / den_e,
        l1=l1,
        l2=l2,
    )


def y_value(co: Coefficients, ps):
    """Objective ratio (1 + SINR_reader) / (1 + SINR_eve) as a function of P_s."""
    a, b, c, d = co.a, co.b, co.c, co.d
    return (1.0 + a * ps / (1.0 + b * ps)) / (1.0 + c * ps / (1.0 + d * ps))


def objective(inst: SingleTagInstance, tc: TCoordinates, ps, t):
    """y(P_s, t); broadcasts over array arguments."""
    return y_value(coefficients(inst, tc, t), ps)


def _stationary_roots(co: Coefficients):
    """Roots of the stationarity quadratic, NaN where absent; arrays of shape (..., 2)."""
    a, b, c, d = co.a, co.b, co.c, co.d
    lead = a * d * d + a * c * d - a * b * c - b * b * c
    lin = 2.0 * (a * d - b * c)
    const = a - c
    lead_scale = np.maximum.reduce([np.abs(a * d * d), np.abs(a * c * d), np.abs(a * b * c), np.abs(b * b * c)])
    lin_scale = 2.0 * np.maximum(np.abs(a * d), np.abs(b * c))
    with np.errstate(all="ignore"):
        disc = a * c * (b - d) * (a + b - c - d)
        sq = np.sqrt(disc)
        den = b * b * c + a * (b * c - d * (c + d))
        r1 = (a * d - b * c + sq) / den
        r2 = (a * d - b * c - sq) / den
        lin_root = -const / lin
    quad = np.abs(lead) > 1e-14 * np.maximum(lead_scale, 1e-300)
    linear = ~quad & (np.abs(lin) > 1e-14 * np.maximum(lin_scale, 1e-300))
    out1 = np.where(quad, r1, np.where(linear, lin_root, np.nan))
    out2 = np.where(quad, r2, np.nan)
    roots = np.stack([out1, out2], axis=-1)
    return np.where(np.isfinite(roots), roots, np.nan)


def ps_candidates(inst: SingleTagInstance, tc: TCoordinates, t: float) -> np.ndarray:
    """Candidate CW powers for fixed t: real stationary points inside [0, P], plus P."""
    p = inst.total_power
    roots = _stationary_roots(coefficients(inst, tc, float(t)))
    keep = [float(r) for r in np.atleast_1d(roots) if np.isfinite(r) and 0.0 <= r <= p]
    return np.array(sorted(set(keep + [p])))


def _best_ps(inst, tc, t):
    """Best (y, P_s) per t over the candidate set, plus P_s = 0; vectorized over t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    p = inst.total_power
    co = coefficients(inst, tc, t)
    roots = _stationary_roots(co)
    roots = np.where((roots >= 0.0) & (roots <= p), roots, np.nan)
    cand = np.concatenate([roots, np.full(t.shape + (1,), p), np.zeros(t.shape + (1,))], axis=-1)
    co_b = Coefficients(*(np.asarray(x)[..., None] for x in (co.a, co.b, co.c, co.d, co.l1, co.l2)))
    with np.errstate(all="ignore"):
        y = y_value(co_b, cand)
    y = np.where(np.isnan(cand), -np.inf, y)
    idx = np.argmax(y, axis=-1)
    rows = np.arange(t.shape[0])
    return y[rows, idx], cand[rows, idx]


@dataclass(frozen=True)
class SingleTagResult:
    solution: Solution
    secrecy_rate: float
    t_star: float
    objective: float


def _result(inst, tc, ps, t, yv) -> SingleTagResult:
    p = inst.total_power
    v = _v(tc, t)
    lam = (p - ps) * np.outer(v, v.conj())
    return SingleTagResult(Solution(ps, lam), max(0.0, math.log2(yv)), float(t), float(yv))


def _zero_power(inst) -> SingleTagResult:
    m = inst.m
    return SingleTagResult(Solution(0.0, np.zeros((m, m), dtype=complex)), 0.0, 0.0, 1.0)


def solve_single(inst: SingleTagInstance, grid_points: int = 2001, refine_tol: float = 1e-6) -> SingleTagResult:
    """Globally optimal (P_s, rank-one Lambda) by a t-grid plus local bounded refinement."""
    if inst.total_power == 0.0:
        return _zero_power(inst)
    tc = t_coordinates(inst)
    if inst.m == 1:
        ts = np.array([1.0])
    else:
        ts = np.linspace(0.0, 1.0, int(grid_points))
    yv, ps = _best_ps(inst, tc, ts)
    i = int(np.argmax(yv))
    best = (float(yv[i]), float(ps[i]), float(ts[i]))
    if ts.size > 2:
        lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, ts.size - 1)]
        res = minimize_scalar(
            lambda s: -_best_ps(inst, tc, s)[0][0],
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": refine_tol},
        )
        y_ref, ps_ref = _best_ps(inst, tc, res.x)
        if y_ref[0] > best[0]:
            best = (float(y_ref[0]), float(ps_ref[0]), float(res.x))
    yv_best, ps_best, t_best = best
    return _result(inst, tc, ps_best, t_best, yv_best)


def solve_single_nullspace(inst: SingleTagInstance) -> SingleTagResult:
    """AN restricted to the nullspace of the tag channel (t = 0); only P_s is optimized."""
    if inst.m < 2:
        raise UnsupportedConfigError("nullspace AN toward the tag requires M >= 2")
    if inst.total_power == 0.0:
        return _zero_power(inst)
    tc = t_coordinates(inst)
    yv, ps = _best_ps(inst, tc, 0.0)
    return _result(inst, tc, float(ps[0]), 0.0, float(yv[0]))


def mrc_rates(inst: SingleTagInstance, p_cw: float, an_cov: np.ndarray) -> tuple[float, float]:
    """(C_r, C_e) in bits/s/Hz for a reader with an MMSE receiver and an MRC eavesdropper.

    Evaluated directly from the covariance, independent of the (P_s, t) reduction.
    """
    dd = abs(inst.d_tp) ** 2
    hp2 = float(np.vdot(inst.h_pr, inst.h_pr).real)
    he2 = float(np.vdot(inst.h_pe, inst.h_pe).real)
    q = float(np.vdot(inst.h_tp, an_cov @ inst.h_tp).real)
    sinr_r = p_cw * dd * hp2 / (inst.alpha * hp2 * q + inst.sigma2_reader)
    if he2 == 0.0:
        return math.log2(1.0 + sinr_r), 0.0
    g = inst.h_te.conj().T @ inst.h_pe
    direct = float(np.vdot(g, an_cov @ g).real) / he2
    sinr_e = p_cw * dd * he2 / (he2 * q + direct + inst.sigma2_eve)
    return math.log2(1.0 + sinr_r), math.log2(1.0 + sinr_e)
