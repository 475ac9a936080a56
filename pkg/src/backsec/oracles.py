"""Independent reference computations used to check the fast solvers.

Everything here is deliberately brute force or built from a different
construction than the production path, so agreement means something.
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    Solution,
    SystemChannels,
    SystemParams,
    hermitian_part,
    hpd_inverse,
    interference_cov_eve,
    interference_cov_reader,
    logdet,
    real_inner,
)
from .single_tag import SingleTagInstance, TCoordinates, _v
from .solver import SurrogateContext, surrogate_value


def hermitian_basis(m: int) -> list[np.ndarray]:
    """Orthonormal basis of m x m Hermitian matrices under Re Tr(X^H Y)."""
    out = []
    s = 1.0 / math.sqrt(2.0)
    for j in range(m):
        e = np.zeros((m, m), dtype=complex)
        e[j, j] = 1.0
        out.append(e)
        for k in range(j + 1, m):
            re = np.zeros((m, m), dtype=complex)
            re[j, k] = re[k, j] = s
            im = np.zeros((m, m), dtype=complex)
            im[j, k], im[k, j] = 1j * s, -1j * s
            out += [re, im]
    return out


def fd_gradient(
    ch: SystemChannels, p: SystemParams, ctx: SurrogateContext, x: Solution, rel_step: float = 1e-6
) -> tuple[float, np.ndarray]:
    """Central differences of surrogate_value in P_s and in each Hermitian-pair coordinate.

    The step is ``rel_step * P`` so the truncation error does not depend on the
    power unit (an absolute 1e-6 W is a tenth of a -20 dBm noise floor).

    Coordinates are the diagonal entries and the real and imaginary parts of each
    upper-triangle entry, moved together with their mirror. With dg = Re Tr(G^H dL),
    d/d(L_jj) = G_jj, d/d(Re L_jk) = 2 Re G_jk, d/d(Im L_jk) = 2 Im G_jk.
    """

    def g(ps, lam):
        return surrogate_value(ch, p, ctx, Solution(ps, lam))

    step = rel_step * (p.total_power or 1.0)
    m = x.an_cov.shape[0]
    lam0 = x.an_cov
    d_ps = (g(x.p_cw + step, lam0) - g(x.p_cw - step, lam0)) / (2 * step)
    grad = np.zeros((m, m), dtype=complex)
    for j in range(m):
        for k in range(j, m):
            if j == k:
                e = np.zeros((m, m), dtype=complex)
                e[j, j] = 1.0
                grad[j, j] = (g(x.p_cw, lam0 + step * e) - g(x.p_cw, lam0 - step * e)) / (2 * step)
                continue
            er = np.zeros((m, m), dtype=complex)
            er[j, k] = er[k, j] = 1.0
            ei = np.zeros((m, m), dtype=complex)
            ei[j, k], ei[k, j] = 1j, -1j
            dre = (g(x.p_cw, lam0 + step * er) - g(x.p_cw, lam0 - step * er)) / (2 * step)
            dim = (g(x.p_cw, lam0 + step * ei) - g(x.p_cw, lam0 - step * ei)) / (2 * step)
            grad[j, k] = 0.5 * (dre + 1j * dim)
            grad[k, j] = np.conj(grad[j, k])
    return d_ps, grad


# ---- SPCA (first-order Taylor) construction of the subproblem -----------------


def _linear_parts(ch, p, lam):
    """Noise-free reader and eve interference covariances, linear in lam."""
    s = Solution(0.0, lam)
    rr = interference_cov_reader(ch, p, s) - p.sigma2_reader * np.eye(p.n_rx)
    re = interference_cov_eve(ch, p, s) - p.sigma2_eve * np.eye(p.k_eve)
    return rr, re


def spca_objective(ch: SystemChannels, p: SystemParams, anchor: Solution, x: Solution) -> float:
    """f0(x) - T1(x) - T2(x), where T_i is the tangent plane of ln det at the anchor.

    f1 = ln det R_r and f2 = ln det(R_e + P_s B) are linearized around ``anchor``;
    the tangent slopes come from R^{-1} contracted with the linear covariance maps.
    """
    eff = ch.effective
    rr_a = interference_cov_reader(ch, p, anchor)
    re_a = interference_cov_eve(ch, p, anchor)
    rb_a = re_a + anchor.p_cw * eff.b_mat
    rr = interference_cov_reader(ch, p, x)
    re = interference_cov_eve(ch, p, x)
    f0 = logdet(rr + x.p_cw * eff.a_mat) + logdet(re)
    d_r, d_e = _linear_parts(ch, p, x.an_cov - anchor.an_cov)
    t1 = logdet(rr_a) + real_inner(hpd_inverse(rr_a), d_r)
    t2 = logdet(rb_a) + real_inner(
        hpd_inverse(rb_a), d_e + (x.p_cw - anchor.p_cw) * eff.b_mat
    )
    return f0 - t1 - t2


def spca_gradient(
    ch: SystemChannels, p: SystemParams, anchor: Solution, x: Solution
) -> tuple[float, np.ndarray]:
    """Gradient of spca_objective by exact probing of the linear covariance maps.

    For each basis matrix E of the Hermitian space the directional derivative is
    a sum of Tr(R^{-1} L(E)) terms, with L the (linear) covariance maps. No
    closed-form gradient expression is used.
    """
    eff = ch.effective
    rr_a = interference_cov_reader(ch, p, anchor)
    rb_a = interference_cov_eve(ch, p, anchor) + anchor.p_cw * eff.b_mat
    rr = interference_cov_reader(ch, p, x)
    re = interference_cov_eve(ch, p, x)
    f_inv = hpd_inverse(rr + x.p_cw * eff.a_mat)
    re_inv = hpd_inverse(re)
    s0 = hpd_inverse(rr_a)
    s1 = hpd_inverse(rb_a)
    g_ps = real_inner(f_inv, eff.a_mat) - real_inner(s1, eff.b_mat)
    m = x.an_cov.shape[0]
    grad = np.zeros((m, m), dtype=complex)
    for e in hermitian_basis(m):
        l_r, l_e = _linear_parts(ch, p, e)
        d = (
            real_inner(f_inv, l_r)
            + real_inner(re_inv, l_e)
            - real_inner(s0, l_r)
            - real_inner(s1, l_e)
        )
        grad += d * e
    return g_ps, hermitian_part(grad)


# ---- projection ----------------------------------------------------------------


def bisection_level(v, p_total: float, tol: float = 1e-14, max_iter: int = 400) -> float:
    """Water-filling level by bisection on the nonincreasing clipped-sum function."""
    v = np.asarray(v, dtype=float).ravel()

    def excess(lam):
        return np.maximum(v - lam, 0.0).sum() - p_total

    if v.size == 0 or excess(0.0) <= 0:
        return 0.0
    lo, hi = 0.0, float(v.max())
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return hi


def projection_grid_2x2(
    p_total: float, p_cw: float, an_cov: np.ndarray, n: int = 201
) -> tuple[float, Solution, float]:
    """Brute-force nearest feasible point to (p_cw, an_cov) for a 2x2 AN covariance.

    Lambda = [[a, z], [conj(z), b]] is PSD iff a, b >= 0 and |z|^2 <= a b. The
    diagonal part and P_s run over a uniform grid with spacing h = p_total/(n-1)
    on the simplex P_s + a + b <= p_total; for each grid point the best z is the
    target entry clipped radially to the disk |z| <= sqrt(a b). Returns
    (distance, point, h).
    """
    t = hermitian_part(np.asarray(an_cov, dtype=complex))
    lin = np.linspace(0.0, p_total, n)
    ps, a, b = np.meshgrid(lin, lin, lin, indexing="ij", sparse=False)
    ok = ps + a + b <= p_total * (1 + 1e-12)
    ps, a, b = ps[ok], a[ok], b[ok]
    target = t[0, 1]
    radius = np.sqrt(a * b)
    mag = abs(target)
    scale = np.where(mag > radius, radius / mag if mag > 0 else 0.0, 1.0)
    z = target * scale
    d2 = (
        (ps - p_cw) ** 2
        + (a - t[0, 0].real) ** 2
        + (b - t[1, 1].real) ** 2
        + 2 * np.abs(z - target) ** 2
    )
    i = int(np.argmin(d2))
    lam = np.array([[a[i], z[i]], [np.conj(z[i]), b[i]]])
    h = p_total / (n - 1)
    return math.sqrt(float(d2[i])), Solution(ps[i], lam), h


def random_feasible(rng: np.random.Generator, p_total: float, m: int, rank: int | None = None) -> Solution:
    """A random point of the power-budget set, with slack drawn uniformly."""
    rank = m if rank is None else rank
    g = rng.standard_normal((m, rank)) + 1j * rng.standard_normal((m, rank))
    lam = g @ g.conj().T
    w = rng.dirichlet(np.ones(2)) * p_total * rng.uniform(0.0, 1.0)
    tr = np.trace(lam).real
    lam = lam * (w[1] / tr) if tr > 0 else lam
    return Solution(w[0], hermitian_part(lam))


def variational_gap(x_tilde: Solution, proj: Solution, y: Solution) -> float:
    """<x_tilde - proj, y - proj>; nonpositive for the Euclidean projection."""
    return (x_tilde.p_cw - proj.p_cw) * (y.p_cw - proj.p_cw) + real_inner(
        x_tilde.an_cov - proj.an_cov, y.an_cov - proj.an_cov
    )


# ---- single tag ----------------------------------------------------------------


def r_plane_search(tc: TCoordinates, t: float, n: int = 20001) -> float:
    """max |d2^H v|^2 over unit v in span{d1, d2} with |d1^H v|^2 = t, by dense phase search.

    With u the unit part of d2 orthogonal to d1, v = sqrt(t) d1 + sqrt(1-t) e^{i psi} u
    (an overall phase does not matter), so only psi is searched.
    """
    d1, d2 = tc.d1, tc.d2
    u = d2 - d1 * np.vdot(d1, d2)
    nu = np.linalg.norm(u)
    psi = np.linspace(-np.pi, np.pi, n, endpoint=False)
    c1 = np.vdot(d2, d1)
    if nu < 1e-14:
        return float(abs(c1) ** 2 * t)
    c2 = np.vdot(d2, u / nu)
    vals = np.abs(math.sqrt(t) * c1 + math.sqrt(1.0 - t) * np.exp(1j * psi) * c2) ** 2
    return float(vals.max())


def grid_single(inst: SingleTagInstance, tc: TCoordinates, n: int = 400) -> tuple[float, float, float]:
    """Best (y, t, P_s) over an n x n grid of (t, P_s) with Lambda = (P - P_s) v*(t) v*(t)^H.

    The SINRs come straight from the channel vectors and v, not from the
    (a, b, c, d) reduction. The t nodes are uniform in sqrt(t): v*(t) depends on
    sqrt(t), and optima close to t = 0 are common, where a uniform t grid is
    too coarse to resolve them.
    """
    ts = np.linspace(0.0, 1.0, n) ** 2
    ps = np.linspace(0.0, inst.total_power, n)
    vs = np.array([_v(tc, t) for t in ts])  # n x M
    dd = abs(inst.d_tp) ** 2
    hp2 = float(np.vdot(inst.h_pr, inst.h_pr).real)
    he2 = float(np.vdot(inst.h_pe, inst.h_pe).real)
    q = np.abs(vs @ inst.h_tp.conj()) ** 2  # |h_tp^H v|^2 per t
    g = inst.h_te.conj().T @ inst.h_pe
    direct = np.abs(vs @ g.conj()) ** 2 / he2 if he2 > 0 else np.zeros(n)
    an = inst.total_power - ps[None, :]
    sinr_r = ps * dd * hp2 / (inst.alpha * hp2 * q[:, None] * an + inst.sigma2_reader)
    sinr_e = ps * dd * he2 / ((he2 * q[:, None] + direct[:, None]) * an + inst.sigma2_eve)
    y = (1.0 + sinr_r) / (1.0 + sinr_e)
    i, j = np.unravel_index(int(np.argmax(y)), y.shape)
    return float(y[i, j]), float(ts[i]), float(ps[j])
