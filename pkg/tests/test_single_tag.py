import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from backsec import oracles
from backsec.errors import NumericalError
from backsec.model import rates
from backsec.single_tag import (
    DegenerateAlignment,
    SingleTagInstance,
    coefficients,
    mrc_rates,
    objective,
    ps_candidates,
    r_of_t,
    solve_single,
    solve_single_nullspace,
    t_coordinates,
    v_of_t,
    y_value,
)
from backsec.validation import single_instances, stationarity_error

INSTANCES = single_instances(seed=3, count=40)
idx = st.integers(0, len(INSTANCES) - 1)


@given(idx)
def test_t_coordinates_invariants(i):
    tc = t_coordinates(INSTANCES[i])
    assert np.linalg.norm(tc.d1) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.norm(tc.d2) == pytest.approx(1.0, abs=1e-12)
    assert 0.0 <= tc.kappa <= 1.0
    assert -math.pi < tc.phi <= math.pi


@given(idx)
def test_r_endpoints(i):
    tc = t_coordinates(INSTANCES[i])
    assert r_of_t(tc, 0.0) == pytest.approx(1 - tc.kappa**2, abs=1e-12)
    assert r_of_t(tc, 1.0) == pytest.approx(tc.kappa**2, abs=1e-12)


@given(idx, st.floats(0.0, 1.0))
def test_r_matches_plane_search(i, t):
    tc = t_coordinates(INSTANCES[i])
    assert float(r_of_t(tc, t)) == pytest.approx(oracles.r_plane_search(tc, t), abs=1e-6)


@given(idx, st.floats(0.0, 1.0))
def test_v_postconditions(i, t):
    tc = t_coordinates(INSTANCES[i])
    v = v_of_t(tc, t)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-9)
    assert abs(np.vdot(tc.d1, v)) ** 2 == pytest.approx(t, abs=1e-9)
    assert abs(np.vdot(tc.d2, v)) ** 2 == pytest.approx(float(r_of_t(tc, t)), abs=1e-9)


def test_v_endpoints():
    tc = t_coordinates(INSTANCES[0])
    v1 = v_of_t(tc, 1.0)
    assert np.allclose(v1, -np.exp(1j * (np.pi - tc.phi)) * tc.d1)
    assert abs(np.vdot(tc.d1, v_of_t(tc, 0.0))) ** 2 == pytest.approx(0.0, abs=1e-9)


@given(idx, st.floats(0.0, 1.0))
def test_candidates_are_stationary(i, t):
    inst = INSTANCES[i]
    tc = t_coordinates(inst)
    cand = ps_candidates(inst, tc, t)
    assert inst.total_power in cand
    assert np.all((cand >= 0) & (cand <= inst.total_power))
    assert stationarity_error(inst, tc, t) <= 1e-6


@given(idx, st.floats(0.0, 1.0))
def test_candidate_set_beats_ps_grid(i, t):
    inst = INSTANCES[i]
    tc = t_coordinates(inst)
    co = coefficients(inst, tc, t)
    best = max(y_value(co, ps) for ps in ps_candidates(inst, tc, t))
    grid = y_value(co, np.linspace(0, inst.total_power, 2001))
    assert best >= grid.max() * (1 - 1e-12)


def test_t_zero_candidates_match_derivative_sign_changes():
    inst = INSTANCES[5]
    tc = t_coordinates(inst)
    co = coefficients(inst, tc, 0.0)
    assert co.b == 0.0
    ps = np.linspace(0, inst.total_power, 10_001)
    dy = np.diff(y_value(co, ps))
    sign_changes = ps[1:-1][np.diff(np.sign(dy)) != 0]
    cand = ps_candidates(inst, tc, 0.0)
    for s in sign_changes:
        assert np.min(np.abs(cand - s)) <= 2 * inst.total_power / 10_000


def test_identical_reader_and_eve_parameters_fall_back_to_full_power():
    # with h_pe = h_pr, alpha = 1, no direct AN at eve and equal noise, a=c and b=d
    base = INSTANCES[0]
    k = base.h_pr.shape[0]
    inst = dataclasses.replace(
        base, h_pe=base.h_pr.copy(), h_te=np.zeros((k, base.m), complex), alpha=1.0,
        sigma2_eve=base.sigma2_reader,
    )
    tc = t_coordinates(inst)
    co = coefficients(inst, tc, 0.4)
    assert co.a == pytest.approx(co.c) and co.b == pytest.approx(co.d)
    assert list(ps_candidates(inst, tc, 0.4)) == [inst.total_power]


@given(idx)
def test_solve_single_rank_one_full_power(i):
    inst = INSTANCES[i]
    res = solve_single(inst)
    lam = res.solution.an_cov
    assert np.linalg.matrix_rank(lam, tol=1e-12 * max(np.abs(lam).max(), 1e-300)) <= 1
    assert res.solution.p_cw + np.trace(lam).real == pytest.approx(inst.total_power, abs=1e-12)
    assert res.secrecy_rate == pytest.approx(max(0.0, math.log2(res.objective)))


@given(idx)
def test_objective_matches_direct_sinr(i):
    inst = INSTANCES[i]
    res = solve_single(inst)
    c_r, c_e = mrc_rates(inst, res.solution.p_cw, res.solution.an_cov)
    assert math.log2(res.objective) == pytest.approx(c_r - c_e, abs=1e-10)


@given(idx)
def test_reader_rate_matches_general_model(i):
    # the reader side of the general model reduces to the same SINR when L=1 and beta=0
    inst = INSTANCES[i]
    res = solve_single(inst)
    ch, p = inst.to_channels(), inst.params()
    assert rates(ch, p, res.solution).reader == pytest.approx(
        mrc_rates(inst, res.solution.p_cw, res.solution.an_cov)[0], rel=1e-10
    )


@given(idx)
def test_single_matches_grid_oracle(i):
    inst = INSTANCES[i]
    y_grid = oracles.grid_single(inst, t_coordinates(inst))[0]
    assert abs(solve_single(inst).objective - y_grid) <= 1e-3 * y_grid


@given(idx)
def test_nullspace_never_beats_optimal(i):
    inst = INSTANCES[i]
    null = solve_single_nullspace(inst)
    assert null.objective <= solve_single(inst).objective + 1e-9
    assert null.t_star == 0.0
    ps = np.linspace(0, inst.total_power, 100_001)
    grid = objective(inst, t_coordinates(inst), ps, 0.0).max()
    assert null.objective == pytest.approx(grid, rel=1e-6)


def test_zero_power():
    inst = dataclasses.replace(INSTANCES[0], total_power=0.0)
    res = solve_single(inst)
    assert res.solution.p_cw == 0.0 and res.secrecy_rate == 0.0


def test_silent_eavesdropper_uses_full_cw_power():
    k = INSTANCES[0].h_pe.shape[0]
    inst = dataclasses.replace(INSTANCES[0], h_pe=np.zeros(k, complex))
    res = solve_single(inst)
    assert res.solution.p_cw == pytest.approx(inst.total_power)
    assert np.trace(res.solution.an_cov).real == pytest.approx(0.0, abs=1e-15)
    c_r, c_e = mrc_rates(inst, inst.total_power, np.zeros((inst.m, inst.m)))
    assert c_e == 0.0 and res.secrecy_rate == pytest.approx(c_r)


def test_aligned_directions_raise_then_fall_back():
    base = INSTANCES[0]
    # make H_te^H h_pe parallel to h_tp
    g = base.h_tp / np.linalg.norm(base.h_tp)
    h_te = np.outer(base.h_pe, g.conj()) / np.vdot(base.h_pe, base.h_pe).real
    inst = dataclasses.replace(base, h_te=h_te)
    tc = t_coordinates(inst)
    assert tc.aligned
    with pytest.raises(DegenerateAlignment):
        r_of_t(tc, 0.5)
    with pytest.raises(NumericalError):
        v_of_t(tc, 0.5)
    res = solve_single(inst)
    assert res.solution.is_feasible(inst.total_power)
    assert solve_single_nullspace(inst).objective <= res.objective + 1e-12


def test_from_channels_round_trip():
    inst = INSTANCES[2]
    back = SingleTagInstance.from_channels(inst.to_channels(), inst.params())
    assert np.allclose(back.h_tp, inst.h_tp) and back.d_tp == pytest.approx(inst.d_tp)
