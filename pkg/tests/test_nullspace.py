import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st

from backsec.errors import UnsupportedConfigError
from backsec.model import Solution, SystemChannels, rates
from backsec.nullspace import NullspaceKind, nullspace_basis, solve_srm_nullspace
from backsec.schemes import solve_general

from conftest import default_channels, random_psd


@given(st.integers(0, 10_000), st.sampled_from(list(NullspaceKind)))
def test_basis_orthonormal_and_annihilating(seed, kind):
    ch, _ = default_channels(seed)
    basis = nullspace_basis(ch, kind)
    v = basis.v_basis
    assert basis.rank == 1
    assert np.allclose(v.conj().T @ v, np.eye(1), atol=1e-10)
    kill = ch.h_reader_to_tag if kind is NullspaceKind.NO_BACKSCATTER else ch.h_self_interference
    assert np.linalg.norm(kill @ v) <= 1e-8 * np.linalg.norm(kill)


def test_constructed_nullspace_contains_last_axis():
    rng = np.random.default_rng(0)
    ch, _ = default_channels(0)
    h = rng.standard_normal((2, 3)) + 0j
    h[:, -1] = 0.0
    ch = dataclasses.replace(ch, h_reader_to_tag=h)
    v = nullspace_basis(ch, "no_backscatter").v_basis[:, 0]
    assert abs(abs(v[-1]) - 1.0) < 1e-12


def test_dimension_precondition():
    ch, _ = default_channels(0, m_tx=2)
    with pytest.raises(UnsupportedConfigError, match="M > L"):
        nullspace_basis(ch, NullspaceKind.NO_BACKSCATTER)
    with pytest.raises(UnsupportedConfigError, match="M > N"):
        nullspace_basis(ch, NullspaceKind.NO_SELF_INTERFERENCE)


@given(st.integers(0, 10_000))
def test_trace_isometry(seed):
    ch, _ = default_channels(seed, m_tx=4)
    basis = nullspace_basis(ch, "no_backscatter")
    w = random_psd(np.random.default_rng(seed), basis.rank)
    assert np.trace(basis.lift(w)).real == pytest.approx(np.trace(w).real, abs=1e-10)


@given(st.integers(0, 10_000))
def test_nbs_rate_independent_of_alpha(seed):
    ch, p = default_channels(seed)
    rep = solve_srm_nullspace(ch, p, "no_backscatter")
    assert rep.final.is_feasible(p.total_power)
    vals = [rates(ch, dataclasses.replace(p, alpha=a), rep.final).signed for a in (0.0, 1.0)]
    assert vals[0] == pytest.approx(vals[1], abs=1e-9)
    assert rep.notes["nullspace_kind"] == "no_backscatter"
    assert rep.reduced.shape == (1, 1)


@given(st.integers(0, 10_000))
def test_nsi_rate_independent_of_beta(seed):
    ch, p = default_channels(seed)
    rep = solve_srm_nullspace(ch, p, "no_self_interference")
    vals = [rates(ch, dataclasses.replace(p, beta=b), rep.final).signed for b in (0.0, 1.0)]
    assert vals[0] == pytest.approx(vals[1], abs=1e-9)


@given(st.integers(0, 10_000))
def test_general_dominates_nullspace(seed):
    ch, p = default_channels(seed)
    nbs = solve_srm_nullspace(ch, p, "no_backscatter")
    nsi = solve_srm_nullspace(ch, p, "no_self_interference")
    gen = solve_general(ch, p, warm_starts={"nbs_an": nbs.final, "nsi_an": nsi.final})
    assert gen.secrecy_rate >= max(nbs.secrecy_rate, nsi.secrecy_rate) - 1e-9
    assert gen.warm_start in ("no_an", "nbs_an", "nsi_an")
