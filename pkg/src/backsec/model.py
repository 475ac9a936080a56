"""Channel/system data model and rate evaluation for the MIMO backscatter wiretap link.

Conventions
-----------
Powers are linear watts everywhere in the library. ``h_reader_to_tag`` is the
L x M matrix that multiplies the reader's transmit vector on its way to the tag
(the conjugate transpose of the usual "tag-to-reader-transmitter" matrix).
Rates are returned in bits/s/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ContractError, NumericalError

LN2 = math.log(2.0)


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w) + 30.0


def hermitian_part(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.conj().T)


def logdet(x: np.ndarray) -> float:
    """Natural-log determinant of a Hermitian positive definite matrix.

    The input is re-symmetrized before the Cholesky factorization.
    """
    xs = hermitian_part(x)
    try:
        chol = np.linalg.cholesky(xs)
    except np.linalg.LinAlgError:
        raise NumericalError(
            f"matrix is not positive definite (cond={np.linalg.cond(xs):.3e})"
        ) from None
    return 2.0 * float(np.sum(np.log(np.diagonal(chol).real)))


def hpd_inverse(x: np.ndarray) -> np.ndarray:
    """Inverse of a Hermitian PD matrix, returned Hermitian."""
    xs = hermitian_part(x)
    try:
        chol = np.linalg.cholesky(xs)
    except np.linalg.LinAlgError:
        raise NumericalError(
            f"matrix is not positive definite (cond={np.linalg.cond(xs):.3e})"
        ) from None
    linv = np.linalg.inv(chol)
    return linv.conj().T @ linv


def real_inner(x: np.ndarray, y: np.ndarray) -> float:
    """Real trace pairing Re Tr(x^H y)."""
    return float(np.vdot(x, y).real)


@dataclass(frozen=True)
class SystemParams:
    m_tx: int
    n_rx: int
    l_tag: int
    k_eve: int
    total_power: float
    sigma2_reader: float
    sigma2_eve: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("m_tx", "n_rx", "l_tag", "k_eve"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ContractError(f"{name} must be a positive integer, got {v!r}")
        if not (self.total_power >= 0 and math.isfinite(self.total_power)):
            raise ContractError(f"total_power must be finite and >= 0, got {self.total_power}")
        if not (self.sigma2_reader > 0 and self.sigma2_eve > 0):
            raise ContractError("noise variances must be strictly positive")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ContractError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def reference_defaults(cls, **overrides) -> "SystemParams":
        """Default simulation setting: M=3, N=2, L=2, K=3, P=10 dBm, noise -20 dBm."""
        kw = dict(
            m_tx=3,
            n_rx=2,
            l_tag=2,
            k_eve=3,
            total_power=dbm_to_watt(10.0),
            sigma2_reader=dbm_to_watt(-20.0),
            sigma2_eve=dbm_to_watt(-20.0),
            alpha=0.6,
            beta=0.3,
        )
        kw.update(overrides)
        return cls(**kw)


@dataclass(frozen=True)
class EffectiveMatrices:
    d_tp: np.ndarray  # L x L diagonal
    a_mat: np.ndarray  # N x N
    b_mat: np.ndarray  # K x K


@dataclass(frozen=True)
class SystemChannels:
    h_reader_to_tag: np.ndarray  # L x M
    h_tag_to_reader: np.ndarray  # N x L
    h_self_interference: np.ndarray  # N x M
    h_tag_to_eve: np.ndarray  # K x L
    h_reader_to_eve: np.ndarray  # K x M

    def __post_init__(self):
        for name in (
            "h_reader_to_tag",
            "h_tag_to_reader",
            "h_self_interference",
            "h_tag_to_eve",
            "h_reader_to_eve",
        ):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.ndim != 2:
                raise ContractError(f"{name} must be a matrix, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ContractError(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        l, m = self.h_reader_to_tag.shape
        n = self.h_tag_to_reader.shape[0]
        k = self.h_tag_to_eve.shape[0]
        expected = {
            "h_tag_to_reader": (n, l),
            "h_self_interference": (n, m),
            "h_tag_to_eve": (k, l),
            "h_reader_to_eve": (k, m),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ContractError(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}"
                )

    @property
    def dims(self) -> tuple[int, int, int, int]:
        """(M, N, L, K)."""
        l, m = self.h_reader_to_tag.shape
        return m, self.h_tag_to_reader.shape[0], l, self.h_tag_to_eve.shape[0]

    def check_params(self, p: SystemParams) -> None:
        if self.dims != (p.m_tx, p.n_rx, p.l_tag, p.k_eve):
            raise ContractError(
                f"channel dims (M,N,L,K)={self.dims} do not match params "
                f"{(p.m_tx, p.n_rx, p.l_tag, p.k_eve)}"
            )

    @cached_property
    def effective(self) -> EffectiveMatrices:
        m = self.dims[0]
        d = self.h_reader_to_tag.sum(axis=1) / math.sqrt(m)
        hd_r = self.h_tag_to_reader * d
        hd_e = self.h_tag_to_eve * d
        return EffectiveMatrices(
            d_tp=np.diag(d),
            a_mat=hermitian_part(hd_r @ hd_r.conj().T),
            b_mat=hermitian_part(hd_e @ hd_e.conj().T),
        )


@dataclass(frozen=True)
class Solution:
    p_cw: float
    an_cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "p_cw", float(self.p_cw))
        object.__setattr__(self, "an_cov", np.asarray(self.an_cov, dtype=complex))

    @classmethod
    def no_an(cls, total_power: float, m: int) -> "Solution":
        return cls(total_power, np.zeros((m, m), dtype=complex))

    @property
    def trace_an(self) -> float:
        return float(np.trace(self.an_cov).real)

    def violations(self, total_power: float) -> list[str]:
        """Human-readable list of broken feasibility invariants (empty when feasible)."""
        out = []
        lam = self.an_cov
        tr = max(self.trace_an, 0.0)
        if self.p_cw < 0:
            out.append(f"p_cw={self.p_cw} < 0")
        scale = max(np.abs(lam).max(initial=0.0), 1e-300)
        if np.abs(lam - lam.conj().T).max(initial=0.0) > 1e-12 * scale:
            out.append("an_cov not Hermitian")
        min_eig = float(np.linalg.eigvalsh(hermitian_part(lam))[0]) if lam.size else 0.0
        if min_eig < -1e-10 * max(tr, 1e-300):
            out.append(f"an_cov min eigenvalue {min_eig:.3e}")
        if self.p_cw + self.trace_an > total_power + 1e-9:
            out.append(f"power {self.p_cw + self.trace_an:.6e} exceeds {total_power:.6e}")
        return out

    def is_feasible(self, total_power: float) -> bool:
        return not self.violations(total_power)


def backscatter_diag_cov(h: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Diagonal part of ``h @ lam @ h^H`` as a real diagonal matrix.

    This is the closed form of the expected backscattered-AN covariance at the tag.
    """
    h = np.asarray(h)
    lam = np.asarray(lam)
    if h.ndim != 2 or lam.shape != (h.shape[1], h.shape[1]):
        raise ContractError(f"shape mismatch: h {h.shape}, lambda {lam.shape}")
    diag = np.einsum("ij,jk,ik->i", h, lam, h.conj()).real
    return np.diag(diag)


def _backscatter_diag(h: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return np.einsum("ij,jk,ik->i", h, lam, h.conj()).real


def interference_cov_reader(ch: SystemChannels, p: SystemParams, s: Solution) -> np.ndarray:
    lam = s.an_cov
    _check_lambda(ch, lam)
    hpr, htr = ch.h_tag_to_reader, ch.h_self_interference
    q = _backscatter_diag(ch.h_reader_to_tag, lam)
    r = p.alpha * (hpr * q) @ hpr.conj().T + p.beta * htr @ lam @ htr.conj().T
    r = hermitian_part(r)
    r[np.diag_indices_from(r)] += p.sigma2_reader
    return r


def interference_cov_eve(ch: SystemChannels, p: SystemParams, s: Solution) -> np.ndarray:
    lam = s.an_cov
    _check_lambda(ch, lam)
    hpe, hte = ch.h_tag_to_eve, ch.h_reader_to_eve
    q = _backscatter_diag(ch.h_reader_to_tag, lam)
    r = (hpe * q) @ hpe.conj().T + hte @ lam @ hte.conj().T
    r = hermitian_part(r)
    r[np.diag_indices_from(r)] += p.sigma2_eve
    return r


def _check_lambda(ch: SystemChannels, lam: np.ndarray) -> None:
    m = ch.dims[0]
    if lam.shape != (m, m):
        raise ContractError(f"an_cov has shape {lam.shape}, expected {(m, m)}")


@dataclass(frozen=True)
class Rates:
    reader: float
    eve: float

    @property
    def signed(self) -> float:
        return self.reader - self.eve

    @property
    def secrecy(self) -> float:
        return max(0.0, self.reader - self.eve)


def rates(ch: SystemChannels, p: SystemParams, s: Solution) -> Rates:
    """Reader and eavesdropper rates (bits/s/Hz) under Gaussian-interference treatment."""
    eff = ch.effective
    rr = interference_cov_reader(ch, p, s)
    re = interference_cov_eve(ch, p, s)
    c_r = (logdet(rr + s.p_cw * eff.a_mat) - logdet(rr)) / LN2
    c_e = (logdet(re + s.p_cw * eff.b_mat) - logdet(re)) / LN2
    return Rates(c_r, c_e)


def secrecy_rate(ch: SystemChannels, p: SystemParams, s: Solution) -> float:
    return rates(ch, p, s).secrecy


def signed_secrecy_rate(ch: SystemChannels, p: SystemParams, s: Solution) -> float:
    return rates(ch, p, s).signed
