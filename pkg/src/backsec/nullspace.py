"""Nullspace artificial-noise designs.

NBS-AN keeps the AN out of the reader-to-tag channel, so no AN is backscattered.
NSI-AN keeps it out of the self-interference channel. Both reduce the design to
an r x r covariance W with Lambda = V W V^H.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedConfigError
from .model import Solution, SystemChannels, SystemParams
from .solver import SolverConfig, SolverReport, solve_srm_reduced


class NullspaceKind(str, enum.Enum):
    NO_BACKSCATTER = "no_backscatter"
    NO_SELF_INTERFERENCE = "no_self_interference"


@dataclass(frozen=True)
class NullspaceBasis:
    v_basis: np.ndarray  # M x r, orthonormal columns
    kind: NullspaceKind

    @property
    def rank(self) -> int:
        return self.v_basis.shape[1]

    def lift(self, w: np.ndarray) -> np.ndarray:
        v = self.v_basis
        return v @ w @ v.conj().T


def _killed_channel(ch: SystemChannels, kind: NullspaceKind) -> np.ndarray:
    if kind is NullspaceKind.NO_BACKSCATTER:
        return ch.h_reader_to_tag
    return ch.h_self_interference


def nullspace_basis(ch: SystemChannels, kind: NullspaceKind | str) -> NullspaceBasis:
    """Trailing right singular vectors of the channel the AN must avoid."""
    kind = NullspaceKind(kind)
    h = _killed_channel(ch, kind)
    rows, m = h.shape
    if m <= rows:
        label = "M > L" if kind is NullspaceKind.NO_BACKSCATTER else "M > N"
        raise UnsupportedConfigError(
            f"{kind.value} nullspace AN requires {label}; got M={m}, "
            f"{'L' if kind is NullspaceKind.NO_BACKSCATTER else 'N'}={rows}"
        )
    _, _, vh = np.linalg.svd(h)
    v = vh[rows:].conj().T
    residual = np.linalg.norm(h @ v)
    if residual > 1e-8 * max(np.linalg.norm(h), 1e-300):
        raise UnsupportedConfigError(
            f"channel is rank deficient; nullspace residual {residual:.3e} too large"
        )
    return NullspaceBasis(v, kind)


def solve_srm_nullspace(
    ch: SystemChannels,
    p: SystemParams,
    kind: NullspaceKind | str,
    cfg: SolverConfig | None = None,
    x_init: Solution | None = None,
) -> SolverReport:
    """Run the secrecy-rate iteration over (P_s, W); ``report.reduced`` holds W."""
    basis = nullspace_basis(ch, kind)
    report = solve_srm_reduced(ch, p, basis.v_basis, x_init=x_init, cfg=cfg)
    report.notes["nullspace_kind"] = basis.kind.value
    report.notes["basis"] = basis.v_basis
    return report
