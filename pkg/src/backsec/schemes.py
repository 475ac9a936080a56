"""Named transmit schemes, so sweeps and the CLI can dispatch by string."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedConfigError
from .model import Solution, SystemChannels, SystemParams, rates
from .nullspace import NullspaceKind, solve_srm_nullspace
from .single_tag import SingleTagInstance, solve_single, solve_single_nullspace
from .solver import SolverConfig, SolverReport, solve_srm


class Scheme(str, enum.Enum):
    GENERAL = "general"
    NBS_AN = "nbs_an"
    NSI_AN = "nsi_an"
    NO_AN = "no_an"
    SINGLE_OPTIMAL = "single_optimal"
    SINGLE_NULLSPACE = "single_nullspace"


MULTI_ANTENNA_SCHEMES = (Scheme.GENERAL, Scheme.NBS_AN, Scheme.NSI_AN, Scheme.NO_AN)
SINGLE_TAG_SCHEMES = (Scheme.SINGLE_OPTIMAL, Scheme.SINGLE_NULLSPACE)


@dataclass
class SchemeResult:
    scheme: Scheme
    solution: Solution
    secrecy_rate: float
    iterations: int = 0
    report: SolverReport | None = None
    extra: dict = field(default_factory=dict)


def check_compatible(scheme: Scheme | str, p: SystemParams) -> None:
    """Raise UnsupportedConfigError when ``scheme`` cannot run with these antenna counts."""
    scheme = Scheme(scheme)
    if scheme is Scheme.NBS_AN and not p.m_tx > p.l_tag:
        raise UnsupportedConfigError(
            f"nbs_an requires M > L (transmit antennas exceed tag antennas); got M={p.m_tx}, L={p.l_tag}"
        )
    if scheme is Scheme.NSI_AN and not p.m_tx > p.n_rx:
        raise UnsupportedConfigError(
            f"nsi_an requires M > N (transmit antennas exceed receive antennas); got M={p.m_tx}, N={p.n_rx}"
        )
    if scheme in SINGLE_TAG_SCHEMES and p.l_tag != 1:
        raise UnsupportedConfigError(f"{scheme.value} requires a single-antenna tag (L=1); got L={p.l_tag}")


def _from_report(scheme, report: SolverReport) -> SchemeResult:
    return SchemeResult(
        scheme, report.final, report.secrecy_rate, len(report.iterates) - 1, report
    )


def solve_general(
    ch: SystemChannels,
    p: SystemParams,
    cfg: SolverConfig | None = None,
    warm_starts: dict[str, Solution] | None = None,
    compute_nullspace: bool = True,
) -> SolverReport:
    """General AN design from the best available starting point.

    Candidates are the no-AN point, the nullspace solutions that exist for these
    dimensions (computed here unless ``compute_nullspace`` is False or the caller
    passes them as ``nbs_an`` / ``nsi_an`` in ``warm_starts``), and any other
    feasible caller-supplied points. The iteration runs from the best-scoring
    candidate and, if that is not the no-AN point, also from no-AN; the better
    final point is returned. The second run matters when the warm start is a
    zero-rate stationary point (all power on AN) that ascent cannot leave.
    """
    cfg = cfg or SolverConfig()
    warm_starts = dict(warm_starts or {})
    candidates = {"no_an": Solution.no_an(p.total_power, p.m_tx)}
    if compute_nullspace:
        for kind, name in (
            (NullspaceKind.NO_BACKSCATTER, "nbs_an"),
            (NullspaceKind.NO_SELF_INTERFERENCE, "nsi_an"),
        ):
            if name in warm_starts:
                continue
            try:
                candidates[name] = solve_srm_nullspace(ch, p, kind, cfg).final
            except UnsupportedConfigError:
                pass
    for name, sol in warm_starts.items():
        if sol.an_cov.shape == (p.m_tx, p.m_tx) and sol.is_feasible(p.total_power):
            candidates[name] = sol
    scored = {name: rates(ch, p, s).signed for name, s in candidates.items()}
    best = max(scored, key=lambda k: (scored[k], k == "no_an"))
    report = solve_srm(ch, p, candidates[best], cfg)
    report.warm_start = best
    finals = {best: report.iterates[-1].signed_rate}
    if best != "no_an":
        cold = solve_srm(ch, p, candidates["no_an"], cfg)
        finals["no_an"] = cold.iterates[-1].signed_rate
        if finals["no_an"] > finals[best]:
            report = cold
    report.notes["warm_start_rates"] = scored
    report.notes["final_rates"] = finals
    return report


def run_scheme(
    scheme: Scheme | str,
    ch: SystemChannels,
    p: SystemParams,
    cfg: SolverConfig | None = None,
    warm_starts: dict[str, Solution] | None = None,
    t_grid_points: int = 2001,
) -> SchemeResult:
    scheme = Scheme(scheme)
    check_compatible(scheme, p)
    cfg = cfg or SolverConfig()
    if scheme is Scheme.NO_AN:
        sol = Solution.no_an(p.total_power, p.m_tx)
        return SchemeResult(scheme, sol, rates(ch, p, sol).secrecy)
    if scheme is Scheme.NBS_AN:
        return _from_report(scheme, solve_srm_nullspace(ch, p, NullspaceKind.NO_BACKSCATTER, cfg))
    if scheme is Scheme.NSI_AN:
        return _from_report(scheme, solve_srm_nullspace(ch, p, NullspaceKind.NO_SELF_INTERFERENCE, cfg))
    if scheme is Scheme.GENERAL:
        report = solve_general(ch, p, cfg, warm_starts)
        res = _from_report(scheme, report)
        res.extra["warm_start"] = report.warm_start
        return res
    inst = SingleTagInstance.from_channels(ch, p)
    if scheme is Scheme.SINGLE_OPTIMAL:
        out = solve_single(inst, grid_points=t_grid_points)
    else:
        out = solve_single_nullspace(inst)
    return SchemeResult(scheme, out.solution, out.secrecy_rate, extra={"t_star": out.t_star})
