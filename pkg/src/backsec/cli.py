"""Command-line front end: ``solve``, ``sweep`` and ``validate``.

Exit codes: 0 success, 1 failed validation, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .errors import ConfigError, ContractError, NumericalError, UnsupportedConfigError
from .montecarlo import run_sweep, generate_channels
from .schemes import Scheme, run_scheme
from .validation import SUITES, run_suite

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

CSV_HEADER = (
    "scheme",
    "swept_name",
    "swept_value",
    "mean_cs_bps_hz",
    "stderr_cs",
    "trials",
    "failures",
    "mean_solve_ms",
    "seed",
)

# flag name -> config key, for flags that override the config file
_OVERRIDES = {
    "p_dbm": "total_power_dbm",
    "m": "m_tx",
    "n": "n_rx",
    "l": "l_tag",
    "k": "k_eve",
    "alpha": "alpha",
    "beta": "beta",
    "seed": "seed",
    "trials": "trials",
}


def _base_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    changes = {
        key: getattr(args, flag)
        for flag, key in _OVERRIDES.items()
        if getattr(args, flag, None) is not None
    }
    return cfg.replace(**changes).validate()


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def cmd_solve(args) -> int:
    cfg = _base_config(args)
    p = cfg.system_params()
    ch = generate_channels(p, cfg.geometry(), cfg.seed, args.trial)
    res = run_scheme(args.scheme, ch, p, cfg.solver_config(), t_grid_points=cfg.t_grid_points)
    sol = res.solution
    print(f"scheme: {res.scheme.value}")
    print(f"secrecy_rate_bps_hz: {res.secrecy_rate:.10g}")
    print(f"p_cw_w: {sol.p_cw:.10g}")
    print(f"trace_an_w: {sol.trace_an:.10g}")
    print(f"iterations: {res.iterations}")
    if args.dump_solution:
        _write_matrix(Path(args.dump_solution), sol.an_cov)
    return EXIT_OK


def _write_matrix(path: Path, mat: np.ndarray) -> None:
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in mat:
                cells = []
                for z in row:
                    cells += [repr(float(z.real)), repr(float(z.imag))]
                w.writerow(cells)
    except OSError as e:
        raise ConfigError(f"cannot write {path}: {e.strerror}") from None


def sweep_csv(result, with_timing: bool = False) -> str:
    """CSV text; timing is wall-clock and therefore written as nan unless requested."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    spec = result.spec
    for pt in result.points:
        w.writerow(
            [
                pt.scheme,
                spec.swept_name,
                _fmt(pt.swept_value),
                _fmt(pt.mean_cs),
                _fmt(pt.stderr_cs),
                pt.trials,
                pt.failures,
                _fmt(pt.mean_solve_ms) if with_timing else "nan",
                spec.seed,
            ]
        )
    return buf.getvalue()


def cmd_sweep(args) -> int:
    cfg = _base_config(args)
    if args.swept_name:
        cfg = cfg.replace(swept_name=args.swept_name)
    if args.values:
        cfg = cfg.replace(swept_values=tuple(float(v) for v in args.values.split(",")))
    if args.schemes:
        cfg = cfg.replace(schemes=tuple(s.strip() for s in args.schemes.split(",")))
    try:
        spec = cfg.sweep_spec()
    except (ContractError, UnsupportedConfigError, ValueError) as e:
        raise ConfigError(str(e)) from None
    out = Path(args.output)
    if not out.parent.exists():
        raise ConfigError(f"cannot write {out}: directory does not exist")
    result = run_sweep(spec, workers=args.threads)
    text = sweep_csv(result, with_timing=args.timing)
    try:
        out.write_text(text)
    except OSError as e:
        raise ConfigError(f"cannot write {out}: {e.strerror}") from None
    print(f"wrote {len(result.points)} rows to {out} (config hash {result.config_hash})")
    if result.degraded:
        print("warning: more than 1% of solves failed at some point", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    ok = True
    for name in suites:
        for check in run_suite(name, seed=args.seed if args.seed is not None else 0):
            print(f"[{name}] {check.line()}")
            ok &= check.passed
    return EXIT_OK if ok else EXIT_FAILED


def _add_common(sp) -> None:
    sp.add_argument("--config", help="flat key = value config file")
    sp.add_argument("--seed", type=int, help="master seed (default 0)")
    sp.add_argument("--p-dbm", dest="p_dbm", type=float, help="total transmit power in dBm")
    sp.add_argument("--m", type=int, help="reader transmit antennas")
    sp.add_argument("--n", type=int, help="reader receive antennas")
    sp.add_argument("--l", type=int, help="tag antennas")
    sp.add_argument("--k", type=int, help="eavesdropper antennas")
    sp.add_argument("--alpha", type=float, help="backscattered-AN coefficient")
    sp.add_argument("--beta", type=float, help="residual self-interference coefficient")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="backsec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve one random channel realization")
    _add_common(sp)
    sp.add_argument("--scheme", default="general", choices=[s.value for s in Scheme])
    sp.add_argument("--trial", type=int, default=0, help="trial index within the seed")
    sp.add_argument("--dump-solution", help="write the AN covariance as re,im CSV")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="Monte-Carlo sweep to CSV")
    _add_common(sp)
    sp.add_argument("--output", "-o", required=True, help="CSV output path")
    sp.add_argument("--swept-name", help="total_power_dbm, alpha, beta, m_tx, k_eve or d_pe")
    sp.add_argument("--values", help="comma-separated swept values")
    sp.add_argument("--schemes", help="comma-separated scheme names")
    sp.add_argument("--trials", type=int, help="trials per point")
    sp.add_argument("--threads", type=int, default=1, help="worker processes")
    sp.add_argument("--timing", action="store_true", help="fill mean_solve_ms (not reproducible)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate", help="run oracle property checks")
    sp.add_argument("--suite", default="all", choices=("all",) + SUITES)
    sp.add_argument("--seed", type=int, help="seed for the random cases (default 0)")
    sp.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UnsupportedConfigError, ContractError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
