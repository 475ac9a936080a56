#!/usr/bin/env python3
"""Monte-Carlo secrecy-rate experiments written to CSV.

    python3 scripts/run_experiment.py power_multi --trials 200 -o out/power_multi.csv
    python3 scripts/run_experiment.py all --trials 50 --out-dir out/

Experiments:
    power_multi   C_s vs P (dBm), multi-antenna tag, alpha=0.6, beta=0.3
    power_single  C_s vs P (dBm), single-antenna tag, alpha=0.6, beta=0
    alpha         C_s vs alpha, beta=0.3
    beta          C_s vs beta, alpha=0.6
    m_tx          C_s vs reader transmit antennas M
    k_eve         C_s vs eavesdropper antennas K
    d_pe          C_s vs tag-eve distance, reader, tag and eve on a line, d_tp = 2 m
    d_pe_dtp2.5   the same with d_tp = 2.5 m
    timing        mean solve time per scheme vs P (not reproducible across machines)
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from backsec import GeometryParams, SystemParams, SweepSpec, run_sweep
from backsec.cli import sweep_csv

MULTI = ("general", "nsi_an", "nbs_an", "no_an")
SINGLE = ("single_optimal", "single_nullspace")
POWERS = (-3.0, 1.0, 5.0, 9.0, 13.0)


def _spec(name, values, schemes, trials, seed, **params):
    p = SystemParams.reference_defaults(**params)
    return SweepSpec(params=p, swept_name=name, swept_values=values, trials=trials, schemes=schemes, seed=seed)


def power_multi(trials, seed):
    return [_spec("total_power_dbm", POWERS, MULTI, trials, seed)]


def power_single(trials, seed):
    return [_spec("total_power_dbm", POWERS, SINGLE, trials, seed, l_tag=1, beta=0.0)]


def alpha(trials, seed):
    return [_spec("alpha", (0.0, 0.2, 0.4, 0.6, 0.8, 1.0), MULTI, trials, seed)]


def beta(trials, seed):
    return [_spec("beta", (0.0, 0.2, 0.4, 0.6, 0.8, 1.0), MULTI, trials, seed)]


def m_tx(trials, seed):
    # both nullspace designs need M > max(L, N)
    return [_spec("m_tx", (3, 4, 5, 6, 7), MULTI, trials, seed)]


def k_eve(trials, seed):
    return [_spec("k_eve", (1, 2, 3, 4, 5), MULTI, trials, seed)]


def _d_pe(d_tp):
    def build(trials, seed):
        # collinear layout: the reader-eve distance grows with d_pe, so each value gets its own geometry
        specs = []
        for v in (1.0, 2.0, 3.0, 4.0, 5.0, 6.0):
            base = _spec("d_pe", (v,), MULTI, trials, seed)
            specs.append(dataclasses.replace(base, geometry=GeometryParams(d_tp=d_tp, d_te=d_tp + v)))
        return specs

    return build


EXPERIMENTS = {
    "power_multi": power_multi,
    "power_single": power_single,
    "alpha": alpha,
    "beta": beta,
    "m_tx": m_tx,
    "k_eve": k_eve,
    "d_pe": _d_pe(2.0),
    "d_pe_dtp2.5": _d_pe(2.5),
}


def run(name, trials, seed, workers, timing=False) -> str:
    parts = []
    for spec in EXPERIMENTS[name](trials, seed):
        text = sweep_csv(run_sweep(spec, workers=workers), with_timing=timing)
        parts.append(text if not parts else text.split("\n", 1)[1])
    return "".join(parts)


def timing_table(trials, seed, workers) -> str:
    multi = run("power_multi", trials, seed, workers, timing=True)
    single = run("power_single", trials, seed, workers, timing=True)
    return multi + single.split("\n", 1)[1]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("experiment", choices=sorted(EXPERIMENTS) + ["timing", "all"])
    ap.add_argument("--trials", type=int, default=1000, help="channel realizations per point")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1, help="worker processes")
    ap.add_argument("-o", "--output", help="CSV path for a single experiment (default stdout)")
    ap.add_argument("--out-dir", help="directory for 'all' (one CSV per experiment)")
    args = ap.parse_args(argv)

    names = sorted(EXPERIMENTS) + ["timing"] if args.experiment == "all" else [args.experiment]
    if args.experiment == "all" and not args.out_dir:
        ap.error("'all' needs --out-dir")
    for name in names:
        t0 = time.perf_counter()
        if name == "timing":
            text = timing_table(args.trials, args.seed, args.threads)
        else:
            text = run(name, args.trials, args.seed, args.threads)
        if args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{name}.csv").write_text(text)
        elif args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
        print(f"{name}: {time.perf_counter() - t0:.1f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
