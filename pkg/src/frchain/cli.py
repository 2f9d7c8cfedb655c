"""Command-line interface.

    frchain build --n 8 --theta-critical --out chain.json
    frchain analyze chain.json --time 1.5707963267948966
    frchain simulate chain.json --trials 100000 --seed 1 --csv trials.csv
    frchain sweep --n-min 4 --n-max 64 --theta critical --format csv
    frchain oracle --n 6 --theta 1.0471975511965976 --rounds 5 --seed 3

Exit codes: 0 success, 2 usage or parse error, 3 no fractional revival
(with ``analyze --require-fr``), 4 oracle deviation above threshold.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from frchain import tolerances
from frchain.chain import ChainError, ChainSpec, load_chain
from frchain.design import (
    FrDesign,
    asymmetrize_odd,
    critical_angle,
    effective_angle_asymmetric,
    genest_chain,
    odd_chain,
)
from frchain.oracle import MAX_QUBITS, full_space_oracle
from frchain.protocol import (
    DEFAULT_MAX_ROUNDS,
    LogicalQubit,
    expected_weighted_time,
    monte_carlo,
    run_trials,
    summarize,
)
from frchain.revival import bounds_report, detect_revival, pst_speed_limit, verify_mirror_revival

EXIT_USAGE = 2
EXIT_NO_FR = 3
EXIT_ORACLE = 4
ORACLE_THRESHOLD = 1e-9
INPUT_NORM_TOL = 1e-6

SWEEP_COLUMNS = ["n", "theta", "j_max", "tau0", "expected_weighted_time", "pst_limit", "ratio"]
SWEEP_MC_COLUMNS = ["mc_mean_rounds", "mc_std_error"]


class UsageError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2)


def _parse_input(text: str | None) -> LogicalQubit:
    if text is None:
        return LogicalQubit.normalized(1, 1)
    try:
        a_re, a_im, b_re, b_im = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--input expects 'a_re,a_im,b_re,b_im', got {text!r}") from None
    alpha, beta = complex(a_re, a_im), complex(b_re, b_im)
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1) > INPUT_NORM_TOL:
        raise UsageError(f"input amplitudes have squared norm {norm!r}; must be 1 within {INPUT_NORM_TOL}")
    return LogicalQubit.normalized(alpha, beta)


def _design(n: int, theta: float | None, critical: bool, odd_spectral: bool = True) -> FrDesign:
    if critical:
        if n % 2:
            raise UsageError("--theta-critical requires an even --n")
        theta = critical_angle(n)
    if theta is None:
        raise UsageError("give --theta or --theta-critical")
    if n % 2 == 0:
        return genest_chain(n, theta)
    if not odd_spectral:
        raise UsageError("odd --n needs --odd-spectral (the closed-form family is even-N only)")
    return odd_chain(n, theta)


def _read_design(path: str) -> tuple[ChainSpec, dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    chain = load_chain(text)
    meta = json.loads(text).get("design") or {}
    return chain, meta


def cmd_build(args) -> int:
    if args.odd_spectral and args.n % 2 == 0:
        raise UsageError("--odd-spectral requires an odd --n")
    if args.eta is not None and args.n % 2 == 0:
        raise UsageError("--eta requires an odd --n")
    design = _design(args.n, args.theta, args.theta_critical, args.odd_spectral)
    chain = design.chain
    meta = design.metadata()
    if args.eta is not None:
        chain = asymmetrize_odd(chain, args.eta)
        meta["theta_prime"] = design.theta
        meta["eta"] = args.eta
        meta["theta"] = effective_angle_asymmetric(design.theta, args.eta)
    text = _dumps({**chain.to_dict(), "design": meta}) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_analyze(args) -> int:
    chain, meta = _read_design(args.file)
    t = args.time if args.time is not None else meta.get("tau0", math.pi / 2)
    rev = detect_revival(chain, t)
    bounds = bounds_report(chain, t)
    out = {
        "revival": rev.to_dict(),
        "mirror_deviation": verify_mirror_revival(chain, t, rev.theta, rev.phi),
        "bounds": bounds.to_dict(),
    }
    sys.stdout.write(_dumps(out) + "\n")
    if args.require_fr and rev.residual > tolerances.fr_residual_threshold():
        return EXIT_NO_FR
    return 0


def _chain_from_args(args) -> tuple[ChainSpec, float]:
    if args.file:
        chain, meta = _read_design(args.file)
        tau0 = meta.get("tau0", math.pi / 2)
    else:
        if args.n is None:
            raise UsageError("give a chain FILE or --n with --theta")
        design = _design(args.n, args.theta, args.theta_critical)
        chain, tau0 = design.chain, design.tau0
    if args.tau0 is not None:
        tau0 = args.tau0
    return chain, tau0


def cmd_simulate(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    psi = _parse_input(args.input)
    chain, tau0 = _chain_from_args(args)
    if chain.n_sites < 4:
        raise UsageError("the protocol needs at least 4 sites")
    records = run_trials(psi, chain, tau0, args.trials, args.seed, args.max_rounds)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["trial", "rounds", "weighted_time", "fidelity"])
            for i, r in enumerate(records):
                writer.writerow([i, r.rounds, repr(r.weighted_time), repr(r.fidelity)])
    sys.stdout.write(_dumps(summarize(records).to_dict()) + "\n")
    return 0


def sweep_rows(n_values, theta_arg: str, mc_trials: int = 0, seed: int = 0) -> list[dict]:
    rows = []
    psi = LogicalQubit.normalized(1, 1)
    for n in n_values:
        if theta_arg == "critical":
            design = genest_chain(n, critical_angle(n))
        else:
            design = _design(n, float(theta_arg), False)
        theta = design.theta
        ewt = expected_weighted_time(design.chain, theta, design.tau0)
        pst = pst_speed_limit(n)
        row = {
            "n": n,
            "theta": theta,
            "j_max": design.chain.j_max,
            "tau0": design.tau0,
            "expected_weighted_time": ewt,
            "pst_limit": pst,
            "ratio": ewt / pst,
        }
        if mc_trials:
            stats = monte_carlo(psi, design.chain, design.tau0, mc_trials, seed)
            row["mc_mean_rounds"] = stats.mean_rounds
            row["mc_std_error"] = stats.std_error
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    if args.n_min > args.n_max:
        raise UsageError("--n-min exceeds --n-max")
    if args.theta == "critical":
        if args.n_min < 4 or args.n_min % 2:
            raise UsageError("critical sweep needs an even --n-min >= 4")
        n_values = range(args.n_min, args.n_max + 1, 2)
    else:
        try:
            float(args.theta)
        except ValueError:
            raise UsageError(f"--theta must be 'critical' or a number, got {args.theta!r}") from None
        if args.n_min < 2:
            raise UsageError("--n-min must be at least 2")
        n_values = range(args.n_min, args.n_max + 1)
    if args.mc_trials and max(n_values) < 4:
        raise UsageError("Monte Carlo needs chains with at least 4 sites")
    rows = sweep_rows(n_values, args.theta, args.mc_trials, args.seed)
    if args.format == "json":
        sys.stdout.write(_dumps(rows) + "\n")
        return 0
    columns = SWEEP_COLUMNS + (SWEEP_MC_COLUMNS if args.mc_trials else [])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([row[c] if c == "n" else repr(row[c]) for c in columns])
    sys.stdout.write(buf.getvalue())
    return 0


def cmd_oracle(args) -> int:
    if not 4 <= args.n <= MAX_QUBITS:
        raise UsageError(f"--n must lie in 4..{MAX_QUBITS}")
    psi = _parse_input(args.input)
    design = _design(args.n, args.theta, args.theta_critical)
    report = full_space_oracle(design.chain, design.tau0, psi, args.rounds, args.seed)
    out = report.to_dict()
    out["threshold"] = ORACLE_THRESHOLD
    out["pass"] = report.max_deviation < ORACLE_THRESHOLD
    sys.stdout.write(_dumps(out) + "\n")
    return 0 if out["pass"] else EXIT_ORACLE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frchain", description="Fractional-revival spin chains.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="design a chain and write it as JSON")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float)
    g.add_argument("--theta-critical", action="store_true")
    p.add_argument("--odd-spectral", action="store_true", help="odd N via the spectral design")
    p.add_argument("--eta", type=float, help="unbalance the central couplings (odd N)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="revival characterisation and bounds")
    p.add_argument("file")
    p.add_argument("--time", type=float)
    p.add_argument("--require-fr", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo of the heralded protocol")
    p.add_argument("file", nargs="?")
    p.add_argument("--n", type=int)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--theta", type=float)
    g.add_argument("--theta-critical", action="store_true")
    p.add_argument("--tau0", type=float)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int, default=DEFAULT_MAX_ROUNDS)
    p.add_argument("--input", help="a_re,a_im,b_re,b_im")
    p.add_argument("--csv", help="write per-trial records here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="expected time vs speed limit over N")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--theta", default="critical")
    p.add_argument("--mc-trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="compare against the full 2^N simulation")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float)
    g.add_argument("--theta-critical", action="store_true")
    p.add_argument("--rounds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="a_re,a_im,b_re,b_im")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ChainError, ValueError) as exc:
        print(f"frchain {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
