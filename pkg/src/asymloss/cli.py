"""``asymloss`` command-line tool.

Subcommands::

    asymloss correct   --k1 K1 --k2 K2 (--a A --b B | --residuals FILE) [--apply PRED --out OUT]
    asymloss curve     --sweep {c,k2} --from X --to Y --points N [--a --b --k1 --k2]
    asymloss verify    [--grid GRID.json]
    asymloss simulate  --a --b --k1 --k2 --c --n --seed [--workers W]
    asymloss fit       --residuals FILE

Residuals are z = prediction - observation: k1 prices over-prediction and
k2 under-prediction.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 residuals
outside the model family, 4 internal numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import files, fit, montecarlo, optimizer, verification
from .errors import ConvergenceError, DomainError, InputError, InternalConsistencyError, OutOfFamilyError
from .gnd import GndParams
from .loss import LossParams, expected_loss, variance_loss
from .reports import CorrectionReport, FitReport, SimulationReport

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT = 2
EXIT_FAMILY = 3
EXIT_INTERNAL = 4
Z_FLAG = 4.0


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags already; keep it but route through our message format
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"asymloss: error: {message}\n")


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_params(args) -> GndParams:
    if args.a is None or args.b is None:
        raise InputError("give both --a and --b, or --residuals")
    return GndParams(args.a, args.b)


def _fit_residuals(path):
    summary = fit.summarize(files.read_residuals(path))
    params = fit.fit_moments(summary)
    return summary, params, fit.diagnostics(summary)


def cmd_correct(args) -> int:
    k = LossParams(args.k1, args.k2)
    notes = []
    if args.residuals:
        if args.a is not None or args.b is not None:
            raise InputError("--residuals and --a/--b are mutually exclusive")
        _, p, notes = _fit_residuals(args.residuals)
    else:
        p = _error_params(args)
    if args.apply and not args.out:
        raise InputError("--apply needs --out for the corrected predictions file")
    corr = optimizer.optimal_correction(p, k)
    report = CorrectionReport.build(p, k, corr, notes)
    if args.apply:
        files.apply_correction(args.apply, args.out, corr.C)
        sys.stdout.write(report.render(args.json))
    else:
        _emit(report.render(args.json), args.out)
    return EXIT_OK


def _sweep_points(args) -> np.ndarray:
    lo, hi, n = args.from_, args.to, args.points
    if n is None or n < 2:
        raise InputError(f"--points must be at least 2, got {n}")
    if not lo < hi:
        raise InputError(f"empty sweep range: --from {lo!r} must be below --to {hi!r}")
    return np.linspace(lo, hi, n)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def curve_rows_c(p: GndParams, k: LossParams, cs):
    return [(c, expected_loss(c, p, k), variance_loss(c, p, k)) for c in cs]


def curve_rows_k2(p: GndParams, k1: float, k2s):
    rows = []
    for k2 in k2s:
        k = LossParams(k1, float(k2))
        corr = optimizer.optimal_correction(p, k)
        e_diff = optimizer.loss_reduction(p, k).difference
        v_diff = verification.variance_gap_from_f(p, k, corr.x_star)
        rows.append(
            (
                k2,
                corr.C,
                corr.expected_loss_at_0,
                corr.expected_loss_at_C,
                e_diff,
                corr.variance_at_0,
                corr.variance_at_C,
                v_diff,
            )
        )
    return rows


def cmd_curve(args) -> int:
    p = GndParams(args.a if args.a is not None else 1.0, args.b if args.b is not None else 1.0)
    if args.sweep == "c":
        k = LossParams(args.k1 if args.k1 is not None else 1.0, args.k2 if args.k2 is not None else 1.0)
        text = _csv_text(("c", "expected_loss", "variance"), curve_rows_c(p, k, _sweep_points(args)))
    else:
        if args.from_ is not None and args.from_ <= 0:
            raise InputError(f"k2 sweep needs --from > 0, got {args.from_!r}")
        k1 = args.k1 if args.k1 is not None else 50.0
        text = _csv_text(
            ("k2", "C", "E0", "EC", "E_diff", "V0", "VC", "V_diff"),
            curve_rows_k2(p, k1, _sweep_points(args)),
        )
    _emit(text, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    grid = verification.load_grid(args.grid) if args.grid else verification.default_grid()
    report = verification.run_suite(grid)
    lines = []
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(f"{status} {check.name} margin={check.margin:.6g} {check.detail}")
    lines.append(f"{len(report.checks) - len(report.failed)}/{len(report.checks)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    for check in report.failed:
        print(f"asymloss: check failed: {check.name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def simulate_report(p: GndParams, k: LossParams, c: float, n: int, seed: int, workers: int = 1) -> SimulationReport:
    stats = montecarlo.estimate_loss_stats(c, p, k, n, seed, workers=workers)
    mean = expected_loss(c, p, k)
    var = variance_loss(c, p, k)
    mean_z = (stats.mean - mean) / stats.mean_stderr if stats.mean_stderr > 0 else 0.0
    var_z = (stats.variance - var) / stats.variance_stderr if stats.variance_stderr > 0 else 0.0
    flags = [f"{name} z-score {z:.3f} exceeds {Z_FLAG:g}" for name, z in (("mean", mean_z), ("variance", var_z)) if abs(z) > Z_FLAG]
    return SimulationReport(
        a=p.a,
        b=p.b,
        k1=k.k1,
        k2=k.k2,
        c=float(c),
        n=stats.n,
        seed=stats.seed,
        closed_form_mean=mean,
        closed_form_variance=var,
        mc_mean=stats.mean,
        mc_variance=stats.variance,
        mean_stderr=stats.mean_stderr,
        variance_stderr=stats.variance_stderr,
        mean_z=mean_z,
        variance_z=var_z,
        flags=flags,
    )


def cmd_simulate(args) -> int:
    if args.n is None or args.n < 2:
        raise InputError(f"--n must be at least 2, got {args.n}")
    if args.workers < 1:
        raise InputError(f"--workers must be at least 1, got {args.workers}")
    p = _error_params(args)
    k = LossParams(args.k1, args.k2)
    report = simulate_report(p, k, args.c, args.n, args.seed, args.workers)
    _emit(report.render(args.json), args.out)
    return EXIT_OK


def cmd_fit(args) -> int:
    summary, p, notes = _fit_residuals(args.residuals)
    report = FitReport(
        a=p.a,
        b=p.b,
        n=summary.n,
        mean=summary.mean,
        mean_abs=summary.mean_abs,
        second_moment=summary.second_moment,
        moment_ratio=summary.moment_ratio,
        warnings=notes,
    )
    _emit(report.render(args.json), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="asymloss", description="Optimal bias correction under asymmetric linear loss.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, model=True, loss=True):
        if model:
            sp.add_argument("--a", type=_finite, help="shape a (1 = Laplace, 0.5 = Gauss)")
            sp.add_argument("--b", type=_finite, help="scale b")
        if loss:
            sp.add_argument("--k1", type=_finite, help="cost per unit of over-prediction")
            sp.add_argument("--k2", type=_finite, help="cost per unit of under-prediction")
        sp.add_argument("--out", help="write the output here instead of stdout")
        sp.add_argument("--json", action="store_true", help="machine-readable report")

    sp = sub.add_parser("correct", help="optimal additive correction C")
    common(sp)
    sp.add_argument("--residuals", help="CSV with a 'residual' column; fits (a, b) first")
    sp.add_argument("--apply", help="CSV with a 'prediction' column; adds corrected = prediction + C")
    sp.set_defaults(func=cmd_correct, required_k=True)

    sp = sub.add_parser("curve", help="closed-form sweep as CSV")
    common(sp)
    sp.add_argument("--sweep", choices=("c", "k2"), required=True)
    sp.add_argument("--from", dest="from_", type=_finite, required=True)
    sp.add_argument("--to", type=_finite, required=True)
    sp.add_argument("--points", type=int, required=True)
    sp.set_defaults(func=cmd_curve, required_k=False)

    sp = sub.add_parser("verify", help="numerical checks of the supporting inequalities")
    common(sp, model=False, loss=False)
    sp.add_argument("--grid", help="JSON object with a_values, x_values and optional ratio_values")
    sp.set_defaults(func=cmd_verify, required_k=False)

    sp = sub.add_parser("simulate", help="closed form against Monte Carlo")
    common(sp)
    sp.add_argument("--c", type=_finite, default=0.0)
    sp.add_argument("--n", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_simulate, required_k=True)

    sp = sub.add_parser("fit", help="method-of-moments fit of (a, b)")
    common(sp, model=False, loss=False)
    sp.add_argument("--residuals", required=True)
    sp.set_defaults(func=cmd_fit, required_k=False)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help and on bad flags; surface that as a return code
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        if args.required_k and (args.k1 is None or args.k2 is None):
            raise InputError("--k1 and --k2 are required")
        return args.func(args)
    except OutOfFamilyError as exc:
        print(f"asymloss: residuals outside the model family: {exc}", file=sys.stderr)
        return EXIT_FAMILY
    except (InputError, DomainError, OSError) as exc:
        print(f"asymloss: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, InternalConsistencyError, OverflowError) as exc:
        print(f"asymloss: internal numerical failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
