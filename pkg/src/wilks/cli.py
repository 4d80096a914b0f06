"""Command-line interface: ``wilks {fit,test,simulate,qq}``.

Exit codes: 0 success, 1 usage / input / I-O problems, 2 statistical
infeasibility (nonexistent MLE, no chi-square calibration). Errors are
written to standard error as a JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import montecarlo
from .errors import (
    InvalidNull,
    InvalidScenario,
    MleNonexistent,
    NoChiSquareApprox,
    ParseError,
    WilksError,
)
from .graphdata import read_comparisons, read_edge_list
from .inference import fit_full, run_lrt
from .numerics import Tolerance
from .params import NullHypothesis

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_indices(text: str) -> list:
    """Parse 1-based ``"1..5"``, ``"2,4,7"`` or mixtures like ``"1..3,8"`` to 0-based."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            try:
                lo, hi = int(lo), int(hi)
            except ValueError:
                raise UsageError(f"bad index range {part!r}") from None
            if lo > hi:
                raise UsageError(f"empty index range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise UsageError(f"bad index {part!r}") from None
    if not out:
        raise UsageError("no indices given")
    if min(out) < 1:
        raise UsageError("indices are 1-based")
    return [i - 1 for i in out]


def parse_values(text: str) -> list:
    """Values as a comma list, or a path to a file of whitespace/comma separated numbers."""
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    tokens = text.replace(",", " ").split()
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise UsageError(f"values must be numbers, got {text!r}") from None


def _build_parser():
    p = _Parser(prog="wilks", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--model", choices=("beta", "bt"), required=True)
        sp.add_argument("--out", help="output path (default: standard output)")
        sp.add_argument("--tol", type=float, help="absolute residual tolerance")

    def data_args(sp):
        sp.add_argument("--input", required=True, help="edge list (beta) or comparisons CSV (bt)")
        sp.add_argument("--reference", type=int, default=1, help="BT reference item (1-based)")

    fit = sub.add_parser("fit", help="fit the model by maximum likelihood")
    common(fit)
    data_args(fit)

    test = sub.add_parser("test", help="likelihood-ratio test of a null hypothesis")
    common(test)
    data_args(test)
    test.add_argument("--null", choices=("specified", "homogeneous"), required=True)
    test.add_argument("--indices", required=True, help='1-based, e.g. "1..10" or "2,5,9"')
    test.add_argument("--values", help="values for a specified null (list or file)")
    test.add_argument("--regime", choices=("chi2", "normal", "auto"), default="auto")
    test.add_argument("--wald", action="store_true", help="also run the Wald test")

    for name, helptext in (("simulate", "Monte Carlo rejection rates"), ("qq", "QQ table")):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--scenario", required=True, choices=("H01", "H02", "H03", "H04", "power"))
        sp.add_argument("--n", type=int, default=200)
        sp.add_argument("--r", type=int)
        sp.add_argument("--ln", type=float, default=0.0, help="L_n as a multiple of log n")
        sp.add_argument("--c", type=float, default=0.0)
        sp.add_argument("--k", type=int, default=1, help="comparisons per pair (bt)")
        sp.add_argument("--reps", type=int, default=1000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--alpha", default="0.05,0.1", help="comma-separated levels")
        sp.add_argument("--regime", choices=("chi2", "normal", "auto"), default="auto")
        sp.add_argument("--values", help="H03 null values (list or file)")
    return p


def _tolerance(args):
    return Tolerance() if args.tol is None else Tolerance(abs_eps=args.tol)


def _read_data(args):
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    return read_edge_list(text) if args.model == "beta" else read_comparisons(text)


def _reference(args, data):
    ref = args.reference - 1
    if not 0 <= ref < data.n:
        raise UsageError(f"--reference must lie in 1..{data.n}")
    return ref


def _emit(args, text, stdout):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_fit(args, stdout):
    data = _read_data(args)
    fit = fit_full(args.model, data, _tolerance(args), reference=_reference(args, data))
    _emit(args, _json(fit.to_json_dict()), stdout)


def _null_from_args(args):
    indices = parse_indices(args.indices)
    if args.null == "specified":
        if args.values is None:
            raise UsageError("--values is required for a specified null")
        values = parse_values(args.values)
        if len(values) == 1 and len(indices) > 1:
            values = values * len(indices)
        return NullHypothesis.specified(indices, values)
    if args.values is not None:
        raise UsageError("--values does not apply to a homogeneous null")
    return NullHypothesis.homogeneous(indices)


def cmd_test(args, stdout):
    data = _read_data(args)
    null = _null_from_args(args)
    null.check(data.n)
    result = run_lrt(
        args.model, data, null, regime=args.regime, tol=_tolerance(args),
        wald=args.wald, reference=_reference(args, data),
    )
    _emit(args, _json(result.to_json_dict()), stdout)


def _scenario(args):
    try:
        alphas = tuple(float(a) for a in args.alpha.split(","))
    except ValueError:
        raise UsageError(f"bad --alpha {args.alpha!r}") from None
    values = None if args.values is None else tuple(parse_values(args.values))
    return montecarlo.SimScenario(
        model=args.model, schedule=args.scenario, n=args.n, ln_factor=args.ln,
        r=args.r, c=args.c, k_common=args.k, reps=args.reps, alpha_levels=alphas,
        master_seed=args.seed, regime=args.regime, null_values=values,
    )


def cmd_simulate(args, stdout, stderr):
    sc = _scenario(args)
    tol = _tolerance(args)
    report = montecarlo.run_power(sc, tol=tol) if sc.schedule == "power" else montecarlo.run_type1(sc, tol=tol)
    _emit(args, report.to_csv(), stdout)
    (stdout if args.out else stderr).write(report.summary() + "\n")


def cmd_qq(args, stdout, stderr):
    sc = _scenario(args)
    table, report = montecarlo.qq_export(sc, tol=_tolerance(args))
    _emit(args, montecarlo.qq_to_csv(table), stdout)
    (stdout if args.out else stderr).write(report.summary() + "\n")


def _fail(stderr, code, kind, message):
    stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _build_parser().parse_args(argv)
        if args.command == "fit":
            cmd_fit(args, stdout)
        elif args.command == "test":
            cmd_test(args, stdout)
        elif args.command == "simulate":
            cmd_simulate(args, stdout, stderr)
        else:
            cmd_qq(args, stdout, stderr)
    except NoChiSquareApprox as exc:
        return _fail(stderr, EXIT_INFEASIBLE, "NoChiSquareApprox",
                     f"{exc} (model limitation of the Bradley-Terry LRT)")
    except MleNonexistent as exc:
        return _fail(stderr, EXIT_INFEASIBLE, type(exc).__name__, f"MLE nonexistent: {exc}")
    except (UsageError, ParseError, InvalidNull, InvalidScenario) as exc:
        return _fail(stderr, EXIT_USAGE, type(exc).__name__, str(exc))
    except (WilksError, ValueError, OSError) as exc:
        return _fail(stderr, EXIT_USAGE, type(exc).__name__, str(exc))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
