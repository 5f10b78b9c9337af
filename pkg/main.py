"""
Command-line front end.

Every subcommand writes one JSON or CSV document to standard output (or to
--out) and exits 0; flag errors exit 2; computation errors exit 1 with an
error document on standard error.
"""

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

import asymptotics
import correlation
import partitions
import pfaffian
import process
import schur
import series
import stats
from error_handler import SppError, error_handler
from partitions import PointConfiguration, StrictPartition
from process import MqParams, SpecializationChain
from schur import Specialization, format_scalar, parse_scalar
from settings import settings

SELF_TESTS: Dict[str, Callable[[], Dict[str, bool]]] = {
    "partitions": partitions.self_test,
    "schur": schur.self_test,
    "process": process.self_test,
    "series": series.self_test,
    "pfaffian": pfaffian.self_test,
    "correlation": correlation.self_test,
    "asymptotics": asymptotics.self_test,
    "stats": stats.self_test,
}


# ---------------------------------------------------------------- flag types

def q_value(text: str):
    """Decimal or exact "p/q" value in (0, 1)."""
    try:
        q = parse_scalar(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"invalid q {text!r}: {e}")
    if not 0 < q < 1:
        raise argparse.ArgumentTypeError(f"q must lie in (0, 1), got {text}")
    return q


def json_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"invalid JSON {text!r}: {e}")


def points_value(text: str) -> PointConfiguration:
    try:
        return PointConfiguration.from_json(json_value(text))
    except SppError as e:
        raise argparse.ArgumentTypeError(e.message)


def partition_value(text: str) -> StrictPartition:
    try:
        return StrictPartition.from_json(json_value(text))
    except SppError as e:
        raise argparse.ArgumentTypeError(e.message)


def specialization_value(text: str) -> Specialization:
    try:
        return Specialization.from_json(json_value(text))
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"invalid specialization {text!r}: {e}")


def chain_value(text: str) -> SpecializationChain:
    try:
        return SpecializationChain.from_dict(json_value(text))
    except (KeyError, TypeError, ValueError) as e:
        raise argparse.ArgumentTypeError(f"invalid chain {text!r}: {e}")


def grid_value(text: str) -> List[float]:
    """a:b:step, both ends included."""
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like a:b:step, got {text!r}")
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError(f"grid needs a <= b and step > 0, got {text!r}")
    n = int(round((b - a) / step))
    return [float(v) for v in np.linspace(a, a + n * step, n + 1)]


def float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


# ------------------------------------------------------------------- output

def emit_json(document: Any, out: Optional[str] = None) -> None:
    text = json.dumps(document, sort_keys=True, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def emit_csv(frame: pd.DataFrame, out: Optional[str] = None) -> None:
    text = frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        args.parser.error("the following arguments are required: " + ", ".join(f"--{n}" for n in missing))


# ----------------------------------------------------------------- commands

def cmd_macmahon(args: argparse.Namespace) -> int:
    require(args, "max-n")
    emit_json(process.macmahon_coeffs(args.max_n), args.out)
    return 0


def _source(args: argparse.Namespace, points: PointConfiguration):
    if args.chain is not None:
        return args.chain
    return MqParams.for_times(args.q, [t for t, _ in points])


def cmd_corr(args: argparse.Namespace) -> int:
    if args.chain is None:
        require(args, "q")
    require(args, "points")
    if args.check_oracle and args.chain is not None:
        args.parser.error("--check-oracle needs --q; the oracle covers the q-weighted measure only")

    source = _source(args, args.points)
    result = correlation.rho_pf(args.points, source, args.truncation, args.series_method, args.method)
    document = result.to_dict()
    document["q"] = format_scalar(args.q) if args.q is not None else None
    if args.check_oracle:
        oracle = correlation.rho_oracle(args.points, args.q, args.vmax)
        document["oracle_value"] = oracle.value
        document["error_bound"] = oracle.error_bound
        document["params"]["v_max"] = args.vmax
        document["agrees"] = abs(result.value - oracle.value) <= oracle.error_bound + 1e-8
    emit_json(document, args.out)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    require(args, "q", "points")
    document = correlation.rho_oracle(args.points, args.q, args.vmax).to_dict()
    document["q"] = format_scalar(args.q)
    emit_json(document, args.out)
    return 0


def cmd_kernel(args: argparse.Namespace) -> int:
    require(args, "q", "x", "y", "t1", "t2")
    params = MqParams.for_times(args.q, [args.t1, args.t2])
    truncation = args.truncation
    if truncation is None:
        truncation = series.default_truncation(max(abs(args.x), abs(args.y)), source=params)
    value = series.kernel_coeff(args.x, args.y, args.t1, args.t2, params, truncation, args.series_method)
    emit_json({
        "x": args.x, "y": args.y, "t1": args.t1, "t2": args.t2,
        "q": format_scalar(args.q),
        "truncation": truncation,
        "series_method": series.resolve_method(params, args.series_method),
        "value": value,
    }, args.out)
    return 0


def cmd_density(args: argparse.Namespace) -> int:
    require(args, "tau", "chi-grid")
    emit_csv(asymptotics.density_mesh(args.tau, args.chi_grid), args.out)
    return 0


def cmd_shape(args: argparse.Namespace) -> int:
    require(args, "tau-grid", "chi-grid")
    emit_csv(asymptotics.shape_mesh(args.tau_grid, args.chi_grid, progress=args.progress), args.out)
    return 0


def cmd_volume(args: argparse.Namespace) -> int:
    emit_csv(stats.volume_table(args.r_list), args.out)
    return 0


def cmd_qpqp(args: argparse.Namespace) -> int:
    require(args, "mu", "nu", "x", "y", "cutoff")
    emit_json(schur.qpqp_report(args.mu, args.nu, args.x, args.y, args.cutoff), args.out)
    return 0


def run_self_tests(modules: Sequence[str], out: Optional[str] = None) -> int:
    report = {name: SELF_TESTS[name]() for name in modules}
    emit_json(report, out)
    passed = all(all(checks.values()) for checks in report.values())
    if not passed:
        failed = [f"{m}.{c}" for m, checks in report.items() for c, ok in checks.items() if not ok]
        error_handler.log_warning(f"failed checks: {failed}", "self-test")
    return 0 if passed else 1


def cmd_self_test(args: argparse.Namespace) -> int:
    return run_self_tests(args.modules or list(SELF_TESTS), args.out)


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spp",
        description="Strict plane partitions, the shifted Schur process and its correlation kernel.",
    )
    parser.add_argument("--settings", help="JSON settings file")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--workers", type=positive_int, help="worker threads for grid commands")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable, module: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--self-test", action="store_true", help=f"run the {module} invariant checks")
        p.add_argument("--out", help="write the document to this file")
        p.set_defaults(handler=handler, module=module, parser=p)
        return p

    p = add("macmahon", cmd_macmahon, "process", "exact shifted MacMahon coefficients")
    p.add_argument("--max-n", type=positive_int)

    for name, handler in (("corr", cmd_corr), ("oracle", cmd_oracle)):
        p = add(name, handler, "correlation", "correlation function of a point set")
        p.add_argument("--q", type=q_value)
        p.add_argument("--points", type=points_value, help='JSON list of [t, x] pairs')
        p.add_argument("--vmax", type=positive_int, default=20)
        if name == "corr":
            p.add_argument("--chain", type=chain_value, help='JSON {"T", "plus", "minus"} instead of --q')
            p.add_argument("--method", choices=["pfaffian", "reference"], default="pfaffian")
            p.add_argument("--series-method", choices=["auto", "product", "circle"], default="auto")
            p.add_argument("--truncation", type=positive_int)
            p.add_argument("--check-oracle", action="store_true")

    p = add("kernel", cmd_kernel, "series", "one kernel coefficient K_{x,y}(t1, t2)")
    p.add_argument("--q", type=q_value)
    for flag in ("--x", "--y", "--t1", "--t2"):
        p.add_argument(flag, type=int)
    p.add_argument("--truncation", type=positive_int)
    p.add_argument("--series-method", choices=["auto", "product", "circle"], default="auto")

    p = add("density", cmd_density, "asymptotics", "limiting density along a chi grid")
    p.add_argument("--tau", type=float)
    p.add_argument("--chi-grid", type=grid_value)

    p = add("shape", cmd_shape, "asymptotics", "limit shape over a (tau, chi) grid")
    p.add_argument("--tau-grid", type=grid_value)
    p.add_argument("--chi-grid", type=grid_value)
    p.add_argument("--progress", action="store_true", help="progress bar on standard error")

    p = add("volume", cmd_volume, "stats", "volume moments and the zeta(3) law")
    p.add_argument("--r-list", type=float_list, default=[0.2, 0.1, 0.05, 0.02, 0.01])

    p = add("qpqp-check", cmd_qpqp, "schur", "residual of the QPQP summation identity")
    p.add_argument("--mu", type=partition_value)
    p.add_argument("--nu", type=partition_value)
    p.add_argument("--x", type=specialization_value)
    p.add_argument("--y", type=specialization_value)
    p.add_argument("--cutoff", type=positive_int)

    p = sub.add_parser("self-test", help="run the invariant checks of every module")
    p.add_argument("--out")
    p.add_argument("--modules", nargs="*", choices=sorted(SELF_TESTS))
    p.set_defaults(handler=cmd_self_test, module=None, parser=p, self_test=False)
    return parser


def configure(args: argparse.Namespace) -> None:
    if args.settings:
        settings.settings_file = args.settings
        settings.load_settings()
    if args.workers:
        settings.set("workers", args.workers)
    error_handler.setup_logging(args.log_level or settings.get("log_level"), settings.get("log_file"))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the command line."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure(args)
    try:
        if args.self_test:
            return run_self_tests([args.module], args.out)
        return args.handler(args)
    except Exception as e:
        payload = error_handler.handle_error(e, args.command)
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
