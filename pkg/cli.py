"""Command-line surface: inequality checks, certification, Beta queries and
falsification campaigns. Reports go to stdout as JSON, diagnostics to stderr.

Exit codes: 0 holds / no violation, 1 usage or runtime error,
2 violated / counterexample, 3 inconclusive.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from certification import Resolution, check_convex, check_s_convex
from errors import ConfigError, ToolkitError
from falsification import CampaignConfig, run_campaign
from function_model import Interval, load_spec, render
from inequality_engine import (
    DEFAULT_SLACK_TOL,
    INEQUALITY_IDS,
    eval_c29,
    eval_hermite_hadamard,
    eval_t1,
    eval_t2,
    eval_t3,
)
from special_functions import beta_fn

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2
EXIT_INCONCLUSIVE = 3

VERDICT_EXIT = {"holds": EXIT_OK, "violated": EXIT_VIOLATED, "inconclusive": EXIT_INCONCLUSIVE}
# Worst verdict wins when a command produces several reports
VERDICT_RANK = {"holds": 0, "inconclusive": 1, "violated": 2}
# "hh" names both halves of the Hermite-Hadamard inequality
HH_HALVES = ("hh_left", "hh_right")


def exit_status(verdicts):
    worst = max(verdicts, key=VERDICT_RANK.__getitem__)
    return VERDICT_EXIT[worst]


def _pair(text, kind=float):
    try:
        lo, hi = (kind(part) for part in text.split(","))
    except ValueError as e:
        raise ConfigError(f"expected two comma-separated numbers, got {text!r}") from e
    return lo, hi


def _emit(payload):
    sys.stdout.write(payload + "\n")


def _certify_inputs(args, f, g, interval):
    """Membership checks each inequality assumes; returns the first failure."""
    checks = []
    if args.ineq in ("hh", "t1", "t2", "c29"):
        checks.append(lambda: check_convex(f, interval))
    if args.ineq in ("t1", "c29"):
        checks.append(lambda: check_convex(g, interval))
    if args.ineq == "t2":
        checks.append(lambda: check_s_convex(g, args.s, interval))
    if args.ineq == "t3":
        checks.append(lambda: check_s_convex(f, args.s1, interval))
        checks.append(lambda: check_s_convex(g, args.s2, interval))
    for check in checks:
        verdict = check()
        logger.info(verdict.describe())
        if not verdict.passed:
            return verdict
    return None


def cmd_check(args):
    interval = Interval.parse(args.interval)
    f = load_spec(args.f)
    g = None
    if args.ineq != "hh":
        if args.g is None:
            raise ConfigError(f"--g is required for --ineq {args.ineq}")
        g = load_spec(args.g)
    if args.ineq == "t2" and args.s is None:
        raise ConfigError("--s is required for --ineq t2")
    if args.ineq == "t3" and (args.s1 is None or args.s2 is None):
        raise ConfigError("--s1 and --s2 are required for --ineq t3")

    if args.certify:
        failure = _certify_inputs(args, f, g, interval)
        if failure is not None:
            _emit(failure.model_dump_json(indent=2))
            return EXIT_VIOLATED

    if args.ineq == "hh":
        reports = list(eval_hermite_hadamard(f, interval, args.tol))
        _emit(json.dumps([r.model_dump(mode="json") for r in reports], indent=2))
        return exit_status(r.verdict for r in reports)

    if args.ineq == "t1":
        report = eval_t1(f, g, interval, args.tol)
    elif args.ineq == "t2":
        report = eval_t2(f, g, args.s, interval, args.tol)
    elif args.ineq == "t3":
        report = eval_t3(f, args.s1, g, args.s2, interval, args.tol)
    else:
        report = eval_c29(f, g, interval, args.tol)
    _emit(report.model_dump_json(indent=2))
    return exit_status([report.verdict])


def cmd_certify(args):
    interval = Interval.parse(args.interval)
    f = load_spec(args.f)
    resolution = Resolution.parse(args.resolution) if args.resolution else Resolution()
    if args.s is None:
        verdict = check_convex(f, interval, resolution, args.seed)
    else:
        verdict = check_s_convex(f, args.s, interval, resolution, args.seed)
    _emit(verdict.model_dump_json(indent=2))
    return EXIT_OK if verdict.passed else EXIT_VIOLATED


def _campaign_config(args, inequality_id):
    try:
        return CampaignConfig(
            inequality_id=inequality_id,
            n_samples=args.samples,
            root_seed=args.seed,
            interval=Interval.parse(args.interval),
            s_range=_pair(args.s_range),
            complexity=args.complexity,
            tol=args.tol,
            resolution=Resolution.parse(args.resolution) if args.resolution else Resolution(),
        )
    except ValidationError as e:
        raise ConfigError(f"invalid campaign configuration: {e}") from e


def _csv_path(path, inequality_id, several):
    """hh runs two campaigns; each half gets its own CSV next to the requested one."""
    if path is None or not several:
        return path
    path = Path(path)
    return path.with_name(f"{path.stem}.{inequality_id}{path.suffix}")


def cmd_falsify(args):
    ids = HH_HALVES if args.ineq == "hh" else (args.ineq,)
    configs = [_campaign_config(args, inequality_id) for inequality_id in ids]
    if args.workers < 1:
        raise ConfigError(f"--workers must be at least 1, got {args.workers}")

    reports = [
        run_campaign(config, workers=args.workers,
                     csv_path=_csv_path(args.csv, config.inequality_id, len(configs) > 1))
        for config in configs
    ]
    if len(reports) == 1:
        payload = reports[0].model_dump_json(indent=2)
    else:
        payload = json.dumps([r.model_dump(mode="json") for r in reports], indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    else:
        _emit(payload)
    return EXIT_VIOLATED if any(r.violations for r in reports) else EXIT_OK


def cmd_beta(args):
    value = beta_fn(u=args.u, v=args.v)
    _emit(f"{value:.17g}")
    return EXIT_OK


def cmd_echo(args):
    _emit(render(load_spec(args.f)))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hadamard-check",
        description="Numerical checks of Hadamard-type inequalities for convex and s-convex products.",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    parser.add_argument("--debug", action="store_true", help="log everything to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="evaluate both sides of one inequality")
    check.add_argument("--ineq", required=True, choices=["hh", "t1", "t2", "t3", "c29"])
    check.add_argument("--f", required=True, help="function spec JSON file")
    check.add_argument("--g", help="second function spec JSON file")
    check.add_argument("--interval", required=True, help="a,b")
    check.add_argument("--s", type=float)
    check.add_argument("--s1", type=float)
    check.add_argument("--s2", type=float)
    check.add_argument("--tol", type=float, default=DEFAULT_SLACK_TOL)
    check.add_argument("--certify", action="store_true", help="check class membership first")
    check.set_defaults(handler=cmd_check)

    certify = sub.add_parser("certify", help="sampled convexity / s-convexity check")
    certify.add_argument("--f", required=True)
    certify.add_argument("--interval", required=True)
    certify.add_argument("--s", type=float, help="check s-convexity instead of convexity")
    certify.add_argument("--resolution", help="t_points,pair_samples")
    certify.add_argument("--seed", type=int, default=0)
    certify.set_defaults(handler=cmd_certify)

    falsify = sub.add_parser("falsify", help="run a seeded falsification campaign")
    falsify.add_argument("--ineq", required=True, choices=("hh", *INEQUALITY_IDS),
                         help="hh runs both halves and prints a JSON array")
    falsify.add_argument("--samples", required=True, type=int)
    falsify.add_argument("--seed", required=True, type=int)
    falsify.add_argument("--interval", required=True)
    falsify.add_argument("--s-range", default="0.1,1")
    falsify.add_argument("--complexity", type=int, default=2)
    falsify.add_argument("--tol", type=float, default=DEFAULT_SLACK_TOL)
    falsify.add_argument("--resolution", help="t_points,pair_samples for certification")
    falsify.add_argument("--workers", type=int, default=1, help="worker processes")
    falsify.add_argument("--out", help="write the report here instead of stdout")
    falsify.add_argument("--csv", help="write per-trial slacks as CSV; hh writes <stem>.hh_left<ext> and <stem>.hh_right<ext>")
    falsify.set_defaults(handler=cmd_falsify)

    beta = sub.add_parser("beta", help="Euler Beta function")
    beta.add_argument("--u", required=True, type=float)
    beta.add_argument("--v", required=True, type=float)
    beta.set_defaults(handler=cmd_beta)

    echo = sub.add_parser("echo", help="print the canonical rendering of a spec file")
    echo.add_argument("--f", required=True)
    echo.set_defaults(handler=cmd_echo)
    return parser


def configure_logging(verbose=False, debug=False):
    level = logging.DEBUG if debug else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s", force=True)


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 means "violated" here
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    configure_logging(args.verbose, args.debug)

    try:
        return args.handler(args)
    except (ToolkitError, ValidationError, OSError, OverflowError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
