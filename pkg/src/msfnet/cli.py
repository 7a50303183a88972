"""Command-line interface.

Subcommands: ``msf grid``, ``msf interval``, ``design weighted|binary|matching``,
``sweep norm``, ``verify``, ``prob stability``.  Every file is written
atomically (temp file + rename) and a ``run-manifest.txt`` beside the primary
output records the full flag set and library versions, so identical
invocations produce byte-identical artifacts.

Exit codes: 0 success; 1 infeasible/unstable verdict (outputs still
written); 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .design import design_binary, design_matching, design_weighted, norm_sweep
from .errors import BadParameter, DimensionMismatch, Infeasible, MsfnetError, NoStableInterval, TimedOut
from .graphs import adjacency_csv_text, custom_network, network_from_spec, read_adjacency_csv
from .model import load_model_config
from .msf import sigma_grid, stable_interval
from .verify import build_closed_loop, simulate, spectral_verdict, stability_probability

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

# flags whose values may start with '-' (ranges like -10:10, negative
# eigenvalues); fused with '=' so argparse does not mistake them for options
_VALUE_FLAGS = {"--lambda", "--mu", "--range", "--n"}


def _fuse_value_flags(argv: list[str]) -> list[str]:
    fused, i = [], 0
    while i < len(argv):
        token = argv[i]
        if token in _VALUE_FLAGS and i + 1 < len(argv):
            fused.append(token + "=" + argv[i + 1])
            i += 2
        else:
            fused.append(token)
            i += 1
    return fused


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise BadParameter(f"range must be 'low:high', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise BadParameter(f"range must be numeric 'low:high', got {text!r}") from exc


def _parse_int_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise BadParameter(f"range must be 'low:high', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise BadParameter(f"range must be integer 'low:high', got {text!r}") from exc


def _load_network(value: str, *, coupling: float = 1.0):
    """A network argument is a kind spec, a bare CSV path, or file:PATH."""
    if ":" in value:
        return network_from_spec(value, coupling=coupling)
    return read_adjacency_csv(value)


def _worker_count() -> int:
    raw = os.environ.get("MSF_THREADS", "0")
    try:
        value = int(raw)
    except ValueError as exc:
        raise BadParameter(f"MSF_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise BadParameter(f"MSF_THREADS must be >= 0, got {value}")
    if value == 0:
        return min(4, os.cpu_count() or 1)
    return value


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _atomic_write(path, text: str) -> None:
    target = Path(path)
    if target.parent != Path(""):
        target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent or "."),
                               prefix=target.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value: float) -> str:
    return str(float(value))


def _write_manifest(command: str, args: argparse.Namespace, primary_out) -> None:
    directory = Path(primary_out).parent if primary_out else Path(".")
    skip = {"func", "command", "subcommand"}
    lines = [f"command = {command}"]
    for key in sorted(vars(args)):
        if key in skip:
            continue
        lines.append(f"flag.{key} = {getattr(args, key)}")
    lines.append(f"version.msfnet = {__version__}")
    lines.append(f"version.numpy = {np.__version__}")
    lines.append(f"version.python = {sys.version.split()[0]}")
    lines.append(f"version.scipy = {scipy.__version__}")
    _atomic_write(directory / "run-manifest.txt", "\n".join(lines) + "\n")


def _print_report(report: dict) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


def _gains_for_report(gains) -> list:
    if gains is None:
        return []
    if np.iscomplexobj(gains):
        return [[float(g.real), float(g.imag)] for g in gains]
    return [float(g) for g in gains]


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_msf_grid(args: argparse.Namespace) -> int:
    model = load_model_config(args.model)
    points = sigma_grid(model, _parse_range(args.lam), _parse_range(args.mu), args.steps)
    lines = ["lambda,mu,sigma"]
    lines += [f"{_fmt(p.lam.real if isinstance(p.lam, complex) else p.lam)},"
              f"{_fmt(p.mu.real if isinstance(p.mu, complex) else p.mu)},"
              f"{_fmt(p.sigma)}" for p in points]
    _atomic_write(args.out, "\n".join(lines) + "\n")
    _write_manifest("msf grid", args, args.out)
    values = [p.sigma for p in points]
    print(f"wrote {len(points)} grid points to {args.out} "
          f"(sigma range [{min(values):.6g}, {max(values):.6g}])")
    return EXIT_OK


def _cmd_msf_interval(args: argparse.Namespace) -> int:
    model = load_model_config(args.model)
    search = _parse_range(args.range)
    rows = ["lambda_re,lambda_im,f_l,f_u,bounded_l,bounded_u"]
    exit_code = EXIT_OK
    for lam in args.lam:
        try:
            iv = stable_interval(model, lam, search, args.tol, scan_points=args.scan)
        except NoStableInterval as exc:
            print(f"lambda={lam}: no stable interval ({exc})")
            rows.append(f"{_fmt(lam)},0.0,nan,nan,0,0")
            exit_code = EXIT_VERDICT
            continue
        sides = (f"lower {'boundary' if iv.bounded_lower else 'range end'} {iv.lower}, "
                 f"upper {'boundary' if iv.bounded_upper else 'range end'} {iv.upper}")
        print(f"lambda={lam}: stable mu interval [{iv.lower}, {iv.upper}] ({sides})")
        rows.append(f"{_fmt(lam)},0.0,{_fmt(iv.lower)},{_fmt(iv.upper)},"
                    f"{int(iv.bounded_lower)},{int(iv.bounded_upper)}")
    if args.out:
        _atomic_write(args.out, "\n".join(rows) + "\n")
    _write_manifest("msf interval", args, args.out)
    return exit_code


def _cmd_design(args: argparse.Namespace) -> int:
    model = load_model_config(args.model)
    network = _load_network(args.network, coupling=args.coupling)
    report: dict = {"method": args.method, "network": args.network, "N": network.size}
    exit_code = EXIT_OK
    try:
        if args.method == "weighted":
            result = design_weighted(model, network, _parse_range(args.range),
                                     args.margin, tol=args.tol,
                                     scan_points=args.scan)
        elif args.method == "binary":
            result = design_binary(model, network, symmetric=args.symmetric,
                                   time_limit=args.time_limit)
        else:
            result = design_matching(model, network)
    except (Infeasible, TimedOut) as exc:
        report.update(status="infeasible", detail=str(exc))
        _print_report(report)
        if args.report:
            _atomic_write(args.report, json.dumps(report, indent=2, sort_keys=True) + "\n")
        _write_manifest(f"design {args.method}", args, args.out or args.report)
        return EXIT_VERDICT

    report.update(
        status="ok",
        frobenius_norm=result.frobenius_norm,
        links=result.links,
        margin=result.margin,
        mode_gains=_gains_for_report(result.mode_gains),
        verified=result.verified,
        max_real_part=result.max_real_part,
        optimal=result.optimal,
    )
    if args.method == "weighted":
        report["trace"] = float(np.trace(result.feedback))
    if args.method == "matching":
        report["matching_residual"] = result.matching_residual
        report["matching_exact"] = result.matching_residual <= 1e-9
    if not result.verified:
        exit_code = EXIT_VERDICT

    _print_report(report)
    if args.out:
        _atomic_write(args.out, adjacency_csv_text(result.feedback))
    if args.report:
        _atomic_write(args.report, json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_manifest(f"design {args.method}", args, args.out or args.report)
    return exit_code


def _cmd_sweep_norm(args: argparse.Namespace) -> int:
    model = load_model_config(args.model)
    rows = norm_sweep(model, args.family, _parse_int_range(args.n),
                      margin=args.margin, search_range=_parse_range(args.range),
                      coupling=args.coupling, tol=args.tol, scan_points=args.scan)
    lines = ["N,weighted_norm,matching_norm,status"]
    lines += [f"{r.N},{_fmt(r.weighted_norm)},{_fmt(r.matching_norm)},{r.status}"
              for r in rows]
    _atomic_write(args.out, "\n".join(lines) + "\n")
    _write_manifest("sweep norm", args, args.out)
    bad = sum(1 for r in rows if r.status != "ok")
    print(f"wrote {len(rows)} sweep rows to {args.out} ({bad} infeasible)")
    return EXIT_VERDICT if bad else EXIT_OK


def _parse_x0(spec: str, size: int) -> np.ndarray:
    if spec == "ones":
        return np.ones(size)
    if spec.startswith("random:"):
        try:
            seed = int(spec.partition(":")[2])
        except ValueError as exc:
            raise BadParameter(f"x0 must be 'ones' or 'random:SEED', got {spec!r}") from exc
        return np.random.default_rng(seed).standard_normal(size)
    raise BadParameter(f"x0 must be 'ones' or 'random:SEED', got {spec!r}")


def _cmd_verify(args: argparse.Namespace) -> int:
    model = load_model_config(args.model)
    plant = _load_network(args.plant)
    if args.feedback == "zero":
        feedback = custom_network(np.zeros((plant.size, plant.size)))
    else:
        feedback = _load_network(args.feedback)
    system = build_closed_loop(model, plant, feedback)
    verdict = spectral_verdict(system)
    report = {
        "N": system.N,
        "n": system.n,
        "max_real_part": verdict.max_real_part,
        "stable": verdict.stable,
    }

    if args.simulate:
        x0 = _parse_x0(args.x0, system.N * system.n)
        result = simulate(system, x0, args.t_end, args.dt)
        report["diverged"] = result.diverged
        report["final_norm"] = float(np.linalg.norm(result.final.x))
        report["final_time"] = result.final.t
        if args.out:
            header = "t," + ",".join(f"x_{i + 1}" for i in range(system.N * system.n))
            lines = [header]
            lines += [_fmt(s.t) + "," + ",".join(_fmt(v) for v in s.x)
                      for s in result.states]
            _atomic_write(args.out, "\n".join(lines) + "\n")

    _print_report(report)
    _write_manifest("verify", args, args.out)
    return EXIT_OK if verdict.stable else EXIT_VERDICT


def _cmd_prob_stability(args: argparse.Namespace) -> int:
    model = load_model_config(args.model)
    estimate = stability_probability(
        model, args.family, args.trials, args.designer, seed=args.seed,
        search_range=_parse_range(args.range), margin=args.margin,
        scan_points=args.scan, workers=_worker_count())
    p_value = args.family.split(":")[2]
    report = {
        "family": args.family,
        "trials": estimate.trials,
        "stable_fraction": estimate.fraction,
        "ci_low": estimate.ci_low,
        "ci_high": estimate.ci_high,
        "stable_count": estimate.stable_count,
    }
    _print_report(report)
    if args.out:
        lines = ["p,trials,stable_fraction,ci_low,ci_high",
                 f"{p_value},{estimate.trials},{_fmt(estimate.fraction)},"
                 f"{_fmt(estimate.ci_low)},{_fmt(estimate.ci_high)}"]
        _atomic_write(args.out, "\n".join(lines) + "\n")
    _write_manifest("prob stability", args, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, help="model config file")


def _add_interval_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--range", default="-50:50",
                        help="mu search range low:high (default -50:50)")
    parser.add_argument("--scan", type=int, default=400,
                        help="scan resolution for sign changes (default 400)")
    parser.add_argument("--tol", type=float, default=1e-9,
                        help="bisection bracket tolerance (default 1e-9)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msfnet",
        description="Stability analysis and minimal-norm feedback design "
                    "for networks of identical LTI plants.")
    parser.add_argument("--version", action="version", version=f"msfnet {__version__}")
    top = parser.add_subparsers(dest="command", metavar="COMMAND")

    msf = top.add_parser("msf", help="stability function evaluation")
    msf_sub = msf.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    grid = msf_sub.add_parser("grid", help="evaluate sigma over a (lambda, mu) grid")
    _add_model(grid)
    grid.add_argument("--lambda", dest="lam", required=True, help="lambda range low:high")
    grid.add_argument("--mu", required=True, help="mu range low:high")
    grid.add_argument("--steps", type=int, default=101, help="grid steps per axis")
    grid.add_argument("--out", required=True, help="output CSV (lambda,mu,sigma)")
    grid.set_defaults(func=_cmd_msf_grid)

    interval = msf_sub.add_parser("interval", help="stable mu interval per mode")
    _add_model(interval)
    interval.add_argument("--lambda", dest="lam", type=float, required=True,
                          action="append", help="plant eigenvalue (repeatable)")
    _add_interval_flags(interval)
    interval.add_argument("--out", help="optional CSV output")
    interval.set_defaults(func=_cmd_msf_interval)

    design = top.add_parser("design", help="synthesize a feedback network")
    design_sub = design.add_subparsers(dest="subcommand", metavar="METHOD")
    for method in ("weighted", "binary", "matching"):
        sub = design_sub.add_parser(method, help=f"{method} design")
        _add_model(sub)
        sub.add_argument("--network", required=True,
                         help="plant network: complete:N | ring:N:k | er:N:p:seed | CSV path")
        sub.add_argument("--coupling", type=float, default=1.0,
                         help="scale factor folded into the plant network")
        sub.add_argument("--out", help="adjacency CSV for the designed network")
        sub.add_argument("--report", help="optional JSON report path")
        if method == "weighted":
            sub.add_argument("--margin", type=float, default=0.01,
                             help="interior stability margin (default 0.01)")
            _add_interval_flags(sub)
        if method == "binary":
            sub.add_argument("--symmetric", action="store_true",
                             help="restrict to symmetric feedback")
            sub.add_argument("--time-limit", type=float, default=60.0,
                             help="branch-and-bound budget in seconds")
        sub.set_defaults(func=_cmd_design, method=method)

    sweep = top.add_parser("sweep", help="design comparisons over network size")
    sweep_sub = sweep.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    norm = sweep_sub.add_parser("norm", help="weighted vs matching Frobenius norms")
    _add_model(norm)
    norm.add_argument("--family", required=True, help="complete | ring:k")
    norm.add_argument("--n", required=True, help="inclusive size range low:high")
    norm.add_argument("--margin", type=float, default=0.01)
    norm.add_argument("--coupling", type=float, default=1.0)
    _add_interval_flags(norm)
    norm.add_argument("--out", required=True, help="output CSV")
    norm.set_defaults(func=_cmd_sweep_norm)

    verify = top.add_parser("verify", help="full-spectrum verdict for given networks")
    _add_model(verify)
    verify.add_argument("--plant", required=True, help="plant network spec or CSV path")
    verify.add_argument("--feedback", required=True,
                        help="feedback network spec, CSV path, or 'zero'")
    verify.add_argument("--simulate", action="store_true",
                        help="also integrate the closed loop")
    verify.add_argument("--t-end", type=float, default=10.0)
    verify.add_argument("--dt", type=float, default=None,
                        help="RK4 step (default 1e-3 / spectral radius)")
    verify.add_argument("--x0", default="ones", help="'ones' or 'random:SEED'")
    verify.add_argument("--out", help="trajectory CSV when simulating")
    verify.set_defaults(func=_cmd_verify)

    prob = top.add_parser("prob", help="Monte Carlo studies")
    prob_sub = prob.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    stab = prob_sub.add_parser("stability", help="stability probability over random networks")
    _add_model(stab)
    stab.add_argument("--family", required=True, help="er:N:p")
    stab.add_argument("--trials", type=int, required=True)
    stab.add_argument("--seed", type=int, required=True,
                      help="master seed; trial k uses seed + k")
    stab.add_argument("--designer", default="weighted",
                      choices=("weighted", "binary", "matching"))
    stab.add_argument("--margin", type=float, default=0.01)
    _add_interval_flags(stab)
    stab.add_argument("--out", help="output CSV")
    stab.set_defaults(func=_cmd_prob_stability)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_fuse_value_flags(argv))
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (BadParameter, DimensionMismatch, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MsfnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
