"""Command-line front end: deterministic CSV emission and one-line summaries.

Exit codes: 0 success/confirmed, 1 violated or runtime failure, 2 numerically
inconclusive, 64 usage error.  Re-running a command with identical arguments
reproduces identical bytes.
"""
from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

from .charfun import PhiParams, phi_d1, phi_d2, phi_eval
from .model import DegenerateGeneratorError, GFunction, Schedule, beta_of, sigma_of
from .solver import (
    CFLError,
    Field,
    Grid,
    InstabilityError,
    SolveConfig,
    convergence_study,
    solve,
)
from .expectation import (
    ClippedAbsSpec,
    ClippedPolySpec,
    CosineSpec,
    ExpectConfig,
    GaussBumpSpec,
    PhiSpec,
    TestFunctionSpec,
    convolve_expect,
    evaluate,
    expect_scaled,
)
from .theorems import (
    TheoremReport,
    check_eigen_decay,
    check_separation,
    verify_theorem1,
    verify_theorem2,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 64
        raise UsageError(message)


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def parse_g(text: str) -> GFunction:
    parts = text.replace(",", ":").split(":")
    if len(parts) != 2:
        raise UsageError(f"expected sigma_lo:sigma_hi, got {text!r}")
    try:
        return GFunction(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def parse_schedule(text: str) -> Schedule:
    segments = []
    for chunk in text.split(","):
        parts = chunk.split(":")
        if len(parts) != 3:
            raise UsageError(f"expected sigma_lo:sigma_hi:duration, got {chunk!r}")
        try:
            segments.append((GFunction(float(parts[0]), float(parts[1])), float(parts[2])))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    try:
        return Schedule(tuple(segments))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_kv(body: str, allowed: dict[str, float]) -> dict[str, float]:
    out = dict(allowed)
    if not body:
        return out
    for pair in body.split(","):
        if "=" not in pair:
            raise UsageError(f"expected key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        key = key.strip()
        if key not in allowed:
            raise UsageError(f"unknown key {key!r}")
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise UsageError(f"bad value for {key!r}: {val!r}") from exc
    return out


def parse_function(text: str) -> TestFunctionSpec:
    """Mini-language: phi:..., cos:..., gauss:..., clipabs:..., const:V."""
    name, _, body = text.partition(":")
    try:
        if name == "phi":
            kv = _parse_kv(body, {"beta": 1.0, "lambda": 1.0, "c": 1.0, "theta": 0.0})
            return PhiSpec(PhiParams(kv["beta"], kv["lambda"], kv["c"], kv["theta"]))
        if name == "cos":
            kv = _parse_kv(body, {"freq": 1.0, "phase": 0.0})
            return CosineSpec(kv["freq"], kv["phase"])
        if name == "gauss":
            kv = _parse_kv(body, {"center": 0.0, "width": 1.0})
            return GaussBumpSpec(kv["center"], kv["width"])
        if name == "clipabs":
            kv = _parse_kv(body, {"clip": 10.0, "amplitude": 1.0})
            return ClippedAbsSpec(kv["clip"], kv["amplitude"])
        if name == "const":
            try:
                v = float(body)
            except ValueError as exc:
                raise UsageError(f"const needs a numeric value, got {body!r}") from exc
            return ClippedPolySpec((v,), abs(v) + 1.0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown function kind {name!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad numeric list {text!r}") from exc


def _parse_range(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"expected min:max, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc
    if not hi > lo:
        raise UsageError(f"range must be increasing, got {text!r}")
    return lo, hi


def _write_csv(path: Optional[str], header: str, rows) -> None:
    lines = [header] + [",".join(cells) for cells in rows]
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"bad config line {line!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config(args: argparse.Namespace, argv: Sequence[str]) -> None:
    """Flat key = value config; explicit flags win over config values."""
    if not getattr(args, "config", None):
        return
    values = _load_config(args.config)
    for dest, raw in values.items():
        if not hasattr(args, dest):
            raise UsageError(f"config key {dest!r} does not match any flag")
        flag = "--" + dest.replace("_", "-")
        if flag in argv:
            continue
        current = getattr(args, dest)
        if isinstance(current, bool):
            setattr(args, dest, raw.lower() in ("1", "true", "yes"))
        elif isinstance(current, int):
            setattr(args, dest, int(raw))
        elif isinstance(current, float):
            setattr(args, dest, float(raw))
        else:
            setattr(args, dest, raw)


# ---------------------------------------------------------------------------
# subcommands


def cmd_phi(args) -> int:
    betas = _parse_floats(args.betas)
    if any(b < 1.0 for b in betas):
        raise UsageError("all betas must be >= 1")
    if args.n < 2:
        raise UsageError("n must be >= 2")
    lo, hi = _parse_range(args.range)
    xs = [lo + (hi - lo) * i / (args.n - 1) for i in range(args.n)]
    if len(betas) == 1:
        b = betas[0]
        header = "x,phi,phi_d1,phi_d2"
        rows = [
            (_fmt(x), _fmt(phi_eval(b, x)), _fmt(phi_d1(b, x)), _fmt(phi_d2(b, x)))
            for x in xs
        ]
    else:
        header = "x," + ",".join(f"phi_beta_{_fmt(b)}" for b in betas)
        rows = [
            tuple([_fmt(x)] + [_fmt(phi_eval(b, x)) for b in betas]) for x in xs
        ]
    _write_csv(args.out, header, rows)
    if args.out:
        print(f"phi: wrote {args.n} rows for betas {args.betas} to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    schedule = parse_schedule(args.schedule)
    fn = parse_function(args.init)
    lo, hi = _parse_range(args.domain)
    grid = Grid(lo, hi, args.n, args.boundary)
    initial = Field.sample(grid, lambda x: evaluate(fn, x))
    cfg = SolveConfig(args.cfl, args.error_estimate)
    report = solve(schedule, initial, cfg)
    rows = [
        (_fmt(x), _fmt(u))
        for x, u in zip(report.final.grid.nodes(), report.final.values)
    ]
    _write_csv(args.out, "x,u", rows)
    est = "" if report.error_estimate is None else f" error_estimate={_fmt(report.error_estimate)}"
    print(
        f"solve: t={_fmt(schedule.total_duration)} steps={report.steps_taken}"
        f" min={_fmt(float(report.final.values.min()))}"
        f" max={_fmt(float(report.final.values.max()))}{est}"
    )
    return EXIT_OK


def cmd_expect(args) -> int:
    g = parse_g(args.g)
    fn = parse_function(args.f)
    ts = _parse_floats(args.t)
    cfg = ExpectConfig(args.n, args.cfl, True)
    rows = []
    for t in ts:
        res = expect_scaled(g, fn, t, args.x, cfg)
        rows.append((_fmt(t), _fmt(args.x), _fmt(res.value), _fmt(res.error_estimate)))
        print(f"expect: t={_fmt(t)} x={_fmt(args.x)} value={_fmt(res.value)}"
              f" error_estimate={_fmt(res.error_estimate)}")
    if args.out:
        _write_csv(args.out, "t,x,value,error_estimate", rows)
    return EXIT_OK


def cmd_convolve(args) -> int:
    if not args.g:
        raise UsageError("need at least one --g")
    gs = [parse_g(text) for text in args.g]
    fn = parse_function(args.f)
    cfg = ExpectConfig(args.n, args.cfl, True)
    res = convolve_expect(gs, fn, cfg)
    total = float(len(gs))
    print(f"convolve: factors={len(gs)} value={_fmt(res.value)}"
          f" error_estimate={_fmt(res.error_estimate)}")
    if args.out:
        _write_csv(args.out, "t,x,value,error_estimate",
                   [(_fmt(total), _fmt(0.0), _fmt(res.value), _fmt(res.error_estimate))])
    return EXIT_OK


def _emit_report(report: TheoremReport, out: Optional[str]) -> int:
    if out:
        rows = [
            (
                _fmt(p.t), _fmt(p.x), _fmt(p.measured), _fmt(p.reference),
                "" if p.bound is None else _fmt(p.bound), _fmt(p.error_estimate),
            )
            for p in report.sweep
        ]
        _write_csv(out, "t,x,measured,reference,bound,error_estimate", rows)
    print(f"{report.name}: verdict={report.verdict} margin={_fmt(report.margin)}")
    return report.exit_code


def cmd_theorem1(args) -> int:
    report = verify_theorem1(
        parse_g(args.g1), parse_g(args.g2), _parse_floats(args.t),
        args.tol, ExpectConfig(args.n, args.cfl, True),
    )
    return _emit_report(report, args.out)


def cmd_theorem2(args) -> int:
    report = verify_theorem2(
        parse_g(args.g1), parse_g(args.g2), _parse_floats(args.t),
        args.tol, ExpectConfig(args.n, args.cfl, True),
    )
    return _emit_report(report, args.out)


def cmd_eigen_check(args) -> int:
    report = check_eigen_decay(
        parse_g(args.g), _parse_floats(args.t),
        probes=_parse_floats(args.probes), tol=args.tol,
        cfg=ExpectConfig(args.n, args.cfl, True),
    )
    return _emit_report(report, args.out)


def cmd_separation(args) -> int:
    if not (1.0 <= args.alpha < args.beta):
        raise UsageError("need 1 <= alpha < beta")
    report = check_separation(args.alpha, args.beta, args.n)
    return _emit_report(report, args.out)


def cmd_convergence(args) -> int:
    g = parse_g(args.g)
    beta = beta_of(g)
    sigma = sigma_of(g)
    n_list = [int(v) for v in _parse_floats(args.n_list)]
    decay = math.exp(-0.5 * sigma**2 * args.t)
    study = convergence_study(
        Schedule.single(g, args.t),
        lambda x: phi_eval(beta, x),
        n_list,
        exact_fn=lambda x: decay * phi_eval(beta, x),
        cfg=SolveConfig(args.cfl, False),
    )
    rows = []
    for i, (n, err) in enumerate(study.points):
        order = study.orders[i - 1] if i > 0 else float("nan")
        rows.append((str(n), _fmt(err), "" if math.isnan(order) else _fmt(order)))
        print(f"convergence: n={n} error={_fmt(err)}"
              + (f" order={_fmt(order)}" if not math.isnan(order) else ""))
    if args.out:
        _write_csv(args.out, "n,error,order", rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file; flags win")
    p.add_argument("--out", help="output CSV path (default: no file)")


def build_parser() -> _Parser:
    parser = _Parser(prog="gnormal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi", help="sample the characteristic family to CSV")
    p.add_argument("--betas", default="2", help="comma-separated list of betas")
    p.add_argument("--range", default=f"{-math.pi}:{3*math.pi}", help="x range min:max")
    p.add_argument("--n", type=int, default=1000)
    _add_common(p)
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("solve", help="integrate the G-heat equation")
    p.add_argument("--schedule", required=True, help="lo:hi:duration[,lo:hi:duration...]")
    p.add_argument("--init", required=True, help="initial function spec")
    p.add_argument("--domain", default=f"0:{2*math.pi}", help="spatial domain min:max")
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--boundary", choices=("periodic", "edge_copy"), default="periodic")
    p.add_argument("--cfl", type=float, default=0.5)
    p.add_argument("--error-estimate", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("expect", help="sublinear expectation of a test function")
    p.add_argument("--g", required=True, help="generator sigma_lo:sigma_hi")
    p.add_argument("--f", required=True, help="test function spec")
    p.add_argument("--t", default="1", help="comma-separated time points")
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--cfl", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("convolve", help="sequential convolution expectation")
    p.add_argument("--g", action="append", help="generator, repeatable, outer first")
    p.add_argument("--f", required=True, help="test function spec")
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--cfl", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_convolve)

    for name, func in (("theorem1", cmd_theorem1), ("theorem2", cmd_theorem2)):
        p = sub.add_parser(name, help=f"numerical {name} check")
        p.add_argument("--g1", required=True)
        p.add_argument("--g2", required=True)
        p.add_argument("--t", default="0.5,1,2,4,8")
        p.add_argument("--tol", type=float, default=5e-3)
        p.add_argument("--n", type=int, default=1024)
        p.add_argument("--cfl", type=float, default=0.5)
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("eigen-check", help="semigroup decay check")
    p.add_argument("--g", required=True)
    p.add_argument("--t", default="0.25,1,4")
    p.add_argument("--probes", default=f"0,{math.pi/3},{math.pi}")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--cfl", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_eigen_check)

    p = sub.add_parser("separation", help="characteristic separation inequality scan")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", type=int, default=100001)
    _add_common(p)
    p.set_defaults(func=cmd_separation)

    p = sub.add_parser("convergence", help="resolution study on the eigenfunction problem")
    p.add_argument("--g", required=True)
    p.add_argument("--n-list", default="256,512,1024")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--cfl", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_convergence)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args, argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateGeneratorError,) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CFLError, InstabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
