"""Command-line front end.

    narrow-escape mfpt --eps 0.1 --method asymptotic --start center
    narrow-escape sweep --eps 0.2 0.1 0.05 --methods asymptotic series --out sweep.csv
    narrow-escape flux --eps 0.1 --out flux.csv
    narrow-escape validate
    narrow-escape rerun record.json

Single results are JSON records and tables are CSV; every JSON record embeds
its run manifest and every CSV gets a ``<path>.manifest.json`` sidecar.
``rerun`` replays a manifest and reproduces the output byte for byte.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from collections.abc import Sequence
from datetime import datetime, timezone

import numpy as np

from . import __version__
from . import asymptotics as asy
from .grid import PolarGrid, SingularGridError, solve_grid
from .montecarlo import THREADS_ENV, CensoringError, McConfig, Start, default_threads, simulate_mfpt
from .quadrature import QuadratureError
from .series import Geometry, a0_exact, compute_series, eval_v, flux_series, rescale

__all__ = ["main", "build_parser", "compute_value", "sweep_csv", "flux_csv"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4
METHODS = ("asymptotic", "series", "mc", "grid")
STARTS = ("center", "uniform", "max", "point")
CSV_HEADER = ("eps", "method", "start", "value", "stderr", "order")
ORDERS = {"asymptotic": "O(eps)", "series": "O(N^-3/2)", "mc": "O(dt^1/2)", "grid": "O(h)"}


class UsageError(ValueError):
    pass


def fmt(x: float | None) -> str:
    """Nine significant digits; blank for a missing value."""
    return "" if x is None else f"{x:.9g}"


def _round9(x: float | None) -> float | None:
    return None if x is None else float(fmt(x))


def regime(eps: float) -> str:
    """``inside`` for eps <= 0.3, ``marginal`` up to pi/2, ``outside`` beyond."""
    if eps <= asy.RELIABLE_EPS:
        return "inside"
    return "marginal" if eps < math.pi / 2.0 else "outside"


def _grid_mean(grid: PolarGrid) -> float:
    # control-volume areas as in the assembly: pole disk, annular sectors, rim half cells
    dr, dth = 1.0 / grid.n_r, 2.0 * math.pi / grid.n_theta
    r = grid.r
    area = r * dr * dth
    area[-1] = dth * (1.0 - (1.0 - dr / 2.0) ** 2) / 2.0
    total = math.pi * dr * dr / 4.0 * grid.v[0, 0] + float(np.sum(area[1:, None] * grid.v[1:]))
    return total / math.pi


def _grid_point(grid: PolarGrid, r: float, theta: float) -> float:
    # bilinear in (r, theta) on the periodic grid
    x = r * grid.n_r
    i = min(int(x), grid.n_r - 1)
    fr = x - i
    y = (theta % (2.0 * math.pi)) / (2.0 * math.pi) * grid.n_theta
    j = int(y) % grid.n_theta
    ft = y - int(y)
    j1 = (j + 1) % grid.n_theta
    v = grid.v
    lo = (1 - ft) * v[i, j] + ft * v[i, j1] if i > 0 else v[0, 0]
    hi = (1 - ft) * v[i + 1, j] + ft * v[i + 1, j1]
    return float((1 - fr) * lo + fr * hi)


def compute_value(
    eps: float,
    method: str,
    start: str,
    point: tuple[float, float] | None = None,
    *,
    n_terms: int = 512,
    paths: int = 100_000,
    dt: float = 1e-3,
    seed: int = 0,
    threads: int | None = None,
    n_r: int = 128,
    n_theta: int = 512,
) -> tuple[float, float | None, str]:
    """Dimensionless MFPT ``(value, stderr, order)`` for one method and start."""
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}")
    if start not in STARTS:
        raise UsageError(f"unknown start {start!r}")
    if start == "point" and point is None:
        raise UsageError("start 'point' needs --r and --theta")
    order = ORDERS[method]
    if method == "asymptotic":
        if start == "point":
            raise UsageError("asymptotic formulas exist only for center, uniform and max")
        if not 0.0 < eps < 1.0:
            raise UsageError(f"asymptotic method needs 0 < eps < 1, got {eps}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", asy.AsymptoticRegimeWarning)
            fn = {"center": asy.mfpt_center, "uniform": asy.mfpt_uniform, "max": asy.mfpt_max}[start]
            return fn(eps).value, None, order
    if method == "series":
        if start == "uniform":
            return a0_exact(eps) / 2.0 + 0.125, None, order
        sol = compute_series(eps, n_terms)
        r, th = {"center": (0.0, 0.0), "max": (1.0, 0.0)}.get(start, point)
        return float(eval_v(sol, r, th)), None, order
    if method == "mc":
        if start == "point":
            mc_start = Start.point(*point)
        else:
            mc_start = Start({"center": "center", "uniform": "uniform", "max": "antipodal"}[start])
        est = simulate_mfpt(Geometry(eps), McConfig(dt, paths, seed, start=mc_start), threads)
        return est.mean, est.stderr, order
    grid = solve_grid(eps, n_r, n_theta)
    if start == "center":
        return grid.center, None, order
    if start == "max":
        return grid.antipode, None, order
    if start == "uniform":
        return _grid_mean(grid), None, order
    return _grid_point(grid, *point), None, order


def sweep_csv(
    eps_list: Sequence[float],
    methods: Sequence[str],
    starts: Sequence[str] = ("center",),
    **kw,
) -> str:
    """CSV text with one row per (eps, method, start), in that nesting order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for eps in eps_list:
        for method in methods:
            for start in starts:
                if start == "point":
                    raise UsageError("sweep does not support start 'point'")
                value, stderr, order = compute_value(eps, method, start, **kw)
                w.writerow([fmt(eps), method, start, fmt(value), fmt(stderr), order])
    return buf.getvalue()


def flux_csv(eps: float, terms: int, n_samples: int, series_terms: int) -> tuple[str, float]:
    """Flux samples ``alpha, f_asymptotic, f_series`` and the conservation integral."""
    from .validation import flux_conservation

    if n_samples < 2:
        raise UsageError("need at least 2 samples")
    # built from integers so the grid is exactly antisymmetric and hits alpha = 0 for odd counts
    alpha = 0.999 * (2.0 * np.arange(n_samples) - (n_samples - 1)) / (n_samples - 1)
    sol = compute_series(eps, series_terms)
    f_series = flux_series(sol, math.pi - eps * alpha)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("alpha", "f_asymptotic", "f_series"))
    for a, fs in zip(alpha, f_series):
        w.writerow([fmt(a), fmt(asy.flux_asymptotic(float(a), eps, terms)), fmt(float(fs))])
    return buf.getvalue(), flux_conservation(eps, terms)


# ---------------------------------------------------------------- manifests


def _timestamp(override: str | None) -> str:
    if override:
        return override
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.strftime("%Y-%m-%dT%H:%M:%SZ")


# none of these change the bytes of a result
_NOT_PARAMS = {"func", "timestamp", "threads", "out", "command"}


def make_manifest(args: argparse.Namespace) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_PARAMS}
    return {
        "command": args.command,
        "parameters": params,
        "seed": args.seed,
        "version": __version__,
        "timestamp": _timestamp(args.timestamp),
    }


def manifest_argv(manifest: dict) -> list[str]:
    """Rebuild a command line from a manifest's parameter set."""
    params = dict(manifest["parameters"])
    argv = [manifest["command"]]
    positional = params.pop("record", None)
    for key, val in params.items():
        flag = "--" + key.replace("_", "-")
        if val is None or val is False:
            continue
        if val is True:
            argv.append(flag)
        elif isinstance(val, list):
            argv.append(flag)
            argv.extend(str(v) for v in val)
        else:
            argv += [flag, str(val)]
    if positional is not None:
        argv.append(positional)
    argv += ["--timestamp", manifest["timestamp"]]
    return argv


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc.strerror}") from exc


def _emit_table(text: str, manifest: dict, out: str | None) -> None:
    _emit(text, out)
    if out is not None:
        _emit(_dumps({"manifest": manifest}), out + ".manifest.json")


# ---------------------------------------------------------------- commands


def _threads(args) -> int:
    return default_threads() if args.threads is None else args.threads


def cmd_mfpt(args) -> int:
    point = (args.r, args.theta) if args.start == "point" else None
    if args.start == "point" and (args.r is None or args.theta is None):
        raise UsageError("start 'point' needs --r and --theta")
    value, stderr, order = compute_value(
        args.eps, args.method, args.start, point,
        n_terms=args.terms, paths=args.paths, dt=args.dt, seed=args.seed,
        threads=_threads(args), n_r=args.n_r, n_theta=args.n_theta,
    )
    geom = Geometry(args.eps, args.radius, args.diffusivity)
    record = {
        "manifest": make_manifest(args),
        "eps": args.eps,
        "method": args.method,
        "start": args.start,
        "value": _round9(value),
        "value_physical": _round9(rescale(value, geom)),
        "stderr": _round9(stderr),
        "stderr_physical": _round9(None if stderr is None else rescale(stderr, geom)),
        "order": order,
        "time_unit": "R^2/D",
        "asymptotic_regime": regime(args.eps),
    }
    if args.method == "asymptotic":
        # the O(1) correction is a large share of the total at practical eps
        record["leading_term"] = _round9(math.log(1.0 / args.eps))
        record["correction"] = _round9(value - math.log(1.0 / args.eps))
    _emit(_dumps(record), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    text = sweep_csv(
        args.eps, args.methods, args.starts,
        n_terms=args.terms, paths=args.paths, dt=args.dt, seed=args.seed,
        threads=_threads(args), n_r=args.n_r, n_theta=args.n_theta,
    )
    _emit_table(text, make_manifest(args), args.out)
    return EXIT_OK


def cmd_flux(args) -> int:
    text, total = flux_csv(args.eps, args.terms, args.samples, args.series_terms)
    manifest = make_manifest(args)
    _emit_table(text, manifest, args.out)
    report = {"manifest": manifest, "conservation": _round9(total), "target": _round9(-math.pi),
              "rel_err": _round9(abs(total + math.pi) / math.pi)}
    (sys.stdout if args.out else sys.stderr).write(_dumps(report))
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import ValidationOptions, run_all

    opts = ValidationOptions(
        eps_list=tuple(args.eps), n_terms=args.terms, mc_paths=args.paths,
        mc_time_step=args.dt, seed=args.seed, threads=_threads(args),
    )
    results = run_all(opts, args.only)
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    text = "\n".join(lines) + "\n"
    if args.out:
        _emit(text, args.out)
    sys.stdout.write(text)
    return EXIT_OK if passed == len(results) else EXIT_VALIDATION


def cmd_rerun(args) -> int:
    try:
        with open(args.record, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read {args.record}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.record} is not valid JSON: {exc}") from exc
    manifest = doc.get("manifest", doc)
    if "command" not in manifest or "parameters" not in manifest:
        raise UsageError(f"{args.record} holds no run manifest")
    if manifest["command"] == "rerun":
        raise UsageError("refusing to rerun a rerun")
    argv = manifest_argv(manifest)
    if args.out is not None:
        argv[1:1] = ["--out", args.out]
    if args.threads is not None:
        argv[1:1] = ["--threads", str(args.threads)]
    return main(argv)


# ---------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return n


def _seed(text: str) -> int:
    n = int(text, 0)
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="64-bit Monte Carlo seed (default 0)")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help=f"worker threads (default ${THREADS_ENV} or the CPU count)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--timestamp", default=None, help=argparse.SUPPRESS)

    numeric = argparse.ArgumentParser(add_help=False)
    numeric.add_argument("--terms", type=_positive_int, default=512, help="series terms N")
    numeric.add_argument("--paths", type=_positive_int, default=100_000, help="Monte Carlo paths")
    numeric.add_argument("--dt", type=float, default=1e-3, help="Monte Carlo time step")
    numeric.add_argument("--n-r", type=int, default=128, help="grid radial intervals")
    numeric.add_argument("--n-theta", type=int, default=512, help="grid angular nodes")

    p = argparse.ArgumentParser(prog="narrow-escape", description="Narrow-escape MFPT in the unit disk.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mfpt", parents=[common, numeric], help="one MFPT value as a JSON record")
    m.add_argument("--eps", type=float, required=True, help="window half-angle (radians)")
    m.add_argument("--method", choices=METHODS, default="asymptotic")
    m.add_argument("--start", choices=STARTS, default="center")
    m.add_argument("--r", type=float, default=None, help="start radius for --start point")
    m.add_argument("--theta", type=float, default=None, help="start angle for --start point")
    m.add_argument("--radius", "-R", type=float, default=1.0, help="disk radius R")
    m.add_argument("--diffusivity", "-D", type=float, default=1.0, help="diffusion coefficient D")
    m.set_defaults(func=cmd_mfpt)

    s = sub.add_parser("sweep", parents=[common, numeric], help="CSV over eps x method x start")
    s.add_argument("--eps", type=float, nargs="+", required=True)
    s.add_argument("--methods", choices=METHODS, nargs="+", default=["asymptotic", "series"])
    s.add_argument("--starts", choices=STARTS[:3], nargs="+", default=["center"])
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("flux", parents=[common], help="CSV of the flux profile across the window")
    f.add_argument("--eps", type=float, required=True)
    f.add_argument("--terms", type=_positive_int, default=asy.DEFAULT_FLUX_TERMS, help="expansion terms")
    f.add_argument("--samples", type=_positive_int, default=201, help="alpha samples on (-0.999, 0.999)")
    f.add_argument("--series-terms", type=_positive_int, default=512, help="terms of the Fourier series")
    f.set_defaults(func=cmd_flux)

    v = sub.add_parser("validate", parents=[common, numeric], help="run the acceptance suite")
    v.add_argument("--eps", type=float, nargs="+", default=[0.2, 0.1, 0.05],
                   help="eps values for the centre and uniform criteria")
    v.add_argument("--only", type=int, nargs="+", default=None, help="criterion numbers to run")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("rerun", help="replay a manifest (JSON record or .manifest.json)")
    r.add_argument("record")
    r.add_argument("--out", default=None, help="output path (default stdout)")
    r.add_argument("--threads", type=_positive_int, default=None)
    r.set_defaults(func=cmd_rerun)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    # LinAlgError derives from ValueError, so numerical failures go first
    except (QuadratureError, CensoringError, SingularGridError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"narrow-escape: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"narrow-escape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"narrow-escape: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
