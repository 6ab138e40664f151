"""Command-line interface: eval, coeffs, certify, separable, simulate.

Exit codes: 0 success (certify: PD), 2 validation failure, 3 domain or
geometry error, 4 certify NotPD, 5 certify Inconclusive. Errors are
single-line JSON objects {"error": code, "message": ...} on stderr; data
goes to stdout (or --out for simulate) as headerless CSV with '.' decimal
separator. The environment variable SPHERECOV_SEED supplies the default
seed; everything else is flags.
"""

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import GeometryError, KernelSpecError, SphereCovError
from .fields import (
    ProductPointSet,
    SpaceTimePointSet,
    SpherePointSet,
    kernel_label,
    sample_factorized,
    sample_spectral_s2,
    uniform_sphere_points,
)
from .gegenbauer import GegenbauerBasis
from .kernelspec import read_kernel_file
from .product_spheres import ProductSphereKernel, Separable, ps_kernel_eval, separability_test
from .schoenberg import INCONCLUSIVE, NOT_PD, PD, SchoenbergSequence, certify, kernel_eval, recover_coefficients
from .spacetime import SpaceTimeKernel, is_separable, st_kernel_eval

SEED_ENV_VAR = "SPHERECOV_SEED"
TAIL_WARN_THRESHOLD = 1e-6

BUILTIN_EXPRESSIONS = {
    "x": lambda x: x,
    "negx": lambda x: -x,
    "xsquared": lambda x: x * x,
    "legendre3": lambda x: 0.5 * (5.0 * x**3 - 3.0 * x),
    "expcos": lambda x: math.exp(x - 1.0),
}


class _ValidationFailure(Exception):
    """CLI-level input problem; maps to exit code 2."""


def _r(value) -> str:
    """Shortest round-tripping decimal form of a float."""
    return repr(float(value))


def _print_error(code: int, message: str):
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    # Argument errors must follow the JSON-on-stderr contract.
    def error(self, message):
        _print_error(2, message)
        raise SystemExit(2)


def _parse_float(text: str, name: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise _ValidationFailure(f"{name} must be a number, got {text!r}") from None
    if not math.isfinite(value):
        raise _ValidationFailure(f"{name} must be finite, got {text!r}")
    return value


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _ValidationFailure(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None


def _forbid(args, names, reason):
    for name in names:
        if getattr(args, name.strip("-").replace("-", "_")) is not None:
            raise _ValidationFailure(f"{name} is not valid {reason}")


# ---------------------------------------------------------------- eval


def cmd_eval(args) -> int:
    kernel = read_kernel_file(args.spec)
    rows = []
    if args.grid is not None:
        if args.grid < 2:
            raise _ValidationFailure(f"--grid must be at least 2, got {args.grid}")
        _forbid(args, ("--x", "--t", "--x1", "--x2"), "together with --grid")
        xs = np.linspace(-1.0, 1.0, args.grid)
        if isinstance(kernel, SchoenbergSequence):
            values = kernel_eval(kernel, xs)
            rows = [f"{_r(x)},{_r(v)}" for x, v in zip(xs, values)]
        elif isinstance(kernel, SpaceTimeKernel):
            ts = np.linspace(0.0, args.t_max, args.grid)
            for x in xs:
                values = st_kernel_eval(kernel, np.full_like(ts, x), ts)
                rows.extend(f"{_r(x)},{_r(t)},{_r(v)}" for t, v in zip(ts, values))
        else:
            for x1 in xs:
                values = ps_kernel_eval(kernel, np.full_like(xs, x1), xs)
                rows.extend(f"{_r(x1)},{_r(x2)},{_r(v)}" for x2, v in zip(xs, values))
    elif isinstance(kernel, SchoenbergSequence):
        if args.x is None:
            raise _ValidationFailure("a sphere spec needs --x (or --grid)")
        _forbid(args, ("--t", "--x1", "--x2"), "for a sphere spec")
        value = kernel_eval(kernel, _parse_float(args.x, "--x"))
        rows = [f"{args.x},{_r(value)}"]
    elif isinstance(kernel, SpaceTimeKernel):
        if args.x is None or args.t is None:
            raise _ValidationFailure("a sphere_time spec needs --x and --t (or --grid)")
        _forbid(args, ("--x1", "--x2"), "for a sphere_time spec")
        value = st_kernel_eval(kernel, _parse_float(args.x, "--x"), _parse_float(args.t, "--t"))
        rows = [f"{args.x},{args.t},{_r(value)}"]
    else:
        if args.x1 is None or args.x2 is None:
            raise _ValidationFailure("a product_spheres spec needs --x1 and --x2 (or --grid)")
        _forbid(args, ("--x", "--t"), "for a product_spheres spec")
        value = ps_kernel_eval(kernel, _parse_float(args.x1, "--x1"), _parse_float(args.x2, "--x2"))
        rows = [f"{args.x1},{args.x2},{_r(value)}"]
    print("\n".join(rows))
    return 0


# ---------------------------------------------------------------- coeffs / certify


def _load_table_function(path: str, n_max: int, cover: tuple | None):
    """Monotone piecewise-cubic interpolant of a two-column CSV table.

    The table needs at least 2*n_max nodes; `cover` is the (lo, hi) range
    the nodes must span so the interpolant is never extrapolated.
    """
    xs, ys = [], []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise _ValidationFailure(
                        f"{path}:{lineno}: expected two comma-separated columns, got {len(parts)}"
                    )
                try:
                    x, y = float(parts[0]), float(parts[1])
                except ValueError:
                    raise _ValidationFailure(f"{path}:{lineno}: non-numeric entry") from None
                if not (math.isfinite(x) and math.isfinite(y)):
                    raise _ValidationFailure(f"{path}:{lineno}: non-finite entry")
                if abs(x) > 1.0:
                    raise _ValidationFailure(f"{path}:{lineno}: x must lie in [-1, 1], got {x!r}")
                xs.append(x)
                ys.append(y)
    except OSError as exc:
        raise _ValidationFailure(f"cannot read table {path}: {exc}") from exc
    if len(xs) < 2 * n_max:
        raise _ValidationFailure(
            f"table needs at least 2*n_max = {2 * n_max} nodes, got {len(xs)}"
        )
    order = np.argsort(xs)
    xs = np.asarray(xs)[order]
    ys = np.asarray(ys)[order]
    if np.any(np.diff(xs) == 0.0):
        raise _ValidationFailure("table has duplicate x values")
    if cover is not None and (xs[0] > cover[0] or xs[-1] < cover[1]):
        raise _ValidationFailure(
            f"table spans [{xs[0]!r}, {xs[-1]!r}] but must cover [{cover[0]!r}, {cover[1]!r}]"
        )
    return PchipInterpolator(xs, ys, extrapolate=False)


def _function_from_args(args, n_max: int, cover: tuple | None):
    if (args.table is None) == (args.expr is None):
        raise _ValidationFailure("exactly one of --table or --expr is required")
    if args.expr is not None:
        if args.expr not in BUILTIN_EXPRESSIONS:
            raise _ValidationFailure(
                f"unknown expression {args.expr!r}; available: {sorted(BUILTIN_EXPRESSIONS)}"
            )
        return BUILTIN_EXPRESSIONS[args.expr]
    return _load_table_function(args.table, n_max, cover)


def cmd_coeffs(args) -> int:
    basis = GegenbauerBasis.from_index(args.lam)
    n_max = args.nmax
    quad_order = args.quad_order if args.quad_order is not None else max(64, 2 * (n_max + 1))
    rule_cover = None
    if args.table is not None:
        from .gegenbauer import quadrature

        rule = quadrature(args.lam, quad_order)
        rule_cover = (float(rule.nodes[0]), float(rule.nodes[-1]))
    g = _function_from_args(args, n_max, rule_cover)
    coeffs = recover_coefficients(g, basis, n_max, quad_order)
    tail = float(np.sum(np.abs(coeffs[np.arange(coeffs.size) > n_max / 2])))
    print("\n".join(f"{n},{_r(a)}" for n, a in enumerate(coeffs)))
    if tail > TAIL_WARN_THRESHOLD:
        print(
            f"warning: coefficient mass {tail:.3e} beyond degree n_max/2 exceeds "
            f"{TAIL_WARN_THRESHOLD:.0e}; the truncation may be too short",
            file=sys.stderr,
        )
    return 0


def cmd_certify(args) -> int:
    basis = GegenbauerBasis.from_index(args.lam)
    g = _function_from_args(args, args.nmax, (-1.0, 1.0))
    certificate = certify(
        g,
        basis,
        n_max=args.nmax,
        coeff_tol=args.coeff_tol,
        eig_tol=args.eig_tol,
        gram_trials=args.gram_trials,
        seed=args.seed if args.seed is not None else _default_seed(),
    )
    print(json.dumps(certificate.to_dict(), indent=2))
    if certificate.verdict == PD:
        return 0
    if certificate.verdict == NOT_PD:
        return 4
    assert certificate.verdict == INCONCLUSIVE
    return 5


# ---------------------------------------------------------------- separable


def cmd_separable(args) -> int:
    kernel = read_kernel_file(args.spec)
    if isinstance(kernel, ProductSphereKernel):
        result = separability_test(kernel, args.tol if args.tol is not None else 1e-9)
        if isinstance(result, Separable):
            verdict = {
                "separable": True,
                "row_factors": [float(v) for v in result.row_factors],
                "col_factors": [float(v) for v in result.col_factors],
            }
        else:
            verdict = {
                "separable": False,
                "minor": list(result.minor),
                "value": result.value,
            }
    elif isinstance(kernel, SpaceTimeKernel):
        verdict = {"separable": is_separable(kernel, args.tol if args.tol is not None else 1e-12)}
    else:
        raise _ValidationFailure("separability applies to sphere_time and product_spheres specs")
    print(json.dumps(verdict, indent=2))
    return 0


# ---------------------------------------------------------------- simulate


def _read_points_file(path: str, kernel):
    """Parse a points CSV whose column layout is fixed by the kernel kind."""
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    rows.append([float(p) for p in line.split(",")])
                except ValueError:
                    raise _ValidationFailure(f"{path}:{lineno}: non-numeric entry") from None
    except OSError as exc:
        raise _ValidationFailure(f"cannot read points file {path}: {exc}") from exc
    if not rows:
        raise _ValidationFailure(f"points file {path} is empty")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise _ValidationFailure(f"points file {path} has ragged rows (widths {sorted(widths)})")
    data = np.array(rows)

    if isinstance(kernel, SchoenbergSequence):
        expected = kernel.basis.dimension + 1
        if data.shape[1] != expected:
            raise _ValidationFailure(
                f"sphere points need {expected} columns (coordinates in R^{expected}), "
                f"got {data.shape[1]}"
            )
        return SpherePointSet(dimension=kernel.basis.dimension, points=data)
    if isinstance(kernel, SpaceTimeKernel):
        expected = kernel.basis.dimension + 2
        if data.shape[1] != expected:
            raise _ValidationFailure(
                f"sphere_time points need {expected} columns (coordinates then time), "
                f"got {data.shape[1]}"
            )
        space = SpherePointSet(dimension=kernel.basis.dimension, points=data[:, :-1])
        return SpaceTimePointSet(space=space, times=data[:, -1])
    d1 = kernel.basis1.dimension
    d2 = kernel.basis2.dimension
    expected = d1 + d2 + 2
    if data.shape[1] != expected:
        raise _ValidationFailure(
            f"product points need {expected} columns (first factor then second), "
            f"got {data.shape[1]}"
        )
    first = SpherePointSet(dimension=d1, points=data[:, : d1 + 1])
    second = SpherePointSet(dimension=d2, points=data[:, d1 + 1 :])
    return ProductPointSet(first=first, second=second)


def _random_points(kernel, n: int, seed: int):
    """Deterministic point generation with streams split off the seed."""
    if n < 1:
        raise _ValidationFailure(f"--random must be at least 1, got {n}")
    derived = np.random.SeedSequence(seed).generate_state(2)
    if isinstance(kernel, SchoenbergSequence):
        return uniform_sphere_points(kernel.basis.dimension, n, int(derived[0]))
    if isinstance(kernel, SpaceTimeKernel):
        space = uniform_sphere_points(kernel.basis.dimension, n, int(derived[0]))
        times = np.random.default_rng(int(derived[1])).uniform(0.0, 1.0, n)
        return SpaceTimePointSet(space=space, times=times)
    first = uniform_sphere_points(kernel.basis1.dimension, n, int(derived[0]))
    second = uniform_sphere_points(kernel.basis2.dimension, n, int(derived[1]))
    return ProductPointSet(first=first, second=second)


def _point_rows(points) -> list:
    if isinstance(points, SpherePointSet):
        return [",".join(_r(c) for c in row) for row in points.points]
    if isinstance(points, SpaceTimePointSet):
        return [
            ",".join(_r(c) for c in row) + f",{_r(t)}"
            for row, t in zip(points.space.points, points.times)
        ]
    return [
        ",".join(_r(c) for c in np.concatenate([p, q]))
        for p, q in zip(points.first.points, points.second.points)
    ]


def cmd_simulate(args) -> int:
    kernel = read_kernel_file(args.spec)
    seed = args.seed if args.seed is not None else _default_seed()
    if args.samples < 1:
        raise _ValidationFailure(f"--samples must be at least 1, got {args.samples}")
    if args.points is not None:
        points = _read_points_file(args.points, kernel)
    else:
        points = _random_points(kernel, args.random, seed)

    if args.method == "spectral":
        if not isinstance(kernel, SchoenbergSequence):
            raise GeometryError("--method spectral supports only sphere specs with d=2")
        sample = sample_spectral_s2(kernel, points, args.samples, seed, degree_cap=args.degree_cap)
    else:
        if args.degree_cap is not None:
            raise _ValidationFailure("--degree-cap applies to --method spectral only")
        sample = sample_factorized(kernel, points, args.samples, seed, jitter=args.jitter)

    n = sample.n_points
    lines = [
        f"# kernel: {kernel_label(kernel)}",
        f"# method: {args.method}",
        f"# seed: {seed}",
        f"# samples: {args.samples}",
        f"# points: {n}",
    ]
    lines.extend(f"# point_{i}: {row}" for i, row in enumerate(_point_rows(points)))
    lines.append("sample," + ",".join(f"p_{i}" for i in range(n)))
    for k, row in enumerate(sample.values):
        lines.append(f"{k}," + ",".join(_r(v) for v in row))
    text = "\n".join(lines) + "\n"

    if args.out is None:
        sys.stdout.write(text)
        return 0
    out_dir = os.path.dirname(os.path.abspath(args.out))
    fd, tmp_path = tempfile.mkstemp(prefix=".spherecov-", dir=out_dir)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp_path, args.out)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return 0


# ---------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spherecov", description="Isotropic covariance kernels on spheres.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate a kernel spec at points or on a grid")
    p_eval.add_argument("spec", help="kernel spec JSON file")
    p_eval.add_argument("--x", help="cosine argument (sphere, sphere_time)")
    p_eval.add_argument("--t", help="time lag (sphere_time)")
    p_eval.add_argument("--x1", help="first cosine (product_spheres)")
    p_eval.add_argument("--x2", help="second cosine (product_spheres)")
    p_eval.add_argument("--grid", type=int, help="emit a uniform grid with this many points per axis")
    p_eval.add_argument("--t-max", type=float, default=1.0, help="grid time range [0, t-max] (default 1)")
    p_eval.set_defaults(func=cmd_eval)

    def add_function_args(p):
        p.add_argument("--lambda", dest="lam", type=float, required=True, help="Gegenbauer index (d-1)/2")
        p.add_argument("--nmax", type=int, default=30, help="largest recovered degree (default 30)")
        p.add_argument("--table", help="CSV table of x,g(x) rows to interpolate")
        p.add_argument("--expr", help=f"built-in expression: {', '.join(sorted(BUILTIN_EXPRESSIONS))}")

    p_coeffs = sub.add_parser("coeffs", help="recover Fourier-Gegenbauer coefficients")
    add_function_args(p_coeffs)
    p_coeffs.add_argument("--quad-order", type=int, help="quadrature order (default max(64, 2*(nmax+1)))")
    p_coeffs.set_defaults(func=cmd_coeffs)

    p_cert = sub.add_parser("certify", help="certify positive definiteness")
    add_function_args(p_cert)
    p_cert.add_argument("--coeff-tol", type=float, default=1e-8, help="coefficient tolerance (default 1e-8)")
    p_cert.add_argument("--eig-tol", type=float, help="Gram eigenvalue tolerance (default 1e-8 * gram size)")
    p_cert.add_argument("--gram-trials", type=int, default=5, help="random Gram point sets (default 5)")
    p_cert.add_argument("--seed", type=int, help=f"trial seed (default ${SEED_ENV_VAR} or 0)")
    p_cert.set_defaults(func=cmd_certify)

    p_sep = sub.add_parser("separable", help="test a spec for separability")
    p_sep.add_argument("spec", help="kernel spec JSON file (sphere_time or product_spheres)")
    p_sep.add_argument("--tol", type=float, help="tolerance (default 1e-9 matrix, 1e-12 sphere_time)")
    p_sep.set_defaults(func=cmd_separable)

    p_sim = sub.add_parser("simulate", help="draw Gaussian field realizations")
    p_sim.add_argument("spec", help="kernel spec JSON file")
    src = p_sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="CSV file of evaluation points")
    src.add_argument("--random", type=int, help="draw this many uniform random points")
    p_sim.add_argument("--samples", type=int, default=1, help="number of realizations (default 1)")
    p_sim.add_argument("--seed", type=int, help=f"seed (default ${SEED_ENV_VAR} or 0)")
    p_sim.add_argument(
        "--method", choices=("factorized", "spectral"), default="factorized",
        help="sampler (spectral: sphere kind with d=2 only)",
    )
    p_sim.add_argument("--jitter", type=float, help="diagonal jitter (default 1e-10 * trace/dim)")
    p_sim.add_argument("--degree-cap", type=int, help="spectral expansion cap (default: truncation)")
    p_sim.add_argument("--out", help="output CSV path (default: stdout); written atomically")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _ValidationFailure as exc:
        _print_error(2, str(exc))
        return 2
    except KernelSpecError as exc:
        _print_error(2, str(exc))
        return 2
    except SphereCovError as exc:
        _print_error(3, str(exc))
        return 3


if __name__ == "__main__":
    sys.exit(main())
