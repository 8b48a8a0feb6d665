"""Command-line front end.

Subcommands expose each computation with reproducible seeds and
bit-specified outputs. Exit codes: 0 all checks passed, 1 a reported
check failed, 2 parse error, 3 numerical failure, 4 exceptional
basepoint, 5 resonance / small denominator, 6 not a self-map.

Randomized commands require an explicit --seed; there is no implicit
time seed. A config file (key=value lines, keys are long option names)
supplies defaults that the command line overrides.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import discmaps, linearize, measure, orbits, reports
from .core import Polynomial, parse_point
from .errors import (
    ExceptionalBasepoint,
    NotASelfMap,
    NotAttracting,
    NumericalError,
    OutsideDisc,
    PolynomialParseError,
    PostcriticalOverlap,
    ResonantMultiplier,
)

EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_NUMERICAL = 3
EXIT_EXCEPTIONAL = 4
EXIT_RESONANCE = 5
EXIT_NOT_SELF_MAP = 6


def _poly_arg(text: str) -> Polynomial:
    try:
        return Polynomial.from_text(text)
    except PolynomialParseError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _point_arg(text: str) -> complex:
    try:
        return parse_point(text)
    except PolynomialParseError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _emit(args, report: dict) -> None:
    text = reports.json_report(report)
    sys.stdout.write(text)
    if getattr(args, "report", None):
        with open(args.report, "w") as fh:
            fh.write(text)


def _panel_by_label(label: str) -> measure.TestFunction:
    for fn in measure.PANEL:
        if fn.label == label:
            return fn
    raise argparse.ArgumentTypeError(
        f"unknown test function {label!r}; choose from "
        + ", ".join(fn.label for fn in measure.PANEL)
    )


# -- classify -------------------------------------------------------------


def cmd_classify(args) -> int:
    P = args.polynomial
    rows = []
    ok = True
    for m in range(1, args.period + 1):
        rootset = orbits.periodic_points(P, m)
        for orbit in orbits.group_into_orbits(rootset, P, m):
            if orbit.period != m:
                continue
            rows.append(
                {
                    "points": [complex(z) for z in orbit.points],
                    "period": orbit.period,
                    "multiplier": complex(orbit.multiplier),
                    "class": str(orbit.classification),
                }
            )
    census = orbits.nonrepelling_census(P, args.period)
    bound = 3 * P.degree - 1
    ok = census <= bound
    table = ["period  class                    multiplier            points"]
    for row in rows:
        pts = "  ".join(
            f"{z.real:+.6f}{z.imag:+.6f}i" for z in row["points"]
        )
        lam = row["multiplier"]
        table.append(
            f"{row['period']:>6}  {row['class']:<23}  "
            f"{lam.real:+.6f}{lam.imag:+.6f}i  {pts}"
        )
    print("\n".join(table), file=sys.stderr)
    _emit(
        args,
        {
            "command": "classify",
            "polynomial": P.to_text(),
            "period_max": args.period,
            "orbits": rows,
            "census": {"count": census, "bound": bound, "ok": ok},
        },
    )
    return 0 if ok else EXIT_CHECK_FAILED


# -- julia ----------------------------------------------------------------


def cmd_julia(args) -> int:
    P = args.polynomial
    basepoint = args.basepoint
    if basepoint is None:
        basepoint = complex(P.escape_radius() + 1.0)
    sampled = P.degree**args.depth > args.budget or args.samples is not None
    if sampled and args.seed is None:
        raise PolynomialParseError("sampled julia clouds require --seed")
    cloud = orbits.julia_cloud(
        P,
        basepoint,
        args.depth,
        budget=args.budget,
        rng_seed=args.seed,
        samples=args.samples,
        burn_in=args.burn_in,
        tasks=args.tasks,
    )
    csv_text = reports.cloud_csv(cloud.points, cloud.weights)
    with open(args.output, "w") as fh:
        fh.write(csv_text)
    raster_path = None
    if args.raster:
        if not args.bbox:
            raise PolynomialParseError("--raster needs --bbox x0,x1,y0,y1")
        image = reports.raster_hits(
            cloud.points, args.bbox, args.width, args.height
        )
        with open(args.raster, "wb") as fh:
            fh.write(reports.pgm_bytes(image))
        raster_path = args.raster
    _emit(
        args,
        {
            "command": "julia",
            "polynomial": P.to_text(),
            "basepoint": complex(basepoint),
            "depth": args.depth,
            "mode": "sampled" if sampled else "exact",
            "points": cloud.size,
            "output": args.output,
            "raster": raster_path,
            "weight_sum": float(cloud.weights.sum()),
        },
    )
    return 0


# -- measure --------------------------------------------------------------


def cmd_measure_gap(args) -> int:
    P = args.polynomial
    sampled = P.degree**args.n > args.budget
    if sampled and args.seed is None:
        raise PolynomialParseError("sampled gap estimates require --seed")
    rep = measure.weak_gap(
        P,
        args.x,
        args.y,
        args.n,
        budget=args.budget,
        rng_seed=args.seed,
        samples=args.samples,
        tasks=args.tasks,
    )
    ok = rep.gap <= args.threshold if args.threshold is not None else True
    _emit(
        args,
        {
            "command": "measure gap",
            "polynomial": P.to_text(),
            "x": complex(args.x),
            "y": complex(args.y),
            "n": args.n,
            "exact": rep.exact,
            "per_function": rep.per_function,
            "gap": rep.gap,
            "threshold": args.threshold,
            "ok": ok,
        },
    )
    return 0 if ok else EXIT_CHECK_FAILED


def cmd_measure_cesaro(args) -> int:
    P = args.polynomial
    lam_n = measure.cesaro(P, args.x, args.n, budget=args.budget)
    lam_n1 = measure.cesaro(P, args.x, args.n + 1, budget=args.budget)
    observed = measure.tv_distance(lam_n1, lam_n)
    bound = 2.0 / (args.n + 1)
    ok = observed <= bound + 1e-9
    _emit(
        args,
        {
            "command": "measure cesaro-massgap",
            "polynomial": P.to_text(),
            "x": complex(args.x),
            "n": args.n,
            "observed_tv": observed,
            "bound": bound,
            "ok": ok,
        },
    )
    return 0 if ok else EXIT_CHECK_FAILED


def cmd_measure_duality(args) -> int:
    P = args.polynomial
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.cases):
        atoms = rng.standard_normal(args.atoms) + 1j * rng.standard_normal(args.atoms)
        weights = rng.uniform(0.2, 1.0, args.atoms)
        nu = measure.EmpiricalMeasure(atoms, weights / weights.sum())
        fn = measure.PANEL[rng.integers(0, len(measure.PANEL))]
        worst = max(worst, measure.duality_residual(P, fn, nu))
    ok = worst < args.threshold
    _emit(
        args,
        {
            "command": "measure duality",
            "polynomial": P.to_text(),
            "cases": args.cases,
            "max_residual": worst,
            "threshold": args.threshold,
            "ok": ok,
        },
    )
    return 0 if ok else EXIT_CHECK_FAILED


def cmd_measure_mixing(args) -> int:
    P = args.polynomial
    mu_hat = measure.mu_nx(P, args.x, args.depth, budget=args.budget)
    fn = _panel_by_label(args.fn)
    gn = _panel_by_label(args.fn2 or args.fn)
    per_n = []
    worst = 0.0
    for n in range(1, args.nmax + 1):
        c = measure.mixing_correlation(P, fn, gn, n, mu_hat)
        per_n.append({"n": n, "value": complex(c), "stderr": 0.0})
        worst = max(worst, abs(c))
    ok = worst <= args.threshold if args.threshold is not None else True
    _emit(
        args,
        {
            "command": "measure mixing",
            "polynomial": P.to_text(),
            "x": complex(args.x),
            "depth": args.depth,
            "fn": fn.label,
            "fn2": gn.label,
            "per_n": per_n,
            "max_correlation": worst,
            "threshold": args.threshold,
            "ok": ok,
        },
    )
    return 0 if ok else EXIT_CHECK_FAILED


def cmd_measure_lyubich(args) -> int:
    P = args.polynomial
    rep = measure.lyubich_diameters(
        P,
        args.center,
        args.radius,
        args.nmax,
        args.branches,
        args.seed,
        tasks=args.tasks,
    )
    target = -0.5 * math.log(P.degree)
    per_n = [
        {"n": int(n), "value": float(v), "stderr": 0.0}
        for n, v in zip(range(1, args.nmax + 1), rep.mean_log10())
    ]
    _emit(
        args,
        {
            "command": "measure lyubich",
            "polynomial": P.to_text(),
            "center": complex(args.center),
            "radius": args.radius,
            "branches": args.branches,
            "per_n": per_n,
            "fitted": {
                "slope_log10": rep.slope_log10,
                "intercept_log10": rep.intercept_log10,
                "target_half_log_d": target,
                "c_fit": rep.c_fit,
                "fraction_within": rep.fraction_within,
            },
        },
    )
    return 0


# -- linearize ------------------------------------------------------------


def _locate_fixed_point(P: Polynomial) -> complex:
    """Prefer attracting, then superattracting, then smallest |multiplier|."""
    from .roots import all_roots

    shifted = P.coeffs.copy()
    shifted[1] -= 1.0
    fixed = all_roots(Polynomial(shifted)).roots
    dp = P.derivative()
    scored = []
    for z in fixed:
        lam = abs(dp(complex(z)))
        if 1e-9 < lam < 1.0 - 1e-6:
            rank = 0  # attracting, the cleanest regime
        elif lam <= 1e-9:
            rank = 1  # superattracting
        elif lam > 1.0 + 1e-6:
            rank = 2  # repelling still linearizes
        else:
            rank = 3  # neutral needs a dedicated mode
        scored.append((rank, lam, complex(z)))
    scored.sort(key=lambda t: (t[0], t[1], t[2].real, t[2].imag))
    return scored[0][2]


def cmd_linearize(args) -> int:
    if args.cremer:
        rep = linearize.cremer_theta(args.cremer)
        ok = all(c.holds for c in rep.certificates)
        _emit(
            args,
            {
                "command": "linearize cremer",
                "theta": rep.theta,
                "exponents": list(rep.exponents),
                "certificates": [
                    {
                        "ell": c.ell,
                        "power": c.power,
                        "observed": c.observed,
                        "bound": c.bound,
                        "holds": c.holds,
                        "growth_lhs_log10": c.growth_lhs_log10,
                        "growth_rhs_log10": c.growth_rhs_log10,
                    }
                    for c in rep.certificates
                ],
                "ok": ok,
            },
        )
        return 0 if ok else EXIT_CHECK_FAILED

    if args.diophantine:
        c, mu, n_max = args.diophantine
        theta = args.theta if args.theta is not None else linearize.GOLDEN_MEAN
        rep = linearize.diophantine_check(
            theta, linearize.DiophantineParams(c, mu, int(n_max))
        )
        _emit(
            args,
            {
                "command": "linearize diophantine",
                "theta": rep.theta,
                "c": rep.params.c,
                "mu": rep.params.mu,
                "n_max": rep.params.n_max,
                "margin": rep.margin,
                "worst_n": rep.worst_n,
                "ok": rep.passed,
            },
        )
        return 0 if rep.passed else EXIT_CHECK_FAILED

    if args.siegel is not None:
        theta = args.siegel
        lam = complex(math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta))
        if args.quad or args.polynomial is None:
            P = Polynomial([0.0, lam, 1.0])
        else:
            P = args.polynomial
            if abs(complex(P.coeffs[1]) - lam) > 1e-9:
                raise PolynomialParseError(
                    "polynomial linear coefficient must equal e^(2 pi i theta); "
                    "use -p quad to build the standard quadratic"
                )
        rep = linearize.siegel_series(lam, P, args.order)
        if args.series_out:
            with open(args.series_out, "w") as fh:
                fh.write(reports.series_csv(rep.series.coeffs))
        _emit(
            args,
            {
                "command": "linearize siegel",
                "polynomial": P.to_text(),
                "theta": theta,
                "multiplier": lam,
                "order": args.order,
                "residual": rep.residual,
                "test_radius": rep.test_radius,
                "denominators_min": rep.denominators_min,
                "denominators": list(rep.denominators),
                "series_out": args.series_out,
            },
        )
        return 0

    if args.petal is not None:
        P = args.polynomial
        if P is None:
            raise PolynomialParseError("--petal needs -p")
        rep = linearize.parabolic_petal(P, k=args.petal, eps=args.eps)
        ok = rep.boundary_ok and rep.eps_prime <= rep.eps
        _emit(
            args,
            {
                "command": "linearize petal",
                "polynomial": P.to_text(),
                "k": rep.k,
                "eps": rep.eps,
                "eps_prime": rep.eps_prime,
                "boundary_ok": rep.boundary_ok,
                "normalization_scale": complex(rep.normalization_scale),
                "fatou_defects": [list(v) for v in rep.fatou_defects],
                "iterate_steps": rep.iterate_steps,
                "iterate_final": rep.iterate_final,
                "ok": ok,
            },
        )
        return 0 if ok else EXIT_CHECK_FAILED

    P = args.polynomial
    if P is None:
        raise PolynomialParseError("linearize needs -p")
    z0 = args.fixed_point if args.fixed_point is not None else _locate_fixed_point(P)
    lam = P.derivative()(complex(z0))
    if abs(lam) <= 1e-9:
        rep = linearize.boettcher_series(P, z0, args.order)
        series = rep.series
        payload = {
            "command": "linearize boettcher",
            "polynomial": P.to_text(),
            "fixed_point": complex(z0),
            "multiplier": complex(lam),
            "local_degree": rep.local_degree,
            "scale": complex(rep.scale),
            "order": args.order,
            "radius_hint": series.radius_hint,
            "residual": rep.residual,
            "test_radius": rep.test_radius,
        }
    else:
        rep = linearize.koenigs(P, z0, args.order)
        series = rep.series
        payload = {
            "command": "linearize koenigs",
            "polynomial": P.to_text(),
            "fixed_point": complex(z0),
            "multiplier": complex(rep.multiplier),
            "order": args.order,
            "radius_hint": series.radius_hint,
            "residual": rep.residual,
            "test_radius": rep.test_radius,
            "denominators_min": rep.denominators_min,
        }
    if args.series_out:
        with open(args.series_out, "w") as fh:
            fh.write(reports.series_csv(series.coeffs))
        payload["series_out"] = args.series_out
    _emit(args, payload)
    return 0


# -- disc -----------------------------------------------------------------


def _build_disc_map(args) -> discmaps.DiscMap:
    if getattr(args, "mobius", None) is not None:
        return discmaps.DiscMap.mobius(args.mobius)
    spec = getattr(args, "map", None)
    if not spec:
        raise PolynomialParseError("need --mobius or --map")
    kind, _, rest = spec.partition(":")
    if kind == "mobius":
        return discmaps.DiscMap.mobius(parse_point(rest))
    if kind == "poly":
        coeffs = [parse_point(t) for t in rest.split(",")]
        return discmaps.DiscMap.from_polynomial(coeffs)
    if kind == "blaschke":
        zeros = [parse_point(t) for t in rest.split(",")]
        return discmaps.DiscMap.blaschke(zeros)
    if kind == "rotation":
        return discmaps.DiscMap.rotation(float(rest))
    raise PolynomialParseError(f"unknown map spec {spec!r}")


def cmd_disc_denjoy_wolff(args) -> int:
    f = _build_disc_map(args)
    rep = discmaps.denjoy_wolff(f, args.start, tol=args.tol, n_max=args.nmax)
    _emit(
        args,
        {
            "check": "denjoy-wolff",
            "inputs": {"map": f.label, "start": complex(args.start)},
            "statistic": complex(rep.point),
            "kind": rep.kind,
            "iterations": rep.iterations,
            "displacement": rep.displacement,
            "pass": rep.kind != "undecided",
        },
    )
    return 0 if rep.kind != "undecided" else EXIT_CHECK_FAILED


def cmd_disc_schwarz_pick(args) -> int:
    f = _build_disc_map(args)
    if args.z is not None and args.w is not None:
        pairs = [(args.z, args.w)]
    else:
        if args.seed is None:
            raise PolynomialParseError("random pairs require --seed")
        rng = np.random.default_rng(args.seed)
        pairs = []
        while len(pairs) < args.pairs:
            z = complex(*rng.uniform(-0.7, 0.7, 2))
            w = complex(*rng.uniform(-0.7, 0.7, 2))
            if abs(z) < 0.95 and abs(w) < 0.95 and abs(z - w) > 1e-3:
                pairs.append((z, w))
    worst = 0.0
    for z, w in pairs:
        worst = max(worst, discmaps.schwarz_pick(f, z, w))
    ok = worst <= 1.0 + 1e-10
    _emit(
        args,
        {
            "check": "schwarz-pick",
            "inputs": {"map": f.label, "pairs": len(pairs)},
            "statistic": worst,
            "threshold": 1.0 + 1e-10,
            "pass": ok,
        },
    )
    return 0 if ok else EXIT_CHECK_FAILED


def cmd_disc_area(args) -> int:
    tail = discmaps.LaurentTail(tuple(args.tail))
    rep = discmaps.area_theorem_sum(tail)
    _emit(
        args,
        {
            "check": "area",
            "inputs": {"tail": [complex(b) for b in tail.b]},
            "statistic": rep.total,
            "threshold": 1.0 + 1e-9,
            "univalent_on_grid": rep.univalent_on_grid,
            "min_grid_gap": rep.min_grid_gap,
            "pass": rep.passed,
        },
    )
    return 0 if rep.passed else EXIT_CHECK_FAILED


def cmd_disc_koebe(args) -> int:
    if args.series == "koebe-function":
        coeffs = discmaps.koebe_function_coeffs(args.order)
        evaluator = discmaps.koebe_function
        label = "koebe-function"
    else:
        coeffs = [parse_point(t) for t in args.series.split(",")]
        evaluator = None
        label = args.series
    rep = discmaps.koebe_quarter_check(coeffs, evaluator=evaluator)
    ok = rep.a2_passed and rep.coverage_passed
    _emit(
        args,
        {
            "check": "koebe",
            "inputs": {"series": label, "order": args.order},
            "statistic": rep.a2_abs,
            "threshold": 2.0 + 1e-9,
            "coverage_pass": rep.coverage_passed,
            "bad_windings": [[complex(w), n] for w, n in rep.bad_windings],
            "univalent_on_grid": rep.univalent_on_grid,
            "pass": ok,
        },
    )
    return 0 if ok else EXIT_CHECK_FAILED


def cmd_disc_distortion(args) -> int:
    coeffs = [parse_point(t) for t in args.series.split(",")]
    rep = discmaps.koebe_distortion_check(coeffs, args.s)
    _emit(
        args,
        {
            "check": "distortion",
            "inputs": {"series": args.series, "s": args.s},
            "statistic": rep.ratio,
            "diameter": rep.diameter,
            "area": rep.area,
            "pass": True,
        },
    )
    return 0


# -- parser ---------------------------------------------------------------


def _bbox_arg(text: str):
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("bbox is x0,x1,y0,y1")
    return tuple(parts)


def _triple_arg(text: str):
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected c,mu,nmax")
    return tuple(parts)


def _int_list_arg(text: str):
    return tuple(int(v) for v in text.split(","))


def _theta_arg(text: str) -> float:
    if text == "golden":
        return linearize.GOLDEN_MEAN
    return float(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polydyn",
        description="Numerical one-dimensional complex dynamics toolkit.",
    )
    parser.add_argument(
        "--config",
        help="file of key=value lines supplying defaults (command line wins)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_report(p):
        p.add_argument("--report", help="also write the JSON report here")

    p = sub.add_parser("classify", help="fixed/periodic orbit table")
    p.add_argument("-p", "--polynomial", type=_poly_arg, required=True)
    p.add_argument("--period", type=int, default=1)
    add_report(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("julia", help="backward-orbit point cloud")
    p.add_argument("-p", "--polynomial", type=_poly_arg, required=True)
    p.add_argument("-n", "--depth", type=int, required=True)
    p.add_argument("--budget", type=int, default=measure.DEFAULT_BUDGET)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("-z", "--basepoint", type=_point_arg)
    p.add_argument("--burn-in", type=int, default=orbits.DEFAULT_BURN_IN)
    p.add_argument("--tasks", type=int, default=1)
    p.add_argument("-o", "--output", default="julia.csv")
    p.add_argument("--raster", help="write a PGM hit-count raster here")
    p.add_argument("--bbox", type=_bbox_arg)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    add_report(p)
    p.set_defaults(func=cmd_julia)

    pm = sub.add_parser("measure", help="equilibrium-measure experiments")
    msub = pm.add_subparsers(dest="subcommand", required=True)

    p = msub.add_parser("gap", help="weak-convergence gap between basepoints")
    p.add_argument("-p", "--polynomial", type=_poly_arg, required=True)
    p.add_argument("-x", type=_point_arg, required=True)
    p.add_argument("-y", type=_point_arg, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--budget", type=int, default=measure.DEFAULT_BUDGET)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tasks", type=int, default=1)
    p.add_argument("--threshold", type=float)
    add_report(p)
    p.set_defaults(func=cmd_measure_gap)

    p = msub.add_parser("cesaro-massgap", help="Cesaro mean mass bound")
    p.add_argument("-p", "--polynomial", type=_poly_arg, required=True)
    p.add_argument("-x", type=_point_arg, default=2.0 + 0j)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--budget", type=int, default=measure.DEFAULT_BUDGET)
    add_report(p)
    p.set_defaults(func=cmd_measure_cesaro)

    p = msub.add_parser("duality", help="pullback/pushforward pairing residual")
    p.add_argument("-p", "--polynomial", type=_poly_arg, required=True)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--atoms", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threshold", type=float, default=1e-8)
    add_report(p)
    p.set_defaults(func=cmd_measure_duality)

    p = msub.add_parser("mixing", help="correlation decay on a deep tree")
    p.add_argument("-p", "--polynomial", type=_poly_arg, required=True)
    p.add_argument("-x", type=_point_arg, default=1.0 + 0j)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--fn", default="re")
    p.add_argument("--fn2")
    p.add_argument("--budget", type=int, default=measure.DEFAULT_BUDGET)
    p.add_argument("--threshold", type=float)
    add_report(p)
    p.set_defaults(func=cmd_measure_mixing)

    p = msub.add_parser("lyubich", help="inverse-branch diameter scaling")
    p.add_argument("-p", "--polynomial", type=_poly_arg, required=True)
    p.add_argument("--center", type=_point_arg, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--branches", type=int, default=2000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tasks", type=int, default=1)
    add_report(p)
    p.set_defaults(func=cmd_measure_lyubich)

    p = sub.add_parser("linearize", help="conjugacy series and rotation checks")
    p.add_argument("-p", "--polynomial", dest="polynomial_text")
    p.add_argument("-N", "--order", type=int, default=30)
    p.add_argument("--fixed-point", type=_point_arg)
    p.add_argument("--siegel", type=_theta_arg, metavar="THETA|golden")
    p.add_argument("--diophantine", type=_triple_arg, metavar="c,mu,nmax")
    p.add_argument("--theta", type=_theta_arg)
    p.add_argument("--cremer", type=_int_list_arg, metavar="q1,q2,...")
    p.add_argument("--petal", type=int, nargs="?", const=1)
    p.add_argument("--eps", type=float)
    p.add_argument("--series-out")
    add_report(p)
    p.set_defaults(func=cmd_linearize)

    pd = sub.add_parser("disc", help="hyperbolic disc checks")
    dsub = pd.add_subparsers(dest="subcommand", required=True)

    p = dsub.add_parser("denjoy-wolff", help="iteration limit of a self-map")
    p.add_argument("--mobius", type=_point_arg)
    p.add_argument("--map")
    p.add_argument("--start", type=_point_arg, default=0j)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--nmax", type=int, default=100_000)
    add_report(p)
    p.set_defaults(func=cmd_disc_denjoy_wolff)

    p = dsub.add_parser("schwarz-pick", help="contraction ratio check")
    p.add_argument("--mobius", type=_point_arg)
    p.add_argument("--map")
    p.add_argument("-z", type=_point_arg)
    p.add_argument("-w", type=_point_arg)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int)
    add_report(p)
    p.set_defaults(func=cmd_disc_schwarz_pick)

    p = dsub.add_parser("area", help="Laurent tail area bound")
    p.add_argument("--tail", type=lambda t: [parse_point(v) for v in t.split(",")],
                   required=True)
    add_report(p)
    p.set_defaults(func=cmd_disc_area)

    p = dsub.add_parser("koebe", help="coefficient bound and quarter coverage")
    p.add_argument("--series", required=True,
                   help="'koebe-function' or comma-separated coefficients")
    p.add_argument("-N", "--order", type=int, default=30)
    add_report(p)
    p.set_defaults(func=cmd_disc_koebe)

    p = dsub.add_parser("distortion", help="spread-to-area distortion ratio")
    p.add_argument("--series", required=True)
    p.add_argument("-s", type=float, default=0.5)
    add_report(p)
    p.set_defaults(func=cmd_disc_distortion)

    return parser


#: Flags whose values may legitimately begin with a minus sign.
_VALUE_FLAGS = {
    "-p", "--polynomial", "-x", "-y", "-z", "-w", "--basepoint", "--center",
    "--start", "--fixed-point", "--mobius", "--tail", "--series", "--theta",
    "--siegel", "--bbox",
}


def _join_negative_values(argv: list[str]) -> list[str]:
    """Rewrite 'FLAG -2,0,1' as 'FLAG=-2,0,1' so argparse accepts it."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (
            tok in _VALUE_FLAGS
            and i + 1 < len(argv)
            and len(argv[i + 1]) > 1
            and argv[i + 1][0] == "-"
            and (argv[i + 1][1].isdigit() or argv[i + 1][1] == ".")
        ):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _apply_config(argv: list[str]) -> list[str]:
    """Inject config-file key=value pairs as flags the command line overrides."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv
    path = argv[idx + 1]
    rest = argv[:idx] + argv[idx + 2 :]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            extra.append(f"--{key.strip()}={value.strip()}")
    head = []
    tail = list(rest)
    while tail and not tail[0].startswith("-"):
        head.append(tail.pop(0))
    return head + extra + tail


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv)
    except OSError as exc:
        print(f"polydyn: cannot read config: {exc}", file=sys.stderr)
        return EXIT_PARSE
    argv = _join_negative_values(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "polynomial_text", None) is not None:
        if args.polynomial_text == "quad":
            args.polynomial = None
            args.quad = True
        else:
            try:
                args.polynomial = Polynomial.from_text(args.polynomial_text)
            except PolynomialParseError as exc:
                print(f"polydyn: {exc}", file=sys.stderr)
                return EXIT_PARSE
            args.quad = False
    elif hasattr(args, "polynomial_text"):
        args.polynomial = None
        args.quad = False
    try:
        return args.func(args)
    except PolynomialParseError as exc:
        print(f"polydyn: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ExceptionalBasepoint, PostcriticalOverlap) as exc:
        print(f"polydyn: {exc}", file=sys.stderr)
        return EXIT_EXCEPTIONAL
    except (ResonantMultiplier, NotAttracting) as exc:
        print(f"polydyn: {exc}", file=sys.stderr)
        return EXIT_RESONANCE
    except (NotASelfMap, OutsideDisc) as exc:
        print(f"polydyn: {exc}", file=sys.stderr)
        return EXIT_NOT_SELF_MAP
    except NumericalError as exc:
        print(f"polydyn: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"polydyn: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
