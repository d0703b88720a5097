"""Command-line front end: rhexplore <subcommand> ..."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .errors import DomainError, IllConditionedError, NonConvergenceError, ParseError, PoleError

log = logging.getLogger("rhexplore")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
BUILTIN_SERIES = ("morse_thue", "golden_angle", "random101")
BUILTIN_TERMS = 200_000


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# Argument helpers

def _floats(text: str, n: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _complex(text: str) -> complex:
    re, im = _floats(text, 2)
    return complex(re, im)


def read_config(path) -> dict:
    """key=value lines; '#' starts a comment; keys use option names without dashes."""
    out = {}
    for i, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {line!r}", i)
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def resolve_function(name: str, terms: int | None = None, seed: int | None = None):
    """Evaluable from a name, 'dirichlet:K:J', 'dh:5,1', 'curve:a1,..,a6', or a cast/coefficient file."""
    from .lfunctions import PeriodicDirichlet, ZetaFunction, dh_spec, dirichlet_spec
    from .series import ListSource, SeriesFunction, PeriodicSource
    from .zeros import Derivative

    fixed = (lambda t: terms) if terms else None
    key = name.strip()
    low = key.lower()
    if low in ("zeta", "zeta_prime", "zeta'"):
        if terms:
            from .characters import CoefficientCast
            f = SeriesFunction(PeriodicSource(CoefficientCast(1, [1])), terms=fixed)
        else:
            f = ZetaFunction()
        return f if low == "zeta" else Derivative(f)
    if low in BUILTIN_SERIES:
        from .characters import builtin_cast
        return SeriesFunction(ListSource(builtin_cast(low, BUILTIN_TERMS, seed=seed)), terms=fixed)
    if low.startswith("dirichlet:"):
        _, k, j = key.split(":")
        spec = dirichlet_spec(int(k), (int(k), int(j)))
        return SeriesFunction(spec.source, terms=fixed) if terms else spec
    if low.startswith("dh:"):
        spec = dh_spec(tuple(int(t) for t in key[3:].strip("()").split(",")))
        return SeriesFunction(spec.source, terms=fixed) if terms else spec
    if low.startswith("curve:"):
        from .elliptic import build_lfunction, parse_curve
        curve, cond = parse_curve(key[6:])
        return build_lfunction(curve, cond=cond)
    path = Path(key)
    if path.exists():
        head = path.read_text().lstrip()[:7]
        if head.startswith("period="):
            from .characters import load_cast
            cast = load_cast(path)
            return SeriesFunction(PeriodicSource(cast), terms=fixed) if terms else PeriodicDirichlet(cast)
        from .series import FileSource
        return SeriesFunction(FileSource(path), terms=fixed)
    raise UsageError(f"unknown function {name!r}")


def _fmt(z: complex) -> str:
    return f"{z.real:.15g}{z.imag:+.15g}j"


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


# ---------------------------------------------------------------------------
# Subcommands

def cmd_eval(args):
    f = resolve_function(args.function, args.terms, args.seed)
    z = _complex(args.z)
    v = complex(np.asarray(f(np.array([z])))[0])
    if not np.isfinite(v.real) or not np.isfinite(v.imag):
        raise NonConvergenceError(f"non-finite value at {z}")
    print(_fmt(v))


def _scan_config(args):
    from .zeros import ScanConfig
    x0, x1, y0, y1 = _floats(args.window, 4)
    return ScanConfig((x0, x1), (y0, y1), args.x_step, args.y_step, newton_tol=args.tol)


def cmd_zeros(args):
    from .zeros import save_zeros, scan_zeros
    f = resolve_function(args.function, args.terms, args.seed)
    zs = scan_zeros(f, _scan_config(args))
    fh, close = _open_out(args.out)
    try:
        save_zeros(zs, fh)
    finally:
        if close:
            fh.close()
    log.info("%d zeros, %d lost seeds", len(zs), getattr(zs, "dropped", 0))


def cmd_stats(args):
    from .zeros import load_zeros, mean_real, pair_correlation, spacing_stats
    zs = load_zeros(args.zeros)
    if args.report == "mean":
        print(f"zeros={len(zs)} mean_real={mean_real(zs):.6f}")
    elif args.report == "spacing":
        st = spacing_stats(zs, args.conductor)
        print(f"n={st.spacings.size} mean={st.mean:.6f} ks_gue={st.ks_gue:.4f} "
              f"ks_poisson={st.ks_poisson:.4f} critical={st.ks_critical:.4f} "
              f"gue_rejected={st.gue_rejected}")
        print("s,density,gue")
        for c, d, g in zip(0.5 * (st.edges[1:] + st.edges[:-1]), st.density, st.gue):
            print(f"{c:.4f},{d:.6f},{g:.6f}")
    else:
        pc = pair_correlation(zs, conductor=args.conductor)
        print("x,r2,reference")
        for c, r, ref in zip(pc.centers, pc.r2, pc.reference):
            print(f"{c:.4f},{r:.6f},{ref:.6f}")


def cmd_equiv(args):
    from . import equivalents as eq
    x = args.x
    if args.check == "psi":
        if args.zeros:
            from .zeros import load_zeros
            zs = load_zeros(args.zeros)
        else:
            from .lfunctions import ZetaFunction
            from .zeros import ScanConfig, scan_zeros
            zs = scan_zeros(ZetaFunction(), ScanConfig((0.4, 0.6), (10, args.height)))
        approx = eq.explicit_formula(x, zs, args.K)
        exact = eq.psi_step(x)
        print(f"psi({x:g})={exact:.6f} explicit={approx:.6f} error={abs(approx - exact):.6f} zeros={len(zs)}")
    elif args.check in ("mertens", "liouville"):
        rep = eq.summatory_check(args.check, int(x))
        if args.out:
            rep.to_csv(args.out)
        if rep.violations:
            print(f"{len(rep.violations)} violations; first at x={rep.violations[0]}")
        else:
            print("no violations")
    elif args.check == "farey":
        s1, s2 = eq.farey_discrepancy(int(x))
        print(f"n={int(x)} sum_abs={s1:.6g} sum_sq={s2:.6g}")
    else:
        gap, bound, holds = eq.pi_li_gap(x)
        status = "not asserted below 2657" if holds is None else ("holds" if holds else "fails")
        print(f"|pi-li|={gap:.6f} bound={bound:.6f} {status}")


def _family_spec(args, thetas):
    from .dynamics import FamilyKind, FamilySpec
    data = {}
    if args.terms:
        data["terms"] = args.terms
    kind = FamilyKind(args.family)
    if kind is FamilyKind.modular_combination:
        from .modular import load_basis, shipped_basis
        data["basis"] = load_basis(args.basis) if args.basis else shipped_basis(38)
    if kind is FamilyKind.curve_interpolation:
        from .elliptic import parse_curve
        if not (args.curve_a and args.curve_b):
            raise UsageError("curve_interpolation needs --curve-a and --curve-b")
        (ca, na), (cb, _) = parse_curve(args.curve_a), parse_curve(args.curve_b)
        data["curves"] = (ca, cb)
        data["cond"] = na
    return FamilySpec(kind, thetas, data)


def cmd_sweep(args):
    from .dynamics import braid_summary, family_series, save_trajectories, sweep
    t0, t1 = _floats(args.theta_range, 2)
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    spec = _family_spec(args, np.linspace(t0, t1, args.steps + 1))
    trajs = sweep(spec, _scan_config(args), jump=args.jump)
    fh, close = _open_out(args.out)
    try:
        save_trajectories(trajs, fh)
    finally:
        if close:
            fh.close()
    if args.period:
        b = braid_summary(trajs, args.period)
        perm = " ".join(f"{k}->{v}" for k, v in sorted(b.permutation.items()))
        print(f"trajectories={len(trajs)} exchanges={b.exchanges} unmatched={b.unmatched}", file=sys.stderr)
        print(f"permutation: {perm}", file=sys.stderr)
    if args.frames:
        from .plotting import PlotSpec, render
        d = Path(args.frames)
        d.mkdir(parents=True, exist_ok=True)
        x0, x1, y0, y1 = _floats(args.window, 4)
        for i, th in enumerate(spec.thetas):
            ps = PlotSpec((complex(x0, y0), complex(x1, y1)), 160, 320, "xray")
            ps.zeros = tuple(s[1] for t in trajs for s in t.samples if s[0] == th)
            render(family_series(spec, float(th)), ps, d / f"frame_{i:04d}.png")


def cmd_ec(args):
    from .elliptic import build_lfunction, conductor, dirichlet_coeffs, local_data, parse_curve
    from .arithmetic import prime_array
    curve, cond = parse_curve(args.curve)
    if args.op == "ap":
        print("p,a_p,reduction")
        for p in prime_array(args.primes):
            rd = local_data(curve, int(p))
            print(f"{int(p)},{rd.a_p},{rd.rtype.value}")
    elif args.op == "coeffs":
        c = dirichlet_coeffs(curve, args.n, cond)
        print(" ".join(str(int(round(v.real))) for v in c))
    else:
        spec = build_lfunction(curve, cond=cond)
        z = _complex(args.z) if args.z else complex(1, 0)
        v = complex(np.asarray(spec(np.array([z])))[0])
        print(f"conductor={conductor(curve, cond)} sign={int(round(spec.sign.real)):+d} L({_fmt(z)})={_fmt(v)}")


def cmd_modular(args):
    from .modular import form_spec, hecke_matrix, load_basis, modular_family_coeffs, shipped_basis
    if args.basis:
        basis = load_basis(args.basis)
    elif args.level:
        basis = shipped_basis(args.level, args.weight)
    else:
        raise UsageError("give --basis FILE or --level N")
    if args.op == "family":
        c = modular_family_coeffs(basis, args.theta)
        print(" ".join(f"{v:.6g}" for v in c[: args.n]))
        return
    hd = hecke_matrix(basis, args.p)
    print(f"T_{args.p}:")
    for row in hd.matrix:
        print("  " + " ".join(str(v) for v in row))
    print("charpoly: " + " ".join(str(c) for c in hd.charpoly))
    if args.op == "eigen":
        for lam, f in zip(hd.eigenvalues, hd.eigenforms):
            coeffs = " ".join(_short(v) for v in np.asarray(f)[1: args.n + 1])
            print(f"lambda={_short(lam)}: {coeffs}")


def _short(v) -> str:
    v = complex(v)
    v = complex(0 if abs(v.real) < 1e-9 else v.real, 0 if abs(v.imag) < 1e-9 else v.imag)
    return f"{v.real:.6g}" if abs(v.imag) < 1e-12 else _fmt(v)


def cmd_solve_path(args):
    from .dynamics import solve_coeff_path
    from .zeros import load_zeros

    def ordered(path):
        zs = [z.location for z in load_zeros(path)]
        return sorted(zs, key=lambda z: (abs(z.imag), z.imag))

    res = solve_coeff_path(ordered(args.zeros_a), ordered(args.zeros_b), args.theta, args.n)
    print(f"condition={res.condition:.3e} max_residual={res.residuals.max():.3e}")
    print("n,re,im")
    for i, a in enumerate(res.coeffs, 1):
        print(f"{i},{a.real:.12g},{a.imag:.12g}")


def cmd_plot(args):
    from .plotting import PlotSpec, render
    f = resolve_function(args.function, args.terms, args.seed)
    x0, x1, y0, y1 = _floats(args.window, 4)
    spec = PlotSpec((complex(x0, y0), complex(x1, y1)), args.width, args.height, args.mode,
                    args.terms, args.overlay)
    out = render(f, spec, args.out)
    print(out)


# ---------------------------------------------------------------------------

def _scan_args(p, window="0,1,10,60"):
    p.add_argument("--window", default=window, help="x0,x1,y0,y1")
    p.add_argument("--x-step", type=float, default=0.05)
    p.add_argument("--y-step", type=float, default=0.02)
    p.add_argument("--tol", type=float, default=1e-9)


def build_parser() -> Parser:
    ap = Parser(prog="rhexplore", description="Numerical exploration of zeta and L-function zeros.")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--config", help="key=value defaults file")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=Parser)

    p = sub.add_parser("eval", help="evaluate a function at one point")
    p.add_argument("--function", required=True)
    p.add_argument("--z", required=True, help="RE,IM")
    p.add_argument("--terms", type=int)
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("zeros", help="scan a window for zeros (CSV)")
    p.add_argument("--function", required=True)
    p.add_argument("--terms", type=int)
    p.add_argument("--out")
    _scan_args(p)
    p.set_defaults(run=cmd_zeros)

    p = sub.add_parser("stats", help="statistics of a zero table")
    p.add_argument("--zeros", required=True)
    p.add_argument("--report", choices=("mean", "spacing", "paircorr"), default="mean")
    p.add_argument("--conductor", type=int, default=1)
    p.set_defaults(run=cmd_stats)

    p = sub.add_parser("equiv", help="prime-side checks")
    p.add_argument("--check", choices=("psi", "mertens", "liouville", "farey", "pili"), required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--zeros")
    p.add_argument("--K", type=int)
    p.add_argument("--height", type=float, default=200.0)
    p.add_argument("--out")
    p.set_defaults(run=cmd_equiv)

    p = sub.add_parser("sweep", help="track zeros through a family")
    p.add_argument("--family", required=True,
                   choices=("eta_rotation", "base_semicircle", "char_rotation_10", "char_rotation_5",
                            "prime_rotation", "modular_combination", "curve_interpolation"))
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--theta-range", default=f"{math.pi / 2},{3 * math.pi / 2}")
    p.add_argument("--terms", type=int)
    p.add_argument("--jump", type=float, default=0.3)
    p.add_argument("--basis")
    p.add_argument("--curve-a")
    p.add_argument("--curve-b")
    p.add_argument("--out")
    p.add_argument("--frames", help="directory for per-step images")
    p.add_argument("--period", type=float, help="loop period in theta; prints a braid summary to stderr")
    _scan_args(p, "0,1,0.5,30")
    p.set_defaults(run=cmd_sweep)

    p = sub.add_parser("ec", help="elliptic curve data")
    p.add_argument("--curve", required=True, help='"a1 a2 a3 a4 a6 [N]"')
    p.add_argument("--op", choices=("ap", "coeffs", "lfun"), default="ap")
    p.add_argument("--primes", type=int, default=50)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--z")
    p.set_defaults(run=cmd_ec)

    p = sub.add_parser("modular", help="Hecke operators on a q-expansion basis")
    p.add_argument("--basis")
    p.add_argument("--level", type=int)
    p.add_argument("--weight", type=int, default=2)
    p.add_argument("--op", choices=("hecke", "eigen", "family"), default="hecke")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--n", type=int, default=10)
    p.set_defaults(run=cmd_modular)

    p = sub.add_parser("solve-path", help="coefficients through interpolated zeros")
    p.add_argument("--zeros-a", required=True)
    p.add_argument("--zeros-b", required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(run=cmd_solve_path)

    p = sub.add_parser("plot", help="render a PNG")
    p.add_argument("--function", required=True)
    p.add_argument("--mode", choices=("domain_color", "xray", "log_abs"), default="domain_color")
    p.add_argument("--window", default="-2,4,0,60")
    p.add_argument("--width", type=int, default=300)
    p.add_argument("--height", type=int, default=600)
    p.add_argument("--terms", type=int)
    p.add_argument("--overlay", action="store_true")
    p.add_argument("--out", default="plot.png")
    p.set_defaults(run=cmd_plot)
    return ap


def _apply_config(ap: Parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    conf = read_config(known.config)
    ap.set_defaults(**conf)
    for action in ap._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**{k: v for k, v in conf.items()
                               if any(a.dest == k for a in sp._actions)})


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (OSError, ParseError) as exc:
        print(f"rhexplore: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    kernels.set_threads(args.threads)
    try:
        args.run(args)
    except (NonConvergenceError, IllConditionedError, PoleError, ArithmeticError) as exc:
        print(f"rhexplore: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, OSError, KeyError) as exc:
        print(f"rhexplore: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
