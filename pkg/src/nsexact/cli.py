"""Command-line front end.

Subcommands: ``eigen``, ``construct``, ``verify``, ``pathlimit``, ``export``.

Options may also come from a key=value config file (``--config``), with
optional ``[subcommand]`` sections; flags given on the command line win.
Exit codes: 0 success, 1 verification failure, 2 usage or config error,
3 solver failure. ``NSEXACT_OUTDIR`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import eigen as E
from . import specfun
from . import turbulence as T
from . import verify as V
from .profiles import EvenPolynomialProfile, GaussianProfile
from .solutions import (FlowSolution, cylinder_mode, euler_static, ns_decaying, radial_mode, swirl2d, zero_flow)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
OUTDIR_ENV = "NSEXACT_OUTDIR"
CSV_COLUMNS = ("t", "x1", "x2", "x3", "u1", "u2", "u3", "p", "w1", "w2", "w3")


class ConfigError(ValueError):
    """Invalid or unknown configuration."""


# --- parsing helpers ----------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).replace(" ", "").split(",") if v != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text!r}")
    return v


def _add_flow_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("flow")
    g.add_argument("--flow", choices=["radial", "disc", "annulus", "swirl", "swirl-heat", "zero"],
                   default="radial", help="solution family")
    g.add_argument("--lam", type=float, default=1.0, help="eigenvalue of radial modes")
    g.add_argument("--alpha", type=float, default=1.0)
    g.add_argument("--beta", type=float, default=0.0)
    g.add_argument("--nu", type=float, default=0.0, help="viscosity; 0 gives the static flow")
    g.add_argument("--eta", type=float, default=0.0, help="axial wavenumber of cylinder modes")
    g.add_argument("--index", type=_count, default=1, help="radial eigenmode index")
    g.add_argument("--radius", type=_positive, default=1.0, help="disc radius")
    g.add_argument("--r1", type=_positive, default=1.0, help="inner annulus radius")
    g.add_argument("--r2", type=_positive, default=2.0, help="outer annulus radius")
    g.add_argument("--bc", default="dirichlet",
                   help="annulus condition: dirichlet, neumann, 'm:m11,m12,m21,m22' or 'K:k11,k12,k21,k22'")
    g.add_argument("--axis", type=_floats, default=[0.0, 0.0, 1.0], help="axis A of radial modes")
    g.add_argument("--r-min", type=float, default=None, help="inner radius of the admissible region")
    g.add_argument("--a", type=float, default=1.0, help="swirl axis amplitude")
    g.add_argument("--phi", choices=["rigid", "gaussian", "zero"], default="gaussian",
                   help="swirl azimuthal potential profile")
    g.add_argument("--psi", choices=["gaussian", "zero"], default="zero",
                   help="swirl axial potential profile")
    g.add_argument("--sigma", type=_positive, default=0.25, help="Gaussian profile width parameter")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--outdir", default=None, help=f"output directory (default ${OUTDIR_ENV} or .)")
    p.add_argument("--tolerance", type=_positive, default=None, help="override the main tolerance")
    p.add_argument("--workers", type=_count, default=1, help="worker threads for sampling")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsexact", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eigen", help="radial eigenvalues of ball, disc or annulus")
    pe.add_argument("geometry", choices=["ball", "disc", "annulus"])
    pe.add_argument("--radius", type=_positive, default=1.0)
    pe.add_argument("--r1", type=_positive, default=1.0)
    pe.add_argument("--r2", type=_positive, default=2.0)
    pe.add_argument("--bc", default="dirichlet")
    pe.add_argument("--count", type=_count, default=3)
    pe.add_argument("--zeta-max", type=_positive, default=None)
    pe.add_argument("--output", default=None, help="also write the table as CSV")
    _common(pe)

    pc = sub.add_parser("construct", help="build a flow and summarise it")
    _add_flow_options(pc)
    _common(pc)

    pv = sub.add_parser("verify", help="run the residual suite on a flow")
    _add_flow_options(pv)
    pv.add_argument("--samples", type=_count, default=200)
    pv.add_argument("--times", type=_floats, default=None, help="sample times (comma separated)")
    pv.add_argument("--corrupt-pressure", action="store_true",
                    help="replace the pressure by zero (negative control)")
    _common(pv)

    pp = sub.add_parser("pathlimit", help="path-limit table and double-limit verdict")
    _add_flow_options(pp)
    pp.add_argument("--omega", type=_floats, default=None, help="path constants (comma separated)")
    pp.add_argument("--omega-range", type=_floats, default=None,
                    help="draw two path constants uniformly from 'low,high' (uses --seed)")
    pp.add_argument("--schedule", type=_floats, default=[10.0, 1e2, 1e3, 1e4, 1e5, 1e6],
                    help="times along each path")
    pp.add_argument("--probes", type=_count, default=50)
    _common(pp)

    px = sub.add_parser("export", help="sample u, p and vorticity on a grid")
    _add_flow_options(px)
    px.add_argument("--box", type=_floats, default=[-1.0, 1.0, -1.0, 1.0, -1.0, 1.0],
                    help="xmin,xmax,ymin,ymax,zmin,zmax")
    px.add_argument("--resolution", type=_floats, default=[5, 5, 5], help="nx,ny,nz")
    px.add_argument("--times", type=_floats, default=[0.0])
    px.add_argument("--format", choices=["csv", "vtk"], default="csv")
    px.add_argument("--prefix", default="field")
    _common(px)
    return parser


def _read_config(path: str, command: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        text = Path(path).read_text(encoding="utf-8")
        cp.read_string("[__top__]\n" + text)
    except (OSError, configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    values = dict(cp["__top__"])
    for section in cp.sections():
        if section == command:
            values.update(cp[section])
        elif section != "__top__" and section not in ("eigen", "construct", "verify", "pathlimit", "export"):
            raise ConfigError(f"unknown config section [{section}]")
    return {k.strip().replace("-", "_"): v.strip() for k, v in values.items()}


def parse_args(argv=None) -> argparse.Namespace:
    """Parse flags, then fill unset options from the config file."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = _read_config(args.config, args.command)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in sub._actions}
    unknown = sorted(k for k in cfg if k not in known or k in ("help", "config"))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    defaults = {}
    for k, v in cfg.items():
        action = known[k]
        if isinstance(action, argparse._StoreTrueAction):
            if v.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(f"config key {k} needs a boolean")
            defaults[k] = v.lower() in ("true", "1", "yes")
        else:
            defaults[k] = v
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


# --- flow construction ----------------------------------------------------------


def _parse_bc(text: str):
    t = text.strip().lower()
    if t == "dirichlet":
        return E.SeparatedBC.dirichlet()
    if t == "neumann":
        return E.SeparatedBC.neumann()
    if t == "periodic":
        return E.CoupledBC.periodic()
    if t.startswith("m:"):
        vals = _floats(t[2:])
        if len(vals) != 4:
            raise ConfigError("separated condition needs four coefficients")
        return E.SeparatedBC(*vals)
    if t.startswith("k:"):
        vals = _floats(t[2:])
        if len(vals) != 4:
            raise ConfigError("coupled condition needs four entries")
        return E.CoupledBC(((vals[0], vals[1]), (vals[2], vals[3])))
    raise ConfigError(f"unknown boundary condition {text!r}")


def _annulus_modes(spec, bc, count, zeta_max=None):
    if isinstance(bc, E.SeparatedBC):
        return E.annulus_eigen_separated(spec, bc, count, zeta_max)
    return E.annulus_eigen_coupled(spec, bc, count, zeta_max)


def _swirl_profiles(args):
    phi = {"rigid": EvenPolynomialProfile([0.0, 0.5]),
           "gaussian": GaussianProfile(args.sigma, -2.0 * args.sigma),
           "zero": None}[args.phi]
    psi = {"gaussian": GaussianProfile(2.0 * args.sigma), "zero": None}[args.psi]
    return phi, psi


def build_flow(args) -> FlowSolution:
    """Flow described by the parsed options."""
    kind = args.flow
    nu = args.nu
    if nu < 0:
        raise ConfigError("viscosity must be non-negative")
    if kind == "zero":
        return zero_flow()
    if kind in ("swirl", "swirl-heat"):
        phi, psi = _swirl_profiles(args)
        r_min = args.r_min or 0.0
        if kind == "swirl-heat":
            return T.swirl2d_heat(args.a, phi, psi, nu if nu > 0 else 1.0, r_min=r_min)
        return swirl2d(args.a, phi, psi, r_min=r_min)
    if kind == "radial":
        if len(args.axis) != 3:
            raise ConfigError("axis needs three components")
        mode = radial_mode(args.lam, args.alpha, args.beta, tuple(args.axis), args.r_min)
    elif kind == "disc":
        mode = cylinder_mode(E.disc_radial_eigen(E.DiscSpec(args.radius), args.index),
                             args.eta, args.alpha, args.beta)
    else:
        spec = E.AnnulusSpec(args.r1, args.r2)
        em = _annulus_modes(spec, _parse_bc(args.bc), args.index)[args.index - 1]
        mode = cylinder_mode(em, args.eta, args.alpha, args.beta)
    return ns_decaying(mode, nu) if nu > 0 else euler_static(mode)


def _outdir(args) -> Path:
    d = Path(args.outdir or os.environ.get(OUTDIR_ENV) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


# --- commands -------------------------------------------------------------------


def _boundary_residual(geometry, spec, bc, mode: E.EigenMode) -> float:
    if geometry == "ball":
        return float(abs(mode.profile(spec.R0)))
    if geometry == "disc":
        return float(abs(mode.profile(spec.R0)))
    Y1, Y2 = mode.state(spec.R1), mode.state(spec.R2)
    if isinstance(bc, E.SeparatedBC):
        return float(max(abs(bc.m11 * Y1[0] + bc.m12 * Y1[1]), abs(bc.m21 * Y2[0] + bc.m22 * Y2[1])))
    return float(np.max(np.abs(Y1 - bc.matrix @ Y2)))


def cmd_eigen(args) -> int:
    if args.geometry == "ball":
        spec, bc = E.BallSpec(args.radius), None
        modes = [E.ball_radial_eigen(spec, n) for n in range(1, args.count + 1)]
    elif args.geometry == "disc":
        spec, bc = E.DiscSpec(args.radius), None
        modes = [E.disc_radial_eigen(spec, j) for j in range(1, args.count + 1)]
    else:
        spec, bc = E.AnnulusSpec(args.r1, args.r2), _parse_bc(args.bc)
        modes = _annulus_modes(spec, bc, args.count, args.zeta_max)
    lines = ["index,value,multiplicity,boundary_residual"]
    for m in modes:
        lines.append(f"{m.index},{m.value!r},{m.multiplicity},{_boundary_residual(args.geometry, spec, bc, m)!r}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.output:
        path = Path(args.output)
        if not path.is_absolute():
            path = _outdir(args) / path
        path.write_text(text, encoding="utf-8")
    return EXIT_OK


def _summary(flow: FlowSolution) -> str:
    lines = [f"tag = {flow.tag}", f"kind = {flow.kind}", f"nu = {flow.nu!r}",
             f"geometry = {flow.geometry}", f"r_min = {flow.r_min!r}"]
    if flow.lam is not None:
        lines.append(f"lam = {flow.lam!r}")
    if flow.mode is not None and flow.mode.split is not None:
        lines.append(f"split = {flow.mode.split[0]!r} {flow.mode.split[1]!r}")
    for k, v in sorted(flow.params.items()):
        lines.append(f"param.{k} = {v!r}")
    return "\n".join(lines) + "\n"


def cmd_construct(args) -> int:
    flow = build_flow(args)
    text = _summary(flow)
    sys.stdout.write(text)
    (_outdir(args) / "construct.txt").write_text(text, encoding="utf-8")
    return EXIT_OK


def _verify_suite(flow: FlowSolution, args) -> V.ResidualReport:
    tol = args.tolerance or V.TOL_FD
    heat = flow.kind == "heat-2d"
    count = args.samples
    if heat:
        times = args.times or [0.5]
    elif flow.kind == "ns-decaying":
        times = args.times or [0.0, 0.5, 2.0]
    else:
        times = [0.0]
    samples = V.SampleSet.for_flow(flow, count, seed=args.seed, t_values=times)
    if args.corrupt_pressure:
        flow = flow.with_pressure(V.F.ConstantField(0.0), "-pressure-zeroed")
    w = args.workers
    if flow.kind == "euler-static":
        report = V.euler_residual(flow, samples, tolerance=tol, workers=w)
    else:
        report = V.ns_residual(flow, samples, tolerance=tol, workers=w)
    if flow.lam is not None:
        report = report.merged(V.beltrami_check(flow, samples, tolerance=tol))
    if flow.mode is not None:
        report = report.merged(V.helmholtz_check(flow.mode, samples, tolerance=tol))
    if flow.mode is not None or flow.kind == "heat-2d":
        report = report.merged(V.vorticity_residual(flow, flow.nu, samples,
                                                    tolerance=max(tol, V.TOL_NESTED), workers=w))
    header = {"flow": flow.tag, "kind": flow.kind, "nu": repr(flow.nu), "samples": len(samples),
              "seed": args.seed, "tolerance": repr(tol), "div_tolerance": repr(V.TOL_DIV)}
    return V.ResidualReport("verify", report.entries, header)


def cmd_verify(args) -> int:
    flow = build_flow(args)
    report = _verify_suite(flow, args)
    out = _outdir(args)
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    (out / "report.csv").write_text(report.to_csv(), encoding="utf-8")
    sys.stdout.write(report.to_text())
    if not report.passed:
        worst = report.worst()
        sys.stderr.write(f"verification failed: {worst.name} relative residual {worst.max_rel:.3e} "
                         f"> {worst.tolerance:.1e} at (t, x) = {worst.worst_point}\n")
        return EXIT_FAIL
    return EXIT_OK


def cmd_pathlimit(args) -> int:
    flow = build_flow(args)
    if flow.mode is None and flow.kind != "heat-2d":
        raise ConfigError("pathlimit needs a mode flow or a swirl-heat flow")
    if args.omega:
        omegas = list(args.omega)
    elif args.omega_range:
        if len(args.omega_range) != 2:
            raise ConfigError("omega-range needs 'low,high'")
        omegas = [float(v) for v in T.sample_omegas(2, *args.omega_range, seed=args.seed)]
    else:
        raise ConfigError("give --omega or --omega-range")
    if any(not o > 0 for o in omegas):
        raise ConfigError("path constants must be positive")
    tol = args.tolerance or (1e-13 if flow.mode is not None else 1e-8)
    probes = V.SampleSet.for_flow(flow, args.probes, seed=args.seed)
    if flow.mode is not None and len(omegas) >= 2:
        rep = T.double_limit_probe(flow.mode, omegas[0], omegas[1], probes, tuple(args.schedule),
                                   path_tolerance=tol)
    else:
        rows = []
        for om in omegas:
            rows += T.path_convergence_table(flow, T.PathSpec.from_times(om, args.schedule), probes).rows
        rep = T.LimitReport(tuple(rows), "undetermined", tol, omegas=tuple(omegas),
                            header={"flow": flow.tag, "probes": len(probes)})
    header = {**rep.header, "seed": args.seed}
    rep = T.LimitReport(rep.rows, rep.verdict, rep.tolerance, rep.gap, rep.gap_expected,
                        rep.gap_error, rep.omegas, rep.off_path, header)
    out = _outdir(args)
    (out / "pathlimit.txt").write_text(rep.to_text(), encoding="utf-8")
    (out / "pathlimit.csv").write_text(rep.to_csv(), encoding="utf-8")
    sys.stdout.write(rep.to_text())
    verdict_line = ("double limit does not exist" if rep.verdict == "does-not-exist"
                    else "double limit undetermined")
    sys.stdout.write(verdict_line + "\n")
    return EXIT_OK if rep.max_deviation <= tol else EXIT_FAIL


def _grid(args):
    box, res = args.box, args.resolution
    if len(box) != 6 or len(res) != 3:
        raise ConfigError("box needs 6 numbers and resolution 3")
    n = [int(v) for v in res]
    if min(n) < 1 or any(v != int(v) for v in res):
        raise ConfigError("resolution entries must be integers >= 1")
    axes = [np.linspace(box[2 * i], box[2 * i + 1], n[i]) for i in range(3)]
    # x fastest, as legacy VTK expects
    Z, Y, X = np.meshgrid(axes[2], axes[1], axes[0], indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)
    spacing = [(box[2 * i + 1] - box[2 * i]) / (n[i] - 1) if n[i] > 1 else 1.0 for i in range(3)]
    return pts, n, (box[0], box[2], box[4]), spacing


def sample_fields(flow: FlowSolution, t: float, pts: np.ndarray, workers: int = 1):
    """Velocity, pressure and vorticity at admissible points; returns (mask, u, p, w)."""
    mask = flow.in_domain(pts)
    good = pts[mask]
    u = np.zeros((len(pts), 3))
    p = np.zeros(len(pts))
    w = np.zeros((len(pts), 3))
    if len(good):
        def work(chunk):
            return flow.u(t, chunk), flow.P(t, chunk), flow.vorticity_at(t, chunk)

        if workers > 1 and len(good) >= 2 * workers:
            parts = np.array_split(good, workers)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                res = list(pool.map(work, parts))
            uu = np.concatenate([r[0] for r in res])
            pp = np.concatenate([r[1] for r in res])
            ww = np.concatenate([r[2] for r in res])
        else:
            uu, pp, ww = work(good)
        u[mask], p[mask], w[mask] = uu, pp, ww
    return mask, u, p, w


def format_csv(t: float, pts, mask, u, p, w) -> str:
    lines = [",".join(CSV_COLUMNS)]
    tr = repr(float(t))
    for i in np.flatnonzero(mask):
        vals = [*pts[i], *u[i], p[i], *w[i]]
        lines.append(tr + "," + ",".join(repr(float(v)) for v in vals))
    return "\n".join(lines) + "\n"


def format_vtk(t: float, dims, origin, spacing, mask, u, p, w, title: str) -> str:
    n = len(mask)
    out = ["# vtk DataFile Version 3.0", f"{title} t={float(t)!r}", "ASCII", "DATASET STRUCTURED_POINTS",
           f"DIMENSIONS {dims[0]} {dims[1]} {dims[2]}",
           f"ORIGIN {origin[0]!r} {origin[1]!r} {origin[2]!r}",
           f"SPACING {spacing[0]!r} {spacing[1]!r} {spacing[2]!r}",
           f"POINT_DATA {n}", "SCALARS p double 1", "LOOKUP_TABLE default"]
    out += [repr(float(v)) for v in p]
    out += ["SCALARS mask int 1", "LOOKUP_TABLE default"]
    out += ["1" if m else "0" for m in mask]
    out.append("VECTORS u double")
    out += [" ".join(repr(float(c)) for c in row) for row in u]
    out.append("VECTORS vorticity double")
    out += [" ".join(repr(float(c)) for c in row) for row in w]
    return "\n".join(out) + "\n"


def cmd_export(args) -> int:
    flow = build_flow(args)
    pts, dims, origin, spacing = _grid(args)
    out = _outdir(args)
    masked_total = 0
    for k, t in enumerate(args.times):
        mask, u, p, w = sample_fields(flow, t, pts, args.workers)
        masked_total += int((~mask).sum())
        if args.format == "csv":
            text = format_csv(t, pts, mask, u, p, w)
            path = out / f"{args.prefix}_{k:03d}.csv"
        else:
            text = format_vtk(t, dims, origin, spacing, mask, u, p, w, flow.tag)
            path = out / f"{args.prefix}_{k:03d}.vtk"
        path.write_text(text, encoding="utf-8")
        sys.stdout.write(f"wrote {path}\n")
    if masked_total:
        sys.stderr.write(f"warning: {masked_total} grid point(s) inside r < {flow.r_min:g} masked\n")
    return EXIT_OK


COMMANDS = {"eigen": cmd_eigen, "construct": cmd_construct, "verify": cmd_verify,
            "pathlimit": cmd_pathlimit, "export": cmd_export}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (E.WindowExhaustedError, specfun.ConvergenceError, T.QuadratureError) as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return EXIT_SOLVER
    except (ConfigError, ValueError, TypeError) as exc:
        # parameter validation errors from the library (bad radius, zero mode, ...)
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
