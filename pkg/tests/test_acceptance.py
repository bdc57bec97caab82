"""Acceptance checks, one per criterion.

Each check returns ``(passed, summary)``; the pytest wrappers print one
``PASS``/``FAIL`` line per criterion (visible with ``pytest -s``), and running
this file directly prints all of them.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from nsexact import eigen as E
from nsexact import fields as F
from nsexact import solutions as S
from nsexact import specfun
from nsexact import turbulence as T
from nsexact import verify as V
from nsexact.profiles import CylindricalBessel, GaussianProfile

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))
from test_specfun import j0_integral_zeros  # noqa: E402


def report(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}: {detail}"
    print(line)
    return passed, line


def _fd_curl(field, t, x, scale):
    J = F.DerivativeEngine().jacobian(lambda tt, y: field(tt, y), t, x, scale=scale)
    return np.stack([J[:, 2, 1] - J[:, 1, 2], J[:, 0, 2] - J[:, 2, 0], J[:, 1, 0] - J[:, 0, 1]], -1)


def check_ball():
    t0 = time.perf_counter()
    err = 0.0
    for R0 in (0.5, 1.0, 3.0):
        for n in range(1, 6):
            lam = E.ball_radial_eigen(E.BallSpec(R0), n).value
            err = max(err, abs(lam * R0 - n * math.pi))
    dt = time.perf_counter() - t0
    return report(1, "ball spectrum", err <= 1e-12 and dt < 1.0,
                  f"max |lam_n R0 - n pi| = {err:.2e} (tol 1e-12), {dt:.2f} s (< 1 s)")


def check_disc():
    t0 = time.perf_counter()
    oracle = j0_integral_zeros(4)
    err = 0.0
    for R0 in (1.0, 2.5):
        for j in range(1, 5):
            err = max(err, abs(E.disc_radial_eigen(E.DiscSpec(R0), j).value * R0 - oracle[j - 1]))
    dt = time.perf_counter() - t0
    return report(2, "disc spectrum vs integral-representation oracle", err <= 1e-10 and dt < 5.0,
                  f"max |xi_j R0 - z_j| = {err:.2e} (tol 1e-10), {dt:.2f} s (< 5 s)")


def check_annulus():
    t0 = time.perf_counter()
    spec = E.AnnulusSpec(1.0, 2.0)
    errs = []
    for bc in (E.SeparatedBC.dirichlet(), E.CoupledBC(((2.0, 1.0), (1.0, 1.0)))):
        if isinstance(bc, E.SeparatedBC):
            modes = E.annulus_eigen_separated(spec, bc, 3)
        else:
            modes = E.annulus_eigen_coupled(spec, bc, 3)
        ref = E.shooting_eigenvalues(spec, bc, 3)
        errs.append(float(np.max(np.abs(np.array([m.value for m in modes]) - ref))))
    zetas = np.random.default_rng(2024).uniform(0.1, 30.0, 10)
    det_err = max(abs(np.linalg.det(E.transfer_matrix(spec, z)) - 1.0) for z in zetas)
    dt = time.perf_counter() - t0
    ok = max(errs) <= 1e-8 and det_err <= 1e-10 and dt < 30.0
    return report(3, "annulus vs RK4 shooting", ok,
                  f"Dirichlet {errs[0]:.2e}, coupled {errs[1]:.2e} (tol 1e-8); "
                  f"max |det F - 1| = {det_err:.2e} (tol 1e-10); {dt:.1f} s (< 30 s)")


def check_ns_matrix():
    t0 = time.perf_counter()
    worst_mom = worst_div = 0.0
    cases = 0
    for lam in (-2.0, 1.0, 5.0):
        for alpha, beta in ((1.0, 0.0), (0.0, 1.0), (2.0, -3.0)):
            for nu in (0.01, 1.0):
                flow = S.ns_decaying(S.radial_mode(lam, alpha, beta), nu)
                smp = V.SampleSet.for_flow(flow, 200, seed=cases, t_values=[0.0, 0.5, 2.0])
                rep = V.ns_residual(flow, smp)
                worst_mom = max(worst_mom, rep["momentum"].max_rel)
                worst_div = max(worst_div, rep["div u"].max_rel)
                cases += 1
    flow = S.ns_decaying(S.radial_mode(1.0), 0.01)
    ctrl = V.ns_residual(flow.with_pressure(F.ConstantField(0.0)), V.SampleSet.for_flow(flow, 200))
    control = ctrl["momentum"].max_rel
    dt = time.perf_counter() - t0
    ok = worst_mom <= 1e-6 and worst_div <= 1e-8 and control > 1e-2 and dt < 120.0
    return report(4, "Navier-Stokes residual matrix", ok,
                  f"{cases} cases x 200 points: momentum {worst_mom:.2e} (tol 1e-6), "
                  f"div {worst_div:.2e} (tol 1e-8); P=0 control {control:.2e} (> 1e-2); {dt:.1f} s")


def check_euler():
    disc = E.disc_radial_eigen(E.DiscSpec(1.0), 1)
    ann = E.annulus_eigen_separated(E.AnnulusSpec(1.0, 2.0), E.SeparatedBC.dirichlet(), 1)[0]
    flows = {
        "radial": S.euler_static(S.radial_mode(1.5, 2.0, -3.0)),
        "disc-Y": S.euler_static(S.cylinder_mode(disc, 1.0)),
        "annulus-Z": S.euler_static(S.cylinder_mode(ann, 0.5, 1.0, 0.5)),
        "swirl2d": S.swirl2d(1.0, GaussianProfile(0.25, -0.5), GaussianProfile(0.5)),
    }
    res, grad = {}, {}
    for name, flow in flows.items():
        res[name] = V.euler_residual(flow, V.SampleSet.for_flow(flow, 100, seed=1))["momentum"].max_rel
        grad[name] = V.gradient_consistency(flow, V.SampleSet.for_flow(flow, 40, seed=2)).entries[0].max_rel
    ok = max(res.values()) <= 1e-6 and max(grad.values()) <= 1e-5
    detail = ", ".join(f"{k} {res[k]:.1e}/{grad[k]:.1e}" for k in flows)
    return report(5, "Euler residual / gradient consistency", ok,
                  f"{detail} (tol 1e-6 / 1e-5)")


def check_structure():
    rng = np.random.default_rng(99)
    smp = V.SampleSet.generate("spherical", (0.3, 2.0), count=60, seed=5)
    curl_err = 0.0
    for _ in range(3):
        pair = S.SymplecticPair(rng.normal(size=3), F.PolynomialField.random(3, rng),
                                F.PolynomialField.random(4, rng))
        w = S.vorticity_from_pair(pair)(smp.t, smp.x)
        c = _fd_curl(S.velocity_from_pair(pair), smp.t, smp.x, 1.0)
        curl_err = max(curl_err, float(np.max(np.abs(w - c)) / np.max(np.abs(w))))
    mode = S.radial_mode(1.2)
    w = S.vorticity_from_pair(mode.pair())(smp.t, smp.x)
    c = _fd_curl(S.velocity_from_pair(mode.pair()), smp.t, smp.x, np.minimum(np.linalg.norm(smp.x, axis=1), 1.0))
    curl_err = max(curl_err, float(np.max(np.abs(w - c)) / np.max(np.abs(w))))

    proj = 0.0
    for _ in range(5):
        pair = S.SymplecticPair(rng.normal(size=3), F.PolynomialField.random(3, rng),
                                F.PolynomialField.random(3, rng))
        proj = max(proj, max(e.max_rel for e in V.projection_identities(pair, smp).entries))

    projected = 0.0
    disc = E.disc_radial_eigen(E.DiscSpec(1.0), 1)
    for m, nu in ((S.radial_mode(1.0), 0.3), (S.radial_mode(-2.0, 2.0, -3.0, r_min=0.3), 0.01),
                  (S.cylinder_mode(disc, 1.0), 1.0)):
        pts = V.SampleSet.for_flow(S.euler_static(m), 60, seed=3, t_values=[0.0, 0.5])
        projected = max(projected, max(e.max_rel for e in V.projected_residuals(m.pair(nu), nu, pts).entries))

    flow = S.euler_static(S.radial_mode(1.0))
    bel = V.beltrami_check(flow).entries[0].max_rel
    wrong = V.beltrami_check(flow, sign=+1.0).entries[0].max_rel
    ok = curl_err <= 1e-6 and proj <= 1e-6 and projected <= 1e-4 and bel <= 1e-6 and wrong > 1e-6
    return report(6, "structural identities", ok,
                  f"vorticity vs FD curl {curl_err:.1e} (1e-6), projections {proj:.1e} (1e-6), "
                  f"projected equations {projected:.1e} (1e-4), curl u = -lam u {bel:.1e} (1e-6), "
                  f"+lam control {wrong:.1e} (must fail)")


def check_heat_kernel():
    r = np.array([0.0, 0.2, 0.9, 2.0, 4.5])
    mass = max(float(np.max(np.abs(T.heat_kernel_radial(1.0, om, r) - 1.0))) for om in (1e-3, 0.1, 3.0))
    gauss = 0.0
    for sigma, om in ((0.25, 0.1), (1.0, 0.7)):
        ref = sigma / (sigma + om) * np.exp(-r ** 2 / (4 * (sigma + om)))
        gauss = max(gauss, float(np.max(np.abs(T.heat_kernel_radial(GaussianProfile(sigma), om, r) - ref))))
    xi, om = 2.40483, 0.1
    bessel = float(np.max(np.abs(T.heat_kernel_radial(CylindricalBessel(xi), om, r)
                                 - math.exp(-om * xi ** 2) * specfun.bessel_j0(xi * r))))
    base = GaussianProfile(0.3)
    rr = np.array([0.0, 1.0, 2.5])
    semi = float(np.max(np.abs(T.heat_kernel_radial(T.ConvolvedProfile(base, 0.1), 0.2, rr)
                               - T.heat_kernel_radial(base, 0.3, rr))))
    ok = mass <= 1e-10 and gauss <= 1e-8 and bessel <= 1e-6 and semi <= 1e-7
    return report(7, "heat kernel", ok,
                  f"mass {mass:.1e} (1e-10), Gaussian {gauss:.1e} (1e-8), Bessel {bessel:.1e} (1e-6), "
                  f"semigroup {semi:.1e} (1e-7)")


def check_path_limits():
    mode = S.radial_mode(1.0)
    flow = S.ns_decaying(mode, 1.0)
    probes = V.SampleSet.for_flow(flow, 50, seed=11)
    dev = max(T.path_convergence_table(flow, T.PathSpec.geometric(om, 10.0, 1e6, 11), probes).max_deviation
              for om in (0.1, 0.5, 1.0))
    probe = T.double_limit_probe(mode, 0.1, 1.0, probes)
    lim = T.path_limit_eigen(mode, 0.5)
    e1 = V.euler_residual(lim, V.SampleSet.for_flow(lim, 100))["momentum"].max_rel
    swirl = T.swirl2d_heat(1.0, GaussianProfile(0.25, -0.5), GaussianProfile(0.5), nu=1.0)
    lim2 = T.path_limit_2d(swirl, 0.2)
    e2 = V.euler_residual(lim2, V.SampleSet.for_flow(lim2, 12))["momentum"].max_rel
    ok = (dev <= 1e-13 and probe.gap_error <= 1e-10 and probe.verdict == "does-not-exist"
          and max(e1, e2) <= 1e-6)
    return report(8, "path limits", ok,
                  f"path deviation {dev:.1e} (1e-13), gap {probe.gap:.6f} with error {probe.gap_error:.1e} "
                  f"(1e-10), verdict {probe.verdict}, limit Euler residuals {e1:.1e} / {e2:.1e} (1e-6)")


def check_determinism(workdir: Path):
    outs = []
    for k in range(2):
        d = workdir / f"run{k}"
        cmd = [sys.executable, "-m", "nsexact", "export", "--flow", "radial", "--nu", "0.3", "--beta", "0.5",
               "--resolution", "4,4,3", "--times", "0,0.7", "--outdir", str(d)]
        subprocess.run(cmd, check=True, capture_output=True)
        cmd = [sys.executable, "-m", "nsexact", "verify", "--flow", "radial", "--nu", "0.3", "--samples", "30",
               "--seed", "5", "--outdir", str(d)]
        subprocess.run(cmd, check=True, capture_output=True)
        outs.append([(d / name).read_bytes() for name in ("field_000.csv", "field_001.csv", "report.csv")])
    same = outs[0] == outs[1]
    return report(9, "determinism", same, "CSV exports and residual report byte-identical across runs"
                  if same else "outputs differ between identical runs")


def test_criterion_1_ball():
    assert check_ball()[0]


def test_criterion_2_disc():
    assert check_disc()[0]


def test_criterion_3_annulus():
    assert check_annulus()[0]


def test_criterion_4_ns_matrix():
    assert check_ns_matrix()[0]


def test_criterion_5_euler():
    assert check_euler()[0]


def test_criterion_6_structure():
    assert check_structure()[0]


def test_criterion_7_heat_kernel():
    assert check_heat_kernel()[0]


def test_criterion_8_path_limits():
    assert check_path_limits()[0]


def test_criterion_9_determinism(tmp_path):
    assert check_determinism(tmp_path)[0]


if __name__ == "__main__":
    import tempfile

    results = [check_ball(), check_disc(), check_annulus(), check_ns_matrix(), check_euler(),
               check_structure(), check_heat_kernel(), check_path_limits()]
    with tempfile.TemporaryDirectory() as tmp:
        results.append(check_determinism(Path(tmp)))
    print(f"{sum(r[0] for r in results)}/{len(results)} criteria passed")
    sys.exit(0 if all(r[0] for r in results) else 1)
