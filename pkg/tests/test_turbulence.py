import math

import numpy as np
import pytest

from nsexact import solutions as S
from nsexact import turbulence as T
from nsexact import verify as V
from nsexact.profiles import CylindricalBessel, EvenPolynomialProfile, GaussianProfile

R = np.array([0.0, 0.1, 0.7, 1.5, 3.0, 6.0])


def widened_gaussian(sigma, omega, r):
    return sigma / (sigma + omega) * np.exp(-r ** 2 / (4 * (sigma + omega)))


# --- heat kernel ---

@pytest.mark.parametrize("omega", [1e-4, 0.3, 5.0])
def test_unit_mass(omega):
    assert np.max(np.abs(T.heat_kernel_radial(2.5, omega, R) - 2.5)) < 1e-12


@pytest.mark.parametrize("sigma, omega", [(0.25, 0.1), (1.0, 2.0), (0.05, 0.5)])
def test_gaussian_closed_form(sigma, omega):
    got = T.heat_kernel_radial(GaussianProfile(sigma), omega, R)
    assert np.max(np.abs(got - widened_gaussian(sigma, omega, R))) < 1e-12


def test_gaussian_derivative():
    sigma, omega = 0.3, 0.2
    got = T.heat_kernel_radial(GaussianProfile(sigma), omega, R, derivative=True)
    s = sigma + omega
    ref = -R / (2 * s) * widened_gaussian(sigma, omega, R)
    assert np.max(np.abs(got - ref)) < 1e-12


def test_bessel_eigenfunction():
    xi, omega = 2.40483, 0.1
    got = T.heat_kernel_2d(CylindricalBessel(xi), omega, np.stack([R, 0 * R, 0 * R], -1))
    ref = math.exp(-omega * xi ** 2) * CylindricalBessel(xi)(R)
    assert np.max(np.abs(got - ref)) < 1e-10


def test_semigroup():
    base = GaussianProfile(0.2, 1.3)
    r = np.array([0.0, 0.8, 2.0])
    once = T.heat_kernel_radial(T.ConvolvedProfile(base, 0.15), 0.25, r)
    direct = T.heat_kernel_radial(base, 0.4, r)
    assert np.max(np.abs(once - direct)) < 1e-10


def test_polar_route_agrees():
    x = np.array([[0.3, 0.4], [1.2, -0.7], [0.0, 0.0]])
    prof = EvenPolynomialProfile([1.0, -0.3, 0.05])
    a = T.heat_kernel_2d(prof, 0.2, x)
    b = T.heat_kernel_2d(prof, 0.2, x, method="polar")
    assert np.max(np.abs(a - b)) < 1e-10


def test_omega_zero_and_errors():
    g = GaussianProfile(0.5)
    assert np.allclose(T.heat_kernel_radial(g, 0.0, R), g(R), rtol=0, atol=0)
    with pytest.raises(S.DomainError):
        T.heat_kernel_2d(g, 0.0, np.zeros((1, 3)))
    with pytest.raises(S.DomainError):
        T.heat_kernel_radial(g, -1.0, R)


# --- paths ---

def test_path_spec_validation():
    p = T.PathSpec.from_times(0.5, [10, 100])
    assert p.schedule == ((0.05, 10.0), (0.005, 100.0))
    with pytest.raises(S.DomainError):
        T.PathSpec(0.5, ((0.1, 10.0),))
    with pytest.raises(S.DomainError):
        T.PathSpec.from_times(0.5, [100, 10])
    with pytest.raises(S.DomainError):
        T.PathSpec(0.0)
    assert len(T.PathSpec.geometric(1.0).schedule) == 6


def test_observation_schedule_and_omegas():
    assert T.observation_schedule(0.01, [1.0, 2.0]) == [(1.0, 0.01), (2.0, 0.02)]
    a = T.sample_omegas(3, 0.1, 1.0, seed=4)
    assert np.array_equal(a, T.sample_omegas(3, 0.1, 1.0, seed=4))
    assert np.all((a >= 0.1) & (a <= 1.0))


def test_path_limit_eigen():
    mode = S.radial_mode(1.0)
    x = np.array([[0.3, 0.2, -0.5], [1.0, 2.0, 0.1]])
    base = S.euler_static(mode)
    assert np.array_equal(T.path_limit_eigen(mode, 0.0).u(0.0, x), base.u(0.0, x))
    assert np.allclose(T.path_limit_eigen(mode, 1.0).u(0.0, x), math.exp(-1) * base.u(0.0, x), rtol=1e-15)


def test_path_table_eigen():
    flow = S.ns_decaying(S.radial_mode(1.0), 1.0)
    rep = T.path_convergence_table(flow, T.PathSpec.geometric(0.5), V.SampleSet.for_flow(flow, 30))
    assert len(rep.rows) == 6 and rep.max_deviation <= 1e-13 and rep.verdict == "undetermined"
    empty = T.path_convergence_table(flow, T.PathSpec(0.5), V.SampleSet.for_flow(flow, 5))
    assert empty.rows == () and empty.verdict == "undetermined"


def test_double_limit_probe():
    mode = S.radial_mode(1.0)
    probes = V.SampleSet.for_flow(S.euler_static(mode), 30)
    rep = T.double_limit_probe(mode, 0.1, 1.0, probes)
    assert rep.verdict == "does-not-exist" and rep.double_limit_exists is False
    assert rep.gap_expected / rep.gap * rep.gap == pytest.approx(rep.gap)
    factor = abs(math.exp(-0.1) - math.exp(-1.0))
    assert factor == pytest.approx(0.537, abs=1e-3)
    assert rep.gap_error <= 1e-10
    speeds = [row[2] for row in rep.off_path]
    assert speeds[-1] < 1e-12 * speeds[0] + 1e-300
    close = T.double_limit_probe(mode, 0.5, 0.5 + 1e-9, probes)
    assert close.verdict == "undetermined"
    with pytest.raises(T.DegenerateProbeError):
        T.double_limit_probe(mode, 0.3, 0.3, probes)


# --- swirl flows under the heat semigroup ---

@pytest.fixture(scope="module")
def gaussian_swirl():
    return T.swirl2d_heat(1.0, GaussianProfile(0.25, -0.5), GaussianProfile(0.5), nu=1.0)


def test_path_limit_2d_matches_closed_form(gaussian_swirl):
    lim = T.path_limit_2d(gaussian_swirl, 0.2)
    x = np.array([[0.3, 0.4, 0.0], [1.0, -0.5, 2.0], [0.05, 0.0, 0.0]])
    r = np.hypot(x[:, 0], x[:, 1])
    # Phi = -0.5 exp(-r^2 / 1) widens to -0.5 (0.25/0.45) exp(-r^2 / 1.8); u_theta = Phi'
    dphi = -0.5 * (-r / (2 * 0.45)) * widened_gaussian(0.25, 0.2, r)
    u = lim.u(0.0, x)
    u_theta = (-x[:, 1] * u[:, 0] + x[:, 0] * u[:, 1]) / r
    assert np.max(np.abs(u_theta - dphi)) < 1e-12


def test_path_limit_2d_small_omega(gaussian_swirl):
    lim = T.path_limit_2d(gaussian_swirl, 1e-6)
    base = S.swirl2d(1.0, GaussianProfile(0.25, -0.5), GaussianProfile(0.5))
    x = np.array([[0.3, 0.4, 0.0], [1.0, -0.5, 2.0]])
    assert np.max(np.abs(lim.u(0.0, x) - base.u(0.0, x))) < 1e-3


def test_path_table_swirl(gaussian_swirl):
    probes = V.SampleSet.for_flow(gaussian_swirl, 8)
    rep = T.path_convergence_table(gaussian_swirl, T.PathSpec.from_times(0.2, [10.0, 1e3, 1e6]), probes)
    assert rep.max_deviation <= 1e-8


def test_heat_swirl_is_navier_stokes(gaussian_swirl):
    rep = V.ns_residual(gaussian_swirl, V.SampleSet.for_flow(gaussian_swirl, 10, t_values=[0.5]))
    assert rep.passed


def test_heat_swirl_errors():
    with pytest.raises(S.DomainError):
        T.swirl2d_heat(1.0, GaussianProfile(0.3), None, nu=0.0)
    with pytest.raises(S.DomainError):
        T.path_limit_2d(S.euler_static(S.radial_mode(1.0)), 0.2)
