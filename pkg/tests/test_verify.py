import math
import warnings

import numpy as np
import pytest

from nsexact import eigen as E
from nsexact import fields as F
from nsexact import solutions as S
from nsexact import turbulence as T
from nsexact import verify as V
from nsexact.profiles import EvenPolynomialProfile, GaussianProfile

Z = (0.0, 0.0, 1.0)


def samples_for(flow, n=60, **kw):
    return V.SampleSet.for_flow(flow, n, seed=7, **kw)


def disc_y(eta=1.0):
    return S.cylinder_mode(E.disc_radial_eigen(E.DiscSpec(1.0), 1), eta, 1.0, 0.0)


def annulus_z(eta=0.0):
    em = E.annulus_eigen_separated(E.AnnulusSpec(1.0, 2.0), E.SeparatedBC.dirichlet(), 1)[0]
    return S.cylinder_mode(em, eta, 1.0, 0.0)


# --- sampling and reports ---

def test_sample_set_reproducible_and_in_domain():
    flow = S.euler_static(S.radial_mode(2.0, 0.0, 1.0))
    a = samples_for(flow)
    b = samples_for(flow)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.t, b.t)
    assert np.all(flow.in_domain(a.x))


def test_samples_outside_domain_rejected():
    flow = S.euler_static(S.radial_mode(2.0, 0.0, 1.0))
    bad = V.SampleSet.explicit(np.zeros(1), np.array([[0.01, 0.0, 0.0]]))
    with pytest.raises(S.DomainError):
        V.euler_residual(flow, bad)


def test_report_text_and_csv():
    flow = S.ns_decaying(S.radial_mode(1.0), 0.5)
    rep = V.ns_residual(flow, samples_for(flow, 20, t_values=[0.0, 0.5]))
    text = rep.to_text()
    assert "momentum.max_rel" in text and "passed = True" in text
    assert rep.to_csv().splitlines()[0].startswith("name,")
    assert rep.worst().name in ("momentum", "div u")


# --- momentum residuals ---

def test_ns_residual_radial_mode():
    flow = S.ns_decaying(S.radial_mode(1.0, 1.0, 0.0), 0.5)
    rep = V.ns_residual(flow, samples_for(flow, t_values=[0.0, 0.5, 2.0]))
    assert rep.passed and rep["momentum"].max_rel <= 1e-6 and rep["div u"].max_rel <= 1e-8


def test_zero_flow_residual_is_exactly_zero():
    flow = S.zero_flow()
    rep = V.ns_residual(flow, samples_for(flow, 20))
    assert rep["momentum"].max_abs == 0.0 and rep["div u"].max_abs == 0.0


def test_corrupted_pressure_fails():
    flow = S.ns_decaying(disc_y(), 0.1)
    bad = flow.with_pressure(F.ConstantField(0.0))
    rep = V.ns_residual(bad, samples_for(bad, 40))
    assert not rep.passed and rep["momentum"].max_rel > 1e-2


@pytest.mark.parametrize("mode", [lambda: S.radial_mode(-2.0, 2.0, -3.0), disc_y, annulus_z],
                         ids=["radial", "disc-Y", "annulus-Z"])
def test_euler_residual_modes(mode):
    flow = S.euler_static(mode())
    rep = V.euler_residual(flow, samples_for(flow))
    assert rep["momentum"].max_rel <= 1e-6 and rep["div u"].max_rel <= 1e-8


def test_euler_residual_rigid_swirl():
    flow = S.swirl2d(1.0, EvenPolynomialProfile([0.0, 0.5]), GaussianProfile(0.5))
    rep = V.euler_residual(flow, samples_for(flow))
    assert rep["momentum"].max_rel <= 1e-8


def test_euler_residual_constant_pressure_at_rest():
    z = F.ConstantField(0.0)
    flow = S.FlowSolution(F.VectorField3([z, z, z]), F.ConstantField(3.0), "euler-static", "rest")
    assert V.euler_residual(flow, samples_for(flow, 10))["momentum"].max_abs == 0.0


def test_euler_residual_rejects_time_dependent():
    flow = S.ns_decaying(S.radial_mode(1.0), 0.1)
    with pytest.raises(V.UnsupportedKindError):
        V.euler_residual(flow, samples_for(flow, 10))


def test_gradient_consistency():
    for flow in (S.euler_static(S.radial_mode(1.3)),
                 S.swirl2d(1.0, GaussianProfile(0.25, -0.5), None)):
        assert V.gradient_consistency(flow, samples_for(flow, 30)).passed


def test_gradient_consistency_negative_control():
    # (A x grad)(x1 x2 x3) plus a shear in x3: its convective term is not a gradient
    base = F.symplectic_grad(Z, F.PolynomialField({(1, 1, 1): 1.0}))
    shear = F.VectorField3([F.ConstantField(0.0), F.ConstantField(0.0), F.PolynomialField({(1, 0, 0): 1.0})])
    flow = S.FlowSolution(base + shear, F.ConstantField(0.0), "euler-static", "control")
    rep = V.gradient_consistency(flow, samples_for(flow, 30))
    assert rep["curl of convective term"].max_rel > 1e-3


# --- identities ---

def test_projection_identities_polynomial_pairs(rng):
    for _ in range(3):
        pair = S.SymplecticPair(rng.normal(size=3), F.PolynomialField.random(3, rng),
                                F.PolynomialField.random(3, rng))
        rep = V.projection_identities(pair, V.SampleSet.generate("spherical", (0.3, 2.0), count=40, seed=3))
        assert rep.passed, rep.to_text()


def test_projection_identities_zero_pair():
    pair = S.SymplecticPair(Z, F.ConstantField(0.0), F.ConstantField(0.0))
    rep = V.projection_identities(pair, V.SampleSet.generate(count=10))
    assert all(e.max_abs == 0.0 for e in rep.entries)


def test_projected_residuals_modes():
    rep = V.projected_residuals(S.radial_mode(1.0).pair(0.3), 0.3)
    assert rep.passed and max(e.max_rel for e in rep.entries) <= 1e-4
    m = disc_y(1.0)
    flow = S.euler_static(m)
    rep = V.projected_residuals(m.pair(1.0), 1.0, samples_for(flow, 30, t_values=[0.0, 0.7]))
    assert rep.passed


def test_projected_residuals_zero_pair_and_warning():
    zero = S.SymplecticPair(Z, F.ConstantField(0.0), F.ConstantField(0.0))
    assert all(e.max_abs == 0.0 for e in V.projected_residuals(zero, 0.1).entries)
    fd = S.SymplecticPair(Z, F.FunctionField(lambda t, x: np.sin(x[..., 0])), F.ConstantField(0.0))
    with pytest.warns(V.DegradedToleranceWarning):
        V.projected_residuals(fd, 0.1, V.SampleSet.generate(count=3))


def test_projected_residuals_detect_wrong_viscosity():
    rep = V.projected_residuals(S.radial_mode(1.0).pair(0.3), 0.6)
    assert not rep.passed


def test_vorticity_residual():
    mode = S.radial_mode(2.0)
    flow = S.ns_decaying(mode, 0.1)
    smp = samples_for(flow, 40, t_values=[0.0, 1.0])
    assert V.vorticity_residual(mode.pair(0.1), 0.1, smp, scale=0.5).passed
    assert V.vorticity_residual(flow, 0.1, smp).passed
    zero = S.SymplecticPair(Z, F.ConstantField(0.0), F.ConstantField(0.0))
    assert V.vorticity_residual(zero, 0.1, smp).entries[0].max_abs == 0.0


def test_vorticity_residual_heat_swirl():
    flow = T.swirl2d_heat(1.0, GaussianProfile(0.25, -0.5), GaussianProfile(0.5), nu=1.0)
    rep = V.vorticity_residual(flow, 1.0, samples_for(flow, 15, t_values=[0.5]))
    assert rep["vorticity equation"].max_rel <= 1e-4


def test_beltrami_and_helmholtz():
    m = S.radial_mode(1.0)
    flow = S.euler_static(m)
    assert V.beltrami_check(flow).passed and V.helmholtz_check(m).passed
    assert not V.beltrami_check(flow, sign=+1.0).passed
    z = annulus_z(0.0)
    assert V.beltrami_check(S.euler_static(z)).passed and V.helmholtz_check(z).passed
    with pytest.raises(V.UnsupportedKindError):
        V.beltrami_check(S.swirl2d(1.0, GaussianProfile(0.3), None))


def test_workers_give_identical_reports():
    flow = S.ns_decaying(S.radial_mode(1.0), 0.2)
    smp = samples_for(flow, 40)
    assert V.ns_residual(flow, smp).to_csv() == V.ns_residual(flow, smp, workers=3).to_csv()
