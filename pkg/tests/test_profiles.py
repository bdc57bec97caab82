import math

import mpmath
import numpy as np
import pytest

from nsexact.profiles import (CallableProfile, CylindricalBessel, EvenPolynomialProfile,
                              GaussianProfile, SphericalWave)

R = np.array([1e-3, 0.05, 0.3, 1.0, 2.7, 7.5, 19.0])


def _mp_derivs(g, r, kmax):
    with mpmath.workdps(40):
        return np.array([float(mpmath.diff(g, mpmath.mpf(r), k)) for k in range(kmax + 1)])


def _check(profile, g, radii, kmax=4, tol=1e-11):
    got = profile.derivs(kmax, radii)
    for i, r in enumerate(radii):
        ref = _mp_derivs(g, r, kmax)
        scale = np.max(np.abs(ref)) + 1e-300
        assert np.max(np.abs(got[:, i] - ref)) / scale < tol, (r, got[:, i], ref)


@pytest.mark.parametrize("lam, alpha", [(1.0, 1.0), (2.5, -0.7), (-2.0, 1.3)])
def test_spherical_regular(lam, alpha):
    g = lambda r: alpha * mpmath.sin(lam * r) / r
    _check(SphericalWave(lam, alpha, 0.0), g, R)


def test_spherical_singular():
    g = lambda r: (0.4 * mpmath.sin(1.5 * r) + 1.1 * mpmath.cos(1.5 * r)) / r
    _check(SphericalWave(1.5, 0.4, 1.1), g, R[2:], tol=1e-10)


def test_cylindrical_bessel():
    g = lambda r: 0.5 * (0.8 * mpmath.besselj(0, 2.1 * r) - 0.3 * mpmath.bessely(0, 2.1 * r))
    _check(CylindricalBessel(2.1, 0.8, -0.3, 0.5), g, np.array([0.2, 1.0, 3.3, 6.0, 14.0]), tol=1e-10)
    _check(CylindricalBessel(2.1), lambda r: mpmath.besselj(0, 2.1 * r), R[:-1])


def test_gaussian_and_polynomial():
    _check(GaussianProfile(0.3, -1.2), lambda r: -1.2 * mpmath.exp(-r * r / 1.2), R[:5])
    _check(EvenPolynomialProfile([1.0, -0.5, 0.25]), lambda r: 1 - 0.5 * r ** 2 + 0.25 * r ** 4, R)


def test_sderivs_match_chain_rule():
    p = SphericalWave(1.7)
    r = np.array([0.4, 1.3, 3.0])
    s = p.sderivs(2, r)
    d = p.derivs(2, r)
    assert np.allclose(s[1], d[1] / r, rtol=1e-13)
    assert np.allclose(s[2], (d[2] - d[1] / r) / r ** 2, rtol=1e-12)


def test_sderivs_regular_at_origin():
    s = SphericalWave(2.0).sderivs(4, np.array([0.0]))
    # sin(2r)/r = 2 - 4/3 r^2 + ...: G(0) = 2, G'(0) = d/ds(2 - 8/3 s) = -8/3
    assert s[0, 0] == pytest.approx(2.0, abs=1e-15)
    assert s[1, 0] == pytest.approx(-8.0 / 3.0, rel=1e-14)


def test_laplacian_profile():
    p = SphericalWave(1.3)
    r = np.array([0.2, 1.0, 4.0])
    lap = p.laplacian(3)(r)
    assert np.allclose(lap, -1.3 ** 2 * p(r), rtol=1e-12, atol=1e-14)
    c = CylindricalBessel(2.0)
    assert np.allclose(c.laplacian(2)(r), -4.0 * c(r), atol=1e-13)


def test_callable_profile_fd():
    p = CallableProfile(lambda r: np.sin(r) / r)
    r = np.array([0.5, 1.0, 2.0])
    ref = SphericalWave(1.0).derivs(3, r)
    got = p.derivs(3, r)
    assert np.max(np.abs(got - ref)) < 1e-8


def test_scalar_argument():
    assert SphericalWave(1.0)(math.pi / 2) == pytest.approx(2.0 / math.pi, rel=1e-15)
    assert SphericalWave(1.0).derivs(1, 1.0).shape == (2,)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        GaussianProfile(0.0)
    with pytest.raises(ValueError):
        CylindricalBessel(-1.0)
