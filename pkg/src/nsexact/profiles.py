"""Radial profiles g(r) with derivative chains.

A profile is a function of a radius r (3D or 2D, the profile does not care).
Radial fields differentiate g through ``G(s) = g(sqrt(2 s))`` with
``s = r**2 / 2``, so every profile exposes the chain

    G^(k)(s) = ((1/r) d/dr)^k g(r),   k = 0, 1, ...

through :meth:`RadialProfile.sderivs`. Closed-form families (spherical waves,
Bessel combinations, Gaussians, even polynomials) provide this chain
analytically and stay regular at r = 0. Generic callables fall back to
finite differences in r and need r > 0.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import specfun

__all__ = [
    "RadialProfile",
    "SphericalWave",
    "CylindricalBessel",
    "GaussianProfile",
    "EvenPolynomialProfile",
    "CallableProfile",
    "LaplacianProfile",
    "ScaledProfile",
    "sph_jtilde",
    "sph_ytilde",
    "cyl_jtilde",
    "cyl_ytilde",
]


# --- reduced Bessel chains ---------------------------------------------------
#
# sph_jtilde[k] = j_k(z) / z^k,  sph_ytilde[k] = y_k(z) / z^k   (spherical)
# cyl_jtilde[k] = J_k(z) / z^k,  cyl_ytilde[k] = Y_k(z) / z^k   (cylindrical)


def _series_cut(kmax: int) -> float:
    return kmax + 3.0


def sph_jtilde(kmax: int, z) -> np.ndarray:
    z = np.abs(np.asarray(z, dtype=float))
    out = np.empty((kmax + 1,) + z.shape)
    small = z < _series_cut(kmax)
    if small.any():
        zz = z[small]
        u = -0.5 * zz * zz
        for k in range(kmax + 1):
            term = np.full_like(zz, 1.0 / _double_factorial(2 * k + 1))
            total = term.copy()
            for m in range(1, 80):
                term = term * u / (m * (2 * k + 2 * m + 1))
                total += term
                if np.all(np.abs(term) <= 1e-18 * np.abs(total) + 1e-300):
                    break
            out[k][small] = total
    big = ~small
    if big.any():
        zz = z[big]
        z2 = zz * zz
        prev = np.sin(zz) / zz
        out[0][big] = prev
        if kmax >= 1:
            cur = (np.sin(zz) / zz - np.cos(zz)) / z2
            out[1][big] = cur
            for k in range(1, kmax):
                prev, cur = cur, ((2 * k + 1) * cur - prev) / z2
                out[k + 1][big] = cur
    return out


def sph_ytilde(kmax: int, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    sign = np.sign(z)
    az = np.abs(z)
    z2 = az * az
    out = np.empty((kmax + 1,) + az.shape)
    prev = -np.cos(az) / az
    out[0] = prev
    if kmax >= 1:
        cur = (-np.cos(az) / az - np.sin(az)) / z2
        out[1] = cur
        for k in range(1, kmax):
            prev, cur = cur, ((2 * k + 1) * cur - prev) / z2
            out[k + 1] = cur
    # y_k(z)/z^k is odd in z
    return out * sign


def cyl_jtilde(kmax: int, z) -> np.ndarray:
    z = np.abs(np.asarray(z, dtype=float))
    out = np.empty((kmax + 1,) + z.shape)
    small = z < _series_cut(kmax)
    if small.any():
        zz = z[small]
        u = -0.25 * zz * zz
        for k in range(kmax + 1):
            term = np.full_like(zz, 1.0 / (2.0 ** k * math.factorial(k)))
            total = term.copy()
            for m in range(1, 80):
                term = term * u / (m * (m + k))
                total += term
                if np.all(np.abs(term) <= 1e-18 * np.abs(total) + 1e-300):
                    break
            out[k][small] = total
    big = ~small
    if big.any():
        zz = z[big]
        z2 = zz * zz
        prev = specfun.bessel_j0(zz)
        out[0][big] = prev
        if kmax >= 1:
            cur = specfun.bessel_j1(zz) / zz
            out[1][big] = cur
            for k in range(1, kmax):
                prev, cur = cur, (2 * k * cur - prev) / z2
                out[k + 1][big] = cur
    return out


def cyl_ytilde(kmax: int, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    z2 = z * z
    out = np.empty((kmax + 1,) + z.shape)
    prev = specfun.bessel_y0(z)
    out[0] = prev
    if kmax >= 1:
        cur = specfun.bessel_y1(z) / z
        out[1] = cur
        for k in range(1, kmax):
            prev, cur = cur, (2 * k * cur - prev) / z2
            out[k + 1] = cur
    return out


def _double_factorial(n: int) -> float:
    return float(math.prod(range(n, 0, -2))) if n > 0 else 1.0


# --- chain conversions -------------------------------------------------------


@lru_cache(maxsize=None)
def _s_to_r_terms(k: int) -> tuple:
    """g^(k)(r) = sum coef * r^e * G^(m)(s), as ((e, m, coef), ...)."""
    terms = {(0, 0): 1.0}
    for _ in range(k):
        nxt: dict = {}
        for (e, m), c in terms.items():
            if e:
                nxt[(e - 1, m)] = nxt.get((e - 1, m), 0.0) + e * c
            nxt[(e + 1, m + 1)] = nxt.get((e + 1, m + 1), 0.0) + c
        terms = nxt
    return tuple((e, m, c) for (e, m), c in terms.items() if c)


@lru_cache(maxsize=None)
def _r_to_s_terms(k: int) -> tuple:
    """G^(k)(s) = sum coef * r^e * g^(m)(r), as ((e, m, coef), ...)."""
    terms = {(0, 0): 1.0}
    for _ in range(k):
        nxt: dict = {}
        for (e, m), c in terms.items():
            if e:
                nxt[(e - 2, m)] = nxt.get((e - 2, m), 0.0) + e * c
            nxt[(e - 1, m + 1)] = nxt.get((e - 1, m + 1), 0.0) + c
        terms = nxt
    return tuple((e, m, c) for (e, m), c in terms.items() if c)


class RadialProfile:
    """Base class. Subclasses implement ``_sderivs`` or ``_derivs`` (or both)."""

    analytic = True
    #: profile is singular at r = 0 (callers must keep r >= some r_min > 0)
    singular_at_origin = False

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.sderivs(0, r)[0]

    def sderivs(self, kmax: int, r) -> np.ndarray:
        """Array of ``((1/r) d/dr)^k g`` for ``k = 0..kmax``, shape ``(kmax+1,) + r.shape``."""
        r = np.asarray(r, dtype=float)
        if r.ndim == 0:
            return self.sderivs(kmax, r[None])[:, 0]
        if type(self)._sderivs is not RadialProfile._sderivs:
            return self._sderivs(kmax, r)
        d = self._derivs(kmax, r)
        out = np.zeros((kmax + 1,) + r.shape)
        for k in range(kmax + 1):
            for e, m, c in _r_to_s_terms(k):
                out[k] += c * r ** e * d[m]
        return out

    def derivs(self, kmax: int, r) -> np.ndarray:
        """Array of plain r-derivatives ``g^(k)(r)``, ``k = 0..kmax``."""
        r = np.asarray(r, dtype=float)
        if r.ndim == 0:
            return self.derivs(kmax, r[None])[:, 0]
        if type(self)._derivs is not RadialProfile._derivs:
            return self._derivs(kmax, r)
        s = self._sderivs(kmax, r)
        out = np.zeros((kmax + 1,) + r.shape)
        for k in range(kmax + 1):
            for e, m, c in _s_to_r_terms(k):
                out[k] += c * r ** e * s[m]
        return out

    def _sderivs(self, kmax, r):
        raise NotImplementedError

    def _derivs(self, kmax, r):
        raise NotImplementedError

    def laplacian(self, dim: int) -> "LaplacianProfile":
        return LaplacianProfile(self, dim)

    def __mul__(self, c):
        return ScaledProfile(self, float(c))

    __rmul__ = __mul__


class SphericalWave(RadialProfile):
    """``alpha sin(lam r)/r + beta cos(lam r)/r``, regular at 0 iff beta == 0."""

    def __init__(self, lam: float, alpha: float = 1.0, beta: float = 0.0):
        self.lam = float(lam)
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.singular_at_origin = self.beta != 0.0

    def _sderivs(self, kmax, r):
        lam = self.lam
        z = lam * r
        out = np.zeros((kmax + 1,) + np.shape(r))
        if self.alpha:
            out += self.alpha * sph_jtilde(kmax, z)
        if self.beta:
            out -= self.beta * sph_ytilde(kmax, z)
        for k in range(kmax + 1):
            out[k] *= (-1) ** k * lam ** (2 * k + 1)
        return out

    def __repr__(self):
        return f"SphericalWave(lam={self.lam}, alpha={self.alpha}, beta={self.beta})"


class CylindricalBessel(RadialProfile):
    """``scale * (c1 J0(k r) + c2 Y0(k r))``; regular at 0 iff c2 == 0."""

    def __init__(self, k: float, c1: float = 1.0, c2: float = 0.0, scale: float = 1.0):
        if not k > 0:
            raise ValueError("wavenumber must be positive")
        self.k = float(k)
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.scale = float(scale)
        self.singular_at_origin = self.c2 != 0.0

    def _sderivs(self, kmax, r):
        z = self.k * r
        out = np.zeros((kmax + 1,) + np.shape(r))
        if self.c1:
            out += self.c1 * cyl_jtilde(kmax, z)
        if self.c2:
            out += self.c2 * cyl_ytilde(kmax, z)
        for k in range(kmax + 1):
            out[k] *= self.scale * (-1) ** k * self.k ** (2 * k)
        return out

    def __repr__(self):
        return f"CylindricalBessel(k={self.k}, c1={self.c1}, c2={self.c2}, scale={self.scale})"


class GaussianProfile(RadialProfile):
    """``amplitude * exp(-r**2 / (4 sigma))``."""

    def __init__(self, sigma: float, amplitude: float = 1.0):
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)
        self.amplitude = float(amplitude)

    def _sderivs(self, kmax, r):
        rate = -1.0 / (2.0 * self.sigma)
        base = self.amplitude * np.exp(rate * 0.5 * r * r)
        return np.stack([rate ** k * base for k in range(kmax + 1)])

    def __repr__(self):
        return f"GaussianProfile(sigma={self.sigma}, amplitude={self.amplitude})"


class EvenPolynomialProfile(RadialProfile):
    """``sum_n coeffs[n] * r**(2 n)``; e.g. ``[0, 0.5]`` is ``r**2 / 2``."""

    def __init__(self, coeffs):
        self.coeffs = [float(c) for c in coeffs]

    def _sderivs(self, kmax, r):
        s = 0.5 * np.asarray(r, dtype=float) ** 2
        # G(s) = sum c_n 2^n s^n
        poly = [c * 2.0 ** n for n, c in enumerate(self.coeffs)]
        out = np.zeros((kmax + 1,) + np.shape(r))
        for k in range(kmax + 1):
            for n in range(k, len(poly)):
                out[k] += poly[n] * math.perm(n, k) * s ** (n - k)
        return out

    def __repr__(self):
        return f"EvenPolynomialProfile({self.coeffs})"


class CallableProfile(RadialProfile):
    """Profile from a plain callable ``g(r)``.

    Derivatives come from ``derivatives`` (callables for g', g'', ...) when
    given, and from 5-point Richardson finite differences otherwise. The
    (1/r d/dr) chain divides by r, so only r > 0 is supported.
    """

    analytic = False
    singular_at_origin = True

    def __init__(self, func, derivatives=(), h: float = 1e-3):
        self.func = func
        self.derivatives = tuple(derivatives)
        self.h = float(h)

    def _derivs(self, kmax, r):
        from .fields import DerivativeEngine

        r = np.asarray(r, dtype=float)
        out = np.empty((kmax + 1,) + r.shape)
        out[0] = self.func(r)
        engine = DerivativeEngine(h=self.h)
        pts = np.zeros(r.shape + (3,))
        pts[..., 0] = r
        scale = np.maximum(np.minimum(np.abs(r), 1.0), 1e-3)

        def along(t, x):
            return np.asarray(self.func(x[..., 0]), dtype=float)

        for k in range(1, kmax + 1):
            if k <= len(self.derivatives):
                out[k] = self.derivatives[k - 1](r)
            else:
                out[k] = engine.partial(along, (0, k, 0, 0), 0.0, pts, scale=scale)
        return out

    def __call__(self, r):
        return np.asarray(self.func(np.asarray(r, dtype=float)), dtype=float)


class ScaledProfile(RadialProfile):
    def __init__(self, base: RadialProfile, factor: float):
        self.base = base
        self.factor = factor
        self.analytic = base.analytic
        self.singular_at_origin = base.singular_at_origin

    def _sderivs(self, kmax, r):
        return self.factor * self.base.sderivs(kmax, r)


class LaplacianProfile(RadialProfile):
    """Radial Laplacian ``g'' + (dim-1)/r g'`` of a base profile.

    In the s variable this is ``dim G' + 2 s G''``, whose k-th s-derivative is
    ``(dim + 2k) G^(k+1) + 2 s G^(k+2)``: no division by r.
    """

    def __init__(self, base: RadialProfile, dim: int):
        if dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        self.base = base
        self.dim = dim
        self.analytic = base.analytic
        self.singular_at_origin = base.singular_at_origin

    def _sderivs(self, kmax, r):
        g = self.base.sderivs(kmax + 2, r)
        s = 0.5 * np.asarray(r, dtype=float) ** 2
        return np.stack([(self.dim + 2 * k) * g[k + 1] + 2.0 * s * g[k + 2]
                         for k in range(kmax + 1)])
