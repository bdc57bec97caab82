"""Exact flows built from the (1,2)-symplectic representation.

A velocity field is written as ``u = (A x grad) phi + ((A x grad) x grad) psi``
for a constant axis A. Choosing ``phi = lam * Psi`` with ``-lap Psi = lam**2 Psi``
gives a Beltrami field, ``curl u = -lam u``, whose convective term is the
gradient of ``|u|**2 / 2``. Such fields are static Euler solutions with
pressure ``-|u|**2 / 2``, and the factor ``exp(-nu lam**2 t)`` turns them into
Navier-Stokes solutions.

Swirl flows ``u = a Phi'(r) e_theta - a lap2(Psi) e_3`` (r the distance to
the x3 axis) are static Euler solutions for arbitrary profiles, with the
pressure obtained by radial quadrature of the centripetal balance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import integrate

from . import fields as F
from .eigen import EigenMode
from .fields import (Axis, ConstantField, ProductField, RadialField, ScalarField, TimeDecay,
                     VectorField3)
from .profiles import (CallableProfile, EvenPolynomialProfile, RadialProfile, SphericalWave)

__all__ = [
    "DomainError",
    "DegenerateModeError",
    "ZeroModeError",
    "SymplecticPair",
    "BeltramiMode",
    "FlowSolution",
    "Swirl2D",
    "SwirlPressureProfile",
    "velocity_from_pair",
    "vorticity_from_pair",
    "radial_mode",
    "cylinder_mode",
    "euler_static",
    "ns_decaying",
    "swirl2d",
    "superpose",
    "zero_flow",
    "as_profile",
]

#: default inner radius for profiles singular at the origin
DEFAULT_R_MIN = 0.1


class DomainError(ValueError):
    """Evaluation or parameter outside the admissible domain."""


class DegenerateModeError(ValueError):
    """Mode with zero eigenvalue."""


class ZeroModeError(ValueError):
    """Mode whose coefficients all vanish."""


@dataclass(frozen=True)
class SymplecticPair:
    """Axis A with the two potentials of the representation."""

    A: Axis
    phi: ScalarField
    psi: ScalarField

    def __post_init__(self):
        object.__setattr__(self, "A", Axis.of(self.A))


def velocity_from_pair(pair: SymplecticPair) -> VectorField3:
    """``(A x grad) phi + ((A x grad) x grad) psi``."""
    return F.symplectic_grad(pair.A, pair.phi) + F.symplectic_curl2(pair.A, pair.psi)


def vorticity_from_pair(pair: SymplecticPair) -> VectorField3:
    """Closed-form vorticity ``-((A x grad) x grad) phi + (A x grad) lap psi``."""
    return -F.symplectic_curl2(pair.A, pair.phi) + F.symplectic_grad(pair.A, F.laplacian(pair.psi))


@dataclass(frozen=True)
class BeltramiMode:
    """Helmholtz profile ``Psi`` with ``-lap Psi = lam**2 Psi`` and an axis.

    ``split`` is ``(radial eigenvalue, eta)`` for cylinder modes, so that
    ``lam**2 = split[0]**2 + split[1]**2``. ``geometry`` says which radius
    the profile depends on: 'spherical' (``|x|``) or 'cylindrical'
    (distance to the x3 axis). Evaluation is admissible for
    ``r_min <= r``; ``r_max`` bounds the natural sampling region.
    """

    A: Axis
    lam: float
    psi: ScalarField
    tag: str
    alpha: float
    beta: float
    geometry: str
    r_min: float = 0.0
    r_max: float = math.inf
    split: tuple | None = None
    eigen: EigenMode | None = None

    @property
    def length_scale(self) -> float:
        return 1.0 / abs(self.lam)

    def pair(self, nu: float = 0.0) -> SymplecticPair:
        """Potentials ``(lam Psi, Psi)`` times ``exp(-nu lam**2 t)``."""
        psi = self.psi
        if nu:
            psi = ProductField(TimeDecay(nu * self.lam ** 2), psi)
        return SymplecticPair(self.A, self.lam * psi, psi)


def _check_coefficients(alpha, beta):
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise ValueError("coefficients must be finite")
    if alpha == 0.0 and beta == 0.0:
        raise ZeroModeError("alpha and beta are both zero")


def radial_mode(lam: float, alpha: float = 1.0, beta: float = 0.0, axis=(0.0, 0.0, 1.0),
                r_min: float | None = None) -> BeltramiMode:
    """Mode with ``Psi = alpha sin(lam r)/r + beta cos(lam r)/r``, r = |x|.

    ``beta = 0`` is smooth through the origin (tag 'Xs'); otherwise the
    field is restricted to ``r >= r_min`` (default 0.1, tag 'X').
    """
    lam = float(lam)
    if lam == 0.0 or not math.isfinite(lam):
        raise DegenerateModeError("lam must be finite and nonzero")
    _check_coefficients(alpha, beta)
    singular = beta != 0.0
    if r_min is None:
        r_min = DEFAULT_R_MIN if singular else 0.0
    elif singular and not r_min > 0:
        raise DomainError("a mode with beta != 0 needs r_min > 0")
    psi = RadialField(SphericalWave(lam, alpha, beta), dim=3)
    return BeltramiMode(Axis.of(axis), lam, psi, "X" if singular else "Xs", float(alpha),
                        float(beta), "spherical", float(r_min))


def cylinder_mode(profile: EigenMode, eta: float, alpha: float = 1.0, beta: float = 0.0,
                  a: float = 1.0) -> BeltramiMode:
    """Mode ``Psi = W(r) (alpha sin(eta x3) + beta cos(eta x3))`` with axis ``a e_3``.

    ``W`` is a disc or annulus eigenfunction; ``lam = sqrt(value**2 + eta**2)``.
    For ``eta = 0`` the axial factor is the constant ``alpha + beta``.
    """
    if profile.family.startswith("disc"):
        tag = "Y"
    elif profile.family.startswith("annulus"):
        tag = "Z"
    else:
        raise ValueError(f"cylinder modes need a disc or annulus profile, got {profile.family}")
    _check_coefficients(alpha, beta)
    eta = float(eta)
    if eta == 0.0 and alpha + beta == 0.0:
        raise ZeroModeError("eta = 0 with alpha + beta = 0 gives the zero mode")
    lam = math.sqrt(profile.value ** 2 + eta ** 2)
    psi = ProductField(RadialField(profile.profile, dim=2), F.AxialWave(eta, alpha, beta))
    r_min, r_max = profile.domain
    return BeltramiMode(Axis.of((0.0, 0.0, a)), lam, psi, tag, float(alpha), float(beta),
                        "cylindrical", float(r_min), float(r_max), split=(profile.value, eta),
                        eigen=profile)


@dataclass(frozen=True)
class Swirl2D:
    """Swirl flow with axis ``a e_3`` and arbitrary radial profiles Phi, Psi of the 2D radius."""

    a: float
    Phi: RadialProfile
    Psi: RadialProfile
    r_ref: float = 1.0
    r_min: float = 0.0

    def azimuthal(self, r) -> np.ndarray:
        """``a Phi'(r)``."""
        return self.a * self.Phi.derivs(1, r)[1]

    def axial(self, r) -> np.ndarray:
        """``-a lap2 Psi(r)``."""
        return -self.a * self.Psi.laplacian(2)(r)


class SwirlPressureProfile(RadialProfile):
    """``P(r) = int_{r_ref}^r (a Phi'(s))**2 / s ds``.

    The value comes from adaptive quadrature. Derivatives are exact:
    ``(1/r) P' = a**2 (Phi'/r)**2`` so the s-chain of P is a Leibniz product
    of the s-chain of Phi.
    """

    def __init__(self, a: float, Phi: RadialProfile, r_ref: float = 1.0,
                 epsabs: float = 1e-14, epsrel: float = 1e-13):
        self.a = float(a)
        self.Phi = Phi
        self.r_ref = float(r_ref)
        self.epsabs = epsabs
        self.epsrel = epsrel
        self.analytic = Phi.analytic
        self.singular_at_origin = Phi.singular_at_origin

    def values(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        flat = r.reshape(-1)
        span = flat - self.r_ref
        if flat.size == 0 or self.a == 0.0:
            return np.zeros(r.shape)
        a2 = self.a ** 2

        def integrand(tau):
            s = self.r_ref + tau * span
            g1 = self.Phi.sderivs(1, s)[1]
            # u_theta^2 / s = a^2 s (Phi'/s)^2, regular at s = 0
            return a2 * s * g1 * g1 * span

        val, _ = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=self.epsabs, epsrel=self.epsrel,
                                    norm="max", limit=400)
        return np.asarray(val).reshape(r.shape)

    def _sderivs(self, kmax, r):
        out = np.zeros((kmax + 1,) + np.shape(r))
        out[0] = self.values(r)
        if kmax == 0:
            return out
        g = self.Phi.sderivs(kmax, r)
        a2 = self.a ** 2
        for k in range(1, kmax + 1):
            m = k - 1
            out[k] = a2 * sum(math.comb(m, i) * g[1 + i] * g[1 + m - i] for i in range(m + 1))
        return out


def as_profile(p) -> RadialProfile:
    """Coerce None, a number, a profile, or a callable of r into a RadialProfile."""
    if p is None:
        return EvenPolynomialProfile([0.0])
    if isinstance(p, RadialProfile):
        return p
    if isinstance(p, (int, float)):
        return EvenPolynomialProfile([float(p)])
    if callable(p):
        return CallableProfile(p)
    raise TypeError(f"cannot interpret {p!r} as a radial profile")


@dataclass(frozen=True)
class FlowSolution:
    """Velocity, pressure and metadata of an exact flow.

    ``kind`` is 'euler-static', 'ns-decaying' or 'heat-2d'. The admissible
    region is ``radius(x) >= r_min`` with the radius set by ``geometry``.
    ``length_scale`` and ``time_scale`` size finite-difference steps.
    """

    u: VectorField3
    P: ScalarField
    kind: str
    tag: str
    nu: float = 0.0
    geometry: str = "spherical"
    r_min: float = 0.0
    r_max: float = math.inf
    lam: float | None = None
    vorticity: VectorField3 | None = None
    mode: BeltramiMode | None = None
    pair: SymplecticPair | None = None
    swirl: Swirl2D | None = None
    length_scale: float = 1.0
    time_scale: float = math.inf
    params: dict = field(default_factory=dict)

    def radius(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.geometry == "cylindrical":
            return np.hypot(x[..., 0], x[..., 1])
        return np.sqrt(np.sum(x * x, axis=-1))

    def in_domain(self, x) -> np.ndarray:
        return self.radius(x) >= self.r_min

    def check_domain(self, x) -> np.ndarray:
        x = F.as_points(x)
        bad = ~self.in_domain(x)
        if np.any(bad):
            worst = x[bad].reshape(-1, 3)[0]
            raise DomainError(f"{int(bad.sum())} point(s) inside the excluded region "
                              f"r < {self.r_min:g}, e.g. {tuple(worst)}")
        return x

    def velocity(self, t, x) -> np.ndarray:
        return self.u(t, self.check_domain(x))

    def pressure(self, t, x) -> np.ndarray:
        return self.P(t, self.check_domain(x))

    def vorticity_at(self, t, x) -> np.ndarray:
        x = self.check_domain(x)
        if self.vorticity is not None:
            return self.vorticity(t, x)
        return F.curl(self.u)(t, x)

    def fd_scale(self, x) -> np.ndarray:
        """Per-point length scale: the flow scale, shrunk near a singular axis or centre."""
        L = np.full(np.shape(x)[:-1], self.length_scale)
        if self.r_min > 0:
            L = np.minimum(L, self.radius(x))
        return L

    def fd_time_scale(self, t) -> np.ndarray:
        """Per-point time scale for finite differences in t."""
        if self.kind == "heat-2d":
            # heat evolution is defined for t >= 0 only: stay well inside
            return np.maximum(0.25 * np.abs(np.asarray(t, dtype=float)), 1e-12)
        ts = self.time_scale if math.isfinite(self.time_scale) else 1.0
        return np.full(np.shape(t), ts)

    def with_pressure(self, P: ScalarField, tag_suffix: str = "-modified") -> "FlowSolution":
        return replace(self, P=P, tag=self.tag + tag_suffix)


def _mode_flow(mode: BeltramiMode, nu: float, kind: str, tag_suffix: str,
               amplitude: float = 1.0) -> FlowSolution:
    pair = mode.pair(nu)
    if amplitude != 1.0:
        pair = SymplecticPair(pair.A, amplitude * pair.phi, amplitude * pair.psi)
    u = velocity_from_pair(pair)
    u0 = velocity_from_pair(SymplecticPair(pair.A, mode.lam * mode.psi, mode.psi))
    P0 = -0.5 * (amplitude ** 2) * u0.norm2()
    P = ProductField(TimeDecay(2.0 * nu * mode.lam ** 2), P0) if nu else P0
    tscale = 1.0 / (nu * mode.lam ** 2) if nu else math.inf
    return FlowSolution(u=u, P=P, kind=kind, tag=f"{mode.tag}_{tag_suffix}", nu=float(nu),
                        geometry=mode.geometry, r_min=mode.r_min, r_max=mode.r_max,
                        lam=mode.lam, vorticity=vorticity_from_pair(pair), mode=mode, pair=pair,
                        length_scale=mode.length_scale, time_scale=tscale,
                        params={"lam": mode.lam, "alpha": mode.alpha, "beta": mode.beta,
                                "amplitude": amplitude})


def euler_static(mode: BeltramiMode) -> FlowSolution:
    """Static Euler flow ``u0 = lam (A x grad) Psi + ((A x grad) x grad) Psi``, ``P = -|u0|^2 / 2``."""
    return _mode_flow(mode, 0.0, "euler-static", "E")


def ns_decaying(mode: BeltramiMode, nu: float) -> FlowSolution:
    """Navier-Stokes flow ``exp(-nu lam^2 t) u0`` with ``P = -exp(-2 nu lam^2 t) |u0|^2 / 2``."""
    if not (math.isfinite(nu) and nu > 0):
        raise DomainError("viscosity must be positive")
    return _mode_flow(mode, float(nu), "ns-decaying", "NS")


def swirl2d(a: float, Phi=None, Psi=None, r_ref: float = 1.0, r_min: float = 0.0,
            length_scale: float = 1.0) -> FlowSolution:
    """Static swirl flow with axis ``a e_3`` and profiles of the distance to the x3 axis."""
    Phi, Psi = as_profile(Phi), as_profile(Psi)
    if r_min <= 0 and (Phi.singular_at_origin or Psi.singular_at_origin):
        raise DomainError("profiles given by samples or singular at r = 0 need r_min > 0")
    A = Axis.of((0.0, 0.0, a)) if a else None
    sw = Swirl2D(float(a), Phi, Psi, float(r_ref), float(r_min))
    if A is None:
        flow = zero_flow()
        return replace(flow, tag="X2R_E", geometry="cylindrical", r_min=float(r_min), swirl=sw)
    pair = SymplecticPair(A, RadialField(Phi, dim=2), RadialField(Psi, dim=2))
    P = RadialField(SwirlPressureProfile(a, Phi, r_ref), dim=2)
    return FlowSolution(u=velocity_from_pair(pair), P=P, kind="euler-static", tag="X2R_E",
                        geometry="cylindrical", r_min=float(r_min), vorticity=vorticity_from_pair(pair),
                        pair=pair, swirl=sw, length_scale=float(length_scale),
                        params={"a": float(a), "r_ref": float(r_ref)})


def superpose(flows, weights=None) -> FlowSolution:
    """Linear combination of mode flows sharing one eigenvalue, axis, centre and viscosity.

    The pressure is rebuilt as ``-|u|^2 / 2`` of the combined velocity, which
    is again a Beltrami field.
    """
    flows = list(flows)
    if not flows:
        raise ValueError("nothing to superpose")
    weights = [1.0] * len(flows) if weights is None else [float(w) for w in weights]
    first = flows[0]
    for f in flows:
        if f.mode is None or f.lam != first.lam or f.nu != first.nu or f.kind != first.kind:
            raise ValueError("superpose needs mode flows with equal lam, nu and kind")
        if f.mode.A != first.mode.A or f.geometry != first.geometry:
            raise ValueError("superpose needs a common axis and geometry")
    u = flows[0].u * weights[0]
    w = flows[0].vorticity * weights[0]
    for f, c in zip(flows[1:], weights[1:]):
        u = u + f.u * c
        w = w + f.vorticity * c
    P = -0.5 * u.norm2()
    return replace(first, u=u, P=P, vorticity=w, mode=None, pair=None,
                   r_min=max(f.r_min for f in flows), tag=first.tag + "+",
                   params={"weights": tuple(weights)})


def zero_flow() -> FlowSolution:
    z = ConstantField(0.0)
    return FlowSolution(u=VectorField3([z, z, z]), P=z, kind="euler-static", tag="zero",
                        vorticity=VectorField3([z, z, z]))
