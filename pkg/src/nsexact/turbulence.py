"""Limits along viscosity-time paths and the 2D heat semigroup.

Every flow in this package depends on viscosity and time only through the
product ``omega = nu * t``. On a path ``nu * t = omega`` it is therefore
constant, and letting ``nu -> 0`` with ``t -> inf`` along the path gives a
static Euler flow that depends on omega. Two paths with different omega
give different limits, so the unrestricted double limit cannot exist;
:func:`double_limit_probe` checks this numerically.

For the swirl class the time dependence is Gaussian convolution of the
profiles with the 2D heat kernel of variance parameter ``omega``. For radial
profiles the angular integral reduces to a modified Bessel function, which
is evaluated in its exponentially scaled form to stay finite for any omega.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import fields as F
from . import specfun
from .fields import DerivativeEngine, FunctionField, VectorField3
from .profiles import RadialProfile
from .solutions import (BeltramiMode, DomainError, FlowSolution, Swirl2D, _mode_flow, as_profile,
                        ns_decaying)

__all__ = [
    "QuadratureError",
    "DegenerateProbeError",
    "PathSpec",
    "LimitReport",
    "heat_kernel_2d",
    "heat_kernel_radial",
    "ConvolvedProfile",
    "swirl2d_heat",
    "path_limit_eigen",
    "path_limit_2d",
    "path_convergence_table",
    "double_limit_probe",
    "observation_schedule",
    "sample_omegas",
    "KERNEL_HALF_WIDTH",
]

#: truncation of the radial kernel in units of sqrt(omega); tail below 1e-15
KERNEL_HALF_WIDTH = 12.0


class QuadratureError(RuntimeError):
    """Adaptive quadrature missed its tolerance; ``estimate`` and ``error`` hold what it reached."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DegenerateProbeError(ValueError):
    """The two path constants coincide."""


# --- paths --------------------------------------------------------------------


@dataclass(frozen=True)
class PathSpec:
    """Path constant ``omega`` and schedule points ``(nu_k, t_k)`` with ``nu_k t_k = omega``."""

    omega: float
    schedule: tuple = ()

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise DomainError("omega must be positive")
        sched = tuple((float(n), float(t)) for n, t in self.schedule)
        prev = -math.inf
        for nu, t in sched:
            if not (nu > 0 and t > 0):
                raise DomainError("schedule needs positive nu and t")
            if abs(nu * t - self.omega) > 1e-14 * self.omega:
                raise DomainError(f"schedule point ({nu!r}, {t!r}) is off the path nu t = {self.omega!r}")
            if not t > prev:
                raise DomainError("schedule times must increase strictly")
            prev = t
        object.__setattr__(self, "schedule", sched)

    @classmethod
    def from_times(cls, omega: float, times) -> "PathSpec":
        omega = float(omega)
        return cls(omega, tuple((omega / float(t), float(t)) for t in times))

    @classmethod
    def geometric(cls, omega: float, t_first: float = 10.0, t_last: float = 1e6,
                  count: int = 6) -> "PathSpec":
        """Times spaced geometrically from ``t_first`` to ``t_last``."""
        if count == 0:
            return cls(float(omega), ())
        return cls.from_times(omega, np.geomspace(t_first, t_last, count))


def observation_schedule(nu: float, times) -> list[tuple[float, float]]:
    """Pairs ``(t_n, omega_n = nu t_n)`` for a run observed at increasing times."""
    times = [float(t) for t in times]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise DomainError("observation times must increase strictly")
    return [(t, nu * t) for t in times]


def sample_omegas(count: int, low: float, high: float, seed: int = 0) -> np.ndarray:
    """Path constants drawn uniformly from ``[low, high]`` with a seeded generator."""
    if not 0 < low <= high:
        raise DomainError("omega range needs 0 < low <= high")
    return np.random.default_rng(seed).uniform(low, high, count)


# --- heat kernel --------------------------------------------------------------


def _profile_fn(Phi):
    Phi = as_profile(Phi)
    return lambda s: np.asarray(Phi(s), dtype=float)


def heat_kernel_radial(Phi, omega, r, derivative: bool = False, epsabs: float = 1e-13,
                       epsrel: float = 1e-12) -> np.ndarray:
    """Radial Gaussian convolution ``(K_omega * Phi)(r)`` or its r-derivative.

    Uses ``(1/2 omega) int exp(-(r-s)^2 / 4 omega) I0e(r s / 2 omega) Phi(s) s ds``
    over ``s`` within ``12 sqrt(omega)`` of ``r``; the derivative uses I1e
    with ``Phi'`` in place of I0e with ``Phi``. ``omega`` may be an array
    broadcasting against ``r``; entries equal to 0 return ``Phi`` itself.
    """
    fn = _profile_fn(Phi)
    prof = as_profile(Phi)
    r = np.asarray(r, dtype=float)
    om = np.asarray(omega, dtype=float)
    r, om = np.broadcast_arrays(r, om)
    shape = r.shape
    r, om = r.reshape(-1), om.reshape(-1)
    if np.any(~np.isfinite(om)) or np.any(om < 0):
        raise DomainError("omega must be non-negative")
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    out = np.empty(r.shape)
    zero = om == 0.0
    if np.any(zero):
        out[zero] = prof.derivs(1, r[zero])[1] if derivative else fn(r[zero])
    live = ~zero
    if np.any(live):
        if derivative:
            # the semigroup commutes with grad: d/dr (K * Phi) is the order-1
            # reduction of K * (Phi'(s) e_s), free of cancellation
            src = lambda s: prof.derivs(1, s)[1]
        else:
            src = fn
        out[live] = _radial_quad(src, r[live], om[live], derivative, epsabs, epsrel)
    return out.reshape(shape)


def _radial_quad(fn, r, om, derivative, epsabs, epsrel):
    # integrate in y = (s - r) / (2 sqrt(omega)), where the integrand is O(|Phi|)
    # for every omega; in s it grows like 1/omega and roundoff swamps epsabs
    w = np.sqrt(om)
    half = 0.5 * KERNEL_HALF_WIDTH
    y_lo = np.maximum(-half, -r / (2.0 * w))
    y_span = half - y_lo
    two_om = 2.0 * om

    def integrand(tau):
        y = y_lo + tau * y_span
        s = np.maximum(r + 2.0 * w * y, 0.0)
        z = r * s / two_om
        g = np.exp(-y * y)
        k = g * (specfun.bessel_i1_scaled(z) if derivative else specfun.bessel_i0_scaled(z))
        return k * fn(s) * s * y_span / w

    val, err, info = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel,
                                        norm="max", limit=2000, full_output=True)
    if info.status != 0:
        raise QuadratureError(f"radial heat-kernel quadrature did not converge (error {err:.2e})",
                              val, err)
    return val


def heat_kernel_2d(Phi, omega: float, x, method: str = "radial", derivative: bool = False,
                   epsabs: float = 1e-13, epsrel: float = 1e-12) -> np.ndarray:
    """``(1/4 pi omega) int exp(-|y|^2 / 4 omega) Phi(|x - y|) dy`` at 2D points ``x``.

    ``method='radial'`` uses the Bessel reduction; ``'polar'`` integrates in
    polar coordinates centred at each point with ``scipy.integrate.dblquad``
    (slow; an independent check). ``x`` has a trailing axis of length 2 or 3
    (only the first two coordinates are used).
    """
    if not (np.all(np.isfinite(omega)) and np.all(np.asarray(omega) > 0)):
        raise DomainError("omega must be positive")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] not in (2, 3):
        raise DomainError("points need a trailing axis of length 2 or 3")
    r = np.hypot(x[..., 0], x[..., 1])
    if method == "radial":
        return heat_kernel_radial(Phi, omega, r, derivative, epsabs, epsrel)
    if method != "polar":
        raise ValueError(f"unknown method {method!r}")
    if derivative:
        raise ValueError("the polar route evaluates values only")
    fn = _profile_fn(Phi)
    flat = x.reshape(-1, x.shape[-1])[:, :2]
    oms = np.broadcast_to(np.asarray(omega, dtype=float), r.shape).reshape(-1)
    out = np.empty(flat.shape[0])
    for i, (p, om) in enumerate(zip(flat, oms)):
        R = KERNEL_HALF_WIDTH * math.sqrt(om)

        def f(theta, rho, p=p, om=om):
            q = math.hypot(p[0] - rho * math.cos(theta), p[1] - rho * math.sin(theta))
            return math.exp(-rho * rho / (4.0 * om)) * float(fn(np.array([q]))[0]) * rho

        val, err = integrate.dblquad(f, 0.0, R, 0.0, 2.0 * math.pi, epsabs=epsabs * 4 * math.pi * om,
                                     epsrel=epsrel)
        out[i] = val / (4.0 * math.pi * om)
    return out.reshape(r.shape)


class ConvolvedProfile(RadialProfile):
    """Profile ``K_omega * base``: values and first derivative by quadrature.

    Higher derivatives are not available in closed form; fields built from
    this profile are differentiated by finite differences of values.
    """

    analytic = False

    def __init__(self, base, omega: float):
        if not omega >= 0:
            raise DomainError("omega must be non-negative")
        self.base = as_profile(base)
        self.omega = float(omega)
        self.singular_at_origin = False

    def _derivs(self, kmax, r):
        if kmax > 1:
            raise NotImplementedError("convolved profiles provide values and first derivatives only")
        out = [heat_kernel_radial(self.base, self.omega, r)]
        if kmax == 1:
            out.append(heat_kernel_radial(self.base, self.omega, r, derivative=True))
        return np.stack(out)

    def __repr__(self):
        return f"ConvolvedProfile({self.base!r}, omega={self.omega})"


# --- swirl flows under the heat semigroup -------------------------------------


class _VectorFunction(VectorField3):
    """Vector field from one callable returning (..., 3); one evaluation per value request."""

    def __init__(self, func, engine: DerivativeEngine | None = None, scale=1.0, tscale=1.0):
        self.func = func
        self.engine = engine or F.default_engine
        comps = [FunctionField(lambda t, x, i=i: func(t, x)[..., i], self.engine, scale, tscale)
                 for i in range(3)]
        super().__init__(comps)

    def partials(self, alphas, t, x):
        alphas = [F._index(a) for a in alphas]
        if all(a == F.ZERO4 for a in alphas):
            v = self.func(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
            return [v for _ in alphas]
        c = self.components[0]
        return self.engine.partials(self.func, alphas, t, x, c.scale, c.tscale)


class _ScalarFunction(FunctionField):
    pass


def _swirl_vector(radial_fn, axial_fn):
    """Assemble ``f_theta(t, r) e_theta + f_3(t, r) e_3`` as a callable of (t, x)."""

    def func(t, x):
        x = np.asarray(x, dtype=float)
        tt = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:-1])
        r = np.hypot(x[..., 0], x[..., 1])
        ft = radial_fn(tt, r)
        safe = np.where(r > 0, r, 1.0)
        fac = np.where(r > 0, ft / safe, 0.0)
        return np.stack([-x[..., 1] * fac, x[..., 0] * fac, axial_fn(tt, r)], axis=-1)

    return func


def _omega_of(nu):
    def om(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("heat evolution needs t >= 0")
        return nu * t
    return om


def _swirl_profile_fns(sw: Swirl2D, omega_fn):
    """Callables of (t, r) for u_theta, u_3, omega_theta, omega_3 of the evolved swirl."""
    a = sw.a
    lap_phi = sw.Phi.laplacian(2)
    lap_psi = sw.Psi.laplacian(2)

    def u_theta(t, r):
        return a * heat_kernel_radial(sw.Phi, omega_fn(t), r, derivative=True)

    def u_axial(t, r):
        return -a * heat_kernel_radial(lap_psi, omega_fn(t), r)

    def w_theta(t, r):
        return a * heat_kernel_radial(lap_psi, omega_fn(t), r, derivative=True)

    def w_axial(t, r):
        return a * heat_kernel_radial(lap_phi, omega_fn(t), r)

    return u_theta, u_axial, w_theta, w_axial


def _swirl_pressure(u_theta, r_ref: float, epsabs=1e-13, epsrel=1e-12):
    """``P(t, r) = int_{r_ref}^r u_theta(t, s)^2 / s ds`` by outer quadrature."""

    def P(t, x):
        x = np.asarray(x, dtype=float)
        tt = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:-1]).reshape(-1)
        r = np.hypot(x[..., 0], x[..., 1]).reshape(-1)
        span = r - r_ref
        if r.size == 0:
            return np.zeros(x.shape[:-1])

        def integrand(tau):
            s = r_ref + tau * span
            ut = u_theta(tt, s)
            safe = np.where(s > 0, s, 1.0)
            return np.where(s > 0, ut * ut / safe, 0.0) * span

        val, err, info = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel,
                                            norm="max", limit=400, full_output=True)
        if info.status != 0:
            raise QuadratureError(f"pressure quadrature did not converge (error {err:.2e})", val, err)
        return np.asarray(val).reshape(x.shape[:-1])

    return P


def _swirl_flow(sw: Swirl2D, omega_fn, kind, tag, nu, length_scale, params):
    ut, uz, wt, wz = _swirl_profile_fns(sw, omega_fn)
    u = _VectorFunction(_swirl_vector(ut, uz))
    w = _VectorFunction(_swirl_vector(wt, wz))
    P = _ScalarFunction(_swirl_pressure(ut, sw.r_ref))
    return FlowSolution(u=u, P=P, kind=kind, tag=tag, nu=nu, geometry="cylindrical",
                        r_min=sw.r_min, vorticity=w, swirl=sw, length_scale=length_scale,
                        params=params)


def swirl2d_heat(a: float, Phi=None, Psi=None, nu: float = 1.0, r_ref: float = 1.0,
                 r_min: float = 0.0, length_scale: float = 1.0) -> FlowSolution:
    """Swirl flow whose profiles evolve by the 2D heat semigroup with ``omega = nu t``.

    A Navier-Stokes solution for ``t > 0``; derivatives of its fields come
    from finite differences of quadrature values.
    """
    if not (math.isfinite(nu) and nu > 0):
        raise DomainError("viscosity must be positive")
    if a == 0:
        raise DomainError("swirl axis amplitude must be nonzero")
    sw = Swirl2D(float(a), as_profile(Phi), as_profile(Psi), float(r_ref), float(r_min))
    return _swirl_flow(sw, _omega_of(float(nu)), "heat-2d", "X2R_NS", float(nu), length_scale,
                       {"a": float(a), "r_ref": float(r_ref)})


# --- path limits --------------------------------------------------------------


def path_limit_eigen(mode: BeltramiMode, omega: float) -> FlowSolution:
    """Static flow ``exp(-omega lam^2) u0`` with pressure ``-exp(-2 omega lam^2) |u0|^2 / 2``."""
    if not (math.isfinite(omega) and omega >= 0):
        raise DomainError("omega must be non-negative")
    flow = _mode_flow(mode, 0.0, "euler-static", "E", amplitude=math.exp(-omega * mode.lam ** 2))
    flow.params["omega"] = float(omega)
    return flow


def path_limit_2d(flow: FlowSolution, omega: float) -> FlowSolution:
    """Static swirl flow with the profiles convolved at fixed ``omega``."""
    if flow.swirl is None:
        raise DomainError("path_limit_2d needs a swirl flow")
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError("omega must be positive")
    om = float(omega)
    return _swirl_flow(flow.swirl, lambda t: np.full(np.shape(t), om), "euler-static",
                       "X2R_E-limit", 0.0, flow.length_scale, {**flow.params, "omega": om})


def _limit_of(flow: FlowSolution, omega: float) -> FlowSolution:
    if flow.mode is not None:
        return path_limit_eigen(flow.mode, omega)
    return path_limit_2d(flow, omega)


def _with_viscosity(flow: FlowSolution, nu: float) -> FlowSolution:
    if flow.mode is not None:
        return ns_decaying(flow.mode, nu)
    if flow.swirl is not None and flow.kind == "heat-2d":
        sw = flow.swirl
        return swirl2d_heat(sw.a, sw.Phi, sw.Psi, nu, sw.r_ref, sw.r_min, flow.length_scale)
    raise DomainError(f"flow {flow.tag} has no viscosity-time dependence to follow")


@dataclass(frozen=True)
class LimitReport:
    """Path-convergence rows, cross-path gap and the double-limit verdict.

    ``rows`` holds ``(omega, nu, t, deviation)`` with the deviation relative
    to the largest limit speed at the probes. ``off_path`` holds
    ``(nu, t, max speed)`` along a fixed-viscosity sequence.
    """

    rows: tuple
    verdict: str
    tolerance: float
    gap: float | None = None
    gap_expected: float | None = None
    gap_error: float | None = None
    omegas: tuple = ()
    off_path: tuple = ()
    header: dict = field(default_factory=dict)

    @property
    def max_deviation(self) -> float:
        return max((r[3] for r in self.rows), default=0.0)

    @property
    def double_limit_exists(self) -> bool | None:
        return False if self.verdict == "does-not-exist" else None

    def to_text(self) -> str:
        lines = ["report = path-limit"]
        for k, v in self.header.items():
            lines.append(f"{k} = {v}")
        lines.append(f"tolerance = {self.tolerance!r}")
        lines.append(f"omegas = {' '.join(repr(o) for o in self.omegas)}")
        lines.append(f"max_deviation = {self.max_deviation!r}")
        for name in ("gap", "gap_expected", "gap_error"):
            v = getattr(self, name)
            if v is not None:
                lines.append(f"{name} = {v!r}")
        lines.append(f"verdict = {self.verdict}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega", "nu", "t", "deviation"])
        for row in self.rows:
            w.writerow([repr(v) for v in row])
        if self.off_path:
            w.writerow([])
            w.writerow(["off_path_nu", "t", "max_speed"])
            for row in self.off_path:
                w.writerow([repr(v) for v in row])
        return buf.getvalue()


def _path_rows(flow, path: PathSpec, x):
    limit_u = _limit_of(flow, path.omega).u(0.0, x)
    ref = float(np.max(np.linalg.norm(limit_u, axis=-1), initial=0.0))
    rows = []
    for nu, t in path.schedule:
        u = _with_viscosity(flow, nu).u(t, x)
        dev = float(np.max(np.linalg.norm(u - limit_u, axis=-1), initial=0.0))
        rows.append((path.omega, nu, t, dev / ref if ref > 0 else dev))
    return rows, limit_u


def path_convergence_table(flow: FlowSolution, path: PathSpec, probes, tolerance: float = 1e-13
                           ) -> LimitReport:
    """Deviation of the flow from its path limit at each schedule point.

    An empty schedule gives an empty table with verdict 'undetermined'.
    """
    x = flow.check_domain(probes.x if hasattr(probes, "x") else probes)
    rows, _ = _path_rows(flow, path, x)
    return LimitReport(tuple(rows), "undetermined", tolerance, omegas=(path.omega,),
                       header={"flow": flow.tag, "probes": len(x)})


def double_limit_probe(mode: BeltramiMode, omega1: float, omega2: float, probes,
                       times=(1e1, 1e2, 1e3, 1e4, 1e5, 1e6), path_tolerance: float = 1e-13,
                       gap_tolerance: float = 1e-6) -> LimitReport:
    """Compare the limits along two paths and decide whether the double limit can exist.

    The verdict is 'does-not-exist' when the gap between the two path limits
    exceeds ``gap_tolerance * max|u0|`` while each path stays within
    ``path_tolerance`` of its own limit; otherwise 'undetermined'.
    Off-path witnesses follow a fixed viscosity ``omega1 / times[0]`` with
    growing time, where the flow decays to zero.
    """
    if omega1 == omega2:
        raise DegenerateProbeError("omega1 and omega2 must differ")
    if not (omega1 > 0 and omega2 > 0):
        raise DomainError("path constants must be positive")
    base = ns_decaying(mode, 1.0)
    x = base.check_domain(probes.x if hasattr(probes, "x") else probes)
    rows = []
    limits = []
    internal_ok = True
    for om in (omega1, omega2):
        r, lim = _path_rows(base, PathSpec.from_times(om, times), x)
        rows += r
        limits.append(lim)
        internal_ok &= all(row[3] <= path_tolerance for row in r)
    u0 = _mode_flow(mode, 0.0, "euler-static", "E").u(0.0, x)
    speed0 = np.linalg.norm(u0, axis=-1)
    gap_pt = np.linalg.norm(limits[0] - limits[1], axis=-1)
    lam2 = mode.lam ** 2
    factor = abs(math.exp(-omega1 * lam2) - math.exp(-omega2 * lam2))
    gap = float(np.max(gap_pt, initial=0.0))
    gap_error = float(np.max(np.abs(gap_pt - factor * speed0), initial=0.0))
    max0 = float(np.max(speed0, initial=0.0))
    verdict = "does-not-exist" if (gap > gap_tolerance * max0 and internal_ok) else "undetermined"

    nu_fixed = omega1 / times[0]
    off = []
    for t in (times[0] * 10.0 ** k for k in range(0, 6)):
        u = ns_decaying(mode, nu_fixed).u(t, x)
        off.append((nu_fixed, float(t), float(np.max(np.linalg.norm(u, axis=-1), initial=0.0))))
    return LimitReport(tuple(rows), verdict, path_tolerance, gap=gap, gap_expected=factor * max0,
                       gap_error=gap_error, omegas=(float(omega1), float(omega2)), off_path=tuple(off),
                       header={"mode": mode.tag, "lam": repr(mode.lam), "probes": len(x),
                               "gap_tolerance": repr(gap_tolerance)})
