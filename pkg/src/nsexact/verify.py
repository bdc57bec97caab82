"""Residual checks for the exact flows.

Every PDE and identity check here differentiates *values* of the fields
with :class:`~nsexact.fields.DerivativeEngine`, so it is independent of the
closed-form derivative algebra used to build the flows. The exception is
:func:`projected_residuals`, which needs fifth derivatives and runs on the
field algebra itself (analytic where the pair is analytic).

Residuals are reported absolute and relative. The relative figure divides
by the largest sum of term magnitudes over the sample set (plus 1e-30), so
it stays meaningful where a velocity component passes through zero.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fields as F
from .fields import DerivativeEngine, ScalarField, VectorField3
from .solutions import (BeltramiMode, DomainError, FlowSolution, SymplecticPair,
                        velocity_from_pair, vorticity_from_pair)

__all__ = [
    "UnsupportedKindError",
    "DegradedToleranceWarning",
    "SampleSet",
    "ResidualEntry",
    "ResidualReport",
    "ns_residual",
    "euler_residual",
    "gradient_consistency",
    "projection_identities",
    "projected_residuals",
    "vorticity_residual",
    "beltrami_check",
    "helmholtz_check",
    "TOL_ANALYTIC",
    "TOL_FD",
    "TOL_DIV",
    "TOL_NESTED",
    "TOL_HIGH_ORDER",
]

TOL_ANALYTIC = 1e-10
TOL_FD = 1e-6
TOL_DIV = 1e-8
TOL_NESTED = 1e-5
TOL_HIGH_ORDER = 1e-4
FLOOR = 1e-30

_E = [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
_SECOND = [(i, j) for i in range(3) for j in range(i, 3)]


class UnsupportedKindError(TypeError):
    """The check does not apply to this kind of flow."""


class DegradedToleranceWarning(UserWarning):
    """High-order derivatives come from finite differences only."""


# --- samples ------------------------------------------------------------------


@dataclass(frozen=True)
class SampleSet:
    """Points ``(t_i, x_i)`` with the recipe that generated them.

    Build with :meth:`generate` (seeded) or :meth:`for_flow`. Radii are
    log-uniform in ``r_range``; 'spherical' draws directions uniformly on
    the sphere, 'cylindrical' draws the azimuth uniformly and x3 uniformly
    in ``z_range``.
    """

    t: np.ndarray
    x: np.ndarray
    spec: dict = field(default_factory=dict)

    def __post_init__(self):
        x = F.as_points(self.x).reshape(-1, 3)
        t = np.broadcast_to(np.asarray(self.t, dtype=float), x.shape[:1]).copy()
        if not np.all(np.isfinite(t)):
            raise ValueError("sample times must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", t)

    def __len__(self):
        return self.x.shape[0]

    @classmethod
    def generate(cls, geometry: str = "spherical", r_range=(0.1, 5.0), t_range=(0.0, 0.0),
                 count: int = 200, seed: int = 0, z_range=(-3.0, 3.0), t_values=None) -> "SampleSet":
        r_lo, r_hi = (float(v) for v in r_range)
        if not 0 < r_lo <= r_hi:
            raise ValueError("r_range needs 0 < r_lo <= r_hi")
        rng = np.random.default_rng(seed)
        r = np.exp(rng.uniform(math.log(r_lo), math.log(r_hi), count))
        if geometry == "spherical":
            d = rng.normal(size=(count, 3))
            d /= np.linalg.norm(d, axis=1, keepdims=True)
            x = r[:, None] * d
        elif geometry == "cylindrical":
            th = rng.uniform(0.0, 2 * math.pi, count)
            z = rng.uniform(z_range[0], z_range[1], count)
            x = np.stack([r * np.cos(th), r * np.sin(th), z], axis=1)
        else:
            raise ValueError(f"unknown geometry {geometry!r}")
        if t_values is not None:
            t = np.asarray(t_values, dtype=float)[rng.integers(0, len(t_values), count)]
        else:
            t = rng.uniform(t_range[0], t_range[1], count)
        spec = {"geometry": geometry, "r_range": (r_lo, r_hi), "t_range": tuple(t_range),
                "z_range": tuple(z_range), "count": count, "seed": seed}
        return cls(t, x, spec)

    @classmethod
    def for_flow(cls, flow: FlowSolution, count: int = 200, seed: int = 0, t_range=(0.0, 0.0),
                 t_values=None, r_range=None) -> "SampleSet":
        """Samples inside the flow's domain, spread over its oscillation scale."""
        L = flow.length_scale
        if r_range is None:
            lo = flow.r_min if flow.r_min > 0 else 0.02 * L
            hi = min(5.0 * L, flow.r_max) if math.isfinite(flow.r_max) else 5.0 * L
            if hi <= lo:
                hi = lo * 1.5
            r_range = (lo, hi)
        z = (-math.pi * L, math.pi * L)
        return cls.generate(flow.geometry, r_range, t_range, count, seed, z, t_values)

    @classmethod
    def explicit(cls, t, x) -> "SampleSet":
        return cls(t, x, {"geometry": "explicit"})


# --- reports ------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualEntry:
    name: str
    max_abs: float
    rms: float
    max_rel: float
    tolerance: float
    passed: bool
    worst_point: tuple

    @classmethod
    def from_residual(cls, name, resid, scale, tolerance, samples: SampleSet):
        """``resid`` is a per-point magnitude; ``scale`` the normaliser for the relative figure."""
        resid = np.abs(np.asarray(resid, dtype=float)).reshape(-1)
        n = resid.size
        if n == 0:
            return cls(name, 0.0, 0.0, 0.0, tolerance, True, ())
        i = int(np.argmax(resid))
        max_abs = float(resid[i])
        rms = float(np.sqrt(np.mean(resid ** 2)))
        rel = max_abs / (float(scale) + FLOOR)
        worst = (float(samples.t[i]),) + tuple(float(v) for v in samples.x[i])
        return cls(name, max_abs, rms, rel, tolerance, bool(rel <= tolerance), worst)


@dataclass(frozen=True)
class ResidualReport:
    title: str
    entries: tuple
    header: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def __getitem__(self, name) -> ResidualEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def worst(self) -> ResidualEntry | None:
        """Entry furthest above (or closest to) its tolerance."""
        if not self.entries:
            return None
        return max(self.entries, key=lambda e: e.max_rel / e.tolerance)

    def merged(self, other: "ResidualReport", title: str | None = None) -> "ResidualReport":
        return ResidualReport(title or self.title, self.entries + other.entries,
                              {**self.header, **other.header})

    def to_text(self) -> str:
        lines = [f"report = {self.title}"]
        for k, v in self.header.items():
            lines.append(f"{k} = {v}")
        lines.append(f"passed = {self.passed}")
        for e in self.entries:
            p = e.name
            lines += [f"{p}.max_abs = {e.max_abs!r}", f"{p}.rms = {e.rms!r}",
                      f"{p}.max_rel = {e.max_rel!r}", f"{p}.tolerance = {e.tolerance!r}",
                      f"{p}.passed = {e.passed}",
                      f"{p}.worst_point = {' '.join(repr(v) for v in e.worst_point)}"]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "max_abs", "rms", "max_rel", "tolerance", "passed",
                    "t", "x1", "x2", "x3"])
        for e in self.entries:
            pt = list(e.worst_point) + [""] * (4 - len(e.worst_point))
            w.writerow([e.name, repr(e.max_abs), repr(e.rms), repr(e.max_rel), repr(e.tolerance),
                        e.passed] + [repr(v) if v != "" else "" for v in pt])
        return buf.getvalue()


# --- helpers ------------------------------------------------------------------


def _engine(engine):
    return engine or F.default_engine


def _check_samples(flow: FlowSolution, samples: SampleSet):
    try:
        flow.check_domain(samples.x)
    except DomainError as exc:
        raise DomainError(f"sample set rejected for flow {flow.tag}: {exc}") from None


def _chunked(fn, samples: SampleSet, workers: int):
    """Apply ``fn(t, x)`` (returning a tuple of per-point arrays) over sample chunks."""
    if workers <= 1 or len(samples) < 2 * workers:
        return fn(samples.t, samples.x)
    bounds = np.linspace(0, len(samples), workers + 1).astype(int)
    parts = [(samples.t[a:b], samples.x[a:b]) for a, b in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda p: fn(*p), parts))
    return tuple(np.concatenate([r[k] for r in results]) for k in range(len(results[0])))


def _vec_fn(field: VectorField3):
    return lambda t, x: field(t, x)


def _scal_fn(field: ScalarField):
    return lambda t, x: field(t, x)


def _norm(v):
    return np.linalg.norm(v, axis=-1)


def _momentum_terms(flow: FlowSolution, t, x, engine):
    """FD pieces of the momentum balance at the given points."""
    L = flow.fd_scale(x)
    T = flow.fd_time_scale(t)
    ufn = _vec_fn(flow.u)
    alphas = [(1, 0, 0, 0)] + _E + [(0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2)]
    d = engine.partials(ufn, alphas, t, x, scale=L, tscale=T)
    u = flow.u(t, x)
    ut = d[0]
    J = np.stack(d[1:4], axis=-1)                     # J[..., i, k] = d_k u_i
    lap = d[4] + d[5] + d[6]
    adv = np.einsum("nik,nk->ni", J, u)
    gradP = engine.gradient(_scal_fn(flow.P), t, x, scale=L)
    return u, ut, J, lap, adv, gradP


def _div_entry(J, samples, tol, name="div u"):
    div = np.trace(J, axis1=-2, axis2=-1)
    scale = np.max(np.linalg.norm(J, axis=(-2, -1))) if J.size else 0.0
    return ResidualEntry.from_residual(name, div, scale, tol, samples)


def _header(flow, samples, **extra):
    h = {"flow": flow.tag, "kind": flow.kind, "nu": repr(flow.nu), "samples": len(samples)}
    if "seed" in samples.spec:
        h["seed"] = samples.spec["seed"]
    h.update(extra)
    return h


# --- PDE residuals ------------------------------------------------------------


def ns_residual(flow: FlowSolution, samples: SampleSet, tolerance: float = TOL_FD,
                div_tolerance: float = TOL_DIV, engine: DerivativeEngine | None = None,
                workers: int = 1) -> ResidualReport:
    """``|u_t - nu lap u + (u . grad) u + grad P|`` and ``|div u|`` by finite differences."""
    _check_samples(flow, samples)
    engine = _engine(engine)
    nu = flow.nu

    def work(t, x):
        u, ut, J, lap, adv, gradP = _momentum_terms(flow, t, x, engine)
        res = ut - nu * lap + adv + gradP
        mag = _norm(ut) + nu * _norm(lap) + _norm(adv) + _norm(gradP)
        return _norm(res), mag, J.reshape(-1, 9)

    res, mag, J = _chunked(work, samples, workers)
    J = J.reshape(-1, 3, 3)
    entries = (ResidualEntry.from_residual("momentum", res, np.max(mag, initial=0.0), tolerance, samples),
               _div_entry(J, samples, div_tolerance))
    return ResidualReport("navier-stokes", entries,
                          _header(flow, samples, tolerance=repr(tolerance),
                                  div_tolerance=repr(div_tolerance)))


def euler_residual(flow: FlowSolution, samples: SampleSet, tolerance: float = TOL_FD,
                   div_tolerance: float = TOL_DIV, engine: DerivativeEngine | None = None,
                   workers: int = 1) -> ResidualReport:
    """``|(u . grad) u + grad P|`` and ``|div u|`` for static flows."""
    if flow.kind != "euler-static":
        raise UnsupportedKindError(f"euler_residual needs a static flow, got {flow.kind}")
    _check_samples(flow, samples)
    engine = _engine(engine)

    def work(t, x):
        L = flow.fd_scale(x)
        d = engine.partials(_vec_fn(flow.u), _E, t, x, scale=L)
        J = np.stack(d, axis=-1)
        u = flow.u(t, x)
        adv = np.einsum("nik,nk->ni", J, u)
        gradP = engine.gradient(_scal_fn(flow.P), t, x, scale=L)
        return _norm(adv + gradP), _norm(adv) + _norm(gradP), J.reshape(-1, 9)

    res, mag, J = _chunked(work, samples, workers)
    entries = (ResidualEntry.from_residual("momentum", res, np.max(mag, initial=0.0), tolerance, samples),
               _div_entry(J.reshape(-1, 3, 3), samples, div_tolerance))
    return ResidualReport("euler", entries,
                          _header(flow, samples, tolerance=repr(tolerance),
                                  div_tolerance=repr(div_tolerance)))


def gradient_consistency(flow: FlowSolution, samples: SampleSet, tolerance: float = TOL_NESTED,
                         engine: DerivativeEngine | None = None, workers: int = 1) -> ResidualReport:
    """``|curl((u . grad) u)|`` with two nested finite-difference levels.

    Relative to the largest Frobenius norm of the gradient of the convective term.
    """
    _check_samples(flow, samples)
    engine = _engine(engine)

    def convective(t, x):
        L = flow.fd_scale(x)
        J = np.stack(engine.partials(_vec_fn(flow.u), _E, t, x, scale=L), axis=-1)
        return np.einsum("nik,nk->ni", J, flow.u(t, x))

    def work(t, x):
        # outer steps twice the inner ones so inner noise is not amplified
        L = 2.0 * flow.fd_scale(x)
        G = np.stack(engine.partials(convective, _E, t, x, scale=L), axis=-1)
        c = np.stack([G[:, 2, 1] - G[:, 1, 2], G[:, 0, 2] - G[:, 2, 0], G[:, 1, 0] - G[:, 0, 1]], axis=-1)
        return _norm(c), np.linalg.norm(G, axis=(-2, -1))

    res, mag = _chunked(work, samples, workers)
    entry = ResidualEntry.from_residual("curl of convective term", res, np.max(mag, initial=0.0),
                                        tolerance, samples)
    return ResidualReport("gradient-consistency", (entry,),
                          _header(flow, samples, tolerance=repr(tolerance)))


# --- identities of the representation ------------------------------------------


def _levi():
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k], eps[i, k, j] = 1.0, -1.0
    return eps


_EPS = _levi()


def _hessian_alphas():
    return [F._add(_E[i], _E[j]) for i, j in _SECOND]


def _full_hessian(parts):
    """Symmetric (..., 3, 3) array from the six unique second partials."""
    H = np.zeros(parts[0].shape + (3, 3))
    for (i, j), p in zip(_SECOND, parts):
        H[..., i, j] = p
        H[..., j, i] = p
    return H


def _pair_scale(pair: SymplecticPair, default: float = 1.0) -> float:
    return float(getattr(pair, "length_scale", default))


def projection_identities(pair: SymplecticPair, samples: SampleSet, tolerance: float = TOL_FD,
                          engine: DerivativeEngine | None = None, scale: float = 1.0) -> ResidualReport:
    """Check the two scalar projections of the representation.

    ``(A x grad) . u = D phi`` and ``(A x grad) . omega = D lap psi`` with
    ``D = (A.A) lap - (A . grad)^2``. The relative figure divides by the
    largest term sum, floored by the natural unit ``max|potential| / scale**k``.
    """
    engine = _engine(engine)
    A = pair.A.vector
    AA = float(A @ A)
    t, x = samples.t, samples.x
    u_field = velocity_from_pair(pair)
    ufn = _vec_fn(u_field)

    # (A x grad) . v = eps_ijk A_j d_k v_i
    Jd = engine.partials(ufn, _E, t, x, scale=scale)
    J = np.stack(Jd, axis=-1)
    lhs1 = np.einsum("ijk,j,nik->n", _EPS, A, J)

    # right-hand sides use the potentials' own derivatives (closed form when
    # available); the left-hand sides differentiate the velocity numerically
    Hphi = _full_hessian(pair.phi.partials(_hessian_alphas(), t, x))
    rhs1 = AA * np.trace(Hphi, axis1=-2, axis2=-1) - np.einsum("i,nij,j->n", A, Hphi, A)
    phi_vals = pair.phi(t, x)
    unit1 = np.max(np.abs(phi_vals), initial=0.0) / scale ** 2
    e1 = ResidualEntry.from_residual(
        "projection of velocity", lhs1 - rhs1,
        np.max(np.abs(lhs1) + np.abs(rhs1), initial=0.0) + unit1, tolerance, samples)

    # (A x grad) . curl u = eps_ijk A_j d_k eps_ilm d_l u_m : needs all second partials of u
    Hu = engine.partials(ufn, _hessian_alphas(), t, x, scale=scale)
    Hu = np.stack([_full_hessian([h[..., m] for h in Hu]) for m in range(3)], axis=1)  # [n, m, k, l]
    lhs2 = np.einsum("ijk,j,ilm,nmkl->n", _EPS, A, _EPS, Hu)

    fourth = {}
    for i in range(3):
        for j in range(i, 3):
            for k in range(3):
                key = tuple(sorted((i, j, k, k)))
                fourth[key] = None
    keys = list(fourth)
    alphas4 = [(0,) + tuple(key.count(c) for c in range(3)) for key in keys]
    vals = dict(zip(keys, pair.psi.partials(alphas4, t, x)))

    def d4(i, j, k, l):
        return vals[tuple(sorted((i, j, k, l)))]

    lap2 = sum(d4(i, i, k, k) for i in range(3) for k in range(3))
    dirlap = sum(A[i] * A[j] * d4(i, j, k, k) for i in range(3) for j in range(3) for k in range(3))
    rhs2 = AA * lap2 - dirlap
    unit2 = np.max(np.abs(pair.psi(t, x)), initial=0.0) / scale ** 4
    e2 = ResidualEntry.from_residual(
        "projection of vorticity", lhs2 - rhs2,
        np.max(np.abs(lhs2) + np.abs(rhs2), initial=0.0) + unit2, tolerance, samples)
    return ResidualReport("projection-identities", (e1, e2),
                          {"samples": len(samples), "tolerance": repr(tolerance)})


def _default_pair_samples(seed=0):
    return SampleSet.generate("spherical", (0.3, 3.0), (0.0, 1.0), 100, seed)


def projected_residuals(pair: SymplecticPair, nu: float, samples: SampleSet | None = None,
                        tolerance: float = TOL_HIGH_ORDER) -> ResidualReport:
    """Residuals of the two projected scalar evolution equations.

    ``D(phi_t - nu lap phi) + (A x grad) . ((u . grad) u)`` and
    ``D lap(psi_t - nu lap psi) + (A x grad) . ((u . grad) omega - (omega . grad) u)``
    with ``D = (A.A) lap - (A . grad)^2``. Built on the field algebra: up to
    fifth derivatives, analytic for analytic pairs. Pairs with
    finite-difference potentials trigger :class:`DegradedToleranceWarning`.
    """
    if samples is None:
        samples = _default_pair_samples()
    if not (pair.phi.analytic and pair.psi.analytic):
        warnings.warn("potentials lack analytic derivatives; fifth-order finite differences "
                      "limit accuracy", DegradedToleranceWarning, stacklevel=2)
    A = pair.A
    t, x = samples.t, samples.x
    u = velocity_from_pair(pair)
    w = vorticity_from_pair(pair)
    dt = {(1, 0, 0, 0): 1.0}

    def heat(f):
        return [(1.0, F.derive(f, dt)), (-nu, F.laplacian(f))]

    # every summand is evaluated on its own so the relative figure has a
    # meaningful denominator even when whole terms cancel (Beltrami modes)
    terms1 = [c * g for c, f in heat(pair.phi) for g in _directional_second_terms(A, f)]
    terms1 += _cross_grad_dot(A, F.advect(u, u))
    terms2 = [c * g for c, f in heat(pair.psi) for g in _directional_second_terms(A, F.laplacian(f))]
    terms2 += _cross_grad_dot(A, F.advect(u, w)) + [-g for g in _cross_grad_dot(A, F.advect(w, u))]
    entries = []
    for name, terms in (("projected momentum", terms1), ("projected vorticity", terms2)):
        vals = np.array([g(t, x) for g in terms])
        entries.append(ResidualEntry.from_residual(
            name, vals.sum(axis=0), np.max(np.abs(vals).sum(axis=0), initial=0.0), tolerance, samples))
    return ResidualReport("projected-equations", tuple(entries),
                          {"nu": repr(nu), "samples": len(samples), "tolerance": repr(tolerance)})


def _directional_second_terms(A, f: ScalarField):
    """Summands of ``(A.A) lap f - (A . grad)^2 f``, one per nonzero coefficient."""
    a = F.Axis.of(A).vector
    coef = {}
    for i in range(3):
        key = F._add(_E[i], _E[i])
        coef[key] = coef.get(key, 0.0) + float(a @ a)
        for j in range(3):
            key = F._add(_E[i], _E[j])
            coef[key] = coef.get(key, 0.0) - a[i] * a[j]
    return [F.derive(f, {k: c}) for k, c in coef.items() if c]


def _cross_grad_dot(A, v: VectorField3):
    """Summands of ``eps_ijk A_j d_k v_i`` as scalar fields."""
    a = F.Axis.of(A).vector
    out = []
    for i in range(3):
        for j in range(3):
            for k in range(3):
                e = _EPS[i, j, k] * a[j]
                if e:
                    out.append(F.derive(v[i], {_E[k]: e}))
    return out


def vorticity_residual(source, nu: float, samples: SampleSet, tolerance: float = TOL_NESTED,
                       engine: DerivativeEngine | None = None, scale=None, tscale=None,
                       workers: int = 1) -> ResidualReport:
    """``|omega_t - nu lap omega + (u . grad) omega - (omega . grad) u|`` by finite differences.

    ``source`` is a :class:`SymplecticPair` (closed-form vorticity) or a
    :class:`FlowSolution` (its vorticity field, or the FD curl of u).
    """
    engine = _engine(engine)
    if isinstance(source, SymplecticPair):
        u_field, w_field = velocity_from_pair(source), vorticity_from_pair(source)
        L = (lambda x: np.full(x.shape[:-1], 1.0 if scale is None else scale))
        T = (lambda t: np.full(np.shape(t), 1.0 if tscale is None else tscale))
    elif isinstance(source, FlowSolution):
        _check_samples(source, samples)
        u_field = source.u
        w_field = source.vorticity if source.vorticity is not None else F.curl(source.u)
        L = (lambda x: source.fd_scale(x)) if scale is None else (lambda x: np.full(x.shape[:-1], scale))
        T = (lambda t: source.fd_time_scale(t)) if tscale is None else (lambda t: np.full(np.shape(t), tscale))
    else:
        raise UnsupportedKindError("vorticity_residual needs a SymplecticPair or FlowSolution")

    def work(t, x):
        Ls, Ts = L(x), T(t)
        alphas = [(1, 0, 0, 0)] + _E + [(0, 2, 0, 0), (0, 0, 2, 0), (0, 0, 0, 2)]
        dw = engine.partials(_vec_fn(w_field), alphas, t, x, scale=Ls, tscale=Ts)
        Ju = np.stack(engine.partials(_vec_fn(u_field), _E, t, x, scale=Ls), axis=-1)
        Jw = np.stack(dw[1:4], axis=-1)
        u, w = u_field(t, x), w_field(t, x)
        wt = dw[0]
        lap = dw[4] + dw[5] + dw[6]
        adv = np.einsum("nik,nk->ni", Jw, u)
        stretch = np.einsum("nik,nk->ni", Ju, w)
        res = wt - nu * lap + adv - stretch
        mag = _norm(wt) + nu * _norm(lap) + _norm(adv) + _norm(stretch)
        return _norm(res), mag

    res, mag = _chunked(work, samples, workers)
    entry = ResidualEntry.from_residual("vorticity equation", res, np.max(mag, initial=0.0),
                                        tolerance, samples)
    return ResidualReport("vorticity", (entry,), {"nu": repr(nu), "samples": len(samples),
                                                  "tolerance": repr(tolerance)})


def beltrami_check(flow: FlowSolution, samples: SampleSet | None = None, sign: float = -1.0,
                   tolerance: float = TOL_FD, engine: DerivativeEngine | None = None) -> ResidualReport:
    """``|curl u - sign * lam * u|`` with an FD curl; the default sign is the Beltrami one."""
    if flow.lam is None:
        raise UnsupportedKindError(f"flow {flow.tag} is not a Beltrami mode flow")
    if samples is None:
        samples = SampleSet.for_flow(flow, count=100)
    _check_samples(flow, samples)
    engine = _engine(engine)
    t, x = samples.t, samples.x
    J = np.stack(engine.partials(_vec_fn(flow.u), _E, t, x, scale=flow.fd_scale(x),
                                 tscale=flow.fd_time_scale(t)), axis=-1)
    c = np.stack([J[:, 2, 1] - J[:, 1, 2], J[:, 0, 2] - J[:, 2, 0], J[:, 1, 0] - J[:, 0, 1]], axis=-1)
    lu = sign * flow.lam * flow.u(t, x)
    mag = _norm(c) + _norm(lu)
    name = "curl u + lam u" if sign < 0 else "curl u - lam u"
    entry = ResidualEntry.from_residual(name, _norm(c - lu), np.max(mag, initial=0.0), tolerance, samples)
    return ResidualReport("beltrami", (entry,), _header(flow, samples, tolerance=repr(tolerance)))


def helmholtz_check(mode: BeltramiMode, samples: SampleSet | None = None, tolerance: float = TOL_FD,
                    engine: DerivativeEngine | None = None) -> ResidualReport:
    """``|lap Psi + lam^2 Psi|`` with an FD Laplacian."""
    if not isinstance(mode, BeltramiMode):
        raise UnsupportedKindError("helmholtz_check needs a BeltramiMode")
    if samples is None:
        from .solutions import euler_static
        samples = SampleSet.for_flow(euler_static(mode), count=100)
    r = (np.hypot(samples.x[:, 0], samples.x[:, 1]) if mode.geometry == "cylindrical"
         else np.linalg.norm(samples.x, axis=1))
    if np.any(r < mode.r_min):
        raise DomainError(f"samples inside r < {mode.r_min:g}")
    engine = _engine(engine)
    t, x = samples.t, samples.x
    L = np.full(r.shape, mode.length_scale)
    if mode.r_min > 0:
        L = np.minimum(L, r)
    lap = engine.laplacian(_scal_fn(mode.psi), t, x, scale=L)
    val = mode.lam ** 2 * mode.psi(t, x)
    entry = ResidualEntry.from_residual("lap Psi + lam^2 Psi", lap + val,
                                        np.max(np.abs(lap) + np.abs(val), initial=0.0), tolerance, samples)
    return ResidualReport("helmholtz", (entry,), {"mode": mode.tag, "lam": repr(mode.lam),
                                                  "samples": len(samples), "tolerance": repr(tolerance)})
