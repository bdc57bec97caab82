"""Scalar and vector fields on (t, x) in R x R^3, with a derivative engine.

Fields are immutable, vectorised callables ``f(t, x)`` where ``x`` has a
trailing axis of length 3 and ``t`` broadcasts against ``x[..., 0]``.
Derivatives are requested by multi-index: a 3-tuple is purely spatial,
a 4-tuple is ``(time, x1, x2, x3)``.

Closed-form fields carry exact partials of any order; linear operators,
sums and products propagate them (Leibniz rule). Fields built from plain
callables fall back on :class:`DerivativeEngine`, a 5-point central
difference scheme with Richardson extrapolation.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "InvalidAxisError",
    "InvalidPointError",
    "Axis",
    "as_points",
    "DerivativeEngine",
    "default_engine",
    "ScalarField",
    "ConstantField",
    "PolynomialField",
    "FunctionField",
    "TimeDecay",
    "AxialWave",
    "RadialField",
    "DerivedField",
    "LinearCombination",
    "ProductField",
    "FDView",
    "VectorField3",
    "derive",
    "gradient",
    "symplectic_grad",
    "symplectic_curl2",
    "div",
    "curl",
    "laplacian",
    "advect",
    "directional_second",
    "incompressible_symmetry",
    "moving_frame",
]

ZERO4 = (0, 0, 0, 0)


class InvalidAxisError(ValueError):
    """The constant vector A of the symplectic operators is zero or non-finite."""


class InvalidPointError(ValueError):
    """A point argument is zero where a nonzero vector is required, or not finite."""


@dataclass(frozen=True)
class Axis:
    """Constant nonzero vector ``A = (a1, a2, a3)``."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        v = np.array([self.a1, self.a2, self.a3], dtype=float)
        if not np.all(np.isfinite(v)) or not np.any(v != 0.0):
            raise InvalidAxisError(f"axis must be finite and nonzero, got {tuple(v)}")

    @classmethod
    def of(cls, a) -> "Axis":
        if isinstance(a, Axis):
            return a
        a = np.asarray(a, dtype=float).ravel()
        if a.shape != (3,):
            raise InvalidAxisError("axis needs exactly three components")
        return cls(float(a[0]), float(a[1]), float(a[2]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    @property
    def norm2(self) -> float:
        return self.a1 ** 2 + self.a2 ** 2 + self.a3 ** 2


def as_points(x) -> np.ndarray:
    """Validate an array of points with trailing dimension 3."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise InvalidPointError(f"points need a trailing axis of length 3, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidPointError("points must be finite")
    return x


def _index(alpha) -> tuple:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) == 3:
        alpha = (0,) + alpha
    if len(alpha) != 4 or min(alpha) < 0:
        raise ValueError(f"bad multi-index {alpha}")
    return alpha


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3])


def _flatten(t, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (3,):
        raise InvalidPointError(f"points need a trailing axis of length 3, got shape {x.shape}")
    shape = x.shape[:-1]
    tt = np.broadcast_to(np.asarray(t, dtype=float), shape).reshape(-1)
    return tt, x.reshape(-1, 3), shape


# --- finite differences -------------------------------------------------------


@lru_cache(maxsize=None)
def _central_weights(order: int) -> tuple:
    """Exact weights of the 4th-order central stencil for ``d^order/dx^order``.

    Fornberg's recursion in rational arithmetic on offsets ``-p..p`` with
    ``p = floor((order + 1) / 2) + 1``.
    """
    p = (order + 1) // 2 + 1
    nodes = [0] + [s * j for j in range(1, p + 1) for s in (1, -1)]
    n = len(nodes)
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(order + 1)]
    c[0][0][0] = Fraction(1)
    c1 = Fraction(1)
    for i in range(1, n):
        c2 = Fraction(1)
        for j in range(i):
            c3 = Fraction(nodes[i] - nodes[j])
            c2 *= c3
            for m in range(min(i, order), -1, -1):
                prev = c[m - 1][i - 1][j] if m else Fraction(0)
                c[m][i][j] = (nodes[i] * c[m][i - 1][j] - m * prev) / c3
        for m in range(min(i, order), -1, -1):
            prev = c[m - 1][i - 1][i - 1] if m else Fraction(0)
            c[m][i][i] = c1 / c2 * (m * prev - nodes[i - 1] * c[m][i - 1][i - 1])
        c1 = c2
    weights = {nodes[j]: c[order][n - 1][j] for j in range(n)}
    return tuple((off, float(w)) for off, w in sorted(weights.items()) if w != 0)


# step multipliers by total derivative order: balances truncation against rounding
_STEP_FACTOR = {1: 1.0, 2: 10.0, 3: 20.0, 4: 30.0}


class DerivativeEngine:
    """Central finite differences with Richardson extrapolation.

    Each axis uses the 4th-order central stencil for its derivative order
    (5 points up to second derivatives, 7 for third and fourth, ...).
    ``levels`` Richardson steps combine step sizes ``h, h/2, ...`` and
    cancel the h^4, h^6, ... error terms in turn.

    Parameters
    ----------
    h : float
        Base step for first derivatives, in units of the local coordinate
        scale. Higher total orders use larger multiples of it.
    levels : int
        Number of Richardson extrapolation levels.
    """

    def __init__(self, h: float = 1e-3, levels: int = 1):
        if not h > 0:
            raise ValueError("h must be positive")
        if levels < 0:
            raise ValueError("levels must be non-negative")
        self.h = float(h)
        self.levels = int(levels)

    def step(self, order: int) -> float:
        return self.h * _STEP_FACTOR.get(order, 40.0)

    @staticmethod
    @lru_cache(maxsize=None)
    def _stencil(alpha: tuple):
        per_axis = [_central_weights(a) if a else ((0, 1.0),) for a in alpha]
        offsets, weights = [], []
        for combo in itertools.product(*per_axis):
            offsets.append([o for o, _ in combo])
            weights.append(math.prod(w for _, w in combo))
        return np.array(offsets, dtype=float), np.array(weights)

    def partials(self, func: Callable, alphas: Sequence, t, x, scale=1.0, tscale=1.0):
        """Finite-difference partials of ``func(t, x)`` for several multi-indices.

        ``scale`` and ``tscale`` are the local length and time scales (scalars
        or arrays broadcasting against the points); steps are proportional
        to them. All stencil evaluations go through one call of ``func``.
        """
        alphas = [_index(a) for a in alphas]
        tt, xx, shape = _flatten(t, x)
        n = tt.shape[0]
        sc = np.broadcast_to(np.asarray(scale, dtype=float), shape).reshape(-1)
        tsc = np.broadcast_to(np.asarray(tscale, dtype=float), shape).reshape(-1)

        # block 0 is the centre value; stencil weights sum to zero, so
        # differencing against it is exact for constants and cuts roundoff
        blocks = [(np.zeros((1, 4)), None)]
        plan = []
        for alpha in alphas:
            order = sum(alpha)
            if order == 0:
                plan.append((alpha, None))
                blocks.append((np.zeros((1, 4)), None))
                continue
            offs, w = self._stencil(alpha)
            base = self.step(order)
            levels = []
            for lev in range(self.levels + 1):
                hfac = base / 2 ** lev
                levels.append(hfac)
                blocks.append((offs * hfac, None))
            plan.append((alpha, (w, levels)))

        all_offsets = np.concatenate([b[0] for b in blocks])
        m = all_offsets.shape[0]
        T = tt[None, :] + all_offsets[:, 0:1] * tsc[None, :]
        X = xx[None, :, :] + all_offsets[:, None, 1:] * sc[None, :, None]
        vals = np.asarray(func(T.reshape(-1), X.reshape(-1, 3)), dtype=float)
        tail = vals.shape[1:]
        vals = vals.reshape((m, n) + tail)

        out = []
        centre = vals[0]
        pos = 1
        for alpha, info in plan:
            if info is None:
                out.append(vals[pos].reshape(shape + tail))
                pos += 1
                continue
            w, levels = info
            k = len(w)
            denom_units = tsc ** alpha[0] * sc ** (alpha[1] + alpha[2] + alpha[3])
            denom_units = denom_units.reshape((n,) + (1,) * len(tail))
            table = []
            for hfac in levels:
                block = vals[pos:pos + k] - centre[None]
                pos += k
                # fixed summation order keeps results independent of batch size
                acc = w[0] * block[0]
                for wi, bi in zip(w[1:], block[1:]):
                    acc = acc + wi * bi
                est = acc / (hfac ** sum(alpha) * denom_units)
                table.append(est)
            # Richardson: error ~ h^4, h^6, ...
            for j in range(1, len(table)):
                p = 4 + 2 * (j - 1)
                fac = 2.0 ** p
                table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
            out.append(table[0].reshape(shape + tail))
        return out

    def partial(self, func, alpha, t, x, scale=1.0, tscale=1.0):
        return self.partials(func, [alpha], t, x, scale, tscale)[0]

    def gradient(self, func, t, x, scale=1.0):
        d = self.partials(func, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], t, x, scale)
        return np.stack(d, axis=-1)

    def jacobian(self, func, t, x, scale=1.0):
        """``J[..., i, j] = d u_i / d x_j`` for a vector-valued ``func``."""
        d = self.partials(func, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], t, x, scale)
        return np.stack(d, axis=-1)

    def laplacian(self, func, t, x, scale=1.0):
        d = self.partials(func, [(2, 0, 0), (0, 2, 0), (0, 0, 2)], t, x, scale)
        return d[0] + d[1] + d[2]

    def time_derivative(self, func, t, x, tscale=1.0):
        return self.partial(func, (1, 0, 0, 0), t, x, tscale=tscale)


default_engine = DerivativeEngine()


# --- scalar fields ------------------------------------------------------------


class ScalarField:
    """Base class of scalar fields ``f(t, x)``.

    Subclasses implement ``_partials(alphas, t, x)`` on flat arrays
    (``t`` of shape (N,), ``x`` of shape (N, 3)), returning one array per
    4-index. ``vanishes(alpha)`` marks structural zeros so composites can
    skip work.
    """

    analytic = True

    def _partials(self, alphas, t, x):
        raise NotImplementedError

    def vanishes(self, alpha) -> bool:
        return False

    @property
    def mode(self) -> str:
        return "analytic" if self.analytic else "finite-difference"

    def partials(self, alphas, t, x):
        alphas = [_index(a) for a in alphas]
        tt, xx, shape = _flatten(t, x)
        return [np.asarray(v).reshape(shape) for v in self._partials(alphas, tt, xx)]

    def partial(self, alpha, t, x):
        return self.partials([alpha], t, x)[0]

    def __call__(self, t, x):
        return self.partial(ZERO4, t, x)

    def dt(self, t, x):
        return self.partial((1, 0, 0, 0), t, x)

    def with_mode(self, mode: str, engine: DerivativeEngine | None = None, scale=1.0, tscale=1.0):
        """Same values, derivatives computed by ``mode`` ('analytic' or 'finite-difference')."""
        if mode in ("fd", "finite-difference"):
            return FDView(self, engine, scale, tscale)
        if mode == "analytic":
            if not self.analytic:
                raise ValueError("field has no analytic derivatives")
            return self
        raise ValueError(f"unknown derivative mode {mode!r}")

    # algebra
    def __add__(self, other):
        return LinearCombination([(1.0, self), (1.0, _scalar_field(other))])

    __radd__ = __add__

    def __sub__(self, other):
        return LinearCombination([(1.0, self), (-1.0, _scalar_field(other))])

    def __rsub__(self, other):
        return LinearCombination([(-1.0, self), (1.0, _scalar_field(other))])

    def __neg__(self):
        return LinearCombination([(-1.0, self)])

    def __mul__(self, other):
        if isinstance(other, VectorField3):
            return VectorField3([self * c for c in other])
        if isinstance(other, ScalarField):
            return ProductField(self, other)
        return LinearCombination([(float(other), self)])

    def __rmul__(self, other):
        return self.__mul__(other)


def _scalar_field(v) -> ScalarField:
    return v if isinstance(v, ScalarField) else ConstantField(float(v))


class ConstantField(ScalarField):
    def __init__(self, value: float = 0.0):
        self.value = float(value)

    def vanishes(self, alpha):
        return any(alpha) or self.value == 0.0

    def _partials(self, alphas, t, x):
        return [np.full(t.shape, 0.0 if any(a) else self.value) for a in alphas]

    def __repr__(self):
        return f"ConstantField({self.value})"


class PolynomialField(ScalarField):
    """Time-independent polynomial ``sum c * x1^a x2^b x3^c`` from ``{(a, b, c): coef}``."""

    def __init__(self, coeffs: dict):
        self.coeffs = {tuple(int(e) for e in k): float(v) for k, v in coeffs.items() if v}

    def vanishes(self, alpha):
        if alpha[0]:
            return True
        return all(any(e < a for e, a in zip(mono, alpha[1:])) for mono in self.coeffs)

    def _partials(self, alphas, t, x):
        out = []
        for alpha in alphas:
            acc = np.zeros(t.shape)
            if not alpha[0]:
                for mono, c in self.coeffs.items():
                    if any(e < a for e, a in zip(mono, alpha[1:])):
                        continue
                    factor = c * math.prod(math.perm(e, a) for e, a in zip(mono, alpha[1:]))
                    acc = acc + factor * np.prod(x ** np.subtract(mono, alpha[1:]), axis=-1)
            out.append(acc)
        return out

    @classmethod
    def random(cls, degree: int, rng: np.random.Generator) -> "PolynomialField":
        coeffs = {}
        for mono in itertools.product(range(degree + 1), repeat=3):
            if sum(mono) <= degree:
                coeffs[mono] = rng.uniform(-1.0, 1.0)
        return cls(coeffs)


class FunctionField(ScalarField):
    """Field from a vectorised callable ``func(t, x)``; derivatives by finite differences."""

    analytic = False

    def __init__(self, func: Callable, engine: DerivativeEngine | None = None, scale=1.0, tscale=1.0):
        self.func = func
        self.engine = engine or default_engine
        self.scale = scale
        self.tscale = tscale

    def _value(self, t, x):
        return np.asarray(self.func(t, x), dtype=float) * np.ones(t.shape)

    def _partials(self, alphas, t, x):
        return self.engine.partials(self._value, alphas, t, x, self.scale, self.tscale)


class FDView(ScalarField):
    """Finite-difference derivatives of another field's values."""

    analytic = False

    def __init__(self, field: ScalarField, engine=None, scale=1.0, tscale=1.0):
        self.field = field
        self.engine = engine or default_engine
        self.scale = scale
        self.tscale = tscale

    def vanishes(self, alpha):
        return self.field.vanishes(alpha)

    def _value(self, t, x):
        return self.field._partials([ZERO4], t, x)[0]

    def _partials(self, alphas, t, x):
        return self.engine.partials(self._value, alphas, t, x, self.scale, self.tscale)


class TimeDecay(ScalarField):
    """Space-constant factor ``exp(-rate * t)``."""

    def __init__(self, rate: float):
        self.rate = float(rate)

    def vanishes(self, alpha):
        return any(alpha[1:]) or (alpha[0] > 0 and self.rate == 0.0)

    def _partials(self, alphas, t, x):
        base = np.exp(-self.rate * t)
        return [np.zeros(t.shape) if any(a[1:]) else (-self.rate) ** a[0] * base for a in alphas]


class AxialWave(ScalarField):
    """``alpha sin(eta x3) + beta cos(eta x3)``.

    At ``eta = 0`` the sine would vanish identically; the factor is then the
    constant ``alpha + beta`` so that every coefficient still contributes.
    """

    def __init__(self, eta: float, alpha: float = 1.0, beta: float = 0.0):
        self.eta = float(eta)
        self.alpha = float(alpha)
        self.beta = float(beta)
        if self.eta == 0.0:
            self.alpha, self.beta = 0.0, self.alpha + self.beta

    def vanishes(self, alpha):
        return bool(alpha[0] or alpha[1] or alpha[2]) or (alpha[3] > 0 and self.eta == 0.0)

    def _partials(self, alphas, t, x):
        out = []
        arg = self.eta * x[:, 2]
        for a in alphas:
            if a[0] or a[1] or a[2]:
                out.append(np.zeros(t.shape))
                continue
            k = a[3]
            shift = 0.5 * math.pi * k
            out.append(self.eta ** k * (self.alpha * np.sin(arg + shift) + self.beta * np.cos(arg + shift)))
        return out


@lru_cache(maxsize=None)
def _radial_terms(alpha3: tuple) -> tuple:
    """Expansion of ``d^alpha G(|x|^2/2)`` as ``((k, monomial, coef), ...)``.

    Each derivative index is either a singleton (contributes x_i) or paired
    with an equal index (contributes delta_ii = 1); each block raises the
    order of G by one.
    """
    idx = tuple(i for i in range(3) for _ in range(alpha3[i]))
    terms: Counter = Counter()

    def rec(rest, k, mono):
        if not rest:
            terms[(k, mono)] += 1
            return
        first, tail = rest[0], rest[1:]
        m = list(mono)
        m[first] += 1
        rec(tail, k + 1, tuple(m))
        for j, other in enumerate(tail):
            if other == first:
                rec(tail[:j] + tail[j + 1:], k + 1, mono)

    rec(idx, 0, (0, 0, 0))
    return tuple((k, mono, c) for (k, mono), c in sorted(terms.items()))


class RadialField(ScalarField):
    """Static field ``g(r)`` with r the 3D radius (``dim=3``) or the distance to the x3 axis (``dim=2``)."""

    def __init__(self, profile, dim: int = 3):
        if dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        self.profile = profile
        self.dim = dim
        self.analytic = getattr(profile, "analytic", True)

    def vanishes(self, alpha):
        return alpha[0] > 0 or (self.dim == 2 and alpha[3] > 0)

    def _partials(self, alphas, t, x):
        live = [a for a in alphas if not self.vanishes(a)]
        if not live:
            return [np.zeros(t.shape) for _ in alphas]
        kmax = max(sum(a) for a in live)
        xs = x[:, : self.dim]
        r = np.sqrt(np.sum(xs * xs, axis=-1))
        g = self.profile.sderivs(kmax, r)
        out = []
        for a in alphas:
            if self.vanishes(a):
                out.append(np.zeros(t.shape))
                continue
            acc = np.zeros(t.shape)
            for k, mono, c in _radial_terms(a[1:]):
                term = c * g[k]
                for i, e in enumerate(mono):
                    if e:
                        term = term * x[:, i] ** e
                acc = acc + term
            out.append(acc)
        return out

    def __repr__(self):
        return f"RadialField({self.profile!r}, dim={self.dim})"


class DerivedField(ScalarField):
    """``sum_beta c_beta * d^beta base`` for a constant-coefficient linear operator."""

    def __init__(self, base: ScalarField, terms: dict):
        self.base = base
        self.terms = {_index(b): float(c) for b, c in terms.items() if c}
        self.analytic = base.analytic

    def vanishes(self, alpha):
        return all(self.base.vanishes(_add(alpha, b)) for b in self.terms)

    def _partials(self, alphas, t, x):
        needed = sorted({_add(a, b) for a in alphas for b in self.terms
                         if not self.base.vanishes(_add(a, b))})
        vals = dict(zip(needed, self.base._partials(needed, t, x))) if needed else {}
        out = []
        for a in alphas:
            acc = np.zeros(t.shape)
            for b, c in self.terms.items():
                key = _add(a, b)
                if key in vals:
                    acc = acc + c * vals[key]
            out.append(acc)
        return out


class LinearCombination(ScalarField):
    def __init__(self, terms):
        flat = []
        for c, f in terms:
            if isinstance(f, LinearCombination):
                flat.extend((c * c2, f2) for c2, f2 in f.terms)
            elif c != 0.0:
                flat.append((float(c), f))
        self.terms = flat
        self.analytic = all(f.analytic for _, f in flat)

    def vanishes(self, alpha):
        return all(f.vanishes(alpha) for _, f in self.terms)

    def _partials(self, alphas, t, x):
        out = [np.zeros(t.shape) for _ in alphas]
        for c, f in self.terms:
            live = [i for i, a in enumerate(alphas) if not f.vanishes(a)]
            if not live:
                continue
            vals = f._partials([alphas[i] for i in live], t, x)
            for i, v in zip(live, vals):
                out[i] = out[i] + c * v
        return out


def _sub_indices(alpha):
    return itertools.product(*(range(a + 1) for a in alpha))


class ProductField(ScalarField):
    """Pointwise product; partials by the Leibniz rule in (t, x)."""

    def __init__(self, f: ScalarField, g: ScalarField):
        self.f = f
        self.g = g
        self.analytic = f.analytic and g.analytic

    def vanishes(self, alpha):
        for beta in _sub_indices(alpha):
            rest = tuple(a - b for a, b in zip(alpha, beta))
            if not (self.f.vanishes(beta) or self.g.vanishes(rest)):
                return False
        return True

    def _partials(self, alphas, t, x):
        plan = []
        need_f, need_g = set(), set()
        for alpha in alphas:
            items = []
            for beta in _sub_indices(alpha):
                rest = tuple(a - b for a, b in zip(alpha, beta))
                if self.f.vanishes(beta) or self.g.vanishes(rest):
                    continue
                coef = math.prod(math.comb(a, b) for a, b in zip(alpha, beta))
                items.append((coef, beta, rest))
                need_f.add(beta)
                need_g.add(rest)
            plan.append(items)
        nf, ng = sorted(need_f), sorted(need_g)
        fv = dict(zip(nf, self.f._partials(nf, t, x))) if nf else {}
        gv = dict(zip(ng, self.g._partials(ng, t, x))) if ng else {}
        out = []
        for items in plan:
            acc = np.zeros(t.shape)
            for coef, beta, rest in items:
                acc = acc + coef * fv[beta] * gv[rest]
            out.append(acc)
        return out


def derive(field: ScalarField, terms: dict) -> ScalarField:
    """Apply ``sum c_beta d^beta`` to ``field``, folding nested operators."""
    terms = {_index(b): float(c) for b, c in terms.items() if c}
    if not terms:
        return ConstantField(0.0)
    if isinstance(field, DerivedField):
        merged: dict = {}
        for b1, c1 in field.terms.items():
            for b2, c2 in terms.items():
                key = _add(b1, b2)
                merged[key] = merged.get(key, 0.0) + c1 * c2
        merged = {k: v for k, v in merged.items() if v}
        return DerivedField(field.base, merged) if merged else ConstantField(0.0)
    if isinstance(field, LinearCombination):
        return LinearCombination([(c, derive(f, terms)) for c, f in field.terms])
    if isinstance(field, ConstantField):
        return ConstantField(0.0) if all(any(b) for b in terms) else ConstantField(field.value * terms.get(ZERO4, 0.0))
    return DerivedField(field, terms)


# --- vector fields ------------------------------------------------------------


class VectorField3:
    """Three scalar components sharing the scalar derivative contract."""

    def __init__(self, components):
        comps = tuple(_scalar_field(c) for c in components)
        if len(comps) != 3:
            raise ValueError("a VectorField3 needs three components")
        self.components = comps

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i) -> ScalarField:
        return self.components[i]

    @property
    def analytic(self) -> bool:
        return all(c.analytic for c in self.components)

    def partials(self, alphas, t, x):
        per = [c.partials(alphas, t, x) for c in self.components]
        return [np.stack([per[0][i], per[1][i], per[2][i]], axis=-1) for i in range(len(per[0]))]

    def partial(self, alpha, t, x):
        return self.partials([alpha], t, x)[0]

    def __call__(self, t, x):
        return self.partial(ZERO4, t, x)

    def dt(self, t, x):
        return self.partial((1, 0, 0, 0), t, x)

    def with_mode(self, mode, engine=None, scale=1.0, tscale=1.0):
        return VectorField3([c.with_mode(mode, engine, scale, tscale) for c in self.components])

    def __add__(self, other):
        return VectorField3([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        return VectorField3([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return VectorField3([-a for a in self])

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return VectorField3([other * a for a in self])
        return VectorField3([float(other) * a for a in self])

    __rmul__ = __mul__

    def dot(self, other: "VectorField3") -> ScalarField:
        return LinearCombination([(1.0, ProductField(a, b)) for a, b in zip(self, other)])

    def norm2(self) -> ScalarField:
        return self.dot(self)


# --- operators ----------------------------------------------------------------

_E = [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]


def _levi_civita(i, j, k):
    return (i - j) * (j - k) * (k - i) / 2


def _e2(i, j):
    return _add(_E[i], _E[j])


def gradient(f: ScalarField) -> VectorField3:
    return VectorField3([derive(f, {_E[i]: 1.0}) for i in range(3)])


def symplectic_grad(A, f: ScalarField) -> VectorField3:
    """``(A x grad) f``: the cross product of A with the gradient of f."""
    a = Axis.of(A).vector
    comps = []
    for i in range(3):
        terms = {}
        for j in range(3):
            for k in range(3):
                eps = _levi_civita(i, j, k)
                if eps and a[j]:
                    terms[_E[k]] = terms.get(_E[k], 0.0) + eps * a[j]
        comps.append(derive(f, terms))
    return VectorField3(comps)


def symplectic_curl2(A, f: ScalarField) -> VectorField3:
    """``((A x grad) x grad) f``, contracted as eps_ilm eps_ljk A_j d_k d_m f.

    Equals ``grad(A . grad f) - A lap f``; the tests hold it to that.
    """
    a = Axis.of(A).vector
    comps = []
    for i in range(3):
        terms: dict = {}
        for l, m, j, k in itertools.product(range(3), repeat=4):
            c = _levi_civita(i, l, m) * _levi_civita(l, j, k) * a[j]
            if c:
                key = _e2(k, m)
                terms[key] = terms.get(key, 0.0) + c
        comps.append(derive(f, terms))
    return VectorField3(comps)


def div(u: VectorField3) -> ScalarField:
    return LinearCombination([(1.0, derive(u[i], {_E[i]: 1.0})) for i in range(3)])


def curl(u: VectorField3) -> VectorField3:
    comps = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        comps.append(derive(u[k], {_E[j]: 1.0}) - derive(u[j], {_E[k]: 1.0}))
    return VectorField3(comps)


def laplacian(f):
    """Laplacian of a scalar field, or componentwise of a vector field."""
    if isinstance(f, VectorField3):
        return VectorField3([laplacian(c) for c in f])
    return derive(f, {_e2(0, 0): 1.0, _e2(1, 1): 1.0, _e2(2, 2): 1.0})


def advect(u: VectorField3, v: VectorField3) -> VectorField3:
    """``(u . grad) v``."""
    comps = []
    for i in range(3):
        comps.append(LinearCombination([(1.0, ProductField(u[j], derive(v[i], {_E[j]: 1.0})))
                                        for j in range(3)]))
    return VectorField3(comps)


def directional_second(A, f: ScalarField) -> ScalarField:
    """``(A.A) lap f - (A . grad)^2 f``."""
    a = Axis.of(A).vector
    aa = float(a @ a)
    terms: dict = {}
    for i in range(3):
        terms[_e2(i, i)] = terms.get(_e2(i, i), 0.0) + aa
        for j in range(3):
            key = _e2(i, j)
            terms[key] = terms.get(key, 0.0) - a[i] * a[j]
    return derive(f, terms)


def incompressible_symmetry(T, xi) -> np.ndarray:
    """Tangent vector of order n at ``xi``: ``A x xi`` for a vector,
    ``xi x (M xi)`` for a matrix, ``xi x T(xi, ..., xi)`` for order n <= 4
    (all indices but the first contracted with ``xi``).
    """
    T = np.asarray(T, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (3,) or not np.all(np.isfinite(xi)):
        raise InvalidPointError("xi must be a finite 3-vector")
    if not np.any(xi != 0.0):
        raise InvalidPointError("xi must be nonzero")
    n = T.ndim
    if n < 1 or n > 4 or T.shape != (3,) * n:
        raise ValueError("T must be a 3 x ... x 3 tensor of order 1..4")
    if n == 1:
        if not np.any(T != 0.0):
            raise InvalidAxisError("A must be nonzero")
        return np.cross(T, xi)
    v = T
    for _ in range(n - 1):
        v = v @ xi
    return np.cross(xi, v)


def moving_frame(A, xi) -> tuple[np.ndarray, np.ndarray]:
    """The pair ``(A x xi, (A x xi) x xi)``."""
    a = Axis.of(A).vector
    xi = np.asarray(xi, dtype=float)
    if not np.any(xi != 0.0):
        raise InvalidPointError("xi must be nonzero")
    e1 = np.cross(a, xi)
    return e1, np.cross(e1, xi)
