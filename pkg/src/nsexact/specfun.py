"""Bessel functions of order 0 and 1 and bracketing root finding.

J0, J1, Y0, Y1 use the ascending power series below ``SWITCHOVER`` and the
Hankel asymptotic expansion above it. The exponentially scaled modified
functions ``exp(-x) I0(x)`` and ``exp(-x) I1(x)`` use the ascending series
below 30 and the large-argument expansion above, so they never overflow.

All evaluators accept floats or numpy arrays and return the same kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "SWITCHOVER",
    "BesselDomainError",
    "BracketError",
    "ConvergenceError",
    "RootBracket",
    "bessel_j0",
    "bessel_j1",
    "bessel_y0",
    "bessel_y1",
    "bessel_i0_scaled",
    "bessel_i1_scaled",
    "find_root",
    "scan_brackets",
    "bessel_zeros_j0",
]

SWITCHOVER = 12.0
EULER_GAMMA = 0.57721566490153286061
_SERIES_TERMS = 48
_ASYMPTOTIC_TERMS = 26
_I_SWITCHOVER = 30.0


class BesselDomainError(ValueError):
    """Argument outside the domain of a Bessel evaluator."""


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


class ConvergenceError(RuntimeError):
    """An iterative method hit its iteration cap."""


def _as_array(x):
    scalar = np.ndim(x) == 0
    return np.asarray(x, dtype=float), scalar


def _finish(out, scalar):
    return float(out) if scalar else out


def _hankel_coefficients(nu: float, count: int) -> list[float]:
    # a_k(nu) = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k)
    mu = 4.0 * nu * nu
    coeffs = [1.0]
    for k in range(1, count):
        coeffs.append(coeffs[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return coeffs


_A0 = _hankel_coefficients(0.0, _ASYMPTOTIC_TERMS)
_A1 = _hankel_coefficients(1.0, _ASYMPTOTIC_TERMS)


def _hankel_pq(x, coeffs):
    """P and Q of the Hankel expansion, truncated before the smallest term."""
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    inv = 1.0 / x
    power = np.ones_like(x)
    live = np.ones(x.shape, dtype=bool)
    prev = np.full_like(x, np.inf)
    for k, a in enumerate(coeffs):
        term = a * power
        mag = np.abs(term)
        live &= mag < prev
        contrib = np.where(live, term, 0.0)
        # P collects even k with sign (-1)^(k/2); Q odd k with sign (-1)^((k-1)/2)
        if k % 2 == 0:
            p += contrib if (k // 2) % 2 == 0 else -contrib
        else:
            q += contrib if ((k - 1) // 2) % 2 == 0 else -contrib
        prev = np.where(live, mag, prev)
        power = power * inv
    return p, q


def _asymptotic(x, order):
    coeffs = _A0 if order == 0 else _A1
    p, q = _hankel_pq(x, coeffs)
    chi = x - (0.5 * order + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * x))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _j0_series(x):
    u = -0.25 * x * x
    term = np.ones_like(x)
    total = term.copy()
    for m in range(1, _SERIES_TERMS):
        term = term * u / (m * m)
        total += term
    return total


def _j1_series(x):
    u = -0.25 * x * x
    term = 0.5 * x
    total = term.copy()
    for m in range(1, _SERIES_TERMS):
        term = term * u / (m * (m + 1))
        total += term
    return total


def _y0_series(x):
    u = -0.25 * x * x
    term = np.ones_like(x)
    harmonic = 0.0
    acc = np.zeros_like(x)
    for m in range(1, _SERIES_TERMS):
        term = term * u / (m * m)
        harmonic += 1.0 / m
        acc -= harmonic * term
    return (2.0 / math.pi) * ((np.log(0.5 * x) + EULER_GAMMA) * _j0_series(x) + acc)


def _y1_series(x):
    # Y1 = (2/pi) J1 ln(x/2) - 2/(pi x)
    #      - (1/pi) sum_m (-1)^m [psi(m+1) + psi(m+2)] (x/2)^(2m+1) / (m! (m+1)!)
    u = -0.25 * x * x
    term = 0.5 * x
    h_m = 0.0  # H_m
    acc = (2.0 * -EULER_GAMMA + 1.0) * term
    for m in range(1, _SERIES_TERMS):
        term = term * u / (m * (m + 1))
        h_m += 1.0 / m
        acc += (2.0 * (-EULER_GAMMA + h_m) + 1.0 / (m + 1)) * term
    return (2.0 / math.pi) * _j1_series(x) * np.log(0.5 * x) - 2.0 / (math.pi * x) - acc / math.pi


def _split_eval(x, small, large):
    out = np.empty_like(x)
    lo = x < SWITCHOVER
    if lo.any():
        out[lo] = small(x[lo])
    if (~lo).any():
        out[~lo] = large(x[~lo])
    return out


def bessel_j0(x):
    """Bessel function of the first kind, order 0."""
    x, scalar = _as_array(x)
    ax = np.abs(x)
    return _finish(_split_eval(ax, _j0_series, lambda v: _asymptotic(v, 0)[0]), scalar)


def bessel_j1(x):
    """Bessel function of the first kind, order 1 (odd in x)."""
    x, scalar = _as_array(x)
    ax = np.abs(x)
    out = _split_eval(ax, _j1_series, lambda v: _asymptotic(v, 1)[0])
    return _finish(np.sign(x) * out, scalar)


def _check_positive(x, name):
    if np.any(~(x > 0)):
        raise BesselDomainError(f"{name} requires x > 0")


def bessel_y0(x):
    """Bessel function of the second kind, order 0; defined for x > 0."""
    x, scalar = _as_array(x)
    _check_positive(x, "bessel_y0")
    return _finish(_split_eval(x, _y0_series, lambda v: _asymptotic(v, 0)[1]), scalar)


def bessel_y1(x):
    """Bessel function of the second kind, order 1; defined for x > 0."""
    x, scalar = _as_array(x)
    _check_positive(x, "bessel_y1")
    return _finish(_split_eval(x, _y1_series, lambda v: _asymptotic(v, 1)[1]), scalar)


def _scaled_i(x, order):
    out = np.empty_like(x)
    lo = x < _I_SWITCHOVER
    if lo.any():
        v = x[lo]
        u = 0.25 * v * v
        term = np.ones_like(v) if order == 0 else 0.5 * v
        total = term.copy()
        m = 1
        # all terms positive: stop once the increment is below rounding
        while True:
            term = term * u / (m * (m + order))
            total += term
            if np.all(term <= 1e-17 * total) or m > 400:
                break
            m += 1
        out[lo] = total * np.exp(-v)
    if (~lo).any():
        v = x[~lo]
        coeffs = _A0 if order == 0 else _A1
        inv = 1.0 / v
        power = np.ones_like(v)
        total = np.zeros_like(v)
        for k, a in enumerate(coeffs[:18]):
            total += (-1) ** k * a * power
            power = power * inv
        out[~lo] = total / np.sqrt(2.0 * math.pi * v)
    return out


def bessel_i0_scaled(x):
    """Return ``exp(-x) * I0(x)`` for x >= 0 without overflow."""
    x, scalar = _as_array(x)
    if np.any(x < 0):
        raise BesselDomainError("bessel_i0_scaled requires x >= 0")
    return _finish(_scaled_i(x, 0), scalar)


def bessel_i1_scaled(x):
    """Return ``exp(-x) * I1(x)`` for x >= 0 without overflow."""
    x, scalar = _as_array(x)
    if np.any(x < 0):
        raise BesselDomainError("bessel_i1_scaled requires x >= 0")
    return _finish(_scaled_i(x, 1), scalar)


@dataclass(frozen=True)
class RootBracket:
    """Interval ``[lo, hi]`` on which ``f`` changes sign."""

    lo: float
    hi: float
    f_lo: float | None = None
    f_hi: float | None = None

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def sign_change(self) -> bool:
        if self.f_lo is None or self.f_hi is None:
            return False
        return self.f_lo * self.f_hi <= 0.0


def find_root(f: Callable[[float], float], bracket: RootBracket, tol: float = 1e-14,
              maxiter: int = 200) -> float:
    """Locate a root of ``f`` inside a sign-change bracket.

    Illinois-modified regula falsi, with a bisection step forced whenever a
    step fails to halve the bracket. The bracket always shrinks, so the loop
    ends once its width drops below ``tol`` (or reaches float resolution).

    Raises
    ------
    BracketError
        If ``f`` has the same sign at both ends.
    ConvergenceError
        If ``maxiter`` steps do not reach the requested width.
    """
    a, b = float(bracket.lo), float(bracket.hi)
    fa = float(f(a)) if bracket.f_lo is None else float(bracket.f_lo)
    fb = float(f(b)) if bracket.f_hi is None else float(bracket.f_hi)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"no sign change on [{a}, {b}]: f={fa:.3e}, {fb:.3e}")

    side = 0
    width = b - a
    for _ in range(maxiter):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        c = (a * fb - b * fa) / (fb - fa)
        if not (a < c < b) or (b - a) > 0.5 * width:
            # previous step did not halve the bracket
            c = mid
        width = b - a
        fc = float(f(c))
        if fc == 0.0:
            return c
        if math.copysign(1.0, fc) == math.copysign(1.0, fa):
            a, fa = c, fc
            if side == -1:
                fb *= 0.5
            side = -1
        else:
            b, fb = c, fc
            if side == 1:
                fa *= 0.5
            side = 1
    else:
        raise ConvergenceError(f"find_root: bracket width {b - a:.3e} > tol after {maxiter} steps")
    return a if abs(fa) <= abs(fb) else b


def scan_brackets(f: Callable, lo: float, hi: float, step: float) -> list[RootBracket]:
    """Sample ``f`` on ``[lo, hi]`` and return every sign-change bracket in order.

    ``f`` is called once on the whole grid when it accepts arrays, otherwise
    point by point. A sample that is exactly zero counts as a root once,
    except at ``lo`` itself (the scan covers ``(lo, hi]``).
    """
    if not step > 0:
        raise ValueError("step must be positive")
    n = int(math.floor((hi - lo) / step + 1e-9))
    grid = lo + step * np.arange(n + 1)
    if grid[-1] < hi:
        grid = np.append(grid, hi)
    try:
        values = np.asarray(f(grid), dtype=float)
        if values.shape != grid.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.array([float(f(g)) for g in grid])

    out: list[RootBracket] = []
    for i in range(len(grid) - 1):
        fa, fb = values[i], values[i + 1]
        if not (np.isfinite(fa) and np.isfinite(fb)):
            continue
        # a zero sample is credited to the bracket on its left only
        if fa * fb < 0.0 or (fb == 0.0 and fa != 0.0):
            out.append(RootBracket(float(grid[i]), float(grid[i + 1]), float(fa), float(fb)))
    return out


def bessel_zeros_j0(count: int, tol: float = 1e-15) -> np.ndarray:
    """First ``count`` positive zeros of J0 via scanning and bracketed refinement."""
    zeros: list[float] = []
    lo, width = 0.5, 16.0
    while len(zeros) < count:
        for br in scan_brackets(bessel_j0, lo, lo + width, 0.05):
            zeros.append(find_root(bessel_j0, br, tol=tol))
        lo += width
    return np.array(zeros[:count])
