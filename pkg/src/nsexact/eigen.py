"""Radial eigenvalue problems: ball, disc and annulus.

Ball and disc Dirichlet problems reduce to zeros of ``sin`` and ``J0``.
The annulus problem ``-(r V')' = zeta**2 r V`` on ``[R1, R2]`` is solved in
the Bessel basis ``{J0(zeta r), Y0(zeta r)}``: the eigencondition is the
vanishing of a 2x2 determinant, scanned for sign changes in ``zeta`` and
refined by bracketed root finding.

The state vector is ``Y(r) = (V(r), r V'(r))``. It obeys the trace-free
system ``Y' = [[0, 1/r], [-zeta**2 r, 0]] Y``, so the transfer matrix
``F`` with ``Y(R1) = F Y(R2)`` is unimodular. :func:`shooting_transfer_matrix`
integrates that system with RK4 and serves as an independent check on the
closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import specfun
from .profiles import CylindricalBessel, RadialProfile, SphericalWave

__all__ = [
    "InvalidBCError",
    "WindowExhaustedError",
    "EigenDomainError",
    "BallSpec",
    "DiscSpec",
    "AnnulusSpec",
    "SeparatedBC",
    "CoupledBC",
    "EigenMode",
    "ball_radial_eigen",
    "disc_radial_eigen",
    "annulus_eigen_separated",
    "annulus_eigen_coupled",
    "transfer_matrix",
    "transfer_matrix_derivative",
    "shooting_transfer_matrix",
    "shooting_eigenvalues",
    "separated_determinant",
    "coupled_determinant",
]

SCAN_EPS = 1e-6
DOUBLE_ROOT_TOL = 1e-10


class InvalidBCError(ValueError):
    """Boundary-condition data violates its invariants."""


class EigenDomainError(ValueError):
    """Spectral parameter or geometry outside the allowed range."""


class WindowExhaustedError(RuntimeError):
    """Fewer eigenvalues than requested inside the scan window.

    ``partial`` holds the modes found before the window ran out.
    """

    def __init__(self, message: str, partial: list):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class BallSpec:
    R0: float

    def __post_init__(self):
        if not (math.isfinite(self.R0) and self.R0 > 0):
            raise EigenDomainError("ball radius must be positive")


@dataclass(frozen=True)
class DiscSpec:
    R0: float

    def __post_init__(self):
        if not (math.isfinite(self.R0) and self.R0 > 0):
            raise EigenDomainError("disc radius must be positive")


@dataclass(frozen=True)
class AnnulusSpec:
    R1: float
    R2: float

    def __post_init__(self):
        if not (math.isfinite(self.R1) and math.isfinite(self.R2) and 0 < self.R1 < self.R2):
            raise EigenDomainError(f"annulus needs 0 < R1 < R2, got R1={self.R1}, R2={self.R2}")

    @property
    def width(self) -> float:
        return self.R2 - self.R1

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.R1 + self.R2)


@dataclass(frozen=True)
class SeparatedBC:
    """``m11 V(R1) + m12 (r V')(R1) = 0`` and ``m21 V(R2) + m22 (r V')(R2) = 0``."""

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self):
        vals = (self.m11, self.m12, self.m21, self.m22)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidBCError("boundary coefficients must be finite")
        if self.m11 == 0 and self.m12 == 0:
            raise InvalidBCError("inner boundary row (m11, m12) is zero")
        if self.m21 == 0 and self.m22 == 0:
            raise InvalidBCError("outer boundary row (m21, m22) is zero")

    @classmethod
    def dirichlet(cls) -> "SeparatedBC":
        return cls(1.0, 0.0, 1.0, 0.0)

    @classmethod
    def neumann(cls) -> "SeparatedBC":
        return cls(0.0, 1.0, 0.0, 1.0)


@dataclass(frozen=True)
class CoupledBC:
    """``Y(R1) = K Y(R2)`` with ``det K = 1``."""

    K: tuple

    def __post_init__(self):
        K = np.asarray(self.K, dtype=float)
        if K.shape != (2, 2) or not np.all(np.isfinite(K)):
            raise InvalidBCError("K must be a finite 2x2 matrix")
        det = K[0, 0] * K[1, 1] - K[0, 1] * K[1, 0]
        if abs(det - 1.0) > 1e-12:
            raise InvalidBCError(f"det K must be 1, got {float(det)!r}")
        object.__setattr__(self, "K", tuple(tuple(float(v) for v in row) for row in K))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.K)

    @classmethod
    def periodic(cls) -> "CoupledBC":
        return cls(((1.0, 0.0), (0.0, 1.0)))


@dataclass(frozen=True)
class EigenMode:
    """One radial eigenpair.

    ``value`` is the radial eigenvalue (lambda, xi or zeta). ``profile`` is
    the eigenfunction of r. For a double eigenvalue ``second_profile`` spans
    the rest of the eigenspace.
    """

    family: str
    index: int
    value: float
    profile: RadialProfile
    normalization: str
    multiplicity: int = 1
    coefficients: tuple = (1.0, 0.0)
    second_profile: RadialProfile | None = None
    domain: tuple = (0.0, math.inf)

    def __call__(self, r):
        return self.profile(r)

    def state(self, r) -> np.ndarray:
        """``(V(r), r V'(r))`` stacked on the last axis."""
        r = np.asarray(r, dtype=float)
        d = self.profile.derivs(1, r)
        return np.stack([d[0], r * d[1]], axis=-1)

    @property
    def r_min(self) -> float:
        return self.domain[0]


def ball_radial_eigen(spec: BallSpec, n: int) -> EigenMode:
    """Radial Dirichlet mode ``sin(lam r)/r`` of the ball, ``lam = n pi / R0``."""
    if int(n) != n or n < 1:
        raise EigenDomainError("mode index must be an integer >= 1")
    lam = n * math.pi / spec.R0
    return EigenMode("ball-radial", int(n), lam, SphericalWave(lam, 1.0, 0.0),
                     "sin(lam r)/r, equal to lam at r = 0", domain=(0.0, spec.R0))


def disc_radial_eigen(spec: DiscSpec, j: int) -> EigenMode:
    """Radial Dirichlet mode ``J0(xi r)`` of the disc, ``xi = z_j / R0``."""
    if int(j) != j or j < 1:
        raise EigenDomainError("mode index must be an integer >= 1")
    z = float(specfun.bessel_zeros_j0(int(j))[-1])
    xi = z / spec.R0
    return EigenMode("disc-radial", int(j), xi, CylindricalBessel(xi),
                     "J0(xi r), equal to 1 at r = 0", domain=(0.0, spec.R0))


# --- annulus: closed form ------------------------------------------------------


def _fundamental(zeta, r):
    """Fundamental matrix with columns the states of J0(zeta r) and Y0(zeta r)."""
    z = zeta * r
    j0, j1 = specfun.bessel_j0(z), specfun.bessel_j1(z)
    y0, y1 = specfun.bessel_y0(z), specfun.bessel_y1(z)
    return np.array([[j0, y0], [-z * j1, -z * y1]])


def _fundamental_dzeta(zeta, r):
    """Derivative of :func:`_fundamental` with respect to zeta."""
    z = zeta * r
    j0, j1 = specfun.bessel_j0(z), specfun.bessel_j1(z)
    y0, y1 = specfun.bessel_y0(z), specfun.bessel_y1(z)
    return np.array([[-r * j1, -r * y1], [-r * z * j0, -r * z * y0]])


def _check_zeta(zeta):
    z = np.asarray(zeta, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z <= 0):
        raise EigenDomainError("zeta must be positive")
    return z


def _inv2(M):
    # columns of the fundamental matrix have determinant 2/pi
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det


def _matmul2(A, B):
    return np.einsum("ij...,jk...->ik...", A, B)


def transfer_matrix(spec: AnnulusSpec, zeta) -> np.ndarray:
    """Matrix ``F`` with ``Y(R1) = F Y(R2)``; shape (2, 2) + shape(zeta)."""
    z = _check_zeta(zeta)
    return _matmul2(_fundamental(z, spec.R1), _inv2(_fundamental(z, spec.R2)))


def transfer_matrix_derivative(spec: AnnulusSpec, zeta) -> np.ndarray:
    """``dF/dzeta`` in closed form."""
    z = _check_zeta(zeta)
    inv2 = _inv2(_fundamental(z, spec.R2))
    F = _matmul2(_fundamental(z, spec.R1), inv2)
    d1 = _matmul2(_fundamental_dzeta(z, spec.R1), inv2)
    d2 = _matmul2(F, _matmul2(_fundamental_dzeta(z, spec.R2), inv2))
    return d1 - d2


def _bc_matrix(spec: AnnulusSpec, bc: SeparatedBC, zeta):
    P1 = _fundamental(zeta, spec.R1)
    P2 = _fundamental(zeta, spec.R2)
    row1 = bc.m11 * P1[0] + bc.m12 * P1[1]
    row2 = bc.m21 * P2[0] + bc.m22 * P2[1]
    return np.array([row1, row2])


def separated_determinant(spec: AnnulusSpec, bc: SeparatedBC, zeta):
    """Determinant of the boundary conditions applied to the J0/Y0 basis."""
    z = _check_zeta(zeta)
    M = _bc_matrix(spec, bc, z)
    return M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]


def coupled_determinant(spec: AnnulusSpec, bc: CoupledBC, zeta):
    """``det(F(zeta) - K)``; zero iff ``Y(R1) = K Y(R2)`` has a nonzero solution."""
    F = transfer_matrix(spec, zeta)
    K = bc.matrix
    D = F - K.reshape((2, 2) + (1,) * (F.ndim - 2))
    return D[0, 0] * D[1, 1] - D[0, 1] * D[1, 0]


def _coupled_determinant_dzeta(spec, bc, zeta):
    F = transfer_matrix(spec, zeta)
    dF = transfer_matrix_derivative(spec, zeta)
    D = F - bc.matrix.reshape((2, 2) + (1,) * (F.ndim - 2))
    # d det(D) = tr(adj(D) dD)
    return D[1, 1] * dF[0, 0] - D[0, 1] * dF[1, 0] - D[1, 0] * dF[0, 1] + D[0, 0] * dF[1, 1]


def _scan_window(spec: AnnulusSpec, zeta_max):
    hi = 40.0 / spec.width if zeta_max is None else float(zeta_max)
    step = 0.02 * math.pi / spec.width
    return SCAN_EPS, hi, step


def _normalized_profile(spec: AnnulusSpec, zeta: float, c: np.ndarray):
    """Scale ``c1 J0 + c2 Y0`` to max-abs 1 on [R1, R2], positive at the maximum."""
    base = CylindricalBessel(zeta, float(c[0]), float(c[1]))
    r = np.linspace(spec.R1, spec.R2, 4001)
    v = base(r)
    i = int(np.argmax(np.abs(v)))
    peak = v[i]
    if 0 < i < len(r) - 1:
        # parabolic refinement of the interior extremum
        y0, y1, y2 = v[i - 1], v[i], v[i + 1]
        denom = y0 - 2 * y1 + y2
        if denom != 0:
            delta = 0.5 * (y0 - y2) / denom
            peak = float(base(r[i] + delta * (r[1] - r[0])))
    scale = 1.0 / peak
    return CylindricalBessel(zeta, float(c[0]), float(c[1]), scale=scale), (c[0] * scale, c[1] * scale)


def _null_vector(M: np.ndarray) -> np.ndarray:
    """Unit null vector of a (numerically) singular 2x2 matrix from its larger row."""
    rows = M if np.linalg.norm(M[0]) >= np.linalg.norm(M[1]) else M[::-1]
    a, b = rows[0]
    v = np.array([b, -a])
    return v / np.linalg.norm(v)


def annulus_eigen_separated(spec: AnnulusSpec, bc: SeparatedBC, count: int,
                            zeta_max: float | None = None) -> list[EigenMode]:
    """First ``count`` positive eigenvalues with separated boundary conditions."""
    if int(count) != count or count < 1:
        raise EigenDomainError("count must be an integer >= 1")
    lo, hi, step = _scan_window(spec, zeta_max)

    def det(z):
        return separated_determinant(spec, bc, z)

    modes: list[EigenMode] = []
    for br in specfun.scan_brackets(det, lo, hi, step):
        zeta = specfun.find_root(lambda z: float(det(z)), br)
        c = _null_vector(_bc_matrix(spec, bc, zeta))
        profile, coef = _normalized_profile(spec, zeta, c)
        modes.append(EigenMode("annulus-separated", len(modes) + 1, zeta, profile,
                               "max |V| = 1 on [R1, R2]", coefficients=coef,
                               domain=(spec.R1, spec.R2)))
        if len(modes) == count:
            return modes
    raise WindowExhaustedError(
        f"found {len(modes)} of {count} eigenvalues in (0, {hi:g}]", modes)


def annulus_eigen_coupled(spec: AnnulusSpec, bc: CoupledBC, count: int,
                          zeta_max: float | None = None) -> list[EigenMode]:
    """First ``count`` positive eigenvalues with the coupled condition ``Y(R1) = K Y(R2)``.

    Simple roots of ``det(F - K)`` come from sign changes. Double roots touch
    zero without a sign change; they are found as roots of the derivative
    where ``|det|`` drops below 1e-10, and carry multiplicity 2. The count
    includes multiplicity.
    """
    if int(count) != count or count < 1:
        raise EigenDomainError("count must be an integer >= 1")
    lo, hi, step = _scan_window(spec, zeta_max)

    def det(z):
        return coupled_determinant(spec, bc, z)

    def ddet(z):
        return _coupled_determinant_dzeta(spec, bc, z)

    roots = []
    simple = specfun.scan_brackets(det, lo, hi, step)
    for br in simple:
        roots.append((specfun.find_root(lambda z: float(det(z)), br), 1))
    for br in specfun.scan_brackets(ddet, lo, hi, step):
        z = specfun.find_root(lambda z: float(ddet(z)), br)
        if abs(float(det(z))) > DOUBLE_ROOT_TOL:
            continue
        if any(abs(z - r) < step for r, _ in roots):
            continue
        roots.append((z, 2))
    roots.sort()

    modes: list[EigenMode] = []
    total = 0
    for zeta, mult in roots:
        F = transfer_matrix(spec, zeta)
        inv2 = _inv2(_fundamental(zeta, spec.R2))
        D = F - bc.matrix
        if mult == 1:
            y2 = _null_vector(D)
            profile, coef = _normalized_profile(spec, zeta, inv2 @ y2)
            second = None
        else:
            profile, coef = _normalized_profile(spec, zeta, inv2 @ np.array([1.0, 0.0]))
            second, _ = _normalized_profile(spec, zeta, inv2 @ np.array([0.0, 1.0]))
        modes.append(EigenMode("annulus-coupled", len(modes) + 1, float(zeta), profile,
                               "max |V| = 1 on [R1, R2]", multiplicity=mult, coefficients=coef,
                               second_profile=second, domain=(spec.R1, spec.R2)))
        total += mult
        if total >= count:
            return modes
    raise WindowExhaustedError(
        f"found {total} of {count} eigenvalues (with multiplicity) in (0, {hi:g}]", modes)


# --- annulus: RK4 shooting oracle -----------------------------------------------


def shooting_transfer_matrix(spec: AnnulusSpec, zeta, step: float = 1e-4) -> np.ndarray:
    """Transfer matrix by classical RK4 on ``Y' = [[0, 1/r], [-zeta^2 r, 0]] Y``.

    Integrates from R2 down to R1 starting from the identity. Scalar zeta
    runs on plain floats; array zeta is vectorised.
    """
    z = _check_zeta(zeta)
    n = max(1, int(math.ceil(spec.width / step)))
    h = -spec.width / n
    if z.ndim == 0:
        return _rk4_scalar(float(z), spec.R2, h, n)
    k2 = z * z
    shape = z.shape
    a, b = np.ones(shape), np.zeros(shape)      # column 1
    c, d = np.zeros(shape), np.ones(shape)      # column 2
    r = spec.R2
    for _ in range(n):
        rm, re = r + 0.5 * h, r + h
        # both columns advance together: (v, w)' = (w / r, -zeta^2 r v)
        a1, b1 = b / r, -k2 * r * a
        c1, d1 = d / r, -k2 * r * c
        a2, b2 = (b + 0.5 * h * b1) / rm, -k2 * rm * (a + 0.5 * h * a1)
        c2, d2 = (d + 0.5 * h * d1) / rm, -k2 * rm * (c + 0.5 * h * c1)
        a3, b3 = (b + 0.5 * h * b2) / rm, -k2 * rm * (a + 0.5 * h * a2)
        c3, d3 = (d + 0.5 * h * d2) / rm, -k2 * rm * (c + 0.5 * h * c2)
        a4, b4 = (b + h * b3) / re, -k2 * re * (a + h * a3)
        c4, d4 = (d + h * d3) / re, -k2 * re * (c + h * c3)
        a = a + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        b = b + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        c = c + h / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
        d = d + h / 6 * (d1 + 2 * d2 + 2 * d3 + d4)
        r = r + h
    return np.array([[a, c], [b, d]])


def _rk4_scalar(zeta: float, r0: float, h: float, n: int) -> np.ndarray:
    k2 = zeta * zeta
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    for i in range(n):
        r = r0 + i * h
        rm, re = r + 0.5 * h, r + h
        a1, b1 = b / r, -k2 * r * a
        c1, d1 = d / r, -k2 * r * c
        a2, b2 = (b + 0.5 * h * b1) / rm, -k2 * rm * (a + 0.5 * h * a1)
        c2, d2 = (d + 0.5 * h * d1) / rm, -k2 * rm * (c + 0.5 * h * c1)
        a3, b3 = (b + 0.5 * h * b2) / rm, -k2 * rm * (a + 0.5 * h * a2)
        c3, d3 = (d + 0.5 * h * d2) / rm, -k2 * rm * (c + 0.5 * h * c2)
        a4, b4 = (b + h * b3) / re, -k2 * re * (a + h * a3)
        c4, d4 = (d + h * d3) / re, -k2 * re * (c + h * c3)
        a += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        b += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        c += h / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
        d += h / 6 * (d1 + 2 * d2 + 2 * d3 + d4)
    return np.array([[a, c], [b, d]])


def shooting_eigenvalues(spec: AnnulusSpec, bc, count: int, step: float = 1e-4,
                         zeta_max: float | None = None) -> list[float]:
    """Eigenvalues from the RK4 transfer matrix alone (no Bessel functions).

    Separated conditions: shoot from R2 with the outer condition satisfied
    and test the inner one. Coupled: ``det(F - K)``. Only sign-change roots
    are found.
    """
    lo, hi, scan_step = _scan_window(spec, zeta_max)
    if isinstance(bc, SeparatedBC):
        y2 = np.array([bc.m22, -bc.m21])

        def g(z):
            F = shooting_transfer_matrix(spec, z, step)
            y1 = np.einsum("ij...,j->i...", F, y2)
            return bc.m11 * y1[0] + bc.m12 * y1[1]
    elif isinstance(bc, CoupledBC):
        K = bc.matrix

        def g(z):
            F = shooting_transfer_matrix(spec, z, step)
            D = F - K.reshape((2, 2) + (1,) * (F.ndim - 2))
            return D[0, 0] * D[1, 1] - D[0, 1] * D[1, 0]
    else:
        raise InvalidBCError("unknown boundary condition type")
    out = []
    for br in specfun.scan_brackets(g, lo, hi, scan_step):
        out.append(specfun.find_root(lambda z: float(g(z)), br, tol=1e-13))
        if len(out) == count:
            break
    return out
