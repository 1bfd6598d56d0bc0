"""One-point-source slit propagator: closed form, time-integral oracle and stationary phase.

A source at ``r0`` (``x0 < 0``) emits at time 0; the wave crosses the slit
plane ``x = 0`` at the point ``r1`` and is observed at ``r`` (``x > 0``) at
time ``t``.  With ``u1 = |r1 - r0|``, ``u2 = |r - r1|`` and ``rho = u1 + u2`` the
exact propagator is

    K = (eta1 A_N + eta2 A_D) exp(i m rho^2 / (2 hbar t)),

where ``A_N`` and ``A_D`` each carry a leading stationary-phase term and a
smaller end-point term.  All geometry fields broadcast, so a whole aperture
grid can be evaluated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._timepath import pair_time_integral
from .errors import ConvergenceError, DomainError, GeometryError
from .numerics import QuadResult
from .propagators import NATURAL, BoundaryCondition, Particle, kernel_prefactor

__all__ = [
    "PointSourceGeometry",
    "SemiclassicalDiagnostics",
    "phase_exact",
    "phase_of_time",
    "amplitude_neumann",
    "amplitude_dirichlet",
    "k_point_exact",
    "k_point_oracle",
    "tau_semiclassical",
    "sigma_factor",
    "k_point_semiclassical",
    "semiclassical_factorized",
    "k_point_semiclassical_2d",
    "k_point_exact_2d",
    "diagnostics",
]


def _vec(a, name):
    a = np.asarray(a, dtype=float)
    if a.shape[-1:] != (3,):
        raise DomainError(f"{name} must have a trailing axis of length 3")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} must be finite")
    return a


@dataclass(frozen=True, eq=False)
class PointSourceGeometry:
    """Source ``r0``, slit point ``r1`` and screen point ``r`` at time ``t``.

    Each of ``r0``, ``r1``, ``r`` is an array with a trailing axis of length 3;
    leading axes broadcast against each other and against ``t``.
    """

    r0: np.ndarray
    r1: np.ndarray
    r: np.ndarray
    t: float
    bc: BoundaryCondition = BoundaryCondition.free()
    particle: Particle = NATURAL

    def __post_init__(self):
        r0, r1, r = _vec(self.r0, "r0"), _vec(self.r1, "r1"), _vec(self.r, "r")
        t = np.asarray(self.t, dtype=float)
        if np.any(r0[..., 0] >= 0):
            raise GeometryError("source must satisfy x0 < 0")
        if np.any(r1[..., 0] != 0):
            raise GeometryError("slit point must lie in the plane x = 0")
        if np.any(r[..., 0] <= 0):
            raise GeometryError("screen point must satisfy x > 0")
        if not np.all(np.isfinite(t)) or np.any(t <= 0):
            raise DomainError("t must be positive")
        object.__setattr__(self, "r0", r0)
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t[()] if t.ndim == 0 else t)

    @property
    def legs(self):
        """``(u1, u2)``: source-to-slit and slit-to-screen distances."""
        u1 = np.linalg.norm(self.r1 - self.r0, axis=-1)
        u2 = np.linalg.norm(self.r - self.r1, axis=-1)
        return u1, u2

    @property
    def x0(self):
        return self.r0[..., 0]

    @property
    def x(self):
        return self.r[..., 0]


@dataclass(frozen=True)
class SemiclassicalDiagnostics:
    """Scale parameters of the stationary-phase expansion at one geometry.

    ``mu`` uses the screen point measured from the slit origin, ``mu_sp`` is
    half of it and ``mu_source`` uses the source-to-screen distance instead.
    """

    mu: float
    mu_sp: float
    mu_source: float
    lambda0: float
    tau_sc: float
    rho_path: float


def _out(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def phase_exact(geo: PointSourceGeometry):
    """Phase ``m rho^2 / (2 hbar t)`` of the one-point propagator (radians)."""
    u1, u2 = geo.legs
    p = geo.particle
    return _out(p.mass * (u1 + u2) ** 2 / (2 * p.hbar * geo.t))


def phase_of_time(geo: PointSourceGeometry, tau):
    """Total phase of the two free legs when the slit is crossed at time ``tau``."""
    u1, u2 = geo.legs
    p = geo.particle
    return _out(0.5 * p.mass / p.hbar * (u1 ** 2 / tau + u2 ** 2 / (geo.t - tau)))


def _prefactors(geo):
    p = geo.particle
    P = (2j * np.pi * p.hbar * geo.t / p.mass) ** 1.5
    q = p.mass / (2j * np.pi * p.hbar * geo.t)
    return P, q


def _amplitude_terms(geo):
    u1, u2 = geo.legs
    rho = u1 + u2
    P, q = _prefactors(geo)
    lead_n = -geo.x0 / P * q * rho ** 2 / (u2 * u1 ** 2)
    tail_n = -geo.x0 / P / (2 * np.pi * u1 ** 3)
    lead_d = geo.x / P * q * rho ** 2 / (u1 * u2 ** 2)
    tail_d = geo.x / P / (2 * np.pi * u2 ** 3)
    return lead_n, tail_n, lead_d, tail_d


def amplitude_neumann(geo: PointSourceGeometry):
    """Amplitude multiplying ``eta1``; leading term plus the ``1/(2 pi u1^3)`` term."""
    lead, tail, _, _ = _amplitude_terms(geo)
    return _out(lead + tail)


def amplitude_dirichlet(geo: PointSourceGeometry):
    """Amplitude multiplying ``eta2``; leading term plus the ``1/(2 pi u2^3)`` term."""
    _, _, lead, tail = _amplitude_terms(geo)
    return _out(lead + tail)


def _phase_factor(geo):
    return np.exp(1j * phase_exact(geo))


def k_point_exact(geo: PointSourceGeometry):
    """Closed-form one-point propagator for the boundary condition ``geo.bc``."""
    ln, tn, ld, td = _amplitude_terms(geo)
    bc = geo.bc
    return _out((bc.eta1 * (ln + tn) + bc.eta2 * (ld + td)) * _phase_factor(geo))


def _neville(xs, ys):
    """Value at 0 of the interpolating polynomial, and the size of the last correction."""
    xs = list(xs)
    table = [np.asarray(y, dtype=complex) for y in ys]
    corr = np.zeros_like(table[0], dtype=float)
    n = len(xs)
    for k in range(1, n):
        new = []
        for i in range(n - k):
            xi, xj = xs[i], xs[i + k]
            val = (xj * table[i] - xi * table[i + 1]) / (xj - xi)
            new.append(val)
        corr = np.abs(new[-1] - table[-1])
        table = new
    return table[0], corr


def k_point_oracle(geo: PointSourceGeometry, eps_list=(1e-2, 1e-3, 1e-4), spec=None,
                   *, tolerance=1e-3) -> QuadResult:
    """Direct time quadrature of the surface-term integral, extrapolated in ``eps``.

    For each ``eps`` the total time is moved to ``t (1 - i eps)`` and the
    integral over the crossing time is taken along a steepest-descent-like
    contour, with the rapidly varying factor ``exp(i m rho^2 / (2 hbar T))``
    divided out.  The smooth remainder is extrapolated to ``eps = 0`` by
    polynomial (Neville) extrapolation and the phase is restored at real ``t``.

    Raises
    ------
    ConvergenceError
        If the last extrapolation correction exceeds ``tolerance`` relative.
    """
    eps = [float(e) for e in eps_list]
    if not eps or any(e < 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise DomainError("eps_list must be non-empty, non-negative and decreasing")
    if np.ndim(geo.t) != 0:
        raise DomainError("k_point_oracle requires a scalar time")
    t = float(geo.t)
    u1, u2 = geo.legs
    x0, x = geo.x0, geo.x
    bc = geo.bc
    values, quad_err = [], 0.0
    for e in eps:
        T = t * (1 - 1j * e)

        def weight(tau, T=T):
            return -x0 / tau * bc.eta1 + x / (T - tau) * bc.eta2

        res = pair_time_integral(weight, u1, u2, T, 3, geo.particle, spec=spec,
                                 strip_phase=True)
        values.append(res.value)
        quad_err = np.maximum(quad_err, res.error)
    value, corr = _neville(eps, values)
    value = value * _phase_factor(geo)
    err = corr + quad_err
    scale = np.abs(value)
    if np.any(err > tolerance * np.maximum(scale, 1e-300)):
        raise ConvergenceError("eps extrapolation did not settle", estimate=_out(value),
                               error=_out(err))
    return QuadResult(_out(value), _out(err))


def tau_semiclassical(geo: PointSourceGeometry):
    """Stationary crossing time ``u1 t / (u1 + u2)``."""
    u1, u2 = geo.legs
    return _out(u1 * geo.t / (u1 + u2))


def sigma_factor(geo: PointSourceGeometry, tau=None):
    """Boundary-condition weight of the factorized semiclassical propagator.

    ``lambda0^2 / rho * (-m x0 eta1 / (2 pi hbar tau) + m x eta2 / (2 pi hbar (t - tau)))``
    evaluated at the stationary time unless ``tau`` is given.
    """
    p = geo.particle
    tau = tau_semiclassical(geo) if tau is None else tau
    u1, u2 = geo.legs
    lam0_sq = 2 * np.pi * p.hbar * geo.t / p.mass
    c = p.mass / (2 * np.pi * p.hbar)
    bc = geo.bc
    return _out(lam0_sq / (u1 + u2) * (-c * geo.x0 * bc.eta1 / tau
                                        + c * geo.x * bc.eta2 / (geo.t - tau)))


def k_point_semiclassical(geo: PointSourceGeometry):
    """Stationary-phase propagator: exact phase, leading amplitude terms only."""
    ln, _, ld, _ = _amplitude_terms(geo)
    bc = geo.bc
    return _out((bc.eta1 * ln + bc.eta2 * ld) * _phase_factor(geo))


def semiclassical_factorized(geo: PointSourceGeometry):
    """Semiclassical propagator written as ``sigma`` times three free kernels.

    The axial factor is ``exp(i m (x^2/(t - tau) + x0^2/tau) / (2 hbar)) /
    sqrt(2 i pi hbar t / m)`` and the transverse factors are two-dimensional
    free kernels over ``t - tau`` and ``tau``, all at the stationary time.
    Equal to :func:`k_point_semiclassical` up to rounding.
    """
    p = geo.particle
    t = geo.t
    tau = tau_semiclassical(geo)
    x0, x = geo.x0, geo.x
    axial = kernel_prefactor(t, 1, p) * np.exp(
        0.5j * p.mass / p.hbar * (x ** 2 / (t - tau) + x0 ** 2 / tau))
    d_out = geo.r[..., 1:] - geo.r1[..., 1:]
    d_in = geo.r1[..., 1:] - geo.r0[..., 1:]
    out2 = np.sum(d_out ** 2, axis=-1)
    in2 = np.sum(d_in ** 2, axis=-1)
    g_out = kernel_prefactor(t - tau, 2, p) * np.exp(0.5j * p.mass * out2 / (p.hbar * (t - tau)))
    g_in = kernel_prefactor(tau, 2, p) * np.exp(0.5j * p.mass * in2 / (p.hbar * tau))
    return _out(sigma_factor(geo, tau) * axial * g_out * g_in)


def _legs_2d(x0, z0, z1, x, z):
    u1 = np.hypot(x0, z1 - z0)
    u2 = np.hypot(x, z - z1)
    return u1, u2


def k_point_semiclassical_2d(x0, z0, z1, x, z, t, bc: BoundaryCondition,
                             p: Particle = NATURAL):
    """Two-dimensional (``y = y0 = y1 = 0``) semiclassical one-point kernel.

    ``sigma`` times a one-dimensional axial kernel and two one-dimensional
    transverse kernels, all at the stationary time of the in-plane legs.
    Integrating this over ``z1`` gives the semiclassical strip-slit propagator.
    """
    x0, z0, z1, x, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x0, z0, z1, x, z)))
    if np.any(x0 >= 0) or np.any(x <= 0):
        raise GeometryError("need x0 < 0 < x")
    u1, u2 = _legs_2d(x0, z0, z1, x, z)
    tau = u1 * t / (u1 + u2)
    lam0_sq = 2 * np.pi * p.hbar * t / p.mass
    c = p.mass / (2 * np.pi * p.hbar)
    sig = lam0_sq / (u1 + u2) * (-c * x0 * bc.eta1 / tau + c * x * bc.eta2 / (t - tau))
    k = 0.5j * p.mass / p.hbar
    axial = kernel_prefactor(t, 1, p) * np.exp(k * (x ** 2 / (t - tau) + x0 ** 2 / tau))
    g_out = kernel_prefactor(t - tau, 1, p) * np.exp(k * (z - z1) ** 2 / (t - tau))
    g_in = kernel_prefactor(tau, 1, p) * np.exp(k * (z1 - z0) ** 2 / tau)
    return _out(sig * axial * g_out * g_in)


def k_point_exact_2d(x0, z0, z1, x, z, t, bc: BoundaryCondition, p: Particle = NATURAL,
                     spec=None) -> QuadResult:
    """Two-dimensional one-point kernel by direct quadrature over the crossing time.

    Serves as the reference for :func:`k_point_semiclassical_2d`.
    """
    x0, z0, z1, x, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x0, z0, z1, x, z)))
    u1, u2 = _legs_2d(x0, z0, z1, x, z)

    def weight(tau):
        return -x0 / tau * bc.eta1 + x / (t - tau) * bc.eta2

    res = pair_time_integral(weight, u1, u2, t, 2, p, spec=spec)
    return QuadResult(_out(res.value), _out(res.error))


def diagnostics(geo: PointSourceGeometry) -> SemiclassicalDiagnostics:
    """Semiclassical scale parameters for a scalar geometry."""
    if np.ndim(geo.t) != 0 or geo.r.ndim != 1 or geo.r0.ndim != 1 or geo.r1.ndim != 1:
        raise DomainError("diagnostics expects a single geometry")
    p = geo.particle
    t = float(geo.t)
    mu = p.mass * float(geo.r @ geo.r) / (p.hbar * t)
    d = geo.r - geo.r0
    u1, u2 = geo.legs
    return SemiclassicalDiagnostics(
        mu=mu,
        mu_sp=0.5 * mu,
        mu_source=p.mass * float(d @ d) / (p.hbar * t),
        lambda0=float(np.sqrt(2 * np.pi * p.hbar * t / p.mass)),
        tau_sc=float(tau_semiclassical(geo)),
        rho_path=float(u1 + u2),
    )
