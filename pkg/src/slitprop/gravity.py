"""Slit propagator for a particle falling through an aperture in a uniform field.

The source sits at the origin at time 0.  The field accelerates the particle
along ``+z`` (potential ``-m g z``), the aperture lies in the plane
``z = z1 > 0`` with in-plane coordinates ``(x1, y1)`` and the screen point has
``z > z1``.  Removing the field maps the problem onto the flat slit geometry
with the normal axis along ``z``; :func:`flat_equivalent` performs that map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P

from ._timepath import pair_time_integral
from .errors import DegenerateStationaryPointError, DomainError, GeometryError
from .numerics import DEFAULT_SPEC, QuadratureSpec, QuadResult, integrate_2d, real_roots_in_interval
from .propagators import NATURAL, BoundaryCondition, Particle, gravity_phase, kernel_prefactor

__all__ = [
    "GravityScenario",
    "GravityRoot",
    "NeonDiagnostics",
    "chi",
    "tcg_polynomial",
    "tau_sc_gravity",
    "phase_sc",
    "omega_sc",
    "amplitude_sc",
    "k_gravity",
    "k_gravity_point",
    "k_gravity_semiclassical",
    "flat_equivalent",
    "neon_scenario_diagnostics",
    "evaluate_gravity_pattern",
    "GRAVITY_METHODS",
    "HOMOTOPY_STEPS",
    "calibration_factor",
]

HOMOTOPY_STEPS = 10


@dataclass(frozen=True)
class GravityScenario:
    """Single rectangular aperture ``|x1| <= a``, ``|y1| <= b`` in the plane ``z = z1``."""

    z1: float
    a: float
    b: float
    t: float
    g: float = 0.0
    bc: BoundaryCondition = BoundaryCondition.free()
    particle: Particle = NATURAL

    def __post_init__(self):
        if not self.z1 > 0:
            raise GeometryError("aperture plane must satisfy z1 > 0")
        if not (self.a > 0 and self.b > 0):
            raise DomainError("aperture half-sizes must be positive")
        if not self.t > 0:
            raise DomainError("t must be positive")
        if not (np.isfinite(self.g) and self.g >= 0):
            raise DomainError("g must be finite and non-negative")


def chi(t, tau, z, z1, bc: BoundaryCondition, g):
    """Surface-term weight of the field problem.

    ``eta1 z1/tau + eta2 (z - z1)/(t - tau) - i eta2 g t + i (eta1 + eta2) g tau
    - i (eta1 - eta2) g tau / 2``; ``tau`` may be complex.
    """
    e1, e2 = bc.eta1, bc.eta2
    return (e1 * z1 / tau + e2 * (z - z1) / (t - tau) - 1j * e2 * g * t
            + 1j * (e1 + e2) * g * tau - 0.5j * (e1 - e2) * g * tau)


def tcg_polynomial(r, r1, t, g):
    """Coefficients (highest power first) of the crossing-time polynomial.

    ``|r - r1|^2 tau^2 - |r1|^2 (t - tau)^2 - g z tau^2 (t - tau)^2
    - (g^2/4) (tau^4 (t - tau)^2 - tau^2 (t - tau)^4)``; the ``tau^6`` terms cancel.
    """
    r, r1 = np.asarray(r, dtype=float), np.asarray(r1, dtype=float)
    A = float((r - r1) @ (r - r1))
    B = float(r1 @ r1)
    z = float(r[2])
    tau = np.array([0.0, 1.0])
    T = np.array([t, -1.0])
    tau2, T2 = P.polymul(tau, tau), P.polymul(T, T)
    poly = P.polysub(A * tau2, B * T2)
    poly = P.polysub(poly, g * z * P.polymul(tau2, T2))
    quartic = P.polysub(P.polymul(P.polymul(tau2, tau2), T2), P.polymul(tau2, P.polymul(T2, T2)))
    poly = P.polysub(poly, 0.25 * g * g * quartic)
    poly = np.trim_zeros(np.asarray(poly, dtype=float), "b")
    if poly.size == 7:
        # the sextic coefficient cancels analytically; drop its rounding residue
        poly = poly[:6]
    return poly[::-1]


@dataclass(frozen=True)
class GravityRoot:
    """Selected crossing time and every root of the polynomial inside ``(0, t)``."""

    tau: float
    roots: np.ndarray


def tau_sc_gravity(r, r1, t, g) -> GravityRoot:
    """Stationary crossing time in the field.

    Starts from the field-free value ``|r1| t / (|r1| + |r - r1|)`` and follows
    the root continuously while ``g`` is raised in ``HOMOTOPY_STEPS`` equal
    steps; at each step the nearest root in ``(0, t)`` is kept.

    Raises
    ------
    GeometryError
        If the polynomial has no root in ``(0, t)``.
    """
    r, r1 = np.asarray(r, dtype=float), np.asarray(r1, dtype=float)
    u1, u2 = np.linalg.norm(r1), np.linalg.norm(r - r1)
    if u1 == 0 or u2 == 0:
        raise GeometryError("slit point must differ from source and screen point")
    tau = u1 * t / (u1 + u2)
    roots = np.array([tau])
    if g != 0:
        for k in range(1, HOMOTOPY_STEPS + 1):
            gk = g * k / HOMOTOPY_STEPS
            roots = real_roots_in_interval(tcg_polynomial(r, r1, t, gk), 0.0, t)
            if roots.size == 0:
                raise GeometryError(f"no crossing time in (0, t) at g = {gk}")
            tau = float(roots[np.argmin(np.abs(roots - tau))])
    return GravityRoot(float(tau), np.asarray(roots))


def _tau_newton(A, B, z, t, g, iterations=8):
    """Vectorized continuation of the crossing time for arrays of leg lengths squared."""
    u1, u2 = np.sqrt(B), np.sqrt(A)
    tau = u1 * t / (u1 + u2)
    if g == 0:
        return tau
    for k in range(1, HOMOTOPY_STEPS + 1):
        gk = g * k / HOMOTOPY_STEPS
        for _ in range(iterations):
            T = t - tau
            f = (A * tau ** 2 - B * T ** 2 - gk * z * tau ** 2 * T ** 2
                 - 0.25 * gk * gk * tau ** 2 * T ** 2 * (2 * t * tau - t * t))
            df = (2 * A * tau + 2 * B * T - gk * z * (2 * tau * T ** 2 - 2 * tau ** 2 * T)
                  - 0.25 * gk * gk * (2 * tau * T ** 2 * (2 * t * tau - t * t)
                                      - 2 * tau ** 2 * T * (2 * t * tau - t * t)
                                      + 2 * t * tau ** 2 * T ** 2))
            step = f / df
            tau = np.clip(tau - step, 1e-12 * t, t * (1 - 1e-12))
    return tau


def _legs(r, r1):
    A = np.sum((r - r1) ** 2, axis=-1)
    B = np.sum(r1 ** 2, axis=-1)
    return A, B


def phase_sc(r, r1, t, tau, g, p: Particle = NATURAL):
    """Stationary phase of the two field kernels crossing the aperture at ``tau``.

    ``m/(2 hbar) (|r - r1|^2/(t - tau) + |r1|^2/tau)`` plus the field phases of
    both legs, ``m/(2 hbar) (g (z + z1)(t - tau) + g z1 tau - g^2 (t - tau)^3/12
    - g^2 tau^3/12)``.
    """
    r, r1 = np.asarray(r, dtype=float), np.asarray(r1, dtype=float)
    A, B = _legs(r, r1)
    T = t - tau
    free = 0.5 * p.mass / p.hbar * (A / T + B / tau)
    return free + gravity_phase(r[..., 2], r1[..., 2], T, g, p) + gravity_phase(r1[..., 2], 0.0, tau, g, p)


def omega_sc(r, r1, t, tau, g, p: Particle = NATURAL):
    """Second time derivative of :func:`phase_sc`."""
    r, r1 = np.asarray(r, dtype=float), np.asarray(r1, dtype=float)
    A, B = _legs(r, r1)
    T = t - tau
    return p.mass / p.hbar * (A / T ** 3 + B / tau ** 3) - p.mass * g * g * t / (4 * p.hbar)


def amplitude_sc(r, r1, t, tau, g, bc: BoundaryCondition, p: Particle = NATURAL):
    """Stationary-phase amplitude ``chi / ((2 i pi hbar/m)^2 (t - tau) tau)^(3/2) (2 i pi / omega)^(1/2)``.

    Raises
    ------
    DegenerateStationaryPointError
        If ``omega`` is not positive at some point.
    """
    r, r1 = np.asarray(r, dtype=float), np.asarray(r1, dtype=float)
    om = omega_sc(r, r1, t, tau, g, p)
    if np.any(~(om > 0)):
        raise DegenerateStationaryPointError("second derivative of the phase is not positive")
    kern = kernel_prefactor(t - tau, 3, p) * kernel_prefactor(tau, 3, p)
    w = chi(t, tau, r[..., 2], r1[..., 2], bc, g)
    return w * kern * np.sqrt(2 * np.pi / om) * np.exp(0.25j * np.pi)


def _aperture_rect(scn):
    return ((-scn.a, scn.a), (-scn.b, scn.b))


def _screen(r):
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise DomainError("screen point must be a 3-vector")
    return r


def _phase_scale(scn, r):
    p = scn.particle
    z1 = np.array([0.0, 0.0, scn.z1])
    u = np.linalg.norm(z1) + np.linalg.norm(r - z1)
    grav = p.mass * scn.g * (abs(r[2]) + scn.z1) * scn.t / p.hbar
    return float(p.mass * u * u / (2 * p.hbar * scn.t) + grav)


def _rate(scn, r, axis):
    """Bound on the in-plane phase gradient of the field-free stationary phase."""
    m, hb, t = scn.particle.mass, scn.particle.hbar, scn.t

    def rate(s):
        r1 = np.zeros(np.shape(s) + (3,))
        r1[..., axis] = s
        r1[..., 2] = scn.z1
        u1 = np.linalg.norm(r1, axis=-1)
        d = r - r1
        u2 = np.linalg.norm(d, axis=-1)
        return m / (hb * t) * (u1 + u2) * np.abs(r1[..., axis] / u1 - d[..., axis] / u2)

    return rate


def calibration_factor(p: Particle = NATURAL) -> complex:
    """Factor ``2 m / (i hbar)`` that maps the raw surface integral onto the flat kernel at ``g = 0``."""
    return 2 * p.mass / (1j * p.hbar)


def k_gravity_point(scn: GravityScenario, r, r1, spec=None, *, shared_elapsed_time=False,
                    calibrated=True):
    """One-point field propagator: the crossing-time integral for a fixed aperture point.

    With ``calibrated`` (default) the raw ``i hbar / (2 m)`` prefactor is
    divided out again so that ``g = 0`` reproduces the flat one-point kernel.
    ``shared_elapsed_time`` evaluates the second kernel as ``G_g(r1, t; 0, tau)``
    instead of ``G_g(r1, tau; 0, 0)``.
    """
    p, g, t = scn.particle, scn.g, scn.t
    r = _screen(r)
    r1 = np.asarray(r1, dtype=float)
    A, B = _legs(r, r1)
    u1, u2 = np.sqrt(B), np.sqrt(A)
    z, z1 = r[2], r1[..., 2]
    if shared_elapsed_time:
        return _shared_elapsed_point(scn, r, r1, spec, calibrated)

    def h(tau):
        w = chi(t, tau, z, z1, scn.bc, g)
        ph = gravity_phase(z, z1, t - tau, g, p) + gravity_phase(z1, 0.0, tau, g, p)
        return w * np.exp(1j * ph)

    res = pair_time_integral(h, u1, u2, t, 3, p, spec=spec)
    factor = 1.0 if calibrated else 1.0 / calibration_factor(p)
    return QuadResult(res.value * factor, np.abs(factor) * res.error)


def _shared_elapsed_point(scn, r, r1, spec, calibrated):
    """Second kernel read as ``G_g(r1, t; 0, tau)``: elapsed time ``s = t - tau`` on both legs.

    The weight's ``eta1 z1 / tau`` term then has a non-integrable pole at
    ``tau = 0`` where both kernels are regular, so only ``eta1 = 0`` is
    accepted.  The essential singularity at ``s = 0`` is handled by the
    substitution ``1/s = (1 + i v)/t`` with ``v >= 0``, along which the
    kernels decay exponentially.
    """
    from .numerics import integrate_1d

    if scn.bc.eta1 != 0:
        raise DomainError("the shared elapsed-time reading diverges unless eta1 = 0")
    p, g, t = scn.particle, scn.g, scn.t
    A, B = _legs(r, r1)
    z, z1 = r[2], r1[..., 2]
    C = 0.5 * p.mass * (A + B) / p.hbar
    vmax = max(60.0 * t / float(np.min(C)), 1.0)

    def f(v):
        v = v.reshape((-1,) + (1,) * np.ndim(A))
        w = (1 + 1j * v) / t
        sv = 1.0 / w
        tau = t - sv
        wt = chi(t, tau, z, z1, scn.bc, g)
        k1 = kernel_prefactor(sv, 3, p) * np.exp(0.5j * p.mass * A / p.hbar * w)
        k2 = kernel_prefactor(sv, 3, p) * np.exp(0.5j * p.mass * B / p.hbar * w)
        ph = gravity_phase(z, z1, sv, g, p) + gravity_phase(z1, 0.0, sv, g, p)
        # ds = -dw / w^2 and dw = i dv / t; the minus sign flips the limits back
        return wt * k1 * k2 * np.exp(1j * ph) * (1j / t) / w ** 2

    res = integrate_1d(f, 0.0, vmax, spec)
    factor = 1.0 if calibrated else 1.0 / calibration_factor(p)
    return QuadResult(res.value * factor, np.abs(factor) * res.error)


def k_gravity(scn: GravityScenario, r, spec: Optional[QuadratureSpec] = None, *,
              shared_elapsed_time=False, calibrated=True) -> QuadResult:
    """Field slit propagator: aperture integral of :func:`k_gravity_point`."""
    r = _screen(r)
    spec = spec or DEFAULT_SPEC

    def f(x1, y1):
        r1 = np.stack([x1, y1, np.full_like(x1, scn.z1)], axis=-1)
        return k_gravity_point(scn, r, r1, spec, shared_elapsed_time=shared_elapsed_time,
                               calibrated=calibrated).value

    return integrate_2d(f, _aperture_rect(scn), spec,
                        phase_rate=(_rate(scn, r, 0), _rate(scn, r, 1)),
                        phase_scale=_phase_scale(scn, r))


def k_gravity_semiclassical(scn: GravityScenario, r, spec: Optional[QuadratureSpec] = None
                            ) -> QuadResult:
    """Aperture integral of ``A_sc exp(i phi_sc)`` at the field crossing time."""
    r = _screen(r)
    p, g, t = scn.particle, scn.g, scn.t

    def f(x1, y1):
        r1 = np.stack([x1, y1, np.full_like(x1, scn.z1)], axis=-1)
        A, B = _legs(r, r1)
        tau = _tau_newton(A, B, r[2], t, g)
        if np.any((tau <= 0) | (tau >= t)):
            raise GeometryError("crossing time left (0, t)")
        amp = amplitude_sc(r, r1, t, tau, g, scn.bc, p)
        return amp * np.exp(1j * phase_sc(r, r1, t, tau, g, p))

    return integrate_2d(f, _aperture_rect(scn), spec,
                        phase_rate=(_rate(scn, r, 0), _rate(scn, r, 1)),
                        phase_scale=_phase_scale(scn, r))


def flat_equivalent(scn: GravityScenario, r):
    """Field-free slit scenario and screen point ``(y, z)`` equivalent at ``g = 0``.

    The field problem's normal axis ``z`` becomes the flat axis ``x`` (shifted
    so that the aperture sits at 0), field ``x`` becomes flat ``z`` and ``y`` is
    unchanged.
    """
    from .aperture import RectAperture, SlitScenario

    r = _screen(r)
    if not r[2] > scn.z1:
        raise GeometryError("screen point must lie beyond the aperture plane")
    flat = SlitScenario(x0=-scn.z1, x_screen=r[2] - scn.z1, t=scn.t,
                        aperture=RectAperture(half_width_y=scn.b, half_height_z=scn.a),
                        bc=scn.bc, particle=scn.particle)
    return flat, float(r[1]), float(r[0])


@dataclass(frozen=True)
class NeonDiagnostics:
    """Scales of a cold-atom drop through an aperture at depth ``l1``.

    ``wavelength`` is ``2 pi hbar / (m v)`` with ``v = g t1``;
    ``mu = m l1^2 / (2 hbar t1)``; ``mu_wavelength = 2 pi (l1 + l2) / wavelength``.
    """

    mass: float
    g: float
    l1: float
    l2: float
    t1: float
    velocity: float
    wavelength: float
    reduced_wavelength: float
    mu: float
    mu_wavelength: float


NEON_MASS = 3.349e-26
HBAR_SI = 1.054571817e-34


def neon_scenario_diagnostics(l1: float = 0.1, l2: float = 0.0, g: float = 9.81,
                              mass: float = NEON_MASS, hbar: float = HBAR_SI) -> NeonDiagnostics:
    """Crossing time, de Broglie wavelength and ``mu`` for neon atoms dropped from rest."""
    if not (l1 > 0 and l2 >= 0 and g > 0 and mass > 0 and hbar > 0):
        raise DomainError("invalid neon parameters")
    t1 = np.sqrt(2 * l1 / g)
    v = g * t1
    lam = 2 * np.pi * hbar / (mass * v)
    return NeonDiagnostics(
        mass=mass, g=g, l1=l1, l2=l2, t1=float(t1), velocity=float(v),
        wavelength=float(lam), reduced_wavelength=float(hbar / (mass * v)),
        mu=float(mass * l1 ** 2 / (2 * hbar * t1)),
        mu_wavelength=float(2 * np.pi * (l1 + l2) / lam),
    )


GRAVITY_METHODS = ("gravity", "gravity_semiclassical")


def evaluate_gravity_pattern(scn: GravityScenario, z_screen: float, grid, method="gravity",
                             spec: Optional[QuadratureSpec] = None, threads: Optional[int] = None,
                             strict: bool = True):
    """Pattern on the horizontal screen ``z = z_screen``.

    The grid's ``z_values`` hold the in-plane coordinate ``x`` of the screen
    point and ``y_values`` hold ``y``.  Normalization follows
    :func:`slitprop.aperture.evaluate_pattern`.  ``diagnostics`` holds the
    crossing time of the path through the aperture centre to each grid corner.
    """
    from concurrent.futures import ThreadPoolExecutor

    from .aperture import PatternResult, _axis_weights, default_threads
    from .errors import ConvergenceError, NormalizationError

    if method not in GRAVITY_METHODS:
        raise DomainError(f"unknown gravity method {method!r}")
    if not z_screen > scn.z1:
        raise GeometryError("screen must lie below the aperture plane")
    threads = default_threads() if threads is None else max(1, int(threads))
    kern = k_gravity if method == "gravity" else k_gravity_semiclassical
    Y, X = np.meshgrid(grid.y_values, grid.z_values, indexing="ij")
    pts = list(zip(X.ravel(), Y.ravel()))

    def work(xy):
        r = np.array([xy[0], xy[1], z_screen])
        try:
            res = kern(scn, r, spec)
            return complex(res.value), float(res.error), 0
        except ConvergenceError as exc:
            if strict or exc.estimate is None:
                raise
            return complex(exc.estimate), float("inf") if exc.error is None else float(exc.error), 1

    if threads > 1 and len(pts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, pts))
    else:
        parts = [work(xy) for xy in pts]
    amp = np.array([v for v, _, _ in parts]).reshape(X.shape)
    qerr = max(e for _, e, _ in parts)
    bad = sum(n for _, _, n in parts)
    inten = np.abs(amp) ** 2
    omega = float(_axis_weights(grid.y_values, grid.cell_y) @ inten
                  @ _axis_weights(grid.z_values, grid.cell_z))
    if not np.isfinite(omega) or omega <= 0:
        raise NormalizationError("pattern intensity integrates to zero or is not finite")
    r1 = np.array([0.0, 0.0, scn.z1])
    diag = {}
    for yy in {grid.y_values[0], grid.y_values[-1]}:
        for xx in {grid.z_values[0], grid.z_values[-1]}:
            diag[(float(yy), float(xx))] = tau_sc_gravity(
                np.array([xx, yy, z_screen]), r1, scn.t, scn.g)
    meta = {"method": method, "bc": scn.bc.name, "aperture": "GravityScenario",
            "overlapping_aperture": False, "max_quadrature_error": qerr,
            "unconverged_points": bad}
    return PatternResult(grid, amp, inten, omega, inten / omega, 1.0, diag, meta)
