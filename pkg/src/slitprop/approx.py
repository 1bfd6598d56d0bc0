"""Paraxial slit propagators and regime diagnostics.

The truncation model lets the particle cross the slit plane at the classical
time ``t_c`` and treats the transverse motion exactly; the transverse Gaussian
integrals then reduce to Fresnel integrals.  The fourth-order model keeps the
next term of the small-angle expansion, which acts as a screen-dependent
shrinking of the slit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, GeometryError
from .numerics import fresnel_c, fresnel_s
from .propagators import NATURAL, BoundaryCondition, Particle

__all__ = [
    "SlitRect",
    "TruncationScenario",
    "RegimeReport",
    "classical_time",
    "fresnel_factor",
    "fresnel_interval",
    "k_truncation",
    "intensity_truncation",
    "probability_truncation",
    "k_fourth_order",
    "shrink_factor",
    "fresnel_number",
    "regime_report",
    "fringe_shift_prediction",
    "fringe_spacing",
    "fresnel_number_prime",
]


@dataclass(frozen=True)
class SlitRect:
    """Rectangle centred at ``(center_y, center_z)`` with half-sizes ``(b, a)``."""

    center_z: float
    center_y: float
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError("slit half-sizes must be positive")


@dataclass(frozen=True)
class TruncationScenario:
    """Source at ``(x0, y0, z0)``, slit plane ``x1``, screen plane ``x``.

    ``slits`` lists the open rectangles; a single centred slit is
    ``[SlitRect(0, 0, a, b)]``.
    """

    x0: float
    x: float
    t: float
    slits: tuple
    x1: float = 0.0
    particle: Particle = NATURAL
    bc: BoundaryCondition = BoundaryCondition.free()
    y0: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        if not self.x0 < self.x1 < self.x:
            raise GeometryError("need x0 < x1 < x")
        if not self.t > 0:
            raise DomainError("t must be positive")
        if len(self.slits) == 0:
            raise DomainError("at least one slit is required")
        object.__setattr__(self, "slits", tuple(self.slits))

    @classmethod
    def single(cls, x0, x, t, a, b, **kw):
        return cls(x0, x, t, (SlitRect(0.0, 0.0, a, b),), **kw)

    @classmethod
    def from_slit(cls, scn):
        """Convert an aperture-module scenario built from rectangles."""
        rects = getattr(scn.aperture, "rects", None)
        if rects is None:
            raise DomainError("paraxial models need rectangular apertures")
        slits = tuple(SlitRect(r.center_z, r.center_y, r.half_height_z, r.half_width_y)
                      for r in rects)
        return cls(scn.x0, scn.x_screen, scn.t, slits, 0.0, scn.particle, scn.bc,
                   scn.y0, scn.z0)

    @property
    def t_c(self):
        return classical_time(self.x0, self.x1, self.x, self.t)

    @property
    def gamma(self):
        """``|x - x0| / |x1 - x0|``, equal to ``t / t_c``."""
        return (self.x - self.x0) / (self.x1 - self.x0)

    @property
    def L(self):
        return self.x - self.x1

    @property
    def wavelength(self):
        """``lambda0^2 / |x - x0|`` with ``lambda0 = sqrt(2 pi hbar t / m)``."""
        p = self.particle
        return 2 * np.pi * p.hbar * self.t / (p.mass * (self.x - self.x0))


def classical_time(x0, x1, x, t):
    """Time ``|x1 - x0| t / |x - x0|`` at which a uniform axial motion crosses ``x1``."""
    if not x0 < x1 < x:
        raise GeometryError("need x0 < x1 < x")
    return abs(x1 - x0) * t / abs(x - x0)


def _scale(t, tc, p):
    return np.sqrt(p.mass * t / (np.pi * p.hbar * tc * (t - tc)))


def fresnel_interval(lo, hi, s):
    """``(C + i S)`` evaluated between ``s*lo`` and ``s*hi``."""
    uh, ul = s * np.asarray(hi, dtype=float), s * np.asarray(lo, dtype=float)
    return (fresnel_c(uh) - fresnel_c(ul)) + 1j * (fresnel_s(uh) - fresnel_s(ul))


def fresnel_factor(z, a, t, t_c, particle: Particle = NATURAL, *, center=0.0, z0=0.0):
    """Fresnel combination for one transverse axis of a slit ``[center - a, center + a]``.

    With ``s = sqrt(m t / (pi hbar t_c (t - t_c)))`` and the straight-line
    crossing point ``zbar = z0 + (t_c/t)(z - z0)`` this is
    ``C[s(hi - zbar)] - C[s(lo - zbar)] + i (S[...] - S[...])``.  For a centred
    slit and ``z0 = 0`` it tends to ``1 + i`` as ``a`` grows.
    """
    if not 0 < t_c < t:
        raise DomainError("need 0 < t_c < t")
    if not a > 0:
        raise DomainError("a must be positive")
    zbar = z0 + (t_c / t) * (np.asarray(z, dtype=float) - z0)
    s = _scale(t, t_c, particle)
    return fresnel_interval(center - a - zbar, center + a - zbar, s)


def _out(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def _prefactor(scn, y, z):
    p = scn.particle
    r2 = (scn.x - scn.x0) ** 2 + (y - scn.y0) ** 2 + (z - scn.z0) ** 2
    return (2j * np.pi * p.hbar * scn.t / p.mass) ** -1.5 * np.exp(
        0.5j * p.mass * r2 / (p.hbar * scn.t)) / 2j


def _fresnel_sum(scn, y, z, shrink=None):
    t, tc, p = scn.t, scn.t_c, scn.particle
    total = 0.0
    for s in scn.slits:
        if shrink is None:
            lo_z, hi_z = s.center_z - s.a, s.center_z + s.a
        else:
            lo_z, hi_z = (s.center_z - s.a) * shrink, (s.center_z + s.a) * shrink
        zbar = scn.z0 + (tc / t) * (z - scn.z0)
        fz = fresnel_interval(lo_z - zbar, hi_z - zbar, _scale(t, tc, p))
        fy = fresnel_factor(y, s.b, t, tc, p, center=s.center_y, z0=scn.y0)
        total = total + fz * fy
    return total


def k_truncation(scn: TruncationScenario, y, z):
    """Truncation propagator summed over all slits.

    ``K = exp(i m |r - r0|^2 / (2 hbar t)) (2 i pi hbar t / m)^(-3/2) sum_j F_z F_y / (2 i)``.
    """
    y, z = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(z, dtype=float))
    return _out(_prefactor(scn, y, z) * _fresnel_sum(scn, y, z))


def intensity_truncation(scn: TruncationScenario, y, z):
    """``|K|^2`` of the truncation propagator."""
    return _out(np.abs(k_truncation(scn, y, z)) ** 2)


def probability_truncation(scn: TruncationScenario, y, z):
    """Screen density normalized to one over the infinite screen.

    Free propagation from the slit plane to the screen is unitary, so the
    total screen intensity equals the slit-plane intensity; this gives
    ``|sum_j F_z F_y|^2 / (16 gamma^2 sum_j a_j b_j)`` for disjoint slits.
    """
    y, z = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(z, dtype=float))
    area = sum(s.a * s.b for s in scn.slits)
    return _out(np.abs(_fresnel_sum(scn, y, z)) ** 2 / (16 * scn.gamma ** 2 * area))


def shrink_factor(scn: TruncationScenario, z):
    """Slit-coordinate scaling ``1 - z^2 t_c / (2 x^2 t)`` of the fourth-order model."""
    z = np.asarray(z, dtype=float)
    return 1.0 - z ** 2 * scn.t_c / (2 * (scn.x - scn.x1) ** 2 * scn.t)


def _sigma_tc(scn):
    p, t, tc = scn.particle, scn.t, scn.t_c
    lam0_sq = 2 * np.pi * p.hbar * t / p.mass
    c = p.mass / (2 * np.pi * p.hbar)
    rho = scn.x - scn.x0
    return lam0_sq / rho * (-c * (scn.x0 - scn.x1) * scn.bc.eta1 / tc
                            + c * (scn.x - scn.x1) * scn.bc.eta2 / (t - tc))


def k_fourth_order(scn: TruncationScenario, y, z, *, bc_weighted_prefactor=False):
    """Truncation propagator with the fourth-order small-angle correction.

    The slit limits along ``z`` are scaled by :func:`shrink_factor`, which is 1
    at ``z = 0`` so the model coincides with :func:`k_truncation` there.  With
    ``bc_weighted_prefactor`` the amplitude is additionally multiplied by the
    boundary-condition weight ``sigma(t, t_c)`` and the phase uses
    ``x^2 + y^2 + z^2``; neither changes the intensity shape.
    """
    y, z = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(z, dtype=float))
    f = _fresnel_sum(scn, y, z, shrink=shrink_factor(scn, z))
    if bc_weighted_prefactor:
        p = scn.particle
        pre = _sigma_tc(scn) * (2j * np.pi * p.hbar * scn.t / p.mass) ** -1.5 * np.exp(
            0.5j * p.mass * (scn.x ** 2 + y ** 2 + z ** 2) / (p.hbar * scn.t)) / 2j
    else:
        pre = _prefactor(scn, y, z)
    return _out(pre * f)


def fresnel_number(a, wavelength, L):
    """``2 a^2 / (lambda L)``."""
    return 2 * a * a / (wavelength * L)


def fresnel_number_prime(scn: TruncationScenario, z, slit=0, *, exact=False):
    """Fresnel number of the shrunken slit seen from screen height ``z``.

    The default is the first-order form ``N_F (1 - z^2 / (gamma L^2))``; with
    ``exact`` the square of :func:`shrink_factor` is used instead.
    """
    nf = fresnel_number(scn.slits[slit].a, scn.wavelength, scn.L)
    z = np.asarray(z, dtype=float)
    if exact:
        return _out(nf * shrink_factor(scn, z) ** 2)
    return _out(nf * (1 - z * z / (scn.gamma * scn.L ** 2)))


def fringe_spacing(scn: TruncationScenario, slit=0):
    """Far-field minima spacing ``lambda L / (2 a)`` along ``z``."""
    return scn.wavelength * scn.L / (2 * scn.slits[slit].a)


def fringe_shift_prediction(z, gamma, L):
    """Relative fringe-spacing change ``z^2 / (2 gamma L^2)``."""
    if not (gamma > 0 and L > 0):
        raise DomainError("gamma and L must be positive")
    z = np.asarray(z, dtype=float)
    return _out(z * z / (2 * gamma * L * L))


@dataclass(frozen=True)
class RegimeReport:
    """Dimensionless numbers that place a slit configuration in a diffraction regime.

    ``N_F_a``/``N_F_b`` use ``L = |x - x1|``; the ``*_source`` variants use the
    full source-to-screen distance.  ``rho_zoom_inv = (a/L) sqrt(8 gamma /
    gamma_prime)`` and ``q = kappa^2 / rho_zoom_inv``.
    """

    N_F_a: float
    N_F_b: float
    N_F_a_source: float
    N_F_b_source: float
    gamma: float
    gamma_prime: float
    kappa: float
    rho_zoom_inv: float
    q: float
    mu: float
    mu_source: float
    wavelength: float
    fringe_spacing: float
    t_c: float
    regime: str
    shift_at_window: Optional[float] = None
    thresholds: tuple = field(default=(0.1, 10.0))


def regime_report(scn: TruncationScenario, z_window=None, thresholds=(0.1, 10.0),
                  slit: int = 0) -> RegimeReport:
    """Fresnel numbers, coherence number ``q``, ``mu`` and the regime label.

    The label is ``fraunhofer`` when ``N_F_a < thresholds[0]``, ``fresnel``
    when it exceeds ``thresholds[1]`` and ``intermediate`` otherwise.  When a
    window half-width is given, the predicted fringe shift at its edge is
    included.
    """
    lo, hi = thresholds
    if not 0 < lo < hi:
        raise DomainError("thresholds must satisfy 0 < low < high")
    s = scn.slits[slit]
    p = scn.particle
    lam = scn.wavelength
    L = scn.L
    D = scn.x - scn.x0
    lam0 = np.sqrt(2 * np.pi * p.hbar * scn.t / p.mass)
    gamma = scn.gamma
    gamma_p = D / L
    kappa = lam0 / D
    rho = (s.a / L) * np.sqrt(8 * gamma / gamma_p)
    nfa = fresnel_number(s.a, lam, L)
    regime = "fraunhofer" if nfa < lo else ("fresnel" if nfa > hi else "intermediate")
    shift = None
    if z_window is not None:
        shift = float(fringe_shift_prediction(z_window, gamma, L))
    return RegimeReport(
        N_F_a=float(nfa),
        N_F_b=float(fresnel_number(s.b, lam, L)),
        N_F_a_source=float(fresnel_number(s.a, lam, D)),
        N_F_b_source=float(fresnel_number(s.b, lam, D)),
        gamma=float(gamma),
        gamma_prime=float(gamma_p),
        kappa=float(kappa),
        rho_zoom_inv=float(rho),
        q=float(kappa ** 2 / rho),
        mu=float(p.mass * L ** 2 / (p.hbar * scn.t)),
        mu_source=float(p.mass * D ** 2 / (p.hbar * scn.t)),
        wavelength=float(lam),
        fringe_spacing=float(lam * L / (2 * s.a)),
        t_c=float(scn.t_c),
        regime=regime,
        shift_at_window=shift,
        thresholds=(lo, hi),
    )
