"""Diffraction in time behind a one-dimensional shutter.

A shutter at ``x1 = 0`` opens at time ``t1``.  A particle released at
``X = x0 < 0`` at time 0 is observed at ``x > 0`` at time ``t``.  The absorbing
kernel has a closed form in terms of the complementary error function, and
image combinations of it give arbitrary boundary conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._timepath import pair_time_integral
from .errors import DomainError
from .numerics import QuadResult, erfc_complex, integrate_1d
from .propagators import NATURAL, BoundaryCondition, Particle, g0_free_1d

__all__ = [
    "ShutterProblem1D",
    "k0_absorbing_closed",
    "k0_absorbing_integral",
    "k_general_bc",
    "psi_gaussian_1d",
]


@dataclass(frozen=True)
class ShutterProblem1D:
    """Source ``x0 < 0``, observer ``x > 0``, times ``0 <= t1 < t``."""

    x0: float
    x: float
    t: float
    t1: float = 0.0
    bc: BoundaryCondition = BoundaryCondition.free()
    particle: Particle = NATURAL

    def __post_init__(self):
        vals = (self.x0, self.x, self.t, self.t1)
        if not all(np.isfinite(v) for v in vals):
            raise DomainError("shutter parameters must be finite")
        if not self.x0 < 0 < self.x:
            raise DomainError("need x0 < 0 < x")
        if not 0 <= self.t1 < self.t:
            raise DomainError("need 0 <= t1 < t")


def _k0(X, x, t, t1, p: Particle):
    """Absorbing kernel for a source at ``X`` of either sign."""
    g0 = g0_free_1d(x - X, t, p)
    if t1 == 0:
        if X == 0:
            return 0.5 * g0
        return g0 if X < 0 else 0.0 * g0
    root = np.sqrt(p.mass * t / (2j * p.hbar * t1 * (t - t1)))
    w = (x * t1 / t + X * (t - t1) / t) * root
    return g0 * 0.5 * erfc_complex(w)


def k0_absorbing_closed(p: ShutterProblem1D) -> complex:
    """Closed-form absorbing kernel ``G0(x - x0; t) erfc(w) / 2``.

    ``w = (x t1/t + x0 (t - t1)/t) * sqrt(m t / (2 i hbar t1 (t - t1)))`` with
    the principal square root.  At ``t1 = 0`` the limit ``erfc -> 2`` applies
    and the kernel is the free one.
    """
    return complex(_k0(p.x0, p.x, p.t, p.t1, p.particle))


def k0_absorbing_integral(p: ShutterProblem1D, spec=None, *, source=None) -> QuadResult:
    """Time integral of the shutter surface term, evaluated numerically.

    The intermediate time runs over ``(t1, t)``; the integrand's essential
    singularities at the end points are avoided by a complex contour in the
    variable ``log(tau/(t - tau))``.  ``source`` overrides ``p.x0`` and may have
    either sign (used for image sources).
    """
    X = p.x0 if source is None else float(source)
    x, t, m = p.x, p.t, p.particle

    def weight(tau):
        return 0.5 * (-X / tau + x / (t - tau))

    lower = None if p.t1 == 0 else p.t1
    res = pair_time_integral(weight, abs(X), x, t, 1, m, lower=lower, spec=spec)
    return QuadResult(complex(res.value), float(res.error))


def k_general_bc(p: ShutterProblem1D) -> complex:
    """Shutter kernel for the boundary condition in ``p.bc``.

    Built from the absorbing kernel and its mirror image,
    ``lambda1 K0(x0) - lambda2 K0(-x0)``.
    """
    bc = p.bc
    direct = _k0(p.x0, p.x, p.t, p.t1, p.particle)
    image = _k0(-p.x0, p.x, p.t, p.t1, p.particle)
    return complex(bc.lambda1 * direct - bc.lambda2 * image)


def psi_gaussian_1d(p: ShutterProblem1D, sigma: float, spec=None) -> QuadResult:
    """Shutter wave function for a Gaussian packet of width ``sigma`` centred at ``x0``.

    The absorbing kernel is integrated against
    ``exp(-(X - x0)^2 / (4 sigma^2)) / (2 pi sigma^2)^(1/4)`` over
    ``X`` in ``[x0 - 8 sigma, min(x0 + 8 sigma, 0)]``.
    """
    if not (np.isfinite(sigma) and sigma > 0):
        raise DomainError("sigma must be positive")
    lo, hi = p.x0 - 8 * sigma, min(p.x0 + 8 * sigma, 0.0)
    part = p.particle
    norm = (2 * np.pi * sigma ** 2) ** -0.25

    def f(X):
        vals = np.array([_k0(Xi, p.x, p.t, p.t1, part) for Xi in X])
        return vals * norm * np.exp(-(X - p.x0) ** 2 / (4 * sigma ** 2))

    def rate(X):
        return part.mass * np.abs(p.x - X) / (part.hbar * p.t)

    res = integrate_1d(f, lo, hi, spec, phase_rate=rate)
    return QuadResult(complex(res.value), float(res.error))

