"""Contour integration of products of free kernels over the intermediate time.

Integrals of the form

    I = int_{tau_lo}^{T} h(tau) G0_d(u2; T - tau) G0_d(u1; tau) dtau

have essential singularities at both ends (``exp(i A/tau)`` and
``exp(i B/(T - tau))``).  With ``w = tau/(T - tau) = (u1/u2) e^v`` the total
exponent becomes

    i m (u1 + u2)^2 / (2 hbar T) + i c (cosh v - 1),   c = m u1 u2 / (hbar T),

whose only saddle sits at ``v = 0``.  The v-contour leaves the real axis at
45 degrees through the saddle and bends into the sectors where
``Im(cosh v) > 0``, so the integrand is smooth and decays
double-exponentially at both ends.
"""

from __future__ import annotations

import numpy as np

from .numerics import DEFAULT_SPEC, QuadResult, integrate_1d
from .propagators import NATURAL, Particle

THETA0 = 1.0


def _extent(cmin, theta0=THETA0):
    """Path length beyond which ``exp(-c sinh(s) sin(theta0 tanh s))`` is negligible."""
    x = 0.25
    while cmin * np.sinh(x) * np.sin(theta0 * np.tanh(x)) < 50.0 + 4.0 * x:
        x *= 1.15
        if x > 60:
            break
    return x


def pair_time_integral(h, u1, u2, T, dim: int, particle: Particle = NATURAL, *,
                       lower=None, spec=None, strip_phase=False, theta0=THETA0):
    """Integrate ``h(tau) G0_d(u2; T - tau) G0_d(u1; tau)`` over ``tau``.

    Parameters
    ----------
    h : callable
        Smooth weight; receives complex ``tau`` of shape ``(n, *batch)`` and
        must return something broadcastable to that shape.
    u1, u2 : float or ndarray
        Leg lengths (source to slit point, slit point to observer), > 0.
    T : float or complex
        Total time; complex values with ``-pi/2 < arg T <= 0`` are allowed.
    dim : int
        Spatial dimension of the free kernels (1, 2 or 3).
    lower : float or ndarray, optional
        Real lower limit in ``(0, T)``; default integrates from 0.
    strip_phase : bool
        Return ``I * exp(-i m (u1+u2)^2 / (2 hbar T))`` instead of ``I``.

    Returns
    -------
    QuadResult
    """
    spec = spec or DEFAULT_SPEC
    u1, u2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
    batch = u1.shape
    m, hb = particle.mass, particle.hbar
    T = complex(T)
    ratio = u1 / u2
    c = m * u1 * u2 / (hb * T)
    e_w = 1.0 - 0.5 * dim
    e_1w = dim - 2
    pref = (m / (2 * np.pi * hb)) ** dim * np.exp(-0.5j * np.pi * dim) * T ** (1 - dim)

    def g(v):
        w = ratio * np.exp(v)
        tau = T * w / (1.0 + w)
        kern = ratio ** e_w * np.exp(e_w * v) * (1.0 + w) ** e_1w
        return h(tau) * pref * kern * np.exp(1j * c * (np.cosh(v) - 1.0))

    cmin = float(np.min(np.abs(c))) if c.size else 1.0
    X = _extent(cmin, theta0)

    if lower is None:
        v0 = np.zeros(batch)
        vlo = None
    else:
        if T.imag != 0:
            raise ValueError("a finite lower limit requires real T")
        lo = np.broadcast_to(np.asarray(lower, dtype=float), batch)
        vlo = np.log(lo / (T.real - lo) / ratio)
        v0 = np.maximum(vlo, 0.0)

    def right(s):
        s = s.reshape((-1,) + (1,) * len(batch))
        v = v0 + s + 1j * theta0 * np.tanh(s)
        return g(v) * (1.0 + 1j * theta0 / np.cosh(s) ** 2)

    total = integrate_1d(right, 0.0, X, spec)
    value, err = total.value, total.error

    if vlo is None:
        def left(s):
            s = s.reshape((-1,) + (1,) * len(batch))
            v = -s - 1j * theta0 * np.tanh(s)
            return g(v) * (1.0 + 1j * theta0 / np.cosh(s) ** 2)

        part = integrate_1d(left, 0.0, X, spec)
        value, err = value + part.value, err + part.error
    elif np.any(vlo < 0):
        a = np.minimum(vlo, 0.0)

        def dip(sig):
            sig = sig.reshape((-1,) + (1,) * len(batch))
            x = a * (1.0 - sig)
            th_a, th_b = np.tanh(x - a), np.tanh(-x)
            v = x - 1j * theta0 * th_a * th_b
            dv = 1.0 - 1j * theta0 * ((1 - th_a ** 2) * th_b - th_a * (1 - th_b ** 2))
            return g(v) * dv * (-a)

        part = integrate_1d(dip, 0.0, 1.0, spec)
        value, err = value + part.value, err + part.error

    if not strip_phase:
        value = value * np.exp(0.5j * m * (u1 + u2) ** 2 / (hb * T))
    return QuadResult(value, err)
