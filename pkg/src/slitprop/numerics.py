"""Special functions and quadrature primitives.

The quadrature routines are vectorised adaptive Gauss-Kronrod schemes that
accept *batched* integrands: the callable receives a 1-D array of nodes and
returns an array whose leading axis matches the nodes and whose trailing axes
form the batch.  All batch members share the same panels, which is what makes
whole screen rows cheap to integrate in numpy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy import special
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "fresnel_c",
    "fresnel_s",
    "erfc_complex",
    "integrate_1d",
    "integrate_2d",
    "real_roots_in_interval",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and limits for the adaptive integrators.

    Parameters
    ----------
    relative_tolerance : float
        Target relative error of each integral.
    absolute_tolerance : float
        Absolute error floor.
    max_subdivisions : int
        Maximum number of panels before a :class:`ConvergenceError`.
    panel_oscillation_budget : float
        Largest phase advance (radians) allowed inside one initial panel when a
        phase-rate hint is supplied.
    """

    relative_tolerance: float = 1e-10
    absolute_tolerance: float = 0.0
    max_subdivisions: int = 4000
    panel_oscillation_budget: float = np.pi

    def __post_init__(self):
        if not self.relative_tolerance > 0:
            raise DomainError("relative_tolerance must be > 0")
        if not self.absolute_tolerance >= 0:
            raise DomainError("absolute_tolerance must be >= 0")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if not self.panel_oscillation_budget > 0:
            raise DomainError("panel_oscillation_budget must be > 0")

    def replace(self, **changes) -> "QuadratureSpec":
        """Return a copy with some fields changed."""
        fields = dict(
            relative_tolerance=self.relative_tolerance,
            absolute_tolerance=self.absolute_tolerance,
            max_subdivisions=self.max_subdivisions,
            panel_oscillation_budget=self.panel_oscillation_budget,
        )
        fields.update(changes)
        return QuadratureSpec(**fields)


DEFAULT_SPEC = QuadratureSpec()


class QuadResult(NamedTuple):
    """Integral estimate and its error bound (unpacks like ``scipy.integrate.quad``)."""

    value: Union[complex, np.ndarray]
    error: Union[float, np.ndarray]


# ---------------------------------------------------------------------------
# special functions


def _require_finite(x, name):
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite")


def fresnel_c(u):
    """Fresnel cosine integral ``C(u) = int_0^u cos(pi w^2 / 2) dw``.

    Accepts scalars or arrays; returns the same shape.
    """
    u = np.asarray(u, dtype=float)
    _require_finite(u, "u")
    out = special.fresnel(u)[1]
    return out[()] if out.ndim == 0 else out


def fresnel_s(u):
    """Fresnel sine integral ``S(u) = int_0^u sin(pi w^2 / 2) dw``."""
    u = np.asarray(u, dtype=float)
    _require_finite(u, "u")
    out = special.fresnel(u)[0]
    return out[()] if out.ndim == 0 else out


def erfc_complex(z):
    """Complementary error function of a complex argument.

    Evaluated through the Faddeeva function ``w(z) = exp(-z^2) erfc(-iz)``, so
    the large factor ``exp(-z^2)`` is applied once at the end instead of being
    formed from differences of large numbers.  The left half plane uses the
    reflection ``erfc(z) = 2 - erfc(-z)``.
    """
    z = np.asarray(z, dtype=complex)
    if not (np.all(np.isfinite(z.real)) and np.all(np.isfinite(z.imag))):
        raise DomainError("z must be finite")
    right = z.real >= 0
    zz = np.where(right, z, -z)
    with np.errstate(over="ignore", invalid="ignore"):
        val = np.exp(-zz * zz) * special.wofz(1j * zz)
    out = np.where(right, val, 2.0 - val)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Gauss-Kronrod 10/21 rule on [-1, 1]

_GK_X = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
    -0.148874338981631210884826001129720, -0.294392862701460198131126603103866,
    -0.433395394129247190799265943165784, -0.562757134668604683339000099272694,
    -0.679409568299024406234327365114874, -0.780817726586416897063717578345042,
    -0.865063366688984510732096688423493, -0.930157491355708226001207180059508,
    -0.973906528517171720077964012084452, -0.995657163025808080735527280689003,
])
_GK_WK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
    0.147739104901338491374841515972068, 0.142775938577060080797094273138717,
    0.134709217311473325928054001771707, 0.123491976262065851077958109831074,
    0.109387158802297641899210590325805, 0.093125454583697605535065465083366,
    0.075039674810919952767043140916190, 0.054755896574351996031381300244580,
    0.032558162307964727478818972459390, 0.011694638867371874278064396062192,
])
# the 10-point Gauss rule lives on the odd Kronrod nodes
_GK_WG = np.zeros(21)
_GK_WG[1::2] = [
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338, 0.295524224714752870173892994651338,
    0.269266719309996355091226921569469, 0.219086362515982043995534934228163,
    0.149451349150580593145776339657697, 0.066671344308688137593568809893332,
]
_EPS = np.finfo(float).eps


def _phase_breakpoints(lo, hi, rate, budget, cap):
    """Split [lo, hi] so that the integrated phase rate per piece is <= budget."""
    if rate is None:
        return np.array([lo, hi])
    xs = np.linspace(lo, hi, 513)
    if callable(rate):
        r = np.abs(np.broadcast_to(np.asarray(rate(xs), dtype=float), xs.shape))
    else:
        r = np.full_like(xs, abs(float(rate)))
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (r[1:] + r[:-1]) * np.diff(xs))))
    total = cum[-1]
    n = int(min(max(np.ceil(total / budget), 1), cap))
    if n == 1:
        return np.array([lo, hi])
    targets = np.linspace(0.0, total, n + 1)
    pts = np.interp(targets, cum, xs)
    pts[0], pts[-1] = lo, hi
    return np.unique(pts)


def _tolerance(values, abs_integral, spec, phase_scale=1.0):
    mag = np.abs(values)
    return np.maximum.reduce([
        np.full_like(mag, spec.absolute_tolerance),
        spec.relative_tolerance * mag,
        50.0 * _EPS * max(1.0, phase_scale) * abs_integral,
        np.full_like(mag, 1e-300),
    ])


def _select(scores, ncap):
    """Indices of the panels carrying the top half of the normalised error."""
    order = np.argsort(scores)[::-1]
    cum = np.cumsum(scores[order])
    k = int(np.searchsorted(cum, 0.5 * cum[-1])) + 1
    return order[: max(1, min(k, ncap))]


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: Optional[QuadratureSpec] = None,
    *,
    phase_rate=None,
    breakpoints: Optional[Sequence[float]] = None,
    phase_scale: float = 1.0,
) -> QuadResult:
    """Adaptive Gauss-Kronrod (10/21) integration of a vectorised integrand.

    Parameters
    ----------
    f : callable
        ``f(x)`` with ``x`` of shape ``(n,)`` returning shape ``(n,)`` or
        ``(n, *batch)``; real or complex.
    a, b : float
        Integration limits, ``a < b``.  Endpoints are never evaluated, so
        integrable endpoint singularities are allowed.
    spec : QuadratureSpec, optional
    phase_rate : callable or float, optional
        Bound on ``|d(phase)/dx|``; the interval is pre-split so that no
        initial panel advances the phase by more than
        ``spec.panel_oscillation_budget``.
    breakpoints : sequence of float, optional
        Extra initial panel boundaries.
    phase_scale : float, optional
        Magnitude of the integrand's phase; see :func:`integrate_2d`.

    Returns
    -------
    QuadResult
        ``(value, error)``; batched integrands give arrays.

    Raises
    ------
    ConvergenceError
        When ``spec.max_subdivisions`` panels do not reach the tolerance.  The
        exception carries the best estimate and its error.
    """
    spec = spec or DEFAULT_SPEC
    a, b = float(a), float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if not a < b:
        raise DomainError("integrate_1d requires a < b")

    edges = _phase_breakpoints(a, b, phase_rate, spec.panel_oscillation_budget,
                               max(1, spec.max_subdivisions // 2))
    if breakpoints is not None:
        extra = [p for p in breakpoints if a < p < b]
        edges = np.unique(np.concatenate([edges, extra]))
    lo, hi = edges[:-1], edges[1:]

    def evaluate(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        x = (mid[:, None] + half[:, None] * _GK_X[None, :]).ravel()
        fx = np.asarray(f(x))
        fx = fx.reshape((lo.size, 21) + fx.shape[1:])
        hb = half.reshape((-1,) + (1,) * (fx.ndim - 2))
        k = hb * np.tensordot(_GK_WK, fx, axes=([0], [1]))
        g = hb * np.tensordot(_GK_WG, fx, axes=([0], [1]))
        absint = hb * np.tensordot(_GK_WK, np.abs(fx), axes=([0], [1]))
        return k, np.abs(k - g), absint

    kv, ev, av = evaluate(lo, hi)
    while True:
        total = kv.sum(axis=0)
        err = ev.sum(axis=0)
        tol = _tolerance(total, av.sum(axis=0), spec, phase_scale)
        ratio = err / tol
        if np.all(ratio <= 1.0):
            break
        if lo.size >= spec.max_subdivisions:
            raise ConvergenceError(
                f"integrate_1d did not converge with {lo.size} panels",
                estimate=_squeeze(total), error=_squeeze(err))
        scores = (ev / tol).reshape(lo.size, -1).max(axis=1)
        idx = _select(scores, max(1, min(256, spec.max_subdivisions - lo.size)))
        keep = np.ones(lo.size, dtype=bool)
        keep[idx] = False
        m = 0.5 * (lo[idx] + hi[idx])
        nlo = np.concatenate([lo[idx], m])
        nhi = np.concatenate([m, hi[idx]])
        nk, ne, na = evaluate(nlo, nhi)
        lo = np.concatenate([lo[keep], nlo])
        hi = np.concatenate([hi[keep], nhi])
        kv = np.concatenate([kv[keep], nk])
        ev = np.concatenate([ev[keep], ne])
        av = np.concatenate([av[keep], na])
    return QuadResult(_squeeze(total), _squeeze(err))


def _squeeze(x):
    x = np.asarray(x)
    return x[()] if x.ndim == 0 else x


def integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    rect,
    spec: Optional[QuadratureSpec] = None,
    *,
    phase_rate=(None, None),
    phase_scale: float = 1.0,
) -> QuadResult:
    """Adaptive tensor-product Gauss-Kronrod integration over a rectangle.

    Parameters
    ----------
    f : callable
        ``f(u, v)`` with equal-shape node arrays ``(n,)``; returns ``(n,)`` or
        ``(n, *batch)``.
    rect : ((a1, b1), (a2, b2))
        Limits of the first and second variable.
    spec : QuadratureSpec, optional
    phase_rate : pair of (callable or float or None)
        Phase-rate bounds along each axis used to pre-split the rectangle.
    phase_scale : float, optional
        Magnitude of the integrand's phase in radians.  Rounding of a phase
        of size ``P`` perturbs the integrand by about ``P * eps``, so the
        error floor relative to the integral of ``|f|`` grows with it.

    Returns
    -------
    QuadResult

    Notes
    -----
    Each panel uses the 21x21 Kronrod product; the error along each axis is
    measured by swapping that axis to the embedded Gauss rule, and panels are
    bisected along the axis with the larger error.
    """
    spec = spec or DEFAULT_SPEC
    (a1, b1), (a2, b2) = [(float(p), float(q)) for p, q in rect]
    if not (a1 < b1 and a2 < b2):
        raise DomainError("integrate_2d requires a1 < b1 and a2 < b2")
    cap = max(1, int(np.sqrt(spec.max_subdivisions)))
    e1 = _phase_breakpoints(a1, b1, phase_rate[0], spec.panel_oscillation_budget, cap)
    e2 = _phase_breakpoints(a2, b2, phase_rate[1], spec.panel_oscillation_budget, cap)
    L1, L2 = np.meshgrid(e1[:-1], e2[:-1], indexing="ij")
    H1, H2 = np.meshgrid(e1[1:], e2[1:], indexing="ij")
    boxes = np.stack([L1.ravel(), H1.ravel(), L2.ravel(), H2.ravel()], axis=1)

    def evaluate(boxes):
        n = boxes.shape[0]
        m1, h1 = 0.5 * (boxes[:, 0] + boxes[:, 1]), 0.5 * (boxes[:, 1] - boxes[:, 0])
        m2, h2 = 0.5 * (boxes[:, 2] + boxes[:, 3]), 0.5 * (boxes[:, 3] - boxes[:, 2])
        u = m1[:, None, None] + h1[:, None, None] * _GK_X[None, :, None]
        v = m2[:, None, None] + h2[:, None, None] * _GK_X[None, None, :]
        u, v = np.broadcast_arrays(u, v)
        fx = np.asarray(f(u.ravel(), v.ravel()))
        fx = fx.reshape((n, 21, 21) + fx.shape[1:])
        jac = (h1 * h2).reshape((-1,) + (1,) * (fx.ndim - 3))
        inner_k = np.einsum("j,nij...->ni...", _GK_WK, fx)
        inner_g = np.einsum("j,nij...->ni...", _GK_WG, fx)
        kk = jac * np.einsum("i,ni...->n...", _GK_WK, inner_k)
        gk = jac * np.einsum("i,ni...->n...", _GK_WG, inner_k)  # Gauss along u
        kg = jac * np.einsum("i,ni...->n...", _GK_WK, inner_g)  # Gauss along v
        absf = np.einsum("i,j,nij...->n...", _GK_WK, _GK_WK, np.abs(fx))
        return kk, np.abs(kk - gk), np.abs(kk - kg), jac * absf

    kv, eu, ew, av = evaluate(boxes)
    while True:
        ev = eu + ew
        total = kv.sum(axis=0)
        err = ev.sum(axis=0)
        tol = _tolerance(total, av.sum(axis=0), spec, phase_scale)
        ratio = err / tol
        if np.all(ratio <= 1.0):
            break
        if boxes.shape[0] >= spec.max_subdivisions:
            raise ConvergenceError(
                f"integrate_2d did not converge with {boxes.shape[0]} panels",
                estimate=_squeeze(total), error=_squeeze(err))
        norm = (ev / tol).reshape(boxes.shape[0], -1)
        scores = norm.max(axis=1)
        idx = _select(scores, max(1, min(128, spec.max_subdivisions - boxes.shape[0])))
        sel = boxes[idx]
        eu_s = (eu[idx] / tol).reshape(idx.size, -1).max(axis=1)
        ew_s = (ew[idx] / tol).reshape(idx.size, -1).max(axis=1)
        along_u = eu_s >= ew_s
        mu = 0.5 * (sel[:, 0] + sel[:, 1])
        mv = 0.5 * (sel[:, 2] + sel[:, 3])
        c1 = sel.copy()
        c2 = sel.copy()
        c1[along_u, 1] = mu[along_u]
        c2[along_u, 0] = mu[along_u]
        c1[~along_u, 3] = mv[~along_u]
        c2[~along_u, 2] = mv[~along_u]
        new = np.concatenate([c1, c2])
        nk, nu, nw, na = evaluate(new)
        keep = np.ones(boxes.shape[0], dtype=bool)
        keep[idx] = False
        boxes = np.concatenate([boxes[keep], new])
        kv = np.concatenate([kv[keep], nk])
        eu = np.concatenate([eu[keep], nu])
        ew = np.concatenate([ew[keep], nw])
        av = np.concatenate([av[keep], na])
    return QuadResult(_squeeze(total), _squeeze(err))


# ---------------------------------------------------------------------------
# polynomial roots


def _isolate(c, lo, hi):
    deg = c.size - 1
    if deg <= 0:
        return []
    if deg == 1:
        r = -c[1] / c[0]
        return [r] if lo < r < hi else []
    crit = _isolate(np.polyder(c), lo, hi)
    pts = [lo] + crit + [hi]
    vals = np.polyval(c, pts)
    scale = np.max(np.abs(c)) * max(1.0, abs(lo), abs(hi)) ** deg
    roots = []
    for i in range(len(pts) - 1):
        p, q = pts[i], pts[i + 1]
        fp, fq = vals[i], vals[i + 1]
        if i > 0 and abs(fp) <= 1e-13 * scale:
            roots.append(p)  # root of even multiplicity sitting on a critical point
            continue
        if fp * fq < 0:
            roots.append(brentq(lambda x: np.polyval(c, x), p, q,
                                xtol=1e-300, rtol=4 * _EPS, maxiter=500))
    return roots


def real_roots_in_interval(coeffs, lo: float, hi: float) -> np.ndarray:
    """All real roots of a polynomial inside the open interval ``(lo, hi)``.

    Roots are isolated recursively: the real roots of the derivative split the
    interval into monotone pieces, each holding at most one simple root, which
    is then bracketed with Brent's method.  Double roots are caught at the
    critical points.

    Parameters
    ----------
    coeffs : array_like
        Coefficients, highest degree first (``numpy.polyval`` convention);
        degree at most 6.
    lo, hi : float
        Interval with ``lo < hi``.

    Returns
    -------
    ndarray
        Sorted roots with coincident roots merged.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    _require_finite(c, "coeffs")
    if not np.any(c != 0):
        raise DomainError("polynomial is identically zero")
    c = np.trim_zeros(c, "f")
    if c.size - 1 > 6:
        raise DomainError("degree must be <= 6")
    if not lo < hi:
        raise DomainError("requires lo < hi")
    roots = np.sort(np.array(_isolate(c, float(lo), float(hi)), dtype=float))
    if roots.size > 1:
        gap = 1e-10 * max(hi - lo, 1e-300)
        keep = np.concatenate(([True], np.diff(roots) > gap))
        roots = roots[keep]
    return roots
