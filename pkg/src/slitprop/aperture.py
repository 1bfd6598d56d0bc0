"""Aperture integrals of the one-point propagator and screen-pattern evaluation.

Apertures live in the plane ``x = 0``.  Integrals over the aperture use the
tensor Gauss-Kronrod integrator, batched over many screen points at once; the
initial panelling follows the exact phase gradient of the integrand so that no
panel advances the phase by more than the quadrature budget.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError, DomainError, GeometryError, NormalizationError
from .numerics import DEFAULT_SPEC, QuadratureSpec, QuadResult, integrate_2d
from .point_source import (
    PointSourceGeometry,
    SemiclassicalDiagnostics,
    diagnostics,
    k_point_exact,
    k_point_semiclassical,
)
from .propagators import NATURAL, BoundaryCondition, Particle

__all__ = [
    "RectAperture",
    "DoubleAperture",
    "MaskAperture",
    "SlitScenario",
    "ScreenGrid",
    "PatternResult",
    "k_slit",
    "k_double_slit",
    "k_mask",
    "k_aperture",
    "evaluate_pattern",
    "POINT_METHODS",
]

POINT_METHODS = ("exact", "semiclassical")
CHUNK = 32


def _positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive")


@dataclass(frozen=True)
class RectAperture:
    """Rectangle ``|y1 - center_y| <= half_width_y``, ``|z1 - center_z| <= half_height_z``."""

    half_width_y: float
    half_height_z: float
    center_y: float = 0.0
    center_z: float = 0.0

    def __post_init__(self):
        _positive("half_width_y", self.half_width_y)
        _positive("half_height_z", self.half_height_z)

    @property
    def rects(self):
        return [self]

    @property
    def bounds(self):
        """``((y_lo, y_hi), (z_lo, z_hi))``."""
        b, a = self.half_width_y, self.half_height_z
        return ((self.center_y - b, self.center_y + b), (self.center_z - a, self.center_z + a))

    @property
    def area(self):
        return 4 * self.half_width_y * self.half_height_z

    @property
    def center(self):
        return self.center_y, self.center_z

    overlapping = False


@dataclass(frozen=True)
class DoubleAperture:
    """Two equal rectangles centred at ``z1 = +-center_offset_z``.

    Each has half-height ``half_height_z`` and half-width ``half_width_y``.
    Use :meth:`literal` to build the variant whose centres sit at ``+-a`` with
    half-height ``d``; when the half-height exceeds the centre offset the two
    rectangles overlap and :attr:`overlapping` is set.
    """

    center_offset_z: float
    half_height_z: float
    half_width_y: float

    def __post_init__(self):
        _positive("center_offset_z", self.center_offset_z)
        _positive("half_height_z", self.half_height_z)
        _positive("half_width_y", self.half_width_y)

    @classmethod
    def literal(cls, a, d, b):
        """Centres ``+-a``, half-height ``d``, half-width ``b``."""
        return cls(center_offset_z=a, half_height_z=d, half_width_y=b)

    @property
    def overlapping(self) -> bool:
        return self.half_height_z > self.center_offset_z

    @property
    def rects(self):
        c = self.center_offset_z
        return [RectAperture(self.half_width_y, self.half_height_z, 0.0, -c),
                RectAperture(self.half_width_y, self.half_height_z, 0.0, c)]

    @property
    def bounds(self):
        c, w, b = self.center_offset_z, self.half_height_z, self.half_width_y
        return ((-b, b), (-c - w, c + w))

    @property
    def area(self):
        return sum(r.area for r in self.rects)

    @property
    def center(self):
        return 0.0, 0.0


@dataclass(frozen=True)
class MaskAperture:
    """Arbitrary aperture inside a bounding rectangle.

    Parameters
    ----------
    indicator : callable
        ``indicator(y1, z1) -> bool array``; points where it is true are open.
    bounding_rect : ((y_lo, y_hi), (z_lo, z_hi))
    y_limits : callable, optional
        ``y_limits(z1) -> (lo, hi)`` describing the open set as
        ``lo(z1) <= y1 <= hi(z1)`` for ``z_lo <= z1 <= z_hi``.  When given, the
        integral is taken over this region directly, which avoids the
        discontinuity of the indicator and converges much faster.
    """

    indicator: Callable
    bounding_rect: tuple
    y_limits: Optional[Callable] = None

    def __post_init__(self):
        (yl, yh), (zl, zh) = self.bounding_rect
        if not (yl < yh and zl < zh):
            raise DomainError("bounding_rect must have positive extent")
        if self.open_fraction() <= 0:
            raise DomainError("mask has no open area inside its bounding rectangle")

    def open_fraction(self, n=400):
        """Open share of the bounding rectangle, sampled at ``n x n`` cell midpoints."""
        (yl, yh), (zl, zh) = self.bounding_rect
        s = (np.arange(n) + 0.5) / n
        Y, Z = np.meshgrid(yl + s * (yh - yl), zl + s * (zh - zl), indexing="ij")
        return float(np.mean(np.asarray(self.indicator(Y, Z), dtype=bool)))

    @property
    def bounds(self):
        return self.bounding_rect

    @property
    def area(self):
        (yl, yh), (zl, zh) = self.bounding_rect
        return (yh - yl) * (zh - zl) * self.open_fraction()

    @property
    def center(self):
        (yl, yh), (zl, zh) = self.bounding_rect
        return 0.5 * (yl + yh), 0.5 * (zl + zh)

    overlapping = False


@dataclass(frozen=True)
class SlitScenario:
    """Point source at ``(x0, y0, z0)``, aperture in ``x = 0``, screen at ``x_screen``."""

    x0: float
    x_screen: float
    t: float
    aperture: object
    bc: BoundaryCondition = BoundaryCondition.free()
    particle: Particle = NATURAL
    y0: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        if not self.x0 < 0:
            raise GeometryError("source must satisfy x0 < 0")
        if not self.x_screen > 0:
            raise GeometryError("screen must satisfy x_screen > 0")
        _positive("t", self.t)

    @property
    def source(self):
        return np.array([self.x0, self.y0, self.z0])

    def geometry(self, r1, r) -> PointSourceGeometry:
        return PointSourceGeometry(self.source, r1, r, self.t, self.bc, self.particle)


@dataclass(frozen=True)
class ScreenGrid:
    """Rectangular grid of screen points in the plane ``x = x_screen``.

    ``cell_y`` and ``cell_z`` are the widths assigned to an axis that holds a
    single sample when the normalizer is computed.
    """

    y_values: np.ndarray
    z_values: np.ndarray
    cell_y: float = 1.0
    cell_z: float = 1.0

    def __post_init__(self):
        y = np.atleast_1d(np.asarray(self.y_values, dtype=float))
        z = np.atleast_1d(np.asarray(self.z_values, dtype=float))
        if y.ndim != 1 or z.ndim != 1 or y.size == 0 or z.size == 0:
            raise DomainError("grid axes must be non-empty 1-D arrays")
        for v in (y, z):
            if not np.all(np.isfinite(v)):
                raise DomainError("grid coordinates must be finite")
            if v.size > 1 and not np.all(np.diff(v) > 0):
                raise DomainError("grid coordinates must be strictly increasing")
        object.__setattr__(self, "y_values", y)
        object.__setattr__(self, "z_values", z)

    @property
    def shape(self):
        return self.y_values.size, self.z_values.size


@dataclass
class PatternResult:
    """Amplitudes on a screen grid together with normalization and diagnostics.

    ``probability_density = intensities / omega``; ``captured_fraction`` is the
    window's share of the total intensity after a ``1/z^2`` tail estimate.
    """

    grid: ScreenGrid
    amplitudes: np.ndarray
    intensities: np.ndarray
    omega: float
    probability_density: np.ndarray
    captured_fraction: float
    diagnostics: dict
    metadata: dict = field(default_factory=dict)


def _phase_gradient(scn: SlitScenario, pts, axis):
    """Callable bounding ``|d phase / d(y1 or z1)|`` over a batch of screen points."""
    m, hb, t = scn.particle.mass, scn.particle.hbar, scn.t
    src = scn.source
    cy, cz = scn.aperture.center

    def rate(s):
        s = np.asarray(s, dtype=float)
        r1 = np.zeros(s.shape + (3,))
        r1[..., 1] = s if axis == 0 else cy
        r1[..., 2] = cz if axis == 0 else s
        d_in = r1 - src
        u1 = np.linalg.norm(d_in, axis=-1)
        d_out = pts[None, :, :] - r1[:, None, :]
        u2 = np.linalg.norm(d_out, axis=-1)
        k = 1 + axis
        g = (m / (hb * t)) * (u1[:, None] + u2) * (d_in[:, None, k] / u1[:, None] - d_out[..., k] / u2)
        return np.max(np.abs(g), axis=1)

    return rate


def _phase_scale(scn: SlitScenario, pts):
    """Largest classical phase ``m (u1 + u2)^2 / (2 hbar t)`` through the aperture centre."""
    cy, cz = scn.aperture.center
    c = np.array([0.0, cy, cz])
    u = np.linalg.norm(c - scn.source) + np.linalg.norm(pts - c, axis=-1)
    p = scn.particle
    return float(np.max(p.mass * u * u / (2 * p.hbar * scn.t)))


def _point_kernel(method):
    if method == "exact":
        return k_point_exact
    if method == "semiclassical":
        return k_point_semiclassical
    raise DomainError(f"unknown point method {method!r}; expected one of {POINT_METHODS}")


def _screen_points(scn, y, z):
    y, z = np.broadcast_arrays(np.asarray(y, dtype=float), np.asarray(z, dtype=float))
    pts = np.stack([np.full(y.shape, scn.x_screen), y, z], axis=-1)
    return pts.reshape(-1, 3), y.shape


def _rect_integral(scn, rect: RectAperture, pts, kernel, spec):
    (yl, yh), (zl, zh) = rect.bounds

    def f(y1, z1):
        r1 = np.stack([np.zeros_like(y1), y1, z1], axis=-1)[:, None, :]
        geo = scn.geometry(r1, pts[None, :, :])
        return kernel(geo)

    hints = (_phase_gradient(scn, pts, 0), _phase_gradient(scn, pts, 1))
    return integrate_2d(f, ((yl, yh), (zl, zh)), spec, phase_rate=hints,
                        phase_scale=_phase_scale(scn, pts))


def _mask_integral(scn, mask: MaskAperture, pts, kernel, spec):
    (yl, yh), (zl, zh) = mask.bounding_rect
    hints = (_phase_gradient(scn, pts, 0), _phase_gradient(scn, pts, 1))
    if mask.y_limits is None:
        def f(y1, z1):
            r1 = np.stack([np.zeros_like(y1), y1, z1], axis=-1)[:, None, :]
            vals = kernel(scn.geometry(r1, pts[None, :, :]))
            open_ = np.asarray(mask.indicator(y1, z1), dtype=bool)
            return np.where(open_[:, None], vals, 0.0)

        return integrate_2d(f, ((yl, yh), (zl, zh)), spec, phase_rate=hints,
                            phase_scale=_phase_scale(scn, pts))

    def g(s, z1):
        lo, hi = mask.y_limits(z1)
        lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
        width = np.maximum(hi - lo, 0.0)
        y1 = lo + s * width
        r1 = np.stack([np.zeros_like(y1), y1, z1], axis=-1)[:, None, :]
        return kernel(scn.geometry(r1, pts[None, :, :])) * width[:, None]

    width_rate = hints[0]
    return integrate_2d(g, ((0.0, 1.0), (zl, zh)), spec,
                        phase_rate=(lambda s: width_rate(yl + s * (yh - yl)) * (yh - yl), hints[1]),
                        phase_scale=_phase_scale(scn, pts))


def k_aperture(scn: SlitScenario, y, z, method: str = "exact",
               spec: Optional[QuadratureSpec] = None) -> QuadResult:
    """Slit propagator at screen points ``(y, z)`` for any aperture type.

    ``y`` and ``z`` broadcast; the result has their broadcast shape.
    """
    kernel = _point_kernel(method)
    spec = spec or DEFAULT_SPEC
    pts, shape = _screen_points(scn, y, z)
    ap = scn.aperture
    if isinstance(ap, MaskAperture):
        res = _mask_integral(scn, ap, pts, kernel, spec)
        value, err = np.asarray(res.value), np.asarray(res.error)
    else:
        value = np.zeros(pts.shape[0], dtype=complex)
        err = np.zeros(pts.shape[0])
        for rect in ap.rects:
            res = _rect_integral(scn, rect, pts, kernel, spec)
            value = value + res.value
            err = err + res.error
    value = np.reshape(value, shape)
    err = np.reshape(err, shape)
    return QuadResult(value[()] if value.ndim == 0 else value, err[()] if err.ndim == 0 else err)


def k_slit(scn: SlitScenario, y, z, method="exact", spec=None) -> QuadResult:
    """Propagator through a single rectangular slit."""
    if not isinstance(scn.aperture, RectAperture):
        raise DomainError("k_slit expects a RectAperture")
    return k_aperture(scn, y, z, method, spec)


def k_double_slit(scn: SlitScenario, y, z, method="exact", spec=None) -> QuadResult:
    """Propagator through a double slit; warns when the two rectangles overlap."""
    if not isinstance(scn.aperture, DoubleAperture):
        raise DomainError("k_double_slit expects a DoubleAperture")
    if scn.aperture.overlapping:
        warnings.warn("double-slit rectangles overlap; the overlap is counted twice",
                      RuntimeWarning, stacklevel=2)
    return k_aperture(scn, y, z, method, spec)


def k_mask(scn: SlitScenario, y, z, method="exact", spec=None) -> QuadResult:
    """Propagator through an arbitrary mask aperture."""
    if not isinstance(scn.aperture, MaskAperture):
        raise DomainError("k_mask expects a MaskAperture")
    return k_aperture(scn, y, z, method, spec)


def default_threads() -> int:
    """Thread count from ``SLITPROP_THREADS``, falling back to 1."""
    raw = os.environ.get("SLITPROP_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _axis_weights(v, cell):
    if v.size == 1:
        return np.array([cell])
    w = np.zeros_like(v)
    d = np.diff(v)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def _tail(profile, coords, center):
    """``1/s^2`` extrapolation of the intensity beyond both ends of an axis."""
    if coords.size < 2:
        return 0.0
    lo = profile[0] * abs(coords[0] - center)
    hi = profile[-1] * abs(coords[-1] - center)
    return float(lo + hi)


def _shadow_center(scn):
    """Projection of the aperture centre onto the screen along a line from the source."""
    cy, cz = scn.aperture.center
    scale = (scn.x_screen - scn.x0) / (-scn.x0)
    return scn.y0 + (cy - scn.y0) * scale, scn.z0 + (cz - scn.z0) * scale


def _amplitudes(scn, grid, method, spec, threads, strict=True):
    """Amplitudes, largest quadrature error and the number of unconverged points."""
    if method in POINT_METHODS:
        Y, Z = np.meshgrid(grid.y_values, grid.z_values, indexing="ij")
        ys, zs = Y.ravel(), Z.ravel()
        chunks = [slice(i, i + CHUNK) for i in range(0, ys.size, CHUNK)]

        def work(sl):
            try:
                return k_aperture(scn, ys[sl], zs[sl], method, spec), 0
            except ConvergenceError as exc:
                if strict or exc.estimate is None:
                    raise
                n = ys[sl].size
                est = np.broadcast_to(exc.estimate, (n,))
                err = np.broadcast_to(np.inf if exc.error is None else exc.error, (n,))
                return QuadResult(est, err), n

        if threads > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(work, chunks))
        else:
            parts = [work(sl) for sl in chunks]
        amp = np.concatenate([np.atleast_1d(p.value) for p, _ in parts]).reshape(Y.shape)
        err = np.concatenate([np.atleast_1d(p.error) for p, _ in parts]).reshape(Y.shape)
        return amp, float(np.max(err)), sum(n for _, n in parts)
    from . import approx

    tscn = approx.TruncationScenario.from_slit(scn)
    Y, Z = np.meshgrid(grid.y_values, grid.z_values, indexing="ij")
    if method == "truncation":
        return approx.k_truncation(tscn, Y, Z), 0.0, 0
    if method == "fourth_order":
        return approx.k_fourth_order(tscn, Y, Z), 0.0, 0
    raise DomainError(f"unknown method {method!r}")


def evaluate_pattern(scn: SlitScenario, grid: ScreenGrid, method: str = "exact",
                     spec: Optional[QuadratureSpec] = None, threads: Optional[int] = None,
                     strict: bool = True) -> PatternResult:
    """Amplitude, intensity and normalized density on a screen grid.

    The normalizer is the trapezoidal integral of the intensity over the grid
    window.  Screen points are split into fixed chunks that may be evaluated
    on worker threads; the result does not depend on the thread count.

    With ``strict=False`` a chunk whose quadrature fails keeps the integrator's
    last estimate and is counted in ``metadata["unconverged_points"]``.

    Raises
    ------
    NormalizationError
        If every intensity is zero or the normalizer is not finite.
    """
    threads = default_threads() if threads is None else max(1, int(threads))
    amp, qerr, bad = _amplitudes(scn, grid, method, spec, threads, strict)
    inten = np.abs(amp) ** 2
    wy = _axis_weights(grid.y_values, grid.cell_y)
    wz = _axis_weights(grid.z_values, grid.cell_z)
    omega = float(wy @ inten @ wz)
    if not np.isfinite(omega) or omega <= 0:
        raise NormalizationError("pattern intensity integrates to zero or is not finite")
    yc, zc = _shadow_center(scn)
    tail = _tail(inten.T @ wy, grid.z_values, zc) + _tail(inten @ wz, grid.y_values, yc)
    captured = omega / (omega + tail)

    diag = {}
    cy, cz = scn.aperture.center
    r1 = np.array([0.0, cy, cz])
    for yy in {grid.y_values[0], grid.y_values[-1]}:
        for zz in {grid.z_values[0], grid.z_values[-1]}:
            geo = scn.geometry(r1, np.array([scn.x_screen, yy, zz]))
            diag[(float(yy), float(zz))] = diagnostics(geo)
    meta = {
        "method": method,
        "bc": scn.bc.name,
        "aperture": type(scn.aperture).__name__,
        "overlapping_aperture": bool(getattr(scn.aperture, "overlapping", False)),
        "max_quadrature_error": qerr,
        "unconverged_points": bad,
    }
    return PatternResult(grid, amp, inten, omega, inten / omega, captured, diag, meta)


__all__ += ["default_threads", "SemiclassicalDiagnostics"]
