"""Fringe extraction from sampled intensity profiles."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, InsufficientFringesError

__all__ = [
    "FringeSet",
    "ShiftReport",
    "find_minima",
    "find_maxima",
    "compare_fringes",
    "envelope",
    "pearson",
    "central_half_width",
]

DEPTH = 0.8


@dataclass
class FringeSet:
    """Intensity minima of a profile, their spacings and the maxima between them."""

    minima_z: np.ndarray
    spacings: np.ndarray
    peak_amplitudes: np.ndarray
    shifts_vs_reference: np.ndarray = field(default_factory=lambda: np.empty(0))


@dataclass
class ShiftReport:
    """Per-fringe relative shifts of a test pattern against a reference."""

    delta: np.ndarray
    mode: str
    n_pairs: int
    test_positions: np.ndarray
    reference_positions: np.ndarray
    truncated: bool = False


def _prepare(z, intensity, window):
    z = np.asarray(z, dtype=float)
    y = np.asarray(intensity, dtype=float)
    if z.shape != y.shape or z.ndim != 1:
        raise DomainError("z and intensity must be 1-D arrays of equal length")
    if z.size < 5:
        raise DomainError("at least 5 samples are required")
    if not np.all(np.diff(z) > 0):
        raise DomainError("z must be strictly increasing")
    if window is not None:
        lo, hi = window
        keep = (z >= lo) & (z <= hi)
        z, y = z[keep], y[keep]
        if z.size < 5:
            raise DomainError("window keeps fewer than 5 samples")
    return z, y


def _vertex(z, y, i):
    """Abscissa and value of the parabola through samples ``i-1, i, i+1``."""
    zs, ys = z[i - 1:i + 2], y[i - 1:i + 2]
    c2, c1, c0 = np.polyfit(zs - zs[1], ys, 2)
    if c2 == 0:
        return z[i], y[i]
    dz = -c1 / (2 * c2)
    dz = float(np.clip(dz, zs[0] - zs[1], zs[2] - zs[1]))
    return zs[1] + dz, c0 + c1 * dz + c2 * dz * dz


def _local_extrema(y, sign):
    """Indices of discrete minima of ``sign * y``."""
    s = sign * y
    inner = np.arange(1, y.size - 1)
    return inner[(s[inner] <= s[inner - 1]) & (s[inner] < s[inner + 1])]


def find_minima(z, intensity, window=None, expected_spacing=None, depth=DEPTH) -> FringeSet:
    """Locate intensity minima with sub-sample accuracy.

    A discrete local minimum counts only when it lies below ``depth`` times the
    highest sample on each side up to the neighbouring candidate minimum.  The
    position is refined by a parabola through three samples.

    Parameters
    ----------
    z, intensity : array_like
        Samples of the profile, ``z`` increasing.
    window : (float, float), optional
        Only samples inside this closed interval are used.
    expected_spacing : float, optional
        Expected fringe spacing; the sampling must resolve it with at least
        8 points per fringe.

    Raises
    ------
    InsufficientFringesError
        If fewer than two minima are found.
    """
    z, y = _prepare(z, intensity, window)
    if expected_spacing is not None:
        if not expected_spacing > 0:
            raise DomainError("expected_spacing must be positive")
        if np.max(np.diff(z)) > expected_spacing / 8:
            raise DomainError("profile has fewer than 8 samples per expected fringe")
    cand = _local_extrema(y, +1)
    bounds = np.concatenate(([0], cand, [y.size - 1]))
    kept = []
    for k, i in enumerate(cand):
        left = y[bounds[k]:i + 1].max()
        right = y[i:bounds[k + 2] + 1].max()
        if y[i] < depth * left and y[i] < depth * right:
            kept.append(i)
    if len(kept) < 2:
        raise InsufficientFringesError(f"found {len(kept)} minima, need at least 2")
    mins = np.array([_vertex(z, y, i)[0] for i in kept])
    peaks = np.array([y[a:b + 1].max() for a, b in zip(kept[:-1], kept[1:])])
    return FringeSet(mins, np.diff(mins), peaks)


def find_maxima(z, intensity, window=None):
    """Positions and values of discrete local maxima, refined parabolically."""
    z, y = _prepare(z, intensity, window)
    idx = _local_extrema(y, -1)
    if idx.size == 0:
        return np.empty(0), np.empty(0)
    pts = np.array([_vertex(z, y, i) for i in idx])
    return pts[:, 0], pts[:, 1]


def compare_fringes(test: FringeSet, reference: FringeSet, mode: str = "cumulative",
                    origin: float = 0.0) -> ShiftReport:
    """Relative fringe shifts of ``test`` against ``reference``, paired by index.

    ``mode="successive"`` compares spacings, ``delta_n = (dz'_n - dz_n)/dz_n``.
    ``mode="cumulative"`` compares positions measured from ``origin``,
    ``delta_n = (z'_n - origin)/(z_n - origin) - 1``, which equals the relative
    change of the mean spacing over the first ``n`` fringes.
    """
    if mode == "successive":
        a, b = np.asarray(test.spacings), np.asarray(reference.spacings)
    elif mode == "cumulative":
        a = np.asarray(test.minima_z) - origin
        b = np.asarray(reference.minima_z) - origin
    else:
        raise DomainError(f"unknown mode {mode!r}")
    if a.size == 0 or b.size == 0:
        raise InsufficientFringesError("fringe sets are empty")
    n = min(a.size, b.size)
    truncated = a.size != b.size
    if truncated:
        warnings.warn(f"fringe sets differ in length; comparing the first {n}",
                      RuntimeWarning, stacklevel=2)
    if np.any(b[:n] == 0):
        raise DomainError("reference contains a zero spacing or a minimum at the origin")
    delta = (a[:n] - b[:n]) / b[:n]
    return ShiftReport(delta, mode, n, a[:n], b[:n], truncated)


def envelope(z, intensity, window=None):
    """Upper envelope through the local maxima, sampled on ``z`` between the outer peaks.

    Returns
    -------
    (z_env, env) : tuple of ndarray

    Raises
    ------
    InsufficientFringesError
        If fewer than three peaks are present.
    """
    zz, yy = _prepare(z, intensity, window)
    pz, pv = find_maxima(zz, yy)
    if pz.size < 3:
        raise InsufficientFringesError(f"found {pz.size} peaks, need at least 3")
    order = np.argsort(pz)
    pz, pv = pz[order], pv[order]
    keep = np.concatenate(([True], np.diff(pz) > 0))
    interp = PchipInterpolator(pz[keep], pv[keep], extrapolate=False)
    inside = (zz >= pz[0]) & (zz <= pz[-1])
    return zz[inside], interp(zz[inside])


def pearson(a, b) -> float:
    """Pearson correlation coefficient of two equal-length samples."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape or a.size < 2:
        raise DomainError("need two equal-length samples of size >= 2")
    return float(np.corrcoef(a, b)[0, 1])


def central_half_width(z, intensity, center=0.0):
    """Smallest ``|z - center| > 0`` where the profile falls to half its central value.

    The central value is linearly interpolated at ``center``; the crossing is
    linearly interpolated between samples.  Returns ``inf`` when the profile
    never drops to half within the samples.
    """
    z, y = np.asarray(z, dtype=float), np.asarray(intensity, dtype=float)
    if not z[0] <= center <= z[-1]:
        raise DomainError("center must lie inside the sampled range")
    half = 0.5 * np.interp(center, z, y)
    best = np.inf
    for side in (1, -1):
        sel = (side * (z - center)) > 0
        d = np.abs(z[sel] - center)
        v = y[sel]
        order = np.argsort(d)
        d, v = np.concatenate(([0.0], d[order])), np.concatenate(([2 * half], v[order]))
        below = np.nonzero(v <= half)[0]
        if below.size:
            j = below[0]
            d0, d1, v0, v1 = d[j - 1], d[j], v[j - 1], v[j]
            cross = d1 if v1 == v0 else d0 + (v0 - half) * (d1 - d0) / (v0 - v1)
            best = min(best, cross)
    return float(best)
