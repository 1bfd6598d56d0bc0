"""Free and uniform-field Green functions, Gaussian packets and image combinations.

Complex powers of ``m / (2 i pi hbar t)`` use the branch obtained by writing
``1/(2i) = exp(-i pi/2) / 2`` and taking principal roots, so that

    (m / (2 i pi hbar t))**(d/2) = (m / (2 pi hbar t))**(d/2) * exp(-i d pi / 4)

for real ``t > 0``.  The same expression continues analytically to complex
times with ``-pi/2 < arg t <= 0``, which is what the time-contour integrators
rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CausalityError, DomainError, SingularTimeError

__all__ = [
    "Particle",
    "BoundaryCondition",
    "SpacetimePoint",
    "kernel_prefactor",
    "g0_free",
    "g0_free_1d",
    "g_gravity",
    "gravity_phase",
    "green_general",
    "gaussian_packet",
]


@dataclass(frozen=True)
class Particle:
    """Mass and reduced Planck constant; natural units are ``Particle(1, 1)``."""

    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise DomainError("mass must be positive")
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise DomainError("hbar must be positive")


NATURAL = Particle()


@dataclass(frozen=True)
class BoundaryCondition:
    """Image weights ``(lambda1, lambda2)`` of the screen Green function.

    The surface-term weights are ``eta1 = (lambda1 + lambda2)/2`` and
    ``eta2 = (lambda1 - lambda2)/2``.
    """

    lambda1: complex = 1.0
    lambda2: complex = 0.0

    @property
    def eta1(self) -> complex:
        return 0.5 * (self.lambda1 + self.lambda2)

    @property
    def eta2(self) -> complex:
        return 0.5 * (self.lambda1 - self.lambda2)

    @classmethod
    def dirichlet(cls):
        return cls(1.0, -1.0)

    @classmethod
    def neumann(cls):
        return cls(1.0, 1.0)

    @classmethod
    def free(cls):
        return cls(1.0, 0.0)

    @classmethod
    def from_eta(cls, eta1, eta2):
        """Build from surface weights (``lambda1 = eta1 + eta2``, ``lambda2 = eta1 - eta2``)."""
        return cls(eta1 + eta2, eta1 - eta2)

    @classmethod
    def from_name(cls, name: str):
        try:
            return {"dirichlet": cls.dirichlet, "neumann": cls.neumann,
                    "free": cls.free}[name.lower()]()
        except KeyError:
            raise DomainError(f"unknown boundary condition {name!r}") from None

    @property
    def name(self) -> str:
        for label in ("dirichlet", "neumann", "free"):
            ref = BoundaryCondition.from_name(label)
            if self.lambda1 == ref.lambda1 and self.lambda2 == ref.lambda2:
                return label
        return f"general({self.lambda1}, {self.lambda2})"


@dataclass(frozen=True)
class SpacetimePoint:
    r: tuple
    t: float

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.shape != (3,):
            raise DomainError("r must be a 3-vector")
        if not np.isfinite(self.t):
            raise DomainError("t must be finite")
        object.__setattr__(self, "r", tuple(r))


def kernel_prefactor(s, dim: int, p: Particle = NATURAL):
    """``(m / (2 i pi hbar s))**(dim/2)`` on the package branch; ``s`` may be complex."""
    s = np.asarray(s, dtype=complex)
    logpref = 0.5 * dim * (np.log(p.mass / (2 * np.pi * p.hbar)) - np.log(s))
    return np.exp(logpref - 0.25j * np.pi * dim)


def _free_kernel(r2, s, dim, p):
    """Unchecked free kernel for squared distance ``r2`` and time ``s`` (may be complex)."""
    return kernel_prefactor(s, dim, p) * np.exp(0.5j * p.mass * r2 / (p.hbar * s))


def _checked_dt(dt):
    dt = np.asarray(dt, dtype=float)
    if not np.all(np.isfinite(dt)):
        raise DomainError("dt must be finite")
    if np.any(dt == 0):
        raise SingularTimeError("free propagator is singular at dt = 0")
    return dt


def g0_free(dr, dt, p: Particle = NATURAL):
    """Retarded 3-D free propagator ``G0(dr; dt)``; zero for ``dt < 0``.

    ``dr`` has shape ``(..., 3)`` and broadcasts against ``dt``.
    """
    dr = np.asarray(dr, dtype=float)
    dt = _checked_dt(dt)
    r2 = np.sum(dr * dr, axis=-1)
    pos = dt > 0
    safe = np.where(pos, dt, 1.0)
    out = np.where(pos, _free_kernel(r2, safe, 3, p), 0.0)
    return out[()] if out.ndim == 0 else out


def g0_free_1d(dx, dt, p: Particle = NATURAL):
    """Retarded 1-D free propagator; zero for ``dt < 0``."""
    dx = np.asarray(dx, dtype=float)
    dt = _checked_dt(dt)
    pos = dt > 0
    safe = np.where(pos, dt, 1.0)
    out = np.where(pos, _free_kernel(dx * dx, safe, 1, p), 0.0)
    return out[()] if out.ndim == 0 else out


def gravity_phase(z_a, z_b, dt, g, p: Particle = NATURAL):
    """Extra phase ``m/(2 hbar) * (g (z_a + z_b) dt - g^2 dt^3 / 12)`` of the uniform-field kernel."""
    return 0.5 * p.mass / p.hbar * (g * (z_a + z_b) * dt - g * g * dt ** 3 / 12.0)


def g_gravity(rA: SpacetimePoint, rB: SpacetimePoint, p: Particle = NATURAL, g: float = 0.0):
    """Propagator from ``rB`` to ``rA`` in a uniform field of strength ``g``.

    The kernel is the free one times ``exp(i m/(2 hbar) (g (z + z') dt - g^2 dt^3/12))``,
    which solves the Schroedinger equation with potential ``V(z) = -m g z``: the
    force points along ``+z``.  Reversing the sign of ``g`` reverses the
    orientation.
    """
    dt = rA.t - rB.t
    if dt == 0:
        raise SingularTimeError("equal times")
    if dt < 0:
        raise CausalityError("g_gravity requires rA.t > rB.t")
    dr = np.subtract(rA.r, rB.r)
    base = _free_kernel(float(dr @ dr), dt, 3, p)
    return complex(base * np.exp(1j * gravity_phase(rA.r[2], rB.r[2], dt, g, p)))


def green_general(r, t, r1, tau, bc: BoundaryCondition, p: Particle = NATURAL):
    """Image combination ``lambda1 G0(x - x1, ...) + lambda2 G0(x + x1, ...)``.

    ``r`` and ``r1`` broadcast as ``(..., 3)`` arrays.
    """
    t = np.asarray(t, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(t <= tau):
        raise CausalityError("green_general requires t > tau")
    r = np.asarray(r, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    dperp = r[..., 1:] - r1[..., 1:]
    perp2 = np.sum(dperp * dperp, axis=-1)
    s = t - tau
    direct = _free_kernel((r[..., 0] - r1[..., 0]) ** 2 + perp2, s, 3, p)
    image = _free_kernel((r[..., 0] + r1[..., 0]) ** 2 + perp2, s, 3, p)
    out = bc.lambda1 * direct + bc.lambda2 * image
    return out[()] if np.ndim(out) == 0 else out


def gaussian_packet(R, r0, sigma: float, k0=(0.0, 0.0, 0.0)):
    """Normalised Gaussian ``(2 pi sigma^2)^(-3/4) exp(-|R-r0|^2/(4 sigma^2) + i k0.(r0-R))``."""
    if not (np.isfinite(sigma) and sigma > 0):
        raise DomainError("sigma must be positive")
    R = np.asarray(R, dtype=float)
    d = np.asarray(r0, dtype=float) - R
    amp = (2 * np.pi * sigma ** 2) ** -0.75 * np.exp(-np.sum(d * d, axis=-1) / (4 * sigma ** 2))
    out = amp * np.exp(1j * np.sum(np.asarray(k0, dtype=float) * d, axis=-1))
    return out[()] if np.ndim(out) == 0 else out
