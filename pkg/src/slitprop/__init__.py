"""Quantum slit diffraction in space and time.

Exact point-source propagators for general boundary conditions on the slit
screen, their semiclassical limit, the paraxial truncation model with its
fourth-order correction, a uniform-field variant and fringe analysis tools.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConvergenceError,
    DegenerateStationaryPointError,
    DomainError,
    GeometryError,
    InsufficientFringesError,
    NormalizationError,
    SlitpropError,
)
from .numerics import DEFAULT_SPEC, QuadratureSpec, QuadResult  # noqa: E402
from .propagators import NATURAL, BoundaryCondition, Particle  # noqa: E402
from .point_source import PointSourceGeometry, k_point_exact, k_point_semiclassical  # noqa: E402
from .aperture import (  # noqa: E402
    DoubleAperture,
    MaskAperture,
    RectAperture,
    ScreenGrid,
    SlitScenario,
    evaluate_pattern,
    k_double_slit,
    k_slit,
)
from .approx import TruncationScenario, k_fourth_order, k_truncation, regime_report  # noqa: E402
from .gravity import GravityScenario, k_gravity, k_gravity_semiclassical  # noqa: E402

__all__ = [
    "__version__",
    "SlitpropError", "DomainError", "GeometryError", "DegenerateStationaryPointError",
    "ConvergenceError", "NormalizationError", "InsufficientFringesError", "ConfigError",
    "QuadratureSpec", "QuadResult", "DEFAULT_SPEC",
    "Particle", "NATURAL", "BoundaryCondition",
    "PointSourceGeometry", "k_point_exact", "k_point_semiclassical",
    "RectAperture", "DoubleAperture", "MaskAperture", "SlitScenario", "ScreenGrid",
    "evaluate_pattern", "k_slit", "k_double_slit",
    "TruncationScenario", "k_truncation", "k_fourth_order", "regime_report",
    "GravityScenario", "k_gravity", "k_gravity_semiclassical",
]
