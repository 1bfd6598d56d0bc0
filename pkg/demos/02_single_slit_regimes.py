"""Single slit at three times: from far-field fringes to a smooth central peak.

The same slit (half-height 0.01, half-width 0.1, source and screen at unit
distance) is evaluated at t = 0.005, 0.05 and 1 for each boundary condition.
Short times give many fringes; at t = 1 the Dirichlet pattern keeps a narrow
central peak while the Neumann one loses it.
"""

import numpy as np

from slitprop import BoundaryCondition, QuadratureSpec, RectAperture, SlitScenario
from slitprop.analysis import central_half_width
from slitprop.aperture import k_aperture
from slitprop.point_source import diagnostics

from _common import pyplot, save_figure

spec = QuadratureSpec(relative_tolerance=1e-8)
z = np.linspace(-3, 3, 601)
bcs = [BoundaryCondition.free(), BoundaryCondition.dirichlet(), BoundaryCondition.neumann()]
profiles = {}
for t in (0.005, 0.05, 1.0):
    for bc in bcs:
        scn = SlitScenario(-1.0, 1.0, t, RectAperture(0.1, 0.01), bc)
        profiles[t, bc.name] = np.abs(k_aperture(scn, 0.0, z, "exact", spec).value) ** 2
    d = diagnostics(scn.geometry(np.zeros(3), np.array([1.0, 0.0, 0.0])))
    print(f"t = {t:<6} mu = {d.mu:9.1f}   source-distance mu = {d.mu_source:9.1f}")

for bc in bcs:
    w = central_half_width(z, profiles[1.0, bc.name])
    print(f"t = 1, {bc.name:9s} central half-width: {w:.3f}")

plt = pyplot()
if plt is not None:
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
    for ax, t in zip(axes, (0.005, 0.05, 1.0)):
        for bc in bcs:
            ax.plot(z, profiles[t, bc.name] / profiles[t, bc.name].max(), label=bc.name)
        ax.set_title(f"t = {t}")
        ax.set_xlabel("z")
    axes[0].legend()
    print("figure:", save_figure(fig, "single_slit_regimes"))
