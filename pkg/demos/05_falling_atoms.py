"""Neon atoms dropped from rest through a slit 10 cm below the source.

Prints the drop diagnostics and the semiclassical crossing time, then shows
that switching the field off reproduces the flat-space slit kernel.
"""

import numpy as np

from slitprop import BoundaryCondition, RectAperture, SlitScenario, k_slit
from slitprop.gravity import GravityScenario, k_gravity, neon_scenario_diagnostics, tau_sc_gravity

d = neon_scenario_diagnostics(l1=0.1, l2=0.1)
print(f"speed at the slit      {d.velocity:.3f} m/s")
print(f"de Broglie wavelength  {d.wavelength:.3e} m")
print(f"time to the slit       {d.t1:.4f} s")
print(f"semiclassical mu       {d.mu:.3e}")

r, r1 = np.array([0.0, 0.0, 0.2]), np.array([0.0, 0.0, 0.1])
t_total = np.sqrt(2 * 0.2 / 9.81)
print(f"crossing time on the axis: {tau_sc_gravity(r, r1, t_total, 9.81).tau:.5f} s")

scn = GravityScenario(z1=1.0, a=0.01, b=0.1, t=0.5, g=0.0, bc=BoundaryCondition.neumann())
flat = SlitScenario(-1.0, 1.0, 0.5, RectAperture(0.1, 0.01), BoundaryCondition.neumann())
a, b = k_gravity(scn, np.array([0.3, 0.05, 2.0])).value, k_slit(flat, 0.05, 0.3).value
print(f"g = 0 kernel {a:.10f}")
print(f"flat kernel  {b:.10f}")
