"""A shutter at x = 0 opens at t1; watch the transient behind it.

The absorbing-shutter kernel is compared with free flight along the screen.
On the lit side the ratio oscillates and overshoots 1; past the classical
edge it decays towards zero.  At the edge itself the ratio is exactly 1/2.
"""

import numpy as np

from slitprop.dit1d import ShutterProblem1D, k0_absorbing_closed, k0_absorbing_integral
from slitprop.propagators import g0_free_1d

from _common import pyplot, save_figure

x0, t, t1 = -1.0, 1.0, 0.1
edge = -x0 * (t - t1) / t1
xs = np.linspace(0.05, 2 * edge, 400)
ratio = np.array([abs(k0_absorbing_closed(ShutterProblem1D(x0, x, t, t1))) / abs(g0_free_1d(x - x0, t))
                  for x in xs])

print(f"classical edge at x = {edge:.2f}")
print(f"largest overshoot on the lit side: {ratio[xs < edge].max():.3f}")
print(f"largest ratio in the shadow:       {ratio[xs > edge].max():.3f}")

p = ShutterProblem1D(x0, 1.0, t, 0.3)
closed, integral = k0_absorbing_closed(p), k0_absorbing_integral(p)
print(f"closed form {closed:.12f}")
print(f"time integral {integral.value:.12f}  (error estimate {integral.error:.1e})")

plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(xs, ratio)
    ax.axvline(edge, ls=":", c="k")
    ax.set_xlabel("x")
    ax.set_ylabel("|K| / |G0|")
    print("figure:", save_figure(fig, "shutter_transient"))
