"""Two slits: fast fringes under the single-slit envelope.

The upper envelope of the double-slit pattern is traced through its peaks and
correlated with the single-slit intensity on the same screen.
"""

import numpy as np

from slitprop import RectAperture, SlitScenario, evaluate_pattern
from slitprop.analysis import envelope, pearson
from slitprop.config import load_preset

from _common import pyplot, save_figure

cfg = load_preset("fig4-disjoint-right-free")
t = cfg.times[0]
double = evaluate_pattern(cfg.slit_scenario(t), cfg.grid, "exact", cfg.spec)
single = evaluate_pattern(SlitScenario(cfg.x0, cfg.x_screen, t, RectAperture(0.1, 0.01), cfg.bc),
                          cfg.grid, "exact", cfg.spec)
z = cfg.grid.z_values
ze, env = envelope(z, double.intensities[0])
r = pearson(env, np.interp(ze, z, single.intensities[0]))
print(f"captured fraction of the double-slit window: {double.captured_fraction:.3f}")
print(f"envelope vs single slit, Pearson r = {r:.5f}")

plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(z, double.intensities[0], lw=0.6, label="double slit")
    ax.plot(ze, env, label="envelope")
    ax.plot(z, single.intensities[0] * env.max() / single.intensities[0].max(), "--", label="single slit (scaled)")
    ax.set_xlabel("z")
    ax.legend()
    print("figure:", save_figure(fig, "double_slit"))
