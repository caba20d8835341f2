"""
A finite-volume cross-check
===========================

Solving Lap v = -1 on a polar grid is a second independent route. The window
ends sit between grid nodes in general, which makes the scheme first order.
"""

# %%
import math

from narrow_escape.grid import compare_methods, solve_grid
from narrow_escape.series import compute_series, eval_v

eps = 0.2
grid = solve_grid(eps, 128, 512)
rep = compare_methods(eps, grid, compute_series(eps, 512))
print(f"max relative difference to the series outside the layer: {rep.max_rel_diff:.2e}")
print(f"maximum at node {grid.argmax()} (the antipode is ({grid.n_r}, 0))")
print(f"window flux: conservative {grid.window_flux:.6f}, one-sided {grid.window_flux_one_sided:.4f}")

# %%
# Convergence with the window ends placed exactly on nodes.
eps = 12 * 2 * math.pi / 256
ref = float(eval_v(compute_series(eps, 4096), 0.0, 0.0))
prev = None
for n in (32, 64, 128, 256):
    err = solve_grid(eps, n, 4 * n).center - ref
    ratio = "" if prev is None else f"  ratio {prev / err:.2f}"
    print(f"{n:4d} x {4 * n:<5d} centre error {err:+.5f}{ratio}")
    prev = err

# %%
# With the whole rim absorbing the answer is (1 - r^2)/4 exactly.
print()
print(f"eps = pi: centre value {solve_grid(math.pi, 64, 256).center:.12f}")
