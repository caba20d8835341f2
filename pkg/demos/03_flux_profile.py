"""
Where on the window do particles leave?
=======================================

The outward flux across the window is not flat: it is singular at the two
ends, so particles prefer to escape near the edges.
"""

# %%
import math

import numpy as np

from narrow_escape import asymptotics as asy
from narrow_escape.exact import flux_closed_form
from narrow_escape.series import compute_series, flux_series
from narrow_escape.validation import flux_conservation

eps = 0.05
sol = compute_series(eps, 4096)
print(f"{'alpha':>7} {'expansion':>11} {'closed form':>12} {'series N=4096':>14}")
for alpha in (0.0, 0.25, 0.5, 0.75, 0.9, 0.99):
    theta = math.pi - alpha * eps
    print(
        f"{alpha:7.2f} {asy.flux_asymptotic(alpha, eps):11.4f}"
        f" {flux_closed_form(theta, eps):12.4f} {float(flux_series(sol, theta)):14.4f}"
    )

# %%
# The expansion tracks the closed form to O(1). The truncated series converges
# slowly next to the square-root singularity, so its last rows lag behind.

# %%
# The total flux must equal minus the disk area, whatever eps is.
print()
print(f"eps * integral of f = {flux_conservation(eps):.6f}  (-pi = {-math.pi:.6f})")

# %%
# Normalised, the exit density is the arcsine law on [-1, 1].
alpha = np.linspace(-0.99, 0.99, 5)
dens = -eps * np.array([asy.flux_asymptotic(a, eps) for a in alpha]) / math.pi
print("density:", np.round(dens, 4), "arcsine:", np.round(1 / (math.pi * np.sqrt(1 - alpha**2)), 4))
