"""
Walking along the ray toward the window
=======================================

Along theta = pi the escape time falls from its bulk value to zero at the
window. The outer formula describes the bulk, the inner one the last few
window widths.
"""

# %%
import warnings

import numpy as np

from narrow_escape import asymptotics as asy

eps = 0.01
print(f"layer width eps log(1/eps) = {asy.boundary_layer_width(eps):.4f}")
print(f"{'r':>8} {'exact':>10} {'outer':>10} {'inner':>10}")
with warnings.catch_warnings():
    # we deliberately push both approximations past their comfort zones
    warnings.simplefilter("ignore", asy.AsymptoticRegimeWarning)
    for r in (0.0, 0.25, 0.5, 0.75, 0.9, 0.97, 0.99, 0.995, 0.999):
        delta = 1 - r
        inner = asy.v_ray_inner(delta, eps) if delta <= 2 * eps else np.nan
        print(f"{r:8.3f} {asy.v_ray_exact(r, eps):10.5f} {asy.v_ray_outer(r, eps):10.5f} {inner:10.5f}")

# %%
# The outer formula hits zero about eps/2 from the rim. The exact profile
# instead decays like arcsinh(delta/eps), so it is still well below the bulk
# value at the nominal layer edge.
delta = asy.boundary_layer_width(eps)
print()
print(f"exact at layer edge: {asy.v_ray_exact(1 - delta, eps):.4f}, arcsinh(delta/eps) = {np.arcsinh(delta / eps):.4f}")
print(f"bulk value: {asy.mfpt_center(eps).value:.4f}")
