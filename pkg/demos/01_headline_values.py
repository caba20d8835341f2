"""
How long does it take to find a small hole?
===========================================

A Brownian particle wanders in the unit disk. The wall reflects it except on
a small arc of half-angle eps centred at theta = pi, where it escapes. This
script compares three routes to the mean escape time.
"""

# %%
# The closed-form small-eps formulas carry an O(1) correction next to
# log(1/eps). At practical window sizes that correction is large.
import math

from narrow_escape import asymptotics as asy
from narrow_escape.exact import v_closed_form
from narrow_escape.series import a0_exact, compute_series, eval_v

for eps in (0.2, 0.1, 0.05, 0.01):
    c = asy.mfpt_center(eps).value
    lead = math.log(1 / eps)
    print(f"eps={eps:<5} leading={lead:.4f} corrected={c:.4f} correction share={(c - lead) / c:.0%}")

# %%
# The series solution with N Legendre coefficients gives the full field.
# Its centre value should sit within O(eps) of the formula.
print()
for eps in (0.2, 0.1, 0.05):
    sol = compute_series(eps, 512)
    print(
        f"eps={eps:<5} centre: series={float(eval_v(sol, 0.0, 0.0)):.6f}"
        f" formula={asy.mfpt_center(eps).value:.6f}"
        f" closed form={float(v_closed_form(0.0, 0.0, eps)):.6f}"
    )

# %%
# Averaging over a uniform start and evaluating at the antipode give the
# other two headline quantities.
print()
eps = 0.1
sol = compute_series(eps, 512)
print(f"uniform start: a0/2 + 1/8 = {a0_exact(eps) / 2 + 0.125:.6f}, formula {asy.mfpt_uniform(eps).value:.6f}")
print(f"antipode: series {float(eval_v(sol, 1.0, 0.0)):.6f}, formula {asy.mfpt_max(eps).value:.6f}")
print(f"antipode minus centre: {float(eval_v(sol, 1.0, 0.0) - eval_v(sol, 0.0, 0.0)):.6f} (log 2 - 1/4 = {math.log(2) - 0.25:.6f})")
