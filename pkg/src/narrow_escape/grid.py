"""Finite-volume solve of the mixed problem on a polar grid.

Nodes sit at ``r_i = i / n_r`` and ``theta_j = 2 pi j / n_theta``.  Each node owns
a control volume: the pole a disk of radius dr/2, interior nodes the annular
sector between ``r_i -+ dr/2``, and rim nodes the half cell reaching r = 1.
Balancing face fluxes against the source gives the usual 5-point polar
Laplacian in the interior, the average of the first ring at the pole, and a
one-sided Neumann row on the reflecting rim.  Rim nodes with
``|theta - pi| <= eps`` are pinned to zero.

The system is assembled on the closed half-plane ``0 <= theta <= pi`` with mirror
neighbours at both ends and unfolded afterwards, so ``v[:, j] == v[:, -j]``
holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .series import SeriesSolution, eval_v

__all__ = [
    "ComparisonReport",
    "PolarGrid",
    "SingularGridError",
    "compare_methods",
    "solve_grid",
    "window_nodes",
]


_REFINE_STEPS = 1


class SingularGridError(np.linalg.LinAlgError):
    """No rim node falls inside the window, so the Neumann problem is singular."""


def window_nodes(eps: float, n_theta: int) -> np.ndarray:
    """Boolean mask of rim nodes inside the closed window."""
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    return np.abs(theta - np.pi) <= eps * (1.0 + 1e-12)


@dataclass(frozen=True)
class PolarGrid:
    """Solution ``v[i, j]`` at ``r = i / n_r``, ``theta = 2 pi j / n_theta``; row 0 is the pole.

    ``residual`` is the componentwise backward error
    ``max_i |A v - b|_i / (|A| |v| + |b|)_i`` of the assembled system.
    ``window_flux`` sums the conservative rim fluxes of the pinned cells and
    equals ``-pi`` to round-off; ``window_flux_one_sided`` integrates a
    second-order one-sided dv/dr over the window nodes instead.
    """

    eps: float
    n_r: int
    n_theta: int
    v: np.ndarray = field(repr=False)
    residual: float
    window_flux: float
    window_flux_one_sided: float

    def __post_init__(self):
        self.v.flags.writeable = False

    @property
    def r(self) -> np.ndarray:
        return np.arange(self.n_r + 1) / self.n_r

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def center(self) -> float:
        return float(self.v[0, 0])

    @property
    def antipode(self) -> float:
        return float(self.v[-1, 0])

    def argmax(self) -> tuple[int, int]:
        i, j = np.unravel_index(np.argmax(self.v), self.v.shape)
        return int(i), int(j)


def _check(eps: float, n_r: int, n_theta: int) -> np.ndarray:
    if not 0.0 < eps <= np.pi:
        raise ValueError(f"eps must lie in (0, pi], got {eps}")
    if n_r < 32:
        raise ValueError(f"n_r must be at least 32, got {n_r}")
    if n_theta < 128 or n_theta % 2:
        raise ValueError(f"n_theta must be even and at least 128, got {n_theta}")
    mask = window_nodes(eps, n_theta)
    if not mask.any():
        raise SingularGridError("window contains no boundary node")
    if mask.sum() < 8:
        raise ValueError(f"window holds {mask.sum()} rim nodes; refine n_theta to resolve it (>= 8)")
    return mask


def solve_grid(eps: float, n_r: int = 128, n_theta: int = 512) -> PolarGrid:
    """Solve ``Lap v = -1`` with v = 0 on the window and dv/dr = 0 elsewhere on the rim.

    Raises:
        ValueError: grid too coarse (n_r < 32, n_theta < 128 or odd, < 8 window nodes).
        SingularGridError: no rim node inside the window.
    """
    mask = _check(eps, n_r, n_theta)
    half = n_theta // 2
    m = half + 1  # angular nodes 0..half on the half plane
    dr, dth = 1.0 / n_r, 2.0 * np.pi / n_theta
    n_unknown = 1 + n_r * m

    def idx(i, j):
        return 1 + (i - 1) * m + j

    # angular neighbours on the half plane; the ends see their mirror image twice
    j = np.arange(m)
    left = np.where(j == 0, 1, j - 1)
    right = np.where(j == half, half - 1, j + 1)

    rows, cols, vals = [], [], []
    area = np.empty(n_unknown)  # control-volume areas
    rhs = np.empty(n_unknown)

    def add(r, c, v):
        rows.append(np.broadcast_to(r, np.shape(v)).ravel())
        cols.append(np.broadcast_to(c, np.shape(v)).ravel())
        vals.append(np.ravel(v))

    # pole: flux Δθ/2 to every first-ring node over the full circle
    ring_weight = np.where((j == 0) | (j == half), 1.0, 2.0) * dth / 2.0
    add(0, idx(1, j), ring_weight)
    add(0, 0, -np.pi)
    area[0] = np.pi * dr * dr / 4.0
    rhs[0] = -area[0]

    for i in range(1, n_r + 1):
        ri = i * dr
        row = idx(i, j)
        inner = (ri - dr / 2.0) * dth / dr
        if i < n_r:
            outer = (ri + dr / 2.0) * dth / dr
            side = dr / (ri * dth)
            cell = ri * dr * dth
        else:
            outer = 0.0
            r_mid = 1.0 - dr / 4.0
            side = (dr / 2.0) / (r_mid * dth)
            cell = dth * (1.0 - (1.0 - dr / 2.0) ** 2) / 2.0
        area[row] = cell
        rhs[row] = -cell
        add(row, row, np.full(m, -(inner + outer + 2.0 * side)))
        add(row, 0 if i == 1 else idx(i - 1, j), np.full(m, inner))
        if i < n_r:
            add(row, idx(i + 1, j), np.full(m, outer))
        add(row, idx(i, left), np.full(m, side))
        add(row, idx(i, right), np.full(m, side))

    a = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknown, n_unknown),
    )
    # Dirichlet rows: replace the balance by v = 0
    pinned = idx(n_r, j[mask[:m]])
    keep = np.ones(n_unknown)
    keep[pinned] = 0.0
    a_free = sp.diags(keep) @ a + sp.diags(1.0 - keep)
    b = rhs * keep
    lu = spla.splu(a_free.tocsc())
    sol = lu.solve(b)
    for _ in range(_REFINE_STEPS):
        sol += lu.solve(b - a_free @ sol)
    sol[pinned] = 0.0
    free = keep > 0
    scale = (abs(a_free) @ np.abs(sol) + np.abs(b))[free]
    residual = float(np.max(np.abs(a_free @ sol - b)[free] / scale))

    # conservative rim flux of each pinned half cell: face fluxes plus source must vanish
    rim_flux = -(a @ sol - rhs)[pinned]
    weights = np.where((j == 0) | (j == half), 1.0, 2.0)
    window_flux = float(np.sum(weights[mask[:m]] * rim_flux))

    half_v = np.empty((n_r + 1, m))
    half_v[0] = sol[0]
    half_v[1:] = sol[1:].reshape(n_r, m)
    full = np.concatenate([half_v, half_v[:, 1:half][:, ::-1]], axis=1)

    # second-order one-sided dv/dr at the rim, integrated over window nodes
    slope = (3.0 * full[-1] - 4.0 * full[-2] + full[-3]) / (2.0 * dr)
    one_sided = float(np.sum(slope[mask]) * dth)
    return PolarGrid(eps, n_r, n_theta, full, residual, window_flux, one_sided)


@dataclass(frozen=True)
class ComparisonReport:
    eps: float
    max_rel_diff: float
    l2_rel_diff: float
    n_nodes: int
    exclusion: float
    center_grid: float
    center_series: float
    antipode_grid: float
    antipode_series: float
    antipode_asymptotic: float


def compare_methods(
    eps: float, grid: PolarGrid, series_sol: SeriesSolution, exclusion: float | None = None
) -> ComparisonReport:
    """Relative grid-vs-series differences outside the boundary layer.

    Nodes closer than ``exclusion`` to the window arc are skipped; the default is
    the layer width ``eps log(1/eps)`` floored at ``2 eps``.
    """
    if not (grid.eps == eps == series_sol.eps):
        raise ValueError("grid and series solution must share eps")
    if exclusion is None:
        exclusion = max(eps * math.log(1.0 / eps), 2.0 * eps) if eps < 1.0 else 2.0 * eps
    r, th = np.meshgrid(grid.r, grid.theta, indexing="ij")
    # distance to the arc |phi - pi| <= eps on the unit circle
    gap = np.maximum(np.abs(np.angle(np.exp(1j * (th - np.pi)))) - eps, 0.0)
    dist = np.sqrt(r * r + 1.0 - 2.0 * r * np.cos(gap))
    keep = dist > exclusion
    ref = np.asarray(eval_v(series_sol, r[keep], th[keep]))
    diff = (grid.v[keep] - ref) / ref
    antipode_series = float(eval_v(series_sol, 1.0, 0.0))
    return ComparisonReport(
        eps=eps,
        max_rel_diff=float(np.max(np.abs(diff))),
        l2_rel_diff=float(np.sqrt(np.mean(diff * diff))),
        n_nodes=int(keep.sum()),
        exclusion=float(exclusion),
        center_grid=grid.center,
        center_series=float(eval_v(series_sol, 0.0, 0.0)),
        antipode_grid=grid.antipode,
        antipode_series=antipode_series,
        antipode_asymptotic=math.log(1.0 / eps) + 2.0 * math.log(2.0) if eps < 1.0 else math.nan,
    )
