"""Reflected Brownian motion in the unit disk with an absorbing arc.

Euler-Maruyama steps of the dimensionless diffusion (D = 1, so each
coordinate increment is ``sqrt(2 h) * N(0, 1)``).  Every proposed step is
tested against the circle by segment intersection: a crossing inside the
window absorbs the path at a linearly interpolated time, a crossing elsewhere
is mirrored across the tangent line.  Within ``4 sqrt(dt)`` of the boundary
the step shrinks to ``dt / 16``.  Steps that end near the window without
crossing it are also absorbed with the Brownian-bridge crossing probability
``exp(-d1 d2 / h)`` of the tangent half-plane, which removes the O(sqrt(h))
bias from excursions that leave and re-enter within one step.

Path ``i`` draws its normals from Philox with key ``seed`` and counter
``(step, i)``, and per-path results land in fixed array slots that are reduced
in index order, so estimates are bit-identical for any number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numba import njit

from .philox import normal_pair, uniform_pair
from .series import Geometry

__all__ = [
    "CensoringError",
    "ExitHistogram",
    "McConfig",
    "McEstimate",
    "PathResults",
    "Start",
    "THREADS_ENV",
    "default_max_time",
    "default_threads",
    "run_paths",
    "simulate_both",
    "simulate_exit_angles",
    "simulate_mfpt",
    "step_reflect",
]

THREADS_ENV = "NARROW_ESCAPE_THREADS"
CHUNK = 2048
MAX_CENSORED_FRACTION = 0.01
_SUBSTEP = 16
_MAX_MIRRORS = 16
_BRIDGE_CUTOFF = 40.0
_BRIDGE_STREAM = np.uint64(1 << 63)

_START_CODES = {"center": 0, "point": 1, "uniform": 2, "antipodal": 3}


@dataclass(frozen=True)
class Start:
    """Initial position: ``center``, ``point`` (r, theta), ``uniform`` over the disk, or ``antipodal`` (r = 1, theta = 0)."""

    kind: Literal["center", "point", "uniform", "antipodal"] = "center"
    r: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in _START_CODES:
            raise ValueError(f"unknown start kind {self.kind!r}")
        if self.kind == "point" and not 0.0 <= self.r <= 1.0:
            raise ValueError(f"start radius must lie in [0, 1], got {self.r}")

    @classmethod
    def point(cls, r: float, theta: float) -> "Start":
        return cls("point", r, theta)

    def xy(self) -> tuple[float, float]:
        if self.kind == "point":
            return self.r * math.cos(self.theta), self.r * math.sin(self.theta)
        if self.kind == "antipodal":
            return 1.0, 0.0
        return 0.0, 0.0


def default_max_time(eps: float) -> float:
    """100 times the leading-order centre MFPT, floored at the Dirichlet value 1/4."""
    return 100.0 * max(math.log(2.0 / eps) + 0.25, 0.25)


@dataclass(frozen=True)
class McConfig:
    time_step: float = 1e-3
    n_paths: int = 100_000
    seed: int = 0
    max_time: float | None = None
    start: Start = field(default_factory=Start)
    bridge: bool = True

    def __post_init__(self):
        if not self.time_step > 0:
            raise ValueError(f"time_step must be positive, got {self.time_step}")
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be at least 1, got {self.n_paths}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.max_time is not None and not self.max_time > self.time_step:
            raise ValueError("max_time must exceed time_step")

    def horizon(self, geom: Geometry) -> float:
        return default_max_time(geom.eps) if self.max_time is None else self.max_time


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_absorbed: int
    n_censored: int

    @property
    def n_paths(self) -> int:
        return self.n_absorbed + self.n_censored

    @property
    def censored_fraction(self) -> float:
        return self.n_censored / self.n_paths


@dataclass(frozen=True)
class ExitHistogram:
    """Counts of ``alpha = (pi - theta_exit) / eps`` over absorbed paths.

    ``alpha`` keeps the individual exit coordinates (sorted) so that
    distribution tests need not work from binned data.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    alpha: np.ndarray = field(repr=False)

    @property
    def n_absorbed(self) -> int:
        return int(self.counts.sum())

    def ks_arcsine(self) -> float:
        """Kolmogorov-Smirnov distance to ``F(a) = 1/2 + arcsin(a)/pi``."""
        n = self.alpha.size
        if n == 0:
            raise ValueError("no absorbed paths")
        cdf = 0.5 + np.arcsin(np.clip(self.alpha, -1.0, 1.0)) / np.pi
        ranks = np.arange(1, n + 1)
        return float(max(np.max(ranks / n - cdf), np.max(cdf - (ranks - 1) / n)))


class CensoringError(RuntimeError):
    """More than 1% of paths reached the time horizon without absorption."""

    def __init__(self, n_censored: int, n_paths: int, max_time: float):
        super().__init__(
            f"{n_censored} of {n_paths} paths ({n_censored / n_paths:.2%}) censored at t = {max_time:g}"
        )
        self.n_censored = n_censored
        self.n_paths = n_paths
        self.max_time = max_time


@njit(nogil=True, cache=True)
def _advance(x, y, dx, dy, window_x):
    """Move (x, y) by (dx, dy) with mirroring.

    Returns ``(x, y, fraction, absorbed, mirrors)``: the final point, the share of
    the path length travelled before absorption, and the number of reflections.
    """
    total = math.sqrt(dx * dx + dy * dy)
    if total == 0.0:
        return x, y, 1.0, False, 0
    used = 0.0
    for m in range(_MAX_MIRRORS):
        px, py = x + dx, y + dy
        if px * px + py * py <= 1.0:
            return px, py, 1.0, False, m
        a = dx * dx + dy * dy
        b = 2.0 * (x * dx + y * dy)
        c = x * x + y * y - 1.0
        root = math.sqrt(max(b * b - 4.0 * a * c, 0.0))
        # larger root of a s^2 + b s + c = 0, in the cancellation-free form
        s = (-b + root) / (2.0 * a) if b <= 0.0 else 2.0 * c / (-b - root)
        s = min(max(s, 0.0), 1.0)
        qx, qy = x + s * dx, y + s * dy
        norm = math.sqrt(qx * qx + qy * qy)
        qx, qy = qx / norm, qy / norm
        used += s * math.sqrt(a)
        if qx < window_x:
            return qx, qy, used / total, True, m
        rx, ry = (1.0 - s) * dx, (1.0 - s) * dy
        dot = rx * qx + ry * qy
        x, y = qx, qy
        dx, dy = rx - 2.0 * dot * qx, ry - 2.0 * dot * qy
    # pathological zig-zag: stay on the circle
    return x, y, 1.0, False, _MAX_MIRRORS


@njit(nogil=True, cache=True)
def _simulate_chunk(first, count, seed, window_x, dt, max_time, start_code, x0, y0,
                    bridge, times, exit_theta, absorbed):
    near = 4.0 * math.sqrt(dt)
    fine = dt / _SUBSTEP
    for k in range(count):
        path = np.uint64(first + k)
        if start_code == 2:
            u1, u2 = uniform_pair(seed, path, 0)
            rad = math.sqrt(u1)
            x, y = rad * math.cos(2.0 * math.pi * u2), rad * math.sin(2.0 * math.pi * u2)
        else:
            x, y = x0, y0
        t = 0.0
        step = 1
        hit = False
        while t < max_time:
            h = dt if 1.0 - math.sqrt(x * x + y * y) >= near else fine
            z0, z1 = normal_pair(seed, path, step)
            step += 1
            scale = math.sqrt(2.0 * h)
            nx, ny, frac, hit, mirrors = _advance(x, y, scale * z0, scale * z1, window_x)
            if hit:
                t += frac * h
                x, y = nx, ny
                break
            if bridge and mirrors == 0:
                # Brownian bridge between two interior points crosses the
                # tangent line with probability exp(-d1 d2 / h)
                d1 = 1.0 - math.sqrt(x * x + y * y)
                d2 = 1.0 - math.sqrt(nx * nx + ny * ny)
                if d1 * d2 < _BRIDGE_CUTOFF * h:
                    mx, my = x + nx, y + ny
                    mn = math.sqrt(mx * mx + my * my)
                    if mn > 0.0 and mx < window_x * mn:
                        u, _ = uniform_pair(seed, path | _BRIDGE_STREAM, step)
                        if u < math.exp(-d1 * d2 / h):
                            t += h * d1 / (d1 + d2) if d1 + d2 > 0.0 else 0.0
                            x, y = mx / mn, my / mn
                            hit = True
                            break
            x, y = nx, ny
            t += h
        times[k] = t
        absorbed[k] = hit
        exit_theta[k] = math.atan2(y, x) if hit else np.nan


@dataclass(frozen=True)
class PathResults:
    """Per-path outcomes, indexed by path number."""

    times: np.ndarray
    exit_theta: np.ndarray
    absorbed: np.ndarray
    max_time: float


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        n = int(env) if env.strip().isdigit() else 0
        if n < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def run_paths(geom: Geometry, cfg: McConfig, threads: int | None = None) -> PathResults:
    """Simulate every path of ``cfg``; chunks of paths run on a thread pool."""
    threads = default_threads() if threads is None else threads
    if threads < 1:
        raise ValueError(f"threads must be at least 1, got {threads}")
    n = cfg.n_paths
    horizon = cfg.horizon(geom)
    times = np.empty(n)
    theta = np.empty(n)
    absorbed = np.empty(n, dtype=np.bool_)
    x0, y0 = cfg.start.xy()
    window_x = -math.cos(geom.eps)
    code = _START_CODES[cfg.start.kind]

    def work(first: int) -> None:
        stop = min(first + CHUNK, n)
        _simulate_chunk(first, stop - first, np.uint64(cfg.seed), window_x, cfg.time_step,
                        horizon, code, x0, y0, cfg.bridge, times[first:stop], theta[first:stop],
                        absorbed[first:stop])

    starts = range(0, n, CHUNK)
    if threads == 1:
        for s in starts:
            work(s)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    return PathResults(times, theta, absorbed, horizon)


def _check_censoring(res: PathResults) -> int:
    n_censored = int(res.absorbed.size - np.count_nonzero(res.absorbed))
    if n_censored > MAX_CENSORED_FRACTION * res.absorbed.size:
        raise CensoringError(n_censored, res.absorbed.size, res.max_time)
    return n_censored


def _estimate(res: PathResults) -> McEstimate:
    n_censored = _check_censoring(res)
    t = res.times[res.absorbed]
    if t.size == 0:
        raise CensoringError(n_censored, res.absorbed.size, res.max_time)
    stderr = float(np.std(t, ddof=1) / math.sqrt(t.size)) if t.size > 1 else 0.0
    return McEstimate(float(np.mean(t)), stderr, int(t.size), n_censored)


def simulate_mfpt(geom: Geometry, cfg: McConfig, threads: int | None = None) -> McEstimate:
    """Dimensionless MFPT estimate over absorbed paths (rescale for physical time).

    Raises:
        CensoringError: if more than 1% of paths are still alive at the horizon.
    """
    return _estimate(run_paths(geom, cfg, threads))


def _histogram(res: PathResults, eps: float, bins: int) -> ExitHistogram:
    _check_censoring(res)
    theta = np.mod(res.exit_theta[res.absorbed], 2.0 * np.pi)
    alpha = np.sort((np.pi - theta) / eps)
    edges = np.linspace(-1.0, 1.0, bins + 1)
    counts, _ = np.histogram(np.clip(alpha, -1.0, 1.0), bins=edges)
    return ExitHistogram(edges, counts, alpha)


def simulate_exit_angles(
    geom: Geometry, cfg: McConfig, bins: int = 20, threads: int | None = None
) -> ExitHistogram:
    """Histogram of ``alpha = (pi - theta_exit) / eps`` over absorbed paths."""
    if bins < 1:
        raise ValueError(f"bins must be at least 1, got {bins}")
    return _histogram(run_paths(geom, cfg, threads), geom.eps, bins)


def simulate_both(
    geom: Geometry, cfg: McConfig, bins: int = 20, threads: int | None = None
) -> tuple[McEstimate, ExitHistogram]:
    """MFPT estimate and exit histogram from one set of paths."""
    res = run_paths(geom, cfg, threads)
    return _estimate(res), _histogram(res, geom.eps, bins)


def step_reflect(position, increment, geom: Geometry) -> tuple[np.ndarray, bool, float]:
    """One reflected step from ``position`` by ``increment``.

    Returns ``(new_position, absorbed, fraction)`` where ``fraction`` is the part
    of the step's path length used before absorption (1 when not absorbed).
    """
    x, y = (float(v) for v in position)
    if x * x + y * y > 1.0 + 1e-12:
        raise ValueError("position must lie in the closed unit disk")
    dx, dy = (float(v) for v in increment)
    nx, ny, frac, hit, _ = _advance(x, y, dx, dy, -math.cos(geom.eps))
    return np.array([nx, ny]), bool(hit), float(frac)
