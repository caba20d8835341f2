"""Fourier-Legendre series solution of the mixed boundary value problem.

Dimensionless setting: unit disk, Laplacian of v equal to -1, v = 0 on the
absorbing arc ``|theta - pi| < eps`` and dv/dr = 0 on the rest of the circle.
Writing ``v = u + (1 - r**2)/4`` leaves a harmonic ``u`` expanded as

    u(r, theta) = a0/2 + sum_{n>=1} a_n r**n cos(n theta),

with ``a_n = 2**-0.5 * int_0^{pi-eps} h1(t) [P_n(cos t) + P_{n-1}(cos t)] dt``
and ``h1`` the solution of an Abel integral equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_sqrt_singular

__all__ = [
    "DEFAULT_TERMS",
    "Geometry",
    "H1Evaluator",
    "SeriesSolution",
    "a0_exact",
    "boundary_derivative",
    "compute_series",
    "eval_u",
    "eval_v",
    "flux_series",
    "h1_eval",
    "rescale",
]

DEFAULT_TERMS = 512


@dataclass(frozen=True)
class Geometry:
    """A disk of radius ``radius`` with an absorbing arc of half-angle ``eps``.

    ``eps`` is the half-angle (radians) of the window centred at theta = pi,
    so the window has arclength ``2 * eps * radius``.  The ratio of absorbing
    to total boundary length is therefore ``eps / pi``; use
    :meth:`from_length_ratio` when starting from that ratio.
    """

    eps: float
    radius: float = 1.0
    diffusivity: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eps < np.pi:
            raise ValueError(f"eps must lie in (0, pi), got {self.eps}")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not self.diffusivity > 0:
            raise ValueError(f"diffusivity must be positive, got {self.diffusivity}")

    @classmethod
    def from_length_ratio(cls, ratio: float, radius: float = 1.0, diffusivity: float = 1.0):
        return cls(np.pi * ratio, radius, diffusivity)

    @property
    def length_ratio(self) -> float:
        return self.eps / np.pi

    @property
    def time_scale(self) -> float:
        return self.radius**2 / self.diffusivity


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < np.pi:
        raise ValueError(f"eps must lie in (0, pi), got {eps}")


@dataclass(frozen=True)
class H1Evaluator:
    """Solution of the Abel equation ``int_0^x h1(t) dt / sqrt(cos t - cos x) = x / (2 cos(x/2))``.

    ``h1 = (1/pi) d/dt F(t)`` with ``F(t) = int_0^t u sin(u/2) / sqrt(cos u - cos t) du``,
    and ``(sqrt(2)/pi) F(t) = -2 log cos(t/2) + 2 log(1 + sin(t/2)) + k(t)``.
    Differentiating k under the integral sign, the remaining integrals are
    elementary and the three derivative terms collapse to ``tan(t/2)``; that
    closed form is what :meth:`__call__` evaluates.  :meth:`potential` and
    :meth:`k_term` keep the quadrature forms available for cross-checks.
    """

    eps: float

    def __post_init__(self):
        _check_eps(self.eps)

    def _check_t(self, t: np.ndarray) -> None:
        if np.any(t < 0) or np.any(t >= np.pi - self.eps):
            raise ValueError(f"t must lie in [0, pi - eps) = [0, {np.pi - self.eps})")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        self._check_t(t)
        out = np.tan(t / 2.0) / np.sqrt(2.0)
        return float(out) if out.ndim == 0 else out

    @staticmethod
    def potential(t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
        """``F(t) / pi`` by singular quadrature; its derivative is h1."""
        if t == 0.0:
            return 0.0

        def smooth(u):
            # cos u - cos t = 2 sin((t+u)/2) sin((t-u)/2), kept in product form
            gap = np.sin((t + u) / 2.0) * np.sinc((t - u) / (2.0 * np.pi))
            return u * np.sin(u / 2.0) / np.sqrt(gap)

        return integrate_sqrt_singular(smooth, 0.0, t, "right", spec).value / np.pi

    @staticmethod
    def k_term(t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
        """``k(t) = -(4/pi) int_0^{sin(t/2)} arcsin(sqrt(s^2 + cos^2(t/2))) / sqrt(s^2 + cos^2(t/2)) ds``."""
        sig, cos_half = np.sin(t / 2.0), np.cos(t / 2.0)
        if sig == 0.0:
            return 0.0

        def smooth(s):
            z = s * s + cos_half * cos_half
            one_minus_z = (sig - s) * (sig + s)
            angle = np.pi / 2.0 - np.arcsin(np.sqrt(np.clip(one_minus_z, 0.0, None)))
            return angle / np.sqrt(z) * np.sqrt(sig - s)

        return -4.0 / np.pi * integrate_sqrt_singular(smooth, 0.0, sig, "right", spec).value

    @classmethod
    def closed_potential(cls, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
        """``F(t) / pi`` from the log terms plus k(t)."""
        logs = -2.0 * np.log(np.cos(t / 2.0)) + 2.0 * np.log1p(np.sin(t / 2.0))
        return (logs + cls.k_term(t, spec)) / np.sqrt(2.0)


def h1_eval(h: H1Evaluator, t):
    return h(t)


def a0_exact(eps: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``a0 = (4/pi) int_0^{cos(eps/2)} arccos(sqrt(s^2+a^2)) / sqrt(s^2+a^2) ds``, ``a = sin(eps/2)``."""
    _check_eps(eps)
    a, c = np.sin(eps / 2.0), np.cos(eps / 2.0)

    def smooth(s):
        rho = np.sqrt(s * s + a * a)
        # arccos(rho) = arcsin(sqrt(1 - rho^2)) with 1 - rho^2 = (c - s)(c + s)
        gap = np.clip((c - s) * (c + s), 0.0, None)
        return np.arcsin(np.sqrt(gap)) / rho * np.sqrt(c - s)

    return 4.0 / np.pi * integrate_sqrt_singular(smooth, 0.0, c, "right", spec).value


@dataclass(frozen=True)
class SeriesSolution:
    eps: float
    n_terms: int
    a0: float
    a: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.shape != (self.n_terms,):
            raise ValueError(f"expected {self.n_terms} coefficients, got shape {a.shape}")
        if not np.all(np.isfinite(a)) or not np.isfinite(self.a0):
            raise ValueError("series coefficients must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "a", a)


def _coefficient_integrals(eps: float, n_terms: int) -> np.ndarray:
    # In x = cos t the measure h1(t) dt becomes dx / (sqrt(2) (1 + x)), and
    # P_n + P_{n-1} vanishes at x = -1, so the integrand is a polynomial of
    # degree n - 1: Gauss-Legendre with n/2 + 2 nodes is exact.
    lo = -np.cos(eps)
    nodes, weights = np.polynomial.legendre.leggauss(n_terms // 2 + 2)
    x = 0.5 * (1.0 - lo) * nodes + 0.5 * (1.0 + lo)
    w = 0.5 * (1.0 - lo) * weights / (2.0 * (1.0 + x))
    out = np.empty(n_terms)
    p_prev, p = np.ones_like(x), x.copy()
    for n in range(1, n_terms + 1):
        out[n - 1] = np.dot(w, p + p_prev)
        p_prev, p = p, ((2 * n + 1) * x * p - n * p_prev) / (n + 1)
    return out


def compute_series(
    eps: float, n_terms: int = DEFAULT_TERMS, spec: QuadratureSpec = DEFAULT_SPEC
) -> SeriesSolution:
    """Coefficients a0 (arccos quadrature) and a_1..a_N (Gauss-Legendre)."""
    _check_eps(eps)
    if n_terms < 1:
        raise ValueError(f"n_terms must be at least 1, got {n_terms}")
    return SeriesSolution(eps, n_terms, a0_exact(eps, spec), _coefficient_integrals(eps, n_terms))


def _cosine_sum(coef: np.ndarray, r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Clenshaw summation of ``sum_{n>=1} coef[n-1] r^n cos(n theta)``."""
    x = r * np.cos(theta)
    r2 = r * r
    y1 = np.zeros(np.broadcast(r, theta).shape)
    y2 = np.zeros_like(y1)
    for c in coef[::-1]:
        y1, y2 = c + 2.0 * x * y1 - r2 * y2, y1
    return y1 * x - r2 * y2


def _radius(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > 1):
        raise ValueError("r must lie in [0, 1]")
    return r


def _out(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def eval_u(sol: SeriesSolution, r, theta):
    r = _radius(r)
    theta = np.asarray(theta, dtype=float)
    return _out(sol.a0 / 2.0 + _cosine_sum(sol.a, r, theta))


def eval_v(sol: SeriesSolution, r, theta):
    """Dimensionless MFPT from (r, theta); multiply by R^2/D for time units."""
    r = _radius(r)
    return _out(np.asarray(eval_u(sol, r, theta)) + (1.0 - r * r) / 4.0)


def boundary_derivative(sol: SeriesSolution, theta):
    """Truncated ``dv/dr`` at r = 1, valid on either boundary arc."""
    theta = np.asarray(theta, dtype=float)
    n = np.arange(1, sol.n_terms + 1)
    return _out(_cosine_sum(n * sol.a, np.ones_like(theta), theta) - 0.5)


def flux_series(sol: SeriesSolution, theta):
    """Truncated flux on the absorbing arc; converges slowly near its ends."""
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta - np.pi) >= sol.eps):
        raise ValueError("theta must lie inside the absorbing window |theta - pi| < eps")
    return boundary_derivative(sol, theta)


def rescale(value, geom: Geometry):
    """Convert a dimensionless time into physical units (R^2 / D)."""
    return value * geom.time_scale
