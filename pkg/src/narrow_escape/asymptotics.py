"""Small-window asymptotics: headline MFPTs, ray profiles and the flux profile."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate, integrate_sqrt_singular
from .series import a0_exact

__all__ = [
    "AsymptoticRegimeWarning",
    "AsymptoticValue",
    "FluxExpansion",
    "boundary_layer_width",
    "flux_asymptotic",
    "lambda0_estimate",
    "mfpt_center",
    "mfpt_max",
    "mfpt_uniform",
    "q_function",
    "v_ray_exact",
    "v_ray_inner",
    "v_ray_outer",
]

LOG2 = math.log(2.0)
# beyond this half-angle the O(eps) remainders are no longer small
RELIABLE_EPS = 0.3
DEFAULT_FLUX_TERMS = 64


class AsymptoticRegimeWarning(UserWarning):
    """An asymptotic formula was evaluated outside its region of validity."""


@dataclass(frozen=True)
class AsymptoticValue:
    value: float
    error_order: str
    reliable: bool = True

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("asymptotic value must be finite")

    def __float__(self):
        return self.value


def _headline(eps: float, constant: float) -> AsymptoticValue:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    reliable = eps <= RELIABLE_EPS
    if not reliable:
        warnings.warn(
            f"eps={eps} > {RELIABLE_EPS}: small-window asymptotics are unreliable",
            AsymptoticRegimeWarning,
            stacklevel=3,
        )
    return AsymptoticValue(math.log(1.0 / eps) + constant, "O(eps)", reliable)


def mfpt_center(eps: float) -> AsymptoticValue:
    """MFPT from the centre: log(1/eps) + log 2 + 1/4."""
    return _headline(eps, LOG2 + 0.25)


def mfpt_uniform(eps: float) -> AsymptoticValue:
    """MFPT averaged over a uniform start: log(1/eps) + log 2 + 1/8."""
    return _headline(eps, LOG2 + 0.125)


def mfpt_max(eps: float) -> AsymptoticValue:
    """Largest MFPT, at the point antipodal to the window: log(1/eps) + 2 log 2."""
    return _headline(eps, 2.0 * LOG2)


def lambda0_estimate(eps: float) -> float:
    """Principal eigenvalue of the mixed problem, estimated as 1 / E[tau]."""
    return 1.0 / mfpt_uniform(eps).value


def boundary_layer_width(eps: float) -> float:
    """Representative width eps * log(1/eps) of the layer next to the window."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return eps * math.log(1.0 / eps)


def v_ray_exact(r: float, eps: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """MFPT along the ray theta = pi from the one-dimensional arccos quadrature."""
    if not 0.0 <= r < 1.0:
        raise ValueError(f"r must lie in [0, 1), got {r}")
    a0 = a0_exact(eps, spec)
    if r == 0.0:
        return 0.25 + 0.5 * a0
    a, c = math.sin(eps / 2.0), math.cos(eps / 2.0)
    dist2 = 1.0 - 2.0 * r * math.cos(eps) + r * r
    dist = math.sqrt(dist2)

    def smooth(s):
        rho2 = s * s + a * a
        gap = np.clip((c - s) * (c + s), 0.0, None)
        return np.arcsin(np.sqrt(gap)) * s * s / ((dist2 + 4.0 * r * s * s) * np.sqrt(rho2)) * np.sqrt(c - s)

    integral = integrate_sqrt_singular(smooth, 0.0, c, "right", spec).value
    return (1.0 - r * r) / 4.0 + (1.0 - r) / (2.0 * dist) * a0 - 8.0 * r * (1.0 - r) / (np.pi * dist) * integral


def q_function(r: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``q(r) = (8r/pi) int_0^1 arcsin(s) s ds / ((1-r)^2 + 4 r s^2)``; q(0) = 0, q(1) = log 2."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    if r == 0.0:
        return 0.0
    d2 = (1.0 - r) ** 2

    def smooth(s):
        # arcsin(s) = pi/2 - 2 arcsin(sqrt((1 - s)/2)) keeps the endpoint smooth
        angle = np.pi / 2.0 - 2.0 * np.arcsin(np.sqrt(np.clip((1.0 - s) / 2.0, 0.0, None)))
        return angle * s / (d2 + 4.0 * r * s * s) * np.sqrt(1.0 - s)

    # split at the peak of the Lorentzian factor so narrow peaks are resolved
    peak = min(0.5, 0.5 * (1.0 - r) / math.sqrt(r))
    head = integrate(lambda s: smooth(s) / np.sqrt(1.0 - s), 0.0, peak, spec).value
    tail = integrate_sqrt_singular(smooth, peak, 1.0, "right", spec).value
    return 8.0 * r / np.pi * (head + tail)


def v_ray_outer(r: float, eps: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Outer expansion along theta = pi, valid for 1 - r >> sqrt(eps).

    ``-log(eps/2) + log((1-r)/(1+r)) + (1-r^2)/4 + q(r)``.  The logarithm comes
    from ``(8r/pi)(pi/2) int_0^1 s ds / ((1-r)^2 + 4 r s^2) = log((1+r)/(1-r))``;
    the remainder against the exact ray profile is O(eps^2) at fixed r.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError(f"r must lie in [0, 1), got {r}")
    if 1.0 - r < 3.0 * math.sqrt(eps):
        warnings.warn(
            f"outer solution used at 1 - r = {1.0 - r:.3g} < 3 sqrt(eps)",
            AsymptoticRegimeWarning,
            stacklevel=2,
        )
    return (
        -math.log(eps / 2.0)
        + math.log((1.0 - r) / (1.0 + r))
        + (1.0 - r * r) / 4.0
        + q_function(r, spec)
    )


def v_ray_inner(delta: float, eps: float) -> float:
    """Boundary-layer solution delta / eps at distance delta = 1 - r from the window centre."""
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if delta > math.sqrt(eps) / 3.0:
        warnings.warn(
            f"inner solution used at delta = {delta:.3g} > sqrt(eps)/3",
            AsymptoticRegimeWarning,
            stacklevel=2,
        )
    return delta / eps


def _central_binomial(n: np.ndarray) -> np.ndarray:
    """(2n)! / (2^n n!)^2, computed in log space."""
    n = np.asarray(n, dtype=float)
    return np.exp(gammaln(2 * n + 1) - 2 * n * LOG2 - 2 * gammaln(n + 1))


@dataclass(frozen=True)
class FluxExpansion:
    """Flux profile on the window at scaled position ``alpha = (pi - theta) / eps``.

    Besides the truncated expansion itself (:meth:`value`) this carries the
    coefficient families it is built from: the Taylor coefficients
    ``phi_2n(a)`` of ``arccos(sqrt(s^2+a^2)) / sqrt(s^2+a^2)`` in ``s^2`` and the
    coefficients ``beta_n(a)`` of ``int phi(a,s) s^2 / (s^2 + b^2) ds`` in
    powers of ``b``, where ``a = sin(eps/2)`` and ``2 b^2 = -cos(theta) - cos(eps)``.
    """

    eps: float
    alpha: float
    n_terms: int = DEFAULT_FLUX_TERMS

    def __post_init__(self):
        if not 0.0 < self.eps < np.pi:
            raise ValueError(f"eps must lie in (0, pi), got {self.eps}")
        if not abs(self.alpha) < 1.0:
            raise ValueError(f"alpha must lie in (-1, 1), got {self.alpha}")
        if self.n_terms < 1:
            raise ValueError("n_terms must be at least 1")

    @property
    def a_half(self) -> float:
        return math.sin(self.eps / 2.0)

    @property
    def theta(self) -> float:
        return math.pi - self.eps * self.alpha

    @property
    def b(self) -> float:
        # -cos(theta) - cos(eps) = 2 (sin^2(eps/2) - sin^2(eps alpha / 2))
        return math.sqrt(self.a_half**2 - math.sin(self.eps * self.alpha / 2.0) ** 2)

    def phi(self, s):
        rho = np.sqrt(np.asarray(s, dtype=float) ** 2 + self.a_half**2)
        return np.arccos(rho) / rho

    def phi_coefficient(self, n: int) -> float:
        """Coefficient of s^(2n) in phi(a, s)."""
        a = self.a_half
        # phi = (pi/2) (s^2+a^2)^(-1/2) - sum_m c_m (s^2+a^2)^m / (2m+1), c_m = (2m)!/(2^m m!)^2
        lead = (-1) ** n * math.pi / 2.0 * float(_central_binomial(n)) / a ** (2 * n + 1)
        m = np.arange(n, n + 4000)
        log_terms = (
            np.log(_central_binomial(m))
            + gammaln(m + 1) - gammaln(n + 1) - gammaln(m - n + 1)
            + 2.0 * (m - n) * math.log(a)
            - np.log(2 * m + 1)
        )
        return lead - float(np.sum(np.exp(log_terms)))

    def beta(self, n: int, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
        """Coefficient of b^n in ``int_0^{cos(eps/2)} phi(a,s) s^2 / (s^2 + b^2) ds``."""
        if n < 0:
            raise ValueError("n must be non-negative")
        j, odd = divmod(n, 2)
        if odd:
            return (-1) ** (j + 1) * math.pi / 2.0 * self.phi_coefficient(j)
        if n == 0:
            return math.pi / 4.0 * a0_exact(self.eps, spec)
        a = self.a_half
        top = math.cos(self.eps / 2.0)
        low = [self.phi_coefficient(k) for k in range(j)]
        tail_coef = [self.phi_coefficient(k) for k in range(j, j + 40)]
        cut = 0.25 * a

        def remainder(s):
            s = np.asarray(s, dtype=float)
            # near s = 0 the subtraction cancels; use the Taylor tail there
            series = np.polyval(tail_coef[::-1], s * s)
            direct = (self.phi(s) - np.polyval(low[::-1], s * s)) / np.maximum(s, cut) ** (2 * j)
            return np.where(s < cut, series, direct)

        integral = integrate(remainder, 0.0, cut, spec).value + integrate(remainder, cut, top, spec).value
        boundary = sum(low[k] / ((2 * j - 2 * k - 1) * top ** (2 * j - 2 * k - 1)) for k in range(j))
        return (-1) ** j * (integral - boundary)

    def value(self) -> float:
        """Leading-order flux, O(1) remainder dropped.

        Near the endpoints the expansion in half-integer powers of
        ``1 - alpha^2`` converges fast; near the centre it converges like
        n^(-1/2), so there the power series in ``alpha^2`` (leading coefficient
        -1/eps) is used instead.
        """
        al2 = self.alpha * self.alpha  # powers of alpha^2 keep the result exactly even
        x = 1.0 - al2
        n = np.arange(self.n_terms)
        if x >= 0.5:
            return float(-np.sum(_central_binomial(n) * al2**n) / self.eps)
        c_half = _central_binomial(n)
        c_next = _central_binomial(n + 1)
        singular = np.sum((al2 / c_next - 1.0 / ((2 * n + 1) * c_half)) * x ** (n + 0.5))
        regular = np.sum((c_half - (2 * n + 2) * c_next * al2) * x**n)
        return float(-al2 / (self.eps * math.sqrt(x)) - singular / self.eps - math.pi / (2.0 * self.eps) * regular)


def flux_asymptotic(alpha: float, eps: float, n_terms: int = DEFAULT_FLUX_TERMS) -> float:
    return FluxExpansion(eps, alpha, n_terms).value()
