"""Adaptive quadrature and Legendre polynomials.

Integrands are called with a 1-D ``numpy`` array of abscissae and must return
an array of the same shape.  Nodes never coincide with the interval
endpoints, so integrands that are singular (but integrable) at an endpoint can
be passed directly; the error contract, however, only holds for smooth
integrands.  For an inverse-square-root endpoint singularity use
:func:`integrate_sqrt_singular`.
"""

from __future__ import annotations

import heapq
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np

__all__ = [
    "QuadratureError",
    "QuadratureResult",
    "QuadratureSpec",
    "DEFAULT_SPEC",
    "integrate",
    "integrate_sqrt_singular",
    "legendre_p",
    "legendre_table",
]

# Kronrod 15-point nodes (positive half, descending) and weights; the Gauss
# 7-point rule uses the odd-indexed Kronrod nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-point layout on [-1, 1]: -x0..-x6, 0, x6..x0.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[1:7:2] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[9:14:2] = _WG[:3][::-1]


class QuadratureError(ArithmeticError):
    """Raised when an integral does not reach its tolerance."""

    def __init__(self, message: str, value: float, error_estimate: float):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 500

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol >= 0:
            raise ValueError(f"rel_tol must be non-negative, got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    subdivisions_used: int


def _gk15(f: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray):
    """Apply the G7/K15 pair on every interval [lo[i], hi[i]] in one call."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    kronrod = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)
    return kronrod, np.abs(kronrod - gauss)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` by adaptive bisection.

    The interval with the largest |K15 - G7| difference is bisected until the
    summed estimate drops below ``max(abs_tol, rel_tol * |value|)``.

    Raises:
        ValueError: if ``a > b``.
        QuadratureError: if the tolerance is not met within
            ``spec.max_subdivisions`` intervals or the integrand is not finite.
    """
    if a > b:
        raise ValueError(f"expected a <= b, got a={a}, b={b}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)

    vals, errs = _gk15(f, np.array([a], float), np.array([b], float))
    # heap of (-error, lo, hi, value)
    heap = [(-errs[0], float(a), float(b), vals[0])]
    total, total_err = vals[0], errs[0]
    while True:
        if not (np.isfinite(total) and np.isfinite(total_err)):
            raise QuadratureError("integrand produced non-finite values", total, total_err)
        if total_err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            break
        if len(heap) >= spec.max_subdivisions:
            raise QuadratureError(
                f"tolerance not met after {len(heap)} subdivisions "
                f"(error estimate {total_err:.3e})",
                total,
                total_err,
            )
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureError("interval can no longer be bisected", total, total_err)
        v2, e2 = _gk15(f, np.array([lo, mid]), np.array([mid, hi]))
        heapq.heappush(heap, (-e2[0], lo, mid, v2[0]))
        heapq.heappush(heap, (-e2[1], mid, hi, v2[1]))
        # re-sum rather than update incrementally to keep round-off bounded
        total = float(sum(item[3] for item in heap))
        total_err = float(sum(-item[0] for item in heap))
    return QuadratureResult(float(total), float(total_err), len(heap))


def integrate_sqrt_singular(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    singular_end: Literal["left", "right"],
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> QuadratureResult:
    """Integrate ``f(s) / sqrt(s - a)`` (left) or ``f(s) / sqrt(b - s)`` (right).

    ``f`` must be smooth up to the singular endpoint.  The substitution
    ``s = a + w**2`` (or ``s = b - w**2``) turns the weight into ``2 dw`` and
    leaves a smooth integrand on ``[0, sqrt(b - a)]``.
    """
    if a > b:
        raise ValueError(f"expected a <= b, got a={a}, b={b}")
    top = np.sqrt(b - a)
    if singular_end == "left":
        return integrate(lambda w: 2.0 * f(a + w * w), 0.0, top, spec)
    if singular_end == "right":
        return integrate(lambda w: 2.0 * f(b - w * w), 0.0, top, spec)
    raise ValueError(f"singular_end must be 'left' or 'right', got {singular_end!r}")


def _check_domain(x: np.ndarray) -> np.ndarray:
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise ValueError("Legendre argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def legendre_p(n: int, x):
    """P_n(x) by the upward three-term recurrence.

    Accepts a scalar or an array ``x`` in [-1, 1].
    """
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    scalar = np.ndim(x) == 0
    x = _check_domain(np.asarray(x, dtype=float))
    p_prev = np.ones_like(x)
    if n == 0:
        return float(p_prev) if scalar else p_prev
    p = x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return float(p) if scalar else p


def legendre_table(n_max: int, x) -> np.ndarray:
    """Return ``P[k, ...] = P_k(x)`` for k = 0..n_max."""
    if n_max < 0:
        raise ValueError(f"degree must be non-negative, got {n_max}")
    x = _check_domain(np.asarray(x, dtype=float))
    table = np.empty((n_max + 1,) + x.shape)
    table[0] = 1.0
    if n_max >= 1:
        table[1] = x
    for k in range(1, n_max):
        table[k + 1] = ((2 * k + 1) * x * table[k] - k * table[k - 1]) / (k + 1)
    return table
