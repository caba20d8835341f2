"""Closed-form solution of the disk problem, used as an oracle.

With the window centred at theta = pi and ``c = cos(eps)``, the Abel density is
``h1(t) = tan(t/2) / sqrt(2)``.  Feeding it through the coefficient integral
gives ``a_n = (P_{n-1}(-c) - P_n(-c)) / (2n)``, and summing the series with the
Legendre generating function gives, for ``w = -r exp(i theta)``::

    v(r, theta) = (1 - r**2)/4 - 1/2 log| (w - c + R) / (1 - c w + R) |,
    R = sqrt(1 - w e^{i eps}) sqrt(1 - w e^{-i eps}).

Everything here is elementary and independent of the quadrature and series
code paths, which is what makes it useful for cross-checks.
"""

from __future__ import annotations

import numpy as np

from .quadrature import legendre_table

__all__ = [
    "a0_closed_form",
    "coefficients_closed_form",
    "flux_closed_form",
    "h1_closed_form",
    "v_closed_form",
    "v_max_closed_form",
]


def h1_closed_form(t):
    return np.tan(np.asarray(t, dtype=float) / 2.0) / np.sqrt(2.0)


def a0_closed_form(eps: float) -> float:
    return -2.0 * np.log(np.sin(eps / 2.0))


def coefficients_closed_form(eps: float, n_terms: int) -> np.ndarray:
    """a_1..a_N without any quadrature."""
    p = legendre_table(n_terms, -np.cos(eps))
    n = np.arange(1, n_terms + 1)
    return (p[:-1] - p[1:]) / (2.0 * n)


def v_closed_form(r, theta, eps: float):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    w = -r * np.exp(1j * theta)
    c = np.cos(eps)
    # each factor has positive real part for |w| < 1, so the product is analytic
    root = np.sqrt(1.0 - w * np.exp(1j * eps)) * np.sqrt(1.0 - w * np.exp(-1j * eps))
    ratio = (w - c + root) / (1.0 - c * w + root)
    return (1.0 - r * r) / 4.0 - 0.5 * np.log(np.abs(ratio))


def v_max_closed_form(eps: float) -> float:
    return -np.log(np.tan(eps / 4.0))


def flux_closed_form(theta, eps: float):
    """dv/dr at r = 1; zero on the reflecting arc."""
    psi = np.remainder(np.asarray(theta, dtype=float), 2 * np.pi) - np.pi
    a2 = np.sin(eps / 2.0) ** 2
    gap = a2 - np.sin(psi / 2.0) ** 2
    inside = gap > 0
    out = np.zeros(np.shape(psi))
    out[inside] = -np.cos(psi[inside] / 2.0) / (2.0 * np.sqrt(gap[inside]))
    return out if out.ndim else float(out)
