"""Distribution of the on-off cascaded channel gain and its order statistics.

With Q live reflecting elements the cascade H = sum_m conj(b_m) a_m of
independent complex Gaussians has |H|^2 following the Bessel-K form

    f(z) = 2 z^((Q-1)/2) / (Gamma(Q) s^((Q+1)/2)) K_{Q-1}(2 sqrt(z/s)),
    F(z) = 1 - (2/Gamma(Q)) (z/s)^(Q/2) K_Q(2 sqrt(z/s)),   s = var_a*var_b,

exactly (conditioned on the second hop the sum is complex Gaussian).  The
k-th order statistic across K i.i.d. users applies the usual binomial
expansion on top of F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special_math import density_kernel, survival_kernel

__all__ = [
    "CascadeParams",
    "cascade_pdf",
    "cascade_cdf",
    "cascade_cdf_ordered",
    "ordered_from_parent",
    "ordered_pdf_factor",
    "mean_cascade_power",
]

# probabilities may stray this far outside [0, 1] before clamping;
# anything larger is a bug, not roundoff
CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class CascadeParams:
    """Q live elements; var_a / var_b are the per-hop coefficient variances."""

    q: int
    var_a: float
    var_b: float

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.var_a <= 0 or self.var_b <= 0:
            raise ValueError("hop variances must be > 0")

    @property
    def scale(self) -> float:
        return self.var_a * self.var_b


def _check_nonneg(z):
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("cascaded gain must be >= 0")
    return z


def cascade_pdf(z, params: CascadeParams):
    """Density of |H|^2 at z >= 0 (vectorised)."""
    z = _check_nonneg(z)
    return density_kernel(params.q, z / params.scale) / params.scale


def cascade_cdf(z, params: CascadeParams):
    """P(|H|^2 <= z); exactly 0 at z = 0 via the small-argument Bessel limit."""
    z = _check_nonneg(z)
    return 1.0 - survival_kernel(params.q, z / params.scale)


def ordered_from_parent(b, k: int, n_users: int):
    """CDF of the k-th smallest of n i.i.d. draws given the parent CDF value b.

    Alternating binomial sum kappa * sum_l C(n-k, l) (-1)^l b^(k+l) / (k+l)
    with kappa = n!/((n-k)!(k-1)!); safe in doubles for the small user counts
    used here, clamped to [0, 1] only against sub-tolerance excursions.
    """
    if not 1 <= k <= n_users:
        raise IndexError(f"rank {k} outside [1, {n_users}]")
    b = np.asarray(b, dtype=float)
    kappa = math.factorial(n_users) / (
        math.factorial(n_users - k) * math.factorial(k - 1))
    acc = np.zeros_like(b)
    for l in range(n_users - k + 1):
        coeff = math.comb(n_users - k, l) * (-1.0) ** l / (k + l)
        acc = acc + coeff * b ** (k + l)
    out = kappa * acc
    return np.clip(out, 0.0, 1.0)


def ordered_pdf_factor(b, k: int, n_users: int):
    """d/db of ``ordered_from_parent``: kappa * b^(k-1) * (1-b)^(n-k)."""
    if not 1 <= k <= n_users:
        raise IndexError(f"rank {k} outside [1, {n_users}]")
    b = np.asarray(b, dtype=float)
    kappa = math.factorial(n_users) / (
        math.factorial(n_users - k) * math.factorial(k - 1))
    return kappa * b ** (k - 1) * (1.0 - b) ** (n_users - k)


def cascade_cdf_ordered(z, k: int, n_users: int, params: CascadeParams):
    """CDF of the k-th smallest cascaded gain among n_users i.i.d. ones."""
    return ordered_from_parent(cascade_cdf(z, params), k, n_users)


def mean_cascade_power(params: CascadeParams) -> float:
    """E|H|^2 = Q * var_a * var_b."""
    return params.q * params.scale
