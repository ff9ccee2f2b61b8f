"""Independent oracles for the test suite.

Everything here is deliberately written from scratch (plain numpy sampling,
quadrature, finite differences) so the library is checked against a second
route, not against itself.
"""

import math

import numpy as np
from scipy import integrate


def rng_for(label: str, seed: int = 0) -> np.random.Generator:
    entropy = abs(hash((label, seed))) % (2 ** 63)
    return np.random.default_rng(entropy)


def complex_gaussian(rng, var, shape):
    return (rng.normal(size=shape) + 1j * rng.normal(size=shape)) * math.sqrt(var / 2.0)


def sample_cascades(rng, n, q, var_a, var_b, copies=1):
    """n x copies squared cascade magnitudes |sum_m conj(b_m) a_m|^2 with
    independent hops per copy."""
    a = complex_gaussian(rng, var_a, (n, copies, q))
    b = complex_gaussian(rng, var_b, (n, copies, q))
    return np.abs(np.sum(np.conj(b) * a, axis=2)) ** 2


def sample_ordered_gain(rng, n, n_users, rank, q, var_a, var_b):
    """n draws of the rank-th smallest of n_users i.i.d. cascades."""
    draws = np.sort(sample_cascades(rng, n, q, var_a, var_b, copies=n_users),
                    axis=1)
    return draws[:, rank - 1]


def ks_distance(samples, cdf) -> float:
    srt = np.sort(np.asarray(samples))
    n = len(srt)
    f = cdf(srt)
    i = np.arange(n, dtype=float)
    return float(max(np.max(f - i / n), np.max((i + 1) / n - f)))


def empirical_cdf_at(samples, grid):
    srt = np.sort(np.asarray(samples))
    return np.searchsorted(srt, grid, side="right") / len(srt)


def quad_integral(fn, lo, hi, **kw):
    val, _ = integrate.quad(fn, lo, hi, limit=300, **kw)
    return val


def central_difference(fn, x, h):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)
