"""Special functions and quadrature used by every closed-form expression.

Everything here is pure and stateless.  The three building blocks are

* integer-order modified Bessel functions of the second kind, kept in the
  log domain so that extreme orders/arguments never overflow,
* Laguerre polynomials and Gauss-Laguerre rules (nodes are the roots of
  L_D, weights in the overflow-free form tau / ((D+1) * L_{D+1}(tau))^2),
* the shared survival/density kernels (2/Gamma(q)) * z^(q/2) * K_q(2*sqrt(z))
  that appear in every cascaded-channel CDF/PDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "QuadratureError",
    "QuadratureRule",
    "laguerre_eval",
    "gauss_laguerre",
    "bessel_k",
    "log_bessel_k",
    "log_bessel_k_triplet",
    "gamma_int",
    "log_gamma_int",
    "survival_kernel",
    "density_kernel",
]

_EULER_GAMMA = 0.5772156649015328606
_MAX_QUAD_ORDER = 512
_MAX_BESSEL_ORDER = 512
_SERIES_CF_CROSSOVER = 2.0  # small-x series below, Steed's CF2 above


class QuadratureError(RuntimeError):
    """Raised when a quadrature node fails to converge."""


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Laguerre rule: integral_0^inf e^-t f(t) dt ~= sum_d w_d f(t_d).

    ``log_weights`` is always finite; for orders above roughly 180 the
    largest nodes carry weights below the smallest subnormal double, so the
    materialised ``weights`` entries underflow to 0 there.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray
    log_weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.order < 1:
            raise QuadratureError(f"order must be >= 1, got {self.order}")
        if len(self.nodes) != self.order or len(self.weights) != self.order:
            raise QuadratureError("nodes/weights length mismatch")
        if not np.all(np.diff(self.nodes) > 0) or self.nodes[0] <= 0:
            raise QuadratureError("nodes must be strictly ascending and positive")
        if not np.all(np.isfinite(self.log_weights)):
            raise QuadratureError("non-finite log-weight")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-9:
            raise QuadratureError("weights do not sum to 1")
        self.nodes.flags.writeable = False
        self.weights.flags.writeable = False
        self.log_weights.flags.writeable = False

    def moment(self, m: int) -> float:
        """sum_d w_d t_d^m, accumulated through log-weights so that large
        powers of the outer nodes never overflow before the weight damps them."""
        return float(np.sum(np.exp(self.log_weights + m * np.log(self.nodes))))


def laguerre_eval(n: int, x: float) -> tuple[float, float]:
    """Value and derivative of the Laguerre polynomial L_n at x.

    Three-term recurrence  j*L_j = (2j-1-x)*L_{j-1} - (j-1)*L_{j-2};
    derivative from L'_n(x) = n*(L_n(x) - L_{n-1}(x))/x.
    """
    if n < 0:
        raise ValueError(f"polynomial degree must be >= 0, got {n}")
    if n == 0:
        return 1.0, 0.0
    lm1, l = 1.0, 1.0 - x
    for j in range(2, n + 1):
        lm1, l = l, ((2 * j - 1 - x) * l - (j - 1) * lm1) / j
    if x == 0.0:
        return l, -float(n)  # L'_n(0) = -n
    return l, n * (l - lm1) / x


def _laguerre_scaled(n, x):
    """Vectorised recurrence with power rescaling: returns (l_n, l_{n-1}, log_scale)
    so that L_n(x) = l_n * exp(log_scale).  Needed beyond n ~ 300 where the
    oscillation envelope e^(x/2) at the outer roots overflows a double."""
    x = np.asarray(x, dtype=float)
    lm1 = np.zeros_like(x)
    l = np.ones_like(x)
    logs = np.zeros_like(x)
    for j in range(1, n + 1):
        lm1, l = l, ((2 * j - 1 - x) * l - (j - 1) * lm1) / j
        mag = np.abs(l)
        big = mag > 1e250
        if np.any(big):
            scale = np.where(big, mag, 1.0)
            l = l / scale
            lm1 = lm1 / scale
            logs = logs + np.log(scale)
    return l, lm1, logs


@lru_cache(maxsize=None)
def gauss_laguerre(order: int) -> QuadratureRule:
    """Gauss-Laguerre rule of the given order (1 <= order <= 512).

    Initial node estimates are the eigenvalues of the Jacobi matrix of the
    Laguerre recurrence, refined by Newton iteration on the polynomial
    itself (100-iteration cap, |step| <= 1e-14 * (1 + node)).  Weights are
    computed in the log domain from tau / ((D+1) * L_{D+1}(tau))^2, which is
    algebraically identical to the (D!)^2-based form but free of factorials.
    """
    if not 1 <= order <= _MAX_QUAD_ORDER:
        raise QuadratureError(f"order must be in [1, {_MAX_QUAD_ORDER}], got {order}")
    n = order
    if n == 1:
        x = np.array([1.0])
    else:
        diag = 2.0 * np.arange(n) + 1.0
        off = np.arange(1.0, n)
        x = eigh_tridiagonal(diag, off, eigvals_only=True)
    # stop at the 1e-14 step tolerance, or earlier once the step hits the
    # rounding floor of the recurrence (which grows with the order and sits
    # above 1e-14 relative for orders beyond ~400)
    prev_rel = math.inf
    for _ in range(100):
        l, lm1, _ = _laguerre_scaled(n, x)
        step = l / (n * (l - lm1) / x)
        x = x - step
        rel = float(np.max(np.abs(step) / x))
        if rel <= 1e-14 or (rel < 1e-9 and rel > 0.5 * prev_rel):
            break
        prev_rel = rel
    else:
        bad = int(np.argmax(np.abs(step) / x))
        raise QuadratureError(
            f"node {bad} of order-{n} rule did not converge within 100 iterations"
        )
    lnext, _, logs = _laguerre_scaled(n + 1, x)
    log_w = np.log(x) - 2.0 * math.log(n + 1.0) - 2.0 * (np.log(np.abs(lnext)) + logs)
    return QuadratureRule(order=n, nodes=x, weights=np.exp(log_w), log_weights=log_w)


# ---------------------------------------------------------------------------
# Modified Bessel function of the second kind, integer order, log domain.
# ---------------------------------------------------------------------------

def _log_k01_series(x):
    """log K_0 and log K_1 for 0 < x <= 2.

    K_0 from the ascending series; K_1 through the Wronskian
    I_0*K_1 + I_1*K_0 = 1/x, which avoids the digamma companion series.
    """
    q = 0.25 * x * x
    i0 = np.ones_like(x)
    k0sum = np.zeros_like(x)
    term = np.ones_like(x)
    harmonic = 0.0
    for j in range(1, 40):
        term = term * q / (j * j)
        harmonic += 1.0 / j
        i0 = i0 + term
        k0sum = k0sum + term * harmonic
    s1 = np.ones_like(x)
    t = np.ones_like(x)
    for j in range(1, 40):
        t = t * q / (j * (j + 1.0))
        s1 = s1 + t
    i1 = 0.5 * x * s1
    k0 = -(np.log(0.5 * x) + _EULER_GAMMA) * i0 + k0sum
    k1 = (1.0 / x - i1 * k0) / i0
    return np.log(k0), np.log(k1)


def _log_k01_cf2(x, maxit=400):
    """log K_0 and log K_1 for x >= 2 via Steed's continued fraction.

    The e^-x factor lives only in the returned logarithm, so the routine is
    exact up to x ~ 1e15 rather than underflowing near x = 700.
    """
    a1 = 0.25
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    q = np.full_like(x, a1)
    c = np.full_like(x, a1)
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, maxit):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels / s) < 1e-16):
            break
    else:  # pragma: no cover - CF2 converges in < 100 iterations for x >= 2
        raise RuntimeError("continued fraction for K_0 did not converge")
    logk0 = 0.5 * np.log(np.pi / (2.0 * x)) - x - np.log(s)
    logk1 = logk0 + np.log((0.5 + x - a1 * h) / x)
    return logk0, logk1


def _log_k01(x):
    small = x < _SERIES_CF_CROSSOVER
    lk0 = np.empty_like(x)
    lk1 = np.empty_like(x)
    if np.any(small):
        lk0[small], lk1[small] = _log_k01_series(x[small])
    if np.any(~small):
        lk0[~small], lk1[~small] = _log_k01_cf2(x[~small])
    return lk0, lk1


def _validate_bessel_args(order, x):
    if not 0 <= order <= _MAX_BESSEL_ORDER:
        raise ValueError(f"order must be in [0, {_MAX_BESSEL_ORDER}], got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or not np.all(np.isfinite(x)):
        raise ValueError("argument of K_Q must be positive and finite")
    return x


def log_bessel_k(order: int, x) -> np.ndarray | float:
    """log K_Q(x) for integer Q >= 0 and x > 0 (vectorised over x).

    K_0 and K_1 come from the series/continued-fraction branches; higher
    orders climb the recurrence K_{j+1} = K_{j-1} + (2j/x) K_j, which is a
    pure logaddexp ladder since every term is positive.
    """
    xv = _validate_bessel_args(order, x)
    scalar = xv.ndim == 0
    xv = np.atleast_1d(xv)
    lk0, lk1 = _log_k01(xv)
    if order == 0:
        out = lk0
    elif order == 1:
        out = lk1
    else:
        km1, k = lk0, lk1
        log2_over_x = math.log(2.0) - np.log(xv)
        for j in range(1, order):
            km1, k = k, np.logaddexp(km1, math.log(j) + log2_over_x + k)
        out = k
    return float(out[0]) if scalar else out


def log_bessel_k_triplet(order: int, x):
    """(log K_{Q-1}, log K_Q, log K_{Q+1}) sharing one recurrence ladder.

    Used by the SINR density kernels, which need the K_{Q-1} + K_{Q+1}
    bracket next to K_Q itself.  Requires Q >= 1.
    """
    if order < 1:
        raise ValueError("triplet needs order >= 1")
    xv = np.atleast_1d(_validate_bessel_args(order, x))
    km1, k = _log_k01(xv)
    log2_over_x = math.log(2.0) - np.log(xv)
    for j in range(1, order):
        km1, k = k, np.logaddexp(km1, math.log(j) + log2_over_x + k)
    kp1 = np.logaddexp(km1, math.log(order) + log2_over_x + k)
    return km1, k, kp1


def bessel_k(order: int, x) -> np.ndarray | float:
    """K_Q(x); saturates to inf when the true value exceeds double range and
    underflows to 0 once e^-x does, per the log-domain exponential."""
    with np.errstate(over="ignore"):
        out = np.exp(log_bessel_k(order, x))
    return float(out) if np.ndim(out) == 0 else out


def gamma_int(q: int) -> float:
    """Gamma(Q) = (Q-1)! for integer Q >= 1; inf beyond double range."""
    if q < 1:
        raise ValueError(f"gamma_int needs a positive integer, got {q}")
    try:
        return float(math.gamma(q))
    except OverflowError:
        return math.inf


def log_gamma_int(q: int) -> float:
    """log Gamma(Q), finite for the whole supported order range."""
    if q < 1:
        raise ValueError(f"log_gamma_int needs a positive integer, got {q}")
    return math.lgamma(q)


def survival_kernel(q: int, z) -> np.ndarray | float:
    """(2/Gamma(q)) * z^(q/2) * K_q(2*sqrt(z)), evaluated in the log domain.

    This is the survival function of the unit-scale cascaded gain: it tends
    to 1 as z -> 0+ and to 0 as z -> inf, and is clipped to [0, 1] against
    sub-ulp excursions.  All CDF-shaped expressions route through here so
    that z^(q/2) and K_q never meet as 0 * inf.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(z < 0.0):
        raise ValueError("kernel argument must be >= 0")
    out = np.ones_like(z)
    pos = z > 0.0
    if np.any(pos):
        zp = z[pos]
        logs = (math.log(2.0) - log_gamma_int(q) + 0.5 * q * np.log(zp)
                + log_bessel_k(q, 2.0 * np.sqrt(zp)))
        out[pos] = np.exp(logs)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def density_kernel(q: int, z) -> np.ndarray | float:
    """(2/Gamma(q)) * z^((q-1)/2) * K_{q-1}(2*sqrt(z)): minus the derivative
    of ``survival_kernel`` in z, i.e. the unit-scale cascaded-gain density."""
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any(z < 0.0):
        raise ValueError("kernel argument must be >= 0")
    out = np.empty_like(z)
    pos = z > 0.0
    if np.any(pos):
        zp = z[pos]
        logs = (math.log(2.0) - log_gamma_int(q) + 0.5 * (q - 1) * np.log(zp)
                + log_bessel_k(max(q - 1, 0), 2.0 * np.sqrt(zp)))
        out[pos] = np.exp(logs)
    if np.any(~pos):
        # z -> 0 limit: 1/(q-1) for q >= 2, divergent for q = 1
        out[~pos] = math.inf if q == 1 else 1.0 / (q - 1)
    return float(out[0]) if scalar else out
