"""Closed-form secrecy quantities: SINR distributions, outage probabilities,
high-SNR asymptotics, diversity slopes, system outage and throughput.

Structure shared by every expression: a legitimate/eavesdropper SINR CDF is
the cascaded-gain CDF evaluated at a Moebius transform of the SINR value,
ordered across users where channel ordering applies, and averaged over the
residual-interference exponential through a Gauss-Laguerre rule whenever the
SIC is imperfect.  Outage probabilities compose these with the mean-power
substitution for the eavesdropper's channel; the exact-numeric route keeps
the full eavesdropper density and integrates it instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .channel_dist import ordered_from_parent, ordered_pdf_factor
from .config import (EveVariant, Scenario, SicMode, SystemConfig,
                     derive_stats, effective_residual, nu)
from .special_math import density_kernel, gauss_laguerre, survival_kernel

__all__ = [
    "DEFAULT_QUAD_ORDER",
    "IntegrationError",
    "SopUnderflowError",
    "SecrecyQuery",
    "SecrecyReport",
    "UserSecrecy",
    "cdf_sinr_legit",
    "sinr_eve_cdf",
    "pdf_sinr_eve",
    "sop_closed_form",
    "sop_exact_numeric",
    "sop_asymptotic",
    "diversity_order_estimate",
    "system_sop",
    "throughput_delay_limited",
    "secrecy_rate",
    "reported_users",
]

DEFAULT_QUAD_ORDER = 300


class IntegrationError(RuntimeError):
    """Numeric SOP integration failed to reach the requested tolerance."""


class SopUnderflowError(RuntimeError):
    """SOP underflowed on a diversity grid; the estimate is omitted."""


@dataclass(frozen=True)
class SecrecyQuery:
    """One secrecy question: which user, which message rank, which regime."""

    user_k: int
    decode_g: int
    scenario: Scenario
    sic_mode: SicMode
    quad_order_d: int = DEFAULT_QUAD_ORDER
    quad_order_s: int = DEFAULT_QUAD_ORDER

    def __post_init__(self):
        if not 1 <= self.decode_g <= self.user_k:
            raise ValueError("need 1 <= decode_g <= user_k")
        if Scenario(self.scenario) is Scenario.INTERNAL and self.user_k < 2:
            raise ValueError("internal eavesdropping reports users k >= 2")


@dataclass(frozen=True)
class UserSecrecy:
    user_k: int
    analytic_sop: float
    asymptotic_sop: float
    empirical_sop: float | None = None
    empirical_stderr: float | None = None
    diversity_estimate: float | None = None


@dataclass(frozen=True)
class SecrecyReport:
    per_user: tuple[UserSecrecy, ...]
    system_sop: float
    throughput_bpcu: float


def reported_users(config: SystemConfig, scenario: Scenario) -> list[int]:
    """Users with a secrecy target: all of them externally, all but the
    weakest one internally (the weakest user is the eavesdropper there)."""
    first = 2 if Scenario(scenario) is Scenario.INTERNAL else 1
    return list(range(first, config.user_count + 1))


def _validate_ranks(config: SystemConfig, k: int, g: int):
    if not 1 <= g <= k <= config.user_count:
        raise ValueError(
            f"invalid rank combination g={g}, k={k} for {config.user_count} users")


def cdf_sinr_legit(x, k: int, g: int, config: SystemConfig,
                   sic_mode: SicMode, d_order: int = DEFAULT_QUAD_ORDER):
    """CDF of the SINR at user k when decoding user g's message (g <= k).

    The SINR supremum is a_g/nu_g, so the CDF saturates at 1 there.  Under
    imperfect SIC the residual-interference expectation runs over the
    Gauss-Laguerre nodes; perfect SIC needs no quadrature.
    """
    _validate_ranks(config, k, g)
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x < 0):
        raise ValueError("SINR argument must be >= 0")
    stats = derive_stats(config)
    n_users = config.user_count
    q = config.group_size
    a_g = config.power_alloc[g - 1]
    nu_g = nu(config, g)
    zeta2 = stats.rho * stats.n_br * stats.n_rk[k - 1]
    varpi = effective_residual(config, sic_mode)

    out = np.ones_like(x)
    below = x < a_g / nu_g if nu_g > 0 else np.ones_like(x, dtype=bool)
    xb = x[below]
    if xb.size:
        base = xb / ((a_g - nu_g * xb) * zeta2)
        if varpi == 0.0:
            out[below] = ordered_from_parent(
                1.0 - survival_kernel(q, base), k, n_users)
        else:
            rule = gauss_laguerre(d_order)
            scale = varpi * stats.rho * stats.n_ipu
            u = (scale * rule.nodes[:, None] + 1.0) * base[None, :]
            ordered = ordered_from_parent(
                1.0 - survival_kernel(q, u), k, n_users)
            out[below] = rule.weights @ ordered
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def _eve_geometry(config: SystemConfig, stats, scenario: Scenario):
    """Second-hop variance of the eavesdropper's cascade and whether the
    parent distribution is the rank-1 ordered one (internal Eve)."""
    if Scenario(scenario) is Scenario.INTERNAL:
        return stats.n_rk[0], True
    return stats.n_re, False


def _eve_kernel_scale(config: SystemConfig, stats, scenario: Scenario,
                      sic_mode: SicMode) -> float:
    """1/(rho_e * N_br * N_second-hop); under the as-printed audit variant
    the perfect-SIC external form drops the cascade variances."""
    var_b, _ = _eve_geometry(config, stats, scenario)
    drop_scale = (config.eve_interference_variant is EveVariant.AS_PRINTED
                  and Scenario(scenario) is Scenario.EXTERNAL
                  and SicMode(sic_mode) is SicMode.PERFECT)
    if drop_scale:
        return 1.0 / stats.rho_e
    return 1.0 / (stats.rho_e * stats.n_br * var_b)


def sinr_eve_cdf(x, k: int, config: SystemConfig, scenario: Scenario,
                 sic_mode: SicMode, s_order: int = DEFAULT_QUAD_ORDER):
    """CDF of the eavesdropper's SINR when decoding user k's message.

    External Eve sees the plain cascade; the internal Eve is the weakest
    user, so her channel is the rank-1 order statistic.  Arguments at or
    above the SINR supremum a_k/nu_k return 1 (saturation, not an error).
    """
    _validate_ranks(config, k, k)
    if Scenario(scenario) is Scenario.INTERNAL and k < 2:
        raise ValueError("internal eavesdropping targets users k >= 2")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(x < 0):
        raise ValueError("SINR argument must be >= 0")
    stats = derive_stats(config)
    q = config.group_size
    n_users = config.user_count
    a_k = config.power_alloc[k - 1]
    nu_k = nu(config, k)
    varpi = effective_residual(config, sic_mode)
    kernel_scale = _eve_kernel_scale(config, stats, scenario, sic_mode)
    _, rank_one = _eve_geometry(config, stats, scenario)

    out = np.ones_like(x)
    below = x < a_k / nu_k if nu_k > 0 else np.ones_like(x, dtype=bool)
    xb = x[below]
    if xb.size:
        base = kernel_scale * xb / (a_k - nu_k * xb)

        def parent(u):
            b = 1.0 - survival_kernel(q, u)
            return ordered_from_parent(b, 1, n_users) if rank_one else b

        if varpi == 0.0:
            out[below] = parent(base)
        else:
            rule = gauss_laguerre(s_order)
            scale = varpi * stats.rho_e * stats.n_ipe
            u = (scale * rule.nodes[:, None] + 1.0) * base[None, :]
            out[below] = rule.weights @ parent(u)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def pdf_sinr_eve(x, k: int, config: SystemConfig, scenario: Scenario,
                 sic_mode: SicMode, s_order: int = DEFAULT_QUAD_ORDER):
    """Density of the eavesdropper's SINR; zero outside (0, a_k/nu_k).

    Derivative of ``sinr_eve_cdf`` in closed form: with u(x) the kernel
    transform, dF/dx = parent'(u) * u'(x), where parent' is the cascade
    density kernel times the rank-1 order-statistic factor when internal.
    """
    _validate_ranks(config, k, k)
    if Scenario(scenario) is Scenario.INTERNAL and k < 2:
        raise ValueError("internal eavesdropping targets users k >= 2")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    stats = derive_stats(config)
    q = config.group_size
    n_users = config.user_count
    a_k = config.power_alloc[k - 1]
    nu_k = nu(config, k)
    varpi = effective_residual(config, sic_mode)
    kernel_scale = _eve_kernel_scale(config, stats, scenario, sic_mode)
    _, rank_one = _eve_geometry(config, stats, scenario)

    out = np.zeros_like(x)
    sup = a_k / nu_k if nu_k > 0 else math.inf
    inside = (x > 0) & (x < sup)
    xi = x[inside]
    if xi.size:
        # u = c * x/(a_k - nu_k x)  =>  u' = c * a_k/(a_k - nu_k x)^2
        base = kernel_scale * xi / (a_k - nu_k * xi)
        dbase = kernel_scale * a_k / (a_k - nu_k * xi) ** 2

        def parent_pdf(u):
            dens = density_kernel(q, u)
            if rank_one:
                b = 1.0 - survival_kernel(q, u)
                dens = dens * ordered_pdf_factor(b, 1, n_users)
            return dens

        if varpi == 0.0:
            out[inside] = parent_pdf(base) * dbase
        else:
            rule = gauss_laguerre(s_order)
            scale = varpi * stats.rho_e * stats.n_ipe
            factor = scale * rule.nodes[:, None] + 1.0
            u = factor * base[None, :]
            out[inside] = rule.weights @ (parent_pdf(u) * factor) * dbase
    return float(out[0]) if scalar else out


def _eve_mean_power(config: SystemConfig, stats, scenario: Scenario) -> float:
    """Mean cascaded power at the eavesdropper, Q * N_br * N_second-hop."""
    var_b, _ = _eve_geometry(config, stats, scenario)
    return config.group_size * stats.n_br * var_b


def _outage_thresholds(config: SystemConfig, stats, k: int,
                       scenario: Scenario, sic_mode: SicMode,
                       s_order: int):
    """Outage thresholds after the mean-power substitution for the Eve
    channel: one per quadrature node under imperfect SIC (the node carries
    the Eve-side residual), a single value under perfect SIC.

    Returns (thresholds, weights); weights is None for the single-value case.
    """
    a_k = config.power_alloc[k - 1]
    nu_k = nu(config, k)
    rate = config.target_rates[k - 1]
    mean_pow = _eve_mean_power(config, stats, scenario)
    varpi = effective_residual(config, sic_mode)
    numer = mean_pow * a_k * stats.rho_e
    gain = 2.0 ** rate

    include_nu = (config.eve_interference_variant is EveVariant.WITH_NU_TERM
                  or Scenario(scenario) is Scenario.INTERNAL
                  or varpi == 0.0)
    nu_term = stats.rho_e * mean_pow * nu_k if include_nu else 0.0

    if varpi == 0.0:
        thr = gain * (1.0 + numer / (nu_term + 1.0)) - 1.0
        return np.array([thr]), None
    rule = gauss_laguerre(s_order)
    denom = nu_term + varpi * stats.rho_e * stats.n_ipe * rule.nodes + 1.0
    return gain * (1.0 + numer / denom) - 1.0, rule.weights


def sop_closed_form(k: int, config: SystemConfig, scenario: Scenario,
                    sic_mode: SicMode,
                    d_order: int = DEFAULT_QUAD_ORDER,
                    s_order: int = DEFAULT_QUAD_ORDER) -> float:
    """Secrecy outage probability of user k via the mean-power substitution.

    Evaluates the legitimate SINR CDF at the outage threshold(s); thresholds
    at or beyond the SINR supremum contribute a saturated 1.
    """
    _validate_ranks(config, k, k)
    if Scenario(scenario) is Scenario.INTERNAL and k < 2:
        raise ValueError("internal eavesdropping targets users k >= 2")
    stats = derive_stats(config)
    thresholds, weights = _outage_thresholds(
        config, stats, k, scenario, sic_mode, s_order)
    cdf_vals = cdf_sinr_legit(thresholds, k, k, config, sic_mode, d_order)
    if weights is None:
        return float(np.clip(cdf_vals[0], 0.0, 1.0))
    return float(np.clip(weights @ cdf_vals, 0.0, 1.0))


def sop_exact_numeric(k: int, config: SystemConfig, scenario: Scenario,
                      sic_mode: SicMode,
                      d_order: int = DEFAULT_QUAD_ORDER,
                      s_order: int = DEFAULT_QUAD_ORDER,
                      tol: float = 1e-7) -> float:
    """SOP without the Eve mean-power substitution: adaptive integration of
    the eavesdropper SINR density against the legitimate SINR CDF.

    The gap to ``sop_closed_form`` isolates the mean-substitution error from
    quadrature error.
    """
    _validate_ranks(config, k, k)
    if Scenario(scenario) is Scenario.INTERNAL and k < 2:
        raise ValueError("internal eavesdropping targets users k >= 2")
    a_k = config.power_alloc[k - 1]
    nu_k = nu(config, k)
    rate = config.target_rates[k - 1]
    gain = 2.0 ** rate

    def integrand(x):
        f = pdf_sinr_eve(x, k, config, scenario, sic_mode, s_order)
        cdf = cdf_sinr_legit(gain * (1.0 + x) - 1.0, k, k, config,
                             sic_mode, d_order)
        return f * cdf

    if nu_k > 0:
        sup = a_k / nu_k
        pts = sup * np.array([1e-9, 1e-6, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.2,
                              0.4, 0.6, 0.8, 0.9, 0.99, 0.999])
        val, err = integrate.quad(integrand, 0.0, sup, points=list(pts),
                                  limit=400, epsabs=1e-11, epsrel=1e-9)
    else:
        # unbounded support for the strongest user; map x = t/(1-t)
        def mapped(t):
            x = t / (1.0 - t)
            return integrand(x) / (1.0 - t) ** 2

        pts = list(1.0 - 1.0 / (1.0 + np.array(
            [1e-9, 1e-6, 1e-4, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e4])))
        val, err = integrate.quad(mapped, 0.0, 1.0, points=pts,
                                  limit=400, epsabs=1e-11, epsrel=1e-9)
    if err > max(tol, 1e-3 * max(val, 1e-12)):
        raise IntegrationError(
            f"outage integral achieved tolerance {err:.2e} "
            f"(requested {tol:.2e})")
    return float(min(max(val, 0.0), 1.0))


def sop_asymptotic(k: int, config: SystemConfig, scenario: Scenario,
                   sic_mode: SicMode,
                   d_order: int = DEFAULT_QUAD_ORDER,
                   s_order: int = DEFAULT_QUAD_ORDER) -> float:
    """High-SNR secrecy outage asymptote; raw value, not clamped to [0, 1],
    so slope analysis stays untouched (clamp only when reporting).

    Imperfect SIC: the legitimate-side kernel keeps only the residual term,
    making the value independent of the legitimate SNR (the error floor).
    Perfect SIC: small-argument expansion of the cascade CDF, the log form
    for a single live element and the power form otherwise.
    """
    _validate_ranks(config, k, k)
    if Scenario(scenario) is Scenario.INTERNAL and k < 2:
        raise ValueError("internal eavesdropping targets users k >= 2")
    stats = derive_stats(config)
    q = config.group_size
    n_users = config.user_count
    a_k = config.power_alloc[k - 1]
    nu_k = nu(config, k)
    varpi = effective_residual(config, sic_mode)
    thresholds, weights = _outage_thresholds(
        config, stats, k, scenario, sic_mode, s_order)

    if varpi > 0.0:
        rule_d = gauss_laguerre(d_order)
        acc = 0.0
        denom_scale = stats.n_br * stats.n_rk[k - 1]
        for thr, w_s in zip(thresholds, weights):
            if nu_k > 0 and thr >= a_k / nu_k:
                acc += w_s
                continue
            v = thr * stats.n_ipu * varpi * rule_d.nodes / (
                (a_k - thr * nu_k) * denom_scale)
            ordered = ordered_from_parent(1.0 - survival_kernel(q, v),
                                          k, n_users)
            acc += w_s * float(rule_d.weights @ ordered)
        return acc

    thr = float(thresholds[0])
    if nu_k > 0 and thr >= a_k / nu_k:
        return 1.0
    zeta2 = stats.rho * stats.n_br * stats.n_rk[k - 1]
    s_val = thr / ((a_k - nu_k * thr) * zeta2)
    kappa = math.factorial(n_users) / (
        math.factorial(n_users - k) * math.factorial(k - 1))
    if q == 1:
        return kappa / k * (-s_val * math.log(s_val)) ** k
    return kappa / k * (s_val / (q - 1)) ** k


def diversity_order_estimate(k: int, config: SystemConfig, scenario: Scenario,
                             sic_mode: SicMode, rho_grid_db,
                             curve: str = "analytic",
                             d_order: int = DEFAULT_QUAD_ORDER,
                             s_order: int = DEFAULT_QUAD_ORDER) -> float:
    """Negative least-squares slope of log10 SOP against log10 SNR.

    ``curve`` selects the closed form ("analytic") or the high-SNR
    asymptote ("asymptotic", used where the closed form underflows).
    """
    rho_grid_db = list(rho_grid_db)
    if len(rho_grid_db) < 2:
        raise ValueError("need at least two SNR grid points")
    fn = {"analytic": sop_closed_form, "asymptotic": sop_asymptotic}[curve]
    vals = []
    for db in rho_grid_db:
        cfg = config.with_overrides(snr_legit_db=float(db))
        v = fn(k, cfg, scenario, sic_mode, d_order, s_order)
        if not v > 1e-300:
            raise SopUnderflowError(
                f"SOP underflowed at {db} dB (user {k}); estimate omitted")
        vals.append(v)
    log_rho = np.asarray(rho_grid_db, dtype=float) / 10.0
    slope = np.polyfit(log_rho, np.log10(vals), 1)[0]
    return float(-slope)


def system_sop(per_user_sop) -> float:
    """1 - prod_k (1 - SOP_k): the network is in secrecy outage as soon as
    any reported user is."""
    out = 1.0
    for p in per_user_sop:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        out *= 1.0 - p
    return 1.0 - out


def throughput_delay_limited(per_user_sop, target_rates) -> float:
    """Delay-limited secrecy throughput sum_k (1 - SOP_k) * R_k in BPCU."""
    per_user_sop = list(per_user_sop)
    target_rates = list(target_rates)
    if len(per_user_sop) != len(target_rates):
        raise ValueError("SOP and rate lists must have equal length")
    total = 0.0
    for p, r in zip(per_user_sop, target_rates):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p} outside [0, 1]")
        if r < 0:
            raise ValueError("rates must be >= 0")
        total += (1.0 - p) * r
    return total


def secrecy_rate(gamma_legit, gamma_eve):
    """[log2(1+gamma_legit) - log2(1+gamma_eve)]^+ in BPCU (vectorised)."""
    gl = np.asarray(gamma_legit, dtype=float)
    ge = np.asarray(gamma_eve, dtype=float)
    if np.any(gl < 0) or np.any(ge < 0):
        raise ValueError("SINRs must be >= 0")
    out = np.maximum(np.log2(1.0 + gl) - np.log2(1.0 + ge), 0.0)
    return float(out) if out.ndim == 0 else out
