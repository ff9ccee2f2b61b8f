"""Seeded simulation oracle for the link model.

Sampling follows the signal model literally: every fading coefficient is an
independent circularly-symmetric complex Gaussian, a cascade over the Q live
elements is sum_m conj(second_hop_m) * first_hop_m, user ordering acts on
the squared cascade magnitudes, and residual SIC interference is redrawn
every trial.  Cascade draws use independent first hops per copy so the
order statistics match the i.i.d. analysis exactly (a shared first hop
correlates the users and visibly shifts the ordered marginals).

Streams are counter-based: trial blocks of ``BLOCK_TRIALS`` derive their
generator from (master_seed, stream tag, block index), so results are
invariant to worker count and block scheduling.  Changing ``BLOCK_TRIALS``
changes the stream layout and therefore the sampled values.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import (Scenario, SicMode, SystemConfig, derive_stats,
                     effective_residual, nu)
from .secrecy_engine import reported_users, secrecy_rate, throughput_delay_limited

__all__ = [
    "BLOCK_TRIALS",
    "OrderingMode",
    "EveMode",
    "ChannelRealization",
    "SimResult",
    "sample_realization",
    "empirical_sop",
    "empirical_throughput",
    "oma_baseline_sop",
]

BLOCK_TRIALS = 32768

# stream tags keep the single-trial API, the outage runs and the OMA
# baseline on non-overlapping substreams of the same master seed
_STREAM_REALIZATION = 0
_STREAM_SOP = 1
_STREAM_OMA = 2


class OrderingMode(str, enum.Enum):
    """How ordered cascades are sampled.

    COMMON_VARIANCE: the k-th order statistic of K i.i.d. cascades drawn
    with the target user's own second-hop variance (matches the analytical
    ordered CDF exactly).  PER_USER_DISTANCE: one cascade per user with that
    user's variance, sorted ascending, rank mapped to user (the physical
    reading of distance-dependent ordering).
    """

    COMMON_VARIANCE = "common_variance"
    PER_USER_DISTANCE = "per_user_distance"


class EveMode(str, enum.Enum):
    """SAMPLED redraws the eavesdropper cascade every trial; MEAN_FIELD
    replaces its squared magnitude by the mean power Q*N_br*N_x, the
    substitution baked into the closed-form outage expressions."""

    SAMPLED = "sampled"
    MEAN_FIELD = "mean_field"


@dataclass(frozen=True)
class ChannelRealization:
    """All fading coefficients of one trial.

    ``cascades`` holds the per-user squared cascade magnitudes sorted
    ascending (the on-off model orders users by cascaded gain).
    """

    h_br: np.ndarray
    h_rk: np.ndarray
    h_re: np.ndarray
    h_ipu: complex
    h_ipe: complex
    cascades: tuple[float, ...]
    cascade_eve: float


@dataclass(frozen=True)
class SimResult:
    users: tuple[int, ...]
    trials: int
    outage_count: tuple[int, ...]
    empirical_sop: tuple[float, ...]
    standard_error: tuple[float, ...]
    seed: int


def _generator(master_seed: int, stream: int, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed, spawn_key=(stream, index))
    return np.random.Generator(np.random.Philox(seq))


def _complex_gaussian(rng, var, shape):
    z = rng.standard_normal(shape + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * math.sqrt(var / 2.0)


def sample_realization(config: SystemConfig, stats, trial_index: int,
                       master_seed: int) -> ChannelRealization:
    """One deterministic channel draw: a pure function of (seed, index)."""
    rng = _generator(master_seed, _STREAM_REALIZATION, trial_index)
    q = config.group_size
    k_users = config.user_count
    h_br = _complex_gaussian(rng, stats.n_br, (q,))
    h_rk = np.stack([_complex_gaussian(rng, stats.n_rk[i], (q,))
                     for i in range(k_users)])
    h_re = _complex_gaussian(rng, stats.n_re, (q,))
    h_ipu = complex(_complex_gaussian(rng, stats.n_ipu, ()))
    h_ipe = complex(_complex_gaussian(rng, stats.n_ipe, ()))
    per_user = np.abs(np.sum(np.conj(h_rk) * h_br[None, :], axis=1)) ** 2
    cascade_eve = float(np.abs(np.sum(np.conj(h_re) * h_br)) ** 2)
    return ChannelRealization(
        h_br=h_br, h_rk=h_rk, h_re=h_re, h_ipu=h_ipu, h_ipe=h_ipe,
        cascades=tuple(np.sort(per_user)), cascade_eve=cascade_eve)


def _draw_cascades(rng, n_trials, var_second, q, var_first):
    """n_trials x len(var_second) squared cascade magnitudes, every copy with
    its own first hop."""
    copies = len(var_second)
    a = _complex_gaussian(rng, var_first, (n_trials, copies, q))
    b = rng.standard_normal((n_trials, copies, q, 2))
    b = (b[..., 0] + 1j * b[..., 1]) * np.sqrt(
        np.asarray(var_second)[None, :, None] / 2.0)
    return np.abs(np.sum(np.conj(b) * a, axis=2)) ** 2


def _sop_block_counts(config: SystemConfig, scenario: Scenario,
                      sic_mode: SicMode, ordering_mode: OrderingMode,
                      eve_mode: EveMode, master_seed: int,
                      block_indices, trials: int) -> np.ndarray:
    """Outage counts over the given blocks; the merge across blocks and
    workers is integer addition, so any partition gives identical totals."""
    stats = derive_stats(config)
    k_users = config.user_count
    q = config.group_size
    users = reported_users(config, scenario)
    varpi = effective_residual(config, sic_mode)
    internal = Scenario(scenario) is Scenario.INTERNAL
    a = np.asarray(config.power_alloc)
    nus = np.asarray([nu(config, g) for g in range(1, k_users + 1)])
    counts = np.zeros(len(users), dtype=np.int64)

    for block in block_indices:
        size = min(BLOCK_TRIALS, trials - block * BLOCK_TRIALS)
        rng = _generator(master_seed, _STREAM_SOP, block)

        per_user_gain = {}
        eve_parent = None
        if ordering_mode is OrderingMode.PER_USER_DISTANCE:
            gains = np.sort(_draw_cascades(rng, size, stats.n_rk, q, stats.n_br),
                            axis=1)
            for k in users:
                per_user_gain[k] = gains[:, k - 1]
            eve_parent = gains[:, 0]
        else:
            for k in users:
                same = [stats.n_rk[k - 1]] * k_users
                gains = np.sort(_draw_cascades(rng, size, same, q, stats.n_br),
                                axis=1)
                per_user_gain[k] = gains[:, k - 1]
            if internal and eve_mode is EveMode.SAMPLED:
                same = [stats.n_rk[0]] * k_users
                eve_parent = np.sort(
                    _draw_cascades(rng, size, same, q, stats.n_br), axis=1)[:, 0]

        if internal:
            if eve_mode is EveMode.SAMPLED:
                c_eve = eve_parent
            else:
                c_eve = q * stats.n_br * stats.n_rk[0]
        else:
            if eve_mode is EveMode.SAMPLED:
                c_eve = _draw_cascades(rng, size, [stats.n_re], q,
                                       stats.n_br)[:, 0]
            else:
                c_eve = q * stats.n_br * stats.n_re

        r_u = rng.exponential(stats.n_ipu, size=(size, k_users))
        r_e = rng.exponential(stats.n_ipe, size=size)

        for idx, k in enumerate(users):
            c_k = per_user_gain[k]
            g_legit = (stats.rho * c_k * a[k - 1]
                       / (stats.rho * c_k * nus[k - 1]
                          + varpi * stats.rho * r_u[:, k - 1] + 1.0))
            g_eve = (stats.rho_e * c_eve * a[k - 1]
                     / (stats.rho_e * c_eve * nus[k - 1]
                        + varpi * stats.rho_e * r_e + 1.0))
            rate = secrecy_rate(g_legit, g_eve)
            counts[idx] += int(np.count_nonzero(
                rate < config.target_rates[k - 1]))
    return counts


def _chunk(seq, n_chunks):
    step = math.ceil(len(seq) / n_chunks)
    return [seq[i:i + step] for i in range(0, len(seq), step)]


def empirical_sop(config: SystemConfig, scenario: Scenario, sic_mode: SicMode,
                  trials: int, master_seed: int,
                  ordering_mode: OrderingMode = OrderingMode.COMMON_VARIANCE,
                  eve_mode: EveMode = EveMode.SAMPLED,
                  workers: int = 1) -> SimResult:
    """Per-user secrecy outage frequencies with Wald standard errors."""
    if trials < 1:
        raise ValueError("need at least one trial")
    scenario = Scenario(scenario)
    sic_mode = SicMode(sic_mode)
    ordering_mode = OrderingMode(ordering_mode)
    eve_mode = EveMode(eve_mode)
    users = reported_users(config, scenario)
    blocks = list(range(math.ceil(trials / BLOCK_TRIALS)))
    if workers > 1 and len(blocks) > 1:
        parts = _chunk(blocks, workers)
        with ProcessPoolExecutor(max_workers=len(parts)) as pool:
            futures = [pool.submit(_sop_block_counts, config, scenario,
                                   sic_mode, ordering_mode, eve_mode,
                                   master_seed, part, trials)
                       for part in parts]
            counts = sum(f.result() for f in futures)
    else:
        counts = _sop_block_counts(config, scenario, sic_mode, ordering_mode,
                                   eve_mode, master_seed, blocks, trials)
    p = counts / trials
    stderr = np.sqrt(p * (1.0 - p) / trials)
    return SimResult(users=tuple(users), trials=trials,
                     outage_count=tuple(int(c) for c in counts),
                     empirical_sop=tuple(float(v) for v in p),
                     standard_error=tuple(float(s) for s in stderr),
                     seed=master_seed)


def empirical_throughput(config: SystemConfig, scenario: Scenario,
                         sic_mode: SicMode, trials: int, master_seed: int,
                         ordering_mode: OrderingMode = OrderingMode.COMMON_VARIANCE,
                         eve_mode: EveMode = EveMode.SAMPLED,
                         workers: int = 1) -> float:
    """Delay-limited throughput evaluated with the empirical outage rates."""
    result = empirical_sop(config, scenario, sic_mode, trials, master_seed,
                           ordering_mode, eve_mode, workers)
    rates = [config.target_rates[k - 1] for k in result.users]
    return throughput_delay_limited(result.empirical_sop, rates)


def oma_baseline_sop(config: SystemConfig, trials: int,
                     master_seed: int) -> SimResult:
    """Orthogonal-access benchmark: each user gets one of K time slots at
    full power, so the secrecy rate carries a 1/K pre-log and the per-user
    threshold is the OMA target rate split evenly across slots.  User k
    keeps its rank in the gain ordering (its slot sees the k-th order
    statistic), matching the user labels of the scheme it benchmarks."""
    if trials < 1:
        raise ValueError("need at least one trial")
    stats = derive_stats(config)
    k_users = config.user_count
    q = config.group_size
    threshold = config.oma_rate_bpcu / k_users
    counts = np.zeros(k_users, dtype=np.int64)
    n_blocks = math.ceil(trials / BLOCK_TRIALS)
    for block in range(n_blocks):
        size = min(BLOCK_TRIALS, trials - block * BLOCK_TRIALS)
        rng = _generator(master_seed, _STREAM_OMA, block)
        gains = np.empty((size, k_users))
        for k in range(1, k_users + 1):
            same = [stats.n_rk[k - 1]] * k_users
            gains[:, k - 1] = np.sort(
                _draw_cascades(rng, size, same, q, stats.n_br), axis=1)[:, k - 1]
        c_eve = _draw_cascades(rng, size, [stats.n_re] * k_users, q, stats.n_br)
        rate = np.maximum(
            np.log2(1.0 + stats.rho * gains)
            - np.log2(1.0 + stats.rho_e * c_eve), 0.0) / k_users
        counts += np.count_nonzero(rate < threshold, axis=0)
    p = counts / trials
    stderr = np.sqrt(p * (1.0 - p) / trials)
    return SimResult(users=tuple(range(1, k_users + 1)), trials=trials,
                     outage_count=tuple(int(c) for c in counts),
                     empirical_sop=tuple(float(v) for v in p),
                     standard_error=tuple(float(s) for s in stderr),
                     seed=master_seed)
