"""Parameter sweeps emitting CSV rows, one per (sweep value, user).

The sweep layer contains no mathematics: every emitted number is produced
by a library operation, and analytic-only runs never construct a random
generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import monte_carlo, secrecy_engine
from .config import ConfigError, Scenario, SicMode, SystemConfig
from .monte_carlo import EveMode, OrderingMode
from .secrecy_engine import (DEFAULT_QUAD_ORDER, SecrecyReport, UserSecrecy,
                             reported_users)

__all__ = ["SweepError", "SweepSpec", "CSV_COLUMNS", "sweep_values",
           "run_sweep", "secrecy_report"]

SWEEP_VARIABLES = ("snr_db", "snr_eve_db", "power_offset_aT",
                   "ris_elements", "target_rate")
OUTPUT_KINDS = ("analytic", "asymptotic", "empirical", "system_sop",
                "throughput")
CSV_COLUMNS = ("sweep_value", "user_k", "analytic_sop", "asymptotic_sop",
               "empirical_sop", "empirical_stderr", "system_sop",
               "throughput_bpcu", "scenario", "sic_mode")


class SweepError(ValueError):
    """Invalid sweep specification."""


@dataclass(frozen=True)
class SweepSpec:
    config: SystemConfig
    scenario: Scenario
    sic_modes: tuple[SicMode, ...]
    sweep_variable: str
    start: float
    end: float
    step: float
    outputs: tuple[str, ...] = ("analytic",)
    trials: int = 1_000_000
    seed: int = 0
    ordering_mode: OrderingMode = OrderingMode.COMMON_VARIANCE
    eve_mode: EveMode = EveMode.SAMPLED
    workers: int = 1
    quad_order_d: int = DEFAULT_QUAD_ORDER
    quad_order_s: int = DEFAULT_QUAD_ORDER

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        object.__setattr__(self, "sic_modes",
                           tuple(SicMode(m) for m in self.sic_modes))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "ordering_mode", OrderingMode(self.ordering_mode))
        object.__setattr__(self, "eve_mode", EveMode(self.eve_mode))
        if self.sweep_variable not in SWEEP_VARIABLES:
            raise SweepError(f"unknown sweep variable {self.sweep_variable!r}; "
                             f"one of {SWEEP_VARIABLES}")
        unknown = set(self.outputs) - set(OUTPUT_KINDS)
        if unknown:
            raise SweepError(f"unknown outputs {sorted(unknown)}")
        if not self.outputs:
            raise SweepError("at least one output kind is required")
        if not self.sic_modes:
            raise SweepError("at least one SIC mode is required")
        if self.start > self.end:
            raise SweepError(f"empty range: start {self.start} > end {self.end}")
        if self.step <= 0:
            raise SweepError(f"step must be > 0, got {self.step}")
        if "empirical" in self.outputs and self.trials < 1:
            raise SweepError("empirical output needs trials >= 1")
        if self.workers < 1:
            raise SweepError("workers must be >= 1")


def sweep_values(spec: SweepSpec) -> list[float]:
    n = int(math.floor((spec.end - spec.start) / spec.step + 1e-9)) + 1
    return [spec.start + i * spec.step for i in range(n)]


def _apply_variable(config: SystemConfig, variable: str,
                    value: float) -> SystemConfig:
    if variable == "snr_db":
        return config.with_overrides(snr_legit_db=value)
    if variable == "snr_eve_db":
        return config.with_overrides(snr_eve_db=value)
    if variable == "target_rate":
        return config.with_overrides(
            target_rates=(value,) * config.user_count)
    if variable == "ris_elements":
        m = int(round(value))
        if m % config.partition_p:
            raise SweepError(f"ris_elements {m} not divisible by "
                             f"partition_p {config.partition_p}")
        return config.with_overrides(ris_elements=m,
                                     group_size=m // config.partition_p)
    if variable == "power_offset_aT":
        if config.user_count != 2:
            raise SweepError("power_offset_aT sweeps need a two-user config")
        return config.with_overrides(power_alloc=(value, 1.0 - value))
    raise SweepError(f"unknown sweep variable {variable!r}")


def _clamp01(x: float) -> float:
    return min(max(x, 0.0), 1.0)


def secrecy_report(config: SystemConfig, scenario: Scenario,
                   sic_mode: SicMode, *, trials: int = 0, seed: int = 0,
                   ordering_mode: OrderingMode = OrderingMode.COMMON_VARIANCE,
                   eve_mode: EveMode = EveMode.SAMPLED, workers: int = 1,
                   diversity_grid_db=None,
                   d_order: int = DEFAULT_QUAD_ORDER,
                   s_order: int = DEFAULT_QUAD_ORDER) -> SecrecyReport:
    """Analytic (and optionally empirical) secrecy summary of one point."""
    users = reported_users(config, scenario)
    sim = None
    if trials:
        sim = monte_carlo.empirical_sop(config, scenario, sic_mode, trials,
                                        seed, ordering_mode, eve_mode, workers)
    per_user = []
    for i, k in enumerate(users):
        analytic = secrecy_engine.sop_closed_form(
            k, config, scenario, sic_mode, d_order, s_order)
        asymptotic = _clamp01(secrecy_engine.sop_asymptotic(
            k, config, scenario, sic_mode, d_order, s_order))
        diversity = None
        if diversity_grid_db is not None:
            try:
                diversity = secrecy_engine.diversity_order_estimate(
                    k, config, scenario, sic_mode, diversity_grid_db,
                    d_order=d_order, s_order=s_order)
            except secrecy_engine.SopUnderflowError:
                diversity = None
        per_user.append(UserSecrecy(
            user_k=k,
            analytic_sop=analytic,
            asymptotic_sop=asymptotic,
            empirical_sop=sim.empirical_sop[i] if sim else None,
            empirical_stderr=sim.standard_error[i] if sim else None,
            diversity_estimate=diversity))
    sops = [u.analytic_sop for u in per_user]
    rates = [config.target_rates[k - 1] for k in users]
    return SecrecyReport(
        per_user=tuple(per_user),
        system_sop=secrecy_engine.system_sop(sops),
        throughput_bpcu=secrecy_engine.throughput_delay_limited(sops, rates))


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def run_sweep(spec: SweepSpec, stream) -> list[dict]:
    """Write the sweep CSV to ``stream``; also return the rows as dicts.

    Row order is (SIC mode, sweep value, user), fixed regardless of worker
    count, and empirical counters are integers merged additively, so the
    emitted bytes depend only on the spec.
    """
    rows = []
    stream.write(",".join(CSV_COLUMNS) + "\n")
    want = set(spec.outputs)
    for sic_mode in spec.sic_modes:
        for value in sweep_values(spec):
            try:
                cfg = _apply_variable(spec.config, spec.sweep_variable, value)
            except ConfigError as exc:
                raise SweepError(f"sweep value {value}: {exc}") from exc
            users = reported_users(cfg, spec.scenario)
            analytic = asymptotic = None
            sim = None
            if want & {"analytic", "system_sop", "throughput"}:
                analytic = [secrecy_engine.sop_closed_form(
                    k, cfg, spec.scenario, sic_mode,
                    spec.quad_order_d, spec.quad_order_s) for k in users]
            if "asymptotic" in want:
                asymptotic = [_clamp01(secrecy_engine.sop_asymptotic(
                    k, cfg, spec.scenario, sic_mode,
                    spec.quad_order_d, spec.quad_order_s)) for k in users]
            if "empirical" in want:
                sim = monte_carlo.empirical_sop(
                    cfg, spec.scenario, sic_mode, spec.trials, spec.seed,
                    spec.ordering_mode, spec.eve_mode, spec.workers)
            source = analytic if analytic is not None else list(sim.empirical_sop)
            sys_sop = secrecy_engine.system_sop(source) \
                if "system_sop" in want else None
            rates = [cfg.target_rates[k - 1] for k in users]
            thr = secrecy_engine.throughput_delay_limited(source, rates) \
                if "throughput" in want else None
            for i, k in enumerate(users):
                row = {
                    "sweep_value": value,
                    "user_k": k,
                    "analytic_sop":
                        analytic[i] if "analytic" in want else None,
                    "asymptotic_sop":
                        asymptotic[i] if asymptotic is not None else None,
                    "empirical_sop": sim.empirical_sop[i] if sim else None,
                    "empirical_stderr":
                        sim.standard_error[i] if sim else None,
                    "system_sop": sys_sop,
                    "throughput_bpcu": thr,
                    "scenario": spec.scenario.value,
                    "sic_mode": sic_mode.value,
                }
                rows.append(row)
                stream.write(",".join(
                    [_fmt(row["sweep_value"]), str(row["user_k"])]
                    + [_fmt(row[c]) for c in CSV_COLUMNS[2:8]]
                    + [row["scenario"], row["sic_mode"]]) + "\n")
    return rows
