"""Canonical scenario parameters and derived channel statistics.

A ``SystemConfig`` declares every symbol of the link model once and is
frozen after validation; ``derive_stats`` turns distances and dB levels
into the linear-domain variances every other module consumes.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, fields, replace

__all__ = [
    "ConfigError",
    "Scenario",
    "SicMode",
    "EveVariant",
    "SystemConfig",
    "ChannelStats",
    "derive_stats",
    "nu",
    "effective_residual",
    "db_to_linear",
    "linear_to_db",
    "config_from_dict",
    "config_to_dict",
    "load_config",
    "default_config",
]


class ConfigError(ValueError):
    """Invalid configuration; ``field_name`` identifies the offender."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


class Scenario(str, enum.Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"


class SicMode(str, enum.Enum):
    PERFECT = "perfect"
    IMPERFECT = "imperfect"


class EveVariant(str, enum.Enum):
    """Which reading of the eavesdropper interference terms to use.

    ``WITH_NU_TERM`` keeps the co-channel interference contribution in the
    external-Eve outage threshold and the cascade scale in the perfect-SIC
    eavesdropper CDF; ``AS_PRINTED`` drops both, for audit comparisons.
    """

    AS_PRINTED = "as_printed"
    WITH_NU_TERM = "with_nu_term"


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError("linear value must be positive")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """All scenario parameters for one operating point.

    ``ris_elements`` = ``partition_p`` * ``group_size``; only the elements of
    the active column reflect, so ``group_size`` is the number of live
    elements.  ``sic_residual`` is the residual-interference level applied
    when a query runs in imperfect-SIC mode (perfect SIC forces it to 0).
    """

    user_count: int
    ris_elements: int
    partition_p: int
    group_size: int
    power_alloc: tuple[float, ...]
    snr_legit_db: float
    snr_eve_db: float
    target_rates: tuple[float, ...]
    dist_bs_ris: float
    dist_ris_user: tuple[float, ...]
    dist_ris_eve: float
    path_loss_exponent: float = 2.0
    residual_user_db: float = -20.0
    residual_eve_db: float = -20.0
    sic_mode: SicMode = SicMode.PERFECT
    sic_residual: float = 1.0
    scenario: Scenario = Scenario.EXTERNAL
    active_column: int = 1
    an_power_alloc: float | None = None
    eve_interference_variant: EveVariant = EveVariant.WITH_NU_TERM
    oma_rate_bpcu: float = 0.12

    def __post_init__(self):
        object.__setattr__(self, "power_alloc", tuple(float(a) for a in self.power_alloc))
        object.__setattr__(self, "target_rates", tuple(float(r) for r in self.target_rates))
        object.__setattr__(self, "dist_ris_user", tuple(float(d) for d in self.dist_ris_user))
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        object.__setattr__(self, "sic_mode", SicMode(self.sic_mode))
        object.__setattr__(self, "eve_interference_variant",
                           EveVariant(self.eve_interference_variant))
        self._validate()

    def _validate(self):
        k = self.user_count
        if k < 1:
            raise ConfigError("user_count", "must be >= 1")
        if self.ris_elements < 1:
            raise ConfigError("ris_elements", "must be >= 1")
        if self.partition_p < 1 or self.group_size < 1:
            raise ConfigError("partition_p", "partition and group size must be >= 1")
        if self.ris_elements != self.partition_p * self.group_size:
            raise ConfigError("ris_elements",
                              f"must equal partition_p * group_size "
                              f"({self.partition_p} * {self.group_size})")
        if not 1 <= self.active_column <= self.partition_p:
            raise ConfigError("active_column", f"must be in [1, {self.partition_p}]")
        if len(self.power_alloc) != k:
            raise ConfigError("power_alloc", f"needs {k} entries")
        if abs(sum(self.power_alloc) - 1.0) > 1e-12:
            raise ConfigError("power_alloc", "must sum to 1")
        if any(a <= 0 for a in self.power_alloc):
            raise ConfigError("power_alloc", "entries must be > 0")
        if any(self.power_alloc[i] < self.power_alloc[i + 1] for i in range(k - 1)):
            raise ConfigError("power_alloc", "must be non-increasing (weakest user first)")
        if len(self.target_rates) != k:
            raise ConfigError("target_rates", f"needs {k} entries")
        if any(r < 0 for r in self.target_rates):
            raise ConfigError("target_rates", "must be >= 0")
        if len(self.dist_ris_user) != k:
            raise ConfigError("dist_ris_user", f"needs {k} entries")
        if self.dist_bs_ris <= 0 or self.dist_ris_eve <= 0 or any(
                d <= 0 for d in self.dist_ris_user):
            raise ConfigError("dist_ris_user", "all distances must be > 0")
        if self.path_loss_exponent <= 0:
            raise ConfigError("path_loss_exponent", "must be > 0")
        if not 0.0 <= self.sic_residual <= 1.0:
            raise ConfigError("sic_residual", "must be in [0, 1]")
        if self.scenario is Scenario.INTERNAL and k < 2:
            raise ConfigError("scenario", "internal eavesdropping needs user_count >= 2")
        if self.an_power_alloc is not None and not 0.0 <= self.an_power_alloc < 1.0:
            raise ConfigError("an_power_alloc", "must be in [0, 1)")
        if self.oma_rate_bpcu < 0:
            raise ConfigError("oma_rate_bpcu", "must be >= 0")

    def with_overrides(self, **kwargs) -> "SystemConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class ChannelStats:
    """Linear-domain distribution parameters derived from a config.

    ``zeta2_per_user[k-1]`` is the legitimate-link SNR-channel product
    rho * N_br * N_rk for user k.
    """

    n_br: float
    n_rk: tuple[float, ...]
    n_re: float
    n_ipu: float
    n_ipe: float
    rho: float
    rho_e: float
    zeta2_per_user: tuple[float, ...]


def derive_stats(config: SystemConfig) -> ChannelStats:
    """Variances from distances (N = d^-alpha) plus dB -> linear conversions."""
    alpha = config.path_loss_exponent
    n_br = config.dist_bs_ris ** -alpha
    n_rk = tuple(d ** -alpha for d in config.dist_ris_user)
    n_re = config.dist_ris_eve ** -alpha
    rho = db_to_linear(config.snr_legit_db)
    rho_e = db_to_linear(config.snr_eve_db)
    return ChannelStats(
        n_br=n_br,
        n_rk=n_rk,
        n_re=n_re,
        n_ipu=db_to_linear(config.residual_user_db),
        n_ipe=db_to_linear(config.residual_eve_db),
        rho=rho,
        rho_e=rho_e,
        zeta2_per_user=tuple(rho * n_br * v for v in n_rk),
    )


def nu(config: SystemConfig, g: int) -> float:
    """Tail power sum nu_g = a_{g+1} + ... + a_K; zero for the last user."""
    if not 1 <= g <= config.user_count:
        raise IndexError(f"user index {g} outside [1, {config.user_count}]")
    return float(sum(config.power_alloc[g:]))


def effective_residual(config: SystemConfig, sic_mode: SicMode) -> float:
    """Residual level actually entering the formulas for the given SIC mode."""
    return 0.0 if SicMode(sic_mode) is SicMode.PERFECT else config.sic_residual


# ---------------------------------------------------------------------------
# JSON interface: documents carry exactly the SystemConfig field names.
# ---------------------------------------------------------------------------

_FIELD_NAMES = None


def _field_names():
    global _FIELD_NAMES
    if _FIELD_NAMES is None:
        _FIELD_NAMES = {f.name for f in fields(SystemConfig)}
    return _FIELD_NAMES


def config_from_dict(doc: dict) -> SystemConfig:
    unknown = set(doc) - _field_names()
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    return SystemConfig(**doc)


def config_to_dict(config: SystemConfig) -> dict:
    doc = {}
    for f in fields(SystemConfig):
        v = getattr(config, f.name)
        if isinstance(v, enum.Enum):
            v = v.value
        elif isinstance(v, tuple):
            v = list(v)
        doc[f.name] = v
    return doc


def load_config(path: str) -> SystemConfig:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "configuration document must be a JSON object")
    return config_from_dict(doc)


def default_config() -> SystemConfig:
    """Three-user baseline: 16-element surface split into two columns of 8,
    unit path-loss geometry 3 m / {6, 4, 2} m / 8 m, allocation {.6, .3, .1},
    0.04 BPCU target rates, -20 dB residual levels, 10 dB eavesdropper SNR."""
    return SystemConfig(
        user_count=3,
        ris_elements=16,
        partition_p=2,
        group_size=8,
        power_alloc=(0.6, 0.3, 0.1),
        snr_legit_db=10.0,
        snr_eve_db=10.0,
        target_rates=(0.04, 0.04, 0.04),
        dist_bs_ris=3.0,
        dist_ris_user=(6.0, 4.0, 2.0),
        dist_ris_eve=8.0,
    )
