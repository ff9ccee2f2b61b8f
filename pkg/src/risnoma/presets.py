"""Named sweep presets reproducing the reference figure configurations.

Every preset starts from the common three-user baseline (3 m / {6,4,2} m /
8 m geometry, allocation {.6,.3,.1}, 0.04 BPCU targets, 10 dB eavesdropper
SNR, -20 dB residual levels) and records only what it overrides, which is
what ``preset --describe`` prints.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import Scenario, SicMode, SystemConfig, default_config

__all__ = ["Preset", "PRESETS", "preset_names", "get_preset"]


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    config: SystemConfig
    scenario: Scenario
    sic_modes: tuple[SicMode, ...]
    sweep_variable: str
    start: float
    end: float
    step: float
    outputs: tuple[str, ...]
    overrides: tuple[tuple[str, object], ...]


_BOTH = (SicMode.IMPERFECT, SicMode.PERFECT)
_SOP_OUTPUTS = ("analytic", "asymptotic", "empirical", "system_sop", "throughput")


def _base(**overrides) -> tuple[SystemConfig, tuple[tuple[str, object], ...]]:
    return default_config().with_overrides(**overrides), tuple(sorted(overrides.items()))


def _two_user(**overrides):
    cfg = SystemConfig(
        user_count=2,
        ris_elements=16, partition_p=2, group_size=8,
        power_alloc=(0.6, 0.4),
        snr_legit_db=10.0, snr_eve_db=10.0,
        target_rates=(0.04, 0.04),
        dist_bs_ris=3.0, dist_ris_user=(6.0, 4.0), dist_ris_eve=8.0,
    ).with_overrides(**overrides)
    listing = (("user_count", 2), ("power_alloc", [0.6, 0.4]),
               ("target_rates", [0.04, 0.04]), ("dist_ris_user", [6.0, 4.0]),
               ("snr_legit_db", 10.0)) + tuple(sorted(overrides.items()))
    return cfg, listing


def _build() -> dict[str, Preset]:
    presets = {}

    cfg, ov = _base(snr_eve_db=0.0)
    presets["fig2"] = Preset(
        "fig2",
        "Per-user SOP versus transmit SNR, external eavesdropper at 0 dB, "
        "16 elements in two columns of 8, both SIC modes.",
        cfg, Scenario.EXTERNAL, _BOTH, "snr_db", 0.0, 50.0, 5.0,
        _SOP_OUTPUTS, ov)

    cfg, ov = _base(ris_elements=12, group_size=6,
                    residual_user_db=-10.0, residual_eve_db=-10.0)
    presets["fig3"] = Preset(
        "fig3",
        "Per-user SOP versus transmit SNR at -10 dB residual interference, "
        "12 elements in two columns of 6; rerun with a target_rate sweep "
        "override to compare secrecy-rate targets.",
        cfg, Scenario.EXTERNAL, _BOTH, "snr_db", 0.0, 50.0, 5.0,
        _SOP_OUTPUTS, ov)

    cfg, ov = _base(ris_elements=16, partition_p=1, group_size=16,
                    snr_legit_db=20.0)
    presets["fig4"] = Preset(
        "fig4",
        "System SOP versus number of reflecting elements (single column, "
        "all elements live) at 20 dB transmit SNR.",
        cfg, Scenario.EXTERNAL, _BOTH, "ris_elements", 4.0, 20.0, 4.0,
        ("analytic", "system_sop"), ov)

    cfg, ov = _base(ris_elements=12, group_size=6, dist_bs_ris=6.0)
    presets["fig5a"] = Preset(
        "fig5a",
        "Per-user SOP versus transmit SNR with the surface moved to 6 m "
        "from the transmitter (compare against the 3 m default).",
        cfg, Scenario.EXTERNAL, _BOTH, "snr_db", 0.0, 50.0, 5.0,
        ("analytic", "asymptotic"), ov)

    cfg, ov = _base(ris_elements=12, group_size=6,
                    dist_ris_user=(9.0, 6.0, 3.0))
    presets["fig5b"] = Preset(
        "fig5b",
        "Per-user SOP versus transmit SNR with all user distances scaled "
        "1.5x (compare against the {6,4,2} m default).",
        cfg, Scenario.EXTERNAL, _BOTH, "snr_db", 0.0, 50.0, 5.0,
        ("analytic", "asymptotic"), ov)

    cfg, ov = _two_user()
    presets["fig6a"] = Preset(
        "fig6a",
        "Two-user system SOP versus the power split a_1 = a_T at 10 dB "
        "transmit SNR, external eavesdropper.",
        cfg, Scenario.EXTERNAL, (SicMode.PERFECT,), "power_offset_aT",
        0.5, 0.95, 0.05, ("analytic", "system_sop"), ov)

    cfg, ov = _two_user(scenario=Scenario.INTERNAL)
    presets["fig6b"] = Preset(
        "fig6b",
        "Two-user system SOP versus the power split a_1 = a_T at 10 dB "
        "transmit SNR, weakest user acting as the eavesdropper.",
        cfg, Scenario.INTERNAL, (SicMode.PERFECT,), "power_offset_aT",
        0.5, 0.95, 0.05, ("analytic", "system_sop"), ov)

    cfg, ov = _base(ris_elements=16, partition_p=1, group_size=16,
                    target_rates=(0.08, 0.17, 0.25))
    presets["fig7"] = Preset(
        "fig7",
        "Delay-limited secrecy throughput versus transmit SNR, single-column "
        "16-element surface, per-user targets {0.08, 0.17, 0.25} BPCU.",
        cfg, Scenario.EXTERNAL, _BOTH, "snr_db", 0.0, 60.0, 5.0,
        ("analytic", "empirical", "throughput"), ov)

    cfg, ov = _base()
    presets["fig8"] = Preset(
        "fig8",
        "Per-user SOP versus transmit SNR with the weakest user as the "
        "eavesdropper; rerun with partition_p=4, group_size=4 to see the "
        "loss from fewer live elements.",
        cfg, Scenario.INTERNAL, _BOTH, "snr_db", 0.0, 50.0, 5.0,
        _SOP_OUTPUTS, ov)

    cfg, ov = _base(ris_elements=12, group_size=6, snr_eve_db=5.0,
                    residual_user_db=-10.0, residual_eve_db=-10.0)
    presets["fig9"] = Preset(
        "fig9",
        "Per-user SOP versus transmit SNR under internal eavesdropping at "
        "-10 dB residual interference; rerun with other residual levels to "
        "compare error floors.",
        cfg, Scenario.INTERNAL, _BOTH, "snr_db", 0.0, 50.0, 5.0,
        ("analytic", "asymptotic"), ov)

    cfg, ov = _base(target_rates=(0.08, 0.17, 0.25))
    presets["fig10"] = Preset(
        "fig10",
        "Delay-limited secrecy throughput versus transmit SNR under "
        "internal eavesdropping, targets {0.08, 0.17, 0.25} BPCU.",
        cfg, Scenario.INTERNAL, _BOTH, "snr_db", 0.0, 60.0, 5.0,
        ("analytic", "throughput"), ov)

    presets["fig5"] = presets["fig5a"]
    presets["fig6"] = presets["fig6a"]
    return presets


PRESETS = _build()


def preset_names() -> list[str]:
    return sorted(PRESETS, key=lambda n: (len(n), n))


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: "
                       f"{', '.join(preset_names())}") from None
