"""Secrecy outage analysis for RIS-assisted NOMA downlinks with on-off
reflecting control, with a seeded Monte Carlo simulator cross-validating
every closed form."""

from .channel_dist import (CascadeParams, cascade_cdf, cascade_cdf_ordered,
                           cascade_pdf, mean_cascade_power)
from .config import (ChannelStats, ConfigError, EveVariant, Scenario, SicMode,
                     SystemConfig, default_config, derive_stats, load_config, nu)
from .monte_carlo import (ChannelRealization, EveMode, OrderingMode, SimResult,
                          empirical_sop, empirical_throughput, oma_baseline_sop,
                          sample_realization)
from .secrecy_engine import (SecrecyQuery, SecrecyReport, cdf_sinr_legit,
                             diversity_order_estimate, pdf_sinr_eve,
                             secrecy_rate, sinr_eve_cdf, sop_asymptotic,
                             sop_closed_form, sop_exact_numeric, system_sop,
                             throughput_delay_limited)
from .special_math import (QuadratureRule, bessel_k, gamma_int, gauss_laguerre,
                           laguerre_eval, log_bessel_k, log_gamma_int)
from .sweep import SweepSpec, run_sweep, secrecy_report

__version__ = "0.1.0"
