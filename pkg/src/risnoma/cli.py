"""Batch front-end: sweeps, figure presets, the acceptance suite and the
quadrature audit table.

The CLI is a thin shell over the library; it formats, it never computes.
Every flag can also be set through an environment variable with the
``RISNOMA_`` prefix (flag wins over environment, environment over default).

Exit codes: 0 success, 1 failed acceptance criterion, 2 invalid usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import validate as validate_mod
from .config import (ConfigError, EveVariant, Scenario, SicMode,
                     config_from_dict, default_config, load_config)
from .monte_carlo import EveMode, OrderingMode
from .presets import PRESETS, get_preset, preset_names
from .special_math import QuadratureError, gauss_laguerre
from .sweep import OUTPUT_KINDS, SWEEP_VARIABLES, SweepError, SweepSpec, run_sweep

_ENV_PREFIX = "RISNOMA_"

_SIC_FLAG = {"psic": SicMode.PERFECT, "ipsic": SicMode.IMPERFECT}
_EVE_FLAG = {"sampled": EveMode.SAMPLED, "mean-field": EveMode.MEAN_FIELD}
_ORDERING_FLAG = {"common-variance": OrderingMode.COMMON_VARIANCE,
                  "per-user-distance": OrderingMode.PER_USER_DISTANCE}
_VARIANT_FLAG = {"as-printed": EveVariant.AS_PRINTED,
                 "with-nu-term": EveVariant.WITH_NU_TERM}


def _env(name: str, fallback=None):
    return os.environ.get(_ENV_PREFIX + name.upper().replace("-", "_"), fallback)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risnoma",
        description="Secrecy outage analysis for RIS-assisted NOMA downlinks "
                    "with on-off reflecting control.")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a parameter sweep, emit CSV")
    sw.add_argument("--preset", default=_env("preset"),
                    help="start from a named figure preset")
    sw.add_argument("--config", default=_env("config"),
                    help="JSON configuration file")
    sw.add_argument("--set", action="append", default=[], metavar="FIELD=JSON",
                    help="override a single configuration field (repeatable)")
    sw.add_argument("--scenario", choices=[s.value for s in Scenario],
                    default=_env("scenario"))
    sw.add_argument("--sic", choices=sorted(_SIC_FLAG), default=_env("sic"))
    sw.add_argument("--variable", choices=SWEEP_VARIABLES)
    sw.add_argument("--start", type=float)
    sw.add_argument("--end", type=float)
    sw.add_argument("--step", type=float)
    sw.add_argument("--outputs", default=None,
                    help=f"comma list from {OUTPUT_KINDS}")
    sw.add_argument("--trials", type=int,
                    default=int(_env("trials", 1_000_000)))
    sw.add_argument("--seed", type=int,
                    default=int(_env("seed", validate_mod.DEFAULT_SEED)))
    sw.add_argument("--workers", type=int,
                    default=int(_env("workers", os.cpu_count() or 1)))
    sw.add_argument("--eve", choices=sorted(_EVE_FLAG),
                    default=_env("eve", "sampled"))
    sw.add_argument("--ordering", choices=sorted(_ORDERING_FLAG),
                    default=_env("ordering", "common-variance"))
    sw.add_argument("--variant", choices=sorted(_VARIANT_FLAG),
                    default=_env("variant"))
    sw.add_argument("--quad-d", type=int, default=300)
    sw.add_argument("--quad-s", type=int, default=300)
    sw.add_argument("--out", default=_env("out", "stdout"))

    va = sub.add_parser("validate", help="run the acceptance criteria")
    va.add_argument("--level", choices=["quick", "full"],
                    default=_env("level", "quick"))
    va.add_argument("--seed", type=int,
                    default=int(_env("seed", validate_mod.DEFAULT_SEED)))
    va.add_argument("--out", default=_env("out"),
                    help="write the JSON report here")

    qt = sub.add_parser("quadrature-table",
                        help="dump quadrature nodes and weights as CSV")
    qt.add_argument("order", type=int)
    qt.add_argument("--out", default=_env("out", "stdout"))

    pr = sub.add_parser("preset", help="list or describe figure presets")
    group = pr.add_mutually_exclusive_group(required=True)
    group.add_argument("--list", action="store_true")
    group.add_argument("--describe", metavar="NAME")
    return parser


def _open_out(path: str):
    if path in (None, "stdout", "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _resolve_config(args):
    if args.preset:
        preset = get_preset(args.preset)
        cfg = preset.config
    else:
        preset = None
        cfg = load_config(args.config) if args.config else default_config()
    overrides = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(item, "expected FIELD=JSON")
        key, raw = item.split("=", 1)
        try:
            overrides[key] = json.loads(raw)
        except json.JSONDecodeError:
            overrides[key] = raw
    if args.variant:
        overrides["eve_interference_variant"] = _VARIANT_FLAG[args.variant]
    if overrides:
        doc = {**{k: v for k, v in _config_doc(cfg).items()}, **overrides}
        cfg = config_from_dict(doc)
    return preset, cfg


def _config_doc(cfg):
    from .config import config_to_dict
    return config_to_dict(cfg)


def _cmd_sweep(args) -> int:
    preset, cfg = _resolve_config(args)
    scenario = Scenario(args.scenario) if args.scenario else (
        preset.scenario if preset else cfg.scenario)
    if args.sic:
        sic_modes = (_SIC_FLAG[args.sic],)
    elif preset:
        sic_modes = preset.sic_modes
    else:
        sic_modes = (cfg.sic_mode,)
    variable = args.variable or (preset.sweep_variable if preset else None)
    if variable is None:
        raise SweepError("no sweep variable given (use --variable or --preset)")
    start = args.start if args.start is not None else (
        preset.start if preset else None)
    end = args.end if args.end is not None else (preset.end if preset else None)
    step = args.step if args.step is not None else (
        preset.step if preset else None)
    if start is None or end is None or step is None:
        raise SweepError("sweep range incomplete: need --start/--end/--step")
    if args.outputs:
        outputs = tuple(s.strip() for s in args.outputs.split(",") if s.strip())
    elif preset:
        outputs = preset.outputs
    else:
        outputs = ("analytic", "asymptotic", "system_sop", "throughput")
    spec = SweepSpec(
        config=cfg, scenario=scenario, sic_modes=sic_modes,
        sweep_variable=variable, start=start, end=end, step=step,
        outputs=outputs, trials=args.trials, seed=args.seed,
        ordering_mode=_ORDERING_FLAG[args.ordering],
        eve_mode=_EVE_FLAG[args.eve], workers=args.workers,
        quad_order_d=args.quad_d, quad_order_s=args.quad_s)
    out, close = _open_out(args.out)
    try:
        run_sweep(spec, out)
    finally:
        if close:
            out.close()
    return 0


def _cmd_validate(args) -> int:
    report, code = validate_mod.run_validate(args.level, args.seed, echo=print)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(validate_mod.report_to_json(report))
    if code:
        failed = [c["id"] for c in report["criteria"] if not c["passed"]]
        print(f"FAILED: {', '.join(failed)}", file=sys.stderr)
    return code


def _cmd_quadrature_table(args) -> int:
    rule = gauss_laguerre(args.order)
    out, close = _open_out(args.out)
    try:
        out.write("index,node,weight\n")
        for i, (node, weight) in enumerate(zip(rule.nodes, rule.weights), 1):
            out.write(f"{i},{float(node)!r},{float(weight)!r}\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_preset(args) -> int:
    if args.list:
        for name in preset_names():
            print(f"{name}: {PRESETS[name].description}")
        return 0
    preset = get_preset(args.describe)
    print(f"name: {preset.name}")
    print(f"description: {preset.description}")
    print(f"scenario: {preset.scenario.value}")
    print(f"sic_modes: {', '.join(m.value for m in preset.sic_modes)}")
    print(f"sweep: {preset.sweep_variable} from {preset.start:g} "
          f"to {preset.end:g} step {preset.step:g}")
    print(f"outputs: {', '.join(preset.outputs)}")
    print("overrides relative to the baseline config:")
    if not preset.overrides:
        print("  (none)")
    for key, value in preset.overrides:
        print(f"  {key} = {value}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
        "quadrature-table": _cmd_quadrature_table,
        "preset": _cmd_preset,
    }[args.command]
    try:
        return handler(args)
    except (SweepError, ConfigError, QuadratureError, KeyError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
