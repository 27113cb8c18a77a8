"""Options shared by every subcommand and the config/override resolution behind them."""
import argparse
from pathlib import Path

from ...config import get_settings
from ...schemas import CheckOut, RunConfig, Tolerances, parse_config, validate_config
from ...services.checks import Check


def add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run config (defaults apply when omitted)")
    parser.add_argument("--output", help="output directory (overrides output_dir)")
    parser.add_argument("--seed", type=int, help="unsigned seed (overrides seed)")
    parser.add_argument("--mode", choices=["qg3d", "euler2d"], help="overrides mode")
    parser.add_argument("--tolerance-scale", type=float, dest="tolerance_scale", help="multiplies every tolerance")


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = parse_config(args.config) if getattr(args, "config", None) else validate_config({})
    data = config.model_dump()
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "mode", None) is not None:
        data["mode"] = args.mode
    if getattr(args, "tolerance_scale", None) is not None:
        data["tolerances"] = Tolerances(**data["tolerances"]).scaled(args.tolerance_scale).model_dump()
    return validate_config(data, source=args.config or "<command line>")


def output_dir(config: RunConfig, args: argparse.Namespace) -> Path:
    if getattr(args, "output", None):
        return Path(args.output)
    path = Path(config.output_dir)
    return path if path.is_absolute() else Path(get_settings().output_root) / path


def check_out(check: Check) -> CheckOut:
    return CheckOut(
        name=check.name,
        assumption=check.assumption,
        passed=check.passed,
        value=check.value,
        bound=check.bound,
        enforced=check.enforced,
        detail=check.detail,
    )
