# invlab/main.py
"""
Command-line entry point: `invlab <subcommand>` or `python -m invlab <subcommand>`.

Exit codes: 0 pass, 1 check failure, 2 usage or configuration error. check-invertibility
reports 0 satisfied, 1 violated, 2 inconclusive.
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from invlab import __version__
from invlab.core.config import load_settings
from invlab.core.errors import ConfigError, InvlabError
from invlab.core.logging import setup_logging
from invlab.schemas.scenario import ScenarioConfig, load_scenario
from invlab.services.scenarios import RunContext, run
from invlab.utils.reports import status_line

logger = logging.getLogger(__name__)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="scenario JSON file")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--output-dir", type=Path, default=argparse.SUPPRESS)
    common.add_argument("--log-level", default=argparse.SUPPRESS)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="invlab", parents=[common],
                                     description="Numerical checks for invertible distributions")
    parser.add_argument("--version", action="version", version=f"invlab {__version__}")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("check-invertibility", parents=[common], help="slow-decrease check of a transform")
    p.add_argument("--function", type=Path, required=True)
    p.add_argument("--A", dest="A", type=float, default=None)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--complex-search", action="store_const", const=True, default=None)

    p = sub.add_parser("witness-family", parents=[common], help="build and verify the witness family")
    p.add_argument("--function", type=Path, required=True)
    p.add_argument("--group", default=None)
    p.add_argument("--jmax", type=int, default=None)

    p = sub.add_parser("rank-one", parents=[common], help="hyperbolic-plane identities")
    rank_sub = p.add_subparsers(dest="action", required=True)
    v = rank_sub.add_parser("verify", parents=[common])
    v.add_argument("--suite", required=True, choices=["projection-slice", "diagram", "radon", "dual"])

    p = sub.add_parser("fundamental-solution", parents=[common], help="regularized Fourier division")
    p.add_argument("--mu", type=Path, required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)

    sub.add_parser("full-suite", parents=[common], help="every acceptance check on defaults")
    return parser


_SCENARIO_KEYS = ("function", "mu", "group", "A", "horizon", "jmax", "epsilon", "grid", "suite", "complex_search")


def scenario_from_args(args: argparse.Namespace) -> ScenarioConfig:
    """A --config file provides the base; subcommand flags override it."""
    base = load_scenario(args.config).model_dump() if getattr(args, "config", None) else {}
    if args.command:
        base["scenario"] = args.command
        for key in _SCENARIO_KEYS:
            if key in vars(args) and vars(args)[key] is not None:
                base[key] = vars(args)[key]
    if "scenario" not in base:
        raise ConfigError("No subcommand given and no --config file")
    for key in ("output_dir", "seed"):
        if getattr(args, key, None) is not None:
            base[key] = getattr(args, key)
    try:
        return ScenarioConfig.model_validate(base)
    except ValueError as e:
        errors = getattr(e, "errors", None)
        if callable(errors):
            err = errors()[0]
            where = ".".join(str(p) for p in err["loc"]) or "<root>"
            raise ConfigError(f"Invalid scenario at {where}: {err['msg']}") from e
        raise ConfigError(str(e)) from e


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        threads = None if os.getenv("INVLAB_THREADS") else getattr(args, "threads", None)
        settings = load_settings(threads=threads, log_level=getattr(args, "log_level", None))
        setup_logging(settings.log_level)
        cfg = scenario_from_args(args)
        seed = cfg.seed if cfg.seed is not None else settings.seed
        output_dir = cfg.output_dir or settings.output_dir
        ctx = RunContext(Path(output_dir), seed, cfg.config_hash(), settings.threads)
        outcome = run(cfg, ctx)
    except InvlabError as e:
        logger.error("❌ %s", e.detail)
        print(f"❌ {type(e).__name__}: {e.detail}", file=sys.stderr)
        return e.exit_code

    for check in outcome.checks:
        print(status_line(check))
    return outcome.code()


if __name__ == "__main__":
    sys.exit(main())
