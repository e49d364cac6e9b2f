#!/usr/bin/env python3
"""
Run configuration for ordersat
Environment defaults (via .env) overridden by command-line flags
"""

import argparse
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

from dotenv import load_dotenv

from bruteforce_oracle import DEFAULT_GUARD
from cdcl_solver import HEURISTICS, SolverConfig
from order_encoder import PH_STYLES, EncodeOptions


class Mode(Enum):
    SOLVE = "solve"
    ENUMERATE = "enumerate"
    ENCODE = "encode"
    EMIT_FACTS = "emit-facts"
    DUMP_ANALYSIS = "dump-analysis"
    CHECK = "check"


MODE_ALIASES = {"encode-only": Mode.ENCODE}
FORMATS = ("auto", "native", "facts")
FACT_SUFFIXES = (".lp", ".facts")


def load_settings() -> Dict[str, str]:
    """Defaults read from the environment after loading a .env file"""
    load_dotenv()
    return {
        "ph": os.getenv("ORDERSAT_PH", "on"),
        "ph_style": os.getenv("ORDERSAT_PH_STYLE", "counter"),
        "heuristic": os.getenv("ORDERSAT_HEURISTIC", "activity"),
        "seed": os.getenv("ORDERSAT_SEED", "0"),
        "restart_base": os.getenv("ORDERSAT_RESTART_BASE", "100"),
        "guard": os.getenv("ORDERSAT_SEARCH_GUARD", str(DEFAULT_GUARD)),
        "log_level": os.getenv("ORDERSAT_LOG_LEVEL", "WARNING"),
    }


def _mode(text: str) -> Mode:
    if text in MODE_ALIASES:
        return MODE_ALIASES[text]
    try:
        return Mode(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown mode {text!r}") from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser(settings: Optional[Dict[str, str]] = None) -> argparse.ArgumentParser:
    settings = settings if settings is not None else load_settings()
    parser = argparse.ArgumentParser(
        prog="ordersat", description="Order-encoding translation of finite linear CSPs to SAT"
    )
    parser.add_argument(
        "mode", type=_mode, nargs="?", help="solve | enumerate | encode | emit-facts | dump-analysis | check"
    )
    parser.add_argument("--mode", dest="mode_flag", type=_mode, default=None, help="the mode, as a flag")
    parser.add_argument("input", help="instance file (native or fact format)")
    parser.add_argument("--format", choices=FORMATS, default="auto", help="input format (default: by file suffix)")
    parser.add_argument("--ph", choices=("on", "off"), default=settings["ph"], help="pigeon-hole alldifferent clauses")
    parser.add_argument("--ph-style", choices=PH_STYLES, default=settings["ph_style"])
    parser.add_argument("--heuristic", choices=HEURISTICS, default=settings["heuristic"])
    parser.add_argument("--seed", type=int, default=settings["seed"], help="solver tie-breaking seed")
    parser.add_argument("--restart-base", type=_positive, default=settings["restart_base"])
    parser.add_argument("--conflict-limit", type=_positive, default=None)
    parser.add_argument("--limit", type=_positive, default=None, help="maximum number of enumerated solutions")
    parser.add_argument("--all", action="store_true", help="enumerate every solution (the default)")
    parser.add_argument("--out", default=None, help="output path (stdout when omitted)")
    parser.add_argument("--assignment", default=None, help="assignment or solver-model file for check mode")
    parser.add_argument("--cnf", default=None, help="DIMACS file the model in --assignment refers to")
    parser.add_argument("--verify", action="store_true", help="compare enumerate output with the brute-force oracle")
    parser.add_argument(
        "--guard", type=_positive, default=settings["guard"], help="largest search space --verify walks"
    )
    parser.add_argument("--log-level", default=settings["log_level"])
    return parser


@dataclass
class RunConfig:
    mode: Mode
    input_path: str
    input_format: str = "auto"
    encode: EncodeOptions = field(default_factory=EncodeOptions)
    solver: SolverConfig = field(default_factory=SolverConfig)
    limit: Optional[int] = None
    out_path: Optional[str] = None
    assignment_path: Optional[str] = None
    cnf_path: Optional[str] = None
    verify: bool = False
    guard: int = DEFAULT_GUARD
    log_level: str = "WARNING"

    @property
    def resolved_format(self) -> str:
        if self.input_format != "auto":
            return self.input_format
        return "facts" if self.input_path.endswith(FACT_SUFFIXES) else "native"

    @classmethod
    def from_args(cls, argv: Optional[Sequence[str]] = None, settings: Optional[Dict[str, str]] = None) -> "RunConfig":
        """Parse argv; argparse exits with status 2 on usage errors"""
        parser = build_parser(settings)
        args = parser.parse_args(argv)
        if args.mode and args.mode_flag and args.mode is not args.mode_flag:
            parser.error(f"mode given twice: {args.mode.value} and --mode {args.mode_flag.value}")
        args.mode = args.mode or args.mode_flag
        if args.mode is None:
            parser.error("a mode is required")
        problems: List[str] = []
        if args.ph not in ("on", "off"):
            problems.append(f"--ph must be on or off, got {args.ph!r}")
        if args.ph_style not in PH_STYLES:
            problems.append(f"unknown pigeon-hole style {args.ph_style!r}")
        if args.heuristic not in HEURISTICS:
            problems.append(f"unknown heuristic {args.heuristic!r}")
        if args.mode is Mode.CHECK and not args.assignment:
            problems.append("check mode needs --assignment")
        if args.cnf and args.mode is not Mode.CHECK:
            problems.append("--cnf only applies to check mode")
        if args.verify and (args.mode is not Mode.ENUMERATE or args.limit is not None):
            problems.append("--verify needs a full enumerate run")
        if args.all and args.limit is not None:
            problems.append("--all and --limit exclude each other")
        if problems:
            parser.error("; ".join(problems))

        return cls(
            mode=args.mode,
            input_path=args.input,
            input_format=args.format,
            encode=EncodeOptions(ph_alldifferent=args.ph == "on", ph_style=args.ph_style),
            solver=SolverConfig(
                heuristic=args.heuristic,
                restart_base=args.restart_base,
                conflict_limit=args.conflict_limit,
                seed=args.seed,
            ),
            limit=args.limit,
            out_path=args.out,
            assignment_path=args.assignment,
            cnf_path=args.cnf,
            verify=args.verify,
            guard=args.guard,
            log_level=args.log_level.upper(),
        )
