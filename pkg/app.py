#!/usr/bin/env python3
"""
Main application controller for ordersat
Entry point that runs the pipeline: read, normalize, analyse, encode, solve, decode
"""

import logging
import sys
import time
from contextlib import contextmanager
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from dotenv import load_dotenv

from bruteforce_oracle import check, enumerate_bruteforce
from cdcl_solver import SolveStatus, solve
from cnf_document import CnfDocument, VarMap
from comparison_normalizer import normalize_comparisons
from csp_errors import CSPError, DecodeError, SolverError
from csp_model import Assignment, Instance, Value, assignment_key, project_assignment
from data_manager import CSPDataManager
from dimacs_io import parse_dimacs, write_dimacs
from fact_format import FactInstanceReader, FactInstanceWriter
from native_parser import NativeInstanceReader
from order_encoder import encode
from reader_interface import IInstanceReader
from relevance_analyzer import LookupTables, dump_tables, relevant_values
from run_config import Mode, RunConfig
from solution_service import decode, enumerate_solutions

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_SAT = 10
EXIT_UNSAT = 20


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def format_assignment(assignment: Mapping[str, Value]) -> str:
    items = sorted(project_assignment(assignment).items())
    return "".join(f"{name} = {format_value(value)}\n" for name, value in items)


class OrderSatApp:
    def __init__(self, data_manager: Optional[CSPDataManager] = None, timing_stream=None):
        self.data_manager = data_manager or CSPDataManager()
        self.readers: Dict[str, IInstanceReader] = {
            reader.format_name: reader for reader in (NativeInstanceReader(), FactInstanceReader())
        }
        self.timing_stream = timing_stream
        self.timings: List[Tuple[str, float]] = []

    @contextmanager
    def phase(self, name: str) -> Iterator[None]:
        """Time one pipeline phase and report it on stderr"""
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.timings.append((name, elapsed))
            stream = self.timing_stream or sys.stderr
            print(f"⏱️ {name}: {elapsed:.4f}s", file=stream)

    # Pipeline stages

    def load_instance(self, cfg: RunConfig) -> Tuple[Instance, Instance]:
        """Original and normalized instance"""
        text = self.data_manager.load_text(cfg.input_path)
        with self.phase("convert"):
            instance = self.readers[cfg.resolved_format].read(text)
            normalized = normalize_comparisons(instance)
        summary = self.data_manager.get_instance_summary(normalized)
        logger.info(
            f"📂 {summary['int_variables']} integer and {summary['bool_variables']} Boolean variables, "
            f"{summary['clauses']} clauses"
        )
        return instance, normalized

    def analyze(self, normalized: Instance) -> LookupTables:
        with self.phase("analyze"):
            return relevant_values(normalized)

    def encode_instance(self, cfg: RunConfig, normalized: Instance) -> Tuple[CnfDocument, VarMap]:
        tables = self.analyze(normalized)
        with self.phase("encode"):
            return encode(normalized, tables, cfg.encode)

    def emit(self, cfg: RunConfig, text: str):
        if cfg.out_path:
            self.data_manager.save_text(cfg.out_path, text)
        else:
            sys.stdout.write(text)

    # Modes

    def solve_mode(self, cfg: RunConfig) -> int:
        instance, normalized = self.load_instance(cfg)
        document, varmap = self.encode_instance(cfg, normalized)
        with self.phase("solve"):
            result = solve(document, cfg.solver)
        if result.status is SolveStatus.UNSAT:
            self.emit(cfg, "UNSAT\n")
            return EXIT_UNSAT
        if result.status is SolveStatus.UNKNOWN:
            self.emit(cfg, "UNKNOWN\n")
            return EXIT_OK
        assignment = project_assignment(decode(result.model, varmap, normalized))
        if not check(instance, assignment).overall:
            raise SolverError("decoded solution fails the direct check")
        self.emit(cfg, format_assignment(assignment))
        return EXIT_SAT

    def enumerate_mode(self, cfg: RunConfig) -> int:
        instance, normalized = self.load_instance(cfg)
        document, varmap = self.encode_instance(cfg, normalized)
        with self.phase("solve"):
            solutions = enumerate_solutions(document, varmap, normalized, cfg.limit, cfg.solver)
        if cfg.verify:
            self.verify_solutions(instance, solutions, cfg.guard)
        if not solutions:
            self.emit(cfg, "UNSAT\n")
        else:
            self.emit(cfg, "\n".join(format_assignment(solution) for solution in solutions))
        print(f"✅ {len(solutions)} solutions", file=self.timing_stream or sys.stderr)
        return EXIT_OK

    def verify_solutions(self, instance: Instance, solutions: List[Assignment], guard: int):
        with self.phase("verify"):
            expected = enumerate_bruteforce(instance, guard=guard)
        found = {assignment_key(solution) for solution in solutions}
        missing = [s for s in expected if assignment_key(s) not in found]
        extra = len(found) - (len(expected) - len(missing))
        if missing or extra:
            raise SolverError(
                f"enumeration disagrees with brute force: {len(missing)} missing, {extra} unexpected solutions"
            )
        logger.info(f"✅ Brute force confirms {len(expected)} solutions")

    def encode_mode(self, cfg: RunConfig) -> int:
        _, normalized = self.load_instance(cfg)
        document, _ = self.encode_instance(cfg, normalized)
        self.emit(cfg, write_dimacs(document))
        return EXIT_OK

    def emit_facts_mode(self, cfg: RunConfig) -> int:
        _, normalized = self.load_instance(cfg)
        self.emit(cfg, FactInstanceWriter().write(normalized))
        return EXIT_OK

    def dump_analysis_mode(self, cfg: RunConfig) -> int:
        _, normalized = self.load_instance(cfg)
        self.emit(cfg, dump_tables(self.analyze(normalized)))
        return EXIT_OK

    def check_mode(self, cfg: RunConfig) -> int:
        instance, normalized = self.load_instance(cfg)
        assignment = self.read_assignment(cfg, normalized)
        report = check(instance, assignment)
        self.emit(cfg, report.render())
        return EXIT_OK if report.overall else EXIT_CHECK_FAILED

    def read_assignment(self, cfg: RunConfig, normalized: Instance) -> Assignment:
        text = self.data_manager.load_text(cfg.assignment_path)
        if not cfg.cnf_path:
            return self.data_manager.parse_assignment(text)
        document = parse_dimacs(self.data_manager.load_text(cfg.cnf_path))
        if not document.orders and normalized.int_variables:
            raise DecodeError(f"{cfg.cnf_path} carries no order lines to decode integer variables")
        model = self.data_manager.parse_model(text, document.num_vars)
        return project_assignment(decode(model, VarMap.from_document(document), normalized))

    def run(self, cfg: RunConfig) -> int:
        """Run one mode and return its exit status"""
        handlers = {
            Mode.SOLVE: self.solve_mode,
            Mode.ENUMERATE: self.enumerate_mode,
            Mode.ENCODE: self.encode_mode,
            Mode.EMIT_FACTS: self.emit_facts_mode,
            Mode.DUMP_ANALYSIS: self.dump_analysis_mode,
            Mode.CHECK: self.check_mode,
        }
        self.timings = []
        return handlers[cfg.mode](cfg)


def create_app_from_env() -> OrderSatApp:
    """Factory method to create the app after loading .env"""
    load_dotenv()
    return OrderSatApp(CSPDataManager())


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Command-line entry point"""
    app = create_app_from_env()
    try:
        cfg = RunConfig.from_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, cfg.log_level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return app.run(cfg)
    except CSPError as e:
        logger.debug("pipeline failure", exc_info=True)
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("\n👋 Interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
