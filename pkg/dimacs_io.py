#!/usr/bin/env python3
"""
DIMACS CNF reading and writing
Atom annotations travel as `c map <id> <atom>` lines, order grids as `c order <var> <values...>`
"""

import logging
import shlex
from typing import List

from cnf_document import AtomKey, CnfDocument
from csp_errors import DimacsParseError

logger = logging.getLogger(__name__)


def _quote_var(name: str) -> str:
    return name if name and all(c.isalnum() or c == "_" for c in name) else shlex.quote(name)


def write_dimacs(document: CnfDocument) -> str:
    lines: List[str] = []
    for var_id in sorted(document.atoms):
        lines.append(f"c map {var_id} {document.atoms[var_id]}")
    for var, grid in document.orders.items():
        lines.append(f"c order {_quote_var(var)} {' '.join(str(v) for v in grid)}")
    lines.append(f"p cnf {document.num_vars} {len(document.clauses)}")
    for clause in document.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "".join(line + "\n" for line in lines)


def parse_dimacs(text: str) -> CnfDocument:
    """Parse DIMACS text, keeping the map and order annotations"""
    document = CnfDocument()
    declared_clauses = None
    current: List[int] = []
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            _comment(document, line, number)
            continue
        if line.startswith("p"):
            if declared_clauses is not None:
                raise DimacsParseError("second problem line", number)
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise DimacsParseError(f"malformed problem line {line!r}", number)
            try:
                document.num_vars, declared_clauses = int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsParseError(f"malformed problem line {line!r}", number) from None
            if document.num_vars < 0 or declared_clauses < 0:
                raise DimacsParseError("negative counts in problem line", number)
            continue
        if declared_clauses is None:
            raise DimacsParseError("clause before the problem line", number)
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise DimacsParseError(f"bad literal {token!r}", number) from None
            if lit == 0:
                if not current:
                    raise DimacsParseError("empty clause", number)
                document.clauses.append(tuple(current))
                current = []
            elif abs(lit) > document.num_vars:
                raise DimacsParseError(f"literal {lit} exceeds the {document.num_vars} declared variables", number)
            else:
                current.append(lit)
    if declared_clauses is None:
        raise DimacsParseError("missing problem line")
    if current:
        raise DimacsParseError("last clause is not terminated by 0")
    if len(document.clauses) != declared_clauses:
        raise DimacsParseError(f"problem line declares {declared_clauses} clauses, found {len(document.clauses)}")
    logger.debug(f"Read {document.num_vars} variables and {len(document.clauses)} clauses")
    return document


def _comment(document: CnfDocument, line: str, number: int):
    fields = line.split(None, 3)
    if len(fields) >= 4 and fields[1] == "map":
        try:
            document.atoms[int(fields[2])] = AtomKey.parse(fields[3])
        except ValueError as e:
            raise DimacsParseError(f"bad map line: {e}", number) from None
    elif len(fields) >= 3 and fields[1] == "order":
        try:
            parts = shlex.split(line[1:].strip())
            document.orders[parts[1]] = [int(v) for v in parts[2:]]
        except (ValueError, IndexError):
            raise DimacsParseError(f"bad order line {line!r}", number) from None
