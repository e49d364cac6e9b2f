#!/usr/bin/env python3
"""
Data management for ordersat
Handles reading and writing instance files, assignment files and external SAT models
"""

import json
import logging
import re
from typing import Dict, Optional

from csp_errors import InputError, ParseError
from csp_model import Assignment, Instance

logger = logging.getLogger(__name__)

_ASSIGNMENT_LINE = re.compile(r"\s*(\S+)\s*=\s*(\S+)\s*\Z")


def _parse_value(text: str, line: Optional[int] = None):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"bad value {text!r}", line) from None


class CSPDataManager:
    def __init__(self, encoding: str = "utf-8"):
        self.encoding = encoding

    def load_text(self, path: str) -> str:
        """Read a whole text file"""
        try:
            with open(path, "r", encoding=self.encoding) as f:
                text = f.read()
            logger.debug(f"📂 Loaded {len(text)} characters from {path}")
            return text
        except FileNotFoundError:
            raise InputError(f"📭 No such file: {path}") from None
        except (OSError, UnicodeDecodeError) as e:
            raise InputError(f"Error reading {path}: {e}") from None

    def save_text(self, path: str, text: str):
        try:
            with open(path, "w", encoding=self.encoding) as f:
                f.write(text)
            logger.info(f"💾 Saved {len(text)} characters to {path}")
        except OSError as e:
            raise InputError(f"Error saving {path}: {e}") from None

    def parse_assignment(self, text: str) -> Assignment:
        """Assignment from a JSON object or from `NAME = VALUE` lines"""
        stripped = text.strip()
        if stripped.startswith("{"):
            try:
                data = json.loads(stripped)
            except json.JSONDecodeError as e:
                raise ParseError(f"bad JSON assignment: {e.msg}", e.lineno, e.colno) from None
            assignment: Assignment = {}
            for name, value in data.items():
                if not isinstance(value, (bool, int)):
                    raise ParseError(f"value of {name} must be an integer or a Boolean")
                assignment[name] = value
            return assignment

        assignment = {}
        for number, raw in enumerate(text.splitlines(), 1):
            if not raw.strip() or raw.lstrip().startswith("#"):
                continue
            match = _ASSIGNMENT_LINE.match(raw)
            if match is None:
                raise ParseError(f"expected NAME = VALUE, got {raw.strip()!r}", number)
            name, value = match.groups()
            if name in assignment:
                raise ParseError(f"{name} assigned twice", number)
            assignment[name] = _parse_value(value, number)
        return assignment

    def parse_model(self, text: str, num_vars: int) -> Dict[int, bool]:
        """SAT-competition solver output (`s` and `v` lines); unlisted variables default to false"""
        model = {var: False for var in range(1, num_vars + 1)}
        status = None
        for number, raw in enumerate(text.splitlines(), 1):
            fields = raw.split()
            if not fields or fields[0] == "c":
                continue
            if fields[0] == "s":
                status = " ".join(fields[1:])
                continue
            if fields[0] != "v":
                raise ParseError(f"unexpected model line {raw.strip()!r}", number)
            for token in fields[1:]:
                try:
                    lit = int(token)
                except ValueError:
                    raise ParseError(f"bad literal {token!r}", number) from None
                if lit == 0:
                    continue
                if abs(lit) > num_vars:
                    raise ParseError(f"literal {lit} exceeds the {num_vars} variables of the CNF", number)
                model[abs(lit)] = lit > 0
        if status is not None and status != "SATISFIABLE":
            raise InputError(f"solver output reports {status}, no model to check")
        return model

    def get_instance_summary(self, instance: Instance) -> Dict:
        return {
            "bool_variables": len(instance.bool_variables),
            "int_variables": len(instance.int_variables),
            "clauses": len(instance.clauses),
            "literals": sum(len(clause.literals) for clause in instance.clauses),
            "relations": len(instance.relations),
        }
