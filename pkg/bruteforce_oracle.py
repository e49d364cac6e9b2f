#!/usr/bin/env python3
"""
Brute-force oracle
Direct evaluation of constraint literals and exhaustive enumeration, independent of every translation pass
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Mapping, Optional, Tuple

from csp_errors import MissingValueError, SearchSpaceError
from csp_model import (
    AllDifferent,
    Assignment,
    BoolVar,
    Instance,
    LinearCmp,
    Literal,
    RelationKind,
    Table,
    Value,
    domain_values,
    evaluate_sum,
    project_solutions,
)

logger = logging.getLogger(__name__)

DEFAULT_GUARD = 10 ** 7


def _value(assignment: Mapping[str, Value], name: str) -> Value:
    try:
        return assignment[name]
    except KeyError:
        raise MissingValueError(f"no value for {name}") from None


def _alldifferent(expr: AllDifferent, assignment: Mapping[str, Value], instance: Instance) -> bool:
    seen = set()
    for name in expr.args:
        value = _value(assignment, name)
        if value in seen:
            return False
        seen.add(value)
    union = set()
    for name in expr.args:
        union.update(domain_values(instance.variable(name).domain))
    if len(union) == len(expr.args):
        # Every value must be taken when there are exactly as many values as arguments
        return union <= seen
    return True


def _table(expr: Table, assignment: Mapping[str, Value], instance: Instance) -> bool:
    relation = instance.relation(expr.rel)
    values = [_value(assignment, name) for name in expr.args]
    matched = False
    for row in relation.tuples:
        prefix = 0
        while prefix < relation.arity and row[prefix] == values[prefix]:
            prefix += 1
        if prefix == relation.arity:
            matched = True
            break
    return matched if relation.kind is RelationKind.SUPPORTS else not matched


def eval_literal(literal: Literal, assignment: Mapping[str, Value], instance: Instance) -> bool:
    """Truth of literal under assignment, polarity applied"""
    expr = literal.expr
    if isinstance(expr, BoolVar):
        truth = bool(_value(assignment, expr.name))
    elif isinstance(expr, LinearCmp):
        values = {name: _value(assignment, name) for name in literal.variables()}
        truth = expr.op.holds(evaluate_sum(expr.sum, values), expr.m)
    elif isinstance(expr, AllDifferent):
        truth = _alldifferent(expr, assignment, instance)
    else:
        truth = _table(expr, assignment, instance)
    return truth != literal.negated


@dataclass
class CheckReport:
    overall: bool
    clauses: Dict[str, bool] = field(default_factory=dict)
    # Per failing clause: every literal with its truth value
    failures: Dict[str, List[Tuple[str, bool]]] = field(default_factory=dict)
    domain_violations: List[str] = field(default_factory=list)

    def render(self) -> str:
        lines = [f"{cid}: {'ok' if ok else 'violated'}" for cid, ok in self.clauses.items()]
        for cid, details in self.failures.items():
            lines.extend(f"  {cid} {text} -> {truth}" for text, truth in details)
        lines.extend(f"domain: {violation}" for violation in self.domain_violations)
        lines.append("SATISFIED" if self.overall else "VIOLATED")
        return "".join(line + "\n" for line in lines)


def check(instance: Instance, assignment: Mapping[str, Value]) -> CheckReport:
    """Evaluate every clause of instance under a total assignment"""
    report = CheckReport(overall=True)
    for var in instance.variables:
        value = _value(assignment, var.name)
        if var.is_bool:
            if not isinstance(value, bool):
                report.domain_violations.append(f"{var.name} = {value} is not a Boolean")
        elif isinstance(value, bool) or value not in var.domain:
            report.domain_violations.append(f"{var.name} = {value} is outside its domain")
    for clause in instance.clauses:
        truths = [eval_literal(literal, assignment, instance) for literal in clause.literals]
        satisfied = any(truths)
        report.clauses[clause.cid] = satisfied
        if not satisfied:
            report.failures[clause.cid] = [(str(lit), truth) for lit, truth in zip(clause.literals, truths)]
    report.overall = all(report.clauses.values()) and not report.domain_violations
    return report


def enumerate_bruteforce(
    instance: Instance, limit: Optional[int] = None, guard: int = DEFAULT_GUARD
) -> List[Assignment]:
    """Every solution in cartesian-product order: variables by name, values ascending, False before True"""
    variables = sorted(instance.variables, key=lambda v: v.name)
    space = 1
    for var in variables:
        space *= 2 if var.is_bool else var.domain.size
    if space > guard:
        raise SearchSpaceError(f"search space of {space} assignments exceeds the guard {guard}")

    names = [var.name for var in variables]
    choices = [[False, True] if var.is_bool else domain_values(var.domain) for var in variables]
    solutions: List[Assignment] = []
    for values in product(*choices):
        assignment = dict(zip(names, values))
        if all(any(eval_literal(lit, assignment, instance) for lit in clause.literals) for clause in instance.clauses):
            solutions.append(assignment)
    solutions = project_solutions(solutions)
    if limit is not None:
        solutions = solutions[:limit]
    logger.debug(f"Brute force visited {space} assignments, {len(solutions)} solutions")
    return solutions
