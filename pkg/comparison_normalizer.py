#!/usr/bin/env python3
"""
Rewrites every linear comparison into sum <= bound form
"""

import logging
from typing import List

from csp_model import (
    AUX_PREFIX,
    BoolVar,
    CmpOp,
    ConstraintClause,
    Domain,
    Instance,
    LinearCmp,
    Literal,
    Variable,
    check_int64,
    negate_sum,
)

logger = logging.getLogger(__name__)


def _le(linear_sum, m: int) -> Literal:
    return Literal(LinearCmp(linear_sum, CmpOp.LE, check_int64(m, "comparison bound")))


def _rewrite(expr: LinearCmp) -> List[Literal]:
    """Disjunction of <= literals equivalent to a positive non-equality comparison"""
    s, op, m = expr.sum, expr.op, expr.m
    if op is CmpOp.LE:
        return [_le(s, m)]
    if op is CmpOp.GE:
        return [_le(negate_sum(s), -m)]
    if op is CmpOp.LT:
        return [_le(s, m - 1)]
    if op is CmpOp.GT:
        return [_le(negate_sum(s), -m - 1)]
    if op is CmpOp.NE:
        return [_le(s, m - 1), _le(negate_sum(s), -m - 1)]
    raise ValueError(f"equality is rewritten by the caller, got {op}")


def normalize_comparisons(instance: Instance) -> Instance:
    """Return an equivalent instance whose comparisons all use <=

    Negations of comparisons are folded into the opposite operator first.
    An equality that is alone in its clause splits the clause in two; an
    equality inside a larger disjunction is replaced by a fresh Boolean
    switch whose truth forces both halves.
    """
    variables = list(instance.variables)
    clauses: List[List[Literal]] = []
    aux_count = 0

    for clause in instance.clauses:
        rewritten: List[Literal] = []
        extra: List[List[Literal]] = []
        for literal in clause.literals:
            expr = literal.expr
            if not isinstance(expr, LinearCmp):
                rewritten.append(literal)
                continue
            op = expr.op.opposite if literal.negated else expr.op
            expr = LinearCmp(expr.sum, op, expr.m)
            if op is not CmpOp.EQ:
                rewritten.extend(_rewrite(expr))
                continue
            upper = _le(expr.sum, expr.m)
            lower = _le(negate_sum(expr.sum), -expr.m)
            if len(clause.literals) == 1:
                extra.append([upper])
                extra.append([lower])
                continue
            aux_count += 1
            switch = f"{AUX_PREFIX}eq{aux_count}"
            while instance.has_variable(switch):
                aux_count += 1
                switch = f"{AUX_PREFIX}eq{aux_count}"
            variables.append(Variable(switch, Domain.boolean()))
            rewritten.append(Literal(BoolVar(switch)))
            extra.append([Literal(BoolVar(switch), True), upper])
            extra.append([Literal(BoolVar(switch), True), lower])
        if rewritten:
            clauses.append(rewritten)
        clauses.extend(extra)

    if aux_count:
        logger.info(f"✅ Normalization introduced {aux_count} switch variables")
    numbered = tuple(ConstraintClause(f"c{i}", tuple(lits)) for i, lits in enumerate(clauses, 1))
    return Instance(tuple(variables), numbered, instance.relations)
