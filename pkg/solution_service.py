#!/usr/bin/env python3
"""
Solution Service
Decodes SAT models back into CSP assignments and enumerates all solutions with blocking clauses
"""

import logging
from itertools import product
from typing import Dict, List, Mapping, Optional

from cdcl_solver import SolverConfig, SolveStatus, load_solver
from cnf_document import BOT, CnfDocument, VarMap, eq_key
from csp_errors import DecodeError
from csp_model import Assignment, Instance, Value, assignment_key, domain_values

logger = logging.getLogger(__name__)


def _truth(model: Mapping[int, bool], var_id: int) -> bool:
    try:
        return model[var_id]
    except KeyError:
        raise DecodeError(f"model does not assign propositional variable {var_id}") from None


def _grid_value(model: Mapping[int, bool], varmap: VarMap, name: str) -> int:
    """Greatest grid value g with Less(name, g) false, after checking the Less chain and Eq atoms"""
    grid = varmap.orders.get(name)
    if not grid:
        raise DecodeError(f"no order grid for {name}")
    chosen: Optional[int] = None
    for g in grid:
        less = varmap.less(name, g)
        below = False if less is BOT else _truth(model, less)
        if chosen is None and not below:
            chosen = g
        elif chosen is not None and below:
            raise DecodeError(f"Less chain of {name} is broken at {g}")
    eq_true = [g for g in grid if _eq_truth(model, varmap, name, g)]
    if eq_true not in ([chosen], []):
        raise DecodeError(f"Eq atoms of {name} disagree with its Less chain: {eq_true} vs {chosen}")
    return chosen


def _eq_truth(model: Mapping[int, bool], varmap: VarMap, name: str, g: int) -> bool:
    var_id = varmap.get(eq_key(name, g))
    return var_id is not None and _truth(model, var_id)


def decode_classes(model: Mapping[int, bool], varmap: VarMap, instance: Instance) -> Dict[str, List[Value]]:
    """Value class of every variable under model; Boolean classes are singletons"""
    classes: Dict[str, List[Value]] = {}
    for var in instance.variables:
        if var.is_bool:
            var_id = varmap.boolval(var.name)
            classes[var.name] = [_truth(model, var_id)]
            continue
        grid = varmap.orders.get(var.name) or []
        low = _grid_value(model, varmap, var.name)
        if low not in var.domain:
            raise DecodeError(f"order value {low} of {var.name} is outside its domain")
        position = grid.index(low)
        high = grid[position - 1] if position else None
        classes[var.name] = [k for k in domain_values(var.domain) if k >= low and (high is None or k < high)]
    return classes


def decode(model: Mapping[int, bool], varmap: VarMap, instance: Instance) -> Assignment:
    """Assignment read off a model: each integer takes the lower end of its value class"""
    return {name: values[0] for name, values in decode_classes(model, varmap, instance).items()}


def blocking_clause(classes: Mapping[str, List[Value]], varmap: VarMap, instance: Instance) -> List[int]:
    """Clause excluding the combination of value classes, over non-auxiliary variables only"""
    clause: List[int] = []
    for var in instance.variables:
        if var.auxiliary:
            continue
        value = classes[var.name][0]
        if var.is_bool:
            var_id = varmap.boolval(var.name)
            clause.append(-var_id if value else var_id)
        else:
            clause.append(-varmap.eq(var.name, value))
    return clause


def enumerate_solutions(
    document: CnfDocument,
    varmap: VarMap,
    instance: Instance,
    limit: Optional[int] = None,
    config: Optional[SolverConfig] = None,
) -> List[Assignment]:
    """All distinct projected solutions, up to limit"""
    if limit is not None and limit < 1:
        raise ValueError("limit must be at least 1")
    solver = load_solver(document, config)
    names = [var.name for var in instance.variables if not var.auxiliary]
    solutions: List[Assignment] = []
    seen = set()
    rounds = 0
    while limit is None or len(solutions) < limit:
        result = solver.solve()
        if result.status is not SolveStatus.SAT:
            if result.status is SolveStatus.UNKNOWN:
                logger.warning(f"⚠️ Conflict limit reached after {len(solutions)} solutions")
            break
        rounds += 1
        classes = decode_classes(result.model, varmap, instance)
        for values in product(*(classes[name] for name in names)):
            assignment = dict(zip(names, values))
            key = assignment_key(assignment)
            if key in seen:
                continue
            seen.add(key)
            solutions.append(assignment)
            if limit is not None and len(solutions) >= limit:
                break
        if not solver.add_clause(blocking_clause(classes, varmap, instance)):
            break
    logger.info(f"✅ Enumerated {len(solutions)} solutions from {rounds} models")
    return solutions
