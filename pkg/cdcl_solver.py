#!/usr/bin/env python3
"""
Embedded CDCL SAT solver
Two watched literals, first-UIP learning, activity-based or fixed-order decisions,
Luby restarts and phase saving
"""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

from sortedcontainers import SortedSet

from cnf_document import CnfDocument
from csp_errors import SolverError

logger = logging.getLogger(__name__)

HEURISTICS = ("activity", "fixed")


@dataclass
class SolverConfig:
    heuristic: str = "activity"
    restart_base: int = 100
    conflict_limit: Optional[int] = None
    phase_saving: bool = True
    seed: int = 0
    var_decay: float = 0.95

    def __post_init__(self):
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown decision heuristic {self.heuristic!r}")


class SolveStatus(Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass
class SolverStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    learnt: int = 0


@dataclass
class SolveResult:
    status: SolveStatus
    model: Optional[Dict[int, bool]] = None
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def is_sat(self) -> bool:
        return self.status is SolveStatus.SAT


@dataclass
class PropagationResult:
    conflict: bool
    fixed: List[int] = field(default_factory=list)


def luby(y: float, x: int) -> float:
    """x-th element (0-based) of the Luby sequence scaled by powers of y"""
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y ** seq


class CDCLSolver:
    def __init__(self, num_vars: int = 0, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()
        self.stats = SolverStats()
        self.num_vars = 0
        self.clauses: List[List[int]] = []
        self.originals: List[List[int]] = []
        self.watches: Dict[int, List[int]] = {}
        # 1 true, -1 false, 0 unassigned; index 0 unused
        self.assigns: List[int] = [0]
        self.level: List[int] = [0]
        self.reason: List[Optional[int]] = [None]
        self.activity: List[float] = [0.0]
        self.phase: List[bool] = [False]
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        self.var_inc = 1.0
        self.ok = True
        self._order = SortedSet()
        self._rng = random.Random(self.config.seed)
        self.ensure_vars(num_vars)

    def ensure_vars(self, count: int):
        while self.num_vars < count:
            self.num_vars += 1
            var = self.num_vars
            self.assigns.append(0)
            self.level.append(0)
            self.reason.append(None)
            # Tiny seeded activities break ties between untouched variables
            self.activity.append(self._rng.random() * 1e-5)
            self.phase.append(False)
            self.watches[var] = []
            self.watches[-var] = []
            self._order.add((self.activity[var], -var))

    # Assignment

    def value(self, lit: int) -> int:
        v = self.assigns[abs(lit)]
        return v if lit > 0 else -v

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def _enqueue(self, lit: int, reason: Optional[int]):
        var = abs(lit)
        self.assigns[var] = 1 if lit > 0 else -1
        self.level[var] = self.decision_level
        self.reason[var] = reason
        self.trail.append(lit)

    def cancel_until(self, level: int):
        if self.decision_level <= level:
            return
        for lit in reversed(self.trail[self.trail_lim[level]:]):
            var = abs(lit)
            if self.config.phase_saving:
                self.phase[var] = lit > 0
            self.assigns[var] = 0
            self.reason[var] = None
            self._order.add((self.activity[var], -var))
        del self.trail[self.trail_lim[level]:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)

    # Clauses

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause at decision level 0; returns False once the formula is known unsatisfiable"""
        if self.decision_level:
            self.cancel_until(0)
        clause: List[int] = []
        for lit in lits:
            if lit == 0:
                raise ValueError("0 is not a literal")
            self.ensure_vars(abs(lit))
            if -lit in clause:
                return self.ok
            if lit not in clause:
                clause.append(lit)
        self.originals.append(list(clause))
        if not self.ok:
            return False
        if any(self.value(lit) == 1 for lit in clause):
            return True
        clause = [lit for lit in clause if self.value(lit) == 0]
        if not clause:
            self.ok = False
        elif len(clause) == 1:
            self._enqueue(clause[0], None)
            if self._propagate() is not None:
                self.ok = False
        else:
            self._attach(clause)
        return self.ok

    def _attach(self, clause: List[int]) -> int:
        index = len(self.clauses)
        self.clauses.append(clause)
        self.watches[clause[0]].append(index)
        self.watches[clause[1]].append(index)
        return index

    def _propagate(self) -> Optional[int]:
        """Unit propagation over the trail; returns a conflicting clause index"""
        while self.qhead < len(self.trail):
            false_lit = -self.trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            watchers = self.watches[false_lit]
            kept: List[int] = []
            conflict = None
            position = 0
            while position < len(watchers):
                index = watchers[position]
                position += 1
                clause = self.clauses[index]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self.value(first) == 1:
                    kept.append(index)
                    continue
                for k in range(2, len(clause)):
                    if self.value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches[clause[1]].append(index)
                        break
                else:
                    kept.append(index)
                    if self.value(first) == -1:
                        conflict = index
                        kept.extend(watchers[position:])
                        break
                    self._enqueue(first, index)
            self.watches[false_lit] = kept
            if conflict is not None:
                self.qhead = len(self.trail)
                return conflict
        return None

    # Conflict analysis

    def _bump(self, var: int):
        self._order.discard((self.activity[var], -var))
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.num_vars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100
            self._order = SortedSet((self.activity[v], -v) for v in range(1, self.num_vars + 1) if not self.assigns[v])
        if not self.assigns[var]:
            self._order.add((self.activity[var], -var))

    def _analyze(self, conflict: int):
        """First-UIP learnt clause (asserting literal first) and its backjump level"""
        seen = set()
        learnt: List[int] = [0]
        pending = 0
        pivot = None
        position = len(self.trail) - 1
        clause = self.clauses[conflict]
        while True:
            for q in clause:
                var = abs(q)
                if pivot is not None and var == abs(pivot):
                    continue
                if var in seen or self.level[var] == 0:
                    continue
                seen.add(var)
                self._bump(var)
                if self.level[var] >= self.decision_level:
                    pending += 1
                else:
                    learnt.append(q)
            while abs(self.trail[position]) not in seen:
                position -= 1
            pivot = self.trail[position]
            position -= 1
            seen.discard(abs(pivot))
            pending -= 1
            if pending == 0:
                break
            clause = self.clauses[self.reason[abs(pivot)]]
        learnt[0] = -pivot
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: self.level[abs(learnt[i])])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[abs(learnt[1])]

    # Search

    def _pick_branch(self) -> Optional[int]:
        if self.config.heuristic == "fixed":
            for var in range(1, self.num_vars + 1):
                if not self.assigns[var]:
                    return var
            return None
        while self._order:
            _, negative_var = self._order.pop()
            if not self.assigns[-negative_var]:
                return -negative_var
        return None

    def _search(self, budget: int) -> Optional[SolveStatus]:
        conflicts_here = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.stats.conflicts += 1
                conflicts_here += 1
                if self.decision_level == 0:
                    self.ok = False
                    return SolveStatus.UNSAT
                learnt, back_level = self._analyze(conflict)
                self.cancel_until(back_level)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self._enqueue(learnt[0], self._attach(learnt))
                    self.stats.learnt += 1
                self.var_inc /= self.config.var_decay
                continue
            limit = self.config.conflict_limit
            if limit is not None and self.stats.conflicts >= limit:
                return SolveStatus.UNKNOWN
            if conflicts_here >= budget:
                self.stats.restarts += 1
                self.cancel_until(0)
                return None
            var = self._pick_branch()
            if var is None:
                return SolveStatus.SAT
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(var if self.phase[var] else -var, None)

    def solve(self) -> SolveResult:
        if not self.ok:
            return SolveResult(SolveStatus.UNSAT, stats=self.stats)
        restarts = 0
        while True:
            budget = int(luby(2, restarts) * self.config.restart_base)
            status = self._search(budget)
            restarts += 1
            if status is not None:
                break

        if status is SolveStatus.SAT:
            model = {var: self.assigns[var] > 0 for var in range(1, self.num_vars + 1)}
            self._verify(model)
            self.cancel_until(0)
            logger.debug(f"SAT after {self.stats.decisions} decisions, {self.stats.conflicts} conflicts")
            return SolveResult(status, model, self.stats)
        self.cancel_until(0)
        logger.debug(f"{status.value} after {self.stats.conflicts} conflicts")
        return SolveResult(status, stats=self.stats)

    def _verify(self, model: Dict[int, bool]):
        for clause in self.originals:
            if not any(model[abs(lit)] == (lit > 0) for lit in clause):
                raise SolverError(f"model violates clause {clause}")

    def fixed_literals(self) -> List[int]:
        return list(self.trail[: self.trail_lim[0]] if self.trail_lim else self.trail)


def load_solver(document: CnfDocument, config: Optional[SolverConfig] = None) -> CDCLSolver:
    solver = CDCLSolver(document.num_vars, config)
    for clause in document.clauses:
        if not solver.add_clause(clause):
            break
    return solver


def solve(document: CnfDocument, config: Optional[SolverConfig] = None) -> SolveResult:
    """Decide a CNF document"""
    result = load_solver(document, config).solve()
    logger.info(
        f"✅ {result.status.value}: {result.stats.decisions} decisions, {result.stats.conflicts} conflicts, "
        f"{result.stats.restarts} restarts"
    )
    return result


def propagate_only(document: CnfDocument, units: Sequence[int] = ()) -> PropagationResult:
    """Unit propagation to fixpoint at decision level 0, without any decision"""
    solver = load_solver(document)
    for lit in units:
        if not solver.ok:
            break
        solver.add_clause([lit])
    if not solver.ok:
        return PropagationResult(conflict=True)
    return PropagationResult(conflict=False, fixed=solver.fixed_literals())
