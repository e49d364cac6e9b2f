#!/usr/bin/env python3
"""
Order encoding of an analysed instance into CNF
Integer variables become Less/Eq atoms on their order grid; every constraint literal
is reduced to a hold literal that is equivalent to the literal's truth
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Set, Tuple

from cnf_document import BOT, TOP, AtomKey, Clause, CnfDocument, Lit, VarMap, bool_key, eq_key, less_key
from csp_errors import NotNormalizedError, UnsupportedError
from csp_model import (
    AllDifferent,
    BoolVar,
    CmpOp,
    ConstraintClause,
    Instance,
    LinearCmp,
    Literal,
    RelationKind,
    Table,
    Term,
    domain_values,
)
from relevance_analyzer import Location, LookupTables

logger = logging.getLogger(__name__)

PH_STYLES = ("counter", "pairwise")
# Subsum bounds are always linked by implication chains
CONSISTENCY_STYLES = ("chain",)


@dataclass
class EncodeOptions:
    ph_alldifferent: bool = True
    ph_style: str = "counter"
    consistency_style: str = "chain"

    def __post_init__(self):
        if self.ph_style not in PH_STYLES:
            raise ValueError(f"unknown pigeon-hole style {self.ph_style!r}")
        if self.consistency_style not in CONSISTENCY_STYLES:
            raise ValueError(f"unknown consistency style {self.consistency_style!r}")


class ClauseSink:
    """Collects clauses, folding constants and dropping duplicates and tautologies"""

    def __init__(self):
        self.clauses: List[Clause] = []
        self._seen: Set[Clause] = set()
        self.unsat = False

    def add(self, lits: Iterable[Lit]):
        clause: List[int] = []
        members: Set[int] = set()
        for lit in lits:
            if lit is TOP:
                return
            if lit is BOT or lit in members:
                continue
            if -lit in members:
                return
            members.add(lit)
            clause.append(lit)
        if not clause:
            self.unsat = True
            return
        key = tuple(clause)
        if key not in self._seen:
            self._seen.add(key)
            self.clauses.append(key)


def _prefix_name(terms: Iterable[Term]) -> str:
    return "+".join(f"{t.coeff}*{t.var}" for t in terms)


class OrderEncoder:
    def __init__(self, instance: Instance, tables: LookupTables, options: Optional[EncodeOptions] = None):
        self.instance = instance
        self.tables = tables
        self.options = options or EncodeOptions()
        self.varmap = VarMap()
        self.varmap.orders = {name: list(grid) for name, grid in tables.order.items()}
        self.sink = ClauseSink()
        self._thresholds: Dict[Tuple[int, str], Dict[int, Optional[int]]] = {
            key: {look.product: look.threshold for look in looks} for key, looks in tables.mul_look.items()
        }

    def _since(self, start: int) -> List[Clause]:
        return self.sink.clauses[start:]

    # Gate definitions

    def _equate_and(self, target: int, lits: List[Lit]):
        for lit in lits:
            self.sink.add([-target, lit])
        self.sink.add([target] + [-lit for lit in lits])

    def define_and(self, key: AtomKey, lits: Iterable[Lit]) -> Lit:
        """Literal equivalent to the conjunction of lits, allocating key only when needed"""
        kept: List[Lit] = []
        for lit in lits:
            if lit is BOT:
                return BOT
            if lit is not TOP and lit not in kept:
                kept.append(lit)
        if not kept:
            return TOP
        if len(kept) == 1:
            return kept[0]
        target = self.varmap.atom(key)
        self._equate_and(target, kept)
        return target

    def define_or(self, key: AtomKey, lits: Iterable[Lit]) -> Lit:
        kept: List[Lit] = []
        for lit in lits:
            if lit is TOP:
                return TOP
            if lit is not BOT and lit not in kept:
                kept.append(lit)
        if not kept:
            return BOT
        if len(kept) == 1:
            return kept[0]
        target = self.varmap.atom(key)
        for lit in kept:
            self.sink.add([-lit, target])
        self.sink.add([-target] + kept)
        return target

    # Variables

    def encode_order_axioms(self) -> List[Clause]:
        """Atoms of every variable, the Less chain and the Eq definitions"""
        start = len(self.sink.clauses)
        for var in self.instance.bool_variables:
            self.varmap.atom(bool_key(var.name))
        for var in self.instance.int_variables:
            grid = self.varmap.orders[var.name]
            for value in grid[:-1]:
                self.varmap.atom(less_key(var.name, value))
            for value in grid:
                self.varmap.atom(eq_key(var.name, value))
            for higher, lower in zip(grid, grid[1:-1]):
                self.sink.add([-self.varmap.less(var.name, lower), self.varmap.less(var.name, higher)])
            upper: Lit = TOP
            for value in grid:
                below = self.varmap.less(var.name, value)
                self._equate_and(self.varmap.eq(var.name, value), [-below, upper])
                upper = below
        return self._since(start)

    # Linear inequalities

    def _leaf(self, term: Term, product: int) -> Lit:
        """Literal for term.coeff * term.var <= product"""
        threshold = self._thresholds[(term.coeff, term.var)][product]
        if threshold is None:
            return TOP
        less = self.varmap.less(term.var, threshold)
        return less if term.coeff > 0 else -less

    def encode_linear(self, location: Location, literal: Literal) -> Tuple[List[Clause], Lit]:
        expr = literal.expr
        if expr.op is not CmpOp.LE:
            raise NotNormalizedError(f"clause {location[0]} still holds a {expr.op.value} comparison")
        start = len(self.sink.clauses)
        analysis = self.tables.linear[location]
        if analysis.constant is not None:
            return [], TOP if analysis.constant else BOT

        terms = analysis.terms
        previous: Dict[int, Lit] = {0: TOP}
        previous_bounds: List[int] = [0]
        for i, term in enumerate(terms):
            bounds = list(analysis.bound_sets[i])
            pairs = analysis.pairs[i]
            products = sorted(term.coeff * k for k in domain_values(self.instance.variable(term.var).domain))
            if i == 0:
                current: Dict[int, Lit] = {}
                for e in bounds:
                    allowed = [e2 for _, e2, ub in pairs if ub <= e]
                    current[e] = self._leaf(term, max(allowed)) if allowed else BOT
            else:
                name = _prefix_name(terms[: i + 1])
                current = {e: self.varmap.atom(AtomKey("leq", (name, e))) for e in bounds}
                for j, e2, ub in pairs:
                    self.sink.add([-previous[j], -self._leaf(term, e2), current[ub]])
                for lower, higher in zip(bounds, bounds[1:]):
                    self.sink.add([-current[lower], current[higher]])
                for e in bounds:
                    for position, j in enumerate(previous_bounds):
                        clause: List[Lit] = [-current[e]]
                        if position:
                            clause.append(previous[previous_bounds[position - 1]])
                        cut = bisect_right(products, e - j)
                        if cut:
                            clause.append(self._leaf(term, products[cut - 1]))
                        self.sink.add(clause)
                    self.sink.add([-current[e], previous[previous_bounds[-1]]])
            previous, previous_bounds = current, bounds
        return self._since(start), previous[analysis.m]

    # Alldifferent

    def _at_most_value(self, var: str, value: int) -> Lit:
        above = [g for g in self.varmap.orders[var] if g > value]
        return self.varmap.less(var, above[-1]) if above else TOP

    def _at_least_value(self, var: str, value: int) -> Lit:
        candidates = [g for g in self.varmap.orders[var] if g >= value]
        return -self.varmap.less(var, candidates[-1]) if candidates else BOT

    def _at_most_k(self, lits: List[Lit], k: int, tag: Tuple, guard: List[Lit]):
        """At most k of lits are true, by a sequential counter or by forbidding (k+1)-subsets"""
        k -= sum(1 for lit in lits if lit is TOP)
        open_lits = [lit for lit in lits if lit is not TOP and lit is not BOT]
        if k < 0:
            self.sink.add(guard)
            return
        if k >= len(open_lits):
            return
        if k == 0:
            for lit in open_lits:
                self.sink.add(guard + [-lit])
            return
        if self.options.ph_style == "pairwise":
            for subset in combinations(open_lits, k + 1):
                self.sink.add(guard + [-lit for lit in subset])
            return

        n = len(open_lits)
        count = [
            [self.varmap.atom(AtomKey("ph", tag + (i + 1, j + 1))) for j in range(k)] for i in range(n - 1)
        ]
        self.sink.add(guard + [-open_lits[0], count[0][0]])
        for j in range(1, k):
            self.sink.add(guard + [-count[0][j]])
        for i in range(1, n - 1):
            self.sink.add(guard + [-open_lits[i], count[i][0]])
            self.sink.add(guard + [-count[i - 1][0], count[i][0]])
            for j in range(1, k):
                self.sink.add(guard + [-open_lits[i], -count[i - 1][j - 1], count[i][j]])
                self.sink.add(guard + [-count[i - 1][j], count[i][j]])
            self.sink.add(guard + [-open_lits[i], -count[i - 1][k - 1]])
        self.sink.add(guard + [-open_lits[n - 1], -count[n - 2][k - 1]])

    def encode_alldifferent(
        self, location: Location, literal: Literal, clause: ConstraintClause
    ) -> Tuple[List[Clause], Lit]:
        if literal.negated:
            raise UnsupportedError(f"clause {location[0]}: negated alldifferent is not supported")
        args = literal.expr.args
        if len(args) <= 1:
            return [], TOP
        start = len(self.sink.clauses)
        index = self.tables.ad_index[location]
        hold: Lit = TOP
        guard: List[Lit] = []
        if len(clause.literals) > 1:
            hold = self.varmap.atom(AtomKey("hold", location))
            guard = [-hold]

        domains = {var: self.instance.variable(var).domain for var in args}
        for value in index.values:
            holders = [var for var in args if value in domains[var]]
            for first, second in combinations(holders, 2):
                self.sink.add(guard + [-self.varmap.eq(first, value), -self.varmap.eq(second, value)])
            if index.difall:
                self.sink.add(guard + [self.varmap.eq(var, value) for var in holders])

        if self.options.ph_alldifferent:
            values = index.values
            for w in range(1, min(len(args) - 1, len(values)) + 1):
                smallest = [self._at_most_value(var, values[w - 1]) for var in args]
                self._at_most_k(smallest, w, location + (f"lo{w}",), guard)
                greatest = [self._at_least_value(var, values[len(values) - w]) for var in args]
                self._at_most_k(greatest, w, location + (f"hi{w}",), guard)
        return self._since(start), hold

    # Tables

    def encode_table(self, location: Location, literal: Literal) -> Tuple[List[Clause], Lit]:
        start = len(self.sink.clauses)
        expr = literal.expr
        relation = self.instance.relation(expr.rel)
        domains = [self.instance.variable(var).domain for var in expr.args]
        completed: List[Lit] = []
        for t, row in enumerate(relation.tuples, 1):
            if any(value not in domain for value, domain in zip(row, domains)):
                continue
            prefix: Lit = self.varmap.eq(expr.args[0], row[0])
            for i in range(1, len(row)):
                step = self.varmap.eq(expr.args[i], row[i])
                prefix = self.define_and(AtomKey("tup", location + (t, i + 1)), [prefix, step])
            completed.append(prefix)
        hold_key = AtomKey("hold", location)
        if relation.kind is RelationKind.SUPPORTS:
            hold = self.define_or(hold_key, completed)
        else:
            hold = self.define_and(hold_key, [-lit for lit in completed])
        return self._since(start), hold

    # Clauses

    def encode_literal(self, clause: ConstraintClause, position: int, literal: Literal) -> Lit:
        location = (clause.cid, position)
        expr = literal.expr
        if isinstance(expr, BoolVar):
            return self.varmap.boolval(expr.name)
        if isinstance(expr, LinearCmp):
            return self.encode_linear(location, literal)[1]
        if isinstance(expr, AllDifferent):
            return self.encode_alldifferent(location, literal, clause)[1]
        if isinstance(expr, Table):
            return self.encode_table(location, literal)[1]
        raise UnsupportedError(f"unknown literal {expr!r}")

    def encode_clauses(self, holds: Dict[Location, Lit]) -> List[Clause]:
        """One clause per constraint clause over the hold literals, polarity applied"""
        start = len(self.sink.clauses)
        for clause in self.instance.clauses:
            lits: List[Lit] = []
            for position, literal in enumerate(clause.literals, 1):
                hold = holds[(clause.cid, position)]
                lits.append(-hold if literal.negated else hold)
            self.sink.add(lits)
        return self._since(start)

    def document(self) -> CnfDocument:
        clauses = list(self.sink.clauses)
        if self.sink.unsat:
            marker = self.varmap.fresh("unsat")
            clauses.extend([(marker,), (-marker,)])
        return CnfDocument(
            num_vars=self.varmap.num_vars,
            clauses=clauses,
            atoms=dict(self.varmap.items()),
            orders={name: list(grid) for name, grid in self.varmap.orders.items()},
        )


def encode(
    instance: Instance, tables: LookupTables, options: Optional[EncodeOptions] = None
) -> Tuple[CnfDocument, VarMap]:
    """Translate a normalized, analysed instance into a CNF document and its atom map"""
    encoder = OrderEncoder(instance, tables, options)
    encoder.encode_order_axioms()
    holds: Dict[Location, Lit] = {}
    for clause in instance.clauses:
        for position, literal in enumerate(clause.literals, 1):
            holds[(clause.cid, position)] = encoder.encode_literal(clause, position, literal)
    encoder.encode_clauses(holds)
    document = encoder.document()
    logger.info(f"✅ Encoded {document.num_vars} atoms and {document.num_clauses} clauses")
    return document, encoder.varmap
