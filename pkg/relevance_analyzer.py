#!/usr/bin/env python3
"""
Static extraction of relevant values
Bounds analysis of linear inequalities plus value release for alldifferent and table constraints
"""

import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Set, Tuple

from csp_errors import NotNormalizedError
from csp_model import (
    AllDifferent,
    CmpOp,
    Domain,
    Instance,
    LinearCmp,
    LinearSum,
    RelationKind,
    Table,
    Term,
    build_sum,
    check_int64,
    domain_values,
    successor_value,
    sum_prefixes,
    sum_terms,
)
from fact_format import quote_name, sum_term

logger = logging.getLogger(__name__)

IntervalSet = List[Tuple[int, int]]
Location = Tuple[str, int]


def scale_range(domain: Domain, a: int) -> IntervalSet:
    """Intervals covering a*x for x in the domain"""
    if a >= 0:
        scaled = [(check_int64(a * lo), check_int64(a * hi)) for lo, hi in domain.intervals]
    else:
        scaled = [(check_int64(a * hi), check_int64(a * lo)) for lo, hi in reversed(domain.intervals)]
    merged: IntervalSet = []
    for lo, hi in scaled:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _products(a: int, domain: Domain) -> List[int]:
    return sorted(check_int64(a * k) for k in domain_values(domain))


def prefix_bounds(linear_sum: LinearSum, domains: Dict[str, Domain]) -> List[Tuple[int, int]]:
    """(low, upp) of every prefix, shortest first"""
    bounds: List[Tuple[int, int]] = []
    low = upp = 0
    for term in sum_terms(linear_sum):
        scaled = scale_range(domains[term.var], term.coeff)
        low = check_int64(low + scaled[0][0], "sum bound")
        upp = check_int64(upp + scaled[-1][1], "sum bound")
        bounds.append((low, upp))
    return bounds


def push_thresholds(linear_sum: LinearSum, m: int, domains: Dict[str, Domain]) -> List[Tuple[int, int]]:
    """(blow, bupp) of every prefix, shortest first, pushed inward from the full sum"""
    terms = sum_terms(linear_sum)
    bounds = prefix_bounds(linear_sum, domains)
    low, upp = bounds[-1]
    thresholds = [(max(m, low), min(m, upp))]
    for i in range(len(terms) - 1, 0, -1):
        scaled = scale_range(domains[terms[i].var], terms[i].coeff)
        blow, bupp = thresholds[0]
        inner_low, inner_upp = bounds[i - 1]
        thresholds.insert(
            0,
            (
                max(check_int64(blow - scaled[-1][1], "threshold"), inner_low),
                min(check_int64(bupp - scaled[0][0], "threshold"), inner_upp),
            ),
        )
    return thresholds


def bound_set(previous: Sequence[int], a: int, domain: Domain, blow: int, bupp: int) -> List[int]:
    """Upper bounds worth distinguishing for a prefix ending in a*x, ascending

    previous is the bound set of the prefix without its last addend ({0} for the first).
    """
    products = _products(a, domain)
    result: Set[int] = set()
    for j in previous:
        limit = bupp - j
        for product in products[: bisect_right(products, limit)]:
            # Sums below blow all behave like blow, so x <= 2 over 1..3 keeps only {2}
            result.add(max(j + product, blow))
    return sorted(result)


def addend_pairs(previous: Sequence[int], bounds: Sequence[int], a: int, domain: Domain) -> List[Tuple[int, int]]:
    """Maximal (j, a*k) pairs: for each earlier bound j and bound ub, the largest a*k with j + a*k <= ub"""
    products = _products(a, domain)
    pairs: Set[Tuple[int, int]] = set()
    for j in previous:
        for ub in bounds:
            position = bisect_right(products, ub - j)
            if position:
                pairs.add((j, products[position - 1]))
    return sorted(pairs)


def erg(j: int, product: int, bounds: Sequence[int]) -> int:
    """Smallest bound dominating j + product"""
    position = bisect_left(bounds, j + product)
    if position == len(bounds):
        raise ValueError(f"no bound dominates {j} + {product}")
    return bounds[position]


class PrefixKey(NamedTuple):
    """Structural key of a prefix: coefficient/domain signature of its inequality, bound and length"""

    signature: Tuple[Tuple[int, Tuple[Tuple[int, int], ...]], ...]
    m: int
    length: int


class MulLook(NamedTuple):
    value: int
    product: int
    # Less threshold read by the leaf literal; None when a*x <= product always holds
    threshold: Optional[int]


@dataclass(frozen=True)
class LinearCore:
    """Name-independent analysis of one inequality signature"""

    bounds: Tuple[Tuple[int, int], ...]
    thresholds: Tuple[Tuple[int, int], ...]
    bound_sets: Tuple[Tuple[int, ...], ...]
    pairs: Tuple[Tuple[Tuple[int, int, int], ...], ...]
    # True / False for trivially satisfied / violated inequalities, None otherwise
    constant: Optional[bool]


@dataclass(frozen=True)
class LinearAnalysis:
    terms: Tuple[Term, ...]
    m: int
    keys: Tuple[PrefixKey, ...]
    core: LinearCore

    @property
    def constant(self) -> Optional[bool]:
        return self.core.constant

    @property
    def bound_sets(self) -> Tuple[Tuple[int, ...], ...]:
        return self.core.bound_sets

    @property
    def pairs(self) -> Tuple[Tuple[Tuple[int, int, int], ...], ...]:
        return self.core.pairs

    @property
    def prefixes(self) -> List[LinearSum]:
        return sum_prefixes(build_sum(self.terms))


@dataclass
class AllDifferentIndex:
    index: Dict[str, int]
    values: List[int]
    lastindex: Dict[int, int]
    difall: bool


@dataclass
class LookupTables:
    relevant: Dict[str, List[int]] = field(default_factory=dict)
    order: Dict[str, List[int]] = field(default_factory=dict)
    mul_look: Dict[Tuple[int, str], List[MulLook]] = field(default_factory=dict)
    add_look: Dict[PrefixKey, List[Tuple[int, int, int]]] = field(default_factory=dict)
    sum_bound_order: Dict[PrefixKey, List[int]] = field(default_factory=dict)
    total_ub: Dict[PrefixKey, int] = field(default_factory=dict)
    linear: Dict[Location, LinearAnalysis] = field(default_factory=dict)
    ad_index: Dict[Location, AllDifferentIndex] = field(default_factory=dict)
    tbl_index: Dict[Location, Dict[str, int]] = field(default_factory=dict)
    cores_computed: int = 0


def analyze_core(terms: Sequence[Term], m: int, domains: Dict[str, Domain]) -> LinearCore:
    linear_sum = build_sum(terms)
    bounds = prefix_bounds(linear_sum, domains)
    low, upp = bounds[-1]
    if upp <= m or low > m:
        return LinearCore(tuple(bounds), (), (), (), upp <= m)

    thresholds = push_thresholds(linear_sum, m, domains)
    bound_sets: List[Tuple[int, ...]] = []
    pairs: List[Tuple[Tuple[int, int, int], ...]] = []
    previous: Sequence[int] = (0,)
    for term, (blow, bupp) in zip(terms, thresholds):
        domain = domains[term.var]
        bounds_here = bound_set(previous, term.coeff, domain, blow, bupp)
        if not bounds_here:
            logger.debug(f"Empty bound set while analysing {terms} <= {m}")
            return LinearCore(tuple(bounds), tuple(thresholds), (), (), False)
        pairs_here = tuple(
            (j, e2, erg(j, e2, bounds_here)) for j, e2 in addend_pairs(previous, bounds_here, term.coeff, domain)
        )
        bound_sets.append(tuple(bounds_here))
        pairs.append(pairs_here)
        previous = bounds_here
    return LinearCore(tuple(bounds), tuple(thresholds), tuple(bound_sets), tuple(pairs), None)


class RelevanceAnalyzer:
    """Builds LookupTables for a normalized instance"""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.domains = instance.domains
        self.tables = LookupTables()
        self._cores: Dict[Tuple, LinearCore] = {}
        self._relevant: Dict[str, Set[int]] = {v.name: set() for v in instance.int_variables}
        self._cuts: Dict[str, Set[int]] = {v.name: set() for v in instance.int_variables}

    def run(self) -> LookupTables:
        for clause in self.instance.clauses:
            for index, literal in enumerate(clause.literals, 1):
                location = (clause.cid, index)
                expr = literal.expr
                if isinstance(expr, LinearCmp):
                    self._linear(location, expr)
                elif isinstance(expr, AllDifferent):
                    self._alldifferent(location, expr)
                elif isinstance(expr, Table):
                    self._table(location, expr)
        self._finish()
        return self.tables

    def _release(self, var: str, value: int, cut: bool = False):
        self._relevant[var].add(value)
        if cut:
            nxt = successor_value(self.domains[var], value)
            if nxt is not None:
                self._cuts[var].add(nxt)

    def _linear(self, location: Location, expr: LinearCmp):
        if expr.op is not CmpOp.LE:
            raise NotNormalizedError(f"clause {location[0]} still holds a {expr.op.value} comparison")
        terms = tuple(sum_terms(expr.sum))
        signature = tuple((t.coeff, self.domains[t.var].intervals) for t in terms)
        cache_key = (signature, expr.m)
        core = self._cores.get(cache_key)
        if core is None:
            core = analyze_core(terms, expr.m, self.domains)
            self._cores[cache_key] = core
            self.tables.cores_computed += 1
        keys = tuple(PrefixKey(signature, expr.m, i) for i in range(1, len(terms) + 1))
        analysis = LinearAnalysis(terms, expr.m, keys, core)
        self.tables.linear[location] = analysis
        self.tables.total_ub[keys[-1]] = core.bounds[-1][1]
        if core.constant is not None:
            return

        for term, key, bounds_here, pairs_here in zip(terms, keys, core.bound_sets, core.pairs):
            self.tables.add_look.setdefault(key, list(pairs_here))
            self.tables.sum_bound_order.setdefault(key, sorted(bounds_here, reverse=True))
            looks = self.tables.mul_look.setdefault((term.coeff, term.var), [])
            known = {look.value for look in looks}
            for _, product, _ in pairs_here:
                value = product // term.coeff
                self._release(term.var, value, cut=term.coeff > 0)
                if value in known:
                    continue
                known.add(value)
                if term.coeff > 0:
                    threshold = successor_value(self.domains[term.var], value)
                else:
                    threshold = value
                looks.append(MulLook(value, product, threshold))
            looks.sort(key=lambda look: look.value, reverse=True)

    def _alldifferent(self, location: Location, expr: AllDifferent):
        index: Dict[str, int] = {}
        lastindex: Dict[int, int] = {}
        union: Set[int] = set()
        for position, var in enumerate(expr.args, 1):
            index.setdefault(var, position)
            for value in domain_values(self.domains[var]):
                self._release(var, value)
                union.add(value)
                lastindex[value] = position
        values = sorted(union)
        self.tables.ad_index[location] = AllDifferentIndex(
            index, values, {v: lastindex[v] for v in values}, len(values) == len(expr.args)
        )

    def _table(self, location: Location, expr: Table):
        relation = self.instance.relation(expr.rel)
        index: Dict[str, int] = {}
        for position, var in enumerate(expr.args, 1):
            index.setdefault(var, position)
            domain = self.domains[var]
            if relation.kind is RelationKind.CONFLICTS:
                for value in domain_values(domain):
                    self._release(var, value)
                continue
            for row in relation.tuples:
                if row[position - 1] in domain:
                    self._release(var, row[position - 1], cut=True)
        self.tables.tbl_index[location] = index

    def _finish(self):
        for var in self.instance.int_variables:
            domain = var.domain
            relevant = self._relevant[var.name] or {domain.min_value}
            self.tables.relevant[var.name] = sorted(relevant, reverse=True)
            grid = relevant | self._cuts[var.name] | {domain.min_value}
            self.tables.order[var.name] = sorted(grid, reverse=True)
        logger.info(
            f"✅ Analysed {len(self.tables.linear)} inequalities ({self.tables.cores_computed} distinct), "
            f"{sum(len(v) for v in self.tables.order.values())} order values"
        )


def relevant_values(instance: Instance) -> LookupTables:
    """Run the three-stage analysis over a normalized instance"""
    return RelevanceAnalyzer(instance).run()


# Derived tables rendered as facts

def dump_tables(tables: LookupTables) -> str:
    lines: List[str] = []
    for var, values in tables.relevant.items():
        name = quote_name(var)
        lines.extend(f"look({name},{value})." for value in values)
        grid = tables.order[var]
        lines.extend(f"order({name},{hi},{lo})." for hi, lo in zip(grid, grid[1:]))
    for (coeff, var), looks in tables.mul_look.items():
        for look in looks:
            lines.append(f"look(op(mul,{coeff},{quote_name(var)}),{look.value},{look.product}).")

    named: Dict[PrefixKey, str] = {}
    for analysis in tables.linear.values():
        prefixes = analysis.prefixes
        for key, prefix in zip(analysis.keys, prefixes):
            named.setdefault(key, sum_term(prefix))
    for key, upp in tables.total_ub.items():
        lines.append(f"total({named[key]},{upp}).")
    for key, bounds in tables.sum_bound_order.items():
        lines.extend(f"bound({named[key]},{value})." for value in bounds)
    for key, pairs in tables.add_look.items():
        prefix = named[key]
        previous = named.get(key._replace(length=key.length - 1), "0")
        for j, product, ub in pairs:
            lines.append(f"look({prefix},{previous},{j},{product},{ub}).")

    for (cid, position), ad in tables.ad_index.items():
        con = f"con({quote_name(cid)},{position})"
        lines.extend(f"index({con},{quote_name(var)},{i})." for var, i in ad.index.items())
        lines.extend(f"lastindex({con},{value},{i})." for value, i in ad.lastindex.items())
        if ad.difall:
            lines.append(f"difall({con}).")
    for (cid, position), index in tables.tbl_index.items():
        con = f"con({quote_name(cid)},{position})"
        lines.extend(f"index({con},{quote_name(var)},{i})." for var, i in index.items())
    return "".join(line + "\n" for line in lines)
