#!/usr/bin/env python3
"""
Core data types for finite linear CSP instances
Domains, variables, canonical linear sums, literals, clauses and relations
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from csp_errors import (
    ArityMismatchError,
    DanglingRelationError,
    DuplicateNameError,
    EmptyDomainError,
    EmptySumError,
    KindMismatchError,
    UndeclaredVariableError,
    ValueOverflowError,
)

# Names starting with this prefix belong to variables introduced by normalization
AUX_PREFIX = "aux__"

INT64_MIN = -(2 ** 63)
INT64_MAX = 2 ** 63 - 1

Value = Union[int, bool]
Assignment = Dict[str, Value]


def check_int64(value: int, what: str = "value") -> int:
    """Return value unchanged, or raise when it does not fit a signed 64-bit integer"""
    if value < INT64_MIN or value > INT64_MAX:
        raise ValueOverflowError(f"{what} {value} exceeds the 64-bit integer range")
    return value


@dataclass(frozen=True)
class Domain:
    """Either the Boolean marker or a non-empty union of ascending, gap-separated intervals"""

    intervals: Tuple[Tuple[int, int], ...] = ()
    is_bool: bool = False

    def __post_init__(self):
        if self.is_bool:
            if self.intervals:
                raise KindMismatchError("a Boolean domain carries no intervals")
            return
        if not self.intervals:
            raise EmptyDomainError("integer domain is empty")
        previous_hi = None
        for lo, hi in self.intervals:
            check_int64(lo, "domain bound")
            check_int64(hi, "domain bound")
            if lo > hi:
                raise EmptyDomainError(f"interval [{lo},{hi}] is empty")
            if previous_hi is not None and previous_hi + 1 >= lo:
                raise KindMismatchError("domain intervals must be ascending and gap-separated")
            previous_hi = hi

    @classmethod
    def boolean(cls) -> "Domain":
        return cls(is_bool=True)

    @classmethod
    def from_intervals(cls, pairs: Iterable[Tuple[int, int]]) -> "Domain":
        """Build an integer domain, merging overlapping and adjacent pieces"""
        pieces = sorted((int(lo), int(hi)) for lo, hi in pairs)
        for lo, hi in pieces:
            if lo > hi:
                raise EmptyDomainError(f"interval [{lo},{hi}] is empty")
        merged: List[List[int]] = []
        for lo, hi in pieces:
            if merged and lo <= merged[-1][1] + 1:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in merged))

    @classmethod
    def from_values(cls, values: Iterable[int]) -> "Domain":
        return cls.from_intervals((v, v) for v in set(values))

    @property
    def min_value(self) -> int:
        self._require_integer()
        return self.intervals[0][0]

    @property
    def max_value(self) -> int:
        self._require_integer()
        return self.intervals[-1][1]

    @property
    def size(self) -> int:
        if self.is_bool:
            return 2
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    def __contains__(self, value) -> bool:
        if self.is_bool:
            return isinstance(value, bool)
        if isinstance(value, bool) or not isinstance(value, int):
            return False
        return any(lo <= value <= hi for lo, hi in self.intervals)

    def _require_integer(self):
        if self.is_bool:
            raise KindMismatchError("operation needs an integer domain")


def domain_values(domain: Domain) -> List[int]:
    """Every value of an integer domain, ascending"""
    if domain.is_bool:
        raise KindMismatchError("a Boolean domain has no integer values")
    values: List[int] = []
    for lo, hi in domain.intervals:
        values.extend(range(lo, hi + 1))
    return values


def successor_value(domain: Domain, value: int) -> Optional[int]:
    """Smallest domain value strictly greater than value, or None"""
    for lo, hi in domain.intervals:
        if value < lo:
            return lo
        if value < hi:
            return value + 1
    return None


class VarKind(Enum):
    BOOLEAN = "bool"
    INTEGER = "int"


@dataclass(frozen=True)
class Variable:
    name: str
    domain: Domain

    @property
    def kind(self) -> VarKind:
        return VarKind.BOOLEAN if self.domain.is_bool else VarKind.INTEGER

    @property
    def is_bool(self) -> bool:
        return self.domain.is_bool

    @property
    def auxiliary(self) -> bool:
        return self.name.startswith(AUX_PREFIX)


# Linear sums are left-nested: Add.right is always a Term

@dataclass(frozen=True)
class Term:
    coeff: int
    var: str


@dataclass(frozen=True)
class Add:
    left: "LinearSum"
    right: Term


LinearSum = Union[Term, Add]


def sum_terms(linear_sum: LinearSum) -> List[Term]:
    """Leaves of a sum, left to right"""
    terms: List[Term] = []
    node = linear_sum
    while isinstance(node, Add):
        terms.append(node.right)
        node = node.left
    terms.append(node)
    terms.reverse()
    return terms


def build_sum(terms: Sequence[Term]) -> LinearSum:
    if not terms:
        raise EmptySumError("a linear sum needs at least one term")
    node: LinearSum = terms[0]
    for term in terms[1:]:
        node = Add(node, term)
    return node


def normalize_sum(terms: Iterable[Tuple[int, str]]) -> LinearSum:
    """Merge duplicate variables, drop cancelled terms and sort leaves by variable name"""
    merged: Dict[str, int] = {}
    for coeff, var in terms:
        merged[var] = merged.get(var, 0) + int(coeff)
    leaves = [Term(check_int64(coeff, "coefficient"), var) for var, coeff in sorted(merged.items()) if coeff != 0]
    if not leaves:
        raise EmptySumError("all terms cancel")
    return build_sum(leaves)


def negate_sum(linear_sum: LinearSum) -> LinearSum:
    return build_sum([Term(check_int64(-t.coeff, "coefficient"), t.var) for t in sum_terms(linear_sum)])


def sum_prefixes(linear_sum: LinearSum) -> List[LinearSum]:
    """Prefix subtrees from the single leftmost leaf up to the whole sum"""
    terms = sum_terms(linear_sum)
    return [build_sum(terms[:i]) for i in range(1, len(terms) + 1)]


def evaluate_sum(linear_sum: LinearSum, values: Mapping[str, int]) -> int:
    return sum(t.coeff * values[t.var] for t in sum_terms(linear_sum))


def render_sum(linear_sum: LinearSum) -> str:
    """Parenthesised form, e.g. (((4*x)+(-3*y))+(1*z))"""
    if isinstance(linear_sum, Term):
        return f"({linear_sum.coeff}*{linear_sum.var})"
    return f"({render_sum(linear_sum.left)}+{render_sum(linear_sum.right)})"


class CmpOp(Enum):
    LE = "<="
    GE = ">="
    EQ = "="
    NE = "!="
    LT = "<"
    GT = ">"

    def holds(self, lhs: int, rhs: int) -> bool:
        if self is CmpOp.LE:
            return lhs <= rhs
        if self is CmpOp.GE:
            return lhs >= rhs
        if self is CmpOp.EQ:
            return lhs == rhs
        if self is CmpOp.NE:
            return lhs != rhs
        if self is CmpOp.LT:
            return lhs < rhs
        return lhs > rhs

    @property
    def opposite(self) -> "CmpOp":
        return _OPPOSITE[self]


_OPPOSITE = {
    CmpOp.LE: CmpOp.GT,
    CmpOp.GT: CmpOp.LE,
    CmpOp.GE: CmpOp.LT,
    CmpOp.LT: CmpOp.GE,
    CmpOp.EQ: CmpOp.NE,
    CmpOp.NE: CmpOp.EQ,
}


@dataclass(frozen=True)
class BoolVar:
    name: str


@dataclass(frozen=True)
class LinearCmp:
    sum: LinearSum
    op: CmpOp
    m: int


@dataclass(frozen=True)
class AllDifferent:
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Table:
    rel: str
    args: Tuple[str, ...]


LiteralExpr = Union[BoolVar, LinearCmp, AllDifferent, Table]


@dataclass(frozen=True)
class Literal:
    expr: LiteralExpr
    negated: bool = False

    def variables(self) -> Tuple[str, ...]:
        expr = self.expr
        if isinstance(expr, BoolVar):
            return (expr.name,)
        if isinstance(expr, LinearCmp):
            return tuple(t.var for t in sum_terms(expr.sum))
        return expr.args

    def __str__(self) -> str:
        return ("-" if self.negated else "") + describe_expr(self.expr)


def describe_expr(expr: LiteralExpr) -> str:
    if isinstance(expr, BoolVar):
        return expr.name
    if isinstance(expr, LinearCmp):
        return f"{render_sum(expr.sum)} {expr.op.value} {expr.m}"
    if isinstance(expr, AllDifferent):
        return f"alldifferent({','.join(expr.args)})"
    return f"table({expr.rel},{','.join(expr.args)})"


@dataclass(frozen=True)
class ConstraintClause:
    cid: str
    literals: Tuple[Literal, ...]

    def __post_init__(self):
        if not self.literals:
            raise KindMismatchError(f"clause {self.cid} has no literals")


class RelationKind(Enum):
    SUPPORTS = "supports"
    CONFLICTS = "conflicts"


@dataclass(frozen=True)
class Relation:
    rid: str
    arity: int
    kind: RelationKind
    tuples: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.arity < 1:
            raise ArityMismatchError(f"relation {self.rid} needs a positive arity")
        for row in self.tuples:
            if len(row) != self.arity:
                raise ArityMismatchError(f"tuple {row} of relation {self.rid} does not have arity {self.arity}")


@dataclass(frozen=True)
class Instance:
    """A CSP (V, C) plus the relations its table literals refer to"""

    variables: Tuple[Variable, ...] = ()
    clauses: Tuple[ConstraintClause, ...] = ()
    relations: Tuple[Relation, ...] = ()
    _by_name: Dict[str, Variable] = field(init=False, repr=False, compare=False)
    _relations: Dict[str, Relation] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_name: Dict[str, Variable] = OrderedDict()
        for var in self.variables:
            if var.name in by_name:
                raise DuplicateNameError(f"variable {var.name} declared twice")
            by_name[var.name] = var
        relations: Dict[str, Relation] = OrderedDict()
        for rel in self.relations:
            if rel.rid in relations:
                raise DuplicateNameError(f"relation {rel.rid} declared twice")
            relations[rel.rid] = rel
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_relations", relations)
        for clause in self.clauses:
            for literal in clause.literals:
                self._validate_literal(clause.cid, literal)

    def _validate_literal(self, cid: str, literal: Literal):
        expr = literal.expr
        for name in literal.variables():
            var = self._by_name.get(name)
            if var is None:
                raise UndeclaredVariableError(f"clause {cid} uses undeclared variable {name}")
            if var.is_bool != isinstance(expr, BoolVar):
                expected = "a Boolean" if isinstance(expr, BoolVar) else "an integer"
                raise KindMismatchError(f"clause {cid}: {name} is not {expected} variable")
        if isinstance(expr, (AllDifferent, Table)) and not expr.args:
            raise ArityMismatchError(f"clause {cid}: empty argument list")
        if isinstance(expr, Table):
            rel = self._relations.get(expr.rel)
            if rel is None:
                raise DanglingRelationError(f"clause {cid} refers to undeclared relation {expr.rel}")
            if rel.arity != len(expr.args):
                raise ArityMismatchError(
                    f"clause {cid}: relation {expr.rel} has arity {rel.arity}, got {len(expr.args)} arguments"
                )

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise UndeclaredVariableError(f"undeclared variable {name}") from None

    def has_variable(self, name: str) -> bool:
        return name in self._by_name

    def relation(self, rid: str) -> Relation:
        try:
            return self._relations[rid]
        except KeyError:
            raise DanglingRelationError(f"undeclared relation {rid}") from None

    @property
    def domains(self) -> Dict[str, Domain]:
        return {var.name: var.domain for var in self.variables}

    @property
    def bool_variables(self) -> List[Variable]:
        return sorted((v for v in self.variables if v.is_bool), key=lambda v: v.name)

    @property
    def int_variables(self) -> List[Variable]:
        return sorted((v for v in self.variables if not v.is_bool), key=lambda v: v.name)

    def is_normalized(self) -> bool:
        return all(
            not isinstance(lit.expr, LinearCmp) or lit.expr.op is CmpOp.LE
            for clause in self.clauses
            for lit in clause.literals
        )


def project_assignment(assignment: Mapping[str, Value]) -> Assignment:
    """Drop the variables introduced by normalization"""
    return {name: value for name, value in assignment.items() if not name.startswith(AUX_PREFIX)}


def assignment_key(assignment: Mapping[str, Value]) -> Tuple[Tuple[str, Value], ...]:
    return tuple(sorted(assignment.items()))


def project_solutions(solutions: Iterable[Mapping[str, Value]]) -> List[Assignment]:
    """Project every solution and drop duplicates created by the projection, keeping order"""
    seen = set()
    projected: List[Assignment] = []
    for solution in solutions:
        reduced = project_assignment(solution)
        key = assignment_key(reduced)
        if key not in seen:
            seen.add(key)
            projected.append(reduced)
    return projected
