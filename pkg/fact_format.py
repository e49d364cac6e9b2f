#!/usr/bin/env python3
"""
ASP fact format for CSP instances

    var(b).                                  Boolean variable
    var(x,0,range(1,3)).                     one fact per interval of an integer domain
    constraint(c2,op(le,op(add,op(mul,4,x),op(mul,-3,y)),0)).
    rel(r,2,3,supports).  tuple(r,1,1,1).    relation header and its tuple cells
"""

import logging
import re
from collections import OrderedDict
from typing import Dict, List, Tuple, Union

from csp_errors import (
    ArityMismatchError,
    DanglingRelationError,
    EmptySumError,
    FactFormatError,
    NotNormalizedError,
)
from csp_model import (
    AllDifferent,
    BoolVar,
    CmpOp,
    ConstraintClause,
    Domain,
    Instance,
    LinearCmp,
    LinearSum,
    Literal,
    Relation,
    RelationKind,
    Table,
    Term,
    Variable,
    normalize_sum,
)
from reader_interface import IInstanceReader, IInstanceWriter

logger = logging.getLogger(__name__)

_BARE_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_RESERVED = {"nil", "op", "arg", "global", "rel", "range"}


def quote_name(name: str) -> str:
    """Bare constant when it is a plain lower-case identifier, otherwise a quoted string"""
    if _BARE_NAME.match(name) and name not in _RESERVED:
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def sum_term(linear_sum: LinearSum) -> str:
    if isinstance(linear_sum, Term):
        return f"op(mul,{linear_sum.coeff},{quote_name(linear_sum.var)})"
    return f"op(add,{sum_term(linear_sum.left)},{sum_term(linear_sum.right)})"


def _arg_list(names) -> str:
    text = "nil"
    for name in reversed(names):
        text = f"arg({quote_name(name)},{text})"
    return text


def literal_term(literal: Literal) -> str:
    expr = literal.expr
    if isinstance(expr, BoolVar):
        text = quote_name(expr.name)
    elif isinstance(expr, LinearCmp):
        if expr.op is not CmpOp.LE:
            raise NotNormalizedError(f"comparison {expr.op.value} must be normalized before emitting facts")
        text = f"op(le,{sum_term(expr.sum)},{expr.m})"
    elif isinstance(expr, AllDifferent):
        text = f"global(alldifferent,{_arg_list(expr.args)})"
    else:
        text = f"rel({quote_name(expr.rel)},{_arg_list(expr.args)})"
    return f"op(neg,{text})" if literal.negated else text


def emit_facts(instance: Instance) -> str:
    """Serialize a normalized instance; the output is a pure function of the instance"""
    lines: List[str] = []
    for var in instance.variables:
        name = quote_name(var.name)
        if var.is_bool:
            lines.append(f"var({name}).")
            continue
        for index, (lo, hi) in enumerate(var.domain.intervals):
            lines.append(f"var({name},{index},range({lo},{hi})).")
    for clause in instance.clauses:
        cid = quote_name(clause.cid)
        for literal in clause.literals:
            lines.append(f"constraint({cid},{literal_term(literal)}).")
    for rel in instance.relations:
        rid = quote_name(rel.rid)
        lines.append(f"rel({rid},{rel.arity},{len(rel.tuples)},{rel.kind.value}).")
        for t, row in enumerate(rel.tuples, 1):
            for i, value in enumerate(row, 1):
                lines.append(f"tuple({rid},{t},{i},{value}).")
    return "".join(line + "\n" for line in lines)


# Parsing

class Quoted(str):
    """A constant written as a quoted string"""


class Compound:
    __slots__ = ("functor", "args")

    def __init__(self, functor: str, args: List["TermValue"]):
        self.functor = functor
        self.args = args

    def __repr__(self):
        return f"{self.functor}({','.join(map(repr, self.args))})"


TermValue = Union[int, str, Compound]

_FACT_TOKEN = re.compile(
    r"(?P<space>\s+|%[^\n]*)"
    r"|(?P<int>-?\d+)"
    r"|(?P<name>[a-z][A-Za-z0-9_]*)"
    r'|(?P<string>"(?:[^"\\]|\\.)*")'
    r"|(?P<punct>[(),.])"
)


def _unescape(text: str) -> str:
    return re.sub(r"\\(.)", r"\1", text[1:-1])


class _TermReader:
    def __init__(self, text: str):
        self.tokens: List[Tuple[str, str, int]] = []
        line = 1
        pos = 0
        while pos < len(text):
            match = _FACT_TOKEN.match(text, pos)
            if match is None:
                raise FactFormatError(f"unexpected character {text[pos]!r}", line)
            if match.lastgroup != "space":
                self.tokens.append((match.lastgroup, match.group(), line))
            line += match.group().count("\n")
            pos = match.end()
        self.pos = 0

    def _next(self) -> Tuple[str, str, int]:
        if self.pos >= len(self.tokens):
            last_line = self.tokens[-1][2] if self.tokens else 1
            raise FactFormatError("unexpected end of document", last_line)
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def _peek_text(self) -> str:
        return self.tokens[self.pos][1] if self.pos < len(self.tokens) else ""

    def facts(self) -> List[Tuple[Compound, int]]:
        facts = []
        while self.pos < len(self.tokens):
            line = self.tokens[self.pos][2]
            term = self.term()
            kind, text, where = self._next()
            if text != ".":
                raise FactFormatError(f"expected '.', found {text!r}", where)
            if not isinstance(term, Compound):
                term = Compound(term, [])
            facts.append((term, line))
        return facts

    def term(self) -> TermValue:
        kind, text, line = self._next()
        if kind == "int":
            return int(text)
        if kind == "string":
            return Quoted(_unescape(text))
        if kind != "name":
            raise FactFormatError(f"unexpected {text!r}", line)
        if self._peek_text() != "(":
            return text
        self._next()
        args = [self.term()]
        while True:
            _, sep, where = self._next()
            if sep == ")":
                return Compound(text, args)
            if sep != ",":
                raise FactFormatError(f"expected ',' or ')', found {sep!r}", where)
            args.append(self.term())


def _is_compound(term: TermValue, functor: str, arity: int) -> bool:
    return isinstance(term, Compound) and term.functor == functor and len(term.args) == arity


def _name(term: TermValue, line: int, what: str) -> str:
    if isinstance(term, str):
        return str(term)
    raise FactFormatError(f"expected {what}, found {term!r}", line)


def _integer(term: TermValue, line: int, what: str) -> int:
    if isinstance(term, int):
        return term
    raise FactFormatError(f"expected {what}, found {term!r}", line)


class FactDocumentParser:
    """Rebuilds an Instance from a fact document"""

    def __init__(self):
        self.bools: Dict[str, int] = OrderedDict()
        self.intervals: Dict[str, Dict[int, Tuple[int, int]]] = OrderedDict()
        self.order: Dict[str, None] = OrderedDict()
        self.clauses: Dict[str, List[Tuple[TermValue, int]]] = OrderedDict()
        self.relations: Dict[str, Tuple[int, int, RelationKind, int]] = OrderedDict()
        self.cells: Dict[str, Dict[Tuple[int, int], int]] = {}

    def parse(self, text: str) -> Instance:
        for fact, line in _TermReader(text).facts():
            handler = getattr(self, f"_fact_{fact.functor}_{len(fact.args)}", None)
            if handler is None:
                raise FactFormatError(f"unknown predicate {fact.functor}/{len(fact.args)}", line)
            handler(fact.args, line)

        variables: List[Variable] = []
        for name in self.order:
            if name in self.bools:
                variables.append(Variable(name, Domain.boolean()))
            else:
                pieces = self.intervals[name]
                variables.append(Variable(name, Domain.from_intervals(pieces[k] for k in sorted(pieces))))

        relations = [self._relation(rid) for rid in self.relations]
        for rid in self.cells:
            if rid not in self.relations:
                raise DanglingRelationError(f"tuple facts for undeclared relation {rid}")

        clauses = []
        for cid, literals in self.clauses.items():
            clauses.append(ConstraintClause(cid, tuple(self._literal(term, line) for term, line in literals)))
        for clause in clauses:
            for literal in clause.literals:
                if isinstance(literal.expr, Table) and literal.expr.rel not in self.relations:
                    raise DanglingRelationError(f"clause {clause.cid} refers to undeclared relation {literal.expr.rel}")
        instance = Instance(tuple(variables), tuple(clauses), tuple(relations))
        logger.info(f"✅ Read {len(variables)} variables and {len(clauses)} clauses from facts")
        return instance

    def _declare(self, name: str, line: int, boolean: bool):
        if name in self.order and (name in self.bools) != boolean:
            raise FactFormatError(f"variable {name} declared as both Boolean and integer", line)
        self.order.setdefault(name)

    def _fact_var_1(self, args, line):
        name = _name(args[0], line, "a variable name")
        self._declare(name, line, True)
        self.bools[name] = line

    def _fact_var_3(self, args, line):
        name = _name(args[0], line, "a variable name")
        index = _integer(args[1], line, "an interval index")
        if not _is_compound(args[2], "range", 2):
            raise FactFormatError(f"expected range(L,U) for {name}", line)
        lo = _integer(args[2].args[0], line, "a lower bound")
        hi = _integer(args[2].args[1], line, "an upper bound")
        self._declare(name, line, False)
        pieces = self.intervals.setdefault(name, {})
        if index in pieces:
            raise FactFormatError(f"interval {index} of {name} given twice", line)
        pieces[index] = (lo, hi)

    def _fact_constraint_2(self, args, line):
        cid = _name(args[0], line, "a clause id")
        self.clauses.setdefault(cid, []).append((args[1], line))

    def _fact_rel_4(self, args, line):
        rid = _name(args[0], line, "a relation id")
        arity = _integer(args[1], line, "an arity")
        count = _integer(args[2], line, "a tuple count")
        try:
            kind = RelationKind(_name(args[3], line, "supports or conflicts"))
        except ValueError:
            raise FactFormatError("expected supports or conflicts", line) from None
        if rid in self.relations:
            raise FactFormatError(f"relation {rid} declared twice", line)
        self.relations[rid] = (arity, count, kind, line)

    def _fact_tuple_4(self, args, line):
        rid = _name(args[0], line, "a relation id")
        t = _integer(args[1], line, "a tuple id")
        i = _integer(args[2], line, "an argument index")
        value = _integer(args[3], line, "a tuple value")
        header = self.relations.get(rid)
        if header is not None and not 1 <= i <= header[0]:
            raise ArityMismatchError(f"argument index {i} outside arity {header[0]} of relation {rid}", line)
        cells = self.cells.setdefault(rid, {})
        if (t, i) in cells:
            raise FactFormatError(f"cell ({t},{i}) of relation {rid} given twice", line)
        cells[(t, i)] = value

    def _relation(self, rid: str) -> Relation:
        arity, count, kind, line = self.relations[rid]
        cells = self.cells.get(rid, {})
        for (t, i) in cells:
            if not 1 <= i <= arity:
                raise ArityMismatchError(f"argument index {i} outside arity {arity} of relation {rid}", line)
            if not 1 <= t <= count:
                raise FactFormatError(f"tuple id {t} outside count {count} of relation {rid}", line)
        if len(cells) != arity * count:
            raise FactFormatError(f"relation {rid} needs {arity * count} tuple cells, found {len(cells)}", line)
        rows = tuple(tuple(cells[(t, i)] for i in range(1, arity + 1)) for t in range(1, count + 1))
        return Relation(rid, arity, kind, rows)

    def _literal(self, term: TermValue, line: int) -> Literal:
        negated = False
        while _is_compound(term, "op", 2) and term.args[0] == "neg":
            negated = not negated
            term = term.args[1]
        if isinstance(term, str):
            return Literal(BoolVar(str(term)), negated)
        if _is_compound(term, "op", 3) and term.args[0] == "le":
            terms: List[Tuple[int, str]] = []
            self._sum(term.args[1], line, terms)
            try:
                linear_sum = normalize_sum(terms)
            except EmptySumError:
                raise FactFormatError("comparison over an empty sum", line) from None
            return Literal(LinearCmp(linear_sum, CmpOp.LE, _integer(term.args[2], line, "a bound")), negated)
        if _is_compound(term, "global", 2):
            if term.args[0] != "alldifferent":
                raise FactFormatError(f"unsupported global constraint {term.args[0]!r}", line)
            return Literal(AllDifferent(tuple(self._args(term.args[1], line))), negated)
        if _is_compound(term, "rel", 2):
            rid = _name(term.args[0], line, "a relation id")
            return Literal(Table(rid, tuple(self._args(term.args[1], line))), negated)
        raise FactFormatError(f"unknown constraint term {term!r}", line)

    def _sum(self, term: TermValue, line: int, out: List[Tuple[int, str]]):
        if _is_compound(term, "op", 3) and term.args[0] == "mul":
            out.append((_integer(term.args[1], line, "a coefficient"), _name(term.args[2], line, "a variable")))
        elif _is_compound(term, "op", 3) and term.args[0] == "add":
            self._sum(term.args[1], line, out)
            self._sum(term.args[2], line, out)
        else:
            raise FactFormatError(f"malformed sum {term!r}", line)

    def _args(self, term: TermValue, line: int) -> List[str]:
        names: List[str] = []
        while _is_compound(term, "arg", 2):
            names.append(_name(term.args[0], line, "an argument variable"))
            term = term.args[1]
        if term != "nil" or isinstance(term, Quoted):
            raise FactFormatError(f"malformed argument list ending in {term!r}", line)
        return names


def parse_facts(text: str) -> Instance:
    """Parse a fact document back into an Instance"""
    return FactDocumentParser().parse(text)


class FactInstanceReader(IInstanceReader):
    format_name = "facts"

    def read(self, text: str) -> Instance:
        return parse_facts(text)


class FactInstanceWriter(IInstanceWriter):
    def write(self, instance: Instance) -> str:
        return emit_facts(instance)
