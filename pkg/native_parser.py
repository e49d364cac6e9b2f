#!/usr/bin/env python3
"""
Parser for the line-based native instance format

    bool NAME
    int NAME LO HI [LO HI ...]
    rel NAME ARITY supports|conflicts
    tuple NAME V1 ... VARITY
    clause LIT ; LIT ; ...

A literal is `[-] NAME`, `[-] sum(A1*X1 + A2*X2 ...) OP M`, `[-] alldifferent(X, ...)`
or `[-] table(REL, X, ...)` with OP one of <=, >=, <, >, =, !=.  '%' starts a comment.
"""

import logging
import re
from typing import Dict, List, Optional, Tuple

from csp_errors import (
    ArityMismatchError,
    DanglingRelationError,
    DuplicateNameError,
    EmptyDomainError,
    EmptySumError,
    ParseError,
    UndeclaredVariableError,
)
from csp_model import (
    AUX_PREFIX,
    AllDifferent,
    BoolVar,
    CmpOp,
    ConstraintClause,
    Domain,
    Instance,
    LinearCmp,
    Literal,
    Relation,
    RelationKind,
    Table,
    Term,
    Variable,
    normalize_sum,
)
from reader_interface import IInstanceReader

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<int>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|!=|<|>|=)"
    r"|(?P<punct>[();,*+\-])"
)

_COMPARISONS = {op.value: op for op in CmpOp}


class _FoldedFalse:
    """A comparison over a constant sum that never holds"""

    __slots__ = ("stand_in",)

    def __init__(self, stand_in: Literal):
        self.stand_in = stand_in


class _Token:
    __slots__ = ("kind", "text", "column")

    def __init__(self, kind: str, text: str, column: int):
        self.kind = kind
        self.text = text
        self.column = column


def _tokenize(text: str, line: int) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if match.lastgroup != "space":
            tokens.append(_Token(match.lastgroup, match.group(), pos + 1))
        pos = match.end()
    return tokens


class _LineCursor:
    """Token stream over one statement with located errors"""

    def __init__(self, tokens: List[_Token], line: int, width: int):
        self.tokens = tokens
        self.line = line
        self.width = width
        self.pos = 0

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def error(self, message: str, token: Optional[_Token] = None, cls=ParseError) -> ParseError:
        token = token if token is not None else self.peek()
        column = token.column if token is not None else self.width + 1
        return cls(message, self.line, column)

    def next(self, what: str) -> _Token:
        token = self.peek()
        if token is None:
            raise self.error(f"expected {what}, found end of line")
        self.pos += 1
        return token

    def accept(self, text: str) -> bool:
        token = self.peek()
        if token is not None and token.text == text and token.kind != "name":
            self.pos += 1
            return True
        return False

    def expect(self, text: str):
        token = self.peek()
        if token is None or token.text != text:
            found = "end of line" if token is None else repr(token.text)
            raise self.error(f"expected {text!r}, found {found}")
        self.pos += 1

    def name(self, what: str = "a name") -> _Token:
        token = self.next(what)
        if token.kind != "name":
            raise self.error(f"expected {what}, found {token.text!r}", token)
        return token

    def integer(self, what: str = "an integer") -> int:
        negative = self.accept("-")
        token = self.next(what)
        if token.kind != "int":
            raise self.error(f"expected {what}, found {token.text!r}", token)
        value = int(token.text)
        return -value if negative else value

    def finish(self):
        if not self.at_end():
            raise self.error(f"unexpected {self.peek().text!r}")


class _RelationDraft:
    def __init__(self, rid: str, arity: int, kind: RelationKind):
        self.rid = rid
        self.arity = arity
        self.kind = kind
        self.tuples: List[Tuple[int, ...]] = []


class NativeParser:
    """Parses one native source into an Instance"""

    def __init__(self):
        self.variables: Dict[str, Variable] = {}
        self.relations: Dict[str, _RelationDraft] = {}
        self.clauses: List[ConstraintClause] = []

    def parse(self, text: str) -> Instance:
        for number, raw in enumerate(text.splitlines(), 1):
            body = raw.split("%", 1)[0]
            tokens = _tokenize(body, number)
            if not tokens:
                continue
            cursor = _LineCursor(tokens, number, len(body.rstrip()))
            keyword = cursor.name("a statement keyword")
            handler = getattr(self, f"_statement_{keyword.text}", None)
            if handler is None:
                raise cursor.error(f"unknown statement {keyword.text!r}", keyword)
            handler(cursor)
            cursor.finish()

        relations = tuple(
            Relation(draft.rid, draft.arity, draft.kind, tuple(draft.tuples)) for draft in self.relations.values()
        )
        instance = Instance(tuple(self.variables.values()), tuple(self.clauses), relations)
        logger.info(
            f"✅ Parsed {len(instance.variables)} variables, {len(instance.clauses)} clauses, "
            f"{len(relations)} relations"
        )
        return instance

    def _declare(self, cursor: _LineCursor, token: _Token, domain: Domain):
        if token.text.startswith(AUX_PREFIX):
            raise cursor.error(f"names starting with {AUX_PREFIX!r} are reserved", token)
        if token.text in self.variables:
            raise cursor.error(f"variable {token.text} declared twice", token, DuplicateNameError)
        self.variables[token.text] = Variable(token.text, domain)

    def _statement_bool(self, cursor: _LineCursor):
        token = cursor.name("a variable name")
        self._declare(cursor, token, Domain.boolean())

    def _statement_int(self, cursor: _LineCursor):
        token = cursor.name("a variable name")
        bounds: List[int] = []
        while not cursor.at_end():
            bounds.append(cursor.integer("a domain bound"))
        if not bounds or len(bounds) % 2:
            raise cursor.error("an integer domain needs LO HI pairs", token)
        pairs = list(zip(bounds[0::2], bounds[1::2]))
        for lo, hi in pairs:
            if lo > hi:
                raise cursor.error(f"empty interval {lo}..{hi} for {token.text}", token, EmptyDomainError)
        self._declare(cursor, token, Domain.from_intervals(pairs))

    def _statement_rel(self, cursor: _LineCursor):
        token = cursor.name("a relation name")
        if token.text in self.relations:
            raise cursor.error(f"relation {token.text} declared twice", token, DuplicateNameError)
        arity = cursor.integer("the relation arity")
        if arity < 1:
            raise cursor.error("relation arity must be positive", token, ArityMismatchError)
        kind_token = cursor.name("supports or conflicts")
        try:
            kind = RelationKind(kind_token.text)
        except ValueError:
            raise cursor.error("expected supports or conflicts", kind_token) from None
        rid = "r" if not self.relations else f"r{len(self.relations) + 1}"
        self.relations[token.text] = _RelationDraft(rid, arity, kind)

    def _statement_tuple(self, cursor: _LineCursor):
        token = cursor.name("a relation name")
        draft = self.relations.get(token.text)
        if draft is None:
            raise cursor.error(f"undeclared relation {token.text}", token, DanglingRelationError)
        values: List[int] = []
        while not cursor.at_end():
            values.append(cursor.integer("a tuple value"))
        if len(values) != draft.arity:
            raise cursor.error(
                f"relation {token.text} has arity {draft.arity}, tuple has {len(values)} values",
                token,
                ArityMismatchError,
            )
        draft.tuples.append(tuple(values))

    def _statement_clause(self, cursor: _LineCursor):
        literals: List[Literal] = []
        stand_in: Optional[Literal] = None
        satisfied = False
        while True:
            literal = self._literal(cursor)
            if literal is True:
                satisfied = True
            elif isinstance(literal, _FoldedFalse):
                stand_in = stand_in or literal.stand_in
            else:
                literals.append(literal)
            if not cursor.accept(";"):
                break
        if satisfied:
            logger.debug(f"Clause on line {cursor.line} always holds, dropped")
            return
        if not literals:
            logger.debug(f"Clause on line {cursor.line} never holds, kept as {stand_in}")
            literals.append(stand_in)
        self.clauses.append(ConstraintClause(f"c{len(self.clauses) + 1}", tuple(literals)))

    def _literal(self, cursor: _LineCursor):
        """Parse one literal; True or _FoldedFalse stand for comparisons over constant sums"""
        negated = cursor.accept("-")
        head = cursor.name("a literal")
        if head.text == "sum" and cursor.peek() is not None and cursor.peek().text == "(":
            return self._comparison(cursor, negated)
        if head.text == "alldifferent":
            args = self._arguments(cursor, self._integer_variable)
            return Literal(AllDifferent(tuple(args)), negated)
        if head.text == "table":
            cursor.expect("(")
            rel_token = cursor.name("a relation name")
            draft = self.relations.get(rel_token.text)
            if draft is None:
                raise cursor.error(f"undeclared relation {rel_token.text}", rel_token, DanglingRelationError)
            args: List[str] = []
            while cursor.accept(","):
                args.append(self._integer_variable(cursor))
            cursor.expect(")")
            if len(args) != draft.arity:
                raise cursor.error(
                    f"relation {rel_token.text} has arity {draft.arity}, got {len(args)} arguments",
                    rel_token,
                    ArityMismatchError,
                )
            return Literal(Table(draft.rid, tuple(args)), negated)
        var = self._lookup(cursor, head)
        if not var.is_bool:
            raise cursor.error(f"{head.text} is not a Boolean variable", head)
        return Literal(BoolVar(head.text), negated)

    def _comparison(self, cursor: _LineCursor, negated: bool):
        cursor.expect("(")
        terms: List[Tuple[int, str]] = []
        sign = -1 if cursor.accept("-") else 1
        while True:
            coeff = 1
            token = cursor.peek()
            if token is not None and token.kind == "int":
                coeff = int(cursor.next("a coefficient").text)
                cursor.expect("*")
            terms.append((sign * coeff, self._integer_variable(cursor)))
            if cursor.accept("+"):
                sign = -1 if cursor.accept("-") else 1
            elif cursor.accept("-"):
                sign = -1
            else:
                break
        cursor.expect(")")
        op_token = cursor.next("a comparison operator")
        if op_token.kind != "op":
            raise cursor.error(f"expected a comparison operator, found {op_token.text!r}", op_token)
        op = _COMPARISONS[op_token.text]
        m = cursor.integer("the right-hand side")
        try:
            linear_sum = normalize_sum(terms)
        except EmptySumError:
            truth = op.holds(0, m) != negated
            logger.debug(f"Constant comparison 0 {op.value} {m} folded to {truth} on line {cursor.line}")
            if truth:
                return True
            var = terms[0][1]
            never = LinearCmp(Term(1, var), CmpOp.GT, self.variables[var].domain.max_value)
            return _FoldedFalse(Literal(never))
        return Literal(LinearCmp(linear_sum, op, m), negated)

    def _arguments(self, cursor: _LineCursor, item) -> List[str]:
        cursor.expect("(")
        args = [item(cursor)]
        while cursor.accept(","):
            args.append(item(cursor))
        cursor.expect(")")
        return args

    def _lookup(self, cursor: _LineCursor, token: _Token) -> Variable:
        var = self.variables.get(token.text)
        if var is None:
            raise cursor.error(f"undeclared variable {token.text}", token, UndeclaredVariableError)
        return var

    def _integer_variable(self, cursor: _LineCursor) -> str:
        token = cursor.name("a variable name")
        if self._lookup(cursor, token).is_bool:
            raise cursor.error(f"{token.text} is not an integer variable", token)
        return token.text


def parse_native(text: str) -> Instance:
    """Parse native source text into an Instance"""
    return NativeParser().parse(text)


class NativeInstanceReader(IInstanceReader):
    format_name = "native"

    def read(self, text: str) -> Instance:
        return parse_native(text)
