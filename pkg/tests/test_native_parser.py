import pytest

from csp_errors import (
    ArityMismatchError,
    DanglingRelationError,
    DuplicateNameError,
    EmptyDomainError,
    ParseError,
    UndeclaredVariableError,
)
from csp_model import AllDifferent, BoolVar, CmpOp, LinearCmp, RelationKind, Table, Term, render_sum
from native_parser import NativeInstanceReader, parse_native


class TestNativeParser:
    def test_example1(self, example1):
        assert [v.name for v in example1.variables] == ["b", "x", "y", "z"]
        assert example1.variable("x").domain.intervals == ((1, 3),)
        assert [c.cid for c in example1.clauses] == ["c1", "c2", "c3"]

        c1, c2, c3 = example1.clauses
        assert c1.literals[0].expr == AllDifferent(("x", "y", "z"))
        assert c2.literals[0].expr == BoolVar("b")
        comparison = c2.literals[1].expr
        assert isinstance(comparison, LinearCmp)
        assert render_sum(comparison.sum) == "(((4*x)+(-3*y))+(1*z))"
        assert comparison.op is CmpOp.LE and comparison.m == 0
        assert c3.literals[0].negated
        assert c3.literals[1].expr == Table("r", ("x", "y"))

        relation = example1.relation("r")
        assert relation.kind is RelationKind.SUPPORTS
        assert relation.tuples == ((1, 3), (2, 2), (3, 1))

    def test_reader_interface(self, example1_text):
        reader = NativeInstanceReader()
        assert reader.format_name == "native"
        assert len(reader.read(example1_text).clauses) == 3

    def test_relation_ids_follow_declaration_order(self):
        instance = parse_native(
            "int x 1 2\nrel first 1 supports\nrel second 1 conflicts\ntuple second 2\n"
            "clause table(second, x) ; table(first, x)\n"
        )
        assert [r.rid for r in instance.relations] == ["r", "r2"]
        assert instance.clauses[0].literals[0].expr.rel == "r2"

    def test_multi_interval_domain_and_negative_values(self):
        instance = parse_native("int x -3 -1 4 6\n")
        assert instance.variable("x").domain.intervals == ((-3, -1), (4, 6))

    def test_comments_and_blank_lines(self):
        instance = parse_native("% header\n\nbool b % trailing\nclause b\n")
        assert len(instance.clauses) == 1

    def test_constant_comparisons_fold(self):
        instance = parse_native("int x 1 2\nbool b\nclause b ; sum(x - x) <= 3\nclause b ; sum(x - x) >= 1\n")
        # the first clause always holds and is dropped, the second keeps only b
        assert len(instance.clauses) == 1
        assert instance.clauses[0].literals[0].expr == BoolVar("b")

    def test_all_false_clause_keeps_a_stand_in(self):
        instance = parse_native("int x 1 2\nclause sum(x - x) >= 1 ; sum(2*x - 2*x) != 0\n")
        (clause,) = instance.clauses
        assert len(clause.literals) == 1
        assert clause.literals[0].expr == LinearCmp(Term(1, "x"), CmpOp.GT, 2)

    @pytest.mark.parametrize(
        "text,error",
        [
            ("int x 1 3\nint x 1 3\n", DuplicateNameError),
            ("int x 3 1\n", EmptyDomainError),
            ("clause b\n", UndeclaredVariableError),
            ("int x 1 3\nclause table(r, x)\n", DanglingRelationError),
            ("int x 1 3\nrel r 2 supports\ntuple r 1\n", ArityMismatchError),
            ("int x 1 3\nrel r 2 supports\nclause table(r, x)\n", ArityMismatchError),
            ("bool aux__eq1\n", ParseError),
            ("frobnicate x\n", ParseError),
            ("int x 1 3\nclause sum(x) <= \n", ParseError),
        ],
    )
    def test_errors(self, text, error):
        with pytest.raises(error):
            parse_native(text)

    def test_error_location(self):
        with pytest.raises(ParseError) as info:
            parse_native("bool b\nclause b ; q\n")
        assert info.value.line == 2
        assert info.value.column == 12
        assert str(info.value).startswith("line 2, column 12")
