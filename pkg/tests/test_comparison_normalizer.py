import random

import pytest

from bruteforce_oracle import enumerate_bruteforce
from comparison_normalizer import normalize_comparisons
from csp_model import BoolVar, CmpOp, ConstraintClause, Domain, Instance, LinearCmp, Literal, Variable, normalize_sum
from native_parser import parse_native
from random_instances import ALL_OPS, as_set, random_comparison, random_domain


def _ops(instance):
    return [lit.expr.op for clause in instance.clauses for lit in clause.literals if isinstance(lit.expr, LinearCmp)]


class TestNormalizeComparisons:
    @pytest.mark.parametrize(
        "source,expected",
        [
            ("sum(x + 2*y) >= 3", ["-1*x+-2*y <= -3"]),
            ("sum(x + 2*y) < 3", ["1*x+2*y <= 2"]),
            ("sum(x + 2*y) > 3", ["-1*x+-2*y <= -4"]),
            ("sum(x + 2*y) != 3", ["1*x+2*y <= 2", "-1*x+-2*y <= -4"]),
            ("-sum(x + 2*y) <= 3", ["-1*x+-2*y <= -4"]),
        ],
    )
    def test_rewrites(self, source, expected):
        instance = parse_native(f"int x 0 4\nint y 0 4\nclause {source}\n")
        normalized = normalize_comparisons(instance)
        assert len(normalized.clauses) == 1
        literals = normalized.clauses[0].literals
        assert not any(literal.negated for literal in literals)
        assert [str(literal).replace("(", "").replace(")", "") for literal in literals] == expected

    def test_sole_equality_splits_clause(self):
        normalized = normalize_comparisons(parse_native("int x 0 4\nint y 0 4\nclause sum(x + y) = 3\n"))
        assert [c.cid for c in normalized.clauses] == ["c1", "c2"]
        assert all(len(c.literals) == 1 for c in normalized.clauses)
        assert normalized.is_normalized()

    def test_equality_in_disjunction_uses_switch(self):
        normalized = normalize_comparisons(parse_native("bool b\nint x 0 4\nclause b ; sum(x) = 3\n"))
        assert normalized.has_variable("aux__eq1")
        assert normalized.variable("aux__eq1").auxiliary
        assert len(normalized.clauses) == 3
        assert normalized.clauses[0].literals[1].expr == BoolVar("aux__eq1")
        assert normalized.is_normalized()

    def test_normalized_instance_unchanged(self, example1):
        normalized = normalize_comparisons(example1)
        assert normalized.clauses == example1.clauses
        assert normalized.variables == example1.variables

    def test_random_literals_keep_their_solutions(self):
        rng = random.Random(7)
        for _ in range(250):
            names = [f"x{i}" for i in range(1, rng.randint(1, 3) + 1)]
            domains = {name: random_domain(rng, 4) for name in names}
            variables = [Variable(name, domains[name]) for name in names]
            literal = Literal(random_comparison(rng, names, domains, ALL_OPS), rng.random() < 0.4)
            literals = [literal]
            if rng.random() < 0.5:
                variables.append(Variable("b", Domain.boolean()))
                literals.append(Literal(BoolVar("b"), rng.random() < 0.5))
            instance = Instance(tuple(variables), (ConstraintClause("c1", tuple(literals)),))
            normalized = normalize_comparisons(instance)

            assert set(_ops(normalized)) <= {CmpOp.LE}
            assert as_set(enumerate_bruteforce(normalized)) == as_set(enumerate_bruteforce(instance)), str(literal)

    def test_negated_equality_becomes_disequality(self):
        x = Variable("x", Domain.from_intervals([(0, 3)]))
        expr = LinearCmp(normalize_sum([(1, "x")]), CmpOp.EQ, 2)
        instance = Instance((x,), (ConstraintClause("c1", (Literal(expr, True),)),))
        normalized = normalize_comparisons(instance)
        assert len(normalized.clauses[0].literals) == 2
        assert as_set(enumerate_bruteforce(normalized)) == {(("x", 0),), (("x", 1),), (("x", 3),)}
