import random

import pytest

from bruteforce_oracle import enumerate_bruteforce
from cdcl_solver import SolveStatus, load_solver, propagate_only, solve
from cnf_document import BOT, TOP, AtomKey, VarMap, eq_key, less_key
from csp_errors import UnsupportedError
from csp_model import AllDifferent, ConstraintClause, Domain, Instance, Literal, Variable
from dimacs_io import write_dimacs
from native_parser import parse_native
from order_encoder import ClauseSink, EncodeOptions, OrderEncoder
from random_instances import as_set, compile_instance, pigeon_hole, random_inequality
from relevance_analyzer import relevant_values
from solution_service import enumerate_solutions


class TestClauseSink:
    def test_folding(self):
        sink = ClauseSink()
        sink.add([1, BOT, 2, 1])
        sink.add([1, TOP])
        sink.add([3, -3])
        sink.add([1, 2])
        assert sink.clauses == [(1, 2)]
        assert not sink.unsat
        sink.add([BOT])
        assert sink.unsat

    def test_constants_negate(self):
        assert -TOP is BOT
        assert -BOT is TOP


class TestOrderAxioms:
    def test_three_value_grid(self):
        instance = parse_native("int x 1 3\nint y 1 3\nclause sum(x - y) <= 0\nclause alldifferent(x, y)\n")
        tables = relevant_values(instance)
        encoder = OrderEncoder(instance, tables)
        clauses = encoder.encode_order_axioms()
        varmap = encoder.varmap
        assert [str(varmap.key_of(i)) for i in range(1, 6)] == [
            "less(x,3)",
            "less(x,2)",
            "eq(x,3)",
            "eq(x,2)",
            "eq(x,1)",
        ]
        less3, less2 = varmap.less("x", 3), varmap.less("x", 2)
        assert varmap.less("x", 1) is BOT
        x_clauses = [c for c in clauses if all(abs(lit) <= 5 for lit in c)]
        assert (-less2, less3) in x_clauses
        # one chain clause plus seven Eq definition clauses
        assert len(x_clauses) == 8

    def test_single_value_grid(self):
        instance = parse_native("int x 4 4\n")
        encoder = OrderEncoder(instance, relevant_values(instance))
        clauses = encoder.encode_order_axioms()
        assert encoder.varmap.num_vars == 1
        assert clauses == [(encoder.varmap.eq("x", 4),)]

    def test_atom_numbering(self, example1_compiled):
        _, _, document, varmap = example1_compiled
        assert varmap.key_of(1) == AtomKey("bool", ("b",))
        assert varmap.get(less_key("x", 3)) == 2
        assert varmap.get(eq_key("x", 1)) == 6
        assert varmap.get(less_key("y", 3)) == 7
        assert varmap.get(eq_key("z", 1)) == 16
        assert document.orders == {"x": [3, 2, 1], "y": [3, 2, 1], "z": [3, 2, 1]}


class TestConstraintEncodings:
    def test_linear_prefix_atoms(self, inequality_instance):
        _, _, document, varmap = compile_instance(inequality_instance)
        keys = {str(key) for _, key in varmap.items()}
        assert {"leq(4*x+-3*y,-3)", "leq(4*x+-3*y,-2)", "leq(4*x+-3*y,-1)"} <= keys
        assert "leq(4*x+-3*y+1*z,0)" in keys
        assert document.num_clauses > 0

    def test_trivial_inequality_needs_no_clauses(self):
        instance = parse_native("int x 1 3\nclause sum(x) <= 5\n")
        _, _, document, varmap = compile_instance(instance)
        assert not any(key.kind == "leq" for _, key in varmap.items())

    def test_false_clause_marks_document_unsat(self):
        instance = parse_native("int x 1 3\nclause sum(x) <= 0\n")
        _, _, document, varmap = compile_instance(instance)
        marker = varmap.get(AtomKey("aux", ("unsat", 1)))
        assert marker is not None
        assert document.clauses[-2:] == [(marker,), (-marker,)]
        assert solve(document).status is SolveStatus.UNSAT

    def test_negated_alldifferent_unsupported(self):
        instance = parse_native("int x 1 3\nint y 1 3\nclause -alldifferent(x, y)\n")
        with pytest.raises(UnsupportedError):
            compile_instance(instance)

    def test_alldifferent_in_disjunction_is_guarded(self):
        instance = parse_native("bool b\nint x 1 2\nint y 1 2\nclause b ; alldifferent(x, y)\n")
        normalized, _, document, varmap = compile_instance(instance)
        assert varmap.get(AtomKey("hold", ("c1", 2))) is not None
        assert as_set(enumerate_solutions(document, varmap, normalized)) == as_set(enumerate_bruteforce(instance))

    def test_supports_table_without_valid_tuples(self):
        instance = parse_native("int x 1 2\nrel r 1 supports\ntuple r 5\nclause table(r, x)\n")
        _, _, document, _ = compile_instance(instance)
        assert solve(document).status is SolveStatus.UNSAT

    def test_encoding_is_deterministic(self, example1):
        first = write_dimacs(compile_instance(example1)[2])
        second = write_dimacs(compile_instance(example1)[2])
        assert first == second

    def test_varmap_round_trip_through_document(self, example1_compiled):
        _, _, document, varmap = example1_compiled
        rebuilt = VarMap.from_document(document)
        assert list(rebuilt.items()) == list(varmap.items())
        assert rebuilt.less("x", 2) == varmap.less("x", 2)


class TestLeqChains:
    def test_leq_atoms_are_monotone_in_every_model(self):
        rng = random.Random(31)
        chains_checked = 0
        for _ in range(60):
            _, _, document, varmap = compile_instance(random_inequality(rng))
            chains = {}
            for var_id, key in varmap.items():
                if key.kind == "leq":
                    name, bound = key.args
                    chains.setdefault(name, []).append((bound, var_id))
            if not chains:
                continue
            chains_checked += 1
            solver = load_solver(document)
            for _ in range(200):
                result = solver.solve()
                if not result.is_sat:
                    break
                model = result.model
                for chain in chains.values():
                    truths = [model[var_id] for _, var_id in sorted(chain)]
                    # once some Leq(S, e) holds, it holds for every larger e
                    assert truths == sorted(truths)
                solver.add_clause([-v if model[v] else v for v in range(1, document.num_vars + 1)])
        assert chains_checked >= 10


class TestPigeonHole:
    @pytest.mark.parametrize("n", [4, 5, 6])
    @pytest.mark.parametrize("style", ["counter", "pairwise"])
    def test_refuted_by_propagation(self, n, style):
        _, _, document, _ = compile_instance(pigeon_hole(n), EncodeOptions(ph_alldifferent=True, ph_style=style))
        assert propagate_only(document).conflict
        result = solve(document)
        assert result.status is SolveStatus.UNSAT
        assert result.stats.decisions == 0

    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_refuted_by_search_without_ph(self, n):
        _, _, document, _ = compile_instance(pigeon_hole(n), EncodeOptions(ph_alldifferent=False))
        assert solve(document).status is SolveStatus.UNSAT

    def test_windows_keep_solutions(self):
        rng = random.Random(5)
        for _ in range(40):
            size = rng.randint(2, 4)
            variables = tuple(
                Variable(f"p{i}", Domain.from_values(rng.sample(range(0, 6), rng.randint(1, 4))))
                for i in range(1, size + 1)
            )
            clause = ConstraintClause("c1", (Literal(AllDifferent(tuple(v.name for v in variables))),))
            instance = Instance(variables, (clause,))
            expected = as_set(enumerate_bruteforce(instance))
            for style in ("counter", "pairwise"):
                normalized, _, document, varmap = compile_instance(instance, EncodeOptions(ph_style=style))
                assert as_set(enumerate_solutions(document, varmap, normalized)) == expected

    def test_unknown_style_rejected(self):
        with pytest.raises(ValueError):
            EncodeOptions(ph_style="clever")
        with pytest.raises(ValueError):
            EncodeOptions(consistency_style="support")
        assert EncodeOptions().consistency_style == "chain"
