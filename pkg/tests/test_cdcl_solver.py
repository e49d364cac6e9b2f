import random
from itertools import product

import pytest

from bruteforce_oracle import eval_literal
from cdcl_solver import CDCLSolver, SolverConfig, SolveStatus, luby, propagate_only, solve
from cnf_document import BOT, CnfDocument
from csp_model import domain_values
from native_parser import parse_native
from order_encoder import EncodeOptions
from random_instances import compile_instance, pigeon_hole, random_inequality


def satisfiable_by_enumeration(num_vars, clauses):
    for bits in product([False, True], repeat=num_vars):
        if all(any(bits[abs(lit) - 1] == (lit > 0) for lit in clause) for clause in clauses):
            return True
    return False


def random_cnf(rng, num_vars, num_clauses):
    clauses = []
    for _ in range(num_clauses):
        chosen = rng.sample(range(1, num_vars + 1), rng.randint(1, 3))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in chosen))
    return CnfDocument(num_vars=num_vars, clauses=clauses)


def class_units(varmap, name, value):
    """Unit literals confining name to the order class of value"""
    grid = varmap.orders[name]
    low = max(g for g in grid if g <= value)
    higher = [g for g in grid if g > value]
    units = []
    less = varmap.less(name, low)
    if less is not BOT:
        units.append(-less)
    if higher:
        units.append(varmap.less(name, min(higher)))
    return units


class TestLuby:
    def test_sequence(self):
        assert [luby(2, i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


class TestSolve:
    def test_empty_cnf(self):
        result = solve(CnfDocument())
        assert result.status is SolveStatus.SAT
        assert result.model == {}

    def test_simple_formulas(self):
        sat = solve(CnfDocument(num_vars=2, clauses=[(1, 2), (-1,), (-2, 1, 2)]))
        assert sat.is_sat
        assert sat.model == {1: False, 2: True}
        unsat = solve(CnfDocument(num_vars=2, clauses=[(1, 2), (-1, 2), (1, -2), (-1, -2)]))
        assert unsat.status is SolveStatus.UNSAT
        assert unsat.model is None

    @pytest.mark.parametrize("heuristic", ["activity", "fixed"])
    def test_random_cnfs_agree_with_enumeration(self, heuristic):
        rng = random.Random(3)
        for seed in range(150):
            num_vars = rng.randint(3, 9)
            document = random_cnf(rng, num_vars, rng.randint(1, 5 * num_vars))
            config = SolverConfig(heuristic=heuristic, seed=seed, restart_base=rng.choice([1, 5, 100]))
            result = solve(document, config)
            assert result.is_sat == satisfiable_by_enumeration(num_vars, document.clauses)
            if result.is_sat:
                assert all(any(result.model[abs(l)] == (l > 0) for l in c) for c in document.clauses)

    def test_phase_saving_off(self):
        rng = random.Random(9)
        document = random_cnf(rng, 8, 20)
        assert solve(document, SolverConfig(phase_saving=False)).is_sat == satisfiable_by_enumeration(
            8, document.clauses
        )

    def test_example1_is_sat(self, example1_compiled):
        assert solve(example1_compiled[2]).status is SolveStatus.SAT

    def test_pigeon_hole_unsat(self):
        _, _, document, _ = compile_instance(pigeon_hole(4))
        assert solve(document).status is SolveStatus.UNSAT

    def test_conflict_limit_reports_unknown(self):
        _, _, document, _ = compile_instance(pigeon_hole(6), EncodeOptions(ph_alldifferent=False))
        result = solve(document, SolverConfig(conflict_limit=1))
        assert result.status is SolveStatus.UNKNOWN
        assert result.stats.conflicts >= 1

    def test_unknown_heuristic_rejected(self):
        with pytest.raises(ValueError):
            SolverConfig(heuristic="berkmin")


class TestIncremental:
    def test_clauses_added_between_solves(self):
        solver = CDCLSolver(3)
        for clause in [(1, 2, 3)]:
            solver.add_clause(clause)
        seen = set()
        while True:
            result = solver.solve()
            if not result.is_sat:
                break
            model = tuple(result.model[v] for v in (1, 2, 3))
            assert model not in seen
            seen.add(model)
            solver.add_clause([-v if result.model[v] else v for v in (1, 2, 3)])
        assert len(seen) == 7

    def test_zero_literal_rejected(self):
        with pytest.raises(ValueError):
            CDCLSolver().add_clause([1, 0])

    def test_tautology_ignored(self):
        solver = CDCLSolver()
        assert solver.add_clause([1, -1])
        assert solver.solve().is_sat


class TestPropagateOnly:
    def test_no_units_fix_nothing(self):
        result = propagate_only(CnfDocument(num_vars=3, clauses=[(1, 2), (-2, 3)]))
        assert not result.conflict
        assert result.fixed == []

    def test_unit_chain(self):
        result = propagate_only(CnfDocument(num_vars=3, clauses=[(1, 2), (-2, 3)]), units=[-1])
        assert not result.conflict
        assert result.fixed == [-1, 2, 3]

    def test_sum_with_fixed_variable(self):
        instance = parse_native("int x 1 3\nint y 1 3\nclause sum(x + y) <= 3\n")
        _, _, document, varmap = compile_instance(instance)
        assert propagate_only(document, class_units(varmap, "x", 3)).conflict
        result = propagate_only(document, class_units(varmap, "x", 2))
        assert not result.conflict
        assert varmap.less("y", 2) in result.fixed

    def test_bounds_consistency_on_random_inequalities(self):
        rng = random.Random(17)
        checked = 0
        for _ in range(150):
            instance = random_inequality(rng)
            normalized, _, document, varmap = compile_instance(instance)
            literal = normalized.clauses[0].literals[0]
            names = [v.name for v in normalized.variables]
            free = rng.choice(names)
            fixed_values = {
                name: rng.choice(domain_values(normalized.variable(name).domain)) for name in names if name != free
            }
            units = [lit for name, value in fixed_values.items() for lit in class_units(varmap, name, value)]
            result = propagate_only(document, units)

            candidates = domain_values(normalized.variable(free).domain)
            feasible = {d for d in candidates if eval_literal(literal, {**fixed_values, free: d}, normalized)}
            if result.conflict:
                assert not feasible
                checked += 1
                continue
            fixed = set(result.fixed)
            grid = varmap.orders[free]
            excluded = set()
            for g in grid[:-1]:
                less = varmap.less(free, g)
                if less in fixed:
                    excluded.update(d for d in candidates if d >= g)
                if -less in fixed:
                    excluded.update(d for d in candidates if d < g)
            assert excluded == set(candidates) - feasible, (str(literal), fixed_values, free)
            checked += 1
        assert checked >= 100
