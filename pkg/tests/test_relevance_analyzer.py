import random

import pytest

from csp_errors import NotNormalizedError
from csp_model import Domain, Term, build_sum
from native_parser import parse_native
from random_instances import random_inequality
from relevance_analyzer import (
    MulLook,
    addend_pairs,
    analyze_core,
    bound_set,
    dump_tables,
    erg,
    prefix_bounds,
    push_thresholds,
    relevant_values,
    scale_range,
)

DOM = Domain.from_intervals([(1, 3)])
DOMAINS = {"x": DOM, "y": DOM, "z": DOM}
SUM = build_sum([Term(4, "x"), Term(-3, "y"), Term(1, "z")])


class TestWorkedExample:
    def test_scaled_ranges(self):
        assert scale_range(DOM, 4) == [(4, 12)]
        assert scale_range(DOM, -3) == [(-9, -3)]
        assert scale_range(Domain.from_values([1, 5]), -2) == [(-10, -10), (-2, -2)]

    def test_prefix_bounds(self):
        assert prefix_bounds(SUM, DOMAINS) == [(4, 12), (-5, 9), (-4, 12)]

    def test_pushed_thresholds(self):
        assert push_thresholds(SUM, 0, DOMAINS) == [(4, 8), (-3, -1), (0, 0)]

    def test_bound_sets(self):
        assert bound_set([0], 4, DOM, 4, 8) == [4, 8]
        assert bound_set([4, 8], -3, DOM, -3, -1) == [-3, -2, -1]
        assert bound_set([-3, -2, -1], 1, DOM, 0, 0) == [0]

    def test_addend_pairs(self):
        assert addend_pairs([0], [4, 8], 4, DOM) == [(0, 4), (0, 8)]
        assert addend_pairs([4, 8], [-3, -2, -1], -3, DOM) == [(4, -9), (4, -6), (8, -9)]
        assert addend_pairs([-3, -2, -1], [0], 1, DOM) == [(-3, 3), (-2, 2), (-1, 1)]

    @pytest.mark.parametrize("j,product,expected", [(4, -9, -3), (4, -6, -2), (8, -9, -1)])
    def test_erg(self, j, product, expected):
        assert erg(j, product, [-3, -2, -1]) == expected

    def test_erg_of_full_sum(self):
        assert {erg(j, p, [0]) for j, p in [(-3, 3), (-2, 2), (-1, 1)]} == {0}

    def test_core(self):
        core = analyze_core([Term(4, "x"), Term(-3, "y"), Term(1, "z")], 0, DOMAINS)
        assert core.constant is None
        assert core.bound_sets == ((4, 8), (-3, -2, -1), (0,))
        assert core.pairs[1] == ((4, -9, -3), (4, -6, -2), (8, -9, -1))
        assert core.pairs[2] == ((-3, 3, 0), (-2, 2, 0), (-1, 1, 0))


class TestRelevantValues:
    def test_inequality_alone(self, inequality_instance):
        tables = relevant_values(inequality_instance)
        assert tables.relevant == {"x": [2, 1], "y": [3, 2], "z": [3, 2, 1]}
        assert tables.mul_look[(4, "x")] == [MulLook(2, 8, 3), MulLook(1, 4, 2)]
        assert tables.mul_look[(-3, "y")] == [MulLook(3, -9, 3), MulLook(2, -6, 2)]

    def test_order_grid_adds_cut_points(self, inequality_instance):
        tables = relevant_values(inequality_instance)
        assert tables.order == {"x": [3, 2, 1], "y": [3, 2, 1], "z": [3, 2, 1]}

    def test_alldifferent_releases_domains(self, example1):
        tables = relevant_values(example1)
        assert tables.relevant == {"x": [3, 2, 1], "y": [3, 2, 1], "z": [3, 2, 1]}
        index = tables.ad_index[("c1", 1)]
        assert index.values == [1, 2, 3]
        assert index.difall
        assert index.lastindex == {1: 3, 2: 3, 3: 3}
        assert index.index == {"x": 1, "y": 2, "z": 3}
        assert tables.tbl_index[("c3", 2)] == {"x": 1, "y": 2}

    def test_single_variable_bound(self):
        tables = relevant_values(parse_native("int x 1 3\nclause sum(x) <= 2\n"))
        assert tables.relevant["x"] == [2]
        assert tables.linear[("c1", 1)].bound_sets == ((2,),)
        assert tables.order["x"] == [3, 2, 1]

    @pytest.mark.parametrize("m,expected", [(3, True), (7, True), (0, False), (-4, False)])
    def test_trivial_inequalities(self, m, expected):
        tables = relevant_values(parse_native(f"int x 1 3\nclause sum(x) <= {m}\n"))
        assert tables.linear[("c1", 1)].constant is expected
        assert tables.relevant["x"] == [1]

    def test_unconstrained_variable_keeps_its_minimum(self):
        tables = relevant_values(parse_native("int x 2 5\nint w -1 4\nclause sum(x) <= 3\n"))
        assert tables.relevant["w"] == [-1]
        assert tables.order["w"] == [-1]

    def test_conflicts_table_releases_domain(self):
        tables = relevant_values(
            parse_native("int x 1 4\nrel r 1 conflicts\ntuple r 2\nclause table(r, x)\n")
        )
        assert tables.relevant["x"] == [4, 3, 2, 1]

    def test_supports_table_releases_tuple_values(self):
        tables = relevant_values(
            parse_native("int x 1 6\nrel r 1 supports\ntuple r 2\ntuple r 4\ntuple r 9\nclause table(r, x)\n")
        )
        assert tables.relevant["x"] == [4, 2]
        assert tables.order["x"] == [5, 4, 3, 2, 1]

    def test_shared_signature_is_analysed_once(self):
        tables = relevant_values(
            parse_native(
                "int x 1 3\nint y 1 3\nint u 1 3\nint v 1 3\n"
                "clause sum(x + y) <= 3\nclause sum(u + v) <= 3\nclause sum(x + y) <= 4\n"
            )
        )
        assert len(tables.linear) == 3
        assert tables.cores_computed == 2

    def test_unnormalized_input_rejected(self):
        with pytest.raises(NotNormalizedError):
            relevant_values(parse_native("int x 1 3\nclause sum(x) >= 2\n"))


class TestRandomInequalities:
    def _cores(self, seed, count=300):
        rng = random.Random(seed)
        for _ in range(count):
            core = relevant_values(random_inequality(rng)).linear[("c1", 1)].core
            if core.constant is None:
                yield core

    def test_bound_sets_stay_between_thresholds(self):
        checked = 0
        for core in self._cores(21):
            assert len(core.bound_sets) == len(core.thresholds)
            for bounds_here, (blow, bupp) in zip(core.bound_sets, core.thresholds):
                assert list(bounds_here) == sorted(set(bounds_here))
                assert all(blow <= e <= bupp for e in bounds_here)
            checked += 1
        assert checked >= 50

    def test_every_addend_pair_has_a_dominating_bound(self):
        for core in self._cores(22):
            previous = (0,)
            for bounds_here, pairs_here in zip(core.bound_sets, core.pairs):
                assert pairs_here
                for j, e2, result in pairs_here:
                    assert j in previous
                    assert result in bounds_here
                    assert j + e2 <= result
                previous = bounds_here


class TestDumpTables:
    def test_example1_facts(self, example1):
        text = dump_tables(relevant_values(example1))
        lines = set(text.splitlines())
        expected = {
            "look(x,2).",
            "order(x,3,2).",
            "order(x,2,1).",
            "look(op(mul,4,x),2,8).",
            "look(op(mul,-3,y),3,-9).",
            "bound(op(mul,4,x),8).",
            "bound(op(add,op(mul,4,x),op(mul,-3,y)),-3).",
            "total(op(add,op(add,op(mul,4,x),op(mul,-3,y)),op(mul,1,z)),12).",
            "look(op(mul,4,x),0,0,4,4).",
            "look(op(add,op(mul,4,x),op(mul,-3,y)),op(mul,4,x),4,-9,-3).",
            "index(con(c1,1),y,2).",
            "lastindex(con(c1,1),2,3).",
            "difall(con(c1,1)).",
        }
        assert expected <= lines
        assert text == dump_tables(relevant_values(example1))
