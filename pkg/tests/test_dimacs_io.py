import pytest

from cnf_document import AtomKey, CnfDocument
from csp_errors import DimacsParseError
from dimacs_io import parse_dimacs, write_dimacs


class TestWriteDimacs:
    def test_plain_document(self):
        assert write_dimacs(CnfDocument(num_vars=2, clauses=[(1, -2)])) == "p cnf 2 1\n1 -2 0\n"

    def test_annotations_precede_header(self):
        document = CnfDocument(
            num_vars=2,
            clauses=[(1,), (-1, 2)],
            atoms={2: AtomKey("eq", ("x", 1)), 1: AtomKey("less", ("x", 2))},
            orders={"x": [2, 1]},
        )
        assert write_dimacs(document) == (
            "c map 1 less(x,2)\nc map 2 eq(x,1)\nc order x 2 1\np cnf 2 2\n1 0\n-1 2 0\n"
        )


class TestParseDimacs:
    def test_plain_document(self):
        document = parse_dimacs("c hello\np cnf 3 2\n1 -3 0\n2\n3 0\n")
        assert document.num_vars == 3
        assert document.clauses == [(1, -3), (2, 3)]

    def test_example1_round_trip(self, example1_compiled):
        document = example1_compiled[2]
        parsed = parse_dimacs(write_dimacs(document))
        assert parsed.num_vars == document.num_vars
        assert parsed.clauses == [tuple(c) for c in document.clauses]
        assert parsed.atoms == document.atoms
        assert parsed.orders == document.orders

    def test_quoted_names_round_trip(self):
        document = CnfDocument(
            num_vars=1,
            clauses=[(1,)],
            atoms={1: AtomKey("eq", ("odd name", -4))},
            orders={"odd name": [-4]},
        )
        parsed = parse_dimacs(write_dimacs(document))
        assert parsed.atoms == document.atoms
        assert parsed.orders == document.orders

    def test_empty_cnf(self):
        document = parse_dimacs("p cnf 0 0\n")
        assert document.num_vars == 0
        assert document.clauses == []

    @pytest.mark.parametrize(
        "text",
        [
            "p cnf 2 1\n1 3 0\n",
            "p cnf 2 1\n1 x 0\n",
            "1 2 0\np cnf 2 1\n",
            "p cnf 2\n1 0\n",
            "p dnf 2 1\n1 0\n",
            "p cnf 2 1\np cnf 2 1\n1 0\n",
            "p cnf 2 2\n1 0\n",
            "p cnf 2 1\n1 2\n",
            "p cnf 2 1\n0\n",
            "",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(DimacsParseError):
            parse_dimacs(text)

    def test_error_line(self):
        with pytest.raises(DimacsParseError) as info:
            parse_dimacs("p cnf 2 1\n\n1 3 0\n")
        assert info.value.line == 3
