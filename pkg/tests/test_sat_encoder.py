import pytest

from src.fum_core import Coloring, check_fum, fum_faces, solve_fum
from src.generators import gen_path
from src.sat_encoder import (
    AmbiguousVertexColor,
    CnfFormula,
    DimacsParseError,
    IncompleteModel,
    ModelParseError,
    NotAModel,
    VarMap,
    assignment_from_coloring,
    branch_order_for,
    decode_model,
    dpll_solve,
    encode_fum,
    exhaustive_solve,
    expected_clause_count,
    format_model,
    read_dimacs,
    read_model,
    write_dimacs,
)
from src.search import ResourceLimitExceeded

from .strategies import SMALL_SUITE


def test_triangle_encoding_size(triangle):
    formula = encode_fum(triangle, 3)
    assert formula.num_vars == 15
    assert formula.num_clauses == expected_clause_count(3, 3, [3, 3], 3) == 71
    assert "p cnf 15 71\n" in write_dimacs(formula)


def test_fig1_variable_count(fig1):
    assert encode_fum(fig1, 4).num_vars == 16 * 4 + 19 * 4


@pytest.mark.parametrize("name", sorted(SMALL_SUITE))
def test_clause_count_matches_closed_form(name):
    g = SMALL_SUITE[name]()
    sizes = [len(face.incident_vertices) for face in fum_faces(g)]
    for k in (2, 3, 5):
        formula = encode_fum(g, k)
        assert formula.num_vars == (g.n + len(sizes)) * k
        assert formula.num_clauses == expected_clause_count(g.n, g.num_edges, sizes, k)
        assert all(formula.clauses)


def test_var_map_is_dense_and_reversible():
    var_map = VarMap(n=3, num_faces=2, k=4)
    seen = set()
    for v in range(3):
        for c in range(1, 5):
            assert var_map.decode(var_map.x(v, c)) == ("x", v, c)
            seen.add(var_map.x(v, c))
    for f in range(2):
        for c in range(1, 5):
            assert var_map.decode(var_map.m(f, c)) == ("m", f, c)
            seen.add(var_map.m(f, c))
    assert seen == set(range(1, var_map.total_vars + 1))
    with pytest.raises(KeyError):
        var_map.decode(0)


def test_single_clause_dimacs():
    formula = CnfFormula(clauses=((1,),), var_map=VarMap(n=1, num_faces=0, k=1))
    assert write_dimacs(formula) == "p cnf 1 1\n1 0\n"


def test_dimacs_records_the_var_map(triangle):
    text = write_dimacs(encode_fum(triangle, 3))
    assert "c x 1 v0 1\n" in text
    assert "c m 10 f0 1\n" in text


def test_dimacs_round_trip(fig1):
    formula = encode_fum(fig1, 4)
    num_vars, clauses = read_dimacs(write_dimacs(formula))
    assert num_vars == formula.num_vars
    assert tuple(clauses) == formula.clauses


@pytest.mark.parametrize(
    "text",
    ["1 0\n", "p cnf 1 2\n1 0\n", "p dnf 1 1\n1 0\n", "p cnf 1 1\n1\n"],
)
def test_read_dimacs_rejects_malformed_input(text):
    with pytest.raises(DimacsParseError):
        read_dimacs(text)


def test_read_model_accepts_solver_output_and_raw_literals():
    assert read_model("s SATISFIABLE\nv 1 -2\nv 3 0\n") == {1: True, 2: False, 3: True}
    assert read_model("-1 2 0") == {1: False, 2: True}


@pytest.mark.parametrize("text", ["s UNSATISFIABLE\n", "v 1 x 0\n", "v 1 -1 0\n", "v 1 5 0\n"])
def test_read_model_rejects_bad_models(text):
    with pytest.raises(ModelParseError):
        read_model(text, num_vars=3)


def test_read_model_requires_every_variable():
    with pytest.raises(IncompleteModel):
        read_model("v 1 -2 0\n", num_vars=3)


def test_decode_triangle_model(triangle):
    formula = encode_fum(triangle, 3)
    model = assignment_from_coloring(formula, Coloring((1, 2, 3), 3))
    x = formula.var_map.x
    assert model[x(0, 1)] and model[x(1, 2)] and model[x(2, 3)]
    assert decode_model(formula, model) == Coloring((1, 2, 3), 3)


def test_decode_rejects_two_colors_on_one_vertex(triangle):
    formula = encode_fum(triangle, 3)
    model = assignment_from_coloring(formula, Coloring((1, 2, 3), 3))
    model[formula.var_map.x(0, 2)] = True
    with pytest.raises(AmbiguousVertexColor):
        decode_model(formula, model)


def test_decode_rejects_wrong_face_maximum(triangle):
    formula = encode_fum(triangle, 3)
    model = assignment_from_coloring(formula, Coloring((1, 2, 3), 3))
    m = formula.var_map.m
    model[m(0, 3)], model[m(0, 2)] = False, True
    with pytest.raises(NotAModel):
        decode_model(formula, model)


def test_decode_rejects_improper_coloring(triangle):
    formula = encode_fum(triangle, 3)
    model = assignment_from_coloring(formula, Coloring((3, 3, 1), 3))
    with pytest.raises(NotAModel):
        decode_model(formula, model)


def test_decode_rejects_partial_assignment(triangle):
    formula = encode_fum(triangle, 3)
    with pytest.raises(IncompleteModel):
        decode_model(formula, {1: True})


def test_external_model_for_fig1_at_five_colors(fig1):
    certificate = solve_fum(fig1, 5).certificate
    formula = encode_fum(fig1, 5)
    text = format_model(assignment_from_coloring(formula, certificate))
    decoded = decode_model(formula, read_model(text, formula.num_vars))
    assert decoded == certificate
    for face in fum_faces(fig1):
        top = max(decoded[v] for v in face.incident_vertices)
        assert sum(1 for v in face.incident_vertices if decoded[v] == top) == 1


@pytest.mark.parametrize("name", sorted(SMALL_SUITE))
def test_dpll_agrees_with_the_search(name):
    g = SMALL_SUITE[name]()
    for k in range(2, 6):
        formula = encode_fum(g, k)
        model = dpll_solve(formula)
        assert (model is not None) == solve_fum(g, k).satisfiable
        if model is not None:
            assert check_fum(g, decode_model(formula, model)).ok


@pytest.mark.parametrize("make, k", [(lambda: gen_path(2), 2), (lambda: SMALL_SUITE["C3"](), 2), (lambda: SMALL_SUITE["C3"](), 3)])
def test_truth_table_agrees_with_the_search(make, k):
    g = make()
    formula = encode_fum(g, k)
    assert formula.num_vars <= 30
    assert (exhaustive_solve(formula) is not None) == solve_fum(g, k).satisfiable


def test_truth_table_guard(fig1):
    with pytest.raises(ValueError):
        exhaustive_solve(encode_fum(fig1, 4))


def test_dpll_decision_budget(fig1):
    with pytest.raises(ResourceLimitExceeded):
        dpll_solve(encode_fum(fig1, 4), decision_budget=5)


def test_branch_order_must_cover_every_variable(triangle):
    formula = encode_fum(triangle, 3)
    with pytest.raises(ValueError):
        dpll_solve(formula, branch_order=[1, 2, 3])
    order = branch_order_for(formula, (2, 1, 0))
    assert order[:3] == [formula.var_map.x(2, c) for c in (1, 2, 3)]
    assert dpll_solve(formula, branch_order=order) is not None


@pytest.mark.slow
def test_fig1_encoding_is_unsatisfiable_at_four_colors(fig1):
    assert dpll_solve(encode_fum(fig1, 4)) is None


def test_dpll_handles_thousands_of_nested_decisions():
    # no two consecutive variables both true; every variable needs its own decision
    n = 3000
    clauses = tuple((-i, -(i + 1)) for i in range(1, n))
    model = dpll_solve(CnfFormula(clauses=clauses, var_map=VarMap(n=n, num_faces=0, k=1)))
    assert model is not None
    assert [model[i] for i in range(1, 7)] == [True, False, True, False, True, False]
    assert all(not (model[i] and model[i + 1]) for i in range(1, n))
