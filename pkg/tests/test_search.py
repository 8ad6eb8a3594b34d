import pytest

from src.fum_core import fum_faces
from src.generators import gen_cycle, gen_gadget
from src.search import (
    ResourceLimitExceeded,
    SearchProblem,
    enumerate_all,
    face_connected_order,
    find_first,
    find_first_parallel,
)

BIG = 10**7


def _problem(g, k, strong_pruning=True, faces=None):
    faces = fum_faces(g) if faces is None else faces
    return SearchProblem.build(
        g.n,
        g.rotations,
        [tuple(face.incident_vertices) for face in faces],
        k,
        strong_pruning=strong_pruning,
    )


def test_order_breaks_ties_towards_smaller_index(triangle):
    assert face_connected_order(3, triangle.rotations, [(0, 1, 2)]) == (0, 1, 2)


def test_order_is_face_connected(fig1):
    faces = [tuple(face.incident_vertices) for face in fig1.census]
    order = face_connected_order(fig1.n, fig1.rotations, faces)
    assert sorted(order) == list(range(fig1.n))
    for position, v in enumerate(order[1:], start=1):
        earlier = set(order[:position])
        shares_face = any(v in face and earlier.intersection(face) for face in faces)
        assert shares_face or earlier.intersection(fig1.rotations[v])


def test_order_restarts_in_each_component():
    order = face_connected_order(4, [[1], [0], [3], [2]], [])
    assert order == (0, 1, 2, 3)


def test_find_first_on_two_colored_triangle_is_none(triangle):
    colors, stats = find_first(_problem(triangle, 2), BIG, 60.0)
    assert colors is None
    assert stats.nodes_expanded > 0


def test_find_first_returns_first_coloring_in_search_order(triangle):
    colors, _ = find_first(_problem(triangle, 3), BIG, 60.0)
    assert colors == (1, 2, 3)


def test_restricted_pins_the_prefix(triangle):
    problem = _problem(triangle, 3).restricted((2,))
    assert problem.domains[problem.order[0]] == (2,)
    colors, _ = find_first(problem, BIG, 60.0)
    assert colors[problem.order[0]] == 2


def test_node_budget_raises_with_stats(fig1):
    with pytest.raises(ResourceLimitExceeded) as info:
        find_first(_problem(fig1, 4), 10, 60.0)
    assert info.value.stats.nodes_expanded > 10


def test_strong_pruning_enumerates_the_same_colorings():
    h = gen_gadget(1)
    interior = [face for face in h.graph.census if face.index != h.outer_face_index]
    seen = {}
    for strong in (True, False):
        found = []
        enumerate_all(_problem(h.graph, 4, strong, interior), lambda c: found.append(c) or False, BIG, 60.0)
        seen[strong] = found
    assert seen[True] == seen[False]
    assert seen[True]


def test_strong_pruning_expands_no_more_nodes(fig1):
    strong = find_first(_problem(fig1, 5, True), BIG, 60.0)
    weak = find_first(_problem(fig1, 5, False), BIG, 60.0)
    assert strong[0] == weak[0]
    assert strong[1].nodes_expanded <= weak[1].nodes_expanded


def test_parallel_search_matches_serial_answer():
    g = gen_cycle(7)
    for k in (2, 3):
        serial, _ = find_first(_problem(g, k), BIG, 60.0)
        parallel, _ = find_first_parallel(_problem(g, k), BIG, 60.0, workers=2)
        assert parallel == serial


def test_enumerate_all_stops_when_visit_returns_true(square):
    visited = []

    def visit(colors):
        visited.append(colors)
        return len(visited) == 2

    enumerate_all(_problem(square, 4), visit, BIG, 60.0)
    assert len(visited) == 2


def test_long_cycle_search_runs_without_deep_recursion():
    g = gen_cycle(1500)
    colors, stats = find_first(_problem(g, 3), BIG, 120.0)
    assert colors is not None
    assert colors[-1] == 3
    assert stats.nodes_expanded >= g.n


@pytest.mark.parametrize("workers", [1, 4])
def test_node_budget_bounds_the_whole_parallel_search(fig1, workers):
    _, serial = find_first(_problem(fig1, 4), BIG, 60.0)
    budget = serial.nodes_expanded // 2
    with pytest.raises(ResourceLimitExceeded):
        find_first_parallel(_problem(fig1, 4), budget, 60.0, workers=workers)
    colors, _ = find_first_parallel(_problem(fig1, 4), BIG, 60.0, workers=workers)
    assert colors is None
