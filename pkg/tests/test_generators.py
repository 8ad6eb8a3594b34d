import pytest

from src.fum_core import CompoundFace, fum_faces
from src.generators import (
    AnchorNotOnFace,
    AnchorNotOnOuterCycle,
    AttachmentSpec,
    ConstructionError,
    EdgeNotFound,
    FaceNotFound,
    attach_gadget,
    gen_cycle,
    gen_gadget,
    gen_k4_composite,
    gen_path,
    gen_wheel,
    remove_edge,
)
from src.plane_graph import Dart, component_euler_characteristics, euler_characteristic, max_degree


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_gadget_census(k):
    h = gen_gadget(k)
    g = h.graph
    assert g.n == 6 * k + 2
    assert g.num_edges == 12 * k + 4
    assert len(g.census) == 6 * k + 4
    assert g.census.counts_by_length == {3: 6 * k + 2, 3 * k + 1: 2}
    assert euler_characteristic(g) == 2
    assert max_degree(g) == 4


def test_gadget_cycles_bound_the_two_long_faces(gadget1):
    census = gadget1.graph.census
    outer = census[gadget1.outer_face_index]
    assert outer.is_outer
    assert outer.incident_vertices == set(gadget1.outer_cycle)
    long_faces = [face.incident_vertices for face in census if face.length == 4]
    assert set(gadget1.inner_cycle) in long_faces


def test_gadget_labels(gadget1):
    g = gadget1.graph
    assert [g.label_of(v) for v in gadget1.outer_cycle] == ["a1", "a2", "a3", "a4"]
    assert [g.label_of(v) for v in gadget1.inner_cycle] == ["b1", "b2", "b3", "b4"]
    assert g.has_edge(g.vertex_by_label("b4"), g.vertex_by_label("a1"))


def test_gadget_rejects_nonpositive_k():
    with pytest.raises(ConstructionError):
        gen_gadget(0)


def test_fig1_census(fig1):
    assert (fig1.n, fig1.num_edges, len(fig1.census), max_degree(fig1)) == (16, 33, 19, 5)
    assert fig1.is_connected
    assert fig1.has_edge(fig1.vertex_by_label("a4"), fig1.vertex_by_label("a2'"))
    assert len(fig1.census.outer_faces) == 1
    assert len(fig1.census.outer_faces[0].incident_vertices) == 8


def test_attach_gadget_rejects_missing_face(triangle, gadget1):
    with pytest.raises(FaceNotFound):
        attach_gadget(triangle, AttachmentSpec(host_face=5, gadget=gadget1))


def test_attach_gadget_rejects_anchor_off_the_face(k4, gadget1):
    # face 3 of K4 is {1, 2, 3}
    with pytest.raises(AnchorNotOnFace):
        attach_gadget(k4, AttachmentSpec(host_face=3, gadget=gadget1, host_anchor=0))


def test_attach_gadget_rejects_inner_cycle_anchor(triangle, gadget1):
    spec = AttachmentSpec(host_face=0, gadget=gadget1, gadget_anchor=gadget1.inner_cycle[0])
    with pytest.raises(AnchorNotOnOuterCycle):
        attach_gadget(triangle, spec)


def test_attach_gadget_into_inner_face_keeps_outer_face(triangle, gadget1):
    inner = next(face.index for face in triangle.census if not face.is_outer)
    g = attach_gadget(triangle, AttachmentSpec(host_face=inner, gadget=gadget1))
    assert g.n == 11
    assert g.num_edges == 3 + 16 + 1
    assert euler_characteristic(g) == 2
    outer = g.census.outer_faces
    assert len(outer) == 1 and outer[0].incident_vertices == {0, 1, 2}


def test_k4_faces(k4):
    assert [face.incident_vertices for face in k4.census] == [{0, 1, 2}, {0, 2, 3}, {0, 1, 3}, {1, 2, 3}]
    assert k4.census[0].is_outer


def test_k4_composite_default():
    g = gen_k4_composite()
    assert (g.n, g.num_edges, len(g.census)) == (20, 40, 22)
    assert euler_characteristic(g) == 2
    assert g.is_connected


def test_k4_composite_all_faces():
    g = gen_k4_composite((0, 1, 2, 3))
    assert (g.n, g.num_edges, len(g.census)) == (36, 74, 40)
    assert euler_characteristic(g) == 2


@pytest.mark.parametrize("faces", [(), (4,), (-1,)])
def test_k4_composite_rejects_bad_face_sets(faces):
    with pytest.raises(ConstructionError):
        gen_k4_composite(faces)


@pytest.mark.parametrize("n", [3, 4, 7])
def test_cycle_and_wheel_shapes(n):
    cycle = gen_cycle(n)
    assert cycle.census.counts_by_length == {n: 2}
    wheel = gen_wheel(n)
    assert (wheel.n, wheel.num_edges, len(wheel.census)) == (n + 1, 2 * n, n + 1)
    assert max_degree(wheel) == max(n, 3)


def test_path_has_one_face():
    g = gen_path(4)
    assert g.num_edges == 3
    assert len(g.census) == 1
    assert g.census[0].length == 6


@pytest.mark.parametrize("make, arg", [(gen_cycle, 2), (gen_wheel, 2), (gen_path, 0)])
def test_small_parameters_are_rejected(make, arg):
    with pytest.raises(ConstructionError):
        make(arg)


def test_removing_the_bridge_splits_fig1(fig1):
    split = remove_edge(fig1, fig1.vertex_by_label("a4"), fig1.vertex_by_label("a2'"))
    assert len(split.components) == 2
    assert [max(split.degree(v) for v in c) for c in split.components] == [4, 4]
    assert component_euler_characteristics(split) == [2, 2]
    assert len(split.outer_darts) == 2
    compound = [face for face in fum_faces(split) if isinstance(face, CompoundFace)]
    assert len(compound) == 1
    assert len(compound[0].incident_vertices) == 8


def test_removing_designated_edge_moves_the_designation(square):
    g = remove_edge(square, 0, 1)
    assert g.is_connected
    assert len(g.outer_darts) == 1
    assert g.outer_darts[0] not in {Dart(0, 1), Dart(1, 0)}
    assert len(g.census) == 1 and g.census[0].is_outer


def test_remove_missing_edge(square):
    with pytest.raises(EdgeNotFound):
        remove_edge(square, 0, 2)


def _triangle_with_gadget_inside(triangle, gadget1):
    inner = next(face.index for face in triangle.census if not face.is_outer)
    g = attach_gadget(triangle, AttachmentSpec(host_face=inner, gadget=gadget1))
    bridge = next((w, x) for w in range(3) for x in g.rotations[w] if x >= 3)
    return g, bridge


def test_removing_an_inner_bridge_keeps_one_region(triangle, gadget1, caplog):
    g, bridge = _triangle_with_gadget_inside(triangle, gadget1)
    split = remove_edge(g, *bridge)
    assert len(split.components) == 2
    assert len(split.regions) == 1
    assert split.outer_darts == g.outer_darts

    faces = fum_faces(split)
    assert len(faces) == 2 + 10 - 1
    compound = [face for face in faces if isinstance(face, CompoundFace)]
    assert len(compound) == 1
    assert compound[0].incident_vertices == frozenset(range(7))
    assert "no outer designation" not in caplog.text


def test_region_of_a_split_face_survives_further_removals(triangle, gadget1):
    g, bridge = _triangle_with_gadget_inside(triangle, gadget1)
    split = remove_edge(g, *bridge)
    h = split.vertex_by_label
    # a1-b1 lies inside H_1, away from the shared region
    again = remove_edge(split, h("a1"), h("b1"))
    assert len(again.regions) == 1
    assert len([face for face in fum_faces(again) if isinstance(face, CompoundFace)]) == 1
