"""
Constructors for the counterexample family and small reference graphs.

All rotations are counterclockwise (see plane_graph). Generated graphs carry an
outer-face designation so the FUM checker knows which face is unbounded.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from src.config import DEFAULT_K4_FACES
from src.plane_graph import Dart, PlaneGraph, VertexId, build_plane_graph, prime_suffix

logger = logging.getLogger(__name__)


class ConstructionError(ValueError):
    """Raised when a generator or graph edit gets arguments it cannot honour."""


class FaceNotFound(ConstructionError):
    pass


class AnchorNotOnFace(ConstructionError):
    pass


class AnchorNotOnOuterCycle(ConstructionError):
    pass


class EdgeNotFound(ConstructionError):
    pass


@dataclass(frozen=True)
class GadgetHandle:
    """
    H_k together with its two cycles. outer_cycle is a_1..a_{3k+1} and
    inner_cycle is b_1..b_{3k+1}, both as vertex indices of graph.
    """

    graph: PlaneGraph
    outer_cycle: Tuple[VertexId, ...]
    inner_cycle: Tuple[VertexId, ...]
    k: int

    @property
    def outer_dart(self) -> Dart:
        return Dart(self.outer_cycle[0], self.outer_cycle[1])

    @property
    def outer_face_index(self) -> int:
        return self.graph.census.face_of_dart(self.outer_dart).index


@dataclass(frozen=True)
class AttachmentSpec:
    """
    Where to put a gadget: inside host_face of the base graph, joined by one
    edge host_anchor -- gadget_anchor. Anchors default to the first vertex of
    the host face walk and to a_4 of the gadget.
    """

    host_face: int
    gadget: GadgetHandle
    gadget_anchor: Optional[VertexId] = None
    host_anchor: Optional[VertexId] = None


def gen_gadget(k: int) -> GadgetHandle:
    """
    H_k: the cycle b_1..b_m inside the cycle a_1..a_m (m = 3k + 1) with spokes
    a_i b_i and b_i a_{i+1}. a_i has index i - 1 and b_i has index m + i - 1.
    """
    if k < 1:
        raise ConstructionError(f"gadget parameter k must be at least 1, got {k}")
    m = 3 * k + 1

    def a(i: int) -> int:
        return (i - 1) % m

    def b(i: int) -> int:
        return m + (i - 1) % m

    rotations: List[List[int]] = [[] for _ in range(2 * m)]
    for i in range(1, m + 1):
        rotations[a(i)] = [a(i + 1), b(i), b(i - 1), a(i - 1)]
        rotations[b(i)] = [a(i + 1), b(i + 1), b(i - 1), a(i)]
    labels = [f"a{i}" for i in range(1, m + 1)] + [f"b{i}" for i in range(1, m + 1)]

    graph = build_plane_graph(2 * m, rotations, labels, [(a(1), a(2))])
    logger.debug(f"Generated H_{k} with {graph.n} vertices")
    return GadgetHandle(
        graph=graph,
        outer_cycle=tuple(a(i) for i in range(1, m + 1)),
        inner_cycle=tuple(b(i) for i in range(1, m + 1)),
        k=k,
    )


def _insert_after(rotation: List[int], anchor: int, new: int) -> None:
    rotation.insert(rotation.index(anchor) + 1, new)


def _incoming_neighbor(walk: Iterable[Dart], vertex: VertexId) -> Optional[VertexId]:
    """Tail of the first walk dart entering vertex; the face's corner at vertex follows it."""
    for dart in walk:
        if dart.head == vertex:
            return dart.tail
    return None


def attach_gadget(base: PlaneGraph, spec: AttachmentSpec) -> PlaneGraph:
    """
    Embeds spec.gadget inside a face of base and joins it with one edge.

    The new edge enters host_anchor's rotation in the corner that belongs to
    the host face, and gadget_anchor's rotation in the corner of the gadget's
    outer face, so the result stays plane. Gadget labels get primes appended
    until they do not clash with base labels.
    """
    census = base.census
    if not 0 <= spec.host_face < len(census):
        raise FaceNotFound(f"base graph has no face {spec.host_face} (it has {len(census)})")
    face = census[spec.host_face]

    host_anchor = spec.host_anchor
    if host_anchor is None:
        host_anchor = face.vertices_in_walk_order()[0]
    if host_anchor not in face.incident_vertices:
        raise AnchorNotOnFace(f"v{host_anchor} is not on face {spec.host_face}")

    gadget = spec.gadget
    gadget_anchor = spec.gadget_anchor
    if gadget_anchor is None:
        gadget_anchor = gadget.outer_cycle[3 % len(gadget.outer_cycle)]
    if gadget_anchor not in gadget.outer_cycle:
        raise AnchorNotOnOuterCycle(f"v{gadget_anchor} is not on the gadget's outer cycle")

    offset = base.n
    rotations = [list(rot) for rot in base.rotations]
    rotations.extend([u + offset for u in rot] for rot in gadget.graph.rotations)

    host_prev = _incoming_neighbor(face.walk, host_anchor)
    if host_prev is None:
        rotations[host_anchor].append(gadget_anchor + offset)
    else:
        _insert_after(rotations[host_anchor], host_prev, gadget_anchor + offset)

    gadget_face = gadget.graph.census.face_of_dart(gadget.outer_dart)
    gadget_prev = _incoming_neighbor(gadget_face.walk, gadget_anchor)
    _insert_after(rotations[gadget_anchor + offset], gadget_prev + offset, host_anchor)

    taken = {label for label in base.labels if label is not None}
    suffix = prime_suffix(taken, gadget.graph.labels)
    labels = list(base.labels) + [
        label + suffix if label is not None else None for label in gadget.graph.labels
    ]

    result = build_plane_graph(base.n + gadget.graph.n, rotations, labels, base.outer_darts, base.regions)
    logger.info(
        f"Attached H_{gadget.k} into face {spec.host_face} via "
        f"{result.label_of(host_anchor)}-{result.label_of(gadget_anchor + offset)}"
    )
    return result


def gen_fig1() -> PlaneGraph:
    """Two copies of H_1 side by side in the outer face, joined by a_4 -- a_2'."""
    host = gen_gadget(1)
    guest = gen_gadget(1)
    spec = AttachmentSpec(
        host_face=host.outer_face_index,
        gadget=guest,
        gadget_anchor=guest.outer_cycle[1],
        host_anchor=host.outer_cycle[3],
    )
    return attach_gadget(host.graph, spec)


def gen_cycle(n: int) -> PlaneGraph:
    if n < 3:
        raise ConstructionError(f"a cycle needs at least 3 vertices, got {n}")
    rotations = [[(i + 1) % n, (i - 1) % n] for i in range(n)]
    return build_plane_graph(n, rotations, outer_darts=[(0, 1)])


def gen_path(n: int) -> PlaneGraph:
    if n < 1:
        raise ConstructionError(f"a path needs at least 1 vertex, got {n}")
    rotations = [[u for u in (i - 1, i + 1) if 0 <= u < n] for i in range(n)]
    outer = [(0, 1)] if n > 1 else []
    return build_plane_graph(n, rotations, outer_darts=outer)


def gen_wheel(n: int) -> PlaneGraph:
    """An n-cycle 0..n-1 with hub n."""
    if n < 3:
        raise ConstructionError(f"a wheel needs a rim of at least 3 vertices, got {n}")
    hub = n
    rotations = [[(i + 1) % n, hub, (i - 1) % n] for i in range(n)]
    rotations.append(list(range(n)))
    return build_plane_graph(n + 1, rotations, outer_darts=[(0, 1)])


def gen_k4() -> PlaneGraph:
    """K4 as the wheel on a triangle; faces 0..3 are {0,1,2}, {0,2,3}, {0,1,3}, {1,2,3}."""
    return gen_wheel(3)


def gen_k4_composite(faces_to_fill: Iterable[int] = DEFAULT_K4_FACES, k: int = 1) -> PlaneGraph:
    """
    Puts one H_k inside each selected face of K4, anchored at the first vertex
    of that face's walk. Faces are given as face indices of gen_k4().
    """
    faces = sorted(set(faces_to_fill))
    if not faces:
        raise ConstructionError("gen_k4_composite needs at least one face to fill")
    graph = gen_k4()
    census = graph.census
    for face_id in faces:
        if not 0 <= face_id < len(census):
            raise FaceNotFound(f"K4 has no face {face_id}")

    # Face numbering shifts after each attachment; the original first dart still identifies the face.
    targets = [(census[f].walk[0], census[f].vertices_in_walk_order()[0]) for f in faces]
    for first_dart, anchor in targets:
        host_face = graph.census.face_of_dart(first_dart).index
        graph = attach_gadget(graph, AttachmentSpec(host_face=host_face, gadget=gen_gadget(k), host_anchor=anchor))
    return graph


def _merge_regions(g: PlaneGraph, groups: Sequence[Sequence[Dart]]) -> List[List[Dart]]:
    """Groups that now name a common face become one region; one dart per face."""
    face_of = g.census.dart_to_face
    linked = nx.Graph()
    dart_for_face = {}
    for group in groups:
        faces = []
        for dart in group:
            face = face_of[dart]
            dart_for_face.setdefault(face, dart)
            faces.append(face)
        linked.add_nodes_from(faces)
        linked.add_edges_from(zip(faces, faces[1:]))
    parts = sorted((sorted(part) for part in nx.connected_components(linked)), key=lambda part: part[0])
    return [[dart_for_face[f] for f in part] for part in parts if len(part) >= 2]


def remove_edge(g: PlaneGraph, u: VertexId, v: VertexId) -> PlaneGraph:
    """
    Deletes edge uv. Outer designations and regions follow the surviving
    darts of their faces. Removing a bridge splits its face between two
    components: sides of the designated outer face both stay designated outer
    faces, sides of any other face become one region.
    """
    if not g.has_edge(u, v):
        raise EdgeNotFound(f"no edge between v{u} and v{v}")
    census = g.census
    removed = {Dart(u, v), Dart(v, u)}
    forward = census.face_of_dart(Dart(u, v))
    backward = census.face_of_dart(Dart(v, u))

    rotations = [list(rot) for rot in g.rotations]
    rotations[u].remove(v)
    rotations[v].remove(u)
    bare = build_plane_graph(g.n, rotations, g.labels)

    def surviving(dart: Dart) -> Optional[Dart]:
        if dart not in removed:
            return dart
        return next((d for d in census.face_of_dart(dart).walk if d not in removed), None)

    outer = [d for d in map(surviving, g.outer_darts) if d is not None]
    regions = [[d for d in map(surviving, group) if d is not None] for group in g.regions]

    if forward.index == backward.index:
        sides = {}
        for dart in forward.walk:
            if dart not in removed:
                sides.setdefault(bare.component_of(dart.tail), dart)
        if len(sides) == 2 and forward.is_outer:
            for component, dart in sides.items():
                if all(bare.component_of(d.tail) != component for d in outer):
                    outer.append(dart)
        elif len(sides) == 2:
            regions.append(list(sides.values()))

    result = build_plane_graph(bare.n, bare.rotations, bare.labels, outer, _merge_regions(bare, regions))
    logger.info(f"Removed edge {g.label_of(u)}-{g.label_of(v)}; {len(result.components)} component(s) remain")
    return result
