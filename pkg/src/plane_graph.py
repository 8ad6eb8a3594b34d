"""
Plane graphs stored as rotation systems.

Rotations list each vertex's neighbours in counterclockwise order. Faces are
never stored; they are traced from the rotations with the successor rule
"after dart (u, v) continue with (v, w), where w follows u in rotations[v]".
Under this convention inner faces come out clockwise and the outer face
counterclockwise.
"""
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

logger = logging.getLogger(__name__)

VertexId = int


class GraphValidationError(ValueError):
    """Raised when rotation data does not describe a simple plane graph."""


class AsymmetricAdjacency(GraphValidationError):
    def __init__(self, u: int, v: int):
        self.pair = (u, v)
        super().__init__(f"v{u} lists v{v} as a neighbour but v{v} does not list v{u}")


class DuplicateNeighbor(GraphValidationError):
    def __init__(self, vertex: int, neighbor: int):
        self.vertex = vertex
        self.neighbor = neighbor
        super().__init__(f"v{vertex} lists neighbour v{neighbor} more than once")


class SelfLoop(GraphValidationError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"v{vertex} lists itself as a neighbour")


class IndexOutOfRange(GraphValidationError):
    def __init__(self, vertex: int, neighbor: int, n: int):
        self.vertex = vertex
        self.neighbor = neighbor
        super().__init__(f"v{vertex} references v{neighbor}, outside [0, {n})")


class InvalidOuterFace(GraphValidationError):
    """Raised for an outer-face designation that is not a dart, or a second one in a component."""


class InvalidRegion(GraphValidationError):
    """Raised for a region group that does not join faces of distinct components."""


class GraphSyntaxError(ValueError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


@dataclass(frozen=True, order=True)
class Dart:
    tail: VertexId
    head: VertexId

    def reversed(self) -> "Dart":
        return Dart(self.head, self.tail)

    def __iter__(self) -> Iterator[int]:
        yield self.tail
        yield self.head


@dataclass(frozen=True)
class Face:
    """A traced face: its boundary walk and the distinct vertices on it."""

    index: int
    walk: Tuple[Dart, ...]
    incident_vertices: FrozenSet[VertexId]
    component: int
    is_outer: bool = False

    @property
    def length(self) -> int:
        return len(self.walk)

    @property
    def key(self) -> str:
        return f"f{self.index}"

    def vertices_in_walk_order(self) -> Tuple[VertexId, ...]:
        if not self.walk:
            return tuple(sorted(self.incident_vertices))
        return tuple(d.tail for d in self.walk)


@dataclass(frozen=True)
class FaceCensus:
    faces: Tuple[Face, ...]
    counts_by_length: Mapping[int, int]

    def __len__(self) -> int:
        return len(self.faces)

    def __iter__(self) -> Iterator[Face]:
        return iter(self.faces)

    def __getitem__(self, index: int) -> Face:
        return self.faces[index]

    @cached_property
    def dart_to_face(self) -> Dict[Dart, int]:
        return {d: face.index for face in self.faces for d in face.walk}

    def face_of_dart(self, dart: Dart) -> Face:
        return self.faces[self.dart_to_face[dart]]

    @property
    def outer_faces(self) -> Tuple[Face, ...]:
        return tuple(f for f in self.faces if f.is_outer)

    def summary(self) -> str:
        shapes = ", ".join(f"{count}x{length}" for length, count in sorted(self.counts_by_length.items()))
        return f"{len(self.faces)} faces ({shapes})"


_LABEL_PATTERN = re.compile(r"^[^\s#]+$")


@dataclass(frozen=True)
class PlaneGraph:
    """
    Immutable plane graph. Construction validates every invariant eagerly, so
    any instance in circulation is a simple graph with symmetric rotations.

    outer_darts designates outer faces: the face containing each dart is the
    outer face of that dart's component. At most one designation per component.

    regions groups darts whose faces, each in a different component, are one
    region of the plane: typically a face of one component with other
    components nested inside it.
    """

    n: int
    rotations: Tuple[Tuple[VertexId, ...], ...]
    labels: Tuple[Optional[str], ...] = ()
    outer_darts: Tuple[Dart, ...] = ()
    regions: Tuple[Tuple[Dart, ...], ...] = ()
    components: Tuple[FrozenSet[VertexId], ...] = field(default=(), init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        n = int(self.n)
        rotations = tuple(tuple(int(u) for u in rot) for rot in self.rotations)
        labels = tuple(self.labels) if self.labels else (None,) * n
        outer_darts = tuple(Dart(int(t), int(h)) for t, h in self.outer_darts)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rotations", rotations)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "outer_darts", outer_darts)
        object.__setattr__(
            self, "regions", tuple(tuple(Dart(int(t), int(h)) for t, h in group) for group in self.regions)
        )

        self._validate_rotations()
        self._validate_labels()
        object.__setattr__(self, "components", self._compute_components())
        self._validate_outer_darts()
        self._validate_regions()

    def _validate_rotations(self) -> None:
        n = self.n
        if n < 0:
            raise GraphValidationError(f"vertex count must be non-negative, got {n}")
        if len(self.rotations) != n:
            raise GraphValidationError(f"expected {n} rotation lists, got {len(self.rotations)}")
        neighbor_sets = []
        for v, rot in enumerate(self.rotations):
            seen = set()
            for u in rot:
                if u < 0 or u >= n:
                    raise IndexOutOfRange(v, u, n)
                if u == v:
                    raise SelfLoop(v)
                if u in seen:
                    raise DuplicateNeighbor(v, u)
                seen.add(u)
            neighbor_sets.append(seen)
        for v, neighbors in enumerate(neighbor_sets):
            for u in neighbors:
                if v not in neighbor_sets[u]:
                    raise AsymmetricAdjacency(v, u)

    def _validate_labels(self) -> None:
        if len(self.labels) != self.n:
            raise GraphValidationError(f"expected {self.n} labels, got {len(self.labels)}")
        seen = {}
        for v, label in enumerate(self.labels):
            if label is None:
                continue
            if not _LABEL_PATTERN.match(label):
                raise GraphValidationError(f"label {label!r} of v{v} must be a single token without '#'")
            if label in seen:
                raise GraphValidationError(f"label {label!r} used by both v{seen[label]} and v{v}")
            seen[label] = v

    def _compute_components(self) -> Tuple[FrozenSet[VertexId], ...]:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return tuple(sorted((frozenset(c) for c in nx.connected_components(graph)), key=min))

    def _validate_outer_darts(self) -> None:
        designated = {}
        for dart in self.outer_darts:
            if not (0 <= dart.tail < self.n) or dart.head not in self.rotations[dart.tail]:
                raise InvalidOuterFace(f"outer dart ({dart.tail}, {dart.head}) is not an edge side")
            component = self.component_of(dart.tail)
            if component in designated:
                raise InvalidOuterFace(
                    f"component {component} has two outer designations: "
                    f"{tuple(designated[component])} and {tuple(dart)}"
                )
            designated[component] = dart

    def _validate_regions(self) -> None:
        for group in self.regions:
            if len(group) < 2:
                raise InvalidRegion(f"region {[tuple(d) for d in group]} needs at least two darts")
            seen = set()
            for dart in group:
                if not (0 <= dart.tail < self.n) or dart.head not in self.rotations[dart.tail]:
                    raise InvalidRegion(f"region dart ({dart.tail}, {dart.head}) is not an edge side")
                component = self.component_of(dart.tail)
                if component in seen:
                    raise InvalidRegion(f"region {[tuple(d) for d in group]} has two darts in component {component}")
                seen.add(component)

    # --- basic queries ---

    @cached_property
    def _component_index(self) -> Tuple[int, ...]:
        index = [0] * self.n
        for i, component in enumerate(self.components):
            for v in component:
                index[v] = i
        return tuple(index)

    def component_of(self, v: VertexId) -> int:
        return self._component_index[v]

    @property
    def num_edges(self) -> int:
        return sum(len(rot) for rot in self.rotations) // 2

    def edges(self) -> List[Tuple[VertexId, VertexId]]:
        return [(v, u) for v, rot in enumerate(self.rotations) for u in sorted(rot) if v < u]

    def darts(self) -> List[Dart]:
        return [Dart(v, u) for v, rot in enumerate(self.rotations) for u in sorted(rot)]

    def degree(self, v: VertexId) -> int:
        return len(self.rotations[v])

    def neighbors(self, v: VertexId) -> Tuple[VertexId, ...]:
        return self.rotations[v]

    def has_edge(self, u: VertexId, v: VertexId) -> bool:
        return 0 <= u < self.n and v in self.rotations[u]

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1

    def label_of(self, v: VertexId) -> str:
        label = self.labels[v]
        return label if label is not None else f"v{v}"

    def vertex_by_label(self, label: str) -> VertexId:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no vertex labelled {label!r}") from None

    def outer_dart_of_component(self, component: int) -> Optional[Dart]:
        for dart in self.outer_darts:
            if self.component_of(dart.tail) == component:
                return dart
        return None

    @cached_property
    def census(self) -> FaceCensus:
        return trace_faces(self)


def build_plane_graph(
    n: int,
    rotations: Sequence[Sequence[VertexId]],
    labels: Optional[Sequence[Optional[str]]] = None,
    outer_darts: Iterable[Tuple[VertexId, VertexId]] = (),
    regions: Iterable[Iterable[Tuple[VertexId, VertexId]]] = (),
) -> PlaneGraph:
    """
    Builds and validates a plane graph from counterclockwise rotation lists.
    """
    graph = PlaneGraph(
        n=n,
        rotations=tuple(tuple(rot) for rot in rotations),
        labels=tuple(labels) if labels else (),
        outer_darts=tuple(Dart(t, h) for t, h in outer_darts),
        regions=tuple(tuple(Dart(t, h) for t, h in group) for group in regions),
    )
    logger.debug(f"Built plane graph with V={graph.n} E={graph.num_edges}")
    return graph


def next_dart(g: PlaneGraph, dart: Dart) -> Dart:
    rot = g.rotations[dart.head]
    position = rot.index(dart.tail)
    return Dart(dart.head, rot[(position + 1) % len(rot)])


def trace_faces(g: PlaneGraph) -> FaceCensus:
    """
    Partitions the darts of g into face walks. Faces are numbered in order of
    their smallest dart; each walk starts at that dart. Isolated vertices get
    one empty-walk face each, numbered after all traced faces.
    """
    positions = [{u: i for i, u in enumerate(rot)} for rot in g.rotations]
    outer = set(g.outer_darts)
    visited = set()
    faces: List[Face] = []

    for start in g.darts():
        if start in visited:
            continue
        walk = []
        dart = start
        while dart not in visited:
            visited.add(dart)
            walk.append(dart)
            rot = g.rotations[dart.head]
            dart = Dart(dart.head, rot[(positions[dart.head][dart.tail] + 1) % len(rot)])
        faces.append(Face(
            index=len(faces),
            walk=tuple(walk),
            incident_vertices=frozenset(d.tail for d in walk),
            component=g.component_of(start.tail),
            is_outer=any(d in outer for d in walk),
        ))

    for v in range(g.n):
        if not g.rotations[v]:
            faces.append(Face(
                index=len(faces),
                walk=(),
                incident_vertices=frozenset((v,)),
                component=g.component_of(v),
                is_outer=True,
            ))

    counts = Counter(face.length for face in faces)
    return FaceCensus(faces=tuple(faces), counts_by_length=dict(sorted(counts.items())))


def euler_characteristic(g: PlaneGraph) -> int:
    """V - E + F over traced faces. 2 for a connected plane graph, 2c for c components."""
    return g.n - g.num_edges + len(g.census)


def component_euler_characteristics(g: PlaneGraph) -> List[int]:
    census = g.census
    result = []
    for i, component in enumerate(g.components):
        edges = sum(len(g.rotations[v]) for v in component) // 2
        faces = sum(1 for face in census if face.component == i)
        result.append(len(component) - edges + faces)
    return result


def max_degree(g: PlaneGraph) -> int:
    return max((len(rot) for rot in g.rotations), default=0)


def prime_suffix(taken: set, labels: Iterable[Optional[str]]) -> str:
    """Shortest run of primes that makes every label distinct from the taken ones."""
    suffix = ""
    while any(label is not None and label + suffix in taken for label in labels):
        suffix += "'"
    return suffix


def disjoint_union(graphs: Sequence[PlaneGraph]) -> PlaneGraph:
    """
    Places the graphs side by side; vertex indices of graphs[i] are shifted by
    the sizes of the graphs before it. Outer designations and regions carry over; labels
    that clash with earlier ones get primes appended.
    """
    rotations: List[Tuple[int, ...]] = []
    labels: List[Optional[str]] = []
    outer: List[Dart] = []
    regions: List[Tuple[Dart, ...]] = []
    offset = 0
    for graph in graphs:
        rotations.extend(tuple(u + offset for u in rot) for rot in graph.rotations)
        suffix = prime_suffix({label for label in labels if label is not None}, graph.labels)
        labels.extend(label + suffix if label is not None else None for label in graph.labels)
        outer.extend(Dart(d.tail + offset, d.head + offset) for d in graph.outer_darts)
        regions.extend(tuple(Dart(d.tail + offset, d.head + offset) for d in group) for group in graph.regions)
        offset += graph.n
    return build_plane_graph(offset, rotations, labels, outer, regions)


def component_subgraph(g: PlaneGraph, component: int) -> PlaneGraph:
    """
    Extracts one component, renumbering its vertices in increasing order.
    Regions are dropped: on its own the component shares no face.
    """
    members = sorted(g.components[component])
    renumber = {v: i for i, v in enumerate(members)}
    rotations = [[renumber[u] for u in g.rotations[v]] for v in members]
    labels = [g.labels[v] for v in members]
    outer = [
        (renumber[d.tail], renumber[d.head])
        for d in g.outer_darts
        if d.tail in renumber
    ]
    return build_plane_graph(len(members), rotations, labels, outer)


# --- text format ---

_VERTEX_TOKEN = re.compile(r"^v?(\d+)$")


def _parse_vertex(token: str, line_number: int) -> int:
    match = _VERTEX_TOKEN.match(token)
    if not match:
        raise GraphSyntaxError(line_number, f"expected a vertex index, got {token!r}")
    return int(match.group(1))


def parse_graph(text: str) -> PlaneGraph:
    """
    Parses the planegraph text format:

        planegraph <n>
        v<i>: <neighbour> <neighbour> ...     (counterclockwise rotation)
        label v<i> <tag>
        outer <tail> <head>
        region <tail> <head> <tail> <head> ...   (one dart per member face)

    '#' starts a comment. Validation errors from construction propagate.
    """
    n: Optional[int] = None
    rotations: Dict[int, List[int]] = {}
    labels: Dict[int, str] = {}
    outer: List[Tuple[int, int]] = []
    regions: List[List[Tuple[int, int]]] = []

    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if n is None:
            if tokens[0] != "planegraph" or len(tokens) != 2 or not tokens[1].isdigit():
                raise GraphSyntaxError(line_number, "expected header 'planegraph <n>'")
            n = int(tokens[1])
            continue

        head = tokens[0]
        if head.endswith(":"):
            vertex = _parse_vertex(head[:-1], line_number)
            if vertex >= n:
                raise GraphSyntaxError(line_number, f"rotation for v{vertex} but the graph has {n} vertices")
            if vertex in rotations:
                raise GraphSyntaxError(line_number, f"second rotation line for v{vertex}")
            rotations[vertex] = [_parse_vertex(t, line_number) for t in tokens[1:]]
        elif head == "label":
            if len(tokens) != 3:
                raise GraphSyntaxError(line_number, "expected 'label v<i> <tag>'")
            vertex = _parse_vertex(tokens[1], line_number)
            if vertex >= n:
                raise GraphSyntaxError(line_number, f"label for v{vertex} but the graph has {n} vertices")
            labels[vertex] = tokens[2]
        elif head == "outer":
            if len(tokens) != 3:
                raise GraphSyntaxError(line_number, "expected 'outer <tail> <head>'")
            outer.append((_parse_vertex(tokens[1], line_number), _parse_vertex(tokens[2], line_number)))
        elif head == "region":
            ends = [_parse_vertex(t, line_number) for t in tokens[1:]]
            if len(ends) < 4 or len(ends) % 2:
                raise GraphSyntaxError(line_number, "expected 'region <tail> <head> <tail> <head> ...'")
            regions.append(list(zip(ends[::2], ends[1::2])))
        elif head == "planegraph":
            raise GraphSyntaxError(line_number, "duplicate header")
        else:
            raise GraphSyntaxError(line_number, f"unrecognised line starting with {head!r}")

    if n is None:
        raise GraphSyntaxError(1, "missing 'planegraph <n>' header")
    missing = [v for v in range(n) if v not in rotations]
    if missing:
        raise GraphSyntaxError(len(text.splitlines()), f"no rotation line for v{missing[0]}")
    label_list = [labels.get(v) for v in range(n)] if labels else None
    return build_plane_graph(n, [rotations[v] for v in range(n)], label_list, outer, regions)


def serialize_graph(g: PlaneGraph) -> str:
    lines = [f"planegraph {g.n}"]
    for v, rot in enumerate(g.rotations):
        lines.append(" ".join([f"v{v}:"] + [str(u) for u in rot]))
    for v, label in enumerate(g.labels):
        if label is not None:
            lines.append(f"label v{v} {label}")
    for dart in g.outer_darts:
        lines.append(f"outer {dart.tail} {dart.head}")
    for group in g.regions:
        lines.append(" ".join(["region"] + [f"{d.tail} {d.head}" for d in group]))
    return "\n".join(lines) + "\n"
