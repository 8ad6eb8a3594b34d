"""
Facial unique-maximum (FUM) colorings: checking, exact solving, chi_fum, and
the enumeration-based checks behind the counterexample construction.

Colors are ordered naturals 1..k. Nothing here assumes the colors may be
permuted: swapping two colors can turn a FUM-coloring into a non-FUM one.
"""
import itertools
import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Protocol, Sequence, Set, Tuple, Union

import networkx as nx

from src.config import (
    BRUTE_FORCE_VERTEX_LIMIT,
    DEFAULT_NODE_BUDGET,
    DEFAULT_TIME_BUDGET,
    ENUMERATION_VERTEX_LIMIT,
    get_thread_count,
)
from src.generators import GadgetHandle
from src.plane_graph import FaceCensus, PlaneGraph, VertexId, disjoint_union
from src.search import (
    Colors,
    ResourceLimitExceeded,
    SearchProblem,
    SearchStats,
    enumerate_all,
    find_first_parallel,
)
from src.utils import Stopwatch

logger = logging.getLogger(__name__)


class ColoringError(ValueError):
    pass


class PaletteMismatch(ColoringError):
    pass


class ColoringSizeMismatch(ColoringError):
    pass


class ColoringSyntaxError(ColoringError):
    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class TooLargeForEnumeration(ValueError):
    pass


@dataclass(frozen=True)
class Coloring:
    """Total map vertex -> color in 1..k, stored by vertex index."""

    colors: Tuple[int, ...]
    k: int

    def __post_init__(self) -> None:
        colors = tuple(int(c) for c in self.colors)
        object.__setattr__(self, "colors", colors)
        if self.k < 1:
            raise PaletteMismatch(f"palette size must be at least 1, got {self.k}")
        for v, c in enumerate(colors):
            if c < 1:
                raise ColoringError(f"v{v} has color {c}; colors start at 1")
            if c > self.k:
                raise PaletteMismatch(f"v{v} has color {c} outside palette 1..{self.k}")

    def __len__(self) -> int:
        return len(self.colors)

    def __getitem__(self, v: VertexId) -> int:
        return self.colors[v]

    def with_palette(self, k: int) -> "Coloring":
        return Coloring(self.colors, k)

    def recolored(self, mapping: Callable[[int], int], k: int) -> "Coloring":
        return Coloring(tuple(mapping(c) for c in self.colors), k)

    def to_dict(self) -> dict:
        return {"palette": self.k, "colors": list(self.colors)}


class FaceLike(Protocol):
    key: str
    incident_vertices: FrozenSet[VertexId]


@dataclass(frozen=True)
class CompoundFace:
    """
    The shared outer region of several components embedded side by side,
    checked as a single face. member_faces holds (component, face id) pairs.
    """

    member_faces: FrozenSet[Tuple[int, int]]
    incident_vertices: FrozenSet[VertexId]

    @property
    def key(self) -> str:
        members = ",".join(f"c{c}:f{f}" for c, f in sorted(self.member_faces))
        return f"compound({members})"


@dataclass(frozen=True)
class FaceConstraint:
    key: str
    incident_vertices: FrozenSet[VertexId]


@dataclass(frozen=True)
class FumViolation:
    face: str
    max_color: int
    multiplicity: int


@dataclass(frozen=True)
class CheckReport:
    proper_violations: Tuple[Tuple[VertexId, VertexId], ...]
    fum_violations: Tuple[FumViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.proper_violations and not self.fum_violations

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "proper_violations": [list(pair) for pair in self.proper_violations],
            "fum_violations": [
                {"face": v.face, "max_color": v.max_color, "multiplicity": v.multiplicity}
                for v in self.fum_violations
            ],
        }

    def format_text(self, g: Optional[PlaneGraph] = None) -> str:
        name = g.label_of if g is not None else (lambda v: f"v{v}")
        if self.ok:
            return "OK: proper, every face has a unique maximum"
        lines = []
        for u, v in self.proper_violations:
            lines.append(f"improper edge {name(u)}-{name(v)}")
        for violation in self.fum_violations:
            lines.append(
                f"face {violation.face}: max color {violation.max_color} "
                f"appears {violation.multiplicity} times"
            )
        return "\n".join(lines)


class SolveStatus(str, Enum):
    SATISFIABLE = "Satisfiable"
    EXHAUSTED = "Exhausted"


@dataclass(frozen=True)
class SolveOptions:
    strong_pruning: bool = True
    node_budget: int = DEFAULT_NODE_BUDGET
    time_budget: float = DEFAULT_TIME_BUDGET
    threads: Optional[int] = None

    @property
    def workers(self) -> int:
        return self.threads if self.threads is not None else get_thread_count()


@dataclass(frozen=True)
class SolveOutcome:
    status: SolveStatus
    certificate: Optional[Coloring]
    stats: SearchStats

    @property
    def satisfiable(self) -> bool:
        return self.status is SolveStatus.SATISFIABLE

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "stats": self.stats.to_dict(),
        }


@dataclass(frozen=True)
class GadgetReport:
    holds: bool
    colorings_examined: int
    witness: Optional[Coloring]
    stats: SearchStats

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "colorings_examined": self.colorings_examined,
            "witness": self.witness.to_dict() if self.witness else None,
            "stats": self.stats.to_dict(),
        }


# --- faces seen by the FUM predicate ---

def fum_faces(g: PlaneGraph) -> Tuple[FaceLike, ...]:
    """
    The faces the FUM predicate quantifies over. For a connected graph these
    are the traced faces. When several components carry an outer designation,
    their outer faces are one region and become a single CompoundFace; so do
    the faces named by each of g.regions. Groups sharing a face merge.
    """
    census = g.census
    if g.is_connected:
        return census.faces
    in_region = {g.component_of(d.tail) for group in g.regions for d in group}
    undesignated = [
        i for i, component in enumerate(g.components)
        if len(component) > 1 and g.outer_dart_of_component(i) is None and i not in in_region
    ]
    if undesignated:
        logger.warning(
            f"Components {undesignated} have no outer designation; their faces are checked individually"
        )

    groups = [[census.dart_to_face[d] for d in group] for group in g.regions]
    outer = [face.index for face in census if face.is_outer]
    if len(outer) >= 2:
        groups.append(outer)
    if not groups:
        return census.faces

    linked = nx.Graph()
    for group in groups:
        linked.add_nodes_from(group)
        linked.add_edges_from(zip(group, group[1:]))
    merged = sorted((sorted(part) for part in nx.connected_components(linked)), key=lambda part: part[0])

    in_compound = {f for part in merged for f in part}
    faces: List[FaceLike] = [face for face in census if face.index not in in_compound]
    for part in merged:
        members = [census[f] for f in part]
        faces.append(CompoundFace(
            member_faces=frozenset((face.component, face.index) for face in members),
            incident_vertices=frozenset().union(*(face.incident_vertices for face in members)),
        ))
    return tuple(faces)


def compound_outer_face(components: Sequence[PlaneGraph]) -> CompoundFace:
    """
    Shared outer region of separately given components, with vertex indices
    shifted the way disjoint_union shifts them.
    """
    members = []
    vertices: Set[int] = set()
    offset = 0
    for i, component in enumerate(components):
        outer = [face for face in component.census if face.is_outer]
        if len(outer) != 1:
            raise ValueError(f"component {i} needs exactly one designated outer face, found {len(outer)}")
        members.append((i, outer[0].index))
        vertices.update(v + offset for v in outer[0].incident_vertices)
        offset += component.n
    return CompoundFace(member_faces=frozenset(members), incident_vertices=frozenset(vertices))


def _faces_from(g: PlaneGraph, faces: Union[None, FaceCensus, Iterable[FaceLike]]) -> Tuple[FaceLike, ...]:
    if faces is None:
        return fum_faces(g)
    if isinstance(faces, FaceCensus):
        return faces.faces
    return tuple(faces)


# --- checking ---

def _validate_coloring(g: PlaneGraph, c: Coloring, k: Optional[int] = None) -> None:
    if len(c) != g.n:
        raise ColoringSizeMismatch(f"coloring covers {len(c)} vertices, graph has {g.n}")
    if k is not None and c.k != k:
        raise PaletteMismatch(f"coloring declares palette {c.k}, expected {k}")


def check_proper(g: PlaneGraph, c: Coloring) -> List[Tuple[VertexId, VertexId]]:
    """Monochromatic edges (u, v) with u < v, in sorted order."""
    _validate_coloring(g, c)
    return [(u, v) for u, v in g.edges() if c[u] == c[v]]


def _face_violation(face: FaceLike, c: Sequence[int]) -> Optional[FumViolation]:
    colors = [c[v] for v in face.incident_vertices]
    top = max(colors)
    multiplicity = colors.count(top)
    if multiplicity >= 2:
        return FumViolation(face=face.key, max_color=top, multiplicity=multiplicity)
    return None


def check_fum(
    g: PlaneGraph,
    c: Coloring,
    faces: Union[None, FaceCensus, Iterable[FaceLike]] = None,
) -> CheckReport:
    """
    Full FUM check: properness plus, for every face, uniqueness of the maximum
    color over the face's distinct incident vertices.
    """
    proper = check_proper(g, c)
    violations = []
    for face in _faces_from(g, faces):
        violation = _face_violation(face, c.colors)
        if violation is not None:
            violations.append(violation)
    return CheckReport(proper_violations=tuple(proper), fum_violations=tuple(violations))


def check_disconnected_fum(
    components: Sequence[PlaneGraph],
    shared: CompoundFace,
    c: Coloring,
    k: int,
) -> CheckReport:
    """
    Checks a coloring of co-embedded components (vertices numbered as in
    disjoint_union) against every component face plus the shared region.
    """
    union = disjoint_union(components)
    _validate_coloring(union, c, k)
    faces: List[FaceLike] = []
    offset = 0
    for i, component in enumerate(components):
        for face in component.census:
            if (i, face.index) in shared.member_faces:
                continue
            faces.append(FaceConstraint(
                key=f"c{i}:f{face.index}",
                incident_vertices=frozenset(v + offset for v in face.incident_vertices),
            ))
        offset += component.n
    faces.append(shared)
    return check_fum(union, c, faces)


# --- exact search ---

def _search_problem(
    g: PlaneGraph,
    k: int,
    faces: Iterable[FaceLike],
    strong_pruning: bool = True,
) -> SearchProblem:
    return SearchProblem.build(
        n=g.n,
        adjacency=g.rotations,
        faces=[tuple(face.incident_vertices) for face in faces],
        k=k,
        strong_pruning=strong_pruning,
    )


def solve_fum(g: PlaneGraph, k: int, opts: Optional[SolveOptions] = None) -> SolveOutcome:
    """
    Decides whether g has a FUM-coloring with palette 1..k. The certificate is
    the first one in the search order, whatever the options or worker count.
    Raises ResourceLimitExceeded when a budget runs out; that is never
    reported as Exhausted.
    """
    if k < 1:
        raise ValueError(f"palette size must be at least 1, got {k}")
    opts = opts or SolveOptions()
    faces = fum_faces(g)
    problem = _search_problem(g, k, faces, opts.strong_pruning)
    logger.info(f"Solving FUM-{k} on V={g.n} with {len(faces)} face constraints")

    with Stopwatch() as watch:
        try:
            colors, stats = find_first_parallel(problem, opts.node_budget, opts.time_budget, opts.workers)
        except ResourceLimitExceeded as e:
            logger.warning(f"FUM-{k} search stopped: {e}")
            raise
    stats.wall_time = watch.elapsed

    if colors is None:
        logger.info(f"FUM-{k}: exhausted after {stats.nodes_expanded} nodes")
        return SolveOutcome(SolveStatus.EXHAUSTED, None, stats)

    certificate = Coloring(colors, k)
    report = check_fum(g, certificate, faces)
    if not report.ok:
        logger.error(f"Solver certificate failed the checker: {report.to_dict()}")
        raise RuntimeError("solver produced a certificate that is not a FUM-coloring")
    logger.info(f"FUM-{k}: satisfiable after {stats.nodes_expanded} nodes")
    return SolveOutcome(SolveStatus.SATISFIABLE, certificate, stats)


def fum_lower_bound(g: PlaneGraph) -> int:
    """
    Never exceeds chi_fum: the clique number (properness) and 2 whenever some
    face has two distinct vertices (one color would repeat the maximum).
    """
    bound = 1
    if g.num_edges:
        graph = nx.Graph(g.edges())
        bound = max(bound, max(len(clique) for clique in nx.find_cliques(graph)))
    if any(len(face.incident_vertices) >= 2 for face in fum_faces(g)):
        bound = max(bound, 2)
    return bound


def chi_fum(g: PlaneGraph, opts: Optional[SolveOptions] = None) -> Tuple[int, Coloring]:
    """Smallest k with a FUM-coloring, together with the canonical certificate."""
    if g.n == 0:
        raise ValueError("chi_fum is undefined for the empty graph")
    k = fum_lower_bound(g)
    while True:
        outcome = solve_fum(g, k, opts)
        if outcome.satisfiable:
            return k, outcome.certificate
        k += 1


# --- enumeration-based checks ---

def verify_gadget_forcing(
    h: GadgetHandle,
    k: int = 4,
    forced_color: Optional[int] = None,
    opts: Optional[SolveOptions] = None,
) -> GadgetReport:
    """
    Enumerates every proper coloring of h with palette 1..k in which each face
    other than the outer face has a unique maximum, and checks that each one
    puts forced_color (default k) on the outer cycle. The first coloring that
    does not is returned as the witness.
    """
    forced = k if forced_color is None else forced_color
    opts = opts or SolveOptions()
    outer_index = h.outer_face_index
    interior = [face for face in h.graph.census if face.index != outer_index]
    problem = _search_problem(h.graph, k, interior, opts.strong_pruning)
    outer_cycle = tuple(h.outer_cycle)

    examined = 0
    witness: List[Colors] = []

    def visit(colors: Colors) -> bool:
        nonlocal examined
        examined += 1
        if all(colors[v] != forced for v in outer_cycle):
            witness.append(colors)
            return True
        return False

    stats = enumerate_all(problem, visit, opts.node_budget, opts.time_budget)
    holds = not witness
    logger.info(f"Gadget forcing (k={h.k}, color {forced}): holds={holds} after {examined} colorings")
    return GadgetReport(
        holds=holds,
        colorings_examined=examined,
        witness=Coloring(witness[0], k) if witness else None,
        stats=stats,
    )


def outer_signatures(
    g: PlaneGraph,
    k: int = 4,
    opts: Optional[SolveOptions] = None,
) -> Set[Tuple[int, int]]:
    """
    (max color, multiplicity) of the designated outer face over every coloring
    of the connected graph g that is FUM on all its other faces.
    """
    opts = opts or SolveOptions()
    outer = [face for face in g.census if face.is_outer]
    if len(outer) != 1:
        raise ValueError(f"expected exactly one designated outer face, found {len(outer)}")
    outer_vertices = tuple(outer[0].incident_vertices)
    interior = [face for face in g.census if not face.is_outer]
    problem = _search_problem(g, k, interior, opts.strong_pruning)
    signatures: Set[Tuple[int, int]] = set()

    def visit(colors: Colors) -> bool:
        values = [colors[v] for v in outer_vertices]
        top = max(values)
        signatures.add((top, values.count(top)))
        return False

    enumerate_all(problem, visit, opts.node_budget, opts.time_budget)
    return signatures


def shared_region_admits_fum(signature_sets: Sequence[Set[Tuple[int, int]]]) -> bool:
    """
    Whether outer-face signatures of co-embedded components can be combined so
    the shared region has a unique maximum: the overall top color must come
    from exactly one component, where it appears once.
    """
    for choice in itertools.product(*signature_sets):
        top = max(sig[0] for sig in choice)
        holders = [sig for sig in choice if sig[0] == top]
        if len(holders) == 1 and holders[0][1] == 1:
            return True
    return False


def _enumeration_guard(g: PlaneGraph, limit: int) -> None:
    if g.n > limit:
        raise TooLargeForEnumeration(f"graph has {g.n} vertices; enumeration is limited to {limit}")


def verify_cover_condition(
    g: PlaneGraph,
    face_ids: Iterable[int],
    color: int = 4,
    limit: int = ENUMERATION_VERTEX_LIMIT,
) -> bool:
    """
    True iff every proper coloring of g with palette 1..color puts that color
    on some vertex incident to a face in face_ids.
    """
    _enumeration_guard(g, limit)
    census = g.census
    covered: Set[int] = set()
    for face_id in face_ids:
        if not 0 <= face_id < len(census):
            raise ValueError(f"graph has no face {face_id}")
        covered.update(census[face_id].incident_vertices)

    problem = SearchProblem.build(g.n, g.rotations, [], color)
    counterexample: List[Colors] = []
    examined = 0

    def visit(colors: Colors) -> bool:
        nonlocal examined
        examined += 1
        if not any(colors[v] == color for v in covered):
            counterexample.append(colors)
            return True
        return False

    enumerate_all(problem, visit, DEFAULT_NODE_BUDGET, DEFAULT_TIME_BUDGET)
    logger.info(f"Cover condition over {examined} proper colorings: {not counterexample}")
    return not counterexample


def _colorings(n: int, k: int) -> Iterable[Tuple[int, ...]]:
    return itertools.product(range(1, k + 1), repeat=n)


def brute_force_chi_fum(g: PlaneGraph, limit: int = BRUTE_FORCE_VERTEX_LIMIT) -> int:
    """
    Reference value by trying all k^n colorings for k = 1, 2, ...; no pruning.
    Only meant as an independent oracle for small graphs.
    """
    _enumeration_guard(g, limit)
    if g.n == 0:
        raise ValueError("chi_fum is undefined for the empty graph")
    edges = g.edges()
    faces = [tuple(face.incident_vertices) for face in fum_faces(g)]
    for k in range(1, g.n + 1):
        for colors in _colorings(g.n, k):
            if any(colors[u] == colors[v] for u, v in edges):
                continue
            if all(_unique_max(colors, face) for face in faces):
                return k
    raise RuntimeError("no FUM-coloring with n colors; face data is inconsistent")


def _unique_max(colors: Sequence[int], face: Sequence[int]) -> bool:
    values = [colors[v] for v in face]
    return values.count(max(values)) == 1


def brute_force_proper_chromatic(g: PlaneGraph, limit: int = BRUTE_FORCE_VERTEX_LIMIT) -> int:
    _enumeration_guard(g, limit)
    edges = g.edges()
    for k in range(1, max(g.n, 1) + 1):
        if any(all(colors[u] != colors[v] for u, v in edges) for colors in _colorings(g.n, k)):
            return k
    return 1


# --- coloring file format ---

_COLOR_LINE = re.compile(r"^v(\d+)\s+(-?\d+)$")


def parse_coloring(text: str, n: Optional[int] = None) -> Coloring:
    """
    Parses 'palette <k>' followed by one 'v<i> <color>' line per vertex.
    '#' starts a comment.
    """
    k: Optional[int] = None
    assigned: Dict[int, int] = {}
    last_line = 0
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        last_line = line_number
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if k is None:
            tokens = line.split()
            if len(tokens) != 2 or tokens[0] != "palette" or not tokens[1].isdigit():
                raise ColoringSyntaxError(line_number, "expected header 'palette <k>'")
            k = int(tokens[1])
            continue
        match = _COLOR_LINE.match(line)
        if not match:
            raise ColoringSyntaxError(line_number, f"expected 'v<i> <color>', got {line!r}")
        vertex, color = int(match.group(1)), int(match.group(2))
        if vertex in assigned:
            raise ColoringSyntaxError(line_number, f"v{vertex} colored twice")
        assigned[vertex] = color

    if k is None:
        raise ColoringSyntaxError(max(last_line, 1), "missing 'palette <k>' header")
    size = len(assigned) if n is None else n
    missing = [v for v in range(size) if v not in assigned]
    if missing:
        raise ColoringSizeMismatch(f"no color given for v{missing[0]}")
    extra = [v for v in assigned if v >= size]
    if extra:
        raise ColoringSizeMismatch(f"v{extra[0]} is outside the graph's {size} vertices")
    return Coloring(tuple(assigned[v] for v in range(size)), k)


def serialize_coloring(c: Coloring) -> str:
    lines = [f"palette {c.k}"] + [f"v{v} {color}" for v, color in enumerate(c.colors)]
    return "\n".join(lines) + "\n"
