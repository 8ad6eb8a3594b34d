"""
CNF encoding of "g has a FUM-coloring with palette 1..k", DIMACS export, and
decoding of models produced by external solvers.

Variables: x(v, c) = v*k + c says vertex v has color c; m(f, c) = n*k + f*k + c
says the maximum color on face f is c. Faces are numbered as in
fum_core.fum_faces. At-most-one constraints are pairwise.
"""
import itertools
import logging
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from src.config import DEFAULT_NODE_BUDGET, DEFAULT_TIME_BUDGET, SAT_EXHAUSTIVE_VAR_LIMIT
from src.fum_core import Coloring, check_fum, fum_faces
from src.plane_graph import PlaneGraph
from src.search import ResourceLimitExceeded

logger = logging.getLogger(__name__)

Clause = Tuple[int, ...]
Assignment = Dict[int, bool]


class ModelError(ValueError):
    pass


class ModelParseError(ModelError):
    pass


class IncompleteModel(ModelError):
    pass


class NotAModel(ModelError):
    pass


class AmbiguousVertexColor(ModelError):
    pass


class DimacsParseError(ValueError):
    pass


@dataclass(frozen=True)
class VarMap:
    n: int
    num_faces: int
    k: int

    def x(self, v: int, c: int) -> int:
        return v * self.k + c

    def m(self, f: int, c: int) -> int:
        return self.n * self.k + f * self.k + c

    @property
    def total_vars(self) -> int:
        return (self.n + self.num_faces) * self.k

    def decode(self, var: int) -> Tuple[str, int, int]:
        """Inverse of x and m: ('x', v, c) or ('m', f, c)."""
        if not 1 <= var <= self.total_vars:
            raise KeyError(f"variable {var} is outside 1..{self.total_vars}")
        index, color = divmod(var - 1, self.k)
        if index < self.n:
            return "x", index, color + 1
        return "m", index - self.n, color + 1


@dataclass(frozen=True)
class CnfFormula:
    clauses: Tuple[Clause, ...]
    var_map: VarMap
    comments: Tuple[str, ...] = ()
    face_vertices: Tuple[FrozenSet[int], ...] = ()
    graph: Optional[PlaneGraph] = field(default=None, compare=False, repr=False)

    @property
    def num_vars(self) -> int:
        return self.var_map.total_vars

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


def expected_clause_count(n: int, num_edges: int, face_sizes: Sequence[int], k: int) -> int:
    """Closed form for the size of encode_fum's output."""
    pairs = k * (k - 1) // 2
    total = n + n * pairs + num_edges * k
    for d in face_sizes:
        total += 1 + pairs + d * pairs + k + k * (d * (d - 1) // 2)
    return total


def encode_fum(g: PlaneGraph, k: int) -> CnfFormula:
    if k < 1:
        raise ValueError(f"palette size must be at least 1, got {k}")
    faces = fum_faces(g)
    var_map = VarMap(n=g.n, num_faces=len(faces), k=k)
    x, m = var_map.x, var_map.m
    colors = range(1, k + 1)
    clauses: List[Clause] = []

    for v in range(g.n):
        clauses.append(tuple(x(v, c) for c in colors))
    for v in range(g.n):
        for c, d in itertools.combinations(colors, 2):
            clauses.append((-x(v, c), -x(v, d)))
    for u, v in g.edges():
        for c in colors:
            clauses.append((-x(u, c), -x(v, c)))

    for f, face in enumerate(faces):
        members = sorted(face.incident_vertices)
        clauses.append(tuple(m(f, c) for c in colors))
        for c, d in itertools.combinations(colors, 2):
            clauses.append((-m(f, c), -m(f, d)))
        for c in colors:
            for v in members:
                for higher in range(c + 1, k + 1):
                    clauses.append((-m(f, c), -x(v, higher)))
        for c in colors:
            clauses.append((-m(f, c),) + tuple(x(v, c) for v in members))
        for c in colors:
            for u, v in itertools.combinations(members, 2):
                clauses.append((-m(f, c), -x(u, c), -x(v, c)))

    comments = [
        "fumlab FUM encoding",
        f"V={g.n} E={g.num_edges} F={len(faces)} palette={k}",
        "x(v,c) = v*k + c ; m(f,c) = n*k + f*k + c",
    ]
    comments.extend(f"x {x(v, c)} v{v} {c}" for v in range(g.n) for c in colors)
    comments.extend(f"m {m(f, c)} {face.key} {c}" for f, face in enumerate(faces) for c in colors)

    formula = CnfFormula(
        clauses=tuple(clauses),
        var_map=var_map,
        comments=tuple(comments),
        face_vertices=tuple(frozenset(face.incident_vertices) for face in faces),
        graph=g,
    )
    logger.info(f"Encoded FUM-{k}: {formula.num_vars} vars, {formula.num_clauses} clauses")
    return formula


# --- DIMACS ---

def write_dimacs(f: CnfFormula) -> str:
    lines = [f"c {comment}" for comment in f.comments]
    lines.append(f"p cnf {f.num_vars} {f.num_clauses}")
    lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in f.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(text: str) -> Tuple[int, List[Clause]]:
    """Parses a DIMACS CNF document into (variable count, clauses)."""
    header: Optional[Tuple[int, int]] = None
    clauses: List[Clause] = []
    pending: List[int] = []
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            tokens = line.split()
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise DimacsParseError(f"line {line_number}: malformed header {line!r}")
            header = (int(tokens[2]), int(tokens[3]))
            continue
        if header is None:
            raise DimacsParseError(f"line {line_number}: clause before 'p cnf' header")
        for token in line.split():
            lit = int(token)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if header is None:
        raise DimacsParseError("missing 'p cnf' header")
    if pending:
        raise DimacsParseError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise DimacsParseError(f"header announces {header[1]} clauses, found {len(clauses)}")
    return header[0], clauses


def read_model(text: str, num_vars: Optional[int] = None) -> Assignment:
    """
    Reads a model either as solver output ('s SATISFIABLE' plus 'v' lines) or
    as bare signed literals. A 0 ends the model.
    """
    assignment: Assignment = {}
    finished = False
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("c") or finished:
            continue
        if line.startswith("s"):
            status = line[1:].strip().upper()
            if status != "SATISFIABLE":
                raise ModelParseError(f"line {line_number}: solver reported {status or 'no status'}")
            continue
        if line.startswith("v"):
            line = line[1:]
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise ModelParseError(f"line {line_number}: {token!r} is not a literal") from None
            if lit == 0:
                finished = True
                break
            var = abs(lit)
            if num_vars is not None and var > num_vars:
                raise ModelParseError(f"line {line_number}: variable {var} exceeds {num_vars}")
            if assignment.get(var, lit > 0) != (lit > 0):
                raise ModelParseError(f"line {line_number}: variable {var} assigned both ways")
            assignment[var] = lit > 0
    if num_vars is not None:
        missing = [v for v in range(1, num_vars + 1) if v not in assignment]
        if missing:
            raise IncompleteModel(f"{len(missing)} variables unassigned, first is {missing[0]}")
    return assignment


def format_model(assignment: Assignment) -> str:
    literals = [str(var if value else -var) for var, value in sorted(assignment.items())]
    return "s SATISFIABLE\nv " + " ".join(literals) + " 0\n"


def _clause_satisfied(clause: Clause, assignment: Assignment) -> bool:
    return any(assignment[abs(lit)] == (lit > 0) for lit in clause)


def decode_model(f: CnfFormula, assignment: Assignment) -> Coloring:
    """
    Turns a satisfying assignment back into a coloring and checks that the m
    variables name the real face maxima.
    """
    var_map = f.var_map
    missing = [v for v in range(1, f.num_vars + 1) if v not in assignment]
    if missing:
        raise IncompleteModel(f"{len(missing)} variables unassigned, first is {missing[0]}")

    colors = []
    for v in range(var_map.n):
        chosen = [c for c in range(1, var_map.k + 1) if assignment[var_map.x(v, c)]]
        if len(chosen) != 1:
            raise AmbiguousVertexColor(f"v{v} has {len(chosen)} true color variables: {chosen}")
        colors.append(chosen[0])

    for clause in f.clauses:
        if not _clause_satisfied(clause, assignment):
            raise NotAModel(f"clause {list(clause)} is falsified")

    coloring = Coloring(tuple(colors), var_map.k)
    for face_index, vertices in enumerate(f.face_vertices):
        actual = max(coloring[v] for v in vertices)
        claimed = [c for c in range(1, var_map.k + 1) if assignment[var_map.m(face_index, c)]]
        if claimed != [actual]:
            raise NotAModel(f"face {face_index}: model claims maximum {claimed}, coloring has {actual}")

    if f.graph is not None:
        report = check_fum(f.graph, coloring)
        if not report.ok:
            raise NotAModel(f"decoded coloring fails the FUM check: {report.to_dict()}")
    return coloring


def assignment_from_coloring(f: CnfFormula, coloring: Coloring) -> Assignment:
    """The model of f that corresponds to a given coloring."""
    var_map = f.var_map
    assignment: Assignment = {}
    for v in range(var_map.n):
        for c in range(1, var_map.k + 1):
            assignment[var_map.x(v, c)] = coloring[v] == c
    for face_index, vertices in enumerate(f.face_vertices):
        top = max(coloring[v] for v in vertices)
        for c in range(1, var_map.k + 1):
            assignment[var_map.m(face_index, c)] = c == top
    return assignment


# --- internal complete checkers ---

def exhaustive_solve(f: CnfFormula, limit: int = SAT_EXHAUSTIVE_VAR_LIMIT) -> Optional[Assignment]:
    """Truth-table search; only for formulas with at most limit variables."""
    if f.num_vars > limit:
        raise ValueError(f"formula has {f.num_vars} variables; exhaustive search is limited to {limit}")
    variables = range(1, f.num_vars + 1)
    for values in itertools.product((False, True), repeat=f.num_vars):
        assignment = dict(zip(variables, values))
        if all(_clause_satisfied(clause, assignment) for clause in f.clauses):
            return assignment
    return None


class _Dpll:
    def __init__(
        self,
        num_vars: int,
        clauses: Sequence[Clause],
        decision_budget: int,
        time_budget: float,
        branch_order: Sequence[int],
    ):
        self.num_vars = num_vars
        self.clauses = clauses
        self.decision_budget = decision_budget
        self.deadline = time.monotonic() + time_budget
        self.branch_order = branch_order
        self.decisions = 0
        self.value: List[Optional[bool]] = [None] * (num_vars + 1)
        self.trail: List[int] = []
        self.occurs: Dict[int, List[int]] = defaultdict(list)
        for index, clause in enumerate(clauses):
            for lit in clause:
                self.occurs[lit].append(index)

    def _lit_value(self, lit: int) -> Optional[bool]:
        value = self.value[abs(lit)]
        if value is None:
            return None
        return value if lit > 0 else not value

    def _assign(self, lit: int, queue: List[int]) -> None:
        self.value[abs(lit)] = lit > 0
        self.trail.append(abs(lit))
        queue.append(lit)

    def _propagate(self, queue: List[int]) -> bool:
        while queue:
            lit = queue.pop()
            for index in self.occurs[-lit]:
                free = None
                free_count = 0
                satisfied = False
                for other in self.clauses[index]:
                    value = self._lit_value(other)
                    if value is True:
                        satisfied = True
                        break
                    if value is None:
                        free_count += 1
                        free = other
                if satisfied:
                    continue
                if free_count == 0:
                    return False
                if free_count == 1:
                    self._assign(free, queue)
        return True

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.value[self.trail.pop()] = None

    def solve(self) -> Optional[Assignment]:
        queue: List[int] = []
        for clause in self.clauses:
            if not clause:
                return None
            if len(clause) == 1:
                value = self._lit_value(clause[0])
                if value is False:
                    return None
                if value is None:
                    self._assign(clause[0], queue)
        if not self._propagate(queue):
            return None
        if not self._search():
            return None
        return {var: bool(self.value[var]) for var in range(1, self.num_vars + 1)}

    def _next_unassigned(self) -> Optional[int]:
        return next((v for v in self.branch_order if self.value[v] is None), None)

    def _decide(self) -> None:
        self.decisions += 1
        if self.decisions > self.decision_budget:
            raise ResourceLimitExceeded(f"DPLL decision budget of {self.decision_budget} exhausted")
        if self.decisions % 1024 == 0 and time.monotonic() > self.deadline:
            raise ResourceLimitExceeded("DPLL time budget exhausted")

    def _search(self) -> bool:
        """
        Iterative branching. A frame is [var, mark, tried]: mark is the trail
        length before var was decided, tried counts the polarities used so far.
        """
        var = self._next_unassigned()
        if var is None:
            return True
        frames = [[var, len(self.trail), 0]]
        while frames:
            frame = frames[-1]
            var, mark, tried = frame
            if tried:
                self._undo(mark)
            if tried == 2:
                frames.pop()
                continue
            frame[2] += 1
            self._decide()
            queue: List[int] = []
            self._assign(var if tried == 0 else -var, queue)
            if not self._propagate(queue):
                continue
            var = self._next_unassigned()
            if var is None:
                return True
            frames.append([var, len(self.trail), 0])
        return False


def branch_order_for(f: CnfFormula, vertex_order: Sequence[int]) -> List[int]:
    """x variables vertex by vertex in vertex_order, colors ascending, then the m variables."""
    var_map = f.var_map
    order = [var_map.x(v, c) for v in vertex_order for c in range(1, var_map.k + 1)]
    order.extend(range(var_map.n * var_map.k + 1, f.num_vars + 1))
    return order


def dpll_solve(
    f: CnfFormula,
    decision_budget: int = DEFAULT_NODE_BUDGET,
    time_budget: float = DEFAULT_TIME_BUDGET,
    branch_order: Optional[Sequence[int]] = None,
) -> Optional[Assignment]:
    """
    Complete DPLL with unit propagation, sized for desk-scale formulas.
    Returns a satisfying assignment or None when the formula is unsatisfiable.
    Variables are decided in branch_order (default: by index), true first.
    """
    if branch_order is None:
        branch_order = range(1, f.num_vars + 1)
    elif sorted(branch_order) != list(range(1, f.num_vars + 1)):
        raise ValueError("branch_order must list every variable exactly once")
    return _Dpll(f.num_vars, f.clauses, decision_budget, time_budget, branch_order).solve()
