"""
Exact backtracking search over colorings with face-local unique-maximum
constraints. Works on plain tuples so problems can be shipped to worker
processes.
"""
import itertools
import logging
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Colors = Tuple[int, ...]

# How often (in nodes) the wall clock is consulted.
_CLOCK_INTERVAL = 1024
# How many nodes a worker expands between charges to the shared budget.
_POOL_INTERVAL = 256


class ResourceLimitExceeded(RuntimeError):
    """The node or time budget ran out before the search could decide."""

    def __init__(self, message: str, stats: Optional["SearchStats"] = None):
        super().__init__(message)
        self.stats = stats


@dataclass
class SearchStats:
    nodes_expanded: int = 0
    prunes_by_properness: int = 0
    prunes_by_face_max: int = 0
    wall_time: float = 0.0

    def absorb(self, other: "SearchStats") -> None:
        self.nodes_expanded += other.nodes_expanded
        self.prunes_by_properness += other.prunes_by_properness
        self.prunes_by_face_max += other.prunes_by_face_max

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SearchProblem:
    """
    faces holds the vertex sets whose maximum must be unique. domains[v] lists
    the colors v may take, in the order they are tried.
    """

    n: int
    adjacency: Tuple[Tuple[int, ...], ...]
    faces: Tuple[Tuple[int, ...], ...]
    k: int
    order: Tuple[int, ...]
    domains: Tuple[Tuple[int, ...], ...]
    strong_pruning: bool = True

    @classmethod
    def build(
        cls,
        n: int,
        adjacency: Sequence[Sequence[int]],
        faces: Sequence[Sequence[int]],
        k: int,
        strong_pruning: bool = True,
    ) -> "SearchProblem":
        adjacency = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
        faces = tuple(tuple(sorted(set(face))) for face in faces)
        return cls(
            n=n,
            adjacency=adjacency,
            faces=faces,
            k=k,
            order=face_connected_order(n, adjacency, faces),
            domains=tuple(tuple(range(1, k + 1)) for _ in range(n)),
            strong_pruning=strong_pruning,
        )

    def restricted(self, prefix: Colors) -> "SearchProblem":
        """Pins the first len(prefix) vertices of the search order to the given colors."""
        domains = list(self.domains)
        for v, color in zip(self.order, prefix):
            domains[v] = (color,)
        return replace(self, domains=tuple(domains))


def face_connected_order(
    n: int,
    adjacency: Sequence[Sequence[int]],
    faces: Sequence[Sequence[int]],
) -> Tuple[int, ...]:
    """
    Orders vertices so each one after the first of its component shares a face
    (or an edge) with an earlier one; among candidates the one with most
    ordered neighbours wins, ties to the smaller index.
    """
    vertex_faces: List[List[int]] = [[] for _ in range(n)]
    for f, face in enumerate(faces):
        for v in face:
            vertex_faces[v].append(f)

    ordered: List[int] = []
    placed = [False] * n
    score = [0] * n
    frontier = set()
    while len(ordered) < n:
        if frontier:
            v = max(frontier, key=lambda w: (score[w], -w))
            frontier.discard(v)
        else:
            v = next(w for w in range(n) if not placed[w])
        ordered.append(v)
        placed[v] = True
        for u in adjacency[v]:
            score[u] += 1
            if not placed[u]:
                frontier.add(u)
        for f in vertex_faces[v]:
            for u in faces[f]:
                if not placed[u]:
                    frontier.add(u)
    return tuple(ordered)


class BacktrackingSearch:
    """
    Depth-first search in problem.order, colors tried in domain order.

    Pruning: an assignment clashing with a colored neighbour is rejected; a
    face whose last vertex gets colored must have a unique maximum. With
    strong_pruning, a face whose partial maximum already repeats is rejected as
    soon as no uncolored vertex on it can still take a larger color.
    """

    def __init__(
        self,
        problem: SearchProblem,
        node_budget: int,
        time_budget: float,
        deadline: Optional[float] = None,
        pool: Optional["SharedBudget"] = None,
    ):
        self.problem = problem
        self.node_budget = node_budget
        self.deadline = deadline if deadline is not None else time.monotonic() + time_budget
        self.pool = pool
        self.stats = SearchStats()
        self.colors = [0] * problem.n
        self.remaining = [len(face) for face in problem.faces]
        self.vertex_faces: List[List[int]] = [[] for _ in range(problem.n)]
        for f, face in enumerate(problem.faces):
            for v in face:
                self.vertex_faces[v].append(f)

    def run(self, visit: Callable[[Colors], bool]) -> bool:
        """
        Calls visit on every complete coloring in search order until it returns
        True. Returns whether visit stopped the search.
        """
        started = time.perf_counter()
        try:
            if self.problem.n == 0:
                return visit(())
            return self._descend(visit)
        finally:
            self.stats.wall_time = time.perf_counter() - started

    def _tick(self) -> None:
        nodes = self.stats.nodes_expanded
        if nodes > self.node_budget:
            raise ResourceLimitExceeded(f"node budget of {self.node_budget} exhausted", self.stats)
        if self.pool is not None and nodes % _POOL_INTERVAL == 0:
            self.pool.charge(_POOL_INTERVAL, self.stats)
        if nodes % _CLOCK_INTERVAL == 0 and time.monotonic() > self.deadline:
            raise ResourceLimitExceeded("time budget exhausted", self.stats)

    def _unassign(self, depth: int, touched: List[List[int]]) -> None:
        for f in touched[depth]:
            self.remaining[f] += 1
        touched[depth].clear()
        self.colors[self.problem.order[depth]] = 0

    def _descend(self, visit: Callable[[Colors], bool]) -> bool:
        """
        Iterative depth-first walk. next_choice[d] indexes the next color to try
        at depth d; touched[d] holds the faces whose counters the color at d
        decremented.
        """
        problem = self.problem
        n = problem.n
        colors = self.colors
        next_choice = [0] * n
        touched: List[List[int]] = [[] for _ in range(n)]
        depth = 0
        while depth >= 0:
            v = problem.order[depth]
            if colors[v]:
                self._unassign(depth, touched)
            domain = problem.domains[v]
            advanced = False
            while next_choice[depth] < len(domain):
                color = domain[next_choice[depth]]
                next_choice[depth] += 1
                if any(colors[u] == color for u in problem.adjacency[v]):
                    self.stats.prunes_by_properness += 1
                    continue

                colors[v] = color
                consistent = True
                for f in self.vertex_faces[v]:
                    self.remaining[f] -= 1
                    touched[depth].append(f)
                    if not self._face_consistent(f):
                        consistent = False
                        break
                if consistent:
                    self.stats.nodes_expanded += 1
                    self._tick()
                    advanced = True
                    break
                self.stats.prunes_by_face_max += 1
                self._unassign(depth, touched)

            if not advanced:
                next_choice[depth] = 0
                depth -= 1
            elif depth + 1 == n:
                if visit(tuple(colors)):
                    for d in range(depth, -1, -1):
                        self._unassign(d, touched)
                    return True
            else:
                depth += 1
        return False

    def _face_consistent(self, f: int) -> bool:
        colors = self.colors
        face = self.problem.faces[f]
        if self.remaining[f] == 0:
            top = max(colors[v] for v in face)
            return sum(1 for v in face if colors[v] == top) == 1
        if not self.problem.strong_pruning:
            return True

        top = 0
        count = 0
        for v in face:
            c = colors[v]
            if c > top:
                top, count = c, 1
            elif c == top and c:
                count += 1
        if count < 2:
            return True
        return any(self._can_exceed(w, top) for w in face if colors[w] == 0)

    def _can_exceed(self, w: int, top: int) -> bool:
        blocked = {self.colors[u] for u in self.problem.adjacency[w]}
        return any(c > top and c not in blocked for c in self.problem.domains[w])


def find_first(
    problem: SearchProblem,
    node_budget: int,
    time_budget: float,
    deadline: Optional[float] = None,
    pool: Optional["SharedBudget"] = None,
) -> Tuple[Optional[Colors], SearchStats]:
    """First complete coloring in search order, or None when the space is exhausted."""
    found: List[Colors] = []

    def visit(colors: Colors) -> bool:
        found.append(colors)
        return True

    search = BacktrackingSearch(problem, node_budget, time_budget, deadline=deadline, pool=pool)
    search.run(visit)
    return (found[0] if found else None), search.stats


class SharedBudget:
    """
    Node counter and stop flag shared by all workers of one parallel search.
    Workers charge it in chunks; once the total passes node_budget, or the
    parent sets stop, the next charge raises.
    """

    def __init__(self, counter, stop, node_budget: int):
        self.counter = counter
        self.stop = stop
        self.node_budget = node_budget

    def charge(self, nodes: int, stats: SearchStats) -> None:
        with self.counter.get_lock():
            self.counter.value += nodes
            spent = self.counter.value
        if self.stop.is_set():
            raise ResourceLimitExceeded("search stopped", stats)
        if spent > self.node_budget:
            raise ResourceLimitExceeded(f"shared node budget of {self.node_budget} exhausted", stats)


_worker_budget: Optional[SharedBudget] = None


def _init_worker(counter, stop, node_budget: int) -> None:
    global _worker_budget
    _worker_budget = SharedBudget(counter, stop, node_budget)


def _find_first_task(problem: SearchProblem, node_budget: int, deadline: float):
    try:
        colors, stats = find_first(problem, node_budget, 0.0, deadline=deadline, pool=_worker_budget)
        return ("found" if colors is not None else "exhausted"), colors, stats
    except ResourceLimitExceeded as e:
        return "limit", None, e.stats or SearchStats()


def _split_prefixes(problem: SearchProblem, workers: int) -> List[Colors]:
    depth = 0
    count = 1
    while depth < problem.n and count < 2 * workers:
        count *= len(problem.domains[problem.order[depth]])
        depth += 1
    pools = [problem.domains[v] for v in problem.order[:depth]]
    return list(itertools.product(*pools))


def find_first_parallel(
    problem: SearchProblem,
    node_budget: int,
    time_budget: float,
    workers: int,
) -> Tuple[Optional[Colors], SearchStats]:
    """
    Splits the tree on the first vertices of the search order and farms the
    subtrees out to processes. Subtrees are reduced in search order, so the
    returned coloring is the same one find_first would return.

    node_budget and time_budget bound the whole search: workers share one node
    counter and one absolute deadline, and the in-order total is checked again
    while reducing.
    """
    if workers <= 1 or problem.n == 0:
        return find_first(problem, node_budget, time_budget)

    deadline = time.monotonic() + time_budget
    prefixes = _split_prefixes(problem, workers)
    logger.info(f"Splitting search into {len(prefixes)} subtrees over {workers} workers")
    counter = multiprocessing.Value("q", 0)
    stop = multiprocessing.Event()
    total = SearchStats()
    executor = ProcessPoolExecutor(
        max_workers=workers,
        initializer=_init_worker,
        initargs=(counter, stop, node_budget),
    )
    try:
        futures = [
            executor.submit(_find_first_task, problem.restricted(prefix), node_budget, deadline)
            for prefix in prefixes
        ]
        for future in futures:
            status, colors, stats = future.result()
            total.absorb(stats)
            if status == "limit" or total.nodes_expanded > node_budget:
                raise ResourceLimitExceeded(f"node or time budget exhausted after {total.nodes_expanded} nodes", total)
            if status == "found":
                return colors, total
        return None, total
    finally:
        stop.set()
        executor.shutdown(wait=True, cancel_futures=True)


def enumerate_all(
    problem: SearchProblem,
    visit: Callable[[Colors], bool],
    node_budget: int,
    time_budget: float,
) -> SearchStats:
    """Runs visit over every complete coloring (until it returns True)."""
    search = BacktrackingSearch(problem, node_budget, time_budget)
    search.run(visit)
    return search.stats
