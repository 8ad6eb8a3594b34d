"""
The verify-paper claim suite: every statement about the counterexample family,
replayed by the library and collected into one report.
"""
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.config import CLAIM_TIME_BUDGETS, DEFAULT_K4_FACES, DEFAULT_NODE_BUDGET, DEFAULT_TIME_BUDGET, get_thread_count
from src.fum_core import (
    Coloring,
    CompoundFace,
    SolveOptions,
    SolveStatus,
    check_fum,
    fum_faces,
    outer_signatures,
    shared_region_admits_fum,
    solve_fum,
    verify_cover_condition,
    verify_gadget_forcing,
)
from src.generators import GadgetHandle, gen_fig1, gen_gadget, gen_k4, gen_k4_composite, remove_edge
from src.plane_graph import PlaneGraph, component_euler_characteristics, component_subgraph, euler_characteristic, max_degree
from src.sat_encoder import (
    assignment_from_coloring,
    branch_order_for,
    decode_model,
    dpll_solve,
    encode_fum,
    expected_clause_count,
    format_model,
    read_dimacs,
    read_model,
    write_dimacs,
)
from src.search import ResourceLimitExceeded, face_connected_order
from src.utils import Stopwatch

logger = logging.getLogger(__name__)


class ClaimStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    BUDGET_EXCEEDED = "budget-exceeded"
    ERROR = "error"


@dataclass(frozen=True)
class Evidence:
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ClaimResult:
    number: int
    id: str
    description: str
    anchor: str
    status: ClaimStatus
    evidence: str
    details: dict
    wall_time: float

    @property
    def passed(self) -> bool:
        return self.status is ClaimStatus.PASS

    def to_dict(self, include_times: bool = True) -> dict:
        data = {
            "number": self.number,
            "id": self.id,
            "description": self.description,
            "anchor": self.anchor,
            "status": self.status.value,
            "evidence": self.evidence,
            "details": self.details,
        }
        if include_times:
            data["wall_time"] = round(self.wall_time, 3)
        return data


@dataclass(frozen=True)
class VerificationReport:
    claims: Tuple[ClaimResult, ...]

    @property
    def overall(self) -> bool:
        return all(claim.passed for claim in self.claims)

    def to_dict(self, include_times: bool = True) -> dict:
        return {
            "overall": "pass" if self.overall else "fail",
            "claims": [claim.to_dict(include_times) for claim in self.claims],
        }

    def format_table(self) -> str:
        rows = [("#", "claim", "status", "time", "evidence")]
        for claim in self.claims:
            rows.append((
                str(claim.number),
                claim.id,
                claim.status.value,
                f"{claim.wall_time:.2f}s",
                claim.evidence,
            ))
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        lines = []
        for row in rows:
            cells = [row[i].ljust(widths[i]) for i in range(4)] + [row[4]]
            lines.append("  ".join(cells).rstrip())
        lines.append("")
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


@dataclass(frozen=True)
class VerifyOptions:
    """
    time_budget, when given, replaces every per-claim default from
    CLAIM_TIME_BUDGETS. only restricts the run to the listed claim ids.
    """

    node_budget: int = DEFAULT_NODE_BUDGET
    time_budget: Optional[float] = None
    strong_pruning: bool = True
    tamper_gadget: bool = False
    threads: Optional[int] = None
    only: Optional[Tuple[str, ...]] = None

    @property
    def workers(self) -> int:
        return self.threads if self.threads is not None else get_thread_count()

    def solve_options(self, claim_id: str, threads: int = 1) -> SolveOptions:
        seconds = self.time_budget
        if seconds is None:
            seconds = CLAIM_TIME_BUDGETS.get(claim_id, DEFAULT_TIME_BUDGET)
        return SolveOptions(
            strong_pruning=self.strong_pruning,
            node_budget=self.node_budget,
            time_budget=seconds,
            threads=threads,
        )


@dataclass(frozen=True)
class ForcingChainReport:
    k: int
    holds: bool
    strip: Tuple[str, ...]
    chains: Tuple[Tuple[int, ...], ...]
    failure: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "holds": self.holds,
            "strip": list(self.strip),
            "chains": [list(chain) for chain in self.chains],
            "failure": self.failure,
        }


def proof_forcing_chain(h: GadgetHandle) -> ForcingChainReport:
    """
    Replays the hand argument for the gadget: with the outer cycle free of
    color 4 and b_{3k+1} the only vertex that may carry it, the strip
    a_1 b_1 a_2 ... b_{3k} a_{3k+1} is a chain of triangles, so colors x, y, z
    on a_1, b_1, a_2 force the rest periodically and a_{3k+1} repeats the color
    of its neighbour a_1. Checked for every permutation of {1, 2, 3}.
    """
    g = h.graph
    m = len(h.outer_cycle)
    strip: List[int] = []
    for i in range(m - 1):
        strip.extend((h.outer_cycle[i], h.inner_cycle[i]))
    strip.append(h.outer_cycle[m - 1])
    names = tuple(g.label_of(v) for v in strip)

    for u, v, w in zip(strip, strip[1:], strip[2:]):
        if not (g.has_edge(u, v) and g.has_edge(v, w) and g.has_edge(u, w)):
            failure = f"{g.label_of(u)} {g.label_of(v)} {g.label_of(w)} is not a triangle"
            return ForcingChainReport(h.k, False, names, (), failure)
    if not g.has_edge(strip[-1], strip[0]):
        failure = f"{names[-1]} is not adjacent to {names[0]}"
        return ForcingChainReport(h.k, False, names, (), failure)

    chains = []
    for start in itertools.permutations((1, 2, 3)):
        colors = list(start)
        for i in range(3, len(strip)):
            (forced,) = {1, 2, 3} - {colors[i - 1], colors[i - 2]}
            colors.append(forced)
        chains.append(tuple(colors))
        if colors[-1] != colors[0]:
            failure = f"start {start}: {names[-1]} gets {colors[-1]}, {names[0]} has {colors[0]}"
            return ForcingChainReport(h.k, False, names, tuple(chains), failure)
    return ForcingChainReport(h.k, True, names, tuple(chains))


# --- claims ---

def _labelled(g: PlaneGraph, c: Coloring) -> Dict[str, int]:
    return {g.label_of(v): color for v, color in enumerate(c.colors)}


def _gadget(k: int, options: VerifyOptions) -> GadgetHandle:
    h = gen_gadget(k)
    if not options.tamper_gadget:
        return h
    a1, b1 = h.outer_cycle[0], h.inner_cycle[0]
    logger.warning(f"Tampering with H_{k}: removing spoke a1-b1")
    return replace(h, graph=remove_edge(h.graph, a1, b1))


def _claim_gadget_census(options: VerifyOptions, opts: SolveOptions) -> Evidence:
    g = gen_gadget(1).graph
    counts = dict(g.census.counts_by_length)
    details = {
        "V": g.n,
        "E": g.num_edges,
        "F": len(g.census),
        "faces_by_length": {str(length): count for length, count in counts.items()},
        "euler": euler_characteristic(g),
    }
    passed = g.n == 8 and g.num_edges == 16 and len(g.census) == 10 and counts == {3: 8, 4: 2}
    passed = passed and details["euler"] == 2
    return Evidence(passed, f"V={g.n} E={g.num_edges} F={len(g.census)}, {g.census.summary()}", details)


def _gadget_forcing(k: int) -> Callable[[VerifyOptions, SolveOptions], Evidence]:
    def check(options: VerifyOptions, opts: SolveOptions) -> Evidence:
        h = _gadget(k, options)
        report = verify_gadget_forcing(h, 4, opts=opts)
        details = report.to_dict()
        if report.holds:
            summary = f"{report.colorings_examined} interior-FUM 4-colorings, each puts 4 on the outer cycle"
        else:
            details["witness_by_label"] = _labelled(h.graph, report.witness)
            summary = f"witness avoids 4 on the outer cycle: {details['witness_by_label']}"
        return Evidence(report.holds, summary, details)

    return check


def _solve_claim(build: Callable[[], PlaneGraph], k: int, expected: SolveStatus):
    def check(options: VerifyOptions, opts: SolveOptions) -> Evidence:
        g = build()
        outcome = solve_fum(g, k, opts)
        details = outcome.to_dict()
        summary = f"{outcome.status.value} at k={k} after {outcome.stats.nodes_expanded} nodes"
        passed = outcome.status is expected
        if outcome.certificate is not None:
            report = check_fum(g, outcome.certificate)
            details["certificate_by_label"] = _labelled(g, outcome.certificate)
            details["certificate_check"] = report.to_dict()
            passed = passed and report.ok
        return Evidence(passed, summary, details)

    return check


def _split_fig1() -> PlaneGraph:
    g = gen_fig1()
    return remove_edge(g, g.vertex_by_label("a4"), g.vertex_by_label("a2'"))


def _claim_degree_facts(options: VerifyOptions, opts: SolveOptions) -> Evidence:
    g = gen_fig1()
    split = _split_fig1()
    component_degrees = [max(split.degree(v) for v in component) for component in split.components]
    details = {
        "fig1_max_degree": max_degree(g),
        "components_after_removal": len(split.components),
        "component_max_degrees": component_degrees,
        "component_euler": component_euler_characteristics(split),
    }
    passed = (
        max_degree(g) == 5
        and len(split.components) == 2
        and component_degrees == [4, 4]
        and details["component_euler"] == [2, 2]
    )
    summary = f"max degree {max_degree(g)}; after removing a4-a2': components of max degree {component_degrees}"
    return Evidence(passed, summary, details)


def _claim_disconnected(options: VerifyOptions, opts: SolveOptions) -> Evidence:
    split = _split_fig1()
    components = [component_subgraph(split, i) for i in range(len(split.components))]
    signatures = [outer_signatures(component, 4, opts) for component in components]
    combinable = shared_region_admits_fum(signatures)
    outcome = solve_fum(split, 4, opts)
    shared = [face.key for face in fum_faces(split) if isinstance(face, CompoundFace)]
    details = {
        "outer_signatures": [sorted(list(sig) for sig in sigs) for sigs in signatures],
        "shared_region_admits_fum": combinable,
        "shared_region": shared,
        "solve": outcome.to_dict(),
    }
    passed = not combinable and outcome.status is SolveStatus.EXHAUSTED
    summary = (
        f"outer signatures {details['outer_signatures']} never combine; "
        f"direct search {outcome.status.value}"
    )
    return Evidence(passed, summary, details)


def _claim_cover_condition(options: VerifyOptions, opts: SolveOptions) -> Evidence:
    holds = verify_cover_condition(gen_k4(), DEFAULT_K4_FACES, 4)
    faces = ", ".join(f"f{f}" for f in DEFAULT_K4_FACES)
    summary = f"every proper 4-coloring of K4 puts 4 on {faces}" if holds else f"some proper 4-coloring avoids {faces}"
    return Evidence(holds, summary, {"faces": list(DEFAULT_K4_FACES), "holds": holds})


def _fig1_sat(k: int, opts: SolveOptions) -> Tuple[dict, bool, Optional[Coloring]]:
    g = gen_fig1()
    formula = encode_fum(g, k)
    faces = fum_faces(g)
    expected_vars = (g.n + len(faces)) * k
    expected_clauses = expected_clause_count(
        g.n, g.num_edges, [len(face.incident_vertices) for face in faces], k
    )
    num_vars, clauses = read_dimacs(write_dimacs(formula))

    order = face_connected_order(g.n, g.rotations, [tuple(face.incident_vertices) for face in faces])
    model = dpll_solve(
        formula,
        decision_budget=opts.node_budget,
        time_budget=opts.time_budget,
        branch_order=branch_order_for(formula, order),
    )
    decoded = decode_model(formula, model) if model is not None else None
    details = {
        "vars": formula.num_vars,
        "clauses": formula.num_clauses,
        "expected_vars": expected_vars,
        "expected_clauses": expected_clauses,
        "dimacs_round_trip": [num_vars, len(clauses)],
        "dpll": "SAT" if model is not None else "UNSAT",
    }
    counts_ok = (
        formula.num_vars == expected_vars
        and formula.num_clauses == expected_clauses
        and (num_vars, len(clauses)) == (formula.num_vars, formula.num_clauses)
    )
    return details, counts_ok, decoded


def _claim_sat_cross_check(options: VerifyOptions, opts: SolveOptions) -> Evidence:
    at4, counts4, decoded4 = _fig1_sat(4, opts)
    at5, counts5, decoded5 = _fig1_sat(5, opts)

    g = gen_fig1()
    certificate = solve_fum(g, 5, opts).certificate
    if certificate is None:
        return Evidence(False, "search found no 5-coloring to replay as a model", {"k4": at4, "k5": at5})
    formula = encode_fum(g, 5)
    external = format_model(assignment_from_coloring(formula, certificate))
    replayed = decode_model(formula, read_model(external, formula.num_vars))

    passed = (
        counts4 and counts5
        and decoded4 is None
        and decoded5 is not None and check_fum(g, decoded5).ok
        and replayed == certificate
    )
    details = {"k4": at4, "k5": at5, "certificate_model_round_trip": replayed == certificate}
    summary = (
        f"k=4: {at4['vars']} vars, {at4['clauses']} clauses, {at4['dpll']}; "
        f"k=5: {at5['vars']} vars, {at5['clauses']} clauses, {at5['dpll']}"
    )
    return Evidence(passed, summary, details)


def _claim_forcing_chain(options: VerifyOptions, opts: SolveOptions) -> Evidence:
    reports = [proof_forcing_chain(_gadget(k, options)) for k in (1, 2)]
    passed = all(report.holds for report in reports)
    failures = [f"H_{r.k}: {r.failure}" for r in reports if not r.holds]
    summary = "a_{3k+1} repeats a_1 for all 6 starts, k=1,2" if passed else "; ".join(failures)
    return Evidence(passed, summary, {"replays": [report.to_dict() for report in reports]})


@dataclass(frozen=True)
class Claim:
    id: str
    description: str
    anchor: str
    check: Callable[[VerifyOptions, SolveOptions], Evidence]


_FORCING_ANCHOR = (
    "every coloring of H by colors {1,2,3,4}, where every interior face has a "
    "unique-maximum color, has a vertex in the outer face colored by 4"
)

CLAIMS: Tuple[Claim, ...] = (
    Claim(
        "gadget-census-k1",
        "H_1 has 8 vertices, 16 edges, 8 triangles and two 4-cycles",
        "We construct a graph H_k on 6k + 2 vertices",
        _claim_gadget_census,
    ),
    Claim("gadget-forcing-k1", "H_1 forces color 4 onto its outer cycle", _FORCING_ANCHOR, _gadget_forcing(1)),
    Claim("gadget-forcing-k2", "H_2 forces color 4 onto its outer cycle", _FORCING_ANCHOR, _gadget_forcing(2)),
    Claim(
        "fig1-no-4-coloring",
        "fig1 has no FUM-coloring with colors 1..4",
        "There exists a plane graph G with chi_fum(G) > 4",
        _solve_claim(gen_fig1, 4, SolveStatus.EXHAUSTED),
    ),
    Claim(
        "fig1-5-coloring",
        "fig1 has a FUM-coloring with colors 1..5",
        "facial unique-maximum chromatic number of the sphere is five",
        _solve_claim(gen_fig1, 5, SolveStatus.SATISFIABLE),
    ),
    Claim(
        "degree-facts",
        "fig1 has maximum degree 5; without a4-a2' both components have maximum degree 4",
        "Notice that we constructed a counterexample of maximum degree five",
        _claim_degree_facts,
    ),
    Claim(
        "disconnected-no-4-coloring",
        "fig1 without a4-a2' has no FUM-coloring with colors 1..4",
        "a disconnected graph with maximum degree 4 that does not have a FUM-coloring with colors in {1, 2, 3, 4}",
        _claim_disconnected,
    ),
    Claim(
        "k4-cover-condition",
        "every proper 4-coloring of K4 puts color 4 on one of the default faces",
        "there is at least one face in K incident with a vertex of G colored by 4",
        _claim_cover_condition,
    ),
    Claim(
        "k4-composite-no-4-coloring",
        "K4 with H_1 in the default faces has no FUM-coloring with colors 1..4",
        "embedding copies of members of H inside the faces of any 4-chromatic graph G",
        _solve_claim(gen_k4_composite, 4, SolveStatus.EXHAUSTED),
    ),
    Claim(
        "sat-cross-check",
        "CNF encodings of fig1 agree with the search at k=4 and k=5",
        "every face has a unique vertex colored with a maximal color",
        _claim_sat_cross_check,
    ),
    Claim(
        "forcing-chain-replay",
        "the triangle strip of H_1 and H_2 forces a_{3k+1} to clash with a_1",
        "This forces b_2 to be colored with x, a_3 to be colored with y, and b_3 to be colored with z",
        _claim_forcing_chain,
    ),
)

CLAIMS_BY_ID: Dict[str, Tuple[int, Claim]] = {claim.id: (i, claim) for i, claim in enumerate(CLAIMS, start=1)}


def run_claim(claim_id: str, options: VerifyOptions, search_threads: int = 1) -> ClaimResult:
    """Runs one claim; failures of any kind become the claim's status, never an exception."""
    number, claim = CLAIMS_BY_ID[claim_id]
    opts = options.solve_options(claim_id, search_threads)
    logger.info(f"Claim {number} ({claim_id}) started")
    details: dict = {}
    with Stopwatch() as watch:
        try:
            evidence = claim.check(options, opts)
            status = ClaimStatus.PASS if evidence.passed else ClaimStatus.FAIL
            summary, details = evidence.summary, evidence.details
        except ResourceLimitExceeded as e:
            status, summary = ClaimStatus.BUDGET_EXCEEDED, str(e)
            if e.stats is not None:
                details = {"stats": e.stats.to_dict()}
        except Exception as e:
            logger.error(f"Claim {claim_id} raised: {e}")
            status, summary = ClaimStatus.ERROR, f"{type(e).__name__}: {e}"
    logger.info(f"Claim {number} ({claim_id}) finished: {status.value} in {watch.elapsed:.2f}s")
    return ClaimResult(
        number=number,
        id=claim.id,
        description=claim.description,
        anchor=claim.anchor,
        status=status,
        evidence=summary,
        details=details,
        wall_time=watch.elapsed,
    )


def run_verification(options: Optional[VerifyOptions] = None) -> VerificationReport:
    """
    Runs the selected claims. With more than one worker the claims run in
    separate processes (each search single-threaded); the report is ordered by
    claim number either way.
    """
    options = options or VerifyOptions()
    if options.only is not None:
        unknown = sorted(set(options.only) - set(CLAIMS_BY_ID))
        if unknown:
            raise ValueError(f"unknown claim ids: {', '.join(unknown)}")
    selected: Sequence[str] = [
        claim.id for claim in CLAIMS if options.only is None or claim.id in options.only
    ]

    workers = options.workers
    if workers <= 1 or len(selected) <= 1:
        results = [run_claim(claim_id, options, search_threads=workers) for claim_id in selected]
    else:
        logger.info(f"Running {len(selected)} claims over {workers} worker processes")
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_claim, selected, itertools.repeat(options)))

    report = VerificationReport(tuple(results))
    logger.info(f"verify-paper overall: {'pass' if report.overall else 'fail'}")
    return report
