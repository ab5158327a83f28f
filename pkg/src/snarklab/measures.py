"""Uncolourability measures: oddness, resistance, density, cyclic
edge-connectivity, and the inequality auditor tying them to defect."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import colouring, matchings
from .colouring import Budget, _as_budget
from .matchings import PerfectMatching, ThreeArray
from .multipole import (
    MaxflowSolver,
    Multipole,
    MultipoleError,
    bipartition,
    connected,
    delete_edges,
    girth,
    is_bridgeless,
    min_edge_cut,
)


# ---------------------------------------------------------------------------
# oddness


def two_factor_components(g: Multipole, pm: PerfectMatching) -> list[tuple[int, ...]]:
    """Circuits of the 2-factor complementary to a perfect matching."""
    pm_set = set(pm)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for e, (a, b) in enumerate(g.edges):
        if e in pm_set:
            continue
        adj[a].append((e, b))
        adj[b].append((e, a))
    comps = []
    seen = [False] * g.n
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        stack = [s]
        while stack:
            v = stack.pop()
            for _e, w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
    return comps


def odd_circuit_count(g: Multipole, pm: PerfectMatching) -> int:
    return sum(1 for c in two_factor_components(g, pm) if len(c) % 2)


@dataclass(frozen=True)
class OddnessResult:
    value: int
    witness_matching: PerfectMatching
    witness_two_factor: tuple[int, ...]


def oddness(
    g: Multipole, pms: Optional[list[PerfectMatching]] = None, budget=None
) -> OddnessResult:
    """Minimum number of odd circuits in a 2-factor, by sweeping the
    complementary perfect matchings; canonical first minimiser wins."""
    if not g.is_cubic_graph():
        raise MultipoleError("oddness is defined for cubic graphs")
    if not is_bridgeless(g):
        raise MultipoleError("oddness is defined for bridgeless cubic graphs")
    if pms is None:
        pms = matchings.enumerate_perfect_matchings(g, budget=budget)
    best = None
    best_pm = None
    for pm in pms:
        c = odd_circuit_count(g, pm)
        if best is None or c < best:
            best, best_pm = c, pm
            if c == 0:
                break
    if best is None:
        raise MultipoleError("no 2-factor: graph has no perfect matching")
    factor = tuple(e for e in range(g.num_edges) if e not in set(best_pm))
    return OddnessResult(best, best_pm, factor)


# ---------------------------------------------------------------------------
# resistance


@dataclass(frozen=True)
class ResistanceResult:
    value: int
    witness_edges: tuple[int, ...]


def resistance(g: Multipole, budget=None, max_k: Optional[int] = None) -> ResistanceResult:
    """Fewest edges whose removal leaves a 3-edge-colourable graph.

    Subsets are tried by increasing size in lexicographic order, so the
    witness is canonical.
    """
    if not g.is_cubic():
        raise MultipoleError("resistance is defined for cubic multipoles")
    bud = _as_budget(budget)
    limit = max_k if max_k is not None else g.num_edges
    for k in range(0, limit + 1):
        for subset in itertools.combinations(range(g.num_edges), k):
            rest = delete_edges(g, subset).multipole if subset else g
            if colouring.is_colourable(rest, budget=bud):
                return ResistanceResult(k, tuple(subset))
    raise MultipoleError("resistance exceeds requested bound")


# ---------------------------------------------------------------------------
# density


@dataclass(frozen=True)
class DensityResult:
    value: int
    witness_pair: tuple[PerfectMatching, PerfectMatching]


def density(
    g: Multipole, pms: Optional[list[PerfectMatching]] = None, budget=None
) -> DensityResult:
    """Minimum intersection of two perfect matchings.

    The minimum runs over all pairs including equal ones; an equal pair
    has intersection n/2, so it is never a strict minimiser when the
    graph has two distinct perfect matchings.
    """
    if pms is None:
        pms = matchings.enumerate_perfect_matchings(g, budget=budget)
    if not pms:
        raise MultipoleError("density is undefined without a perfect matching")
    masks = [matchings._mask(pm) for pm in pms]
    best = None
    best_pair = None
    P = len(pms)
    for i in range(P):
        for j in range(i, P):
            val = (masks[i] & masks[j]).bit_count()
            if best is None or val < best:
                best, best_pair = val, (pms[i], pms[j])
                if val == 0:
                    return DensityResult(best, best_pair)
    return DensityResult(best, best_pair)


# ---------------------------------------------------------------------------
# cyclic edge-connectivity


@dataclass(frozen=True)
class EdgeCut:
    edges: tuple[int, ...]
    side_a: tuple[int, ...]
    side_b: tuple[int, ...]


@dataclass(frozen=True)
class CyclicConnectivityResult:
    at_least: bool
    k: int
    witness: Optional[EdgeCut]
    method: str  # "exhaustive" | "cycle-pair-family"
    exact: bool


_EXCEPTIONAL_MSG = (
    "cyclic connectivity check rejects K4, K3,3 and the triple edge; "
    "these have no cycle-separating edge cuts"
)


def _is_exceptional(g: Multipole) -> bool:
    n, m = g.n, g.num_edges
    if n == 2 and m == 3 and all(set(e) == {0, 1} for e in g.edges):
        return True
    if n == 4 and m == 6 and g.is_simple():
        return True  # the only simple cubic graph on 4 vertices is K4
    if n == 6 and m == 9 and g.is_simple() and bipartition(g) is not None:
        try:
            if girth(g) == 4:
                return True
        except MultipoleError:
            pass
    return False


def _cycle_component_count(g: Multipole, removed: set[int]) -> int:
    """Number of components containing a circuit after edge removal."""
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for e, (a, b) in enumerate(g.edges):
        if e in removed or a is None or b is None:
            continue
        adj[a].append((e, b))
        adj[b].append((e, a))
    seen = [False] * g.n
    count = 0
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        stack = [s]
        nedges = 0
        has_loop = False
        while stack:
            v = stack.pop()
            for e, w in adj[v]:
                nedges += 1
                if w == v:
                    has_loop = True
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        nedges //= 2
        if has_loop:
            nedges = max(nedges, len(comp) + 1)
        if nedges >= len(comp):
            count += 1
    return count


def _sides(g: Multipole, removed: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    removed = set(removed)
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for e, (a, b) in enumerate(g.edges):
        if e in removed or a is None or b is None or a == b:
            continue
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    side_a = tuple(sorted(seen))
    side_b = tuple(v for v in range(g.n) if v not in seen)
    return side_a, side_b


def cycles_up_to(g: Multipole, max_len: int) -> list[frozenset[int]]:
    """All circuits of length <= max_len, as edge sets (loops/parallels included)."""
    cycles: set[frozenset[int]] = set()
    for e, (a, b) in enumerate(g.edges):
        if a is None or b is None:
            continue
        if a == b:
            cycles.add(frozenset([e]))
    # parallel pairs
    by_pair: dict[tuple[int, int], list[int]] = {}
    for e, (a, b) in enumerate(g.edges):
        if a is None or b is None or a == b:
            continue
        by_pair.setdefault((min(a, b), max(a, b)), []).append(e)
    for pair_edges in by_pair.values():
        for e1, e2 in itertools.combinations(pair_edges, 2):
            cycles.add(frozenset([e1, e2]))
    # simple paths closing through a starting edge
    adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
    for e, (a, b) in enumerate(g.edges):
        if a is None or b is None or a == b:
            continue
        adj[a].append((e, b))
        adj[b].append((e, a))

    for e0, (a, b) in enumerate(g.edges):
        if a is None or b is None or a == b:
            continue
        # paths from b back to a of length <= max_len - 1, avoiding e0
        stack = [(b, [e0], {b})]
        while stack:
            v, path, visited = stack.pop()
            for e, w in adj[v]:
                if e in path:
                    continue
                if w == a and len(path) >= 2:
                    cycles.add(frozenset(path + [e]))
                elif w != a and w not in visited and len(path) < max_len - 1:
                    stack.append((w, path + [e], visited | {w}))
    return sorted(cycles, key=lambda c: (len(c), sorted(c)))


def _cycle_vertices(g: Multipole, cycle: frozenset[int]) -> set[int]:
    vs = set()
    for e in cycle:
        a, b = g.edges[e]
        vs.add(a)
        vs.add(b)
    return vs


def cyclic_connectivity_at_least(
    g: Multipole, k: int, budget=None, method: str = "auto"
) -> CyclicConnectivityResult:
    """Decide whether no cycle-separating edge cut has fewer than k edges.

    ``exhaustive`` removes every edge subset of size < k (exact, small
    graphs).  ``cycle-pair-family`` contracts pairs of vertex-disjoint
    short circuits (length <= girth+1) and takes minimum cuts between
    them, plus the trivial cuts around short circuits; every negative
    answer then carries a genuine witness cut, while a positive answer
    is exact only as far as the family covers both sides of every small
    cut (validated against the exhaustive method on small graphs, and
    flagged otherwise).
    """
    if not g.is_cubic_graph():
        raise MultipoleError("cyclic connectivity is defined for cubic graphs")
    if not connected(g):
        raise MultipoleError("cyclic connectivity needs a connected graph")
    if _is_exceptional(g):
        raise MultipoleError(_EXCEPTIONAL_MSG)
    if method == "auto":
        method = "exhaustive" if g.n <= 16 else "cycle-pair-family"

    if method == "exhaustive":
        for size in range(1, k):
            for subset in itertools.combinations(range(g.num_edges), size):
                if _cycle_component_count(g, set(subset)) >= 2:
                    side_a, side_b = _sides(g, subset)
                    return CyclicConnectivityResult(
                        False, k, EdgeCut(subset, side_a, side_b), "exhaustive", True
                    )
        return CyclicConnectivityResult(True, k, None, "exhaustive", True)

    gv = girth(g)
    fam = cycles_up_to(g, gv + 1)
    # trivial cuts around short circuits
    for cyc in fam:
        vs = _cycle_vertices(g, cyc)
        boundary = tuple(
            sorted(
                e
                for e, (a, b) in enumerate(g.edges)
                if (a in vs) != (b in vs)
            )
        )
        if len(boundary) < k and _cycle_component_count(g, set(boundary)) >= 2:
            side_a, side_b = _sides(g, boundary)
            return CyclicConnectivityResult(
                False, k, EdgeCut(boundary, side_a, side_b), "cycle-pair-family", True
            )
    # pairs depend only on vertex sets, so dedupe cycles sharing one
    verts = sorted(
        {frozenset(_cycle_vertices(g, c)) for c in fam}, key=sorted
    )
    solver = MaxflowSolver(g)
    for i in range(len(verts)):
        vi = verts[i]
        for j in range(i + 1, len(verts)):
            if vi & verts[j]:
                continue
            val, cut = solver.mincut(vi, verts[j], limit=k)
            if val < k:
                side_a, side_b = _sides(g, cut)
                return CyclicConnectivityResult(
                    False,
                    k,
                    EdgeCut(tuple(cut), side_a, side_b),
                    "cycle-pair-family",
                    True,
                )
    return CyclicConnectivityResult(True, k, None, "cycle-pair-family", False)


# ---------------------------------------------------------------------------
# odd-circuit classification of a 2-factor against a 3-array


@dataclass(frozen=True)
class OddCircuitClassification:
    index: int
    c1: tuple[tuple[int, ...], ...]  # all-uncovered circuits (edge tuples)
    c2: tuple[tuple[int, ...], ...]  # core circuits with a doubly covered edge
    c3: tuple[tuple[int, ...], ...]  # circuits leaving the core
    special_vertices: tuple[int, ...]
    bounds_ok: bool
    details: tuple[str, ...]


def classify_odd_circuits(g: Multipole, a: ThreeArray, i: int) -> OddCircuitClassification:
    """Partition the odd circuits of the 2-factor complementary to the
    i-th matching by their position relative to the core, and audit the
    counting bounds used to tie oddness to defect."""
    if i not in (0, 1, 2):
        raise MultipoleError("matching index must be 0, 1 or 2")
    e0, e1, e2, e3 = a.classes()
    e0s, e2s, e3s = set(e0), set(e2), set(e3)
    core = e0s | e2s | e3s
    details = []
    ok = True

    def classify_factor(idx: int):
        pm = a.matchings[idx]
        out = ([], [], [])
        for comp in two_factor_components(g, pm):
            if len(comp) % 2 == 0:
                continue
            comp_set = set(comp)
            ces = [
                e
                for e, (x, y) in enumerate(g.edges)
                if x in comp_set and y in comp_set and e not in set(pm)
            ]
            if all(e in e0s for e in ces):
                out[0].append(tuple(sorted(ces)))
            elif all(e in core for e in ces):
                out[1].append(tuple(sorted(ces)))
            else:
                out[2].append(tuple(sorted(ces)))
        return tuple(tuple(sorted(x)) for x in out)

    all_class = [classify_factor(idx) for idx in range(3)]
    c1, c2, c3 = all_class[i]

    special = sorted(
        {v for e in e3s for v in g.edges[e]}
    )
    # |C^1| is the same for every member of the array
    if not (all_class[0][0] == all_class[1][0] == all_class[2][0]):
        ok = False
        details.append("all-uncovered odd circuits differ between 2-factors")
    if len(c1) * 3 > len(special):
        ok = False
        details.append("|C1| exceeds |S|/3")
    for idx in range(3):
        pm_set = set(a.matchings[idx])
        bound = len(e2s & pm_set)
        if len(all_class[idx][2]) > bound:
            ok = False
            details.append(f"|C3[{idx}]| exceeds |E2 cap M{idx + 1}|")
    if sum(len(all_class[idx][1]) for idx in range(3)) > 2 * len(e3s):
        ok = False
        details.append("sum |C2| exceeds 2|E3|")
    total_odd = sum(
        sum(len(all_class[idx][j]) for j in range(3)) for idx in range(3)
    )
    if total_odd > 4 * len(e3s) + 2 * len(e2s):
        ok = False
        details.append("aggregate odd-circuit count exceeds 4|E3| + 2|E2|")
    return OddCircuitClassification(
        i, c1, c2, c3, tuple(special), ok, tuple(details)
    )


# ---------------------------------------------------------------------------
# the measure report and the inequality audit


@dataclass
class MeasureReport:
    name: str
    vertices: int
    edges: int
    girth: Optional[int] = None
    colourable: Optional[bool] = None
    defect: Optional[int] = None
    defect_exact: bool = True
    defect_lower_bound: Optional[int] = None
    oddness: Optional[int] = None
    oddness_exact: bool = True
    resistance: Optional[int] = None
    resistance_exact: bool = True
    density: Optional[int] = None
    cyclic_connectivity_level: Optional[int] = None
    cyclic_connectivity_exact: bool = False
    perfect_matchings: Optional[int] = None
    undecided: tuple[str, ...] = ()
    witnesses: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [
            f"graph: {self.name}",
            f"vertices: {self.vertices}",
            f"edges: {self.edges}",
        ]

        def emit(key, value, exact=True):
            if value is None:
                return
            suffix = "" if exact else " (bound)"
            out.append(f"{key}: {value}{suffix}")

        emit("girth", self.girth)
        if self.colourable is not None:
            out.append(f"colourable: {'yes' if self.colourable else 'no'}")
        emit("perfect-matchings", self.perfect_matchings)
        if self.defect is not None:
            emit("defect", self.defect, self.defect_exact)
        elif self.defect_lower_bound is not None:
            out.append(f"defect: >= {self.defect_lower_bound} (certified bound)")
        emit("oddness", self.oddness, self.oddness_exact)
        emit("resistance", self.resistance, self.resistance_exact)
        emit("density", self.density)
        if self.cyclic_connectivity_level is not None:
            mark = "=" if self.cyclic_connectivity_exact else ">="
            out.append(f"cyclic-connectivity: {mark} {self.cyclic_connectivity_level}")
        for item in self.undecided:
            out.append(f"undecided: {item}")
        return out


@dataclass(frozen=True)
class AuditLine:
    name: str
    applicable: bool
    ok: bool
    slack: Optional[int]


def audit_inequalities(r: MeasureReport) -> list[AuditLine]:
    """Check the defect/oddness/density/resistance/girth inequalities.

    Inequalities that only bind snarks are skipped on colourable input;
    fields carrying lower bounds are audited one-sidedly.
    """
    out = []
    d, w, dn, rho = r.defect, r.oddness, r.density, r.resistance
    snark = r.colourable is False

    def line(name, applicable, ok, slack=None):
        out.append(AuditLine(name, applicable, ok, slack))

    if snark and w is not None and dn is not None:
        line("oddness <= 2*density", True, w <= 2 * dn, 2 * dn - w)
    else:
        line("oddness <= 2*density", False, True)
    if snark and d is not None and dn is not None:
        line("2*density <= defect-1", True, 2 * dn <= d - 1, d - 1 - 2 * dn)
        line("defect >= 2*density+1", True, d >= 2 * dn + 1, d - 2 * dn - 1)
    else:
        line("2*density <= defect-1", False, True)
        line("defect >= 2*density+1", False, True)
    if d is not None and w is not None:
        ok = 2 * d >= 3 * w
        line("defect >= 3*oddness/2", True, ok, 2 * d - 3 * w)
    else:
        line("defect >= 3*oddness/2", False, True)
    if snark and d is not None and r.girth is not None:
        need = (r.girth + 1) // 2
        line("defect >= ceil(girth/2)", True, d >= need, d - need)
    else:
        line("defect >= ceil(girth/2)", False, True)
    if rho is not None and w is not None:
        line("resistance <= oddness", True, rho <= w, w - rho)
        line("resistance=2 iff oddness=2", True, (rho == 2) == (w == 2))
    else:
        line("resistance <= oddness", False, True)
        line("resistance=2 iff oddness=2", False, True)
    if w is not None and r.oddness_exact:
        line("oddness is even", True, w % 2 == 0)
    else:
        line("oddness is even", False, True)
    return out
