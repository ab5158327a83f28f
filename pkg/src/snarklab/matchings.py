"""Perfect matchings, 3-arrays, colouring defect and cores.

A 3-array is an unordered collection of three perfect matchings of a
cubic graph (repetition allowed).  Edges split into coverage classes
E0..E3 by how many members contain them; the defect of the graph is the
minimum possible |E0|, and the core of an array is the subgraph induced
by the edges that are not simply covered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import colouring
from .colouring import Budget, _as_budget
from .multipole import Multipole, MultipoleError, delete_edges

PerfectMatching = tuple[int, ...]


def enumerate_perfect_matchings(g: Multipole, budget=None) -> list[PerfectMatching]:
    """All perfect matchings, duplicate-free, in lexicographic order.

    Backtracking over the least-index uncovered vertex with canonical
    edge order; loops never participate.
    """
    if not g.is_graph():
        raise MultipoleError("perfect matchings are defined for graphs")
    bud = _as_budget(budget)
    n = g.n
    if n % 2:
        return []
    incident = []
    for v in range(n):
        opts = []
        for e, slot in g.ends_at(v):
            w = g.edges[e][1 - slot]
            if w is not None and w != v:
                opts.append((e, w))
        incident.append(opts)
    out: list[PerfectMatching] = []
    chosen: list[int] = []

    def rec(covered: int, start: int):
        bud.spend()
        v = start
        while v < n and (covered >> v) & 1:
            v += 1
        if v == n:
            out.append(tuple(sorted(chosen)))
            return
        for e, w in incident[v]:
            if (covered >> w) & 1:
                continue
            chosen.append(e)
            rec(covered | (1 << v) | (1 << w), v + 1)
            chosen.pop()

    rec(0, 0)
    out.sort()
    return out


def matching_through_edge(
    g: Multipole, e: int, matchings: Optional[list[PerfectMatching]] = None, budget=None
) -> PerfectMatching:
    """Lexicographically least perfect matching containing edge e."""
    if matchings is None:
        matchings = enumerate_perfect_matchings(g, budget=budget)
    for pm in matchings:
        if e in pm:
            return pm
    raise MultipoleError(f"no perfect matching contains edge {e}")


# ---------------------------------------------------------------------------
# 3-arrays


@dataclass(frozen=True)
class ThreeArray:
    """Sorted triple of perfect matchings with derived coverage classes."""

    matchings: tuple[PerfectMatching, PerfectMatching, PerfectMatching]
    num_edges: int

    @staticmethod
    def of(
        g: Multipole,
        m1: Sequence[int],
        m2: Sequence[int],
        m3: Sequence[int],
        check: bool = True,
    ) -> "ThreeArray":
        pms = tuple(sorted(tuple(sorted(pm)) for pm in (m1, m2, m3)))
        if check:
            for pm in pms:
                _check_perfect_matching(g, pm)
        return ThreeArray(pms, g.num_edges)

    def coverage(self) -> dict[int, int]:
        cov = {e: 0 for e in range(self.num_edges)}
        for pm in self.matchings:
            for e in pm:
                cov[e] += 1
        return cov

    def classes(self) -> tuple[tuple[int, ...], ...]:
        """(E0, E1, E2, E3) as sorted edge tuples."""
        cov = self.coverage()
        return tuple(
            tuple(e for e in range(self.num_edges) if cov[e] == i) for i in range(4)
        )

    def uncovered(self) -> tuple[int, ...]:
        return self.classes()[0]


def _check_perfect_matching(g: Multipole, pm: Sequence[int]):
    seen = [0] * g.n
    for e in pm:
        if not (0 <= e < g.num_edges):
            raise MultipoleError(f"no edge {e}")
        a, b = g.edges[e]
        if a is None or b is None or a == b:
            raise MultipoleError(f"edge {e} cannot belong to a perfect matching")
        seen[a] += 1
        seen[b] += 1
    if any(s != 1 for s in seen):
        raise MultipoleError("edge set is not a perfect matching")


def phi_of(a: ThreeArray) -> tuple[dict[int, str], bool]:
    """Colour-list labelling of a 3-array.

    Each edge gets the sorted list of array positions containing it,
    written as a digit string ('' for uncovered).  The labelling is a
    proper edge colouring iff no edge is triply covered.
    """
    labels: dict[int, str] = {e: "" for e in range(a.num_edges)}
    for i, pm in enumerate(a.matchings, start=1):
        for e in pm:
            labels[e] += str(i)
    proper = all(len(s) < 3 for s in labels.values())
    return labels, proper


# ---------------------------------------------------------------------------
# cores


@dataclass(frozen=True)
class CoreComponent:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    kind: str  # "even_circuit" | "subdivision"


@dataclass(frozen=True)
class Core:
    edges: tuple[int, ...]
    components: tuple[CoreComponent, ...]
    cyclic: bool
    incidence_ok: bool


def core_of(a: ThreeArray, g: Multipole) -> Core:
    """Subgraph induced by the non-simply-covered edges, classified.

    Components are even circuits or subdivisions of cubic graphs; every
    2-valent core vertex meets one doubly covered and one uncovered
    edge, every 3-valent core vertex one triply covered and two
    uncovered edges.  The core is cyclic (all circuits) iff E3 is empty.
    """
    e0, e1, e2, e3 = a.classes()
    core_edges = sorted(set(e0) | set(e2) | set(e3))
    cov = a.coverage()
    adj: dict[int, list[tuple[int, int]]] = {}
    for e in core_edges:
        x, y = g.edges[e]
        adj.setdefault(x, []).append((e, y))
        adj.setdefault(y, []).append((e, x))

    incidence_ok = True
    for v, inc in adj.items():
        covs = sorted(cov[e] for e, _ in inc)
        if len(inc) == 2:
            if covs != [0, 2]:
                incidence_ok = False
        elif len(inc) == 3:
            if covs != [0, 0, 3]:
                incidence_ok = False
        else:
            incidence_ok = False

    comps = []
    seen: set[int] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        vs = [start]
        while stack:
            v = stack.pop()
            for _e, w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    vs.append(w)
                    stack.append(w)
        vset = set(vs)
        ces = sorted({e for v in vs for e, _ in adj[v]})
        if all(len(adj[v]) == 2 for v in vs):
            kind = "even_circuit" if len(ces) % 2 == 0 else "odd_circuit"
        else:
            kind = "subdivision"
        comps.append(CoreComponent(tuple(sorted(vset)), tuple(ces), kind))

    cyclic = all(c.kind == "even_circuit" for c in comps)
    return Core(tuple(core_edges), tuple(comps), cyclic, incidence_ok)


# ---------------------------------------------------------------------------
# defect


@dataclass(frozen=True)
class DefectResult:
    value: int
    witness: ThreeArray
    matching_count: int


def defect(
    g: Multipole,
    matchings: Optional[list[PerfectMatching]] = None,
    budget=None,
) -> DefectResult:
    """Minimum number of edges left uncovered by three perfect matchings.

    Iterates over pairs (i <= j), bounding by the best possible third
    matching; the witness is the lexicographically least optimal triple
    of matching indices.  Zero for 3-edge-colourable graphs.
    """
    bud = _as_budget(budget)
    if matchings is None:
        matchings = enumerate_perfect_matchings(g, budget=bud)
    if not matchings:
        raise MultipoleError("defect is undefined without a perfect matching")
    nedges = g.num_edges
    masks = [_mask(pm) for pm in matchings]
    full = (1 << nedges) - 1
    pm_size = len(matchings[0])
    best: Optional[int] = None
    best_triple: Optional[tuple[int, int, int]] = None
    P = len(masks)
    for i in range(P):
        mi = masks[i]
        for j in range(i, P):
            bud.spend()
            u = mi | masks[j]
            base = nedges - u.bit_count()
            if best is not None and base - pm_size >= best:
                continue
            for k in range(j, P):
                val = base - (masks[k] & ~u).bit_count()
                trip = (i, j, k)
                if best is None or (val, trip) < (best, best_triple):
                    best = val
                    best_triple = trip
            if best == 0:
                break
        if best == 0:
            break
    i, j, k = best_triple
    witness = ThreeArray.of(
        g, matchings[i], matchings[j], matchings[k], check=False
    )
    return DefectResult(best, witness, len(matchings))


def defect_exhaustive(
    g: Multipole, matchings: Optional[list[PerfectMatching]] = None
) -> int:
    """Oracle: plain enumeration of all multisets of three matchings."""
    if matchings is None:
        matchings = enumerate_perfect_matchings(g)
    if not matchings:
        raise MultipoleError("defect is undefined without a perfect matching")
    nedges = g.num_edges
    masks = [_mask(pm) for pm in matchings]
    best = None
    P = len(masks)
    for i in range(P):
        for j in range(i, P):
            for k in range(j, P):
                val = nedges - (masks[i] | masks[j] | masks[k]).bit_count()
                if best is None or val < best:
                    best = val
    return best


def _mask(pm: Sequence[int]) -> int:
    m = 0
    for e in pm:
        m |= 1 << e
    return m


def fan_raspaud_array(
    g: Multipole,
    matchings: Optional[list[PerfectMatching]] = None,
    budget=None,
) -> Optional[ThreeArray]:
    """First 3-array with empty triple intersection (cyclic core)."""
    bud = _as_budget(budget)
    if matchings is None:
        matchings = enumerate_perfect_matchings(g, budget=bud)
    masks = [_mask(pm) for pm in matchings]
    P = len(masks)
    for i in range(P):
        for j in range(i, P):
            mij = masks[i] & masks[j]
            for k in range(j, P):
                bud.spend()
                if mij & masks[k] == 0:
                    return ThreeArray.of(
                        g, matchings[i], matchings[j], matchings[k], check=False
                    )
    return None


def array_leaves_colourable_rest(g: Multipole, a: ThreeArray, budget=None) -> bool:
    """Whether g minus the uncovered edges is 3-edge-colourable."""
    rest = delete_edges(g, a.uncovered()).multipole
    return colouring.is_colourable(rest, budget=budget)
