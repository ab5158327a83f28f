"""Proper 3-edge-colourings of multipoles and Klein-group flows.

Colours 1, 2, 3 are the nonzero elements of Z2 x Z2 written in binary
(1 = 01, 2 = 10, 3 = 11), so colour addition is bitwise XOR and three
distinct nonzero colours sum to zero.  A proper colouring of a cubic
multipole is therefore the same thing as a nowhere-zero Klein flow, and
no edge orientations are needed.

The search engine is a deterministic backtracker: branch on the
least-index uncoloured edge, try colours in order 1, 2, 3, propagate
forced edges.  All searches take an optional node budget; exhausting it
raises :class:`BudgetExceeded`, which is distinct from "no colouring".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .multipole import (
    Multipole,
    MultipoleError,
    contract_regions,
    delete_vertices,
    extract_region,
)

COLOURS = (1, 2, 3)

# the six permutations of {1,2,3}, indexed by colour (slot 0 unused)
S3_PERMS = tuple(
    (0,) + p for p in itertools.permutations((1, 2, 3))
)


def kadd(a: int, b: int) -> int:
    """Klein-group addition."""
    return a ^ b


def ksum(values: Iterable[int]) -> int:
    s = 0
    for v in values:
        s ^= v
    return s


def parity_check(vector: Sequence[int]) -> bool:
    """Boundary vectors of colourable multipoles sum to zero."""
    return ksum(vector) == 0


def apply_colour_perm(perm: Sequence[int], vector: Sequence[int]) -> tuple[int, ...]:
    return tuple(perm[c] for c in vector)


class BudgetExceeded(RuntimeError):
    """Search ran out of nodes; the question is undecided, not answered."""


class Budget:
    """Countdown of search nodes shared across nested searches."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: Optional[int] = None):
        self.limit = limit
        self.used = 0

    def spend(self, k: int = 1):
        self.used += k
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceeded(f"search budget of {self.limit} nodes exhausted")


def _as_budget(budget) -> Budget:
    if budget is None or isinstance(budget, Budget):
        return budget or Budget(None)
    return Budget(int(budget))


# ---------------------------------------------------------------------------
# search engine

_DISTINCT = 0
_KIRCHHOFF = 1
_HUB = 2


class _Engine:
    """Backtracking core over edge colours 1..3.

    Vertex constraint modes:
      * distinct  -- ends at the vertex carry pairwise distinct colours
                     (proper edge colouring; forces the third edge at
                     degree-3 vertices),
      * kirchhoff -- colours at the vertex XOR to zero (flows; forces
                     the last edge at any degree),
      * hub       -- the tuple of colours on the vertex's ends, in
                     canonical incidence order, must extend to a member
                     of an allowed set of tuples.
    """

    def __init__(
        self,
        m: Multipole,
        mode: str = "colouring",
        hubs: Optional[dict[int, Sequence[tuple[int, ...]]]] = None,
        budget: Optional[Budget] = None,
    ):
        self.m = m
        self.nedges = m.num_edges
        self.budget = budget or Budget(None)
        self.colour = [0] * self.nedges
        self.edge_vertices: list[tuple[int, ...]] = []
        for a, b in m.edges:
            occ = tuple(v for v in (a, b) if v is not None)
            self.edge_vertices.append(occ)
        self.vmode = []
        hubs = hubs or {}
        for v in range(m.n):
            if v in hubs:
                self.vmode.append(_HUB)
            elif mode == "flow":
                self.vmode.append(_KIRCHHOFF)
            else:
                self.vmode.append(_DISTINCT)
        self.deg = [m.degree(v) for v in range(m.n)]
        self.unset = list(self.deg)
        self.used = [0] * m.n
        self.xor = [0] * m.n
        self.incident = [tuple(e for e, _ in m.ends_at(v)) for v in range(m.n)]
        self.hub_edges: dict[int, tuple[int, ...]] = {}
        self.hub_allowed: dict[int, tuple[tuple[int, ...], ...]] = {}
        for v, allowed in hubs.items():
            edges_v = self.incident[v]
            if len(set(edges_v)) != len(edges_v):
                raise MultipoleError("hub vertices must not carry loops")
            self.hub_edges[v] = edges_v
            self.hub_allowed[v] = tuple(tuple(t) for t in allowed)
        self.trail: list[int] = []
        self.queue: list[tuple[int, int]] = []

    # -- propagation ---------------------------------------------------

    def _set(self, e: int, c: int) -> bool:
        """Assign colour c to edge e, updating vertex state.

        Either applies fully (and records on the trail) or rejects
        without mutating, so undo stays consistent; constraint failures
        discovered mid-update finish the update before reporting.
        """
        colour = self.colour
        if colour[e]:
            return colour[e] == c
        occ = self.edge_vertices[e]
        bit = 1 << c
        for v in occ:
            if self.vmode[v] == _DISTINCT and self.used[v] & bit:
                return False
        if len(occ) == 2 and occ[0] == occ[1] and self.vmode[occ[0]] == _DISTINCT:
            return False  # a loop can never be properly coloured
        colour[e] = c
        self.trail.append(e)
        ok = True
        for v in occ:
            mode = self.vmode[v]
            if mode == _DISTINCT:
                self.used[v] |= bit
                self.unset[v] -= 1
                if ok and self.unset[v] == 1 and self.deg[v] == 3:
                    missing = 14 ^ self.used[v]
                    mc = missing.bit_length() - 1
                    for e2 in self.incident[v]:
                        if not colour[e2]:
                            self.queue.append((e2, mc))
                            break
            elif mode == _KIRCHHOFF:
                self.xor[v] ^= c
                self.unset[v] -= 1
                if ok:
                    if self.unset[v] == 1:
                        forced = self.xor[v]
                        if forced == 0:
                            ok = False
                        else:
                            for e2 in self.incident[v]:
                                if not colour[e2]:
                                    self.queue.append((e2, forced))
                                    break
                    elif self.unset[v] == 0 and self.xor[v] != 0:
                        ok = False
            else:  # hub
                self.unset[v] -= 1
                if ok:
                    edges_v = self.hub_edges[v]
                    vec = tuple(colour[e2] for e2 in edges_v)
                    compatible = [
                        w
                        for w in self.hub_allowed[v]
                        if all(x == 0 or x == y for x, y in zip(vec, w))
                    ]
                    if not compatible:
                        ok = False
                    else:
                        for i, x in enumerate(vec):
                            if x == 0:
                                vals = {w[i] for w in compatible}
                                if len(vals) == 1:
                                    self.queue.append((edges_v[i], vals.pop()))
        return ok

    def _propagate(self, assignments: Iterable[tuple[int, int]]) -> bool:
        q = self.queue
        q.extend(assignments)
        while q:
            e, c = q.pop()
            if not self._set(e, c):
                q.clear()
                return False
        return True

    def _undo_to(self, mark: int):
        colour = self.colour
        while len(self.trail) > mark:
            e = self.trail.pop()
            c = colour[e]
            colour[e] = 0
            for v in self.edge_vertices[e]:
                mode = self.vmode[v]
                if mode == _DISTINCT:
                    self.used[v] &= ~(1 << c)
                elif mode == _KIRCHHOFF:
                    self.xor[v] ^= c
                self.unset[v] += 1

    # -- solving ---------------------------------------------------------

    def solve(self, fixed: Sequence[tuple[int, int]] = ()) -> Optional[tuple[int, ...]]:
        """First solution extending ``fixed``, or None.  State is restored."""
        base = len(self.trail)
        if not self._propagate(fixed):
            self._undo_to(base)
            return None
        decisions: list[tuple[int, int, int]] = []
        scan = 0
        solution = None
        colour = self.colour
        nedges = self.nedges
        try:
            while True:
                e = -1
                i = scan
                while i < nedges:
                    if not colour[i]:
                        e = i
                        break
                    i += 1
                if e == -1:
                    solution = tuple(colour)
                    break
                c = 1
                while True:
                    if c > 3:
                        if not decisions:
                            self._undo_to(base)
                            return None
                        e, c, mark = decisions.pop()
                        self._undo_to(mark)
                        scan = e
                        c += 1
                        continue
                    self.budget.spend()
                    mark = len(self.trail)
                    if self._propagate(((e, c),)):
                        decisions.append((e, c, mark))
                        scan = e + 1
                        break
                    self._undo_to(mark)
                    c += 1
        finally:
            if solution is None:
                # budget blew up mid-search; restore state
                self._undo_to(base)
        self._undo_to(base)
        return solution


# ---------------------------------------------------------------------------
# public operations


def boundary_ends(m: Multipole) -> list:
    """Free ends in boundary order: connector order, else canonical."""
    if m.connectors:
        return [ref for c in m.connectors for ref in c]
    return list(m.free_ends)


def _boundary_fixed(m: Multipole, boundary: Sequence[int]) -> list[tuple[int, int]]:
    ends = boundary_ends(m)
    if len(boundary) != len(ends):
        raise MultipoleError(
            f"boundary vector has {len(boundary)} entries, multipole has "
            f"{len(ends)} boundary ends"
        )
    out = []
    for ref, c in zip(ends, boundary):
        if c not in COLOURS:
            raise MultipoleError(f"invalid colour {c!r}")
        out.append((ref[0], c))
    return out


def find_colouring(
    m: Multipole,
    boundary: Optional[Sequence[int]] = None,
    partial: Optional[dict[int, int]] = None,
    budget=None,
) -> Optional[dict[int, int]]:
    """First proper 3-edge-colouring extending the constraints, or None.

    Deterministic: branches on the least-index uncoloured edge, colours
    tried in order 1, 2, 3.
    """
    fixed: list[tuple[int, int]] = []
    if boundary is not None:
        fixed.extend(_boundary_fixed(m, boundary))
    if partial:
        for e, c in sorted(partial.items()):
            if not (0 <= e < m.num_edges):
                raise MultipoleError(f"no edge {e}")
            if c not in COLOURS:
                raise MultipoleError(f"invalid colour {c!r}")
            fixed.append((e, c))
    eng = _Engine(m, "colouring", budget=_as_budget(budget))
    sol = eng.solve(fixed)
    if sol is None:
        return None
    return {e: c for e, c in enumerate(sol)}


def is_colourable(m: Multipole, budget=None) -> bool:
    return find_colouring(m, budget=budget) is not None


def find_colouring_with_hubs(
    m: Multipole,
    hubs: dict[int, Sequence[tuple[int, ...]]],
    boundary: Optional[Sequence[int]] = None,
    partial: Optional[dict[int, int]] = None,
    budget=None,
) -> Optional[dict[int, int]]:
    """Proper colouring where selected vertices carry membership
    constraints instead of propriety: the tuple of colours on a hub's
    ends (in canonical incidence order) must extend to a member of its
    allowed set."""
    fixed: list[tuple[int, int]] = []
    if boundary is not None:
        fixed.extend(_boundary_fixed(m, boundary))
    if partial:
        fixed.extend(sorted(partial.items()))
    eng = _Engine(m, "colouring", hubs=hubs, budget=_as_budget(budget))
    sol = eng.solve(fixed)
    if sol is None:
        return None
    return {e: c for e, c in enumerate(sol)}


def is_proper_colouring(m: Multipole, colours: dict[int, int]) -> bool:
    """All ends at every vertex pairwise distinct, all edges coloured 1..3."""
    if set(colours) != set(range(m.num_edges)):
        return False
    if any(c not in COLOURS for c in colours.values()):
        return False
    for v in range(m.n):
        seen = set()
        for e, _slot in m.ends_at(v):
            c = colours[e]
            if c in seen:
                return False
            seen.add(c)
    return True


def vertex_residual(m: Multipole, colours: dict[int, int], v: int) -> int:
    """Klein sum of the colours on the ends at v (0 = Kirchhoff holds)."""
    s = 0
    for e, _slot in m.ends_at(v):
        s ^= colours[e]
    return s


def residual_support(m: Multipole, colours: dict[int, int]) -> list[int]:
    return [v for v in range(m.n) if vertex_residual(m, colours, v) != 0]


def colouring_to_flow(m: Multipole, colours: dict[int, int]) -> dict[int, int]:
    """A proper colouring of a cubic multipole is a nowhere-zero flow."""
    if not m.is_cubic():
        raise MultipoleError("colouring/flow correspondence needs a cubic multipole")
    if not is_proper_colouring(m, colours):
        raise MultipoleError("not a proper colouring")
    return dict(colours)


def flow_to_colouring(m: Multipole, flow: dict[int, int]) -> dict[int, int]:
    """Inverse direction; rejects zero edges and Kirchhoff violations."""
    if not m.is_cubic():
        raise MultipoleError("colouring/flow correspondence needs a cubic multipole")
    if set(flow) != set(range(m.num_edges)):
        raise MultipoleError("flow must assign every edge")
    if any(c not in COLOURS for c in flow.values()):
        raise MultipoleError("flow has a zero or invalid edge value")
    bad = residual_support(m, flow)
    if bad:
        raise MultipoleError(f"Kirchhoff law fails at vertices {bad}")
    return dict(flow)


def find_flow(
    m: Multipole,
    partial: Optional[dict[int, int]] = None,
    budget=None,
) -> Optional[dict[int, int]]:
    """Nowhere-zero Klein flow on a multipole of arbitrary degrees.

    Kirchhoff's law is enforced at every vertex; free ends are
    unconstrained.
    """
    fixed = sorted((partial or {}).items())
    eng = _Engine(m, "flow", budget=_as_budget(budget))
    sol = eng.solve(fixed)
    if sol is None:
        return None
    return {e: c for e, c in enumerate(sol)}


# ---------------------------------------------------------------------------
# boundary spectra


def _orbit_rep(vec: tuple[int, ...]) -> tuple[int, ...]:
    return min(apply_colour_perm(p, vec) for p in S3_PERMS)


def _parity_candidates(nb: int):
    for vec in itertools.product(COLOURS, repeat=nb):
        if ksum(vec) == 0:
            yield vec


def boundary_spectrum(
    m: Multipole,
    budget=None,
    regions: Optional[Sequence[Iterable[int]]] = None,
    colour_symmetry: bool = True,
) -> frozenset[tuple[int, ...]]:
    """The exact set of boundary vectors realizable by proper colourings.

    Candidates run over all 3^n boundary vectors, pre-filtered by the
    parity condition; each candidate is decided by constrained search.
    Realizability is invariant under global colour permutations, so only
    orbit representatives are searched unless ``colour_symmetry`` is
    disabled.

    ``regions`` is an optional performance decomposition: each region (a
    vertex set whose attachment colours decide its interior) is replaced
    by a hub vertex constrained to the region's own recursively computed
    spectrum.  The result is identical with or without it.
    """
    ends = boundary_ends(m)
    nb = len(ends)
    if nb == 0:
        raise MultipoleError("boundary spectrum needs at least one free end")
    bud = _as_budget(budget)

    if regions:
        work, hubs = _hub_problem(m, regions, bud)
    else:
        work, hubs = m, None

    eng = _Engine(work, "colouring", hubs=hubs, budget=bud)
    work_ends = boundary_ends(work)
    assert len(work_ends) == nb

    realizable: set[tuple[int, ...]] = set()
    decided: dict[tuple[int, ...], bool] = {}
    for vec in _parity_candidates(nb):
        if colour_symmetry:
            rep = _orbit_rep(vec)
            if rep in decided:
                ok = decided[rep]
            else:
                fixed = [(ref[0], c) for ref, c in zip(work_ends, rep)]
                ok = eng.solve(fixed) is not None
                decided[rep] = ok
            if ok:
                realizable.add(vec)
        else:
            fixed = [(ref[0], c) for ref, c in zip(work_ends, vec)]
            if eng.solve(fixed) is not None:
                realizable.add(vec)
    return frozenset(realizable)


def _hub_problem(m, regions, bud):
    """Contract regions to hubs constrained by their own spectra."""
    regions = [sorted(set(r)) for r in regions]
    allowed_by_region = []
    for reg in regions:
        sub, cut_edges = extract_region(m, reg)
        sub_spec = boundary_spectrum(sub, budget=bud)
        allowed_by_region.append((cut_edges, sub_spec))
    contraction = contract_regions(m, regions)
    work = contraction.multipole
    hubs: dict[int, tuple[tuple[int, ...], ...]] = {}
    for hub, hub_cut, (sub_cut, sub_spec) in zip(
        contraction.hubs, contraction.hub_cut_edges, allowed_by_region
    ):
        # sub spectrum vectors are ordered by sub_cut; the hub's incident
        # ends are ordered by hub_cut; realign.
        pos_of = {old: i for i, old in enumerate(sub_cut)}
        order = [pos_of[old] for old in hub_cut]
        hubs[hub] = tuple(tuple(vec[i] for i in order) for vec in sorted(sub_spec))
    return work, hubs


# ---------------------------------------------------------------------------
# dipole properness and removability


@dataclass(frozen=True)
class DipoleProperness:
    proper: bool
    spectrum: frozenset
    connector_sizes: tuple[int, int]
    zero_flow_vector: Optional[tuple[int, ...]]


def total_flow(m: Multipole, vector: Sequence[int]) -> int:
    """Klein sum of the first connector's entries of a boundary vector."""
    k = len(m.connectors[0])
    return ksum(vector[:k])


def is_proper_dipole(
    m: Multipole,
    budget=None,
    regions: Optional[Sequence[Iterable[int]]] = None,
) -> DipoleProperness:
    """A dipole is proper when every realizable boundary vector carries
    nonzero total flow through it."""
    if len(m.connectors) != 2:
        raise MultipoleError(
            f"properness is defined for dipoles; found {len(m.connectors)} connectors"
        )
    spec = boundary_spectrum(m, budget=budget, regions=regions)
    witness = None
    for vec in sorted(spec):
        if total_flow(m, vec) == 0:
            witness = vec
            break
    return DipoleProperness(
        proper=witness is None,
        spectrum=spec,
        connector_sizes=(len(m.connectors[0]), len(m.connectors[1])),
        zero_flow_vector=witness,
    )


def is_removable(
    g: Multipole,
    vertex_set: Iterable[int],
    strict: bool = True,
    budget=None,
) -> bool:
    """True iff g - V(H) is *not* colourable.

    Removability is defined inside snarks; ``strict`` verifies the
    precondition (and raises on colourable input), the lenient mode
    answers the bare question.
    """
    bud = _as_budget(budget)
    if strict and is_colourable(g, budget=bud):
        raise MultipoleError("removability is defined for snarks only")
    rest = delete_vertices(g, vertex_set, keep_dangling=False).multipole
    return not is_colourable(rest, budget=bud)
