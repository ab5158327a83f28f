"""Cubic multipoles and their construction algebra.

A multipole is a finite graph whose edge ends need not be attached to a
vertex.  An unattached end is a *free end* (semiedge); an edge with one
free end is a dangling edge and an edge with two free ends is an
isolated edge.  Free ends may be grouped into pairwise disjoint ordered
*connectors*.  A multipole with no free ends is an ordinary graph.

Vertices are integers ``0..n-1``.  An edge is a pair of ends, each end
being a vertex id or ``None`` for a free end.  Edge order is canonical:
ends inside an edge put vertices before free ends (vertices sorted by
id), and edges are sorted by (first end, second end, insertion rank),
with free ends sorting after every vertex.  Free ends are addressed by
``(edge_index, slot)`` pairs.

All structures are immutable; every operation returns a new multipole
together with maps from old vertices/edges/ends to new ones.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

End = Optional[int]          # vertex id, or None for a free end
EndRef = tuple[int, int]     # (edge index, slot 0|1)


class MultipoleError(ValueError):
    """Raised for structurally invalid inputs or operations."""


def _end_key(end: End) -> tuple[int, int]:
    # vertices sort before free ends
    return (0, end) if end is not None else (1, 0)


class Multipole:
    """Immutable multipole with canonical edge indexing."""

    __slots__ = ("n", "edges", "connectors", "_ends_at", "_free_ends")

    def __init__(
        self,
        n: int,
        edges: Sequence[tuple[End, End]],
        connectors: Sequence[Sequence[EndRef]] = (),
    ):
        edges = tuple((a, b) for a, b in edges)
        for a, b in edges:
            for e in (a, b):
                if e is not None and not (0 <= e < n):
                    raise MultipoleError(f"edge end {e!r} out of range 0..{n - 1}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "connectors", tuple(tuple(c) for c in connectors))

        ends_at: list[list[EndRef]] = [[] for _ in range(n)]
        free_ends: list[EndRef] = []
        for i, (a, b) in enumerate(edges):
            for slot, end in ((0, a), (1, b)):
                if end is None:
                    free_ends.append((i, slot))
                else:
                    ends_at[end].append((i, slot))
        object.__setattr__(self, "_ends_at", tuple(tuple(x) for x in ends_at))
        object.__setattr__(self, "_free_ends", tuple(free_ends))

        seen: set[EndRef] = set()
        for c in self.connectors:
            for ref in c:
                if ref not in set(free_ends):
                    raise MultipoleError(f"connector references non-free end {ref}")
                if ref in seen:
                    raise MultipoleError(f"free end {ref} used in two connectors")
                seen.add(ref)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Multipole is immutable")

    # -- basic queries ------------------------------------------------

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def free_ends(self) -> tuple[EndRef, ...]:
        """All free ends, in canonical (edge, slot) order."""
        return self._free_ends

    @property
    def num_free_ends(self) -> int:
        return len(self._free_ends)

    def ends_at(self, v: int) -> tuple[EndRef, ...]:
        """Edge ends incident with vertex v, in canonical order."""
        return self._ends_at[v]

    def degree(self, v: int) -> int:
        return len(self._ends_at[v])

    def other_end(self, ref: EndRef) -> End:
        e, slot = ref
        return self.edges[e][1 - slot]

    def end_vertex(self, ref: EndRef) -> End:
        e, slot = ref
        return self.edges[e][slot]

    def incident_edges(self, v: int) -> tuple[int, ...]:
        return tuple(e for e, _ in self._ends_at[v])

    def neighbours(self, v: int) -> list[int]:
        """Neighbouring vertices with multiplicity (loops contribute twice)."""
        out = []
        for e, slot in self._ends_at[v]:
            w = self.edges[e][1 - slot]
            if w is not None:
                out.append(w)
        return out

    def is_graph(self) -> bool:
        return self.num_free_ends == 0

    def is_cubic(self) -> bool:
        return all(self.degree(v) == 3 for v in range(self.n))

    def is_cubic_graph(self) -> bool:
        return self.is_graph() and self.is_cubic()

    def is_simple(self) -> bool:
        seen = set()
        for a, b in self.edges:
            if a is None or b is None:
                return False
            if a == b:
                return False
            key = (min(a, b), max(a, b))
            if key in seen:
                return False
            seen.add(key)
        return True

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Multipole)
            and self.n == other.n
            and self.edges == other.edges
            and self.connectors == other.connectors
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges, self.connectors))

    def __repr__(self) -> str:
        return (
            f"Multipole(n={self.n}, edges={self.num_edges}, "
            f"free_ends={self.num_free_ends}, "
            f"connectors={tuple(len(c) for c in self.connectors)})"
        )


# ---------------------------------------------------------------------------
# construction helpers


def _canonical_edges(
    raw: Sequence[tuple[End, End]]
) -> tuple[tuple[tuple[End, End], ...], dict[tuple[int, int], EndRef]]:
    """Sort raw edges canonically.

    Returns the sorted edge tuple and a map from raw (edge position,
    slot) to canonical (edge index, slot).
    """
    oriented = []
    for pos, (a, b) in enumerate(raw):
        if _end_key(a) <= _end_key(b):
            oriented.append(((a, b), pos, False))
        else:
            oriented.append(((b, a), pos, True))
    oriented.sort(key=lambda t: (_end_key(t[0][0]), _end_key(t[0][1]), t[1]))
    end_map: dict[tuple[int, int], EndRef] = {}
    edges = []
    for new_idx, (ends, pos, flipped) in enumerate(oriented):
        edges.append(ends)
        for slot in (0, 1):
            end_map[(pos, slot ^ flipped)] = (new_idx, slot)
    return tuple(edges), end_map


def build_multipole(
    n: int,
    edges: Sequence[tuple[Union[int, str, None], Union[int, str, None]]],
    connectors: Sequence[Sequence[str]] = (),
) -> Multipole:
    """Build a multipole from an edge list with optional free-end tags.

    Edge ends are vertex ids, string tags naming a free end, or ``None``
    for an anonymous free end.  Connectors are given as ordered lists of
    tags.
    """
    raw = []
    tag_pos: dict[str, tuple[int, int]] = {}
    for pos, (a, b) in enumerate(edges):
        ends = []
        for slot, x in ((0, a), (1, b)):
            if isinstance(x, str):
                if x in tag_pos:
                    raise MultipoleError(f"free-end tag {x!r} used twice")
                tag_pos[x] = (pos, slot)
                ends.append(None)
            else:
                ends.append(x)
        raw.append((ends[0], ends[1]))
    canon, end_map = _canonical_edges(raw)
    conn_refs = []
    for c in connectors:
        refs = []
        for tag in c:
            if tag not in tag_pos:
                raise MultipoleError(f"unknown free-end tag {tag!r}")
            refs.append(end_map[tag_pos[tag]])
        conn_refs.append(refs)
    return Multipole(n, canon, conn_refs)


def graph_from_edges(n: int, edges: Sequence[tuple[int, int]]) -> Multipole:
    """Ordinary graph (no free ends) from a plain edge list."""
    return build_multipole(n, list(edges))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Diagnostics:
    ok: bool
    messages: tuple[str, ...]


def validate(m: Multipole, require_graph: bool = False) -> Diagnostics:
    """Structural diagnostics: cubicity, connector sanity, degenerate edges.

    Never raises; a multipole under construction may legitimately carry
    over- or under-full vertices, which are reported here.
    """
    msgs = []
    for v in range(m.n):
        d = m.degree(v)
        if d != 3:
            msgs.append(f"cubicity violation: vertex {v} has {d} edge ends")
    in_connector = set()
    for ci, c in enumerate(m.connectors):
        for ref in c:
            in_connector.add(ref)
    stray = [ref for ref in m.free_ends if ref not in in_connector]
    if stray and m.connectors:
        msgs.append(f"{len(stray)} free ends not assigned to any connector")
    if require_graph and m.num_free_ends:
        msgs.append(f"expected a graph but found {m.num_free_ends} free ends")
    ok = not any(s.startswith("cubicity") or s.startswith("expected") for s in msgs)
    return Diagnostics(ok, tuple(msgs))


# ---------------------------------------------------------------------------
# operations: every operation returns the result plus old->new maps


@dataclass(frozen=True)
class OpMaps:
    """Maps from one input multipole into an operation result.

    ``vertex``: old vertex id -> new id (absent if deleted).
    ``edge``: old edge index -> new index (absent if the edge vanished).
    ``end``: old (edge, slot) -> new (edge, slot) for surviving ends.
    """

    vertex: dict[int, int]
    edge: dict[int, int]
    end: dict[EndRef, EndRef]


@dataclass(frozen=True)
class OpResult:
    multipole: Multipole
    maps: tuple[OpMaps, ...]


def disjoint_union(parts: Sequence[Multipole]) -> OpResult:
    """Disjoint union; connectors of all parts are concatenated."""
    n = 0
    raw: list[tuple[End, End]] = []
    part_edge_pos: list[dict[int, int]] = []
    vmaps: list[dict[int, int]] = []
    for p in parts:
        vmaps.append({v: v + n for v in range(p.n)})
        epos = {}
        for i, (a, b) in enumerate(p.edges):
            epos[i] = len(raw)
            raw.append(
                (a + n if a is not None else None, b + n if b is not None else None)
            )
        part_edge_pos.append(epos)
        n += p.n
    canon, end_map = _canonical_edges(raw)
    connectors = []
    maps = []
    for p, epos, vmap in zip(parts, part_edge_pos, vmaps):
        emap = {i: end_map[(epos[i], 0)][0] for i in range(p.num_edges)}
        endmap = {
            (i, s): end_map[(epos[i], s)] for i in range(p.num_edges) for s in (0, 1)
        }
        for c in p.connectors:
            connectors.append(tuple(endmap[ref] for ref in c))
        maps.append(OpMaps(vmap, emap, endmap))
    return OpResult(Multipole(n, canon, connectors), tuple(maps))


def pair_free_ends(m: Multipole, pairs: Sequence[tuple[EndRef, EndRef]]) -> OpResult:
    """Identify free ends pairwise; identified pairs fuse into edges.

    Chains through isolated edges collapse to a single edge.  Paired
    ends disappear; connectors containing a consumed end are dropped,
    all other connectors survive.
    """
    free = set(m.free_ends)
    partner: dict[EndRef, EndRef] = {}
    for a, b in pairs:
        for r in (a, b):
            if r not in free:
                raise MultipoleError(f"{r} is not a free end")
            if r in partner:
                raise MultipoleError(f"free end {r} paired twice")
        if a == b:
            raise MultipoleError("cannot pair a free end with itself")
        partner[a] = b
        partner[b] = a

    def walk(start: EndRef, chain: set[int]):
        """Follow a chain outward from an edge end.

        Collects traversed edges into ``chain``; returns the terminal,
        which is ('v', vertex) or ('f', old free end ref).
        """
        cur = start
        while True:
            e, slot = cur
            end = m.edges[e][slot]
            if end is not None:
                return ("v", end)
            if cur not in partner:
                return ("f", cur)
            ne, ns = partner[cur]
            if ne in chain:
                raise MultipoleError("pairing would create a vertexless cycle")
            chain.add(ne)
            cur = (ne, 1 - ns)

    raw: list[tuple[End, End]] = []
    old_end_owner: dict[EndRef, tuple[int, int]] = {}
    edge_raw_pos: dict[int, int] = {}
    visited: set[int] = set()
    for e in range(m.num_edges):
        if e in visited:
            continue
        chain = {e}
        ta = walk((e, 0), chain)
        tb = walk((e, 1), chain)
        visited |= chain
        pos = len(raw)
        raw.append(
            (
                ta[1] if ta[0] == "v" else None,
                tb[1] if tb[0] == "v" else None,
            )
        )
        if ta[0] == "f":
            old_end_owner[ta[1]] = (pos, 0)
        if tb[0] == "f":
            old_end_owner[tb[1]] = (pos, 1)
        for member in chain:
            edge_raw_pos[member] = pos

    canon, cmap = _canonical_edges(raw)
    edge_new = {e: cmap[(pos, 0)][0] for e, pos in edge_raw_pos.items()}
    endmap = {ref: cmap[pos_slot] for ref, pos_slot in old_end_owner.items()}
    vmap = {v: v for v in range(m.n)}

    consumed = set(partner)
    connectors = []
    for c in m.connectors:
        if any(ref in consumed for ref in c):
            continue
        connectors.append(tuple(endmap[ref] for ref in c))
    res = Multipole(m.n, canon, connectors)
    return OpResult(res, (OpMaps(vmap, edge_new, endmap),))


def delete_vertices(
    m: Multipole, vs: Iterable[int], keep_dangling: bool = True
) -> OpResult:
    """Remove vertices.

    With ``keep_dangling`` the ends formerly attached to a removed
    vertex become free ends; otherwise every incident edge is removed
    entirely (induced subgraph semantics).  Edges joining two removed
    vertices always vanish.
    """
    vs = set(vs)
    for v in vs:
        if not (0 <= v < m.n):
            raise MultipoleError(f"no vertex {v}")
    vmap = {}
    nxt = 0
    for v in range(m.n):
        if v not in vs:
            vmap[v] = nxt
            nxt += 1
    raw = []
    raw_of_old = {}
    for i, (a, b) in enumerate(m.edges):
        gone_a = a is not None and a in vs
        gone_b = b is not None and b in vs
        if gone_a and gone_b:
            continue
        if (gone_a or gone_b) and not keep_dangling:
            continue
        na = None if (a is None or gone_a) else vmap[a]
        nb = None if (b is None or gone_b) else vmap[b]
        raw_of_old[i] = len(raw)
        raw.append((na, nb))
    canon, cmap = _canonical_edges(raw)
    emap = {i: cmap[(p, 0)][0] for i, p in raw_of_old.items()}
    # ends formerly attached to a removed vertex survive as free ends,
    # so every end of a surviving edge stays addressable
    endmap = {
        (i, s): cmap[(p, s)] for i, p in raw_of_old.items() for s in (0, 1)
    }
    connectors = []
    for c in m.connectors:
        if all(ref in endmap for ref in c):
            connectors.append(tuple(endmap[ref] for ref in c))
    res = Multipole(nxt, canon, connectors)
    return OpResult(res, (OpMaps(vmap, emap, endmap),))


def detach_vertices(m: Multipole, vs: Sequence[int]) -> OpResult:
    """Remove vertices, keeping danglings grouped into connectors.

    The result carries one connector per removed vertex (in the given
    order): the free ends created where that vertex used to be, ordered
    by the canonical index of their edges.  Pre-existing connectors are
    kept in front.
    """
    vs = list(vs)
    stubs = {v: m.ends_at(v) for v in vs}
    res = delete_vertices(m, vs, keep_dangling=True)
    maps = res.maps[0]
    connectors = list(res.multipole.connectors)
    for v in vs:
        group = []
        for e, slot in stubs[v]:
            if e not in maps.edge:
                continue  # edge vanished (other endpoint removed too, or loop)
            group.append(maps.end[(e, slot)])
        group.sort()
        connectors.append(tuple(group))
    return OpResult(
        with_connectors(res.multipole, connectors), res.maps
    )
    """Remove edges entirely (both ends)."""
    es = set(es)
    raw = []
    raw_of_old = {}
    for i, e in enumerate(m.edges):
        if i in es:
            continue
        raw_of_old[i] = len(raw)
        raw.append(e)
    canon, cmap = _canonical_edges(raw)
    emap = {i: cmap[(p, 0)][0] for i, p in raw_of_old.items()}
    endmap = {(i, s): cmap[(p, s)] for i, p in raw_of_old.items() for s in (0, 1)}
    connectors = []
    for c in m.connectors:
        if all(ref in endmap for ref in c):
            connectors.append(tuple(endmap[ref] for ref in c))
    res = Multipole(m.n, canon, connectors)
    return OpResult(res, (OpMaps({v: v for v in range(m.n)}, emap, endmap),))


def attach_free_ends(m: Multipole, attach: Sequence[tuple[EndRef, int]]) -> OpResult:
    """Attach free ends to vertices (semiedge -> incident edge end)."""
    free = set(m.free_ends)
    targets = dict()
    for ref, v in attach:
        if ref not in free:
            raise MultipoleError(f"{ref} is not a free end")
        if ref in targets:
            raise MultipoleError(f"free end {ref} attached twice")
        if not (0 <= v < m.n):
            raise MultipoleError(f"no vertex {v}")
        targets[ref] = v
    raw = []
    for i, (a, b) in enumerate(m.edges):
        na = targets.get((i, 0), a) if a is None else a
        nb = targets.get((i, 1), b) if b is None else b
        raw.append((na, nb))
    canon, cmap = _canonical_edges(raw)
    emap = {i: cmap[(i, 0)][0] for i in range(m.num_edges)}
    endmap = {
        (i, s): cmap[(i, s)]
        for i in range(m.num_edges)
        for s in (0, 1)
    }
    connectors = []
    for c in m.connectors:
        if any(ref in targets for ref in c):
            continue
        connectors.append(tuple(endmap[ref] for ref in c))
    res = Multipole(m.n, canon, connectors)
    return OpResult(res, (OpMaps({v: v for v in range(m.n)}, emap, endmap),))


def junction(
    a: Multipole,
    ca: int,
    b: Multipole,
    cb: int,
    perm: Optional[Sequence[int]] = None,
) -> OpResult:
    """Join connector ``ca`` of ``a`` to connector ``cb`` of ``b``.

    The i-th free end of ``ca`` is identified with the ``perm[i]``-th
    free end of ``cb`` (identity by default).  Connector sizes must
    match.  Returns maps for ``a`` and ``b``.
    """
    if not (0 <= ca < len(a.connectors)):
        raise MultipoleError(f"multipole has no connector {ca}")
    if not (0 <= cb < len(b.connectors)):
        raise MultipoleError(f"multipole has no connector {cb}")
    ends_a = a.connectors[ca]
    ends_b = b.connectors[cb]
    if len(ends_a) != len(ends_b):
        raise MultipoleError(
            f"connector size mismatch: {len(ends_a)} vs {len(ends_b)}"
        )
    k = len(ends_a)
    if perm is None:
        perm = tuple(range(k))
    if sorted(perm) != list(range(k)):
        raise MultipoleError(f"invalid permutation {perm!r}")
    u = disjoint_union([a, b])
    ma, mb = u.maps
    pairs = [(ma.end[ends_a[i]], mb.end[ends_b[perm[i]]]) for i in range(k)]
    p = pair_free_ends(u.multipole, pairs)
    return OpResult(p.multipole, (_compose(ma, p.maps[0]), _compose(mb, p.maps[0])))


def _compose(first: OpMaps, second: OpMaps) -> OpMaps:
    return OpMaps(
        {v: second.vertex[w] for v, w in first.vertex.items() if w in second.vertex},
        {e: second.edge[f] for e, f in first.edge.items() if f in second.edge},
        {r: second.end[s] for r, s in first.end.items() if s in second.end},
    )


def substitute_vertex(
    g: Multipole,
    v: int,
    sup: Multipole,
    assignment: Optional[Sequence[EndRef]] = None,
) -> OpResult:
    """Replace vertex ``v`` by the multipole ``sup`` (a supervertex).

    ``assignment`` lists free ends of ``sup``, one per edge end formerly
    incident with ``v`` (in canonical incidence order).  By default the
    ends of ``sup``'s first connector are used in order.  The arity of
    ``sup``'s designated ends must match deg(v).

    Returns maps for ``g`` and ``sup``.
    """
    deg = g.degree(v)
    if assignment is None:
        if not sup.connectors:
            raise MultipoleError("supervertex has no connector to attach by")
        assignment = sup.connectors[0]
    assignment = tuple(assignment)
    if len(assignment) != deg:
        raise MultipoleError(
            f"arity mismatch: vertex {v} has degree {deg}, "
            f"assignment has {len(assignment)} ends"
        )
    stubs = g.ends_at(v)  # canonical order
    d = delete_vertices(g, [v], keep_dangling=True)
    gm = d.maps[0]
    u = disjoint_union([d.multipole, sup])
    um_g, um_s = u.maps
    pairs = []
    for stub, sup_end in zip(stubs, assignment):
        new_stub = um_g.end[gm.end[stub]]
        pairs.append((new_stub, um_s.end[sup_end]))
    p = pair_free_ends(u.multipole, pairs)
    return OpResult(
        p.multipole,
        (
            _compose(gm, _compose(um_g, p.maps[0])),
            _compose(um_s, p.maps[0]),
        ),
    )


def substitute_edge(
    g: Multipole,
    e: int,
    sup: Multipole,
    ca: int,
    cb: int,
) -> OpResult:
    """Replace edge ``e`` by the dipole ``sup`` (a superedge).

    The free ends of connector ``ca`` become incident with the first
    endpoint of ``e`` and those of ``cb`` with the second; when a
    connector has more than one end the endpoint turns into a
    supervertex position of raised degree, to be substituted later.

    Returns maps for ``g`` and ``sup``.
    """
    a, b = g.edges[e]
    if a is None or b is None:
        raise MultipoleError("cannot substitute a dangling or isolated edge")
    if a == b:
        raise MultipoleError("cannot substitute a loop")
    for c in (ca, cb):
        if not (0 <= c < len(sup.connectors)):
            raise MultipoleError(f"superedge has no connector {c}")
    if ca == cb:
        raise MultipoleError("superedge connectors must be distinct")
    d = delete_edges(g, [e])
    gm = d.maps[0]
    u = disjoint_union([d.multipole, sup])
    um_g, um_s = u.maps
    attach = []
    for ref in sup.connectors[ca]:
        attach.append((um_s.end[ref], um_g.vertex[gm.vertex[a]]))
    for ref in sup.connectors[cb]:
        attach.append((um_s.end[ref], um_g.vertex[gm.vertex[b]]))
    at = attach_free_ends(u.multipole, attach)
    return OpResult(
        at.multipole,
        (
            _compose(gm, _compose(um_g, at.maps[0])),
            _compose(um_s, at.maps[0]),
        ),
    )


def with_connectors(m: Multipole, connectors: Sequence[Sequence[EndRef]]) -> Multipole:
    """Same multipole with connectors replaced."""
    return Multipole(m.n, m.edges, connectors)


def extract_region(m: Multipole, vertices: Iterable[int]) -> tuple[Multipole, list[int]]:
    """Induced sub-multipole on a vertex set, cut edges kept dangling.

    Free ends of the region are ordered by the canonical index of the
    cut edge in ``m``.  Returns the sub-multipole (one connector holding
    all its free ends, in that order) and the list of cut edge indices
    of ``m`` in the same order.
    """
    vs = sorted(set(vertices))
    inside = set(vs)
    vmap = {v: i for i, v in enumerate(vs)}
    raw = []
    cut: list[tuple[int, int]] = []  # (old edge idx, raw pos)
    for i, (a, b) in enumerate(m.edges):
        ain = a is not None and a in inside
        bin_ = b is not None and b in inside
        if not (ain or bin_):
            continue
        if (a is None or b is None) and (ain or bin_):
            raise MultipoleError("region touches a free end of the host")
        if ain and bin_:
            raw.append((vmap[a], vmap[b]))
        else:
            pos = len(raw)
            raw.append((vmap[a] if ain else None, vmap[b] if bin_ else None))
            cut.append((i, pos))
    canon, cmap = _canonical_edges(raw)
    conn = []
    cut_edges = []
    for old_idx, pos in cut:
        slot = 0 if raw[pos][0] is None else 1
        conn.append(cmap[(pos, slot)])
        cut_edges.append(old_idx)
    return Multipole(len(vs), canon, [conn]), cut_edges


@dataclass(frozen=True)
class ContractionResult:
    """Result of contracting vertex regions to hub vertices."""

    multipole: Multipole
    hubs: tuple[int, ...]                     # hub vertex per region
    hub_cut_edges: tuple[tuple[int, ...], ...]  # old cut-edge ids, in hub incidence order
    edge_map: dict[int, int]                  # surviving old edge -> new edge
    end_map: dict[EndRef, EndRef]             # surviving ends


def contract_regions(
    m: Multipole, regions: Sequence[Iterable[int]]
) -> ContractionResult:
    """Contract disjoint vertex sets, one hub vertex per region.

    Region-interior edges disappear.  Regions may not touch free-end
    edges.  Hub vertices are numbered after the surviving vertices, in
    region order.
    """
    reg_sets = [set(r) for r in regions]
    all_region = set()
    for r in reg_sets:
        if r & all_region:
            raise MultipoleError("regions overlap")
        all_region |= r
    vmap = {}
    nxt = 0
    for v in range(m.n):
        if v not in all_region:
            vmap[v] = nxt
            nxt += 1
    hub_of = {}
    hubs = []
    for r in reg_sets:
        hub = nxt
        nxt += 1
        hubs.append(hub)
        for v in r:
            hub_of[v] = hub
    raw = []
    raw_old = []
    for i, (a, b) in enumerate(m.edges):
        ain = a is not None and a in all_region
        bin_ = b is not None and b in all_region
        if ain and bin_:
            if hub_of[a] != hub_of[b]:
                raise MultipoleError("edge joins two distinct regions")
            continue
        if (a is None or b is None) and (ain or bin_):
            raise MultipoleError("region touches a free-end edge")
        na = hub_of[a] if ain else (None if a is None else vmap[a])
        nb = hub_of[b] if bin_ else (None if b is None else vmap[b])
        raw_old.append(i)
        raw.append((na, nb))
    canon, cmap = _canonical_edges(raw)
    edge_map = {old: cmap[(pos, 0)][0] for pos, old in enumerate(raw_old)}
    end_map = {
        (old, s): cmap[(pos, s)]
        for pos, old in enumerate(raw_old)
        for s in (0, 1)
    }
    connectors = [
        tuple(end_map[ref] for ref in c)
        for c in m.connectors
        if all(ref in end_map for ref in c)
    ]
    res = Multipole(nxt, canon, connectors)
    new_to_old = {new: old for old, new in edge_map.items()}
    hub_cut = tuple(
        tuple(new_to_old[e] for e, _ in res.ends_at(h)) for h in hubs
    )
    return ContractionResult(res, tuple(hubs), hub_cut, edge_map, end_map)


# ---------------------------------------------------------------------------
# structural algorithms


def connected(m: Multipole) -> bool:
    """Vertex connectivity in the topological sense (isolated edges ignored)."""
    if m.n == 0:
        return True
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in m.neighbours(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == m.n


def components(m: Multipole) -> list[list[int]]:
    seen = set()
    comps = []
    for s in range(m.n):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            v = stack.pop()
            for w in m.neighbours(v):
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def has_cycle(m: Multipole) -> bool:
    """True iff the multipole contains a circuit (loops and parallels count)."""
    parent_edge = [-1] * m.n
    seen = [False] * m.n
    for s in range(m.n):
        if seen[s]:
            continue
        seen[s] = True
        stack = [(s, -1)]
        while stack:
            v, pe = stack.pop()
            for e, slot in m.ends_at(v):
                if e == pe:
                    continue
                w = m.edges[e][1 - slot]
                if w is None:
                    continue
                if w == v:
                    return True  # loop
                if seen[w]:
                    return True
                seen[w] = True
                stack.append((w, e))
    return False


def _component_has_cycle(nv: int, adj: dict[int, list[tuple[int, int]]], start: int,
                         seen: set[int]) -> bool:
    """DFS cycle check on an adjacency dict {v: [(edge_id, w)]}."""
    stack = [(start, -1)]
    seen.add(start)
    while stack:
        v, pe = stack.pop()
        for e, w in adj.get(v, ()):
            if e == pe:
                continue
            if w == v:
                return True
            if w in seen:
                return True
            seen.add(w)
            stack.append((w, e))
    return False


def is_decycling(m: Multipole, vertices: Iterable[int]) -> bool:
    """True iff removing the vertex set leaves an acyclic multipole."""
    rest = delete_vertices(m, vertices, keep_dangling=False).multipole
    return not has_cycle(rest)


def girth(m: Multipole) -> int:
    """Length of a shortest circuit; loops count 1, parallel pairs 2.

    Raises MultipoleError on forests.
    """
    best = None
    # loops and parallel edges first
    pair_count: dict[tuple[int, int], int] = {}
    for a, b in m.edges:
        if a is None or b is None:
            continue
        if a == b:
            return 1
        key = (min(a, b), max(a, b))
        pair_count[key] = pair_count.get(key, 0) + 1
    if any(c >= 2 for c in pair_count.values()):
        return 2
    # simple BFS girth: scan from every root
    adj: list[list[tuple[int, int]]] = [[] for _ in range(m.n)]
    for i, (a, b) in enumerate(m.edges):
        if a is None or b is None:
            continue
        adj[a].append((i, b))
        adj[b].append((i, a))
    for root in range(m.n):
        dist = {root: 0}
        par = {root: -1}
        q = deque([root])
        while q:
            v = q.popleft()
            if best is not None and dist[v] * 2 >= best:
                break
            for e, w in adj[v]:
                if e == par[v]:
                    continue
                if w not in dist:
                    dist[w] = dist[v] + 1
                    par[w] = e
                    q.append(w)
                else:
                    cyc = dist[v] + dist[w] + 1
                    if best is None or cyc < best:
                        best = cyc
    if best is None:
        raise MultipoleError("girth is undefined for a forest")
    return best


def girth_exhaustive(m: Multipole) -> int:
    """Oracle girth by DFS enumeration of all circuits (small graphs only)."""
    for a, b in m.edges:
        if a is not None and a == b:
            return 1
    best = None
    mm = m.num_edges

    def extend(path_vertices, path_edges, start, cur):
        nonlocal best
        for e, slot in m.ends_at(cur):
            if e in path_edges:
                continue
            w = m.edges[e][1 - slot]
            if w is None:
                continue
            if w == start and len(path_edges) >= 1:
                length = len(path_edges) + 1
                if best is None or length < best:
                    best = length
            elif w not in path_vertices and (best is None or len(path_edges) + 1 < best):
                path_vertices.add(w)
                path_edges.add(e)
                extend(path_vertices, path_edges, start, w)
                path_vertices.discard(w)
                path_edges.discard(e)

    for s in range(m.n):
        extend({s}, set(), s, s)
    if best is None:
        raise MultipoleError("girth is undefined for a forest")
    return best


def bridges(m: Multipole) -> list[int]:
    """Edge indices of all bridges (multigraph-aware)."""
    low = [0] * m.n
    num = [-1] * m.n
    out: list[int] = []
    counter = 0
    for s in range(m.n):
        if num[s] != -1:
            continue
        stack = [(s, -1, iter(m.ends_at(s)))]
        num[s] = low[s] = counter
        counter += 1
        while stack:
            v, pe, it = stack[-1]
            advanced = False
            for e, slot in it:
                if e == pe:
                    continue
                w = m.edges[e][1 - slot]
                if w is None:
                    continue
                if w == v:
                    continue
                if num[w] == -1:
                    num[w] = low[w] = counter
                    counter += 1
                    stack.append((w, e, iter(m.ends_at(w))))
                    advanced = True
                    break
                else:
                    low[v] = min(low[v], num[w])
            if not advanced:
                stack.pop()
                if stack:
                    u = stack[-1][0]
                    low[u] = min(low[u], low[v])
                    if low[v] > num[u]:
                        out.append(pe)
        # loop ended
    return sorted(out)


def is_bridgeless(m: Multipole) -> bool:
    return not bridges(m)


def bipartition(m: Multipole) -> Optional[tuple[set[int], set[int]]]:
    """2-colouring of the vertices, or None if not bipartite."""
    colour: dict[int, int] = {}
    for s in range(m.n):
        if s in colour:
            continue
        colour[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            for w in m.neighbours(v):
                if w == v:
                    return None
                if w not in colour:
                    colour[w] = 1 - colour[v]
                    q.append(w)
                elif colour[w] == colour[v]:
                    return None
    a = {v for v, c in colour.items() if c == 0}
    return a, set(range(m.n)) - a


# ---------------------------------------------------------------------------
# cuts and flows between vertex sets


class MaxflowSolver:
    """Reusable unit-capacity max-flow between contracted vertex sets.

    Each undirected edge becomes two unit arcs; arcs 2i and 2i+1 are
    mutual reverses of edge i.  State touched by one query is reset
    before the next, so a solver can serve many queries cheaply.
    """

    def __init__(self, m: Multipole):
        self.m = m
        self.arcs_from: list[list[int]] = [[] for _ in range(m.n)]
        self.arc_to: list[int] = []
        self.arc_edge: list[int] = []
        for i, (a, b) in enumerate(m.edges):
            if a is None or b is None or a == b:
                self.arc_to.extend((-1, -1))
                self.arc_edge.extend((i, i))
                continue
            self.arcs_from[a].append(len(self.arc_to))
            self.arc_to.append(b)
            self.arcs_from[b].append(len(self.arc_to))
            self.arc_to.append(a)
            self.arc_edge.extend((i, i))
        self.arc_cap = [1] * len(self.arc_to)
        self._touched: list[int] = []

    def mincut(
        self,
        side_a: Iterable[int],
        side_b: Iterable[int],
        limit: Optional[int] = None,
    ) -> tuple[int, list[int]]:
        """(flow value, cut edge list).

        With ``limit``, stops once ``limit`` augmenting paths exist; the
        cut list is then empty and the value is only a lower bound.
        """
        A = set(side_a)
        B = set(side_b)
        if A & B:
            raise MultipoleError("cut sides overlap")
        for k in self._touched:
            self.arc_cap[k] = 1
        self._touched.clear()
        arcs_from, arc_to, arc_cap = self.arcs_from, self.arc_to, self.arc_cap
        flow = 0
        in_b = B.__contains__
        while True:
            if limit is not None and flow >= limit:
                return flow, []
            pred: dict[int, int] = {}
            q = deque(A)
            seen = set(A)
            found = -1
            while q:
                v = q.popleft()
                for k in arcs_from[v]:
                    if arc_cap[k] <= 0:
                        continue
                    w = arc_to[k]
                    if w in seen:
                        continue
                    seen.add(w)
                    pred[w] = k
                    if in_b(w):
                        found = w
                        break
                    q.append(w)
                if found >= 0:
                    break
            if found < 0:
                cut = sorted(
                    {
                        self.arc_edge[k]
                        for v in seen
                        for k in arcs_from[v]
                        if arc_to[k] not in seen
                    }
                )
                return flow, cut
            v = found
            while v not in A:
                k = pred[v]
                arc_cap[k] -= 1
                arc_cap[k ^ 1] += 1
                self._touched.append(k)
                self._touched.append(k ^ 1)
                v = arc_to[k ^ 1]
            flow += 1


def min_edge_cut(
    m: Multipole, side_a: Iterable[int], side_b: Iterable[int], limit: Optional[int] = None
) -> tuple[int, list[int]]:
    """Minimum edge cut separating two disjoint vertex sets."""
    return MaxflowSolver(m).mincut(side_a, side_b, limit)


def edge_connectivity(m: Multipole, limit: Optional[int] = None) -> int:
    """Global edge connectivity of the underlying graph.

    With ``limit`` each s-t computation stops at ``limit`` paths, so the
    result is min(true connectivity, limit).
    """
    if m.n < 2:
        return 0
    if not connected(m):
        return 0
    best = None
    for t in range(1, m.n):
        val, _ = min_edge_cut(m, [0], [t], limit=limit)
        if best is None or val < best:
            best = val
    return best


# ---------------------------------------------------------------------------
# canonical text and checksums


def canonical_text(m: Multipole) -> str:
    """Native text format; see formats.serialize_multipole."""
    from . import formats

    return formats.serialize_multipole(m)


def checksum(m: Multipole) -> str:
    return hashlib.sha256(canonical_text(m).encode("ascii")).hexdigest()
