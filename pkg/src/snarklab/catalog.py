"""Named cubic graphs: small classics, snark families, and the cage
registry used by the superposition builders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .multipole import (
    Multipole,
    MultipoleError,
    bipartition,
    build_multipole,
    connected,
    girth,
    graph_from_edges,
    is_bridgeless,
    substitute_vertex,
)


def edge_index(g: Multipole, u: int, v: int) -> int:
    """Canonical index of the first edge joining u and v."""
    key = (min(u, v), max(u, v))
    for i, (a, b) in enumerate(g.edges):
        if a is not None and b is not None and (min(a, b), max(a, b)) == key:
            return i
    raise MultipoleError(f"no edge {u}-{v}")


# ---------------------------------------------------------------------------
# small classics


def petersen() -> Multipole:
    """Outer cycle 0..4, inner pentagram 5..9 (i+5 ~ i+2+5), spokes i ~ i+5."""
    edges = []
    for i in range(5):
        edges.append((i, (i + 1) % 5))
        edges.append((i, i + 5))
        edges.append((i + 5, (i + 2) % 5 + 5))
    return graph_from_edges(10, edges)


def k4() -> Multipole:
    return graph_from_edges(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])


def k33() -> Multipole:
    return graph_from_edges(6, [(i, j + 3) for i in range(3) for j in range(3)])


def theta_graph() -> Multipole:
    """Two vertices joined by three parallel edges."""
    return graph_from_edges(2, [(0, 1), (0, 1), (0, 1)])


def dumbbell() -> Multipole:
    """Two looped vertices joined by a bridge; cubic with loops."""
    return graph_from_edges(2, [(0, 0), (0, 1), (1, 1)])


def generalized_petersen(n: int, k: int) -> Multipole:
    """GP(n, k): outer n-cycle, inner star polygon, spokes."""
    if not (n >= 3 and 1 <= k < n and 2 * k != n):
        raise MultipoleError(f"GP({n},{k}) is not cubic")
    edges = []
    for i in range(n):
        edges.append((i, (i + 1) % n))
        edges.append((i, n + i))
        edges.append((n + i, n + (i + k) % n))
    return graph_from_edges(2 * n, edges)


def prism() -> Multipole:
    return generalized_petersen(3, 1)


def cube() -> Multipole:
    return generalized_petersen(4, 1)


def wagner() -> Multipole:
    """Moebius ladder on 8 vertices."""
    edges = [(i, (i + 1) % 8) for i in range(8)] + [(i, i + 4) for i in range(4)]
    return graph_from_edges(8, edges)


def durer() -> Multipole:
    return generalized_petersen(6, 2)


def desargues() -> Multipole:
    return generalized_petersen(10, 3)


def lcf(n: int, pattern: list[int], repeats: int) -> Multipole:
    """LCF notation: Hamilton cycle 0..n-1 plus chords i ~ i + d_i."""
    if len(pattern) * repeats != n:
        raise MultipoleError("LCF pattern length mismatch")
    edges = [(i, (i + 1) % n) for i in range(n)]
    chords = set()
    for i in range(n):
        d = pattern[i % len(pattern)]
        j = (i + d) % n
        chords.add((min(i, j), max(i, j)))
    if len(chords) != n // 2:
        raise MultipoleError("inconsistent LCF chord set")
    edges.extend(sorted(chords))
    return graph_from_edges(n, edges)


def heawood() -> Multipole:
    return lcf(14, [5, -5], 7)


def mcgee() -> Multipole:
    return lcf(24, [12, 7, -7], 8)


def tutte_coxeter() -> Multipole:
    return lcf(30, [-13, -9, 7, -7, 9, 13], 5)


def tietze() -> Multipole:
    """Petersen with one vertex expanded into a triangle (girth 3)."""
    tri = build_multipole(
        3, [(0, 1), (1, 2), (2, 0), (0, "a"), (1, "b"), (2, "c")], [["a", "b", "c"]]
    )
    return substitute_vertex(petersen(), 0, tri).multipole


# ---------------------------------------------------------------------------
# snark families


def flower_snark(k: int) -> Multipole:
    """Isaacs flower snark J_k (odd k >= 5): 4k vertices.

    Hub i sits on b_i, c_i, d_i; the b's form a k-cycle and the c's and
    d's a twisted 2k-cycle.
    """
    if k < 3 or k % 2 == 0:
        raise MultipoleError("flower snarks need odd k >= 3")
    A = lambda i: 4 * i
    B = lambda i: 4 * i + 1
    C = lambda i: 4 * i + 2
    D = lambda i: 4 * i + 3
    edges = []
    for i in range(k):
        edges += [(A(i), B(i)), (A(i), C(i)), (A(i), D(i))]
        edges.append((B(i), B((i + 1) % k)))
        if i < k - 1:
            edges.append((C(i), C(i + 1)))
            edges.append((D(i), D(i + 1)))
    edges.append((C(k - 1), D(0)))
    edges.append((D(k - 1), C(0)))
    return graph_from_edges(4 * k, edges)


def dot_product(
    g: Multipole, e1: int, e2: int, h: Multipole, u: int, v: int
) -> Multipole:
    """Isaacs dot product of two cubic graphs.

    Removes the independent edges e1, e2 from g and the adjacent
    vertices u, v from h, then joins the four stubs of g to the four
    dangling edges of h in canonical order.  The dot product of two
    snarks is again a snark.
    """
    x1, y1 = g.edges[e1]
    x2, y2 = g.edges[e2]
    if len({x1, y1, x2, y2}) != 4:
        raise MultipoleError("dot product needs two independent edges")
    if v not in h.neighbours(u):
        raise MultipoleError("dot product needs two adjacent vertices")
    u_nb = sorted(w for w in h.neighbours(u) if w != v)
    v_nb = sorted(w for w in h.neighbours(v) if w != u)
    if len(u_nb) != 2 or len(v_nb) != 2:
        raise MultipoleError("removed vertices must have two other neighbours each")
    off = g.n
    hmap = {}
    nxt = off
    for w in range(h.n):
        if w in (u, v):
            continue
        hmap[w] = nxt
        nxt += 1
    edges = [e for i, e in enumerate(g.edges) if i not in (e1, e2)]
    for i, (a, b) in enumerate(h.edges):
        if a in (u, v) or b in (u, v):
            continue
        edges.append((hmap[a], hmap[b]))
    edges.append((x1, hmap[u_nb[0]]))
    edges.append((y1, hmap[u_nb[1]]))
    edges.append((x2, hmap[v_nb[0]]))
    edges.append((y2, hmap[v_nb[1]]))
    return graph_from_edges(nxt, edges)


def blanusa_first() -> Multipole:
    """Dot product of two Petersen graphs over an edge pair at distance 1."""
    p = petersen()
    return dot_product(p, edge_index(p, 0, 1), edge_index(p, 2, 3), p, 0, 1)


def blanusa_second() -> Multipole:
    """Dot product of two Petersen graphs over an edge pair at distance 2."""
    p = petersen()
    return dot_product(p, edge_index(p, 0, 1), edge_index(p, 7, 9), p, 0, 1)


def _first_independent_edge_pair(g: Multipole) -> tuple[int, int]:
    for i, (a, b) in enumerate(g.edges):
        for j in range(i + 1, g.num_edges):
            c, d = g.edges[j]
            if len({a, b, c, d}) == 4:
                return i, j
    raise MultipoleError("no independent edge pair")


# ---------------------------------------------------------------------------
# cage registry


@dataclass(frozen=True)
class CageEntry:
    name: str
    girth: int
    bipartite: bool
    graph: Multipole


def _validated_cage(name: str, expect_girth: int, g: Multipole) -> CageEntry:
    if not g.is_cubic_graph():
        raise MultipoleError(f"cage {name} is not a cubic graph")
    if not connected(g):
        raise MultipoleError(f"cage {name} is not connected")
    gv = girth(g)
    if gv != expect_girth:
        raise MultipoleError(f"cage {name}: girth {gv}, expected {expect_girth}")
    bip = bipartition(g) is not None
    return CageEntry(name, gv, bip, g)


_CAGE_BUILDERS = {
    "heawood": (6, heawood),
    "mcgee": (7, mcgee),
    "tutte-coxeter": (8, tutte_coxeter),
}


def cage(name: str) -> CageEntry:
    """A registry cage, revalidated on load."""
    key = name.lower().replace("_", "-")
    if key not in _CAGE_BUILDERS:
        raise MultipoleError(
            f"unknown cage {name!r}; available: {', '.join(sorted(_CAGE_BUILDERS))}"
        )
    expect, builder = _CAGE_BUILDERS[key]
    return _validated_cage(key, expect, builder())


def cage_from_graph(name: str, g: Multipole, expect_girth: Optional[int] = None) -> CageEntry:
    """Wrap a user-supplied graph as a cage entry (girth recomputed)."""
    gv = girth(g)
    return _validated_cage(name, expect_girth if expect_girth is not None else gv, g)


def cage_for_girth(g: int) -> CageEntry:
    for key, (girth_val, _) in _CAGE_BUILDERS.items():
        if girth_val == g:
            return cage(key)
    raise MultipoleError(
        f"no registry cage of girth {g}; supply a cubic graph file of that girth"
    )


# ---------------------------------------------------------------------------
# the test corpus


def corpus_colourable() -> dict[str, Multipole]:
    return {
        "k4": k4(),
        "theta": theta_graph(),
        "k33": k33(),
        "prism": prism(),
        "cube": cube(),
        "wagner": wagner(),
        "durer": durer(),
        "heawood": heawood(),
    }


def corpus_snarks() -> dict[str, Multipole]:
    """At least ten snarks, including Petersen, both Blanusa snarks and
    the flower snark J5 (verified uncolourable by the test suite)."""
    p = petersen()
    b1 = blanusa_first()
    b2 = blanusa_second()
    j5 = flower_snark(5)
    out = {
        "petersen": p,
        "tietze": tietze(),
        "blanusa1": b1,
        "blanusa2": b2,
        "flower-j5": j5,
        "flower-j7": flower_snark(7),
    }
    e1, e2 = _first_independent_edge_pair(b1)
    out["blanusa1-dot-petersen"] = dot_product(b1, e1, e2, p, 0, 1)
    e1, e2 = _first_independent_edge_pair(b2)
    out["blanusa2-dot-petersen"] = dot_product(b2, e1, e2, p, 0, 1)
    e1, e2 = _first_independent_edge_pair(j5)
    out["j5-dot-petersen"] = dot_product(j5, e1, e2, p, 0, 1)
    hu, hv = b1.edges[0]
    out["petersen-dot-blanusa1"] = dot_product(
        p, edge_index(p, 0, 1), edge_index(p, 3, 8), b1, hu, hv
    )
    return out


def corpus_all() -> dict[str, Multipole]:
    out = dict(corpus_colourable())
    out.update(corpus_snarks())
    return out


def corpus_small_bridgeless() -> dict[str, Multipole]:
    """Bridgeless cubic corpus members with at most 14 vertices."""
    out = {}
    for name, g in corpus_all().items():
        if g.n <= 14 and g.is_cubic_graph() and is_bridgeless(g):
            out[name] = g
    return out
