"""Stable dual graphs: canonical forms, automorphisms, contraction, enumeration.

A stable graph of type (g, n) is the combinatorial shadow of a nodal curve:
vertices carry geometric genera g_v >= 0, markings 1..n sit on vertices as
legs, and each node of the curve becomes an edge.  We store

  genera : tuple of ints, one per vertex 0..V-1
  legs   : tuple of sorted tuples of markings, one per vertex
  edges  : tuple of pairs (u, v) with u <= v; loops have u == v

Edge i owns the two half-edges 2i (at u) and 2i+1 (at v).  Half-edge ids are
therefore graph-scoped small integers; the partner of h is h ^ 1.

Constraints enforced throughout:
  * genus condition   sum(g_v) + E - V + 1 = g
  * connectedness
  * stability         2 g_v - 2 + n_v > 0 at every vertex, where n_v counts
                      legs and half-edges at v.

Canonical form: vertices are colored by (genus, legs, valence data), colors
are refined by neighbor multisets until stable, and the lexicographically
minimal relabeling over all color-preserving vertex permutations is taken.
Automorphisms act on vertices AND half-edges: swapping the two half-edges of
a loop, or interchanging parallel edges, are nontrivial automorphisms.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence


class DomainError(ValueError):
    """Raised for inputs outside the supported domain (unstable, malformed)."""


# ---------------------------------------------------------------------------
# the graph record


@dataclass(frozen=True)
class StableGraph:
    """A stable graph in canonical or raw labeling.

    Instances are immutable and hashable; use ``canonical()`` to obtain the
    canonical representative (plus relabeling maps).  Public computations
    expect canonical instances; raw ones appear only as intermediate data.
    """

    genera: tuple[int, ...]
    legs: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]

    # -- basic invariants ---------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_legs(self) -> int:
        return sum(len(l) for l in self.legs)

    @property
    def h1(self) -> int:
        """First Betti number of the graph."""
        return self.num_edges - self.num_vertices + 1

    def genus(self) -> int:
        return sum(self.genera) + self.h1

    def markings(self) -> tuple[int, ...]:
        return tuple(sorted(m for l in self.legs for m in l))

    def num_loops_at(self, v: int) -> int:
        return sum(1 for (a, b) in self.edges if a == b == v)

    def half_edges_at(self, v: int) -> tuple[int, ...]:
        """Half-edge ids incident to v, loops contributing both halves."""
        out = []
        for i, (a, b) in enumerate(self.edges):
            if a == v:
                out.append(2 * i)
            if b == v:
                out.append(2 * i + 1)
        return tuple(out)

    def vertex_of(self, h: int) -> int:
        e, side = divmod(h, 2)
        return self.edges[e][side]

    def valence(self, v: int) -> int:
        """Number of special points on vertex v: legs plus half-edges."""
        return len(self.legs[v]) + len(self.half_edges_at(v))

    def vertex_dim(self, v: int) -> int:
        """Dimension 3g_v - 3 + n_v of the moduli factor at v."""
        return 3 * self.genera[v] - 3 + self.valence(v)

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        V = self.num_vertices
        if V == 0:
            raise DomainError("graph needs at least one vertex")
        if any(g < 0 for g in self.genera):
            raise DomainError("negative genus")
        seen: set[int] = set()
        for l in self.legs:
            if tuple(sorted(l)) != tuple(l):
                raise DomainError("legs must be sorted per vertex")
            for m in l:
                if m in seen:
                    raise DomainError("repeated marking %d" % m)
                seen.add(m)
        marks = self.markings()
        if marks != tuple(range(1, len(marks) + 1)):
            raise DomainError("markings must be 1..n")
        for (a, b) in self.edges:
            if not (0 <= a <= b < V):
                raise DomainError("edge endpoints out of range or unsorted")
        if not self.is_connected():
            raise DomainError("graph not connected")
        for v in range(V):
            if 2 * self.genera[v] - 2 + self.valence(v) <= 0:
                raise DomainError("unstable vertex %d" % v)

    def is_connected(self) -> bool:
        V = self.num_vertices
        if V == 1:
            return True
        adj: list[set[int]] = [set() for _ in range(V)]
        for (a, b) in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == V

    # -- classification -----------------------------------------------------

    def is_smooth(self) -> bool:
        """No edges: the open stratum."""
        return self.num_edges == 0

    def is_tree(self) -> bool:
        """Compact-type graphs: h1 = 0 (hence in particular no loops)."""
        return self.h1 == 0

    def is_treelike(self) -> bool:
        """Treelike graphs: removing all loops leaves a tree."""
        loops = sum(1 for (a, b) in self.edges if a == b)
        return self.num_edges - loops - self.num_vertices + 1 == 0

    # -- text encoding -------------------------------------------------------

    def encode(self) -> str:
        """Deterministic text form: vertices ``(g|legs)`` then edges as
        sorted pairs of (vertex, slot), slots counting edge ends per vertex
        in edge order."""
        vparts = []
        for g, l in zip(self.genera, self.legs):
            vparts.append("(%d|%s)" % (g, ",".join(str(m) for m in l)))
        slot = [0] * self.num_vertices
        eparts = []
        for (a, b) in self.edges:
            sa = slot[a]
            slot[a] += 1
            sb = slot[b]
            slot[b] += 1
            eparts.append("((%d,%d),(%d,%d))" % (a, sa, b, sb))
        return ";".join(vparts) + "#" + ";".join(eparts)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.encode()


_VERTEX_RE = re.compile(r"^\((\d+)\|([\d,]*)\)$")
_EDGE_RE = re.compile(r"^\(\((\d+),(\d+)\),\((\d+),(\d+)\)\)$")


def decode_graph(text: str) -> StableGraph:
    """Inverse of :meth:`StableGraph.encode` (slots are validated)."""
    if not isinstance(text, str):
        raise DomainError("graph encoding must be a string")
    if "#" not in text:
        raise DomainError("missing '#' separator in graph encoding")
    vtext, etext = text.split("#", 1)
    genera = []
    legs = []
    for part in vtext.split(";"):
        m = _VERTEX_RE.match(part)
        if not m:
            raise DomainError("bad vertex %r" % part)
        genera.append(int(m.group(1)))
        legs.append(tuple(int(x) for x in m.group(2).split(",") if x))
    edges = []
    for part in etext.split(";") if etext else []:
        m = _EDGE_RE.match(part)
        if not m:
            raise DomainError("bad edge %r" % part)
        edges.append((int(m.group(1)), int(m.group(3))))
    graph = StableGraph(tuple(genera), tuple(legs), tuple(edges))
    graph.validate()
    if graph.encode() != text:
        raise DomainError("non-canonical slot data in graph encoding")
    return graph


# ---------------------------------------------------------------------------
# canonical form


def _refined_colors(graph: StableGraph) -> list:
    """Iterated color refinement; returns one comparable color per vertex."""
    V = graph.num_vertices
    colors: list = [
        (graph.genera[v], graph.legs[v], len(graph.half_edges_at(v)),
         graph.num_loops_at(v))
        for v in range(V)
    ]
    for _ in range(V):
        neigh: list[list] = [[] for _ in range(V)]
        for (a, b) in graph.edges:
            if a != b:
                neigh[a].append(colors[b])
                neigh[b].append(colors[a])
        new = [(colors[v], tuple(sorted(neigh[v]))) for v in range(V)]
        # re-intern nested tuples as dense ints to keep colors comparable
        palette = sorted(set(new))
        new_ids = [palette.index(c) for c in new]
        old_ids = [sorted(set(colors)).index(c) for c in colors]
        if new_ids == old_ids:
            break
        colors = new_ids
    return colors


def _relabel(graph: StableGraph, perm: Sequence[int]) -> tuple:
    """Encoding tuple of the graph with vertex v renamed perm[v]."""
    V = graph.num_vertices
    genera = [0] * V
    legs: list[tuple[int, ...]] = [()] * V
    for v in range(V):
        genera[perm[v]] = graph.genera[v]
        legs[perm[v]] = graph.legs[v]
    edges = sorted(
        (min(perm[a], perm[b]), max(perm[a], perm[b])) for (a, b) in graph.edges
    )
    return (tuple(genera), tuple(legs), tuple(edges))


def _candidate_perms(graph: StableGraph) -> Iterator[list[int]]:
    """All vertex permutations compatible with the refined coloring."""
    V = graph.num_vertices
    colors = _refined_colors(graph)
    classes: dict = {}
    for v in range(V):
        classes.setdefault(colors[v], []).append(v)
    ordered = [classes[c] for c in sorted(classes)]
    starts = []
    pos = 0
    for cl in ordered:
        starts.append(pos)
        pos += len(cl)
    for arrangement in itertools.product(
        *(itertools.permutations(cl) for cl in ordered)
    ):
        perm = [0] * V
        for cl_idx, placed in enumerate(arrangement):
            for offset, v in enumerate(placed):
                perm[v] = starts[cl_idx] + offset
        yield perm


def _half_edge_map(graph: StableGraph, perm: Sequence[int],
                   new_edges: tuple[tuple[int, int], ...]) -> tuple[list[int], list[int]]:
    """Edge and half-edge maps induced by a vertex relabeling.

    Parallel originals are matched to consecutive new slots in original edge
    order; any other matching differs by an automorphism of the target.
    Returns (edge_map, hemap) with hemap[h] the image half-edge id.
    """
    buckets: dict[tuple[int, int], list[int]] = {}
    for j, pair in enumerate(new_edges):
        buckets.setdefault(pair, []).append(j)
    taken: dict[tuple[int, int], int] = {}
    edge_map = [0] * graph.num_edges
    hemap = [0] * (2 * graph.num_edges)
    for i, (a, b) in enumerate(graph.edges):
        pair = (min(perm[a], perm[b]), max(perm[a], perm[b]))
        k = taken.get(pair, 0)
        taken[pair] = k + 1
        j = buckets[pair][k]
        edge_map[i] = j
        if a == b or perm[a] <= perm[b]:
            hemap[2 * i] = 2 * j
            hemap[2 * i + 1] = 2 * j + 1
        else:
            hemap[2 * i] = 2 * j + 1
            hemap[2 * i + 1] = 2 * j
    return edge_map, hemap


_CANON_CACHE: dict[tuple, tuple[StableGraph, tuple[int, ...], tuple[int, ...]]] = {}


def canonical(graph: StableGraph) -> tuple[StableGraph, tuple[int, ...], tuple[int, ...]]:
    """Canonical representative plus the relabeling that achieves it.

    Returns (canonical_graph, vertex_map, half_edge_map) where
    vertex_map[v] and half_edge_map[h] are images in the canonical graph.
    """
    key = (graph.genera, graph.legs, graph.edges)
    hit = _CANON_CACHE.get(key)
    if hit is not None:
        return hit
    best = None
    best_perm = None
    for perm in _candidate_perms(graph):
        enc = _relabel(graph, perm)
        if best is None or enc < best:
            best = enc
            best_perm = perm
    assert best is not None and best_perm is not None
    cgraph = StableGraph(*best)
    _, hemap = _half_edge_map(graph, best_perm, cgraph.edges)
    result = (cgraph, tuple(best_perm), tuple(hemap))
    _CANON_CACHE[key] = result
    if key != (cgraph.genera, cgraph.legs, cgraph.edges):
        ident = tuple(range(2 * cgraph.num_edges))
        _CANON_CACHE[(cgraph.genera, cgraph.legs, cgraph.edges)] = (
            cgraph, tuple(range(cgraph.num_vertices)), ident)
    return result


def make_graph(genera: Sequence[int], legs: Sequence[Sequence[int]],
               edges: Sequence[tuple[int, int]]) -> StableGraph:
    """Validated canonical graph from raw data (edge pairs in any order)."""
    raw = StableGraph(
        tuple(genera),
        tuple(tuple(sorted(l)) for l in legs),
        tuple((min(a, b), max(a, b)) for (a, b) in edges),
    )
    raw.validate()
    return canonical(raw)[0]


# ---------------------------------------------------------------------------
# automorphisms and isomorphisms


def _vertex_automorphisms(graph: StableGraph) -> list[list[int]]:
    base = _relabel(graph, list(range(graph.num_vertices)))
    return [list(p) for p in _candidate_perms(graph) if _relabel(graph, p) == base]


_AUT_CACHE: dict[tuple, list[tuple[tuple[int, ...], tuple[int, ...]]]] = {}


def automorphisms(graph: StableGraph) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All automorphisms of a canonical graph as (vertex_perm, half_edge_map).

    Includes edge-level symmetry: permutations of parallel edges and the two
    half-edge orderings of each loop.
    """
    key = (graph.genera, graph.legs, graph.edges)
    hit = _AUT_CACHE.get(key)
    if hit is not None:
        return hit
    E = graph.num_edges
    out: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    buckets: dict[tuple[int, int], list[int]] = {}
    for j, pair in enumerate(graph.edges):
        buckets.setdefault(pair, []).append(j)
    for perm in _vertex_automorphisms(graph):
        # originals grouped by image pair
        groups: dict[tuple[int, int], list[int]] = {}
        for i, (a, b) in enumerate(graph.edges):
            pair = (min(perm[a], perm[b]), max(perm[a], perm[b]))
            groups.setdefault(pair, []).append(i)
        pairs = sorted(groups)
        choices = []
        for pair in pairs:
            src = groups[pair]
            dst = buckets[pair]
            is_loop = pair[0] == pair[1]
            assignments = []
            for tgt in itertools.permutations(dst):
                if is_loop:
                    for flips in itertools.product((False, True), repeat=len(src)):
                        assignments.append((tgt, flips))
                else:
                    assignments.append((tgt, (False,) * len(src)))
            choices.append((src, assignments))
        for combo in itertools.product(*(a for (_, a) in choices)):
            hemap = [0] * (2 * E)
            for (src, _), (tgt, flips) in zip(choices, combo):
                for i, j, flip in zip(src, tgt, flips):
                    a, b = graph.edges[i]
                    if a == b:
                        lo, hi = (2 * j + 1, 2 * j) if flip else (2 * j, 2 * j + 1)
                        hemap[2 * i] = lo
                        hemap[2 * i + 1] = hi
                    elif perm[a] <= perm[b]:
                        hemap[2 * i] = 2 * j
                        hemap[2 * i + 1] = 2 * j + 1
                    else:
                        hemap[2 * i] = 2 * j + 1
                        hemap[2 * i + 1] = 2 * j
            out.append((tuple(perm), tuple(hemap)))
    _AUT_CACHE[key] = out
    return out


def automorphism_count(graph: StableGraph) -> int:
    """Order of the automorphism group (vertices and half-edges)."""
    n_vertex = len(_vertex_automorphisms(graph))
    factor = 1
    counted: dict[tuple[int, int], int] = {}
    for pair in graph.edges:
        counted[pair] = counted.get(pair, 0) + 1
    for (a, b), m in counted.items():
        if a == b:
            factor *= _factorial(m) * 2 ** m
        else:
            factor *= _factorial(m)
    return n_vertex * factor


def _factorial(m: int) -> int:
    out = 1
    for i in range(2, m + 1):
        out *= i
    return out


def isomorphisms(src: StableGraph, dst: StableGraph
                 ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All isomorphisms src -> dst as (vertex_map, half_edge_map).

    Empty when the graphs are not isomorphic.  Both arguments may be raw.
    """
    csrc, vs, hs = canonical(src)
    cdst, vd, hd = canonical(dst)
    if (csrc.genera, csrc.legs, csrc.edges) != (cdst.genera, cdst.legs, cdst.edges):
        return []
    inv_vd = [0] * dst.num_vertices
    for v, img in enumerate(vd):
        inv_vd[img] = v
    inv_hd = [0] * (2 * dst.num_edges)
    for h, img in enumerate(hd):
        inv_hd[img] = h
    out = []
    for aperm, ahe in automorphisms(csrc):
        vmap = tuple(inv_vd[aperm[vs[v]]] for v in range(src.num_vertices))
        hemap = tuple(inv_hd[ahe[hs[h]]] for h in range(2 * src.num_edges))
        out.append((vmap, hemap))
    return out


# ---------------------------------------------------------------------------
# contraction


def contract(graph: StableGraph, contracted: frozenset[int]
             ) -> tuple[StableGraph, tuple[int, ...], dict[int, int]]:
    """Contract a set of edges (by index).  Loops bump the genus.

    Returns (raw_graph, vertex_map, half_edge_map) where half_edge_map sends
    surviving old half-edge ids to new ids.  The result is raw, not
    canonical.
    """
    V = graph.num_vertices
    parent = list(range(V))
    for i in contracted:
        if not 0 <= i < graph.num_edges:
            raise DomainError("edge index %d out of range" % i)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in contracted:
        a, b = graph.edges[i]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    classes: dict[int, int] = {}
    vmap = [0] * V
    for v in range(V):
        r = find(v)
        if r not in classes:
            classes[r] = len(classes)
        vmap[v] = classes[r]
    W = len(classes)
    genera = [0] * W
    legs: list[list[int]] = [[] for _ in range(W)]
    sizes = [0] * W
    for v in range(V):
        genera[vmap[v]] += graph.genera[v]
        legs[vmap[v]].extend(graph.legs[v])
        sizes[vmap[v]] += 1
    internal = [0] * W
    for i in contracted:
        a, _ = graph.edges[i]
        internal[vmap[a]] += 1
    for w in range(W):
        genera[w] += internal[w] - (sizes[w] - 1)
    new_edges: list[tuple[int, int]] = []
    hemap: dict[int, int] = {}
    for i, (a, b) in enumerate(graph.edges):
        if i in contracted:
            continue
        j = len(new_edges)
        na, nb = vmap[a], vmap[b]
        if na <= nb:
            new_edges.append((na, nb))
            hemap[2 * i] = 2 * j
            hemap[2 * i + 1] = 2 * j + 1
        else:
            new_edges.append((nb, na))
            hemap[2 * i] = 2 * j + 1
            hemap[2 * i + 1] = 2 * j
    raw = StableGraph(
        tuple(genera),
        tuple(tuple(sorted(l)) for l in legs),
        tuple(new_edges),
    )
    return raw, tuple(vmap), hemap


# ---------------------------------------------------------------------------
# enumeration


def _splits(graph: StableGraph, v: int) -> Iterator[StableGraph]:
    """All one-edge degenerations obtained by splitting vertex v."""
    gv = graph.genera[v]
    lv = graph.legs[v]
    hv = graph.half_edges_at(v)
    V = graph.num_vertices
    for g1 in range(gv + 1):
        g2 = gv - g1
        for nl in range(len(lv) + 1):
            for keep_legs in itertools.combinations(lv, nl):
                move_legs = tuple(m for m in lv if m not in keep_legs)
                for nh in range(len(hv) + 1):
                    for keep_he in itertools.combinations(hv, nh):
                        keep_set = set(keep_he)
                        # stability of both halves (+1 for the new edge end)
                        if 2 * g1 - 2 + len(keep_legs) + nh + 1 <= 0:
                            continue
                        if 2 * g2 - 2 + len(move_legs) + (len(hv) - nh) + 1 <= 0:
                            continue
                        ends = []
                        for i, (a, b) in enumerate(graph.edges):
                            na = a if a != v else (v if 2 * i in keep_set else V)
                            nb = b if b != v else (v if 2 * i + 1 in keep_set else V)
                            ends.append((na, nb))
                        ends.append((v, V))
                        genera = list(graph.genera)
                        genera[v] = g1
                        genera.append(g2)
                        legs = list(graph.legs)
                        legs[v] = tuple(sorted(keep_legs))
                        legs.append(tuple(sorted(move_legs)))
                        edges = tuple((min(a, b), max(a, b)) for (a, b) in ends)
                        yield StableGraph(tuple(genera), tuple(legs), edges)


_ENUM_CACHE: dict[tuple[int, int, int], tuple[StableGraph, ...]] = {}


def enumerate_stable_graphs(g: int, n: int, max_edges: int) -> tuple[StableGraph, ...]:
    """All canonical stable graphs of type (g, n) with at most max_edges
    edges, sorted by (edge count, encoding).

    Generated by inverting edge contraction level by level: every graph with
    e+1 edges contracts (any one edge) to a graph with e edges, so splitting
    a vertex or dropping a loop from the level-e list reaches all of level
    e+1.
    """
    if 2 * g - 2 + n <= 0:
        raise DomainError("unstable type (g, n) = (%d, %d)" % (g, n))
    if g < 0 or n < 0 or max_edges < 0:
        raise DomainError("negative parameter")
    key = (g, n, max_edges)
    hit = _ENUM_CACHE.get(key)
    if hit is not None:
        return hit
    main = make_graph([g], [tuple(range(1, n + 1))], [])
    levels: list[dict[str, StableGraph]] = [{main.encode(): main}]
    for _ in range(max_edges):
        nxt: dict[str, StableGraph] = {}
        for graph in levels[-1].values():
            for v in range(graph.num_vertices):
                if graph.genera[v] >= 1:
                    genera = list(graph.genera)
                    genera[v] -= 1
                    loop = StableGraph(
                        tuple(genera), graph.legs,
                        graph.edges + ((v, v),))
                    cloop = canonical(loop)[0]
                    nxt.setdefault(cloop.encode(), cloop)
                for split in _splits(graph, v):
                    csplit = canonical(split)[0]
                    nxt.setdefault(csplit.encode(), csplit)
        levels.append(nxt)
    out: list[StableGraph] = []
    for level in levels:
        out.extend(level[k] for k in sorted(level))
    result = tuple(out)
    _ENUM_CACHE[key] = result
    return result
