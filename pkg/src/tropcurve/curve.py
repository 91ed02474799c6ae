"""Metric-graph models of tropical curves with points at infinity and ray classes.

A curve is built from a description of vertices, edges with positive
rational or infinite lengths, and a class label per infinite edge.  Loop
edges are split internally at a hidden midpoint so that every stored arc
has distinct endpoints; the hidden vertices never appear in descriptions,
points, or output.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import TropError
from .semifield import rat

INF = math.inf

Length = "Fraction | float"


def parse_length(x) -> "Fraction | float":
    if x == INF or (isinstance(x, str) and x.strip() == "inf"):
        return INF
    if isinstance(x, float):
        raise TropError(f"float lengths are not accepted: {x!r}")
    value = rat(x)
    if value <= 0:
        raise TropError(f"edge length must be positive, got {value}")
    return value


def length_str(x) -> str:
    return "inf" if x == INF else str(x)


@dataclass(frozen=True)
class VertexInfo:
    id: str
    at_infinity: bool = False
    hidden: bool = False


@dataclass(frozen=True)
class EdgeDesc:
    id: str
    u: str
    v: str
    length: "Fraction | float"

    @property
    def is_infinite(self) -> bool:
        return self.length == INF

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class Arc:
    """Internal loopless edge, oriented u -> v, carrying user-edge coordinates."""

    id: str
    u: str
    v: str
    length: "Fraction | float"
    edge: str
    start: Fraction  # user-edge offset of this arc's offset 0


@dataclass(frozen=True)
class PointRef:
    """A point of a curve: a vertex, or an interior offset along an edge.

    Offsets are measured from the edge's u endpoint.  Construct through
    the Curve methods so that references are normalized (offsets 0 and
    full-length fold to the endpoint vertices, infinite ends fold to the
    at-infinity vertex).
    """

    kind: str  # "vertex" | "on_edge"
    vertex: str | None = None
    edge: str | None = None
    offset: Fraction | None = None

    def __str__(self) -> str:
        if self.kind == "vertex":
            return self.vertex
        return f"{self.edge}@{self.offset}"


class Curve:
    """Immutable metric graph; all queries are pure."""

    def __init__(self, vertices: Iterable[VertexInfo], edges: Iterable[EdgeDesc],
                 ray_classes: Mapping[str, str]):
        self.vertices: dict[str, VertexInfo] = {}
        for v in vertices:
            if v.id in self.vertices:
                raise TropError(f"duplicate vertex id {v.id!r}")
            self.vertices[v.id] = v
        self.edges: dict[str, EdgeDesc] = {}
        for e in edges:
            if e.id in self.edges:
                raise TropError(f"duplicate edge id {e.id!r}")
            self.edges[e.id] = e
        self.ray_classes: dict[str, str] = dict(ray_classes)
        self._validate()
        self._build_arcs()
        self._dijkstra_cache: dict[str, dict[str, "Fraction | float"]] = {}

    # -- construction ------------------------------------------------------

    @staticmethod
    def build(vertices: Iterable = (), edges: Iterable = (),
              ray_classes: Mapping[str, str] | None = None) -> "Curve":
        """Build and validate a curve from a plain description.

        Vertices are ``id`` strings or ``(id, at_infinity)`` pairs; edges are
        ``(id, u, v, length)`` with length a rational, one of its string
        forms, or ``inf``.  An undeclared endpoint of an infinite edge is
        created as its point at infinity.
        """
        vinfos: dict[str, VertexInfo] = {}
        for v in vertices:
            if isinstance(v, VertexInfo):
                vinfos[v.id] = v
            elif isinstance(v, str):
                vinfos[v] = VertexInfo(v)
            else:
                vid, at_inf = v
                vinfos[vid] = VertexInfo(vid, bool(at_inf))
        edescs = []
        for e in edges:
            if isinstance(e, EdgeDesc):
                eid, u, v, length = e.id, e.u, e.v, e.length
            else:
                eid, u, v, length = e
            length = parse_length(length)
            if v is None:
                v = f"{eid}.inf"
            for end in (u, v):
                if end not in vinfos:
                    if length == INF and end == v:
                        vinfos[end] = VertexInfo(end, at_infinity=True)
                    else:
                        vinfos[end] = VertexInfo(end)
            edescs.append(EdgeDesc(eid, u, v, length))
        return Curve(vinfos.values(), edescs, ray_classes or {})

    def _validate(self):
        if not self.vertices:
            raise TropError("empty curve")
        incident: dict[str, int] = {v: 0 for v in self.vertices}
        for e in self.edges.values():
            for end in (e.u, e.v):
                if end not in self.vertices:
                    raise TropError(f"edge {e.id!r} references unknown vertex {end!r}")
            incident[e.u] += 1
            incident[e.v] += 1
            u_inf = self.vertices[e.u].at_infinity
            v_inf = self.vertices[e.v].at_infinity
            if e.is_infinite:
                if e.is_loop:
                    raise TropError(f"infinite edge {e.id!r} cannot be a loop")
                if u_inf == v_inf:
                    raise TropError(
                        f"infinite edge {e.id!r} needs exactly one endpoint at infinity")
                if u_inf:
                    raise TropError(
                        f"infinite edge {e.id!r} must run finite -> infinity (u finite)")
                if e.id not in self.ray_classes:
                    raise TropError(f"infinite edge {e.id!r} has no ray class")
            else:
                if u_inf or v_inf:
                    raise TropError(f"finite edge {e.id!r} touches a point at infinity")
        for eid in self.ray_classes:
            if eid not in self.edges or not self.edges[eid].is_infinite:
                raise TropError(f"ray class given for non-ray edge {eid!r}")
        for v in self.vertices.values():
            if v.at_infinity and incident[v.id] != 1:
                raise TropError(f"at-infinity vertex {v.id!r} must have valence 1")

    def _build_arcs(self):
        self.arcs: dict[str, Arc] = {}
        self.arcs_of_edge: dict[str, tuple[str, ...]] = {}
        self.hidden_info: dict[str, tuple[str, Fraction]] = {}
        hidden: dict[str, VertexInfo] = {}
        for e in self.edges.values():
            if e.is_loop:
                mid = f"{e.id}~mid"
                if mid in self.vertices:
                    raise TropError(f"vertex id {mid!r} collides with a loop midpoint")
                hidden[mid] = VertexInfo(mid, hidden=True)
                half = e.length / 2
                self.hidden_info[mid] = (e.id, half)
                a1 = Arc(f"{e.id}~1", e.u, mid, half, e.id, Fraction(0))
                a2 = Arc(f"{e.id}~2", mid, e.v, half, e.id, half)
                self.arcs[a1.id] = a1
                self.arcs[a2.id] = a2
                self.arcs_of_edge[e.id] = (a1.id, a2.id)
            else:
                a = Arc(e.id, e.u, e.v, e.length, e.id, Fraction(0))
                self.arcs[a.id] = a
                self.arcs_of_edge[e.id] = (a.id,)
        self.vertices.update(hidden)
        self.arcs_at: dict[str, list[tuple[str, int]]] = {v: [] for v in self.vertices}
        for a in self.arcs.values():
            self.arcs_at[a.u].append((a.id, +1))
            self.arcs_at[a.v].append((a.id, -1))
        for v in self.arcs_at:
            self.arcs_at[v].sort()

    # -- identity ------------------------------------------------------------

    def description(self) -> dict:
        """User-level description (hidden loop midpoints suppressed)."""
        return {
            "vertices": [
                {"id": v.id, "at_infinity": v.at_infinity}
                for v in sorted(self.vertices.values(), key=lambda v: v.id) if not v.hidden
            ],
            "edges": [
                {"id": e.id, "u": e.u, "v": e.v, "length": length_str(e.length)}
                for e in sorted(self.edges.values(), key=lambda e: e.id)
            ],
            "ray_classes": dict(sorted(self.ray_classes.items())),
        }

    def key(self):
        d = self.description()
        return (
            tuple((v["id"], v["at_infinity"]) for v in d["vertices"]),
            tuple((e["id"], e["u"], e["v"], e["length"]) for e in d["edges"]),
            tuple(d["ray_classes"].items()),
        )

    def __eq__(self, other):
        return isinstance(other, Curve) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def same_curve(self, other: "Curve") -> bool:
        return self == other

    # -- points ---------------------------------------------------------------

    def pt_vertex(self, vid: str) -> PointRef:
        v = self.vertices.get(vid)
        if v is None or v.hidden:
            raise TropError(f"unknown vertex {vid!r}")
        return PointRef("vertex", vertex=vid)

    def pt_on_edge(self, edge: str, offset) -> PointRef:
        e = self.edges.get(edge)
        if e is None:
            raise TropError(f"unknown edge {edge!r}")
        off = rat(offset)
        if off < 0 or (not e.is_infinite and off > e.length):
            raise TropError(f"offset {off} outside edge {edge!r}")
        if off == 0:
            return self.pt_vertex(e.u)
        if not e.is_infinite and off == e.length:
            return self.pt_vertex(e.v)
        return PointRef("on_edge", edge=edge, offset=off)

    def pt_infinity_of(self, edge: str) -> PointRef:
        e = self.edges.get(edge)
        if e is None or not e.is_infinite:
            raise TropError(f"edge {edge!r} has no point at infinity")
        end = e.v if self.vertices[e.v].at_infinity else e.u
        return self.pt_vertex(end)

    def is_at_infinity(self, p: PointRef) -> bool:
        return p.kind == "vertex" and self.vertices[p.vertex].at_infinity

    def contains_point(self, p: PointRef) -> bool:
        try:
            self._resolve(p)
            return True
        except TropError:
            return False

    def _resolve(self, p: PointRef) -> tuple[str, str, "Fraction | None"]:
        """Map a point to ("vertex", id, None) or ("arc", arc id, offset)."""
        if p.kind == "vertex":
            v = self.vertices.get(p.vertex)
            if v is None or v.hidden:
                raise TropError(f"point {p} is not on this curve")
            return ("vertex", p.vertex, None)
        e = self.edges.get(p.edge)
        if e is None:
            raise TropError(f"point {p} is not on this curve")
        off = p.offset
        if off is None or off <= 0 or (not e.is_infinite and off >= e.length):
            raise TropError(f"point {p} is not normalized interior")
        arcs = self.arcs_of_edge[e.id]
        for aid in arcs:
            a = self.arcs[aid]
            hi = INF if a.length == INF else a.start + a.length
            if a.start < off < hi:
                return ("arc", aid, off - a.start)
            if off == a.start:
                return ("vertex", a.u, None)
            if off == hi:
                return ("vertex", a.v, None)
        raise TropError(f"offset {off} outside edge {e.id!r}")

    def point_from_arc(self, arc_id: str, t: Fraction) -> PointRef:
        a = self.arcs[arc_id]
        if t == 0:
            vid = a.u
        elif a.length != INF and t == a.length:
            vid = a.v
        else:
            return self.pt_on_edge(a.edge, a.start + t)
        v = self.vertices[vid]
        if v.hidden:
            return PointRef("on_edge", edge=a.edge, offset=a.start + t)
        return PointRef("vertex", vertex=vid)

    def point_sort_key(self, p: PointRef):
        comp = self.component_index(p)
        if p.kind == "vertex":
            return (comp, 0, p.vertex, Fraction(0))
        return (comp, 1, p.edge, p.offset)

    # -- local structure -------------------------------------------------------

    def directions_at(self, p: PointRef) -> tuple[str, ...]:
        """Direction ids at a point: "arc:+" leaves the u end, "arc:-" the v end."""
        kind, ident, off = self._resolve(p)
        if kind == "vertex":
            if self.vertices[ident].at_infinity:
                aid, _ = self.arcs_at[ident][0]
                return (f"{aid}:-",)
            return tuple(f"{aid}:{'+' if sign > 0 else '-'}" for aid, sign in self.arcs_at[ident])
        return (f"{ident}:-", f"{ident}:+")

    def valence(self, p: PointRef) -> int:
        return len(self.directions_at(p))

    # -- components -------------------------------------------------------------

    def component_sets(self) -> tuple[frozenset[str], ...]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in self.arcs.values():
            parent[find(a.u)] = find(a.v)
        groups: dict[str, set[str]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), set()).add(v)
        comps = sorted(groups.values(), key=lambda s: min(s))
        return tuple(frozenset(s) for s in comps)

    def component_index(self, p: PointRef) -> int:
        kind, ident, _ = self._resolve(p)
        vid = ident if kind == "vertex" else self.arcs[ident].u
        for i, comp in enumerate(self.component_sets()):
            if vid in comp:
                return i
        raise TropError("point outside all components")

    def is_connected(self) -> bool:
        return len(self.component_sets()) == 1

    def components(self) -> tuple["Curve", ...]:
        """The connected components as curves sharing this curve's ids."""
        out = []
        for comp in self.component_sets():
            vs = [v for v in self.vertices.values() if v.id in comp and not v.hidden]
            es = [e for e in self.edges.values() if e.u in comp]
            rc = {e.id: self.ray_classes[e.id] for e in es if e.id in self.ray_classes}
            out.append(Curve(vs, es, rc))
        return tuple(out)

    # -- metric -------------------------------------------------------------------

    def _vertex_distances(self, source: str) -> dict[str, "Fraction | float"]:
        cached = self._dijkstra_cache.get(source)
        if cached is not None:
            return cached
        dist: dict[str, "Fraction | float"] = {v: INF for v in self.vertices}
        dist[source] = Fraction(0)
        heap: list[tuple] = [(Fraction(0), source)]
        done = set()
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for aid, sign in self.arcs_at[u]:
                a = self.arcs[aid]
                if a.length == INF:
                    continue
                w = a.v if sign > 0 else a.u
                nd = d + a.length
                if nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        self._dijkstra_cache[source] = dist
        return dist

    def _point_legs(self, p: PointRef) -> list[tuple[str, "Fraction | float"]]:
        """(vertex, leg length) pairs from a point to the nearest vertices."""
        kind, ident, off = self._resolve(p)
        if kind == "vertex":
            return [(ident, Fraction(0))]
        a = self.arcs[ident]
        legs = [(a.u, off)]
        if a.length != INF:
            legs.append((a.v, a.length - off))
        return legs

    def distance(self, p: PointRef, q: PointRef) -> "Fraction | float":
        """Shortest-path length; infinite across components or to infinity points."""
        kp, ip, op_ = self._resolve(p)
        kq, iq, oq = self._resolve(q)
        if (kp, ip, op_) == (kq, iq, oq):
            return Fraction(0)
        if self.is_at_infinity(p) or self.is_at_infinity(q):
            return INF
        best: "Fraction | float" = INF
        if kp == "arc" and kq == "arc" and ip == iq:
            best = abs(op_ - oq)
        elif kp == "arc" and kq == "arc" and self.arcs[ip].edge == self.arcs[iq].edge:
            pass  # different arcs of one loop; handled through vertices below
        for a_vid, a_leg in self._point_legs(p):
            if a_leg == INF:
                continue
            dmap = self._vertex_distances(a_vid)
            for b_vid, b_leg in self._point_legs(q):
                if b_leg == INF:
                    continue
                total = a_leg + dmap[b_vid] + b_leg
                if total < best:
                    best = total
        return best

    # -- convenience builders ------------------------------------------------------

    @staticmethod
    def segment(length, u: str = "A", v: str = "B", edge: str = "e") -> "Curve":
        return Curve.build(vertices=[u, v], edges=[(edge, u, v, length)])

    @staticmethod
    def doubly_infinite_line(vertex: str = "O", left: str = "left", right: str = "right",
                             left_class: str = "left", right_class: str = "right") -> "Curve":
        """The extended line: one finite vertex with two rays."""
        return Curve.build(
            vertices=[vertex],
            edges=[(left, vertex, None, INF), (right, vertex, None, INF)],
            ray_classes={left: left_class, right: right_class},
        )


def disjoint_union(curves: Sequence[Curve],
                   shared_classes: Mapping[str, Sequence[tuple[int, str]]] | None = None) -> Curve:
    """Disjoint union with ids prefixed by the component index.

    By default ray classes stay disjoint per component (the direct sum).
    ``shared_classes`` maps a new label to ``(component index, old label)``
    pairs merged across components, giving a general disconnected curve
    with parallel rays.
    """
    if len(curves) < 2:
        raise TropError("disjoint union needs at least two curves")
    relabel: dict[tuple[int, str], str] = {}
    if shared_classes:
        for new, olds in shared_classes.items():
            for idx, old in olds:
                relabel[(int(idx), old)] = new
    vertices: list[VertexInfo] = []
    edges: list[EdgeDesc] = []
    ray_classes: dict[str, str] = {}
    for i, c in enumerate(curves):
        for v in c.vertices.values():
            if not v.hidden:
                vertices.append(VertexInfo(f"{i}:{v.id}", v.at_infinity))
        for e in c.edges.values():
            edges.append(EdgeDesc(f"{i}:{e.id}", f"{i}:{e.u}", f"{i}:{e.v}", e.length))
        for eid, label in c.ray_classes.items():
            ray_classes[f"{i}:{eid}"] = relabel.get((i, label), f"{i}:{label}")
    return Curve(vertices, edges, ray_classes)


def canonical_model(c: Curve) -> Curve:
    """The model whose vertices are the points of valence != 2.

    The circle keeps its lexicographically least vertex as a loop base;
    the doubly infinite line keeps its least finite vertex.
    """
    if not c.is_connected():
        raise TropError("canonical model needs a connected curve")
    # User-level valences (loops count twice).
    val: dict[str, int] = {v.id: 0 for v in c.vertices.values() if not v.hidden}
    for e in c.edges.values():
        val[e.u] += 1
        val[e.v] += 1
    finite_ids = sorted(v for v in val if not c.vertices[v].at_infinity)
    inf_ids = sorted(v for v in val if c.vertices[v].at_infinity)
    keep = {v for v, k in val.items() if k != 2}

    if not c.edges:
        return Curve.build(vertices=[(finite_ids[0], False)])

    if not keep:
        # Circle: every vertex is 2-valent.
        base = finite_ids[0]
        keep = {base}
    elif not (keep - set(inf_ids)) and len(inf_ids) == 2:
        # The doubly infinite line: two points at infinity, finite part all 2-valent.
        keep = set(inf_ids) | {finite_ids[0]}

    # Walk maximal chains between kept vertices through 2-valent ones.
    # A half-edge (eid, "u") traverses eid from its u endpoint to its v endpoint.
    ends_at: dict[str, list[tuple[str, str]]] = {v: [] for v in val}
    for e in c.edges.values():
        ends_at[e.u].append((e.id, "u"))
        ends_at[e.v].append((e.id, "v"))
    for v in ends_at:
        ends_at[v].sort()

    def traverse(he: tuple[str, str]) -> tuple[str, tuple[str, str]]:
        e = c.edges[he[0]]
        arrive_end = "v" if he[1] == "u" else "u"
        arrive_vertex = e.v if he[1] == "u" else e.u
        return arrive_vertex, (he[0], arrive_end)

    visited: set[tuple[str, str]] = set()
    new_edges = []
    new_classes: dict[str, str] = {}
    # Finite starts first so that infinite chains come out oriented finite -> infinity.
    for start in sorted(keep, key=lambda v: (c.vertices[v].at_infinity, v)):
        for he in ends_at[start]:
            if he in visited:
                continue
            chain = [he[0]]
            visited.add(he)
            here, arrival = traverse(he)
            visited.add(arrival)
            while here not in keep:
                nxt = [k for k in ends_at[here] if k != arrival]
                he = nxt[0]
                chain.append(he[0])
                visited.add(he)
                here, arrival = traverse(he)
                visited.add(arrival)
            total: "Fraction | float" = Fraction(0)
            for ce in chain:
                total = INF if (c.edges[ce].length == INF or total == INF) else total + c.edges[ce].length
            new_id = min(chain)
            new_edges.append((new_id, start, here, total))
            ray_edges = [ce for ce in chain if ce in c.ray_classes]
            if ray_edges:
                new_classes[new_id] = c.ray_classes[ray_edges[0]]
    verts = [(v, c.vertices[v].at_infinity) for v in sorted(keep)]
    return Curve.build(vertices=verts, edges=new_edges, ray_classes=new_classes)
