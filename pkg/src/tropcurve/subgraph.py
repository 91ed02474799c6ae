"""Closed subsets of a curve with finitely many components."""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .curve import INF, Curve, EdgeDesc, PointRef, VertexInfo
from .errors import TropError
from .semifield import rat

Interval = tuple[Fraction, "Fraction | float"]  # closed [lo, hi], hi may be INF


@dataclass(frozen=True)
class Subgraph:
    """Normalized closed subset: member vertices plus closed arc intervals.

    Intervals are sorted, pairwise disjoint with positive gaps, and merged;
    an interval touching an arc end implies that end vertex is a member.
    Equality of subgraphs is structural equality of this data.
    """

    curve: Curve
    vertices: frozenset[str]
    intervals: tuple[tuple[str, tuple[Interval, ...]], ...]

    def interval_map(self) -> dict[str, tuple[Interval, ...]]:
        return dict(self.intervals)

    def is_empty(self) -> bool:
        return not self.vertices and not self.intervals

    def contains_point(self, p: PointRef) -> bool:
        kind, ident, off = self.curve._resolve(p)
        if kind == "vertex":
            return ident in self.vertices
        for lo, hi in self.interval_map().get(ident, ()):
            if lo <= off <= hi:
                return True
        return False

    # -- components --------------------------------------------------------

    def _items(self):
        items = [("v", vid) for vid in sorted(self.vertices)]
        for aid, ivs in self.intervals:
            for k in range(len(ivs)):
                items.append(("i", aid, k))
        return items

    def _component_partition(self) -> list[list]:
        items = self._items()
        index = {it: n for n, it in enumerate(items)}
        parent = list(range(len(items)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            parent[find(a)] = find(b)

        for aid, ivs in self.intervals:
            arc = self.curve.arcs[aid]
            for k, (lo, hi) in enumerate(ivs):
                if lo == 0:
                    union(index[("i", aid, k)], index[("v", arc.u)])
                if hi == arc.length:
                    union(index[("i", aid, k)], index[("v", arc.v)])
        groups: dict[int, list] = {}
        for it in items:
            groups.setdefault(find(index[it]), []).append(it)
        return sorted(groups.values(), key=lambda g: g[0])

    def components(self) -> tuple["Subgraph", ...]:
        out = []
        imap = self.interval_map()
        for group in self._component_partition():
            vs = frozenset(it[1] for it in group if it[0] == "v")
            ivs: dict[str, list[Interval]] = {}
            for it in group:
                if it[0] == "i":
                    ivs.setdefault(it[1], []).append(imap[it[1]][it[2]])
            out.append(Subgraph(self.curve, vs,
                                tuple(sorted((a, tuple(sorted(v))) for a, v in ivs.items()))))
        return tuple(out)

    def component_count(self) -> int:
        return len(self._component_partition())

    # -- user-level view -----------------------------------------------------

    def edge_intervals(self) -> dict[str, list[Interval]]:
        """Intervals in user-edge coordinates, merged across loop midpoints."""
        per_edge: dict[str, list[Interval]] = {}
        for aid, ivs in self.intervals:
            arc = self.curve.arcs[aid]
            for lo, hi in ivs:
                h = INF if hi == INF else arc.start + hi
                per_edge.setdefault(arc.edge, []).append((arc.start + lo, h))
        for vid in self.vertices:
            if vid in self.curve.hidden_info:
                eid, off = self.curve.hidden_info[vid]
                per_edge.setdefault(eid, []).append((off, off))
        return {eid: _merge_intervals(ivs) for eid, ivs in sorted(per_edge.items())}

    # -- the subgraph as a curve in its own right ------------------------------

    def as_curve(self) -> tuple[Curve, "SubChart"]:
        """Build the subgraph as a curve, with a chart back to the parent.

        Cut points inside an edge become vertices named ``edge@offset``;
        sub-edges keep the parent edge id when they cover it entirely and
        are named ``edge[lo,hi]`` otherwise.  Rays inherit the parent ray
        class label.
        """
        c = self.curve
        vertices: dict[str, VertexInfo] = {}
        vertex_points: dict[str, PointRef] = {}
        edges: list[EdgeDesc] = []
        edge_chart: dict[str, tuple[str, Fraction]] = {}
        ray_classes: dict[str, str] = {}

        def vertex_for(eid: str, off) -> str:
            e = c.edges[eid]
            if off == 0:
                vid = e.u
            elif off == e.length:
                vid = e.v
            else:
                vid = f"{eid}@{off}"
            if vid not in vertices:
                if vid in c.vertices:
                    vertices[vid] = VertexInfo(vid, at_infinity=c.vertices[vid].at_infinity)
                    vertex_points[vid] = c.pt_vertex(vid)
                else:
                    vertices[vid] = VertexInfo(vid)
                    vertex_points[vid] = c.pt_on_edge(eid, off)
            return vid

        for vid in sorted(self.vertices):
            if vid in c.hidden_info:
                continue  # covered through edge_intervals below
            info = c.vertices[vid]
            if vid not in vertices:
                vertices[vid] = VertexInfo(vid, at_infinity=info.at_infinity)
                vertex_points[vid] = c.pt_vertex(vid)

        for eid, ivs in self.edge_intervals().items():
            e = c.edges[eid]
            for lo, hi in ivs:
                if lo == hi:
                    vertex_for(eid, lo)
                    continue
                u = vertex_for(eid, lo)
                v = vertex_for(eid, hi)
                full = lo == 0 and hi == e.length
                sub_id = eid if full else f"{eid}[{lo},{'inf' if hi == INF else hi}]"
                length = INF if hi == INF else hi - lo
                edges.append(EdgeDesc(sub_id, u, v, length))
                edge_chart[sub_id] = (eid, lo)
                if hi == INF:
                    ray_classes[sub_id] = c.ray_classes[eid]

        sub = Curve(vertices.values(), edges, ray_classes)
        return sub, SubChart(c, sub, vertex_points, edge_chart)

    # -- metric -----------------------------------------------------------------

    def distance_map(self) -> dict[str, "Fraction | float"]:
        """Distance from every curve vertex to this subgraph (INF off-component)."""
        c = self.curve
        dist: dict[str, "Fraction | float"] = {v: INF for v in c.vertices}
        for vid in self.vertices:
            dist[vid] = Fraction(0)
        for aid, ivs in self.intervals:
            arc = c.arcs[aid]
            lo0 = ivs[0][0]
            if lo0 < dist[arc.u]:
                dist[arc.u] = lo0
            if arc.length != INF:
                gap = arc.length - ivs[-1][1]
                if gap < dist[arc.v]:
                    dist[arc.v] = gap
        heap = [(d, v) for v, d in dist.items() if d != INF]
        heapq.heapify(heap)
        done = set()
        while heap:
            d, u = heapq.heappop(heap)
            if u in done or d > dist[u]:
                continue
            done.add(u)
            for aid, sign in c.arcs_at[u]:
                arc = c.arcs[aid]
                if arc.length == INF:
                    continue
                w = arc.v if sign > 0 else arc.u
                nd = d + arc.length
                if nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        return dist

    def distance_to(self, p: PointRef) -> "Fraction | float":
        """Infimum of distances from p to the subgraph."""
        if self.is_empty():
            raise TropError("distance to an empty subgraph")
        c = self.curve
        dmap = self.distance_map()
        kind, ident, off = c._resolve(p)
        if kind == "vertex":
            return dmap[ident]
        arc = c.arcs[ident]
        best = dmap[arc.u] + off
        if arc.length != INF:
            alt = dmap[arc.v] + (arc.length - off)
            if alt < best:
                best = alt
        for lo, hi in self.interval_map().get(ident, ()):
            if lo <= off <= hi:
                return Fraction(0)
            local = lo - off if off < lo else off - hi
            if local < best:
                best = local
        return best


@dataclass(frozen=True)
class SubChart:
    """Coordinates of a subgraph-as-curve inside its parent curve."""

    parent: Curve
    sub: Curve
    vertex_points: Mapping[str, PointRef]
    edge_chart: Mapping[str, tuple[str, Fraction]]  # sub edge -> (parent edge, parent offset of 0)

    def parent_point(self, p: PointRef) -> PointRef:
        if p.kind == "vertex":
            return self.vertex_points[p.vertex]
        eid, start = self.edge_chart[p.edge]
        return self.parent.pt_on_edge(eid, start + p.offset)


def _merge_intervals(ivs: Iterable[Interval]) -> list[Interval]:
    out: list[Interval] = []
    for lo, hi in sorted(ivs):
        if out and lo <= out[-1][1]:
            prev_lo, prev_hi = out[-1]
            out[-1] = (prev_lo, max(prev_hi, hi))
        else:
            out.append((lo, hi))
    return out


def make_subgraph(c: Curve, vertices: Iterable[str] = (), edges: Iterable[str] = (),
                  intervals: Iterable[tuple] = ()) -> Subgraph:
    """Normalize a closed-subset description into a Subgraph.

    ``intervals`` entries are ``(edge id, lo, hi)`` in edge coordinates;
    ``hi`` may be ``inf`` on infinite edges.  Components consisting of a
    single point at infinity are rejected.
    """
    vset: set[str] = set()
    arc_ivs: dict[str, list[Interval]] = {}

    def add_arc_interval(aid: str, lo: Fraction, hi):
        arc = c.arcs[aid]
        if lo == hi == 0:
            vset.add(arc.u)
            return
        if hi != INF and lo == hi == arc.length:
            vset.add(arc.v)
            return
        arc_ivs.setdefault(aid, []).append((lo, hi))
        if lo == 0:
            vset.add(arc.u)
        if hi == arc.length:
            vset.add(arc.v)

    for vid in vertices:
        info = c.vertices.get(vid)
        if info is None or info.hidden:
            raise TropError(f"unknown vertex {vid!r}")
        vset.add(vid)
    for eid in edges:
        e = c.edges.get(eid)
        if e is None:
            raise TropError(f"unknown edge {eid!r}")
        for aid in c.arcs_of_edge[eid]:
            arc = c.arcs[aid]
            add_arc_interval(aid, Fraction(0), arc.length)
    for eid, lo, hi in intervals:
        e = c.edges.get(eid)
        if e is None:
            raise TropError(f"unknown edge {eid!r}")
        lo = rat(lo)
        hi = INF if hi == INF or (isinstance(hi, str) and hi == "inf") else rat(hi)
        if lo < 0 or lo > hi or (hi != INF and hi > e.length):
            raise TropError(f"invalid interval [{lo},{hi}] on edge {eid!r}")
        if hi == INF and not e.is_infinite:
            raise TropError(f"interval reaches infinity on finite edge {eid!r}")
        for aid in c.arcs_of_edge[eid]:
            arc = c.arcs[aid]
            arc_hi = INF if arc.length == INF else arc.start + arc.length
            alo = max(lo, arc.start)
            ahi = min(hi, arc_hi)
            if alo > ahi:
                continue
            add_arc_interval(aid, alo - arc.start, INF if ahi == INF else ahi - arc.start)

    merged = tuple(sorted((aid, tuple(_merge_intervals(ivs))) for aid, ivs in arc_ivs.items()))
    g = Subgraph(c, frozenset(vset), merged)
    for comp in g.components():
        items = comp._items()
        if len(items) == 1 and items[0][0] == "v":
            vid = items[0][1]
            if c.vertices[vid].at_infinity:
                raise TropError(f"subgraph component is a single point at infinity: {vid!r}")
    return g


def whole_subgraph(c: Curve) -> Subgraph:
    return make_subgraph(c, vertices=[v.id for v in c.vertices.values() if not v.hidden],
                         edges=list(c.edges))


def point_subgraph(c: Curve, p: PointRef) -> Subgraph:
    kind, ident, off = c._resolve(p)
    if kind == "vertex":
        if ident in c.hidden_info:
            eid, e_off = c.hidden_info[ident]
            return make_subgraph(c, intervals=[(eid, e_off, e_off)])
        return make_subgraph(c, vertices=[ident])
    arc = c.arcs[ident]
    return make_subgraph(c, intervals=[(arc.edge, arc.start + off, arc.start + off)])
