"""Weighted one-dimensional rational polyhedral complexes and their invariants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NonTransversalError, TropError
from .geometry import (
    IVec,
    Vec,
    dot,
    edge_intersection,
    ivec_gcd,
    on_ray,
    on_segment,
    parallel,
    primitive_of,
    vadd,
    vscale,
    vsub,
)
from .semifield import rat


def _coerce_point(p: Sequence, dim: int) -> Vec:
    q = tuple(rat(x) for x in p)
    if len(q) != dim:
        raise TropError(f"point {p} has dimension {len(q)}, expected {dim}")
    return q


@dataclass(frozen=True)
class PolyComplex1D:
    """Vertices plus weighted segments and rays with primitive directions.

    Edges may meet only at shared vertices; weights are positive integers;
    ray directions are primitive integer vectors.
    """

    dim: int
    vertices: tuple[Vec, ...]
    segments: tuple[tuple[int, int, int], ...]
    rays: tuple[tuple[int, IVec, int], ...]

    def __post_init__(self):
        seen = set()
        for v in self.vertices:
            if len(v) != self.dim:
                raise TropError(f"vertex {v} has wrong dimension")
            if v in seen:
                raise TropError(f"duplicate vertex {v}")
            seen.add(v)
        nv = len(self.vertices)
        for i, j, w in self.segments:
            if not (0 <= i < nv and 0 <= j < nv):
                raise TropError("segment endpoint index out of range")
            if i == j:
                raise TropError("degenerate segment")
            if w <= 0:
                raise TropError("weights must be positive")
        for i, d, w in self.rays:
            if not 0 <= i < nv:
                raise TropError("ray base index out of range")
            if w <= 0:
                raise TropError("weights must be positive")
            if ivec_gcd(d) != 1:
                raise TropError(f"ray direction {d} is not primitive")
        self._check_complex_property()

    @staticmethod
    def of(dim: int, vertices: Iterable[Sequence], segments: Iterable[Sequence] = (),
           rays: Iterable[Sequence] = ()) -> "PolyComplex1D":
        vs = tuple(_coerce_point(v, dim) for v in vertices)
        segs = tuple((int(i), int(j), int(w)) for i, j, w in segments)
        rs = tuple((int(i), tuple(int(c) for c in d), int(w)) for i, d, w in rays)
        return PolyComplex1D(dim, vs, segs, rs)

    # -- basic queries ---------------------------------------------------

    def edges(self):
        """Yield ("seg", p, q, w) and ("ray", base, dir, w) tuples."""
        for i, j, w in self.segments:
            yield ("seg", self.vertices[i], self.vertices[j], w)
        for i, d, w in self.rays:
            yield ("ray", self.vertices[i], d, w)

    def edge_count(self) -> int:
        return len(self.segments) + len(self.rays)

    def contains(self, p: Sequence) -> bool:
        q = _coerce_point(p, self.dim)
        if q in self.vertices:
            return True
        for kind, a, b, _ in self.edges():
            if kind == "seg" and on_segment(q, a, b):
                return True
            if kind == "ray" and on_ray(q, a, b):
                return True
        return False

    def is_connected(self) -> bool:
        n = len(self.vertices)
        if n == 0:
            return True
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j, _ in self.segments:
            parent[find(i)] = find(j)
        return len({find(i) for i in range(n)}) == 1

    def translate(self, offset: Sequence) -> "PolyComplex1D":
        off = _coerce_point(offset, self.dim)
        return PolyComplex1D(self.dim, tuple(vadd(v, off) for v in self.vertices),
                             self.segments, self.rays)

    def _check_complex_property(self):
        edges = list(self.edges())
        for a in range(len(edges)):
            for b in range(a + 1, len(edges)):
                ka, pa, qa, _ = edges[a]
                kb, pb, qb, _ = edges[b]
                res = edge_intersection(ka, pa, qa, kb, pb, qb)
                if res[0] == "none":
                    continue
                if res[0] == "overlap":
                    raise TropError(f"edges {a} and {b} overlap: not a complex")
                p = res[1]
                if p not in self.vertices:
                    raise TropError(f"edges {a} and {b} cross at non-vertex {p}")

    # -- canonical form --------------------------------------------------

    def canonical(self) -> "PolyComplex1D":
        """Dissolve straight 2-valent vertices, re-anchor full lines, sort.

        Two complexes with the same weighted support have equal canonical
        forms, which makes support equality a structural comparison.
        """
        used = set()
        for i, j, _ in self.segments:
            used.update((i, j))
        for i, _, _ in self.rays:
            used.add(i)
        isolated = [self.vertices[i] for i in range(len(self.vertices)) if i not in used]

        # Mutable edge soup: ("seg", p, q, w) / ("ray", base, d, w) / ("line", base, d, w).
        edges = list(self.edges())
        changed = True
        while changed:
            changed = False
            incident: dict[Vec, list[int]] = {}
            for idx, e in enumerate(edges):
                if e[0] == "seg":
                    incident.setdefault(e[1], []).append(idx)
                    incident.setdefault(e[2], []).append(idx)
                elif e[0] == "ray":
                    incident.setdefault(e[1], []).append(idx)
            for v, idxs in incident.items():
                if len(idxs) != 2:
                    continue
                e1, e2 = edges[idxs[0]], edges[idxs[1]]
                if e1[3] != e2[3]:
                    continue
                d1 = self._dir_away(e1, v)
                d2 = self._dir_away(e2, v)
                if d1 is None or d2 is None:
                    continue
                if not (parallel(d1, d2) and dot(d1, d2) < 0):
                    continue
                for idx in sorted(idxs, reverse=True):
                    edges.pop(idx)
                edges.append(self._merge_at(e1, e2, v))
                changed = True
                break

        segs = []
        rays = []
        for e in edges:
            if e[0] == "seg":
                a, b = sorted((e[1], e[2]))
                segs.append((a, b, e[3]))
            elif e[0] == "ray":
                rays.append((e[1], e[2], e[3]))
            else:  # full line through base with direction d
                base, d, w = e[1], e[2], e[3]
                anchor = line_anchor(base, d)
                dpos, _ = primitive_of(d)
                dneg = tuple(-x for x in dpos)
                if dneg < dpos:
                    dpos, dneg = dneg, dpos
                rays.append((anchor, dpos, w))
                rays.append((anchor, dneg, w))

        points = sorted({p for a, b, _ in segs for p in (a, b)}
                        | {base for base, _, _ in rays}
                        | set(isolated))
        remap = {p: i for i, p in enumerate(points)}
        seg_idx = sorted((min(remap[a], remap[b]), max(remap[a], remap[b]), w) for a, b, w in segs)
        ray_idx = sorted((remap[base], d, w) for base, d, w in rays)
        return PolyComplex1D(self.dim, tuple(points), tuple(seg_idx), tuple(ray_idx))

    @staticmethod
    def _dir_away(edge, v: Vec):
        if edge[0] == "seg":
            if edge[1] == v:
                return vsub(edge[2], edge[1])
            if edge[2] == v:
                return vsub(edge[1], edge[2])
            return None
        if edge[0] == "ray" and edge[1] == v:
            return tuple(Fraction(x) for x in edge[2])
        return None

    @staticmethod
    def _merge_at(e1, e2, v: Vec):
        # Merge two collinear equal-weight edges meeting at v into one edge.
        w = e1[3]
        if e1[0] == "seg" and e2[0] == "seg":
            a = e1[1] if e1[2] == v else e1[2]
            b = e2[1] if e2[2] == v else e2[2]
            return ("seg", a, b, w)
        if e1[0] == "seg" and e2[0] == "ray":
            a = e1[1] if e1[2] == v else e1[2]
            return ("ray", a, e2[2], w)
        if e1[0] == "ray" and e2[0] == "seg":
            b = e2[1] if e2[2] == v else e2[2]
            return ("ray", b, e1[2], w)
        # ray + ray in opposite directions: a full line, re-anchored later.
        return ("line", v, e1[2], w)


def line_anchor(base: Sequence, d: Sequence) -> Vec:
    """Deterministic anchor of the line through base with direction d.

    Zeroes the first coordinate in which d is nonzero.
    """
    b = tuple(Fraction(x) for x in base)
    dd = tuple(Fraction(x) for x in d)
    for k, x in enumerate(dd):
        if x != 0:
            t = b[k] / x
            return vsub(b, vscale(dd, t))
    raise TropError("zero direction")


@dataclass(frozen=True)
class BalanceReport:
    balanced: bool
    defects: tuple[tuple[int, IVec], ...]  # vertex index -> weighted direction sum


def check_balanced(complex_: PolyComplex1D) -> BalanceReport:
    """Sum weight * primitive outgoing direction at every vertex, exactly."""
    sums: dict[int, list[Fraction]] = {i: [Fraction(0)] * complex_.dim for i in range(len(complex_.vertices))}
    for i, j, w in complex_.segments:
        d = vsub(complex_.vertices[j], complex_.vertices[i])
        prim, _ = primitive_of(d)
        for k in range(complex_.dim):
            sums[i][k] += w * prim[k]
            sums[j][k] -= w * prim[k]
    for i, d, w in complex_.rays:
        for k in range(complex_.dim):
            sums[i][k] += w * d[k]
    defects = tuple((i, tuple(int(x) for x in s)) for i, s in sorted(sums.items()))
    balanced = all(all(x == 0 for x in s) for _, s in defects)
    return BalanceReport(balanced, defects)


@dataclass(frozen=True)
class IntersectionPoint:
    point: Vec
    multiplicity: int


def intersect(k1: PolyComplex1D, k2: PolyComplex1D) -> tuple[IntersectionPoint, ...]:
    """All transversal intersection points of two plane complexes.

    Any point violating transversality (a vertex hit, or dependent
    directions / overlap) raises NonTransversalError naming the point and
    the failed condition.
    """
    if k1.dim != 2 or k2.dim != 2:
        raise TropError("plane intersection requires dimension 2")
    a = k1.canonical()
    b = k2.canonical()
    a_through = _through_vertices(a)
    b_through = _through_vertices(b)
    found: dict[Vec, int] = {}
    for ka, pa, qa, wa in a.edges():
        for kb, pb, qb, wb in b.edges():
            res = edge_intersection(ka, pa, qa, kb, pb, qb)
            if res[0] == "none":
                continue
            if res[0] == "overlap":
                raise NonTransversalError(res[1], 4, "the two edges overlap along a common line")
            p = res[1]
            da = _slope_vector(ka, pa, qa, wa)
            db = _slope_vector(kb, pb, qb, wb)
            if p in a.vertices:
                if p not in a_through:
                    raise NonTransversalError(
                        p, 2, "intersection at a vertex is not two-valent on both sides")
                da = a_through[p]
            if p in b.vertices:
                if p not in b_through:
                    raise NonTransversalError(
                        p, 2, "intersection at a vertex is not two-valent on both sides")
                db = b_through[p]
            det = da[0] * db[1] - da[1] * db[0]
            if det == 0:
                raise NonTransversalError(p, 4, "direction vectors are linearly dependent")
            mult = abs(int(det))
            if p in found and found[p] != mult:
                raise NonTransversalError(p, 2, "point lies on more than one edge of a complex")
            found[p] = mult
    return tuple(IntersectionPoint(p, m) for p, m in sorted(found.items()))


def _through_vertices(k: PolyComplex1D) -> dict[Vec, IVec]:
    """Vertices that are straight 2-valent points: equal weights, opposite
    collinear directions.  Such points are interior points of the support
    (line anchors, for instance), so meetings there stay transversal."""
    incident: dict[int, list[tuple[Vec, int]]] = {}
    for i, j, w in k.segments:
        incident.setdefault(i, []).append((vsub(k.vertices[j], k.vertices[i]), w))
        incident.setdefault(j, []).append((vsub(k.vertices[i], k.vertices[j]), w))
    for i, d, w in k.rays:
        incident.setdefault(i, []).append((tuple(Fraction(x) for x in d), w))
    out: dict[Vec, IVec] = {}
    for i, ends in incident.items():
        if len(ends) != 2:
            continue
        (d1, w1), (d2, w2) = ends
        if w1 != w2:
            continue
        if parallel(d1, d2) and dot(d1, d2) < 0:
            prim, _ = primitive_of(d1)
            out[k.vertices[i]] = tuple(w1 * x for x in prim)
    return out


def _slope_vector(kind, p, q, w) -> IVec:
    d = vsub(q, p) if kind == "seg" else q
    prim, _ = primitive_of(d)
    return tuple(w * x for x in prim)
