"""Morphisms between curves: validation, pullbacks, weights, localization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .curve import INF, Curve, PointRef
from .errors import TropError
from .plfunction import PLFunction, Profile, _isolated_vertices, _normalize, edge_profile
from .semifield import Germ, rat


@dataclass(frozen=True)
class Morphism:
    """A map of fixed loopless models: vertices to vertices, edges to edges or
    collapsed to vertices, with a nonnegative stretch degree per edge (0 iff
    collapsed)."""

    source: Curve
    target: Curve
    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, tuple[str, str]]  # edge -> ("edge", id) or ("vertex", id)
    degrees: Mapping[str, int]

    @staticmethod
    def identity(c: Curve) -> "Morphism":
        return Morphism(c, c,
                        {v: v for v in c.vertices if not c.vertices[v].hidden},
                        {e: ("edge", e) for e in c.edges},
                        {e: 1 for e in c.edges})


@dataclass(frozen=True)
class MorphismReport:
    ok: bool
    violations: tuple[str, ...]


def validate_morphism(m: Morphism) -> MorphismReport:
    """Check endpoint compatibility, the metric law, and the ray-class law."""
    bad: list[str] = []
    src, tgt = m.source, m.target
    if any(e.is_loop for e in src.edges.values()) or any(e.is_loop for e in tgt.edges.values()):
        bad.append("models must be loopless; subdivide loops first")
        return MorphismReport(False, tuple(bad))
    for vid, info in src.vertices.items():
        if info.hidden:
            continue
        img = m.vertex_map.get(vid)
        if img is None or img not in tgt.vertices or tgt.vertices[img].hidden:
            bad.append(f"vertex {vid!r} has no valid image")
    for eid, e in src.edges.items():
        entry = m.edge_map.get(eid)
        deg = m.degrees.get(eid)
        if entry is None or deg is None or deg < 0:
            bad.append(f"edge {eid!r} lacks an image or a nonnegative degree")
            continue
        kind, name = entry
        fu, fv = m.vertex_map.get(e.u), m.vertex_map.get(e.v)
        if kind == "vertex":
            if deg != 0:
                bad.append(f"edge {eid!r} collapses but has degree {deg}")
            if fu != name or fv != name:
                bad.append(f"edge {eid!r} collapses to {name!r} but endpoints map elsewhere")
            continue
        te = tgt.edges.get(name)
        if te is None:
            bad.append(f"edge {eid!r} maps to unknown edge {name!r}")
            continue
        if deg == 0:
            bad.append(f"edge {eid!r} maps onto an edge but has degree 0")
            continue
        if {fu, fv} != {te.u, te.v}:
            bad.append(f"edge {eid!r}: endpoint images {fu!r},{fv!r} "
                       f"do not match {name!r} endpoints")
            continue
        if e.is_infinite:
            if not te.is_infinite:
                bad.append(f"ray {eid!r} maps to a finite edge")
            elif fv != te.v:
                bad.append(f"ray {eid!r} must send its point at infinity to the one of {name!r}")
        else:
            if te.is_infinite:
                bad.append(f"finite edge {eid!r} maps onto a ray")
            elif te.length != deg * e.length:
                bad.append(f"edge {eid!r}: target length {te.length} != "
                           f"{deg} * {e.length}")
    # Ray-class law: within a source class all rays collapse, or all map to
    # rays of one target class with one degree.
    by_class: dict[str, list[str]] = {}
    for eid, label in src.ray_classes.items():
        by_class.setdefault(label, []).append(eid)
    for label, members in sorted(by_class.items()):
        images = []
        for eid in members:
            entry = m.edge_map.get(eid)
            if entry is None:
                continue
            images.append((eid, entry, m.degrees.get(eid)))
        kinds = {entry[0] for _, entry, _ in images}
        if len(kinds) > 1:
            bad.append(f"ray class {label!r}: some rays collapse and some do not")
            continue
        if kinds == {"edge"}:
            target_labels = {m.target.ray_classes.get(entry[1]) for _, entry, _ in images}
            degs = {deg for _, _, deg in images}
            if len(target_labels) > 1:
                bad.append(f"ray class {label!r} maps into several target classes")
            if len(degs) > 1:
                bad.append(f"ray class {label!r} has unequal degrees at infinity {sorted(degs)}")
    return MorphismReport(not bad, tuple(bad))


def _edge_orientation(m: Morphism, eid: str) -> bool:
    """True when the edge maps forward (u to u-endpoint of the image)."""
    e = m.source.edges[eid]
    te = m.target.edges[m.edge_map[eid][1]]
    return m.vertex_map[e.u] == te.u


def pullback(m: Morphism, f_target: PLFunction) -> PLFunction:
    """Compose a function on the target with the morphism, exactly."""
    report = validate_morphism(m)
    if not report.ok:
        raise TropError(f"invalid morphism: {report.violations[0]}")
    if f_target.curve != m.target:
        raise TropError("function does not live on the morphism target")
    if f_target.is_neg_inf:
        return PLFunction.neg_inf(m.source)
    src = m.source
    profiles: dict[str, Profile] = {}
    for eid, e in src.edges.items():
        kind, name = m.edge_map[eid]
        if kind == "vertex":
            val = f_target.value_at(m.target.pt_vertex(name))
            if e.is_infinite:
                profiles[eid] = Profile(((Fraction(0), val),), 0)
            else:
                profiles[eid] = Profile(((Fraction(0), val), (e.length, val)), None)
            continue
        d = m.degrees[eid]
        prof = edge_profile(f_target, name)
        if _edge_orientation(m, eid):
            breaks = [(o / d, v) for o, v in prof.breaks]
            tail = None if prof.tail is None else prof.tail * d
            profiles[eid] = _normalize(breaks, tail)
        else:
            te = m.target.edges[name]
            breaks = [((te.length - o) / d, v) for o, v in prof.breaks]
            profiles[eid] = _normalize(breaks, None)
    isolated = {vid: f_target.value_at(m.target.pt_vertex(m.vertex_map[vid]))
                for vid in _isolated_vertices(src)}
    return PLFunction(src, profiles, isolated)


def compose(outer: Morphism, inner: Morphism) -> Morphism:
    """outer after inner; edge degrees multiply along uncollapsed chains."""
    if inner.target != outer.source:
        raise TropError("morphisms do not compose")
    vmap = {v: outer.vertex_map[w] for v, w in inner.vertex_map.items()}
    emap = {}
    degs = {}
    for eid, (kind, name) in inner.edge_map.items():
        if kind == "vertex":
            emap[eid] = ("vertex", outer.vertex_map[name])
            degs[eid] = 0
        else:
            okind, oname = outer.edge_map[name]
            emap[eid] = (okind, oname)
            degs[eid] = inner.degrees[eid] * (outer.degrees[name] if okind == "edge" else 0)
            if okind == "vertex":
                emap[eid] = ("vertex", oname)
    return Morphism(inner.source, outer.target, vmap, emap, degs)


@dataclass(frozen=True)
class WeightReport:
    is_weight: bool
    edge_weights: tuple[tuple[str, int], ...] | None
    reasons: tuple[str, ...]


def weight_check(m: Morphism) -> WeightReport:
    """A weight is a bijective morphism matching ray classes both ways."""
    base = validate_morphism(m)
    if not base.ok:
        return WeightReport(False, None, base.violations)
    reasons: list[str] = []
    src, tgt = m.source, m.target
    src_vs = [v for v in src.vertices.values() if not v.hidden]
    tgt_vs = [v for v in tgt.vertices.values() if not v.hidden]
    if sorted(m.vertex_map.values()) != sorted(v.id for v in tgt_vs) or len(src_vs) != len(tgt_vs):
        reasons.append("vertex map is not a bijection")
    images = [name for kind, name in m.edge_map.values() if kind == "edge"]
    if len(images) != len(m.edge_map) or sorted(images) != sorted(tgt.edges):
        reasons.append("edge map is not a bijection onto the target edges")
    if not reasons:
        inv_edge = {name: eid for eid, (kind, name) in m.edge_map.items()}
        for e1 in src.ray_classes:
            for e2 in src.ray_classes:
                same_src = src.ray_classes[e1] == src.ray_classes[e2]
                same_tgt = (tgt.ray_classes[m.edge_map[e1][1]]
                            == tgt.ray_classes[m.edge_map[e2][1]])
                if same_src != same_tgt:
                    reasons.append(f"rays {e1!r},{e2!r}: parallel on one side only")
        if reasons:
            reasons = sorted(set(reasons))
    if reasons:
        return WeightReport(False, None, tuple(reasons))
    inv_edge = {name: eid for eid, (kind, name) in m.edge_map.items()}
    weights = tuple(sorted((te, m.degrees[inv_edge[te]]) for te in tgt.edges))
    return WeightReport(True, weights, ())


def weight_from_generators(gens: Sequence[PLFunction], edge: str) -> int:
    """Greatest common divisor of the generator slopes on a straight edge."""
    if not gens:
        raise TropError("no generators")
    curve = gens[0].curve
    e = curve.edges.get(edge)
    if e is None:
        raise TropError(f"unknown edge {edge!r}")
    slopes = []
    for g in gens:
        if g.curve != curve:
            raise TropError("generators on different curves")
        if g.is_neg_inf:
            raise TropError("the zero function has no slopes")
        prof = edge_profile(g, edge)
        if e.is_infinite:
            if len(prof.breaks) > 1:
                raise TropError(f"generator is not affine on {edge!r}; subdivide first")
            slopes.append(prof.tail)
        else:
            if len(prof.breaks) > 2:
                raise TropError(f"generator is not affine on {edge!r}; subdivide first")
            slopes.append(prof.slope_right(Fraction(0)))
    g0 = 0
    for s in slopes:
        g0 = gcd(g0, abs(s))
    if g0 == 0:
        raise TropError("weight undetermined on level edge: all slopes are zero")
    return g0


# -- localization -----------------------------------------------------------------


@dataclass(frozen=True)
class Localization:
    """Handle for reading the germ of a function at a finite point.

    Germs are comparable only against the same recorded direction order.
    """

    curve: Curve
    point: PointRef
    directions: tuple[str, ...]

    @property
    def rank(self) -> int:
        return len(self.directions)

    def apply(self, f: PLFunction) -> Germ:
        if f.curve != self.curve:
            raise TropError("function lives on a different curve")
        if f.is_neg_inf:
            return Germ.zero(self.rank)
        value = f.value_at(self.point)
        slopes = tuple(f.outgoing_slope(self.point, d) for d in self.directions)
        return Germ(self.rank, value, slopes)


def localize(c: Curve, x: PointRef, direction_order: Sequence[str] | None = None) -> Localization:
    """Localization of the function semifield at a finite point."""
    if c.is_at_infinity(x):
        raise TropError("cannot localize at a point at infinity")
    dirs = c.directions_at(x)
    if direction_order is None:
        order = dirs
    else:
        order = tuple(direction_order)
        if sorted(order) != sorted(dirs):
            raise TropError(f"direction order must be a permutation of {sorted(dirs)}")
    return Localization(c, x, order)


def germ_bump(loc: Localization, germ: Germ) -> PLFunction:
    """A function whose germ at the localization point is the given germ.

    Takes the germ value at the point, runs with the germ slopes for a
    small exact radius, returns to zero, and is zero elsewhere.
    """
    if germ.is_neg_inf:
        return PLFunction.neg_inf(loc.curve)
    if germ.n != loc.rank:
        raise TropError(f"germ rank {germ.n} != point valence {loc.rank}")
    c = loc.curve
    kind, ident, off = c._resolve(loc.point)

    def leg_base(aid: str, sign: str) -> Fraction:
        if kind == "arc":
            return off
        return Fraction(0) if sign == "+" else c.arcs[aid].length

    rooms = []
    for d in loc.directions:
        aid, sign = d.rsplit(":", 1)
        arc = c.arcs[aid]
        base = leg_base(aid, sign)
        room = (arc.length - base) if sign == "+" else base
        rooms.append(Fraction(1) if room == INF else room)
    eps = min(rooms) / 3
    if eps <= 0:
        raise TropError("no room for a bump at this point")
    a = germ.coef

    def leg(slope: int) -> list[tuple[Fraction, Fraction]]:
        # Breakpoints as distance from the point: germ slope for eps, then
        # an integer return slope back to zero within another eps.
        v1 = a + slope * eps
        pts = [(Fraction(0), a), (eps, v1)]
        if v1 != 0:
            rate = math.ceil(abs(v1) / eps)
            pts.append((eps + abs(v1) / rate, Fraction(0)))
        return pts

    zero = PLFunction.constant(c, 0)
    profiles = dict(zero.profiles)
    by_arc: dict[str, list[tuple[str, int]]] = {}
    for d, slope in zip(loc.directions, germ.slopes):
        aid, sign = d.rsplit(":", 1)
        by_arc.setdefault(aid, []).append((sign, slope))
    for aid, legs in by_arc.items():
        breaks: dict[Fraction, Fraction] = dict(profiles[aid].breaks)
        for sign, slope in legs:
            base = leg_base(aid, sign)
            direction = 1 if sign == "+" else -1
            for dist, val in leg(slope):
                breaks[base + direction * dist] = val
        profiles[aid] = _normalize(sorted(breaks.items()), profiles[aid].tail)
    return PLFunction(c, profiles, dict(zero.isolated))


@dataclass(frozen=True)
class SurjectivityReport:
    point: PointRef
    rank: int
    samples: int
    all_matched: bool
    over_rank_rejected: bool


def localization_surjectivity(c: Curve, x: PointRef, samples: int = 25,
                              seed: int = 0) -> SurjectivityReport:
    """Sample germs, build bump preimages, and confirm they localize back.

    Also confirms structurally that no direction order longer than the
    valence exists at the point.
    """
    import random

    loc = localize(c, x)
    rng = random.Random(seed)
    matched = True
    for _ in range(samples):
        coef = Fraction(rng.randint(-12, 12), rng.randint(1, 6))
        slopes = tuple(rng.randint(-5, 5) for _ in range(loc.rank))
        germ = Germ(loc.rank, coef, slopes)
        f = germ_bump(loc, germ)
        if loc.apply(f) != germ:
            matched = False
            break
    over = False
    try:
        localize(c, x, direction_order=tuple(loc.directions) + ("extra:+",))
    except TropError:
        over = True
    return SurjectivityReport(x, loc.rank, samples, matched, over)


@dataclass(frozen=True)
class LatticeReport:
    """Slope sublattice of pulled-back germs at the preimage of a point."""

    point: PointRef
    preimage: PointRef
    direction_weights: tuple[tuple[str, int], ...]  # target direction -> weight
    verified: bool
    samples: int


def weighted_local_image(m: Morphism, x: PointRef, samples: int = 12,
                         seed: int = 0) -> LatticeReport:
    """Weights per direction at x; pulled-back germ slopes land in w_i Z.

    Verified against sampled pullbacks of random functions on the target.
    """
    from .randgen import random_function
    import random

    wc = weight_check(m)
    if not wc.is_weight:
        raise TropError(f"not a weight: {wc.reasons[0] if wc.reasons else 'invalid'}")
    tgt, src = m.target, m.source
    if tgt.is_at_infinity(x):
        raise TropError("localize at a finite point")
    inv_edge = {name: eid for eid, (kind, name) in m.edge_map.items()}
    inv_vertex = {w: v for v, w in m.vertex_map.items()}
    tdirs = tgt.directions_at(x)
    weights = tuple((d, m.degrees[inv_edge[d.rsplit(':', 1)[0]]]) for d in tdirs)
    # Preimage point and matching source direction order.
    kind, ident, off = tgt._resolve(x)
    if kind == "vertex":
        pre = src.pt_vertex(inv_vertex[ident])
    else:
        eid = inv_edge[ident]
        d = m.degrees[eid]
        if _edge_orientation(m, eid):
            pre = src.pt_on_edge(eid, off / d)
        else:
            pre = src.pt_on_edge(eid, (src.edges[eid].length - off / d))
    sdirs = []
    for tdir in tdirs:
        te, sign = tdir.rsplit(":", 1)
        se = inv_edge[te]
        forward = _edge_orientation(m, se)
        ssign = sign if forward else ("+" if sign == "-" else "-")
        sdirs.append(f"{se}:{ssign}")
    loc = localize(src, pre, sdirs)
    rng = random.Random(seed)
    verified = True
    for _ in range(samples):
        f = random_function(tgt, rng)
        if f.is_neg_inf:
            continue
        germ = loc.apply(pullback(m, f))
        for (tdir, w), slope in zip(weights, germ.slopes):
            if slope % w != 0:
                verified = False
    return LatticeReport(x, pre, weights, verified, samples)
