"""Piecewise-linear rational functions on curves, divisors, and chip firing.

Profiles are stored per internal arc as exact rational breakpoints with
integer slopes; all operations refine breakpoints exactly, so function
equality is structural equality of normalized profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .curve import INF, Curve, PointRef
from .errors import TropError
from .semifield import TropValue, rat
from .subgraph import Subgraph, SubChart


@dataclass(frozen=True)
class Profile:
    """Breakpoints of one arc: ((offset, value), ...) plus a tail slope on rays.

    Offsets strictly increase from 0; finite arcs end at the arc length and
    have ``tail is None``; infinite arcs carry the integer slope past the
    last breakpoint.
    """

    breaks: tuple[tuple[Fraction, Fraction], ...]
    tail: int | None = None

    def value(self, t: Fraction) -> Fraction:
        bs = self.breaks
        if t > bs[-1][0]:
            if self.tail is None:
                raise TropError(f"offset {t} beyond arc end")
            return bs[-1][1] + self.tail * (t - bs[-1][0])
        for k in range(len(bs) - 1, -1, -1):
            if bs[k][0] <= t:
                if bs[k][0] == t:
                    return bs[k][1]
                o0, v0 = bs[k]
                o1, v1 = bs[k + 1]
                return v0 + (v1 - v0) * (t - o0) / (o1 - o0)
        raise TropError(f"offset {t} before arc start")

    def slope_right(self, t: Fraction) -> int:
        bs = self.breaks
        for k in range(len(bs) - 1):
            if bs[k][0] <= t < bs[k + 1][0]:
                return _slope(bs[k], bs[k + 1])
        if self.tail is None:
            raise TropError(f"no piece right of {t}")
        return self.tail

    def slope_left(self, t: Fraction) -> int:
        bs = self.breaks
        if self.tail is not None and t > bs[-1][0]:
            return self.tail
        for k in range(len(bs) - 1, 0, -1):
            if bs[k - 1][0] < t <= bs[k][0]:
                return _slope(bs[k - 1], bs[k])
        raise TropError(f"no piece left of {t}")


def _slope(b0, b1) -> int:
    s = (b1[1] - b0[1]) / (b1[0] - b0[0])
    if s.denominator != 1:
        raise TropError(f"non-integer slope {s}")
    return int(s)


def _normalize(breaks: Sequence[tuple[Fraction, Fraction]], tail: int | None) -> Profile:
    bs = list(breaks)
    if any(bs[k][0] > bs[k + 1][0] for k in range(len(bs) - 1)):
        bs.sort()
    out = [bs[0]]
    for b in bs[1:]:
        if b[0] == out[-1][0]:
            if b[1] != out[-1][1]:
                raise TropError("conflicting breakpoint values")
            continue
        out.append(b)
    # Drop interior breakpoints where the slope does not change (checked by
    # cross-multiplication; no divisions).
    slim = [out[0]]
    for k in range(1, len(out)):
        while len(slim) >= 2:
            (o0, v0), (o1, v1) = slim[-2], slim[-1]
            o2, v2 = out[k]
            if (v1 - v0) * (o2 - o1) == (v2 - v1) * (o1 - o0):
                slim.pop()
            else:
                break
        slim.append(out[k])
    out = slim
    while tail is not None and len(out) >= 2:
        (o0, v0), (o1, v1) = out[-2], out[-1]
        if v1 - v0 == tail * (o1 - o0):
            out.pop()
        else:
            break
    return Profile(tuple(out), tail)


def _values_at(p: Profile, offsets: Sequence[Fraction]) -> list[Fraction]:
    """Values of a profile at sorted offsets, in one sweep."""
    bs = p.breaks
    out = []
    k = 0
    for t in offsets:
        while k + 1 < len(bs) and bs[k + 1][0] <= t:
            k += 1
        o0, v0 = bs[k]
        if t == o0:
            out.append(v0)
        elif k + 1 < len(bs):
            o1, v1 = bs[k + 1]
            out.append(v0 + (v1 - v0) * (t - o0) / (o1 - o0))
        elif p.tail is not None:
            out.append(v0 + p.tail * (t - o0))
        else:
            raise TropError(f"offset {t} beyond arc end")
    return out


def _combine2(p: Profile, q: Profile, op: str) -> Profile:
    """Exact pointwise max/min/add of two profiles over one arc."""
    offsets = sorted({o for o, _ in p.breaks} | {o for o, _ in q.breaks})
    pv = _values_at(p, offsets)
    qv = _values_at(q, offsets)
    if op == "add":
        tail = None if p.tail is None else p.tail + q.tail
        return _normalize([(o, a + b) for o, a, b in zip(offsets, pv, qv)], tail)
    # max/min: record values and insert crossing points inside cells.
    pick = max if op == "max" else min
    pts = []
    for i, o in enumerate(offsets):
        pts.append((o, pick(pv[i], qv[i])))
        if i + 1 < len(offsets):
            da = pv[i] - qv[i]
            db = pv[i + 1] - qv[i + 1]
            if (da > 0 > db) or (da < 0 < db):
                width = offsets[i + 1] - o
                t = o + width * da / (da - db)
                v = pv[i] + (pv[i + 1] - pv[i]) * (t - o) / width
                pts.append((t, v))
    tail = None
    if p.tail is not None:
        dlast = pv[-1] - qv[-1]
        dslope = p.tail - q.tail
        if dslope != 0:
            t = offsets[-1] - dlast / Fraction(dslope)
            if t > offsets[-1]:
                pts.append((t, pv[-1] + p.tail * (t - offsets[-1])))
        probe = pts[-1][0] + 1
        fp = pv[-1] + p.tail * (probe - offsets[-1])
        fq = qv[-1] + q.tail * (probe - offsets[-1])
        if op == "max":
            tail = p.tail if fp > fq or (fp == fq and p.tail >= q.tail) else q.tail
        else:
            tail = p.tail if fp < fq or (fp == fq and p.tail <= q.tail) else q.tail
    return _normalize(pts, tail)


def _shift(p: Profile, delta: Fraction) -> Profile:
    return Profile(tuple((o, v + delta) for o, v in p.breaks), p.tail)


def _negate(p: Profile) -> Profile:
    return Profile(tuple((o, -v) for o, v in p.breaks), None if p.tail is None else -p.tail)


def _scale_values(p: Profile, k: int) -> Profile:
    return _normalize([(o, v * k) for o, v in p.breaks], None if p.tail is None else p.tail * k)


def _slice(p: Profile, a: Fraction, b) -> Profile:
    """Restrict a profile to [a, b] (b may be INF), re-based at offset 0."""
    if b == INF:
        inner = [(o - a, v) for o, v in p.breaks if a < o]
        head = [(Fraction(0), p.value(a))]
        return _normalize(head + inner, p.tail if p.tail is not None else None)
    inner = [(o - a, v) for o, v in p.breaks if a < o < b]
    return _normalize([(Fraction(0), p.value(a))] + inner + [(b - a, p.value(b))], None)


def _reverse(p: Profile, length: Fraction) -> Profile:
    if p.tail is not None:
        raise TropError("cannot reverse an unbounded profile")
    return _normalize([(length - o, v) for o, v in p.breaks], None)


def _concat(pieces: Sequence[tuple[Fraction, Profile]]) -> Profile:
    """Join profiles starting at the given offsets into one profile."""
    breaks: list[tuple[Fraction, Fraction]] = []
    tail = None
    for start, prof in pieces:
        for o, v in prof.breaks:
            breaks.append((start + o, v))
        if prof.tail is not None:
            tail = prof.tail
    return _normalize(breaks, tail)


class PLFunction:
    """A rational function on a curve: -inf, or integer-sloped exact profiles."""

    def __init__(self, curve: Curve, profiles: Mapping[str, Profile] | None,
                 isolated: Mapping[str, Fraction] | None = None):
        self.curve = curve
        if profiles is None:
            self.profiles: dict[str, Profile] | None = None
            self.isolated: dict[str, Fraction] = {}
            return
        self.profiles = {aid: _normalize(p.breaks, p.tail) for aid, p in profiles.items()}
        self.isolated = dict(isolated or {})
        self._validate()

    # -- construction -------------------------------------------------------

    @staticmethod
    def neg_inf(curve: Curve) -> "PLFunction":
        return PLFunction(curve, None)

    @staticmethod
    def constant(curve: Curve, value) -> "PLFunction":
        v = rat(value)
        profiles = {}
        for aid, arc in curve.arcs.items():
            if arc.length == INF:
                profiles[aid] = Profile(((Fraction(0), v),), 0)
            else:
                profiles[aid] = Profile(((Fraction(0), v), (arc.length, v)), None)
        isolated = {vid: v for vid in _isolated_vertices(curve)}
        return PLFunction(curve, profiles, isolated)

    @staticmethod
    def from_edge_data(curve: Curve, data: Mapping[str, tuple], isolated=None) -> "PLFunction":
        """Build from per-edge breakpoint lists in user edge coordinates.

        ``data[edge] = (breakpoints, slope_at_infinity?)`` with breakpoints a
        list of (offset, value) pairs covering the edge.
        """
        profiles: dict[str, Profile] = {}
        for eid, entry in data.items():
            e = curve.edges.get(eid)
            if e is None:
                raise TropError(f"unknown edge {eid!r}")
            breaks, tail = entry
            bs = sorted((rat(o), rat(v)) for o, v in breaks)
            if not bs or bs[0][0] != 0:
                raise TropError(f"edge {eid!r} profile must start at offset 0")
            if e.is_infinite:
                if tail is None:
                    raise TropError(f"edge {eid!r} needs a slope at infinity")
                whole = Profile(tuple(bs), int(tail))
            else:
                if bs[-1][0] != e.length:
                    raise TropError(f"edge {eid!r} profile must end at the edge length")
                if tail is not None:
                    raise TropError(f"finite edge {eid!r} cannot have a slope at infinity")
                whole = Profile(tuple(bs), None)
            for aid in curve.arcs_of_edge[eid]:
                arc = curve.arcs[aid]
                hi = INF if arc.length == INF else arc.start + arc.length
                profiles[aid] = _slice(whole, arc.start, hi)
        missing = set(curve.arcs) - set(profiles)
        if missing:
            raise TropError(f"profiles missing for edges {sorted(curve.arcs[a].edge for a in missing)}")
        iso = {vid: rat(v) for vid, v in (isolated or {}).items()}
        return PLFunction(curve, profiles, iso)

    def _validate(self):
        for aid, arc in self.curve.arcs.items():
            p = self.profiles.get(aid)
            if p is None:
                raise TropError(f"no profile for arc {aid!r}")
            if p.breaks[0][0] != 0:
                raise TropError(f"profile on {aid!r} must start at 0")
            if arc.length == INF:
                if p.tail is None:
                    raise TropError(f"arc {aid!r} needs a tail slope")
            else:
                if p.tail is not None or p.breaks[-1][0] != arc.length:
                    raise TropError(f"profile on {aid!r} must end at the arc length")
            for b0, b1 in zip(p.breaks, p.breaks[1:]):
                _slope(b0, b1)
        for vid in _isolated_vertices(self.curve):
            if vid not in self.isolated:
                raise TropError(f"no value for isolated vertex {vid!r}")
        # Continuity at shared vertices.
        for vid, ends in self.curve.arcs_at.items():
            if self.curve.vertices[vid].at_infinity or not ends:
                continue
            vals = set()
            for aid, sign in ends:
                p = self.profiles[aid]
                vals.add(p.breaks[0][1] if sign > 0 else p.breaks[-1][1])
            if len(vals) > 1:
                raise TropError(f"discontinuous at vertex {vid!r}: values {sorted(vals)}")

    # -- identity ------------------------------------------------------------

    @property
    def is_neg_inf(self) -> bool:
        return self.profiles is None

    def _key(self):
        if self.profiles is None:
            return (self.curve.key(), None)
        return (self.curve.key(),
                tuple(sorted((a, p.breaks, p.tail) for a, p in self.profiles.items())),
                tuple(sorted(self.isolated.items())))

    def __eq__(self, other):
        return isinstance(other, PLFunction) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _require_same_curve(self, other: "PLFunction"):
        if self.curve != other.curve:
            raise TropError("functions live on different curves")

    # -- evaluation ------------------------------------------------------------

    def value_at(self, p: PointRef):
        """Exact value; +-inf (floats) only at points at infinity."""
        if self.profiles is None:
            return -INF
        kind, ident, off = self.curve._resolve(p)
        if kind == "vertex":
            info = self.curve.vertices[ident]
            ends = self.curve.arcs_at[ident]
            if not ends:
                return self.isolated[ident]
            aid, sign = ends[0]
            prof = self.profiles[aid]
            if info.at_infinity:
                if prof.tail > 0:
                    return INF
                if prof.tail < 0:
                    return -INF
                return prof.breaks[-1][1]
            return prof.breaks[0][1] if sign > 0 else prof.breaks[-1][1]
        return self.profiles[ident].value(off)

    def slope_at_infinity(self, edge: str) -> int:
        """Slope toward the point at infinity along an infinite edge."""
        if self.profiles is None:
            raise TropError("slope of the zero function")
        e = self.curve.edges.get(edge)
        if e is None or not e.is_infinite:
            raise TropError(f"edge {edge!r} is not a ray")
        return self.profiles[edge].tail

    def outgoing_slope(self, p: PointRef, direction: str) -> int:
        """Slope leaving p along a direction id from Curve.directions_at."""
        if self.profiles is None:
            raise TropError("slopes of the zero function are undefined")
        if direction not in self.curve.directions_at(p):
            raise TropError(f"direction {direction!r} invalid at {p}")
        aid, sign = direction.rsplit(":", 1)
        prof = self.profiles[aid]
        kind, ident, off = self.curve._resolve(p)
        if kind == "vertex":
            if self.curve.vertices[ident].at_infinity:
                return -prof.tail
            if sign == "+":
                return prof.slope_right(Fraction(0))
            return -prof.slope_left(prof.breaks[-1][0]) if prof.tail is None else -prof.tail
        return prof.slope_right(off) if sign == "+" else -prof.slope_left(off)

    # -- semifield operations ----------------------------------------------------

    def add(self, other: "PLFunction") -> "PLFunction":
        """Tropical sum: pointwise max with exact breakpoint refinement."""
        self._require_same_curve(other)
        if self.profiles is None:
            return other
        if other.profiles is None:
            return self
        profiles = {aid: _combine2(self.profiles[aid], other.profiles[aid], "max")
                    for aid in self.profiles}
        iso = {vid: max(v, other.isolated[vid]) for vid, v in self.isolated.items()}
        return PLFunction(self.curve, profiles, iso)

    def min_with(self, other: "PLFunction") -> "PLFunction":
        self._require_same_curve(other)
        if self.profiles is None or other.profiles is None:
            raise TropError("pointwise min with the zero function")
        profiles = {aid: _combine2(self.profiles[aid], other.profiles[aid], "min")
                    for aid in self.profiles}
        iso = {vid: min(v, other.isolated[vid]) for vid, v in self.isolated.items()}
        return PLFunction(self.curve, profiles, iso)

    def mul(self, other: "PLFunction") -> "PLFunction":
        """Tropical product: pointwise ordinary sum."""
        self._require_same_curve(other)
        if self.profiles is None or other.profiles is None:
            return PLFunction.neg_inf(self.curve)
        profiles = {aid: _combine2(self.profiles[aid], other.profiles[aid], "add")
                    for aid in self.profiles}
        iso = {vid: v + other.isolated[vid] for vid, v in self.isolated.items()}
        return PLFunction(self.curve, profiles, iso)

    def inv(self) -> "PLFunction":
        if self.profiles is None:
            raise TropError("zero has no multiplicative inverse")
        return PLFunction(self.curve, {a: _negate(p) for a, p in self.profiles.items()},
                          {vid: -v for vid, v in self.isolated.items()})

    def pow(self, k: int) -> "PLFunction":
        if self.profiles is None:
            if k <= 0:
                raise TropError("zero has no multiplicative inverse")
            return self
        return PLFunction(self.curve, {a: _scale_values(p, k) for a, p in self.profiles.items()},
                          {vid: v * k for vid, v in self.isolated.items()})

    def scale(self, t) -> "PLFunction":
        """Tropical scalar multiple: add a constant (or collapse to -inf)."""
        tv = t if isinstance(t, TropValue) else TropValue.of(t)
        if tv.is_neg_inf or self.profiles is None:
            return PLFunction.neg_inf(self.curve)
        return PLFunction(self.curve, {a: _shift(p, tv.coef) for a, p in self.profiles.items()},
                          {vid: v + tv.coef for vid, v in self.isolated.items()})

    # -- ray classes -----------------------------------------------------------------

    def respects_ray_classes(self) -> tuple[bool, tuple | None]:
        """Within every ray class, slopes at infinity must agree.

        Returns (ok, witness); the witness names the class and two rays
        with their differing slopes.
        """
        if self.profiles is None:
            return True, None
        by_class: dict[str, list[tuple[str, int]]] = {}
        for eid, label in self.curve.ray_classes.items():
            by_class.setdefault(label, []).append((eid, self.profiles[eid].tail))
        for label, members in sorted(by_class.items()):
            first_edge, first_slope = members[0]
            for eid, slope in members[1:]:
                if slope != first_slope:
                    return False, (label, first_edge, first_slope, eid, slope)
        return True, None


def _isolated_vertices(curve: Curve) -> list[str]:
    return [vid for vid, ends in curve.arcs_at.items() if not ends]


# -- divisors -----------------------------------------------------------------------


class Divisor:
    """Finite formal sum of points with nonzero integer coefficients."""

    def __init__(self, curve: Curve, coeffs: Mapping[PointRef, int] | Iterable[tuple[PointRef, int]]):
        self.curve = curve
        items = coeffs.items() if hasattr(coeffs, "items") else coeffs
        acc: dict[PointRef, int] = {}
        for p, k in items:
            if not curve.contains_point(p):
                raise TropError(f"point {p} is not on the curve")
            k = int(k)
            if k:
                acc[p] = acc.get(p, 0) + k
        self.coeffs = {p: k for p, k in acc.items() if k != 0}

    def coeff(self, p: PointRef) -> int:
        return self.coeffs.get(p, 0)

    def support(self) -> list[PointRef]:
        return sorted(self.coeffs, key=self.curve.point_sort_key)

    def degree(self) -> int:
        return sum(self.coeffs.values())

    def is_effective(self) -> bool:
        return all(k >= 0 for k in self.coeffs.values())

    def add(self, other: "Divisor") -> "Divisor":
        if self.curve != other.curve:
            raise TropError("divisors on different curves")
        acc = dict(self.coeffs)
        for p, k in other.coeffs.items():
            acc[p] = acc.get(p, 0) + k
        return Divisor(self.curve, acc)

    def neg(self) -> "Divisor":
        return Divisor(self.curve, {p: -k for p, k in self.coeffs.items()})

    def items(self) -> list[tuple[PointRef, int]]:
        return [(p, self.coeffs[p]) for p in self.support()]

    def __eq__(self, other):
        return (isinstance(other, Divisor) and self.curve == other.curve
                and self.coeffs == other.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{k}*({p})" for p, k in self.items())


def principal_divisor(f: PLFunction) -> Divisor:
    """Sum of outgoing slopes at every point, as a divisor.

    At a point at infinity the single outgoing slope is the slope toward
    infinity times minus one.
    """
    if f.profiles is None:
        raise TropError("the zero function has no principal divisor")
    c = f.curve
    coeffs: dict[PointRef, int] = {}

    def bump(p: PointRef, k: int):
        if k:
            coeffs[p] = coeffs.get(p, 0) + k

    for vid, ends in c.arcs_at.items():
        if not ends:
            continue
        info = c.vertices[vid]
        if info.at_infinity:
            aid, _ = ends[0]
            bump(c.pt_infinity_of(c.arcs[aid].edge), -f.profiles[aid].tail)
            continue
        total = 0
        for aid, sign in ends:
            prof = f.profiles[aid]
            if sign > 0:
                total += prof.slope_right(Fraction(0))
            elif prof.tail is None:
                total += -prof.slope_left(prof.breaks[-1][0])
            else:
                total += -prof.tail
        point = (c.pt_vertex(vid) if not info.hidden
                 else c.pt_on_edge(*c.hidden_info[vid]))
        bump(point, total)
    for aid, prof in f.profiles.items():
        arc = c.arcs[aid]
        interior = prof.breaks[1:-1] if prof.tail is None else prof.breaks[1:]
        for o, _ in interior:
            change = prof.slope_right(o) - prof.slope_left(o)
            bump(c.point_from_arc(aid, o), change)
    return Divisor(c, coeffs)


def is_harmonic_at(f: PLFunction, p: PointRef) -> bool:
    """True when the outgoing slopes of f at p sum to zero."""
    return principal_divisor(f).coeff(_normalize_point(f.curve, p)) == 0


def _normalize_point(c: Curve, p: PointRef) -> PointRef:
    kind, ident, off = c._resolve(p)
    if kind == "vertex":
        if ident in c.hidden_info:
            return PointRef("on_edge", edge=c.hidden_info[ident][0], offset=c.hidden_info[ident][1])
        return c.pt_vertex(ident)
    arc = c.arcs[ident]
    return c.pt_on_edge(arc.edge, arc.start + off)


def rd_contains(d: Divisor, f: PLFunction) -> bool:
    """Membership of f in the module of functions dominated by the divisor d."""
    if f.is_neg_inf:
        return True
    if d.curve != f.curve:
        raise TropError("divisor and function on different curves")
    return d.add(principal_divisor(f)).is_effective()


def module_degree(gens: Sequence[PLFunction]) -> int | None:
    """Degree of the finitely generated module spanned by the generators.

    Minus the sum over common pole points of the minimum coefficient; 0 for
    constants and None (the degree -inf) when every generator is the zero
    function.
    """
    if not gens:
        raise TropError("no generators")
    curve = gens[0].curve
    finite = []
    for g in gens:
        if g.curve != curve:
            raise TropError("generators on different curves")
        if not g.is_neg_inf:
            finite.append(g)
    if not finite:
        return None
    divisors = [principal_divisor(g) for g in finite]
    poles = {p for d in divisors for p, k in d.coeffs.items() if k < 0}
    total = 0
    for p in poles:
        total += min(d.coeff(p) for d in divisors)
    return -total


# -- chip firing ------------------------------------------------------------------


def chip_fire(c: Curve, g: Subgraph, l) -> PLFunction:
    """The function x -> -min(dist(g, x), l), built exactly.

    Components not meeting g get the constant zero.
    """
    if g.curve != c:
        raise TropError("subgraph belongs to a different curve")
    if g.is_empty():
        raise TropError("chip firing needs a nonempty subgraph")
    cap = INF if l == INF else rat(l)
    if cap != INF and cap <= 0:
        raise TropError("chip firing length must be positive")
    dmap = g.distance_map()
    imap = g.interval_map()
    comp_meets: dict[int, bool] = {}
    comps = c.component_sets()
    for i, comp in enumerate(comps):
        comp_meets[i] = any(dmap[v] != INF for v in comp)
    comp_of = {v: i for i, comp in enumerate(comps) for v in comp}

    profiles: dict[str, Profile] = {}
    for aid, arc in c.arcs.items():
        if not comp_meets[comp_of[arc.u]]:
            profiles[aid] = (Profile(((Fraction(0), Fraction(0)),), 0) if arc.length == INF
                             else Profile(((Fraction(0), Fraction(0)), (arc.length, Fraction(0))), None))
            continue
        candidates: list[Profile] = []
        du, dv = dmap[arc.u], dmap[arc.v]
        if arc.length == INF:
            if du != INF:
                candidates.append(Profile(((Fraction(0), du),), 1))
            for lo, hi in imap.get(aid, ()):
                if hi == INF:
                    candidates.append(_normalize([(Fraction(0), lo), (lo, Fraction(0))], 0)
                                      if lo > 0 else Profile(((Fraction(0), Fraction(0)),), 0))
                else:
                    bs = [(Fraction(0), lo), (lo, Fraction(0)), (hi, Fraction(0))]
                    candidates.append(_normalize([b for b in bs if b[0] >= 0], 1))
        else:
            L = arc.length
            if du != INF:
                candidates.append(Profile(((Fraction(0), du), (L, du + L)), None))
            if dv != INF:
                candidates.append(Profile(((Fraction(0), dv + L), (L, dv)), None))
            for lo, hi in imap.get(aid, ()):
                bs = [(Fraction(0), lo), (lo, Fraction(0)), (hi, Fraction(0)), (L, L - hi)]
                bs = [b for b in bs if 0 <= b[0] <= L]
                candidates.append(_normalize(bs, None))
        dist = candidates[0]
        for cand in candidates[1:]:
            dist = _combine2(dist, cand, "min")
        if cap != INF:
            capped = (Profile(((Fraction(0), cap),), 0) if arc.length == INF
                      else Profile(((Fraction(0), cap), (arc.length, cap)), None))
            dist = _combine2(dist, capped, "min")
        profiles[aid] = _negate(dist)
    isolated = {}
    for vid in _isolated_vertices(c):
        d = dmap[vid]
        m = Fraction(0) if d == INF else min(d, cap)
        isolated[vid] = -m if d != INF else Fraction(0)
    return PLFunction(c, profiles, isolated)


# -- restriction and extension -------------------------------------------------------


def edge_profile(f: PLFunction, eid: str) -> Profile:
    """The profile of f on a user edge in edge coordinates."""
    if f.profiles is None:
        raise TropError("the zero function has no profiles")
    pieces = []
    for aid in f.curve.arcs_of_edge[eid]:
        arc = f.curve.arcs[aid]
        pieces.append((arc.start, f.profiles[aid]))
    return _concat(pieces)


def restrict(f: PLFunction, g: Subgraph) -> tuple[PLFunction, ...]:
    """Restrictions of f to the components of g, each on its own curve."""
    whole, chart = restrict_whole(f, g)
    return split_components(whole)


def restrict_whole(f: PLFunction, g: Subgraph) -> tuple[PLFunction, SubChart]:
    """Restriction of f to g as a single function on the subgraph curve."""
    if f.curve != g.curve:
        raise TropError("function and subgraph on different curves")
    sub, chart = g.as_curve()
    if f.profiles is None:
        return PLFunction.neg_inf(sub), chart
    data = {}
    for eid, e in sub.edges.items():
        parent_edge, start = chart.edge_chart[eid]
        whole = edge_profile(f, parent_edge)
        hi = INF if e.is_infinite else start + e.length
        prof = _slice(whole, start, hi)
        data[eid] = ((prof.breaks), prof.tail)
    iso = {}
    for vid in _isolated_vertices(sub):
        iso[vid] = f.value_at(chart.vertex_points[vid])
    return PLFunction.from_edge_data(sub, data, iso), chart


def split_components(f: PLFunction) -> tuple[PLFunction, ...]:
    """One function per component of the owner curve."""
    comps = f.curve.components()
    out = []
    for comp in comps:
        if f.profiles is None:
            out.append(PLFunction.neg_inf(comp))
            continue
        profiles = {aid: f.profiles[aid] for aid in comp.arcs}
        iso = {vid: f.isolated[vid] for vid in _isolated_vertices(comp)}
        out.append(PLFunction(comp, profiles, iso))
    return tuple(out)


def pseudodirect_tuple(c: Curve, parts: Sequence[PLFunction]) -> PLFunction:
    """Assemble per-component functions; -inf parts force a global -inf.

    Mixing -inf and finite parts is rejected: the disconnected semifield
    admits a single joint zero only.
    """
    comps = c.components()
    if len(parts) != len(comps):
        raise TropError(f"need {len(comps)} parts, got {len(parts)}")
    for part, comp in zip(parts, comps):
        if part.curve != comp:
            raise TropError("part does not match the component curve")
    zeros = [p.is_neg_inf for p in parts]
    if all(zeros):
        return PLFunction.neg_inf(c)
    if any(zeros):
        raise TropError("not an element of the pseudodirect product: "
                        "a -inf part must make the whole tuple -inf")
    profiles = {}
    iso = {}
    for part in parts:
        profiles.update(part.profiles)
        iso.update(part.isolated)
    return PLFunction(c, profiles, iso)


def extend(f_prime: PLFunction, g: Subgraph, s: int) -> PLFunction:
    """Extend a function on the subgraph curve to the whole curve.

    Agrees with the input on g, runs to zero with slope +-|s| from each
    boundary point, and is constant zero elsewhere; on rays class-parallel
    to rays of g it keeps the matching slope at infinity.  Restriction of
    the result to g returns the input exactly.
    """
    if f_prime.is_neg_inf:
        raise TropError("cannot extend the zero function")
    s = int(s)
    if s >= 0:
        raise TropError("extension slope must be a negative integer")
    rate = -s
    c = g.curve
    sub, chart = g.as_curve()
    if f_prime.curve != sub:
        raise TropError("function does not live on the subgraph curve")

    ok, witness = f_prime.respects_ray_classes()
    if not ok:
        raise TropError(f"function violates the subgraph ray classes: {witness}")

    # Slope at infinity required on each ray class of the parent curve.
    class_slopes: dict[str, int] = {}
    for sub_eid in sub.ray_classes:
        parent_eid, _ = chart.edge_chart[sub_eid]
        label = c.ray_classes[parent_eid]
        class_slopes[label] = f_prime.profiles[sub_eid].tail

    # Value of f_prime at a parent point of g, through the chart.
    sub_edges_by_parent: dict[str, list[tuple[Fraction, "Fraction | float", str]]] = {}
    for sub_eid, (parent_eid, start) in chart.edge_chart.items():
        e = sub.edges[sub_eid]
        hi = INF if e.is_infinite else start + e.length
        sub_edges_by_parent.setdefault(parent_eid, []).append((start, hi, sub_eid))
    sub_vertex_by_parent: dict[tuple, str] = {}
    for svid, ppoint in chart.vertex_points.items():
        sub_vertex_by_parent[(ppoint.kind, ppoint.vertex, ppoint.edge, ppoint.offset)] = svid

    def g_value(parent_eid: str, off) -> Fraction:
        for lo, hi, sub_eid in sub_edges_by_parent.get(parent_eid, ()):
            if lo <= off and (hi == INF or off <= hi):
                prof = edge_profile(f_prime, sub_eid)
                return prof.value(off - lo)
        p = c.pt_on_edge(parent_eid, off)
        key = (p.kind, p.vertex, p.edge, p.offset)
        svid = sub_vertex_by_parent.get(key)
        if svid is None:
            raise TropError(f"point {p} not in the subgraph")
        return f_prime.value_at(sub.pt_vertex(svid))

    def vertex_value(vid: str) -> Fraction | None:
        if vid not in g.vertices:
            return None
        if vid in c.hidden_info:
            eid, off = c.hidden_info[vid]
            return g_value(eid, off)
        svid = sub_vertex_by_parent.get(("vertex", vid, None, None))
        return f_prime.value_at(sub.pt_vertex(svid))

    imap = g.interval_map()
    profiles: dict[str, Profile] = {}
    for aid, arc in c.arcs.items():
        ivs = imap.get(aid, ())
        pieces: list[tuple[Fraction, Profile]] = []
        # Interval pieces copy f_prime.
        for lo, hi in ivs:
            if lo == hi:
                continue
            sub_prof = _slice_from_sub(f_prime, chart, arc, lo, hi, sub_edges_by_parent)
            pieces.append((lo, sub_prof))
        # Gap pieces descend to zero.
        gaps = _gaps(arc, ivs)
        for (c0, c1) in gaps:
            h0 = _gap_height(c, g, arc, c0, "start", g_value, vertex_value)
            h1 = _gap_height(c, g, arc, c1, "end", g_value, vertex_value) if c1 != INF else Fraction(0)
            prof = _descend_profile(c0, c1, h0, h1, rate)
            if prof is None:
                raise TropError(f"slope {s} too shallow on edge {arc.edge!r}; use a steeper s")
            pieces.append((c0, prof))
        prof = _concat(pieces)
        # Class-parallel tails on rays outside g.
        if arc.length == INF and prof.tail == 0:
            label = c.ray_classes[arc.edge]
            sigma = class_slopes.get(label)
            tail_in_g = any(hi == INF for _, hi in ivs)
            if sigma and not tail_in_g:
                start = prof.breaks[-1][0] + 1
                prof = Profile(prof.breaks + ((start, prof.breaks[-1][1]),), sigma)
        profiles[aid] = prof
    isolated = {}
    for vid in _isolated_vertices(c):
        v = vertex_value(vid)
        isolated[vid] = v if v is not None else Fraction(0)
    return PLFunction(c, profiles, isolated)


def _slice_from_sub(f_prime, chart, arc, lo, hi, sub_edges_by_parent) -> Profile:
    """Profile of f_prime over a parent arc interval, in interval coordinates."""
    e_lo = arc.start + lo
    e_hi = INF if hi == INF else arc.start + hi
    for start, send, sub_eid in sub_edges_by_parent.get(arc.edge, ()):
        if start <= e_lo and (send == INF or (e_hi != INF and e_hi <= send) or (e_hi == INF and send == INF)):
            prof = edge_profile(f_prime, sub_eid)
            return _slice(prof, e_lo - start, INF if e_hi == INF else e_hi - start)
    raise TropError("subgraph interval not covered by a subgraph edge")


def _gaps(arc, ivs):
    gaps = []
    pos = Fraction(0)
    arc_hi = INF if arc.length == INF else arc.length
    for lo, hi in ivs:
        if lo > pos:
            gaps.append((pos, lo))
        if hi == INF:
            return gaps
        pos = max(pos, hi)
    if arc_hi == INF or pos < arc_hi:
        gaps.append((pos, arc_hi))
    return gaps


def _gap_height(c, g, arc, offset, which, g_value, vertex_value) -> Fraction:
    if which == "start" and offset == 0:
        v = vertex_value(arc.u)
        return v if v is not None else Fraction(0)
    if which == "end" and offset == arc.length:
        v = vertex_value(arc.v)
        return v if v is not None else Fraction(0)
    return g_value(arc.edge, arc.start + offset)


def _descend_profile(c0, c1, h0: Fraction, h1: Fraction, rate: int) -> Profile | None:
    """Profile on [c0, c1] running from h0 to 0 to h1 at slope +-rate, based at 0."""
    z0 = Fraction(abs(h0), rate)
    breaks = [(Fraction(0), h0)]
    if c1 == INF:
        if z0 > 0:
            breaks.append((z0, Fraction(0)))
        return _normalize(breaks, 0)
    width = c1 - c0
    z1 = width - Fraction(abs(h1), rate)
    if z0 > z1:
        return None
    if z0 > 0:
        breaks.append((z0, Fraction(0)))
    if z1 < width:
        breaks.append((z1, Fraction(0)))
    breaks.append((width, h1))
    return _normalize(breaks, None)


# -- disconnectedness witness ---------------------------------------------------------


@dataclass(frozen=True)
class WitnessReport:
    """A function plus three levels certifying that a curve is disconnected."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    separated_low: bool      # s differs from s capped below at a3
    separated_high: bool     # s differs from s capped above at a1
    identity_holds: bool     # the two clamp products agree exactly

    @property
    def verified(self) -> bool:
        return self.separated_low and self.separated_high and self.identity_holds


def _clamp_above(s: PLFunction, a) -> PLFunction:
    """min(s, a): the inverse of (s^-1 + a^-1)."""
    return s.inv().add(PLFunction.constant(s.curve, -rat(a))).inv()


def witness_conditions(s: PLFunction, a1, a2, a3) -> WitnessReport:
    """Evaluate the three disconnectedness conditions for s and a1 > a2 > a3."""
    a1, a2, a3 = rat(a1), rat(a2), rat(a3)
    if not (a3 < a2 < a1 and a1 - a2 == a2 - a3):
        raise TropError("levels must be equally spaced and decreasing")
    c = s.curve
    low = s != s.add(PLFunction.constant(c, a3))
    high = s != _clamp_above(s, a1)
    lhs = s.add(PLFunction.constant(c, a1)).mul(_clamp_above(s, a2))
    rhs = (PLFunction.constant(c, a1 - a2)
           .mul(s.add(PLFunction.constant(c, a2)))
           .mul(_clamp_above(s, a3)))
    return WitnessReport(a1, a2, a3, low, high, lhs == rhs)


def disconnection_witness(c: Curve) -> tuple[PLFunction, WitnessReport] | None:
    """A function certifying disconnectedness, or None on a connected curve.

    The witness is 0 on the first component and 4 elsewhere, checked
    against the levels (3, 2, 1); all three conditions hold exactly on any
    disconnected curve.
    """
    comps = c.components()
    if len(comps) <= 1:
        return None
    parts = [PLFunction.constant(comps[0], 0)]
    parts += [PLFunction.constant(comp, 4) for comp in comps[1:]]
    s = pseudodirect_tuple(c, parts)
    report = witness_conditions(s, 3, 2, 1)
    if not report.verified:
        raise TropError("internal error: witness conditions failed on a disconnected curve")
    return s, report
