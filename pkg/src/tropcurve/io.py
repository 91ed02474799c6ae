"""File formats: curves, functions, divisors, complexes, morphisms, plots.

All interchange is JSON with rationals as strings like ``"3/4"`` (never
floats); polynomials use a line-oriented text form.  Parsers reject
float-typed numbers outright.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping

from .complexes import PolyComplex1D
from .curve import INF, Curve, PointRef, length_str
from .errors import FileFormatError, TropError
from .glue import Embedding
from .morphism import Morphism
from .plfunction import Divisor, PLFunction, Profile, edge_profile, _isolated_vertices
from .semifield import TropPoly, rat
from .subgraph import Subgraph, make_subgraph


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(exc.msg, line=exc.lineno, column=exc.colno) from exc


def _require(cond: bool, message: str):
    if not cond:
        raise FileFormatError(message)


def _rational(x, what: str) -> Fraction:
    if isinstance(x, float):
        raise FileFormatError(f"{what} must be a rational string, not a float: {x!r}")
    try:
        return rat(x)
    except TropError as exc:
        raise FileFormatError(f"bad {what}: {x!r}") from exc


# -- curves ---------------------------------------------------------------------


def curve_to_json(c: Curve) -> str:
    return json.dumps(c.description(), indent=2) + "\n"


def curve_from_json(text: str) -> Curve:
    data = _load_json(text)
    _require(isinstance(data, dict), "curve file must be a JSON object")
    vertices = []
    for v in data.get("vertices", []):
        _require(isinstance(v, dict) and "id" in v, "vertex entries need an id")
        vertices.append((str(v["id"]), bool(v.get("at_infinity", False))))
    edges = []
    for e in data.get("edges", []):
        _require(isinstance(e, dict) and {"id", "u", "v", "length"} <= set(e),
                 "edge entries need id, u, v, length")
        length = e["length"]
        if isinstance(length, float):
            raise FileFormatError(f"edge {e['id']!r}: float lengths are rejected")
        if isinstance(length, str) and length.strip() == "inf":
            parsed = INF
        else:
            parsed = _rational(length, "edge length")  # NaN-like strings fail here
        edges.append((str(e["id"]), str(e["u"]), str(e["v"]), parsed))
    ray_classes = {str(k): str(v) for k, v in data.get("ray_classes", {}).items()}
    try:
        return Curve.build(vertices=vertices, edges=edges, ray_classes=ray_classes)
    except TropError as exc:
        raise FileFormatError(f"invalid curve: {exc}") from exc


# -- points and subgraphs ----------------------------------------------------------


def parse_point(c: Curve, spec) -> PointRef:
    """A vertex id, ``edge@offset``, or a JSON-ish {"vertex"|"edge","offset"}."""
    if isinstance(spec, dict):
        if "vertex" in spec:
            return c.pt_vertex(str(spec["vertex"]))
        return c.pt_on_edge(str(spec["edge"]), _rational(spec["offset"], "offset"))
    s = str(spec)
    if "@" in s:
        eid, _, off = s.partition("@")
        return c.pt_on_edge(eid, _rational(off, "offset"))
    return c.pt_vertex(s)


def point_to_json(p: PointRef):
    if p.kind == "vertex":
        return {"vertex": p.vertex}
    return {"edge": p.edge, "offset": str(p.offset)}


def subgraph_from_json(c: Curve, text: str) -> Subgraph:
    data = _load_json(text)
    _require(isinstance(data, dict), "subgraph file must be a JSON object")
    intervals = []
    for entry in data.get("intervals", []):
        _require(isinstance(entry, (list, tuple)) and len(entry) == 3,
                 "interval entries are [edge, lo, hi]")
        eid, lo, hi = entry
        hi_val = INF if hi == "inf" else _rational(hi, "interval end")
        intervals.append((str(eid), _rational(lo, "interval start"), hi_val))
    try:
        return make_subgraph(c, vertices=[str(v) for v in data.get("vertices", [])],
                             edges=[str(e) for e in data.get("edges", [])],
                             intervals=intervals)
    except TropError as exc:
        raise FileFormatError(f"invalid subgraph: {exc}") from exc


# -- functions -----------------------------------------------------------------------


def function_to_json(f: PLFunction) -> str:
    if f.is_neg_inf:
        return json.dumps("-inf") + "\n"
    data: dict = {}
    for eid in sorted(f.curve.edges):
        e = f.curve.edges[eid]
        prof = edge_profile(f, eid)
        entry: dict = {"breakpoints": [[str(o), str(v)] for o, v in prof.breaks]}
        if e.is_infinite:
            entry["slope_at_infinity"] = prof.tail
        data[eid] = entry
    iso = {vid: str(v) for vid, v in sorted(f.isolated.items())}
    if iso:
        data["values_at_vertices"] = iso
    return json.dumps(data, indent=2) + "\n"


def function_from_json(c: Curve, text: str) -> PLFunction:
    data = _load_json(text)
    if data == "-inf":
        return PLFunction.neg_inf(c)
    _require(isinstance(data, dict), "function file must be '-inf' or an object")
    iso = data.pop("values_at_vertices", {})
    edge_data = {}
    for eid, entry in data.items():
        _require(isinstance(entry, dict) and "breakpoints" in entry,
                 f"edge {eid!r} needs a breakpoints list")
        breaks = [(_rational(o, "offset"), _rational(v, "value"))
                  for o, v in entry["breakpoints"]]
        tail = entry.get("slope_at_infinity")
        if tail is not None:
            _require(isinstance(tail, int), "slope_at_infinity must be an integer")
        edge_data[str(eid)] = (breaks, tail)
    try:
        return PLFunction.from_edge_data(c, edge_data,
                                         {str(k): _rational(v, "vertex value")
                                          for k, v in iso.items()})
    except TropError as exc:
        raise FileFormatError(f"invalid function: {exc}") from exc


# -- divisors -------------------------------------------------------------------------


def divisor_to_json(d: Divisor) -> str:
    return json.dumps([[point_to_json(p), k] for p, k in d.items()], indent=2) + "\n"


def divisor_from_json(c: Curve, text: str) -> Divisor:
    data = _load_json(text)
    _require(isinstance(data, list), "divisor file must be a list of [point, int]")
    coeffs = []
    for entry in data:
        _require(isinstance(entry, (list, tuple)) and len(entry) == 2,
                 "divisor entries are [point, int]")
        p, k = entry
        _require(isinstance(k, int), "divisor coefficients must be integers")
        coeffs.append((parse_point(c, p), k))
    try:
        return Divisor(c, coeffs)
    except TropError as exc:
        raise FileFormatError(f"invalid divisor: {exc}") from exc


# -- complexes ------------------------------------------------------------------------


def complex_to_json(k: PolyComplex1D) -> str:
    data = {
        "dim": k.dim,
        "vertices": [[str(x) for x in v] for v in k.vertices],
        "segments": [[i, j, w] for i, j, w in k.segments],
        "rays": [[i, list(d), w] for i, d, w in k.rays],
    }
    return json.dumps(data, indent=2) + "\n"


def complex_from_json(text: str) -> PolyComplex1D:
    data = _load_json(text)
    _require(isinstance(data, dict) and "dim" in data, "complex file needs a dim")
    dim = data["dim"]
    _require(isinstance(dim, int) and dim >= 1, "dim must be a positive integer")
    vertices = [[_rational(x, "coordinate") for x in v] for v in data.get("vertices", [])]
    try:
        return PolyComplex1D.of(dim, vertices,
                                data.get("segments", []), data.get("rays", []))
    except (TropError, ValueError) as exc:
        raise FileFormatError(f"invalid complex: {exc}") from exc


# -- polynomials ------------------------------------------------------------------------


def poly_to_text(F: TropPoly) -> str:
    return F.format()


def poly_from_text(text: str, nvars: int | None = None) -> TropPoly:
    return TropPoly.parse(text, nvars=nvars)


# -- morphisms ---------------------------------------------------------------------------


def morphism_from_json(source: Curve, target: Curve, text: str) -> Morphism:
    data = _load_json(text)
    _require(isinstance(data, dict), "morphism file must be a JSON object")
    vmap = {str(k): str(v) for k, v in data.get("vertex_map", {}).items()}
    emap = {}
    for eid, entry in data.get("edge_map", {}).items():
        _require(isinstance(entry, dict) and ({"edge"} <= set(entry) or {"vertex"} <= set(entry)),
                 f"edge_map[{eid!r}] must be {{'edge': id}} or {{'vertex': id}}")
        if "edge" in entry:
            emap[str(eid)] = ("edge", str(entry["edge"]))
        else:
            emap[str(eid)] = ("vertex", str(entry["vertex"]))
    degrees = {}
    for eid, d in data.get("degrees", {}).items():
        _require(isinstance(d, int) and d >= 0, f"degree of {eid!r} must be a nonnegative integer")
        degrees[str(eid)] = d
    return Morphism(source, target, vmap, emap, degrees)


def morphism_to_json(m: Morphism) -> str:
    data = {
        "vertex_map": dict(sorted(m.vertex_map.items())),
        "edge_map": {eid: {kind: name} for eid, (kind, name) in sorted(m.edge_map.items())},
        "degrees": dict(sorted(m.degrees.items())),
    }
    return json.dumps(data, indent=2) + "\n"


def embedding_from_json(shape: Curve, target: Curve, text: str) -> Embedding:
    data = _load_json(text)
    _require(isinstance(data, dict), "embedding file must be a JSON object")
    vmap = {str(k): parse_point(target, v) for k, v in data.get("vertex_map", {}).items()}
    emap = {}
    for eid, entry in data.get("edge_map", {}).items():
        _require(isinstance(entry, (list, tuple)) and len(entry) == 3,
                 f"edge_map[{eid!r}] must be [target edge, start, orientation]")
        tgt, start, orient = entry
        _require(orient in (1, -1), "orientation must be 1 or -1")
        emap[str(eid)] = (str(tgt), _rational(start, "start offset"), int(orient))
    return Embedding(shape, vmap, emap)


# -- plots ------------------------------------------------------------------------------

SVG_PRECISION = 6  # decimal places; fixed so identical inputs give identical bytes


def _decimal(x: Fraction) -> str:
    scale = 10 ** SVG_PRECISION
    n = x * scale
    rounded = (n.numerator * 2 + n.denominator) // (2 * n.denominator)
    sign = "-" if rounded < 0 else ""
    rounded = abs(rounded)
    whole, frac = divmod(rounded, scale)
    return f"{sign}{whole}.{frac:0{SVG_PRECISION}d}"


def complex_to_svg(k: PolyComplex1D, width: int = 640) -> str:
    """Deterministic SVG for a plane complex.

    Rays are truncated at a length derived from the vertex bounding box;
    the viewport is the bounding box of everything drawn plus a 10% margin.
    All coordinates are serialized with a fixed decimal precision.
    """
    if k.dim != 2:
        raise TropError("SVG plots need a plane complex")
    if not k.vertices:
        raise TropError("empty complex")
    xs = [v[0] for v in k.vertices]
    ys = [v[1] for v in k.vertices]
    span = max(max(xs) - min(xs), max(ys) - min(ys), Fraction(1))
    reach = span * 2
    strokes = []
    labels = []
    points = list(k.vertices)

    def draw(p, q, w):
        points.extend([p, q])
        strokes.append((p, q, w))
        mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
        labels.append((mid, str(w)))

    for i, j, w in k.segments:
        draw(k.vertices[i], k.vertices[j], w)
    for i, d, w in k.rays:
        base = k.vertices[i]
        scale = reach / max(abs(d[0]), abs(d[1]))
        tip = (base[0] + d[0] * scale, base[1] + d[1] * scale)
        draw(base, tip, w)

    x0 = min(p[0] for p in points)
    x1 = max(p[0] for p in points)
    y0 = min(p[1] for p in points)
    y1 = max(p[1] for p in points)
    margin = max(x1 - x0, y1 - y0, Fraction(1)) / 10
    x0, x1 = x0 - margin, x1 + margin
    y0, y1 = y0 - margin, y1 + margin

    def sx(x):
        return _decimal(x)

    def sy(y):
        return _decimal(y0 + y1 - y)  # flip so the y axis points up

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'viewBox="{_decimal(x0)} {_decimal(y0)} {_decimal(x1 - x0)} {_decimal(y1 - y0)}">',
        f'<g stroke="black" stroke-width="{_decimal((x1 - x0) / 200)}" fill="none">',
    ]
    for p, q, w in strokes:
        out.append(f'<line x1="{sx(p[0])}" y1="{sy(p[1])}" '
                   f'x2="{sx(q[0])}" y2="{sy(q[1])}"/>')
    out.append("</g>")
    out.append(f'<g font-size="{_decimal((x1 - x0) / 25)}" fill="crimson" '
               f'font-family="monospace">')
    for (mx, my), text in labels:
        out.append(f'<text x="{sx(mx)}" y="{sy(my)}">{text}</text>')
    out.append("</g>")
    r = (x1 - x0) / 150
    out.append('<g fill="black">')
    for v in k.vertices:
        out.append(f'<circle cx="{sx(v[0])}" cy="{sy(v[1])}" r="{_decimal(r)}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def complex_to_csv(k: PolyComplex1D) -> str:
    """CSV rows of vertices, segments, and rays with exact rational entries."""
    lines = ["kind,index,data,weight"]
    for idx, v in enumerate(k.vertices):
        lines.append(f"vertex,{idx},{';'.join(str(x) for x in v)},")
    for i, j, w in k.segments:
        lines.append(f"segment,,{i};{j},{w}")
    for i, d, w in k.rays:
        lines.append(f"ray,,{i};{':'.join(str(x) for x in d)},{w}")
    return "\n".join(lines) + "\n"
