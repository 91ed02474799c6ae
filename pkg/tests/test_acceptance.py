"""End-to-end acceptance run: one test and one printed line per criterion.

Everything is exact rational arithmetic, so every comparison below is
equality with zero tolerance; the only stated bounds are case counts and
wall-clock budgets.  Run with ``pytest tests/test_acceptance.py -v -s``
to see the per-criterion lines.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

import pytest

from tropcurve.complexes import PolyComplex1D, check_balanced, intersect
from tropcurve.curve import INF, Curve, disjoint_union
from tropcurve.errors import NonTransversalError, TropError
from tropcurve.glue import Embedding, glue, glue_function
from tropcurve.hypersurface import plane_hypersurface
from tropcurve.morphism import (Morphism, localize, pullback, weight_check,
                                weight_from_generators)
from tropcurve.plfunction import (PLFunction, chip_fire, disconnection_witness, extend,
                                  is_harmonic_at, module_degree, principal_divisor,
                                  pseudodirect_tuple, restrict_whole, witness_conditions)
from tropcurve.randgen import (random_class_respecting_function, random_curve,
                               random_function, random_point, random_rational,
                               random_subgraph)
from tropcurve.realization import curve_from_complex, fit_tropical_polynomial, realize
from tropcurve.semifield import Germ, TropPoly, TropValue, germ_generator_report

LINE_POLY = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (0, 1): 0})
DOUBLE_LINE_POLY = TropPoly.of(2, {(0, 0): 0, (2, 0): 0})
CONIC_POLY = TropPoly.of(2, {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 3, (2, 0): 1, (0, 2): 1})


def report(number: int, text: str):
    print(f"criterion {number:2d} pass: {text}")


def the_line() -> Curve:
    return Curve.doubly_infinite_line()


def line_fn(c: Curve, k: int) -> PLFunction:
    return PLFunction.from_edge_data(c, {"right": ([(0, 0)], k), "left": ([(0, 0)], -k)})


def test_criterion_01_semifield_axiom_suites():
    start = time.monotonic()
    rng = random.Random("acceptance-1")

    # Scalars.
    def scalar():
        return TropValue(None) if rng.random() < 0.1 else TropValue(random_rational(rng))

    for _ in range(1000):
        a, b, c = scalar(), scalar(), scalar()
        assert a.add(b) == b.add(a)
        assert a.mul(b) == b.mul(a)
        assert a.add(b).add(c) == a.add(b.add(c))
        assert a.mul(b).mul(c) == a.mul(b.mul(c))
        assert a.mul(b.add(c)) == a.mul(b).add(a.mul(c))
        assert a.add(a) == a
        if not a.is_neg_inf:
            assert a.mul(a.inv()) == TropValue(Fraction(0))

    # Slope germs of every rank up to five.
    for case in range(1000):
        n = case % 6

        def germ():
            if rng.random() < 0.1:
                return Germ.zero(n)
            return Germ(n, random_rational(rng), tuple(rng.randint(-6, 6) for _ in range(n)))

        a, b, c = germ(), germ(), germ()
        assert a.add(b) == b.add(a)
        assert a.mul(b) == b.mul(a)
        assert a.add(b).add(c) == a.add(b.add(c))
        assert a.mul(b).mul(c) == a.mul(b.mul(c))
        assert a.mul(b.add(c)) == a.mul(b).add(a.mul(c))
        assert a.add(a) == a
        if not a.is_neg_inf:
            assert a.mul(a.inv()) == Germ.unit(n)

    # Piecewise linear functions, over a pool of light random functions.
    pools = []
    while len(pools) < 6:
        c = random_curve(rng)
        pool = [PLFunction.neg_inf(c), PLFunction.constant(c, random_rational(rng))]
        tries = 0
        while len(pool) < 9 and tries < 60:
            tries += 1
            f = random_function(c, rng)
            if sum(len(p.breaks) for p in f.profiles.values()) <= 10:
                pool.append(f)
        if len(pool) >= 6:
            pools.append((c, pool))
    for k in range(1000):
        c, pool = pools[k % len(pools)]
        f, g, h = (rng.choice(pool) for _ in range(3))
        assert f.add(g) == g.add(f)
        assert f.add(g).add(h) == f.add(g.add(h))
        assert f.mul(g.add(h)) == f.mul(g).add(f.mul(h))
        assert f.add(f) == f
        if not f.is_neg_inf:
            assert f.mul(f.inv()) == PLFunction.constant(c, 0)
    elapsed = time.monotonic() - start
    assert elapsed < 10, f"axiom suites took {elapsed:.1f}s"
    report(1, f"scalar, germ, and function semifields: 1000 cases each in {elapsed:.1f}s")


def test_criterion_02_generator_identities():
    for n in range(1, 9):
        rep = germ_generator_report(n)
        assert rep.ok, (n, rep)
    v = Germ.of(0, (1, -1))
    assert v.add(Germ.unit(2)) == Germ.of(0, (1, 0))
    assert v.inv().add(Germ.unit(2)) == Germ.of(0, (0, 1))
    report(2, "generator identities verified exactly for ranks 1..8")


def test_criterion_03_source_regressions():
    start = time.monotonic()
    line = the_line()
    # Principal divisor of the doubled coordinate.
    d = principal_divisor(line_fn(line, 2))
    assert d.coeff(line.pt_infinity_of("left")) == 2
    assert d.coeff(line.pt_infinity_of("right")) == -2
    assert len(d.coeffs) == 2
    # Module degrees one and two.
    assert module_degree([line_fn(line, 1)]) == 1
    assert module_degree([line_fn(line, 2)]) == 2
    # Weights one and two on the line, by both routes.
    ident = Morphism.identity(line)
    dbl = Morphism(line, line,
                   {"O": "O", "left.inf": "left.inf", "right.inf": "right.inf"},
                   {"left": ("edge", "left"), "right": ("edge", "right")},
                   {"left": 2, "right": 2})
    w1, w2 = weight_check(ident), weight_check(dbl)
    assert w1.is_weight and set(dict(w1.edge_weights).values()) == {1}
    assert w2.is_weight and set(dict(w2.edge_weights).values()) == {2}
    assert weight_from_generators([pullback(ident, line_fn(line, 1))], "right") == 1
    assert weight_from_generators([pullback(dbl, line_fn(line, 1))], "right") == 2
    # The shared-class pair (f, 0) lies in the pseudodirect product but not
    # in the parallel-ray function semifield.
    u = disjoint_union([line, the_line()], shared_classes={
        "minus": [(0, "left"), (1, "left")], "plus": [(0, "right"), (1, "right")]})
    comps = u.components()
    f = PLFunction.from_edge_data(comps[0], {"0:right": ([(0, 0)], 1), "0:left": ([(0, 0)], 0)})
    pair = pseudodirect_tuple(u, [f, PLFunction.constant(comps[1], 0)])
    ok, witness = pair.respects_ray_classes()
    assert not ok and witness[0] == "plus"
    elapsed = time.monotonic() - start
    assert elapsed < 1, f"regressions took {elapsed:.2f}s"
    report(3, f"divisor, degree, weight, and shared-class regressions in {elapsed:.2f}s")


def test_criterion_04_module_degree_invariance():
    rng = random.Random("acceptance-4")
    done = 0
    while done < 200:
        c = random_curve(rng)
        gens = [random_function(c, rng) for _ in range(rng.randint(1, 3))]
        base = module_degree(gens)
        extra = []
        for _ in range(rng.randint(1, 2)):
            combo = PLFunction.neg_inf(c)
            for g in gens:
                if rng.random() < 0.85:
                    combo = combo.add(g.scale(random_rational(rng)))
            if combo.is_neg_inf:
                combo = gens[0]
            extra.append(combo)
        assert module_degree(gens + extra) == base
        done += 1
    report(4, "module degree unchanged by 200 random regenerations")


def test_criterion_05_localization_and_harmonicity():
    rng = random.Random("acceptance-5")
    done = 0
    while done < 500:
        c = random_curve(rng)
        for _ in range(5):
            x = random_point(c, rng)
            loc = localize(c, x)
            f, g = random_function(c, rng), random_function(c, rng)
            assert loc.apply(f.add(g)) == loc.apply(f).add(loc.apply(g))
            assert loc.apply(f.mul(g)) == loc.apply(f).mul(loc.apply(g))
            assert (loc.apply(f).slope_sum() == 0) == is_harmonic_at(f, x)
            done += 1
    report(5, "localization homomorphism and slope-sum harmonicity on 500 triples")


def _complex_library(rng: random.Random, minimum: int = 20) -> list[PolyComplex1D]:
    out = [plane_hypersurface(LINE_POLY), plane_hypersurface(DOUBLE_LINE_POLY),
           plane_hypersurface(CONIC_POLY)]
    while len(out) < minimum:
        terms = {}
        for _ in range(rng.randint(2, 6)):
            terms[(rng.randint(0, 3), rng.randint(0, 3))] = Fraction(
                rng.randint(-6, 6), rng.randint(1, 3))
        try:
            K = plane_hypersurface(TropPoly.of(2, terms))
        except TropError:
            continue
        if K.is_connected():
            out.append(K)
    return out


def test_criterion_06_balanced_round_trip():
    start = time.monotonic()
    rng = random.Random("acceptance-6")
    library = _complex_library(rng, minimum=20)
    assert len(library) >= 20
    for K in library:
        c, fs, r = curve_from_complex(K)
        for f in fs:
            assert all(c.is_at_infinity(p) for p in principal_divisor(f).support())
        assert r.image.canonical() == K.canonical()
    elapsed = time.monotonic() - start
    assert elapsed < 30, f"round trips took {elapsed:.1f}s"
    report(6, f"{len(library)} balanced complexes re-realized exactly in {elapsed:.1f}s")


def test_criterion_07_polynomial_fitting():
    rng = random.Random("acceptance-7")
    library = _complex_library(rng, minimum=12)
    for K in library:
        F = fit_tropical_polynomial(K)
        assert plane_hypersurface(F).canonical() == K.canonical()
    assert fit_tropical_polynomial(plane_hypersurface(LINE_POLY)).degree() == 1
    assert fit_tropical_polynomial(plane_hypersurface(DOUBLE_LINE_POLY)).degree() == 2
    assert fit_tropical_polynomial(plane_hypersurface(CONIC_POLY)).degree() == 2
    report(7, f"fits verified on {len(library)} complexes; degrees 1, 2, 2 recovered")


def test_criterion_08_intersections_and_degree_bound():
    line0 = plane_hypersurface(LINE_POLY)
    pts = intersect(line0, line0.translate((1, 2)))
    assert [(p.point, p.multiplicity) for p in pts] == [((1, 1), 1)]
    vertical2 = plane_hypersurface(DOUBLE_LINE_POLY)
    horizontal = plane_hypersurface(TropPoly.of(2, {(0, 0): 0, (0, 1): 0}))
    pts2 = intersect(vertical2, horizontal)
    assert [(p.point, p.multiplicity) for p in pts2] == [((0, 0), 2)]

    rng = random.Random("acceptance-8")
    degrees: dict[int, int] = {}
    done = 0
    while done < 50:
        lib = _complex_library(rng, minimum=4)
        K1 = rng.choice(lib)
        K2 = rng.choice(lib).translate((random_rational(rng, -30, 30, 7),
                                        random_rational(rng, -30, 30, 11)))
        try:
            points = intersect(K1, K2)
        except (NonTransversalError, TropError):
            continue
        total = sum(p.multiplicity for p in points)
        d1 = fit_tropical_polynomial(K1).degree()
        d2 = fit_tropical_polynomial(K2).degree()
        assert total <= d1 * d2, (total, d1, d2)
        done += 1
    report(8, "50 random transversal pairs kept within the degree-product bound")


def test_criterion_09_disconnection_witnesses():
    rng = random.Random("acceptance-9")
    for _ in range(40):
        parts = [random_curve(rng, share_ray_classes=False)
                 for _ in range(rng.randint(2, 3))]
        u = disjoint_union(parts)
        result = disconnection_witness(u)
        assert result is not None
        s, rep = result
        assert rep.separated_low and rep.separated_high and rep.identity_holds
    # Negative control: candidates of the same clamp shape never verify on
    # connected curves.
    done = 0
    while done < 100:
        c = random_curve(rng)
        if not c.is_connected():
            continue
        g = random_subgraph(c, rng)
        candidates = [
            chip_fire(c, g, 4).inv(),
            chip_fire(c, g, 4).inv().scale(random_rational(rng, 0, 2, 2)),
            chip_fire(c, g, Fraction(rng.randint(1, 4))).scale(rng.randint(0, 4)),
        ]
        for cand in candidates:
            assert not witness_conditions(cand, 3, 2, 1).verified
        done += 1
    report(9, "witnesses verified on disconnected curves; no connected impostors in 100 runs")


def test_criterion_10_restriction_extension_and_gluing():
    rng = random.Random("acceptance-10")
    done = 0
    while done < 200:
        c = random_curve(rng)
        g = random_subgraph(c, rng)
        f = random_class_respecting_function(c, rng)
        fp, _ = restrict_whole(f, g)
        if fp.is_neg_inf:
            continue
        back = None
        for s in (-8, -64, -1024, -2 ** 18):
            try:
                back = extend(fp, g, s)
                break
            except TropError:
                continue
        assert back is not None
        again, _ = restrict_whole(back, g)
        assert again == fp
        done += 1

    # Gluing accepts exactly the pairs that agree on the shared subgraph.
    accepted = rejected = 0
    for k in range(60):
        left = Curve.segment(2, "A", "B", "e")
        right = Curve.segment(2, "C", "D", "f")
        shape = Curve.segment(1, "U", "V", "s")
        e1 = Embedding(shape, {"U": left.pt_on_edge("e", 1), "V": left.pt_vertex("B")},
                       {"s": ("e", Fraction(1), 1)})
        e2 = Embedding(shape, {"U": right.pt_vertex("C"),
                               "V": right.pt_on_edge("f", 1)},
                       {"s": ("f", Fraction(0), 1)})
        res = glue(left, right, e1, e2)
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)
        h1 = PLFunction.from_edge_data(left, {"e": ([(0, 0), (1, a), (2, a + b)], None)})
        match = rng.random() < 0.5
        if match:
            h2 = PLFunction.from_edge_data(
                right, {"f": ([(0, a), (1, a + b), (2, a + b)], None)})
        else:
            h2 = PLFunction.from_edge_data(
                right, {"f": ([(0, a), (1, a + b + 1), (2, a + b + 1)], None)})
        try:
            welded = glue_function(h1, h2, res)
            assert match, "disagreeing pair was welded"
            p = res.map1.point(left.pt_vertex("B"))
            assert welded.value_at(p) == a + b
            accepted += 1
        except TropError:
            assert not match, "agreeing pair was rejected"
            rejected += 1
    assert accepted and rejected
    report(10, f"200 restriction identities; gluing accepted {accepted} and "
               f"rejected {rejected} pairs correctly")
