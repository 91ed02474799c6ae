"""Morphisms, pullbacks, weights, and localization germs."""

from __future__ import annotations

from fractions import Fraction

import pytest

from tropcurve.curve import INF, Curve
from tropcurve.errors import TropError
from tropcurve.morphism import (Morphism, compose, germ_bump, localization_surjectivity,
                                localize, pullback, validate_morphism, weight_check,
                                weight_from_generators, weighted_local_image)
from tropcurve.plfunction import PLFunction, chip_fire, is_harmonic_at
from tropcurve.randgen import random_curve, random_function, random_point
from tropcurve.semifield import Germ
from tropcurve.subgraph import point_subgraph

from conftest import identity_fn, rng_for, scaled_fn


def doubling(line: Curve) -> Morphism:
    return Morphism(line, line,
                    {"O": "O", "left.inf": "left.inf", "right.inf": "right.inf"},
                    {"left": ("edge", "left"), "right": ("edge", "right")},
                    {"left": 2, "right": 2})


class TestValidate:
    def test_identity(self, tripod):
        m = Morphism.identity(tripod)
        rep = validate_morphism(m)
        assert rep.ok and not rep.violations
        assert all(d == 1 for d in m.degrees.values())

    def test_doubling_ok(self, line):
        assert validate_morphism(doubling(line)).ok

    def test_metric_violation(self):
        s1, s3 = Curve.segment(1), Curve.segment(3, "C", "D", "f")
        bad = Morphism(s1, s3, {"A": "C", "B": "D"}, {"e": ("edge", "f")}, {"e": 2})
        rep = validate_morphism(bad)
        assert not rep.ok and any("3" in v for v in rep.violations)

    def test_collapse_consistency(self, segment3):
        pt_curve = Curve.build(vertices=["P"])
        m = Morphism(segment3, pt_curve, {"A": "P", "B": "P"}, {"e": ("vertex", "P")}, {"e": 0})
        assert validate_morphism(m).ok
        bad = Morphism(segment3, pt_curve, {"A": "P", "B": "P"}, {"e": ("vertex", "P")}, {"e": 1})
        assert not validate_morphism(bad).ok

    def test_ray_class_law(self, line):
        # Source carries one class over both rays; images land in distinct
        # target classes, breaking the parallel-ray law.
        src = Curve.build(vertices=["O"],
                          edges=[("left", "O", None, INF), ("right", "O", None, INF)],
                          ray_classes={"left": "k", "right": "k"})
        m = Morphism(src, line,
                     {"O": "O", "left.inf": "left.inf", "right.inf": "right.inf"},
                     {"left": ("edge", "left"), "right": ("edge", "right")},
                     {"left": 1, "right": 1})
        rep = validate_morphism(m)
        assert not rep.ok and any("target classes" in v for v in rep.violations)


class TestPullback:
    def test_doubling_pulls_identity_to_double(self, line):
        f2 = pullback(doubling(line), identity_fn(line))
        assert f2 == scaled_fn(line, 2)

    def test_identity_pullback(self, tripod):
        rng = rng_for("pullback-id")
        f = random_function(tripod, rng)
        assert pullback(Morphism.identity(tripod), f) == f

    def test_collapse_gives_constant(self, segment3):
        pt_curve = Curve.build(vertices=["P"])
        m = Morphism(segment3, pt_curve, {"A": "P", "B": "P"}, {"e": ("vertex", "P")}, {"e": 0})
        f = PLFunction.from_edge_data(pt_curve, {}, isolated={"P": Fraction(5)})
        assert pullback(m, f) == PLFunction.constant(segment3, 5)

    def test_homomorphism_random(self, tripod):
        rng = rng_for("pullback-hom")
        m = Morphism.identity(tripod)
        for _ in range(40):
            f, g = random_function(tripod, rng), random_function(tripod, rng)
            assert pullback(m, f.add(g)) == pullback(m, f).add(pullback(m, g))
            assert pullback(m, f.mul(g)) == pullback(m, f).mul(pullback(m, g))

    def test_composition_multiplies_degrees(self, line):
        quad = compose(doubling(line), doubling(line))
        assert validate_morphism(quad).ok
        assert quad.degrees == {"left": 4, "right": 4}
        f4 = pullback(quad, identity_fn(line))
        assert f4 == scaled_fn(line, 4)


class TestWeights:
    def test_doubling_is_weight_two(self, line):
        wc = weight_check(doubling(line))
        assert wc.is_weight and dict(wc.edge_weights) == {"left": 2, "right": 2}

    def test_identity_weight_one(self, tripod):
        wc = weight_check(Morphism.identity(tripod))
        assert wc.is_weight and all(w == 1 for _, w in wc.edge_weights)

    def test_folding_not_a_weight(self):
        path = Curve.build(vertices=["A", "B", "C"],
                           edges=[("e1", "A", "B", 1), ("e2", "B", "C", 1)])
        seg = Curve.segment(1, "U", "V", "f")
        fold = Morphism(path, seg, {"A": "U", "B": "V", "C": "U"},
                        {"e1": ("edge", "f"), "e2": ("edge", "f")}, {"e1": 1, "e2": 1})
        assert validate_morphism(fold).ok
        wc = weight_check(fold)
        assert not wc.is_weight

    def test_weight_from_generators(self, line):
        assert weight_from_generators([scaled_fn(line, 2)], "right") == 2
        assert weight_from_generators([identity_fn(line)], "right") == 1
        assert weight_from_generators([scaled_fn(line, 2), scaled_fn(line, 3)], "right") == 1

    def test_level_edge_rejected(self, line):
        with pytest.raises(TropError, match="level edge"):
            weight_from_generators([PLFunction.constant(line, 1)], "right")

    def test_bent_generator_rejected(self, line):
        bent = PLFunction.from_edge_data(line, {"right": ([(0, 0), (1, 1)], 0),
                                                "left": ([(0, 0)], 0)})
        with pytest.raises(TropError, match="subdivide"):
            weight_from_generators([bent], "right")

    def test_example_weights_both_routes(self, line):
        # The doubling weight is two, and the slope gcd of its pulled-back
        # generator recovers the same number.
        wc = weight_check(doubling(line))
        f2 = pullback(doubling(line), identity_fn(line))
        assert dict(wc.edge_weights)["right"] == weight_from_generators([f2], "right") == 2


class TestLocalize:
    def test_star_chip_fire_germ(self, tripod):
        loc = localize(tripod, tripod.pt_vertex("O"))
        cf = chip_fire(tripod, point_subgraph(tripod, tripod.pt_vertex("O")), Fraction(1, 2))
        assert loc.apply(cf) == Germ.of(0, (-1, -1, -1))

    def test_constant_germ(self, tripod):
        loc = localize(tripod, tripod.pt_vertex("O"))
        assert loc.apply(PLFunction.constant(tripod, 7)) == Germ.of(7, (0, 0, 0))
        assert loc.apply(PLFunction.neg_inf(tripod)).is_neg_inf

    def test_explicit_direction_order(self, tripod):
        dirs = tripod.directions_at(tripod.pt_vertex("O"))
        loc = localize(tripod, tripod.pt_vertex("O"), tuple(reversed(dirs)))
        f = PLFunction.from_edge_data(tripod, {
            "a": ([(0, 0), (1, 1)], None), "b": ([(0, 0), (1, 2)], None),
            "c": ([(0, 0), (1, 3)], None)})
        assert loc.apply(f).slopes == (3, 2, 1)

    def test_infinity_rejected(self, line):
        with pytest.raises(TropError):
            localize(line, line.pt_infinity_of("right"))

    def test_bad_permutation(self, tripod):
        with pytest.raises(TropError):
            localize(tripod, tripod.pt_vertex("O"), ("a:+", "b:+"))

    def test_bump_matches_requested_germ(self, tripod, line):
        loc = localize(tripod, tripod.pt_vertex("O"))
        germ = Germ.of(Fraction(5, 3), (2, -3, 7))
        assert loc.apply(germ_bump(loc, germ)) == germ
        loc2 = localize(line, line.pt_on_edge("right", 2))
        germ2 = Germ.of(1, (3, -4))
        assert loc2.apply(germ_bump(loc2, germ2)) == germ2

    def test_surjectivity_reports(self, tripod, segment3):
        rep = localization_surjectivity(tripod, tripod.pt_vertex("O"), samples=20)
        assert rep.all_matched and rep.over_rank_rejected and rep.rank == 3
        rep1 = localization_surjectivity(segment3, segment3.pt_vertex("A"), samples=10)
        assert rep1.all_matched and rep1.rank == 1

    def test_homomorphism_and_harmonicity_random(self):
        rng = rng_for("localize-hom")
        done = 0
        while done < 60:
            c = random_curve(rng)
            x = random_point(c, rng)
            loc = localize(c, x)
            f, g = random_function(c, rng), random_function(c, rng)
            assert loc.apply(f.add(g)) == loc.apply(f).add(loc.apply(g))
            assert loc.apply(f.mul(g)) == loc.apply(f).mul(loc.apply(g))
            assert (loc.apply(f).slope_sum() == 0) == is_harmonic_at(f, x)
            done += 1


class TestWeightedLocalImage:
    def test_doubling_even_lattice(self, line):
        rep = weighted_local_image(doubling(line), line.pt_on_edge("right", 2), samples=10)
        assert rep.verified and all(w == 2 for _, w in rep.direction_weights)

    def test_identity_full_lattice(self, tripod):
        rep = weighted_local_image(Morphism.identity(tripod), tripod.pt_vertex("O"), samples=6)
        assert rep.verified and all(w == 1 for _, w in rep.direction_weights)

    def test_mixed_weights(self):
        # Two-edge path stretched by different degrees on each side.
        src = Curve.build(vertices=["A", "B", "C"],
                          edges=[("e1", "A", "B", 3), ("e2", "B", "C", 1)])
        tgt = Curve.build(vertices=["X", "Y", "Z"],
                          edges=[("f1", "X", "Y", 3), ("f2", "Y", "Z", 3)])
        m = Morphism(src, tgt, {"A": "X", "B": "Y", "C": "Z"},
                     {"e1": ("edge", "f1"), "e2": ("edge", "f2")}, {"e1": 1, "e2": 3})
        assert validate_morphism(m).ok
        rep = weighted_local_image(m, tgt.pt_vertex("Y"), samples=10)
        assert rep.verified and sorted(w for _, w in rep.direction_weights) == [1, 3]

    def test_requires_weight(self, line):
        path = Curve.build(vertices=["A", "B", "C"],
                           edges=[("e1", "A", "B", 1), ("e2", "B", "C", 1)])
        seg = Curve.segment(1, "U", "V", "f")
        fold = Morphism(path, seg, {"A": "U", "B": "V", "C": "U"},
                        {"e1": ("edge", "f"), "e2": ("edge", "f")}, {"e1": 1, "e2": 1})
        with pytest.raises(TropError, match="not a weight"):
            weighted_local_image(fold, seg.pt_vertex("U"))
