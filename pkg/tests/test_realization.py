"""Realizations, balancing, complex ingestion, fitting, intersections."""

from __future__ import annotations

import collections
from fractions import Fraction

import pytest

from tropcurve.complexes import PolyComplex1D, check_balanced, intersect
from tropcurve.curve import INF, Curve
from tropcurve.errors import NonTransversalError, TropError
from tropcurve.hypersurface import plane_hypersurface
from tropcurve.plfunction import PLFunction, chip_fire, principal_divisor
from tropcurve.realization import (bezout_check, check_realization, curve_from_complex,
                                   fit_tropical_polynomial, harmonic_balance_report, realize)
from tropcurve.semifield import TropPoly
from tropcurve.subgraph import point_subgraph

from conftest import identity_fn, rng_for, scaled_fn

LINE_POLY = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (0, 1): 0})
DOUBLE_LINE_POLY = TropPoly.of(2, {(0, 0): 0, (2, 0): 0})
CONIC_POLY = TropPoly.of(2, {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 3, (2, 0): 1, (0, 2): 1})


def complex_library():
    """Balanced connected complexes used across the round-trip tests."""
    rng = rng_for("library")
    out = [plane_hypersurface(LINE_POLY), plane_hypersurface(DOUBLE_LINE_POLY),
           plane_hypersurface(CONIC_POLY)]
    while len(out) < 22:
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


class TestRealize:
    def test_identity_line(self, line):
        r = realize(line, [identity_fn(line)])
        assert r.image.dim == 1
        assert len(r.image.vertices) == 1 and len(r.image.rays) == 2
        rep = check_realization(r)
        assert rep.injective and rep.local_isometry
        assert rep.parallel_respected and rep.condition5_free

    def test_double_speed_not_isometric(self, line):
        rep = check_realization(realize(line, [scaled_fn(line, 2)]))
        assert rep.injective and not rep.local_isometry

    def test_pair_realization(self, line):
        r = realize(line, [identity_fn(line), scaled_fn(line, 2)])
        assert sorted(d for _, d, _ in r.image.rays) == [(-1, -2), (1, 2)]

    def test_infinite_tripod_harmonic_pair(self):
        # Center with three rays; coordinates harmonic at the only finite
        # point realize the Y-shape of the tropical line.
        c = Curve.build(vertices=["O"],
                        edges=[("a", "O", None, INF), ("b", "O", None, INF),
                               ("c", "O", None, INF)],
                        ray_classes={"a": "p", "b": "q", "c": "r"})
        fs = [PLFunction.from_edge_data(c, {"a": ([(0, 0)], 1), "b": ([(0, 0)], -1),
                                            "c": ([(0, 0)], 0)}),
              PLFunction.from_edge_data(c, {"a": ([(0, 0)], 1), "b": ([(0, 0)], 0),
                                            "c": ([(0, 0)], -1)})]
        r = realize(c, fs)
        assert sorted(d for _, d, _ in r.image.rays) == [(-1, 0), (0, -1), (1, 1)]
        hb = harmonic_balance_report(r)
        assert hb.all_harmonic and hb.balance.balanced

    def test_same_class_distinct_directions_flagged(self):
        c = Curve.build(vertices=["O"],
                        edges=[("p", "O", None, INF), ("q", "O", None, INF)],
                        ray_classes={"p": "k", "q": "k"})
        fs = [PLFunction.from_edge_data(c, {"p": ([(0, 0)], 1), "q": ([(0, 0)], 1)}),
              PLFunction.from_edge_data(c, {"p": ([(0, 0)], 1), "q": ([(0, 0)], 1)})]
        # both functions respect the class; image rays share direction (1,1)
        r = realize(c, fs)
        rep = check_realization(r)
        assert rep.parallel_respected
        assert not rep.condition5_free or len(r.image.rays) == 1

    def test_rejects_class_breaking_coordinates(self):
        c = Curve.build(vertices=["O"],
                        edges=[("p", "O", None, INF), ("q", "O", None, INF)],
                        ray_classes={"p": "k", "q": "k"})
        bad = PLFunction.from_edge_data(c, {"p": ([(0, 0)], 1), "q": ([(0, 0)], 2)})
        with pytest.raises(TropError, match="ray class"):
            realize(c, [bad])

    def test_non_harmonic_flagged(self, tripod):
        cf = chip_fire(tripod, point_subgraph(tripod, tripod.pt_vertex("O")), INF)
        r = realize(tripod, [cf])
        hb = harmonic_balance_report(r)
        assert not hb.all_harmonic
        assert any(points for _, points in hb.defects)


class TestBalance:
    def test_line_balanced(self):
        assert check_balanced(plane_hypersurface(LINE_POLY)).balanced

    def test_single_ray_defect(self):
        K = PolyComplex1D.of(2, [(0, 0)], [], [[0, (1, 1), 1]])
        rep = check_balanced(K)
        assert not rep.balanced
        assert dict(rep.defects)[0] == (1, 1)

    def test_opposite_rays_cancel(self):
        K = PolyComplex1D.of(2, [(0, 0)], [], [[0, (0, 1), 2], [0, (0, -1), 2]])
        assert check_balanced(K).balanced


class TestIngest:
    def test_line_round_trip(self):
        K = plane_hypersurface(LINE_POLY)
        c, fs, r = curve_from_complex(K)
        assert len(c.edges) == 3 and all(e.is_infinite for e in c.edges.values())
        assert len(set(c.ray_classes.values())) == 3
        assert r.image.canonical() == K.canonical()

    def test_weight_two_line_halves_lengths(self):
        K = plane_hypersurface(DOUBLE_LINE_POLY)
        c, fs, r = curve_from_complex(K)
        assert {abs(fs[1].slope_at_infinity(e)) for e in c.ray_classes} == {2}

    def test_parallel_rays_one_class(self):
        K = PolyComplex1D.of(2, [(0, 0), (1, 0)], [(0, 1, 1)],
                             [(0, (0, 1), 1), (1, (0, 1), 1), (0, (-1, -1), 1), (1, (1, -1), 1)])
        assert check_balanced(K).balanced
        c, fs, r = curve_from_complex(K)
        labels = list(c.ray_classes.values())
        assert sum(1 for l in labels if l.startswith("dir:0,1")) == 2
        counts = collections.Counter(labels)
        assert counts["dir:0,1*1"] == 2

    def test_rejects_unbalanced(self):
        K = PolyComplex1D.of(2, [(0, 0)], [], [[0, (1, 1), 1]])
        with pytest.raises(TropError, match="balanced"):
            curve_from_complex(K)

    def test_rejects_disconnected(self):
        K = plane_hypersurface(TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (2, 0): -1}))
        with pytest.raises(TropError, match="connected"):
            curve_from_complex(K)

    def test_library_round_trips(self):
        for K in complex_library():
            c, fs, r = curve_from_complex(K)
            assert r.image.canonical() == K.canonical()
            for f in fs:
                assert all(c.is_at_infinity(p) for p in principal_divisor(f).support())


class TestFit:
    def test_line(self):
        K = plane_hypersurface(LINE_POLY)
        F = fit_tropical_polynomial(K)
        assert F.degree() == 1
        assert plane_hypersurface(F).canonical() == K.canonical()

    def test_weight_two_line(self):
        K = plane_hypersurface(DOUBLE_LINE_POLY)
        F = fit_tropical_polynomial(K)
        assert F.degree() == 2

    def test_conic(self):
        K = plane_hypersurface(CONIC_POLY)
        F = fit_tropical_polynomial(K)
        assert F.degree() == 2
        assert plane_hypersurface(F).canonical() == K.canonical()

    def test_library(self):
        for K in complex_library():
            F = fit_tropical_polynomial(K)
            assert plane_hypersurface(F).canonical() == K.canonical()

    def test_newton_polygons_agree_up_to_translation(self):
        # Fitting a translate changes coefficients, not the exponent set.
        K = plane_hypersurface(CONIC_POLY)
        F1 = fit_tropical_polynomial(K)
        F2 = fit_tropical_polynomial(K.translate((Fraction(7, 3), -1)))
        assert {e for e, _ in F1.terms} == {e for e, _ in F2.terms}

    def test_rejects_unbalanced(self):
        K = PolyComplex1D.of(2, [(0, 0)], [], [[0, (1, 1), 1]])
        with pytest.raises(TropError):
            fit_tropical_polynomial(K)


class TestIntersect:
    def test_two_lines(self):
        K1 = plane_hypersurface(LINE_POLY)
        K2 = K1.translate((1, 2))
        pts = intersect(K1, K2)
        assert [(p.point, p.multiplicity) for p in pts] == [((1, 1), 1)]

    def test_identical_overlap(self):
        K1 = plane_hypersurface(LINE_POLY)
        with pytest.raises(NonTransversalError) as err:
            intersect(K1, K1)
        assert err.value.condition == 4

    def test_weight_two_multiplicity(self):
        Kv = plane_hypersurface(DOUBLE_LINE_POLY)
        Kh = plane_hypersurface(TropPoly.of(2, {(0, 0): 0, (0, 1): 0}))
        pts = intersect(Kv, Kh)
        assert [(p.point, p.multiplicity) for p in pts] == [((0, 0), 2)]

    def test_vertex_hit_rejected(self):
        Kc = plane_hypersurface(CONIC_POLY)
        Khit = plane_hypersurface(LINE_POLY).translate(Kc.vertices[0])
        with pytest.raises(NonTransversalError) as err:
            intersect(Khit, Kc)
        assert err.value.condition == 2

    def test_symmetry_and_translation_invariance(self):
        rng = rng_for("intersect-sym")
        done = 0
        while done < 15:
            t1 = {(rng.randint(0, 2), rng.randint(0, 2)): Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                  for _ in range(rng.randint(2, 5))}
            t2 = {(rng.randint(0, 2), rng.randint(0, 2)): Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                  for _ in range(rng.randint(2, 5))}
            try:
                K1 = plane_hypersurface(TropPoly.of(2, t1))
                K2 = plane_hypersurface(TropPoly.of(2, t2)).translate(
                    (Fraction(rng.randint(-20, 20), 7), Fraction(rng.randint(-20, 20), 11)))
                pts = intersect(K1, K2)
            except (TropError, NonTransversalError):
                continue
            swapped = intersect(K2, K1)
            assert [(p.point, p.multiplicity) for p in pts] == \
                   [(p.point, p.multiplicity) for p in swapped]
            shift = (Fraction(rng.randint(-5, 5), 3), Fraction(rng.randint(-5, 5), 2))
            moved = intersect(K1.translate(shift), K2.translate(shift))
            assert sum(p.multiplicity for p in pts) == sum(p.multiplicity for p in moved)
            done += 1


class TestBezout:
    def test_lines(self):
        K1 = plane_hypersurface(LINE_POLY)
        rep = bezout_check(K1, K1.translate((1, 2)))
        assert rep.total == 1 and rep.bound == 1 and rep.ok

    def test_line_vs_weight_two(self):
        Kv = plane_hypersurface(DOUBLE_LINE_POLY)
        Kh = plane_hypersurface(TropPoly.of(2, {(0, 0): 0, (0, 1): 0}))
        rep = bezout_check(Kv, Kh)
        assert rep.total == 2 and rep.bound == 2 and rep.ok

    def test_conics(self):
        Kc = plane_hypersurface(CONIC_POLY)
        rep = bezout_check(Kc, Kc.translate((Fraction(7, 2), Fraction(1, 3))))
        assert rep.bound == 4 and rep.ok


class TestPerturbedHarmonicFamilies:
    def test_scaled_coordinates_stay_balanced(self):
        # Tropical scalar multiples keep harmonicity and injectivity, so the
        # translated images must stay balanced.
        rng = rng_for("perturbed")
        for K in complex_library()[:10]:
            c, fs, r = curve_from_complex(K)
            scaled = [f.scale(Fraction(rng.randint(-6, 6), rng.randint(1, 4))) for f in fs]
            r2 = realize(c, scaled)
            hb = harmonic_balance_report(r2)
            assert hb.all_harmonic and hb.balance.balanced
