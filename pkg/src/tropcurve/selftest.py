"""Runtime invariant suites behind the ``selftest`` subcommand.

Each suite replays one family of exact identities on seeded random
instances and fails loudly on the first violation.  The pytest suite
covers the same ground (and more); this module exists so a deployed
install can re-verify itself from the command line.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .complexes import check_balanced, intersect
from .curve import Curve, canonical_model, disjoint_union
from .errors import TropError
from .hypersurface import plane_hypersurface
from .morphism import Morphism, localize, pullback, validate_morphism
from .plfunction import (PLFunction, chip_fire, disconnection_witness, extend,
                         is_harmonic_at, module_degree, principal_divisor,
                         pseudodirect_tuple, restrict_whole, split_components,
                         witness_conditions)
from .randgen import (random_class_respecting_function, random_curve, random_function,
                      random_point, random_rational, random_subgraph)
from .realization import curve_from_complex, fit_tropical_polynomial, realize
from .semifield import Germ, TropPoly, TropValue, germ_generator_report
from .subgraph import make_subgraph, point_subgraph, whole_subgraph


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    passed: bool
    detail: str = ""


def _trop(rng) -> TropValue:
    if rng.random() < 0.12:
        return TropValue(None)
    return TropValue(random_rational(rng))


def suite_scalar_axioms(rng: random.Random, cases: int) -> int:
    for _ in range(cases):
        a, b, c = _trop(rng), _trop(rng), _trop(rng)
        assert a.add(b) == b.add(a)
        assert a.mul(b) == b.mul(a)
        assert a.add(b).add(c) == a.add(b.add(c))
        assert a.mul(b).mul(c) == a.mul(b.mul(c))
        assert a.mul(b.add(c)) == a.mul(b).add(a.mul(c))
        assert a.add(a) == a
        if not a.is_neg_inf:
            assert a.mul(a.inv()) == TropValue(Fraction(0))
    return cases


def suite_germ_axioms(rng: random.Random, cases: int) -> int:
    done = 0
    for n in range(6):
        for _ in range(cases // 6 + 1):
            def g():
                if rng.random() < 0.1:
                    return Germ.zero(n)
                return Germ(n, random_rational(rng),
                            tuple(rng.randint(-5, 5) for _ in range(n)))
            a, b, c = g(), g(), g()
            assert a.add(b) == b.add(a)
            assert a.mul(b) == b.mul(a)
            assert a.add(b).add(c) == a.add(b.add(c))
            assert a.mul(b).mul(c) == a.mul(b.mul(c))
            assert a.mul(b.add(c)) == a.mul(b).add(a.mul(c))
            assert a.add(a) == a
            if not a.is_neg_inf:
                assert a.mul(a.inv()) == Germ.unit(n)
            done += 1
    return done


def suite_function_axioms(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        for _ in range(5):
            f, g, h = (random_function(c, rng, allow_neg_inf=True) for _ in range(3))
            assert f.add(g) == g.add(f)
            assert f.add(g).add(h) == f.add(g.add(h))
            assert f.mul(g.add(h)) == f.mul(g).add(f.mul(h))
            assert f.add(f) == f
            if not f.is_neg_inf:
                assert f.mul(f.inv()) == PLFunction.constant(c, 0)
            done += 1
    return done


def suite_poly_germ_collapse(rng: random.Random, cases: int) -> int:
    for _ in range(cases):
        n = rng.randint(1, 3)

        def poly():
            terms = {}
            for _ in range(rng.randint(1, 4)):
                exp = tuple(rng.randint(-3, 3) for _ in range(n))
                terms[exp] = random_rational(rng)
            return TropPoly.of(n, terms)

        F, G = poly(), poly()
        assert F.add(G).to_germ() == F.to_germ().add(G.to_germ())
        assert F.mul(G).to_germ() == F.to_germ().mul(G.to_germ())
    return cases


def suite_forget_commutes(rng: random.Random, cases: int) -> int:
    for _ in range(cases):
        n = rng.randint(2, 5)
        g = Germ(n, random_rational(rng), tuple(rng.randint(-4, 4) for _ in range(n)))
        h = Germ(n, random_rational(rng), tuple(rng.randint(-4, 4) for _ in range(n)))
        k = rng.randint(1, n)
        assert g.add(h).forget(k) == g.forget(k).add(h.forget(k))
        assert g.mul(h).forget(k) == g.forget(k).mul(h.forget(k))
        if n >= 2:
            j = rng.randint(1, n)
            a, b = sorted((j, k))
            if a != b:
                assert g.forget(b).forget(a) == g.forget(a).forget(b - 1)
    return cases


def suite_generator_identities(rng: random.Random, cases: int) -> int:
    for n in range(1, 9):
        rep = germ_generator_report(n)
        assert rep.ok, f"generator identities fail at rank {n}"
    return 8


def _random_small_poly(rng: random.Random) -> TropPoly:
    terms = {}
    for _ in range(rng.randint(2, 6)):
        exp = (rng.randint(0, 3), rng.randint(0, 3))
        terms[exp] = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
    if len(terms) < 2:
        terms[(0, 0)] = Fraction(0)
        terms[(1, 0)] = Fraction(0)
    return TropPoly.of(2, terms)


def suite_hypersurface_oracle(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        F = _random_small_poly(rng)
        try:
            K = plane_hypersurface(F)
        except TropError:
            continue  # monomial draw
        assert check_balanced(K).balanced
        for _ in range(20):
            p = (random_rational(rng, -9, 9, 4), random_rational(rng, -9, 9, 4))
            _, arg = F.eval(p)
            assert (len(arg) >= 2) == K.contains(p)
        done += 1
    return done


def suite_metric(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        pts = [random_point(c, rng) for _ in range(3)]
        for p in pts:
            assert c.distance(p, p) == 0
        p, q, r = pts
        assert c.distance(p, q) == c.distance(q, p)
        dpq, dqr, dpr = c.distance(p, q), c.distance(q, r), c.distance(p, r)
        assert dpr <= dpq + dqr
        done += 1
    return done


def suite_canonical_model(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        if not c.is_connected():
            continue
        cm = canonical_model(c)
        assert canonical_model(cm) == cm
        for v in cm.vertices.values():
            if v.hidden or v.id not in c.vertices:
                continue
            for w in cm.vertices.values():
                if w.hidden or w.id not in c.vertices:
                    continue
                assert (cm.distance(cm.pt_vertex(v.id), cm.pt_vertex(w.id))
                        == c.distance(c.pt_vertex(v.id), c.pt_vertex(w.id)))
        done += 1
    return done


def suite_divisors(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        f = random_function(c, rng)
        g = random_function(c, rng)
        assert principal_divisor(f).degree() == 0
        assert principal_divisor(f.mul(g)) == principal_divisor(f).add(principal_divisor(g))
        assert principal_divisor(f.inv()) == principal_divisor(f).neg()
        done += 1
    return done


def suite_chip_fire(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        g = random_subgraph(c, rng)
        l = Fraction(rng.randint(1, 4), rng.randint(1, 2))
        f = chip_fire(c, g, l)
        for _ in range(6):
            p = random_point(c, rng)
            v = f.value_at(p)
            assert -l <= v <= 0
            if g.contains_point(p):
                assert v == 0
        done += 1
    return done


def suite_restrict_extend(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        g = random_subgraph(c, rng)
        f = random_class_respecting_function(c, rng)
        fp, _ = restrict_whole(f, g)
        if fp.is_neg_inf:
            continue
        back = None
        for s in (-8, -64, -1024, -2 ** 20):
            try:
                back = extend(fp, g, s)
                break
            except TropError:
                continue
        assert back is not None, "no descent slope was steep enough"
        again, _ = restrict_whole(back, g)
        assert again == fp
        done += 1
    return done


def suite_module_degree(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        gens = [random_function(c, rng) for _ in range(rng.randint(1, 3))]
        base = module_degree(gens)
        combos = []
        for _ in range(2):
            combo = PLFunction.neg_inf(c)
            for g in gens:
                combo = combo.add(g.scale(random_rational(rng)))
            combos.append(combo)
        assert module_degree(gens + combos) == base
        done += 1
    return done


def suite_localization(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        x = random_point(c, rng)
        loc = localize(c, x)
        f, g = random_function(c, rng), random_function(c, rng)
        assert loc.apply(f.add(g)) == loc.apply(f).add(loc.apply(g))
        assert loc.apply(f.mul(g)) == loc.apply(f).mul(loc.apply(g))
        assert (loc.apply(f).slope_sum() == 0) == is_harmonic_at(f, x)
        done += 1
    return done


def suite_pullback(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        c = random_curve(rng)
        m = Morphism.identity(c)
        if not validate_morphism(m).ok:
            continue
        f, g = random_function(c, rng), random_function(c, rng)
        t = random_rational(rng)
        assert pullback(m, f.add(g)) == pullback(m, f).add(pullback(m, g))
        assert pullback(m, f.mul(g)) == pullback(m, f).mul(pullback(m, g))
        assert pullback(m, PLFunction.constant(c, t)) == PLFunction.constant(c, t)
        done += 1
    return done


def suite_complex_round_trip(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        F = _random_small_poly(rng)
        try:
            K = plane_hypersurface(F)
        except TropError:
            continue
        if not K.is_connected():
            continue
        c, fs, r = curve_from_complex(K)
        assert r.image.canonical() == K.canonical()
        for f in fs:
            assert all(c.is_at_infinity(p) for p in principal_divisor(f).support())
        done += 1
    return done


def suite_fit(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        F = _random_small_poly(rng)
        try:
            K = plane_hypersurface(F)
        except TropError:
            continue
        if not K.is_connected():
            continue
        G = fit_tropical_polynomial(K)
        assert plane_hypersurface(G).canonical() == K.canonical()
        done += 1
    return done


def suite_intersections(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        F1, F2 = _random_small_poly(rng), _random_small_poly(rng)
        try:
            K1 = plane_hypersurface(F1)
            K2 = plane_hypersurface(F2).translate(
                (random_rational(rng, -9, 9, 5), random_rational(rng, -9, 9, 5)))
            pts = intersect(K1, K2)
        except TropError:
            continue
        swapped = intersect(K2, K1)
        assert [(p.point, p.multiplicity) for p in pts] == \
               [(p.point, p.multiplicity) for p in swapped]
        shift = (random_rational(rng), random_rational(rng))
        moved = intersect(K1.translate(shift), K2.translate(shift))
        assert sum(p.multiplicity for p in pts) == sum(p.multiplicity for p in moved)
        done += 1
    return done


def suite_disconnection(rng: random.Random, cases: int) -> int:
    done = 0
    while done < cases:
        parts = [random_curve(rng, share_ray_classes=False) for _ in range(2)]
        u = disjoint_union(parts)
        result = disconnection_witness(u)
        assert result is not None and result[1].verified
        single = random_curve(rng)
        if single.is_connected():
            assert disconnection_witness(single) is None
        done += 1
    return done


def suite_formats(rng: random.Random, cases: int) -> int:
    from . import io as tio

    done = 0
    while done < cases:
        c = random_curve(rng)
        assert tio.curve_from_json(tio.curve_to_json(c)) == c
        f = random_function(c, rng, allow_neg_inf=True)
        assert tio.function_from_json(c, tio.function_to_json(f)) == f
        d = principal_divisor(f) if not f.is_neg_inf else None
        if d is not None:
            assert tio.divisor_from_json(c, tio.divisor_to_json(d)) == d
        F = _random_small_poly(rng)
        assert tio.poly_from_text(tio.poly_to_text(F), nvars=2) == F
        try:
            K = plane_hypersurface(F)
            assert tio.complex_from_json(tio.complex_to_json(K)) == K
        except TropError:
            pass
        done += 1
    return done


SUITES: list[tuple[str, Callable]] = [
    ("scalar semifield axioms", suite_scalar_axioms),
    ("germ semifield axioms (ranks 0-5)", suite_germ_axioms),
    ("function semifield axioms", suite_function_axioms),
    ("polynomial-to-germ collapse is a homomorphism", suite_poly_germ_collapse),
    ("forgetting slope components commutes", suite_forget_commutes),
    ("small-rank germ generator identities", suite_generator_identities),
    ("hypersurface matches the argmax grid oracle", suite_hypersurface_oracle),
    ("distance is a metric", suite_metric),
    ("canonical model is idempotent and isometric", suite_canonical_model),
    ("principal divisors have degree zero and add", suite_divisors),
    ("chip firing stays within its depth", suite_chip_fire),
    ("restriction inverts extension", suite_restrict_extend),
    ("module degree ignores regeneration", suite_module_degree),
    ("localization is a homomorphism detecting harmonicity", suite_localization),
    ("pullback is a homomorphism", suite_pullback),
    ("balanced complexes round-trip through curves", suite_complex_round_trip),
    ("fitted polynomials reproduce their complexes", suite_fit),
    ("intersections are symmetric and shift-invariant", suite_intersections),
    ("disconnectedness witnesses verify", suite_disconnection),
    ("file formats round-trip", suite_formats),
]

QUICK_CASES = 6
FULL_CASES = 30


def run_all(seed: int = 0, parallel: bool = False, quick: bool = False) -> list[SuiteResult]:
    cases = QUICK_CASES if quick else FULL_CASES

    def run_one(item):
        name, fn = item
        rng = random.Random(f"{seed}:{name}")
        try:
            n = fn(rng, cases)
            return SuiteResult(name, n, True)
        except AssertionError as exc:
            return SuiteResult(name, 0, False, str(exc) or "assertion failed")
        except TropError as exc:
            return SuiteResult(name, 0, False, f"error: {exc}")

    if parallel:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(run_one, SUITES))
    else:
        results = [run_one(item) for item in SUITES]
    return sorted(results, key=lambda r: r.name)
