"""Plane hypersurface construction against the argmax grid oracle."""

from __future__ import annotations

import collections
from fractions import Fraction

import pytest

from tropcurve.complexes import check_balanced
from tropcurve.errors import TropError
from tropcurve.hypersurface import plane_hypersurface
from tropcurve.semifield import TropPoly

from conftest import rng_for

LINE = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (0, 1): 0})
DOUBLE_LINE = TropPoly.of(2, {(0, 0): 0, (2, 0): 0})
CONIC = TropPoly.of(2, {(0, 0): 0, (1, 0): 1, (0, 1): 1, (1, 1): 3, (2, 0): 1, (0, 2): 1})


def grid_matches(F: TropPoly, K, reach=5) -> bool:
    for x in range(-reach, reach + 1):
        for y in range(-reach, reach + 1):
            for dx, dy in ((0, 0), (Fraction(1, 3), Fraction(2, 7))):
                p = (x + dx, y + dy)
                _, arg = F.eval(p)
                if (len(arg) >= 2) != K.contains(p):
                    return False
    return True


def test_line():
    K = plane_hypersurface(LINE)
    assert K.vertices == ((Fraction(0), Fraction(0)),)
    assert sorted(d for _, d, _ in K.rays) == [(-1, 0), (0, -1), (1, 1)]
    assert all(w == 1 for _, _, w in K.rays)
    assert not K.segments


def test_double_line_weight():
    K = plane_hypersurface(DOUBLE_LINE)
    assert len(K.rays) == 2 and all(w == 2 for _, _, w in K.rays)
    assert sorted(d for _, d, _ in K.rays) == [(0, -1), (0, 1)]


def test_middle_term_keeps_weight():
    with_mid = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (2, 0): 0})
    assert plane_hypersurface(with_mid).canonical() == plane_hypersurface(DOUBLE_LINE).canonical()


def test_degenerate_square_vertex():
    F = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 0})
    K = plane_hypersurface(F)
    assert len(K.vertices) == 1 and len(K.rays) == 4 and not K.segments


def test_split_square_gives_segment():
    F = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 1})
    K = plane_hypersurface(F)
    assert len(K.vertices) == 2 and len(K.segments) == 1 and len(K.rays) == 4
    assert sorted(K.vertices) == [(-1, 0), (0, -1)]


def test_conic_shape():
    K = plane_hypersurface(CONIC)
    dirs = collections.Counter(d for _, d, _ in K.rays)
    assert dirs == {(-1, 0): 2, (0, -1): 2, (1, 1): 2}
    assert len(K.vertices) == 4 and len(K.segments) == 3


def test_rejects_monomial_and_zero():
    with pytest.raises(TropError):
        plane_hypersurface(TropPoly.monomial(3, (1, 1)))
    with pytest.raises(TropError):
        plane_hypersurface(TropPoly.zero(2))


def test_window():
    F = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 1})
    plane_hypersurface(F, window=((-5, -5), (5, 5)))
    with pytest.raises(TropError, match="window too small"):
        plane_hypersurface(F, window=((0, 0), (1, 1)))


def test_all_outputs_balanced_and_match_grid():
    rng = rng_for("hypersurface-grid")
    done = 0
    while done < 25:
        terms = {}
        for _ in range(rng.randint(2, 6)):
            terms[(rng.randint(0, 3), rng.randint(0, 3))] = Fraction(
                rng.randint(-6, 6), rng.randint(1, 3))
        F = TropPoly.of(2, terms)
        try:
            K = plane_hypersurface(F)
        except TropError:
            continue
        assert check_balanced(K).balanced
        assert grid_matches(F, K)
        done += 1


def test_disconnected_hypersurface():
    F = TropPoly.of(2, {(0, 0): 0, (1, 0): 0, (2, 0): -1})
    K = plane_hypersurface(F)
    assert len(K.rays) == 4 and not K.is_connected()
    assert grid_matches(F, K)
