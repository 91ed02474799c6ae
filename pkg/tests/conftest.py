"""Shared builders for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from tropcurve.curve import INF, Curve
from tropcurve.plfunction import PLFunction


@pytest.fixture
def segment3() -> Curve:
    return Curve.segment(3)


@pytest.fixture
def line() -> Curve:
    """The doubly infinite line: finite vertex O, rays 'left' and 'right'."""
    return Curve.doubly_infinite_line()


@pytest.fixture
def tripod() -> Curve:
    return Curve.build(vertices=["O"],
                       edges=[("a", "O", "A", 1), ("b", "O", "B", 1), ("c", "O", "C", 1)])


def identity_fn(line: Curve) -> PLFunction:
    """x on the doubly infinite line: slope 1 rightward, -1 leftward."""
    return PLFunction.from_edge_data(line, {"right": ([(0, 0)], 1), "left": ([(0, 0)], -1)})


def scaled_fn(line: Curve, k: int) -> PLFunction:
    return PLFunction.from_edge_data(line, {"right": ([(0, 0)], k), "left": ([(0, 0)], -k)})


def rng_for(name: str) -> random.Random:
    return random.Random(f"tropcurve-tests:{name}")
