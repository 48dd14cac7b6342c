from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paretopeel.geometry import Cone2, cone_contains
from paretopeel.sorting import depth_at, depth_dp, longest_chain, nds_depth, q_transform, q_transform_norm

coord = st.integers(0, 12)


def random_cone(rng) -> Cone2:
    while True:
        a, b = np.sort(rng.uniform(0, 2 * np.pi, 2))
        if 0.05 < b - a < np.pi - 0.05:
            return Cone2(w=np.array([np.cos(a), np.sin(a)]), v=np.array([np.cos(b), np.sin(b)]))


def test_chain_and_antichain() -> None:
    i = np.arange(1, 8, dtype=float)
    assert longest_chain(np.column_stack([i, i])) == 7
    assert longest_chain(np.column_stack([i, -i])) == 1
    assert nds_depth(np.column_stack([i[:5], i[:5]])).depth.tolist() == [1, 2, 3, 4, 5]
    assert nds_depth(np.column_stack([i, -i])).depth.tolist() == [1] * 7
    assert longest_chain(np.zeros((0, 2))) == 0


def test_ties_never_chain() -> None:
    A = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    assert nds_depth(A).depth.tolist() == [1, 1, 1, 2]


def test_depth_matches_quadratic_dp(rng) -> None:
    for n in (12, 50, 200):
        A = rng.uniform(size=(n, 2))
        d = nds_depth(A)
        assert np.array_equal(d.depth, depth_dp(A))
        assert d.max_depth == longest_chain(A)


@given(st.lists(st.tuples(coord, coord), min_size=1, max_size=40, unique=True))
def test_depth_dp_on_tied_grids(pts) -> None:
    A = np.array(pts, dtype=float)
    assert np.array_equal(nds_depth(A).depth, depth_dp(A))
    assert nds_depth(A).max_depth == longest_chain(A)


def test_depth_at_corner_is_longest_chain(rng) -> None:
    A = rng.uniform(size=(500, 2))
    assert depth_at(A, [[1.0, 1.0]])[0] == longest_chain(A)
    assert depth_at(A, [[0.0, 0.5]])[0] == 0
    # at a sample point the depth counts only strictly smaller points
    d = nds_depth(A).depth
    assert np.array_equal(depth_at(A, A), d - 1)


def test_q_transform_examples() -> None:
    quad = Cone2(w=[1.0, 0.0], v=[0.0, 1.0])
    A = np.array([[0.3, -2.0], [1.0, 4.0]])
    assert np.allclose(q_transform(A, quad), A)
    lower = Cone2(w=np.array([-1.0, -1.0]) / math.sqrt(2), v=np.array([1.0, -1.0]) / math.sqrt(2))
    assert np.allclose(q_transform([[0.0, -1.0]], lower), [[math.sqrt(2) / 2, math.sqrt(2) / 2]], atol=1e-15)


def test_q_order_isomorphism(rng) -> None:
    for _ in range(100):
        c = random_cone(rng)
        x, y = rng.normal(size=(2, 10, 2))
        lx, ly = q_transform(x, c), q_transform(y, c)
        clear = np.min(np.abs(ly - lx), axis=1) > 1e-9
        inside = cone_contains(c, y - x, strict=True)
        assert np.array_equal(inside[clear], np.all(ly > lx, axis=1)[clear])


def test_operator_norm(rng) -> None:
    for _ in range(100):
        c = random_cone(rng)
        assert q_transform_norm(c) == pytest.approx((1 - abs(c.w @ c.v)) ** -0.5, abs=1e-9)
