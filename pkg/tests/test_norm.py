from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from paretopeel.geometry import cone_contains, cross, perp
from paretopeel.norm import (
    build_norm,
    degenerate_direction,
    dual_eval,
    hamiltonian,
    hamiltonian_bound,
    kgon_functionals,
    kgon_hamiltonian,
    norm_eval,
    norm_from_spec,
    preset,
)

from conftest import random_polyhedral_functionals

NAMES = ["l1", "linf", "mixed-example", "counterexample", "kgon:6", "kgon:12"]


def test_l1_facets() -> None:
    m = preset("l1")
    assert len(m.facets) == 4 and m.polyhedral
    corners = {tuple(np.round(f.p, 12)) for f in m.facets}
    assert corners == {(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)}


def test_mixed_example_facets_and_arcs() -> None:
    m = preset("mixed-example")
    assert {tuple(np.round(f.p, 12)) for f in m.facets} == {(1.0, -1.0), (-1.0, 1.0)}
    assert len(m.arcs) == 2
    assert np.allclose(m.arcs, [(0, math.pi / 2), (math.pi, 3 * math.pi / 2)])


def test_euclidean_has_one_full_arc() -> None:
    m = preset("euclidean")
    assert m.strictly_convex and m.arcs == ((0.0, 2 * math.pi),)


def test_unbounded_ball_rejected() -> None:
    with pytest.raises(ValueError):
        build_norm([[1.0, 0.0]])
    with pytest.raises(ValueError):
        build_norm([[1.0, 1.0], [2.0, 2.0]])


def test_duplicate_functionals_are_merged() -> None:
    m = build_norm([[1, 0], [0, 1], [-1, 0], [1, 0]])
    assert len(m.functionals) == 2 and len(m.facets) == 4


def test_norm_values() -> None:
    assert norm_eval(preset("l1"), [3, -4]) == pytest.approx(7.0)
    assert norm_eval(preset("mixed-example"), [1, -1]) == pytest.approx(2.0)


def test_hamiltonian_values() -> None:
    assert hamiltonian(preset("l1"), [1, 2]) == pytest.approx(2.0)
    assert hamiltonian(preset("mixed-example"), [1, -1]) == 0.0
    assert hamiltonian(preset("mixed-example"), [1, 2]) == pytest.approx(2.0)
    assert hamiltonian(preset("linf"), [-1, 0]) == pytest.approx(0.5)
    assert hamiltonian(preset("counterexample"), [0, math.sqrt(2)]) == pytest.approx(1.0)


def test_degenerate_direction() -> None:
    assert degenerate_direction(preset("l1"), [1, 0])
    assert not degenerate_direction(preset("l1"), [1, 1])
    assert not degenerate_direction(preset("mixed-example"), [1, 1])
    assert degenerate_direction(preset("l1"), [0, 0])


@pytest.mark.parametrize("name", NAMES)
def test_facet_invariants(name) -> None:
    m = preset(name)
    for f in m.facets:
        assert f.opening > 0
        assert f.v_star @ f.v == pytest.approx(1, abs=1e-10)
        assert f.w_star @ f.w == pytest.approx(1, abs=1e-10)
        assert abs(f.v_star @ f.w) < 1e-10 and abs(f.w_star @ f.v) < 1e-10
        for e in (f.e0, f.e1):
            assert e @ f.p == pytest.approx(1, abs=1e-10)
            assert norm_eval(m, e) == pytest.approx(1, abs=1e-10)
        assert dual_eval(m, f.p) == pytest.approx(1, abs=1e-10)
    # closed under negation
    ps = np.array([f.p for f in m.facets])
    for f in m.facets:
        j = np.argmin(np.linalg.norm(ps + f.p, axis=1))
        g = m.facets[j]
        assert np.allclose(g.p, -f.p) and np.allclose(g.v, -f.v) and np.allclose(g.w, -f.w)


@pytest.mark.parametrize("name", NAMES + ["euclidean"])
def test_facets_and_arcs_cover_the_sphere(name) -> None:
    m = preset(name)
    covered = sum(math.atan2(cross(f.e0, f.e1), f.e0 @ f.e1) for f in m.facets)
    covered += sum(hi - lo for lo, hi in m.arcs)
    assert covered == pytest.approx(2 * math.pi, abs=1e-9)


@pytest.mark.parametrize("name", NAMES + ["euclidean"])
def test_dual_norm_against_sampled_maximum(name, rng) -> None:
    m = preset(name)
    th = np.linspace(0, 2 * math.pi, 20001)
    u = np.column_stack([np.cos(th), np.sin(th)])
    sphere = u / norm_eval(m, u)[:, None]
    xi = rng.normal(size=(50, 2))
    brute = np.max(xi @ sphere.T, axis=1)
    exact = dual_eval(m, xi)
    assert np.all(exact >= brute - 1e-12)
    assert np.allclose(exact, brute, rtol=1e-3)  # first-order sampling error near corners
    # Hoelder on random pairs
    x = rng.normal(size=(10_000, 2))
    xi = rng.normal(size=(10_000, 2))
    assert np.all(dual_eval(m, xi) * norm_eval(m, x) >= np.sum(xi * x, axis=1) - 1e-12)


def duality_gap(m, xi) -> float:
    """Largest deviation in the two dual-basis identities over all facets."""
    worst = 0.0
    xp = perp(xi)
    for f in m.facets:
        o = f.opening
        worst = max(worst,
                    np.max(np.abs(xp @ f.v_star - (xi @ f.w) / o)),
                    np.max(np.abs(xp @ f.w_star + (xi @ f.v) / o)))
    return worst


def bound_excess(m, rng, count=1000) -> float:
    """max of facet term minus the angle bound over random xi in the polar of the flat cone."""
    worst = -math.inf
    for f in m.facets:
        # polar cone {xi : <xi, v> <= 0, <xi, w> <= 0}
        a, b = rng.uniform(0, 1, size=(2, count, 1))
        xi = -(a * f.v_star + b * f.w_star) * rng.uniform(0.1, 10, size=(count, 1))
        term = f.term(xi)
        bound = hamiltonian_bound(f) * np.sum(xi * xi, axis=1)
        worst = max(worst, float(np.max(term - bound)))
    return worst


@pytest.mark.parametrize("name", NAMES)
def test_duality_identities(name, rng) -> None:
    assert duality_gap(preset(name), rng.normal(size=(10_000, 2))) <= 1e-10


@pytest.mark.parametrize("name", NAMES)
def test_angle_bound(name, rng) -> None:
    assert bound_excess(preset(name), rng) <= 1e-9


def test_random_norms_duality_and_bound(rng) -> None:
    for _ in range(30):
        m = build_norm(random_polyhedral_functionals(rng), rng.choice([0.0, 0.6]))
        assert duality_gap(m, rng.normal(size=(1000, 2))) <= 1e-10
        assert bound_excess(m, rng, 200) <= 1e-9


@pytest.mark.parametrize("name", NAMES)
def test_dual_basis_formula(name, rng) -> None:
    # on xi with perp(xi) in the facet cone, the term equals -|v x w| <perp, v*><perp, w*>
    m = preset(name)
    for f in m.facets:
        a, b = rng.uniform(0.1, 2, size=(2, 500))
        xp = a[:, None] * f.v - b[:, None] * f.w
        xi = -perp(xp)  # perp(xi) = xp
        alt = -f.opening * (xp @ f.v_star) * (xp @ f.w_star)
        assert np.allclose(f.term(xi), alt, atol=1e-10)
        assert np.allclose(hamiltonian(m, xi), alt, atol=1e-10)


@pytest.mark.parametrize("name", NAMES)
def test_facet_cone_sign_correspondence(name, rng) -> None:
    # -xi in the open polar cone of the flat cone  <=>  perp(xi) in the open facet cone
    m = preset(name)
    xi = rng.normal(size=(2000, 2))
    for f in m.facets:
        dual = (-xi @ f.v < -1e-9) & (-xi @ f.w < -1e-9)
        inside = cone_contains(f.facet_cone, perp(xi), strict=True)
        assert np.array_equal(dual, inside)


@pytest.mark.parametrize("k", [4, 6, 8, 12] + list(range(14, 33, 2)))
def test_kgon_closed_form(k, rng) -> None:
    m = preset(f"kgon:{k}")
    assert len(m.facets) == k
    xi = rng.normal(size=(2000, 2))
    assert np.max(np.abs(hamiltonian(m, xi) - kgon_hamiltonian(k, xi))) <= 1e-9


def test_kgon_rejects_odd() -> None:
    with pytest.raises(ValueError):
        kgon_functionals(5)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.01, 50), st.sampled_from(NAMES))
def test_homogeneity(a, b, t, name) -> None:
    m = preset(name)
    xi = np.array([a, b])
    h = hamiltonian(m, xi)
    assert h >= 0
    assert hamiltonian(m, t * xi) == pytest.approx(t * t * h, rel=1e-12, abs=1e-12)
    assert norm_eval(m, t * xi) == pytest.approx(t * norm_eval(m, xi), rel=1e-12, abs=1e-12)
    assert norm_eval(m, -xi) == pytest.approx(norm_eval(m, xi), rel=1e-15, abs=0)


def test_norm_spec_parsing() -> None:
    m = norm_from_spec('{"functionals": [[1, 1], [1, -1]], "euclidean_weight": 0}')
    assert len(m.facets) == 4
    assert norm_from_spec({"functionals": [[1, 0], [0, 1]]}).polyhedral
    assert norm_from_spec("kgon:8").name == "kgon:8"
    with pytest.raises(ValueError):
        norm_from_spec({"functionals": [[1, 0]], "weight": 1})
    with pytest.raises(ValueError):
        norm_from_spec("octagon")
