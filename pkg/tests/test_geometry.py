import numpy as np
import pytest

from quadtoric.geometry import (
    GeometryConfig,
    InvalidPoint,
    PolarizationSpec,
    biran_map,
    check_point,
    chordal_distance,
    constraint_residuals,
    disjointness_report,
    fiber_target,
    gz_batch,
    gz_eval_closed,
    gz_eval_matrix,
    gz_full_value,
    min_chordal_distance,
    monotone_lift,
    monotone_radius,
    random_quadric_points,
    sample_sphere,
    sample_torus,
    torus_point,
)
from quadtoric.suite import biran_residuals


def test_gz_by_hand():
    z = np.array([1, 1j, 0, 0])
    assert gz_eval_closed(z) == pytest.approx([2.0, 2.0])
    assert gz_eval_matrix(z) == pytest.approx([2.0, 2.0])
    # orientation flips the sign of the first value only
    assert gz_eval_closed(np.conj(z)) == pytest.approx([-2.0, 2.0])


def test_point_checks():
    with pytest.raises(InvalidPoint):
        check_point([1, 1, 0, 0])
    with pytest.raises(InvalidPoint):
        gz_eval_closed([2, 2j, 0, 0])
    with pytest.raises(ValueError):
        GeometryConfig(lam=0)


@pytest.mark.parametrize("n", range(2, 7))
def test_dual_evaluators(n):
    Z = random_quadric_points(n, 300, seed=n)
    for z in Z:
        assert np.abs(gz_eval_closed(z) - gz_eval_matrix(z)).max() < 1e-10
    assert np.abs(gz_batch(Z) - np.array([gz_eval_closed(z) for z in Z])).max() < 1e-12


@pytest.mark.parametrize("n", range(2, 7))
def test_full_value_is_lambda(n):
    for z in random_quadric_points(n, 20, seed=1):
        assert gz_full_value(z) == pytest.approx(2.0)


def test_gz_phase_invariant():
    z = random_quadric_points(4, 1, seed=5)[0]
    assert np.allclose(gz_eval_closed(z), gz_eval_closed(np.exp(0.7j) * z))


@pytest.mark.parametrize("n", range(2, 7))
def test_biran_identities(n):
    r = biran_residuals(n, 300, seed=n)
    assert r["nested"] < 1e-9 and r["last"] < 1e-10 and r["constraints"] < 1e-12


def test_biran_rejects_large_zeta():
    w = random_quadric_points(2, 1, seed=0)[0]
    with pytest.raises(ValueError):
        biran_map(w, 1.5)


@pytest.mark.parametrize("n", range(2, 7))
def test_monotone_radius(n):
    pol = PolarizationSpec.quadric_hyperplane(n)
    assert pol.r0_squared == pytest.approx(1.0 / n)
    assert pol.zeta_squared == pytest.approx(monotone_radius(n) ** 2)
    assert pol.area == pytest.approx(2 * np.pi)


@pytest.mark.parametrize("n", range(2, 7))
def test_torus_fiber(n):
    phi = gz_batch(sample_torus(n, 300, seed=n))
    assert np.abs(phi - fiber_target(n)).max() < 1e-8
    assert fiber_target(n)[-1] == pytest.approx(2 * (n - 1) / n)


def test_torus_lift_recursion():
    # lifting a Q^{n-1} torus point at the monotone radius lands on the Q^n fiber
    w = torus_point(2, 0.3, [1.1])
    z = monotone_lift(w, 2.0)
    assert max(constraint_residuals(z)) < 1e-12
    assert gz_eval_closed(z) == pytest.approx(fiber_target(3), abs=1e-12)


@pytest.mark.parametrize("n", range(2, 7))
def test_sphere_maps_to_origin(n):
    phi = gz_batch(sample_sphere(n, 300, seed=n))
    assert np.abs(phi).max() < 1e-10


@pytest.mark.parametrize("n", range(2, 7))
def test_disjointness_gap(n):
    rep = disjointness_report(n, 500, seed=n)
    assert rep.passed
    # the nearest fiber value to the origin is the last one, 2(n-1)/n
    assert rep.gap == pytest.approx(2 * (n - 1) / n)


def test_disjointness_negative_control():
    rep = disjointness_report(3, 200, target=np.zeros(3))
    assert not rep.passed


def test_ambient_distance_torus_sphere_n2():
    # the closest torus-sphere pairs are 2 sin(15 deg) apart
    T = sample_torus(2, 2000, seed=1)
    S = sample_sphere(2, 2000, seed=2)
    d = min_chordal_distance(T, S)
    assert 2 * np.sin(np.pi / 12) - 1e-9 <= d < 2 * np.sin(np.pi / 12) + 0.02


def test_chordal_distance_phase_blind():
    z = random_quadric_points(3, 1, seed=2)[0]
    assert chordal_distance(z, np.exp(1.3j) * z) == pytest.approx(0.0, abs=1e-7)
    # <z, conj z> = conj(sum z^2) = 0 on the quadric
    assert chordal_distance(z, np.conj(z)) == pytest.approx(2.0)
