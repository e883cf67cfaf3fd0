import json

import numpy as np
import pytest

from quadtoric.flow import (
    F,
    FlowConfig,
    NearSingular,
    constraint_residuals,
    flow_report,
    grad_ham_field,
    integrate,
    integrate_batch,
    involution_residual,
    project,
    singular_distance,
    tau,
    tau_vector,
)
from quadtoric.geometry import random_quadric_points, sample_sphere, sample_torus


def _state(z, t=1.0):
    return np.concatenate([np.asarray(z, dtype=complex), [t]])[None, :]


@pytest.fixture(scope="module", params=[2, 3])
def runs(request):
    n = request.param
    torus = integrate_batch(sample_torus(n, 20, seed=n), label="torus")
    sphere = integrate_batch(sample_sphere(n, 20, seed=n + 1), label="sphere")
    return n, torus, sphere, flow_report(torus, sphere)


def test_report_thresholds(runs):
    _, _, _, rep = runs
    assert rep.t_linearity <= 1e-6
    assert rep.constraint_max <= 1e-9
    assert rep.sphere_involution_max <= 1e-7
    assert rep.sphere_final_mean_distance <= 0.2
    assert rep.torus_final_min_distance >= 0.3
    assert rep.passed and not rep.truncated


def test_t_moves_linearly(runs):
    _, torus, _, _ = runs
    tr = torus[0]
    assert np.abs(tr.t - (1 - tr.s)).max() < 1e-9
    assert tr.s[-1] == pytest.approx(0.99)


def test_sphere_approaches_singular_point(runs):
    _, _, sphere, rep = runs
    assert rep.sphere_monotone_tail
    for tr in sphere:
        d = tr.diagnostics["singular_distance"]
        assert d[-1] < d[0]


def test_jsonl_trace(runs):
    _, torus, _, _ = runs
    lines = list(torus[0].jsonl_lines())
    assert len(lines) == len(torus[0].s)
    rec = json.loads(lines[-1])
    assert {"s", "t", "z", "t_error", "singular_distance"} <= set(rec)


def test_field_is_tau_equivariant():
    z = random_quadric_points(3, 1, seed=4)[0]
    Y = _state(z, 0.7)
    zt, tt = tau(z, 0.7)
    V = grad_ham_field(Y)[0]
    Vt = grad_ham_field(_state(zt, tt))[0]
    assert np.abs(Vt - tau_vector(V)).max() < 1e-12
    # tau preserves F and the norm
    assert abs(F(zt, tt) - np.conj(F(z, 0.7))) < 1e-12


def test_field_is_horizontal():
    Z = random_quadric_points(4, 10, seed=1)
    Y = np.concatenate([Z, np.ones((10, 1))], axis=1)
    V = grad_ham_field(Y)
    z = Y[:, :-1]
    assert np.abs(V[:, -1] + 1).max() < 1e-12
    assert np.abs(np.einsum("mk,mk->m", np.conj(z), V[:, :-1])).max() < 1e-12
    dF = 2 * z[:, :3] * V[:, :3]
    tangent = np.sum(dF, axis=1) + np.sum(2 * z[:, 3:] * V[:, 3:-1], axis=1) + np.sum(z[:, 3:] ** 2, axis=1) * V[:, -1]
    assert np.abs(tangent).max() < 1e-12


def test_near_singular_raises():
    # the singular point of X_0 has z_1 = z_2 = z_3 = 0
    z = np.array([0, 0, 0, 1, 1j, 0], dtype=complex)
    with pytest.raises(NearSingular):
        grad_ham_field(_state(z, 0.0))
    V = grad_ham_field(_state(z, 0.0), raise_on_singular=False)
    assert np.isnan(V).all()


def test_project_restores_constraints():
    z = random_quadric_points(3, 5, seed=9)
    Y = np.concatenate([z * 1.01 + 0.01, np.full((5, 1), 0.5)], axis=1)
    P = project(Y)
    for row in P:
        assert max(constraint_residuals(row[:-1], row[-1])) < 1e-13
    assert np.array_equal(P[:, -1], Y[:, -1])


def test_involution_residual_and_distance():
    x = sample_sphere(3, 3, seed=0)
    assert np.max(involution_residual(x)) < 1e-10
    # a phase rotation does not change the residual
    assert involution_residual(np.exp(0.4j) * x[0]) < 1e-10
    assert involution_residual(sample_torus(3, 1, seed=0)[0]) > 1e-3
    assert singular_distance(np.array([0, 0, 0, 1, 1j])) == 0.0


def test_single_trajectory_and_bad_end():
    tr = integrate(sample_torus(2, 1, seed=3)[0], FlowConfig(s_end=0.5))
    assert tr.s[-1] == pytest.approx(0.5) and not tr.truncated
    with pytest.raises(ValueError):
        integrate(sample_torus(2, 1, seed=3)[0], FlowConfig(s_end=1.0))
