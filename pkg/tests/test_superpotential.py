import numpy as np
import pytest

from quadtoric.algebra import builtin_quadric_table
from quadtoric.superpotential import (
    AKSMismatch,
    SuperpotentialSpec,
    aks_crosscheck,
    closed_form_critical_points,
    eval_W,
    grad_W,
    hessian_W,
    match_points,
    newton_solve,
    random_starts,
    solve,
)


@pytest.mark.parametrize("n", range(2, 8))
def test_term_count(n):
    assert len(SuperpotentialSpec.quadric(n).terms) == n + 2


def test_q2_by_hand():
    # W = 1/z2 + z2/z1 + 2 z2 + z1 z2; critical points (1, +-1/2), values +-4
    spec = SuperpotentialSpec.quadric(2)
    for z2, val in ((0.5, 4.0), (-0.5, -4.0)):
        z = np.array([1.0, z2], dtype=complex)
        assert eval_W(spec, z) == pytest.approx(val)
        assert np.abs(grad_W(spec, z)).max() < 1e-14
    vals = sorted(p.value.real for p in closed_form_critical_points(2))
    assert vals == pytest.approx([-4.0, 4.0])


def test_derivatives_against_finite_differences():
    spec = SuperpotentialSpec.quadric(4)
    rng = np.random.default_rng(3)
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    h = 1e-6
    g = np.array([(eval_W(spec, z + h * e) - eval_W(spec, z - h * e)) / (2 * h) for e in np.eye(4)])
    assert np.abs(g - grad_W(spec, z)).max() < 1e-6
    H = np.array([(grad_W(spec, z + h * e) - grad_W(spec, z - h * e)) / (2 * h) for e in np.eye(4)])
    assert np.abs(H - hessian_W(spec, z)).max() < 1e-5


def test_undefined_on_hyperplanes():
    spec = SuperpotentialSpec.quadric(3)
    with pytest.raises(ValueError):
        eval_W(spec, [1, 0, 1])
    with pytest.raises(ValueError):
        eval_W(spec, [1, 1])
    with pytest.raises(ValueError):
        SuperpotentialSpec.quadric(1)


@pytest.mark.parametrize("n", range(2, 7))
def test_multistart_finds_closed_form(n):
    res = solve(n, starts=200, seed=0)
    assert len(res.points) == n
    dist, pairs = match_points(res.points, closed_form_critical_points(n))
    assert dist < 1e-9 and len(pairs) == n
    assert min(p.hessian_min_singular for p in res.points) >= 1e-6
    # critical values are n xi with xi^n = 4
    for p in res.points:
        assert abs(p.value - n * p.xi) < 1e-9
        assert abs(p.xi ** n - 4) < 1e-9


def test_seeded_determinism():
    a, b = solve(3, starts=50, seed=11), solve(3, starts=50, seed=11)
    assert [p.value for p in a.points] == [p.value for p in b.points]
    assert np.array_equal(random_starts(3, 5, 2), random_starts(3, 5, 2))


def test_deflation_mode_agrees():
    spec = SuperpotentialSpec.quadric(3)
    res = newton_solve(spec, random_starts(3, 30, 1), deflate=True, seed=1)
    dist, _ = match_points(res.points, closed_form_critical_points(3))
    assert len(res.points) == 3 and dist < 1e-9


def test_starts_on_hyperplane_dropped():
    spec = SuperpotentialSpec.quadric(2)
    res = newton_solve(spec, [[0, 1], [1, 0.5]])
    assert res.dropped == 1 and len(res.points) == 1


@pytest.mark.parametrize("n", range(2, 7))
def test_aks_crosscheck(n):
    rep = aks_crosscheck(SuperpotentialSpec.quadric(n), builtin_quadric_table(n))
    assert rep.ok and rep.max_error < 1e-8
    assert rep.zero_eigenvalues == (2 if n % 2 == 0 else 1)
    assert len(rep.pairs) == n


def test_aks_wrong_table_rejected():
    with pytest.raises(AKSMismatch):
        aks_crosscheck(SuperpotentialSpec.quadric(3), builtin_quadric_table(4))
    rep = aks_crosscheck(SuperpotentialSpec.quadric(3), builtin_quadric_table(4), strict=False)
    assert not rep.ok and rep.as_dict()["ok"] is False
