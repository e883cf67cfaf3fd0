"""Gradient-Hamiltonian flow on the degeneration of ``Q^n``.

The family is ``X = {(z, t) : |z|^2 = 2, F(z, t) = 0} / S^1`` with

    F(z, t) = z_1^2 + z_2^2 + z_3^2 + t (z_4^2 + ... + z_{n+2}^2).

``X_1`` is the quadric and ``X_0`` the singular toric variety.  The field
``V = -grad Re(t) / |grad Re(t)|^2`` is taken in the metric ``G = diag(1, ...,
1, w_t)`` restricted to the horizontal tangent space

    { (v, v_t) : z^H v = 0,  dF_z v + dF_t v_t = 0 }.

Both constraints are complex linear, so the Hermitian projection is also the
real orthogonal one, and ``V`` has ``v_t = -1`` exactly: the parameter
moves as ``t = 1 - s``.

The anti-holomorphic involution ``tau(z, t) = (conj z_1..z_{n+1},
-conj z_{n+2}, conj t)`` preserves ``F``, the metric and ``|z|^2``, so ``V``
is ``tau``-equivariant and the real sphere ``{(x, i)}`` stays fixed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .geometry import gz_batch

# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class NearSingular(ArithmeticError):
    pass


@dataclass(frozen=True)
class FlowConfig:
    s_end: float = 0.99
    rtol: float = 1e-10
    atol: float = 1e-12
    h0: float = 1e-3
    h_min: float = 1e-12
    max_steps: int = 20000
    w_t: float = 1.0
    proj_tol: float = 1e-14
    singular_floor: float = 1e-8


DEFAULT = FlowConfig()


def F(z, t):
    z = np.asarray(z, dtype=complex)
    return np.sum(z[..., :3] ** 2, axis=-1) + t * np.sum(z[..., 3:] ** 2, axis=-1)


def constraint_residuals(z, t) -> tuple[float, float]:
    z = np.asarray(z, dtype=complex)
    return abs(float(np.vdot(z, z).real) - 2.0), abs(complex(F(z, t)))


def tau(z, t):
    """The anti-symplectic involution on the family."""
    z = np.conj(np.asarray(z, dtype=complex))
    z[..., -1] = -z[..., -1]
    return z, np.conj(t)


def tau_vector(v):
    """Differential of :func:`tau` on a state vector ``(v_z, v_t)``."""
    v = np.conj(np.asarray(v, dtype=complex))
    v[..., -2] = -v[..., -2]
    return v


def singular_distance(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    head = np.sum(np.abs(z[..., :3]) ** 2, axis=-1)
    return np.sqrt(head / np.sum(np.abs(z) ** 2, axis=-1))


def involution_residual(z, iters: int = 60, grid: int = 64) -> np.ndarray:
    """``min_theta |Im(e^{i theta} z_{1..n+1})| + |Re(e^{i theta} z_{n+2})|``.

    Works on a single point or a stack.  Coarse grid over ``[0, pi)`` (the
    function has period ``pi``) followed by a vectorized golden-section
    search around the best grid point.
    """
    Z = np.atleast_2d(np.asarray(z, dtype=complex))

    def f(theta):
        rot = np.exp(1j * theta)[..., None] * Z
        return np.linalg.norm(rot[..., :-1].imag, axis=-1) + np.abs(rot[..., -1].real)

    thetas = np.linspace(0.0, np.pi, grid, endpoint=False)
    vals = np.stack([f(np.full(len(Z), th)) for th in thetas], axis=1)
    best = thetas[np.argmin(vals, axis=1)]
    h = np.pi / grid
    lo, hi = best - h, best + h
    g = (np.sqrt(5.0) - 1.0) / 2.0
    for _ in range(iters):
        c = hi - g * (hi - lo)
        d = lo + g * (hi - lo)
        left = f(c) < f(d)
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
    out = np.minimum(f(0.5 * (lo + hi)), vals.min(axis=1))
    return out if np.ndim(z) > 1 else float(out[0])


# -- the vector field ---------------------------------------------------------

def _constraint_rows(Y):
    z, t = Y[:, :-1], Y[:, -1]
    m, d = Y.shape
    C = np.zeros((m, 2, d), dtype=complex)
    C[:, 0, :-1] = np.conj(z)
    C[:, 1, :3] = 2 * z[:, :3]
    C[:, 1, 3:-1] = 2 * t[:, None] * z[:, 3:]
    C[:, 1, -1] = np.sum(z[:, 3:] ** 2, axis=1)
    return C


def grad_ham_field(Y, cfg: FlowConfig = DEFAULT, raise_on_singular: bool = True) -> np.ndarray:
    """``V`` at a stack of states ``Y = [z | t]`` of shape ``(m, n+3)``.

    Returns an array of the same shape.  Near the singular locus, where the
    projected gradient falls below ``cfg.singular_floor``, a
    :class:`NearSingular` is raised (or NaN rows returned).
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=complex))
    m, d = Y.shape
    Ginv = np.ones(d)
    Ginv[-1] = 1.0 / cfg.w_t
    C = _constraint_rows(Y)
    K = np.einsum("mak,mbk,k->mab", C, np.conj(C), Ginv)
    Cg = C[:, :, -1] * Ginv[-1]
    # a rank-deficient Gram matrix means dF vanishes: the state is singular
    degenerate = np.abs(np.linalg.det(K)) < cfg.singular_floor ** 2 * np.abs(np.trace(K, axis1=1, axis2=2)) ** 2
    K[degenerate] = np.eye(2)
    y = np.linalg.solve(K, Cg[..., None])[..., 0]
    g = np.zeros(d)
    g[-1] = Ginv[-1]
    Pg = g[None, :] - Ginv[None, :] * np.einsum("mak,ma->mk", np.conj(C), y)
    norm2 = np.einsum("mk,mk,k->m", Pg, np.conj(Pg), 1.0 / Ginv).real
    bad = degenerate | (np.sqrt(norm2) < cfg.singular_floor)
    if bad.any() and raise_on_singular:
        raise NearSingular(f"{int(bad.sum())} state(s) within the singular floor")
    V = np.full_like(Pg, np.nan)
    V[~bad] = -Pg[~bad] / norm2[~bad, None]
    return V


def project(Y, tol: float = DEFAULT.proj_tol, iters: int = 8) -> np.ndarray:
    """Min-norm Newton correction of ``z`` onto ``|z|^2 = 2, F = 0`` at fixed ``t``."""
    Y = np.array(Y, dtype=complex)
    z, t = Y[:, :-1], Y[:, -1]
    p = z.shape[1]
    for _ in range(iters):
        r1 = np.sum(np.abs(z) ** 2, axis=1) - 2.0
        r2 = F(z, t)
        if max(np.abs(r1).max(), np.abs(r2).max()) <= tol:
            break
        w = np.ones((len(z), p), dtype=complex)
        w[:, 3:] = t[:, None]
        dF = 2 * w * z  # complex gradient of F
        # real Jacobian rows for (Re dz, Im dz)
        J = np.empty((len(z), 3, 2 * p))
        J[:, 0, :p] = 2 * z.real
        J[:, 0, p:] = 2 * z.imag
        J[:, 1, :p] = dF.real
        J[:, 1, p:] = -dF.imag
        J[:, 2, :p] = dF.imag
        J[:, 2, p:] = dF.real
        r = np.stack([r1, r2.real, r2.imag], axis=1)
        JJt = np.einsum("mai,mbi->mab", J, J)
        lam = np.linalg.solve(JJt, r[..., None])[..., 0]
        dx = -np.einsum("mai,ma->mi", J, lam)
        z = z + dx[:, :p] + 1j * dx[:, p:]
    Y[:, :-1] = z
    return Y


# -- integration --------------------------------------------------------------

@dataclass
class FlowTrace:
    label: str
    s: np.ndarray
    z: np.ndarray
    t: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    truncated: bool = False

    def jsonl_lines(self):
        for k in range(len(self.s)):
            rec = {
                "label": self.label,
                "s": float(self.s[k]),
                "t": [float(self.t[k].real), float(self.t[k].imag)],
                "z": [[float(c.real), float(c.imag)] for c in self.z[k]],
            }
            rec.update({name: float(v[k]) for name, v in self.diagnostics.items()})
            yield json.dumps(rec, sort_keys=True)


def _diagnostics(s, Y):
    z, t = Y[:, :-1], Y[:, -1]
    gz = gz_batch(z)
    return {
        "t_error": np.abs(t - (1.0 - s)),
        "norm_residual": np.abs(np.sum(np.abs(z) ** 2, axis=1) - 2.0),
        "F_residual": np.abs(F(z, t)),
        "involution_residual": np.atleast_1d(involution_residual(z)),
        "singular_distance": singular_distance(z),
        "gz2": gz[:, 0],
        "gz3": gz[:, 1] if gz.shape[1] > 1 else np.zeros(len(z)),
    }


def integrate_batch(Z0, cfg: FlowConfig = DEFAULT, label: str = "start") -> list[FlowTrace]:
    """Integrate a batch of starts on ``X_1`` to ``s = cfg.s_end`` with a shared step.

    Dormand-Prince 5(4) with error control on the worst trajectory, then a
    projection back onto both constraints after every accepted step.
    """
    Z0 = np.atleast_2d(np.asarray(Z0, dtype=complex))
    if not cfg.s_end < 1.0:
        raise ValueError("s_end must stay below 1")
    m = len(Z0)
    Y = project(np.concatenate([Z0, np.ones((m, 1), dtype=complex)], axis=1))
    s, h = 0.0, cfg.h0
    rec_s = [s]
    rec_Y = [Y.copy()]
    diag = [_diagnostics(s, Y)]
    truncated = False
    k1 = grad_ham_field(Y, cfg)
    steps = 0
    while s < cfg.s_end - 1e-15:
        steps += 1
        if steps > cfg.max_steps:
            truncated = True
            break
        h = min(h, cfg.s_end - s)
        try:
            ks = [k1]
            for i in range(1, 7):
                Yi = Y + h * sum(a * k for a, k in zip(_A[i], ks))
                ks.append(grad_ham_field(Yi, cfg))
        except NearSingular:
            h *= 0.25
            if h < cfg.h_min:
                truncated = True
                break
            continue
        y5 = Y + h * sum(b * k for b, k in zip(_B5, ks))
        y4 = Y + h * sum(b * k for b, k in zip(_B4, ks))
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(Y), np.abs(y5))
        err = float(np.sqrt(np.mean(np.abs((y5 - y4) / scale) ** 2, axis=1)).max())
        if err <= 1.0:
            s += h
            Y = project(y5, cfg.proj_tol)
            rec_s.append(s)
            rec_Y.append(Y.copy())
            diag.append(_diagnostics(s, Y))
            try:
                k1 = grad_ham_field(Y, cfg)
            except NearSingular:
                truncated = True
                break
        fac = 0.9 * (1.0 / max(err, 1e-10)) ** 0.2
        h_new = h * min(5.0, max(0.2, fac))
        if h_new < cfg.h_min:
            truncated = True
            break
        h = h_new

    S = np.array(rec_s)
    Ys = np.stack(rec_Y, axis=1)  # (m, steps, d)
    traces = []
    for j in range(m):
        dj = {k: np.array([d[k][j] for d in diag]) for k in diag[0]}
        traces.append(FlowTrace(f"{label}[{j}]", S, Ys[j, :, :-1], Ys[j, :, -1], dj, truncated))
    return traces


def integrate(z0, cfg: FlowConfig = DEFAULT, label: str = "start") -> FlowTrace:
    return integrate_batch(np.asarray(z0)[None, :], cfg, label)[0]


# -- reporting ----------------------------------------------------------------

SPHERE_MEAN_MAX = 0.2
TORUS_MIN = 0.3
CLUSTER_STD_MAX = 0.05


@dataclass
class FlowReport:
    t_linearity: float
    constraint_max: float
    sphere_involution_max: float
    sphere_final_mean_distance: float
    sphere_monotone_tail: bool
    torus_final_min_distance: float
    torus_min_distance: float
    torus_cluster_std: float
    gz_drift: float
    truncated: bool
    counts: dict

    @property
    def checks(self) -> dict:
        return {
            "t_linearity": self.t_linearity <= 1e-6,
            "constraints": self.constraint_max <= 1e-9,
            "sphere_involution": self.sphere_involution_max <= 1e-7,
            "sphere_distance": self.sphere_final_mean_distance <= SPHERE_MEAN_MAX,
            "sphere_monotone_tail": self.sphere_monotone_tail,
            "torus_distance": self.torus_final_min_distance >= TORUS_MIN,
            "not_truncated": not self.truncated,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def cluster_passed(self) -> bool:
        return self.torus_cluster_std <= CLUSTER_STD_MAX

    def as_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items()}
        out["checks"] = self.checks
        out["passed"] = self.passed
        out["cluster_passed"] = self.cluster_passed
        return out


def _tail_monotone(tr: FlowTrace, tol: float = 1e-12) -> bool:
    half = tr.s >= tr.s[-1] / 2
    d = tr.diagnostics["singular_distance"][half]
    return bool(np.all(np.diff(d) <= tol))


def flow_report(torus: list[FlowTrace], sphere: list[FlowTrace]) -> FlowReport:
    every = list(torus) + list(sphere)

    def worst(key, traces):
        return max((float(tr.diagnostics[key].max()) for tr in traces), default=0.0)

    constraint = max(worst("norm_residual", every), worst("F_residual", every))
    gz_drift = max(
        (
            float(np.abs(tr.diagnostics[k] - tr.diagnostics[k][0]).max())
            for tr in every
            for k in ("gz2", "gz3")
        ),
        default=0.0,
    )
    if torus:
        ends = np.array([np.abs(tr.z[-1, 3:]) ** 2 for tr in torus])
        cluster = float(ends.std(axis=0).max())
        torus_final = min(float(tr.diagnostics["singular_distance"][-1]) for tr in torus)
        torus_min = min(float(tr.diagnostics["singular_distance"].min()) for tr in torus)
    else:
        cluster, torus_final, torus_min = 0.0, np.inf, np.inf
    sphere_mean = (
        float(np.mean([tr.diagnostics["singular_distance"][-1] for tr in sphere])) if sphere else 0.0
    )
    return FlowReport(
        t_linearity=worst("t_error", every),
        constraint_max=constraint,
        sphere_involution_max=worst("involution_residual", sphere),
        sphere_final_mean_distance=sphere_mean,
        sphere_monotone_tail=all(_tail_monotone(tr) for tr in sphere),
        torus_final_min_distance=torus_final,
        torus_min_distance=torus_min,
        torus_cluster_std=cluster,
        gz_drift=gz_drift,
        truncated=any(tr.truncated for tr in every),
        counts={"torus": len(torus), "sphere": len(sphere)},
    )
