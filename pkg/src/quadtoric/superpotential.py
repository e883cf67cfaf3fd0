"""Disk potential of the monotone Gelfand-Zeitlin torus in ``Q^n``.

    W(z) = 1/z_n + z_n/z_{n-1} + ... + z_2/z_1 + 2 z_2 + z_1 z_2

Its critical points are ``(1, xi^{-(n-1)}, ..., xi^{-1})`` for the ``n``
roots of ``xi^n = 4``, with critical values ``n xi``.  Independently of that
closed form, :func:`newton_solve` finds them by multistart Newton on the
logarithmic gradient ``z_i dW/dz_i``, which has no roots on the coordinate
hyperplanes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .algebra import AlgebraTable, c1_spectrum

HESSIAN_FLOOR = 1e-6
DEDUP_TOL = 1e-6
ACCEPT_TOL = 1e-10


@dataclass(frozen=True)
class SuperpotentialSpec:
    """Laurent polynomial as a list of ``(coeff, exponent tuple)`` monomials."""

    n: int
    terms: tuple

    @classmethod
    def quadric(cls, n: int) -> "SuperpotentialSpec":
        if n < 2:
            raise ValueError("the potential is defined for n >= 2")
        terms = []

        def mono(c, **powers):
            e = [0] * n
            for k, v in powers.items():
                e[int(k[1:]) - 1] += v
            terms.append((c, tuple(e)))

        mono(1, **{f"z{n}": -1})
        for k in range(n, 1, -1):
            mono(1, **{f"z{k}": 1, f"z{k - 1}": -1})
        mono(2, z2=1)
        mono(1, z1=1, z2=1)
        return cls(n, tuple(terms))

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms], dtype=complex)

    @property
    def exponents(self) -> np.ndarray:
        return np.array([e for _, e in self.terms], dtype=float)


def _check_z(spec: SuperpotentialSpec, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != spec.n:
        raise ValueError(f"expected {spec.n} coordinates, got {z.shape[-1]}")
    if np.any(z == 0):
        raise ValueError("W is undefined on the coordinate hyperplanes")
    return z


def _monomials(spec, z):
    # values c_m z^{a_m}
    A = spec.exponents
    return spec.coeffs * np.prod(z[None, :] ** A, axis=1)


def eval_W(spec: SuperpotentialSpec, z) -> complex:
    z = _check_z(spec, z)
    return complex(_monomials(spec, z).sum())


def grad_W(spec: SuperpotentialSpec, z) -> np.ndarray:
    z = _check_z(spec, z)
    m = _monomials(spec, z)
    return (spec.exponents * m[:, None]).sum(axis=0) / z


def hessian_W(spec: SuperpotentialSpec, z) -> np.ndarray:
    z = _check_z(spec, z)
    A = spec.exponents
    m = _monomials(spec, z)
    H = np.einsum("m,mi,mj->ij", m, A, A) - np.diag((A * m[:, None]).sum(axis=0))
    return H / np.outer(z, z)


def log_gradient(spec: SuperpotentialSpec, z) -> np.ndarray:
    """``z_i dW/dz_i``: the gradient in logarithmic coordinates ``z = exp(w)``."""
    m = _monomials(spec, z)
    return (spec.exponents * m[:, None]).sum(axis=0)


def log_jacobian(spec: SuperpotentialSpec, z) -> np.ndarray:
    A = spec.exponents
    m = _monomials(spec, z)
    return np.einsum("m,mi,mj->ij", m, A, A)


@dataclass
class CriticalPoint:
    z: np.ndarray
    value: complex
    hessian_min_singular: float
    residual: float
    xi: complex | None = None
    iterations: int = 0

    def as_dict(self) -> dict:
        return {
            "z": [[float(c.real), float(c.imag)] for c in self.z],
            "value": [float(self.value.real), float(self.value.imag)],
            "residual": self.residual,
            "hessian_min_singular": self.hessian_min_singular,
            "xi": None if self.xi is None else [float(self.xi.real), float(self.xi.imag)],
            "iterations": self.iterations,
        }


def _xi_roots(n):
    k = np.arange(n)
    return 4.0 ** (1.0 / n) * np.exp(2j * np.pi * k / n)


def _nearest_xi(n, value):
    roots = _xi_roots(n)
    return complex(roots[np.argmin(np.abs(n * roots - value))])


def make_point(spec: SuperpotentialSpec, z, iterations: int = 0) -> CriticalPoint:
    z = np.asarray(z, dtype=complex)
    val = eval_W(spec, z)
    sv = np.linalg.svd(hessian_W(spec, z), compute_uv=False)
    return CriticalPoint(
        z=z,
        value=val,
        hessian_min_singular=float(sv.min()),
        residual=float(np.linalg.norm(grad_W(spec, z))),
        xi=_nearest_xi(spec.n, val),
        iterations=iterations,
    )


def closed_form_critical_points(n: int) -> list[CriticalPoint]:
    spec = SuperpotentialSpec.quadric(n)
    out = []
    for xi in _xi_roots(n):
        z = np.array([1.0] + [xi ** (-(n - k + 1)) for k in range(2, n + 1)], dtype=complex)
        p = make_point(spec, z)
        p.xi = complex(xi)
        out.append(p)
    return out


# -- multistart Newton --------------------------------------------------------

def random_starts(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Log-uniform moduli in [0.1, 10], uniform phases; one RNG stream per start."""
    streams = np.random.SeedSequence(seed).spawn(count)
    out = np.empty((count, n), dtype=complex)
    for k, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        mod = 10.0 ** rng.uniform(-1.0, 1.0, size=n)
        ph = rng.uniform(0.0, 2 * np.pi, size=n)
        out[k] = mod * np.exp(1j * ph)
    return out


def _deflation_factor(z, delta_w, roots):
    """``(M, D_delta log M)`` for ``M = prod_r (1/|z - r|^2 + 1)``."""
    logM, dlogM = 0.0, 0.0
    for r in roots:
        diff = z - r
        d2 = float(np.vdot(diff, diff).real)
        if d2 == 0.0:
            return np.inf, 0.0
        dd2 = 2.0 * float(np.real(np.vdot(diff, z * delta_w)))
        logM += np.log1p(1.0 / d2)
        dlogM += (-dd2 / d2**2) / (1.0 / d2 + 1.0)
    return np.exp(logM), dlogM


ESCAPE_LOG = np.log(1e6)


def _fresh_start(rng, n):
    return np.log(10.0) * rng.uniform(-1.0, 1.0, size=n) + 1j * rng.uniform(0, 2 * np.pi, size=n)


def _newton(spec, z0, tol, maxiter, roots=(), rng=None, max_restarts=3):
    """Damped Newton in ``w = log z``.

    A singular Jacobian or an escape towards the coordinate hyperplanes or
    infinity (``|Re w| > log 1e6``) triggers a restart from a fresh random
    point, at most ``max_restarts`` times.
    """
    w = np.log(np.asarray(z0, dtype=complex))
    restarts = 0
    it = 0
    while it < maxiter:
        it += 1
        z = np.exp(w)
        G = log_gradient(spec, z)
        escaped = not np.all(np.isfinite(G)) or np.abs(w.real).max() > ESCAPE_LOG
        delta = None
        if not escaped:
            if np.linalg.norm(G) <= tol:
                return z, it
            J = log_jacobian(spec, z)
            if np.linalg.cond(J) < 1e14:
                delta = np.linalg.solve(J, -G)
        if delta is None:
            if rng is None or restarts >= max_restarts:
                return None, it
            restarts += 1
            w = _fresh_start(rng, spec.n)
            continue
        if roots:
            _, dlogM = _deflation_factor(z, delta, roots)
            denom = 1.0 - dlogM
            if abs(denom) < 1e-14:
                return None, it
            delta = delta / denom
        # damped step on ||G||
        step = 1.0
        g0 = np.linalg.norm(G)
        while step > 1e-4:
            with np.errstate(over="ignore", invalid="ignore"):
                g_new = np.linalg.norm(log_gradient(spec, np.exp(w + step * delta)))
            if np.isfinite(g_new) and g_new < g0 * (1 - 1e-4 * step):
                break
            step *= 0.5
        w = w + step * delta
        if np.linalg.norm(step * delta) <= 1e-15:
            return np.exp(w), it
    return np.exp(w), maxiter


def _polish(spec, z, steps=3):
    """A few undamped Newton steps, kept only while they reduce the residual."""
    w = np.log(z)
    g = np.linalg.norm(log_gradient(spec, z))
    for _ in range(steps):
        try:
            w_new = w + np.linalg.solve(log_jacobian(spec, np.exp(w)), -log_gradient(spec, np.exp(w)))
        except np.linalg.LinAlgError:
            break
        g_new = np.linalg.norm(log_gradient(spec, np.exp(w_new)))
        if not g_new < g:
            break
        w, g = w_new, g_new
    return np.exp(w)


@dataclass
class SolveResult:
    points: list[CriticalPoint]
    starts: int
    converged: int
    dropped: int
    stats: dict = field(default_factory=dict)


def newton_solve(
    spec: SuperpotentialSpec,
    starts,
    tol: float = 1e-12,
    maxiter: int = 100,
    deflate: bool = False,
    seed: int = 0,
) -> SolveResult:
    """Multistart Newton with deduplication at ``DEDUP_TOL``.

    With ``deflate`` every start runs on the system deflated by the roots
    already found; converged points are then polished on the plain system.
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=complex))
    streams = np.random.SeedSequence(seed).spawn(len(starts))
    found: list[np.ndarray] = []
    iters: list[int] = []
    converged = dropped = 0
    for z0, ss in zip(starts, streams):
        if np.any(z0 == 0):
            dropped += 1
            continue
        z, it = _newton(spec, z0, tol, maxiter, tuple(found) if deflate else (), np.random.default_rng(ss))
        if z is None:
            dropped += 1
            continue
        z = _polish(spec, z)
        if np.linalg.norm(log_gradient(spec, z)) > ACCEPT_TOL:
            dropped += 1
            continue
        converged += 1
        if all(np.linalg.norm(z - f) > DEDUP_TOL for f in found):
            found.append(z)
            iters.append(it)
    points = [make_point(spec, z, it) for z, it in zip(found, iters)]
    points.sort(key=lambda p: (round(-p.value.real, 9), round(-p.value.imag, 9)))
    return SolveResult(points, len(starts), converged, dropped)


def solve(n: int, starts: int = 200, seed: int = 0, deflate: bool = False, tol: float = 1e-12) -> SolveResult:
    spec = SuperpotentialSpec.quadric(n)
    return newton_solve(spec, random_starts(n, starts, seed), tol=tol, deflate=deflate, seed=seed)


def match_points(found, reference) -> tuple[float, list[tuple[int, int]]]:
    """Optimal pairing of two point sets; returns the worst distance and pairs."""
    if len(found) != len(reference):
        return np.inf, []
    A = np.array([p.z for p in found])
    B = np.array([p.z for p in reference])
    cost = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max(initial=0.0)), list(zip(rows.tolist(), cols.tolist()))


# -- eigenvalue / critical value comparison ------------------------------------

class AKSMismatch(ValueError):
    pass


@dataclass
class AKSReport:
    pairs: list[tuple[complex, complex]]
    max_error: float
    zero_eigenvalues: int
    unmatched_eigenvalues: list[complex]
    unmatched_values: list[complex]
    tol: float

    @property
    def ok(self) -> bool:
        return not self.unmatched_eigenvalues and not self.unmatched_values and self.max_error <= self.tol

    def as_dict(self) -> dict:
        cx = lambda c: [float(c.real), float(c.imag)]  # noqa: E731
        return {
            "pairs": [[cx(a), cx(b)] for a, b in self.pairs],
            "max_error": self.max_error,
            "zero_eigenvalues_left_to_sphere": self.zero_eigenvalues,
            "unmatched_eigenvalues": [cx(a) for a in self.unmatched_eigenvalues],
            "unmatched_values": [cx(b) for b in self.unmatched_values],
            "ok": self.ok,
        }


def aks_crosscheck(
    spec: SuperpotentialSpec,
    table: AlgebraTable,
    points: list[CriticalPoint] | None = None,
    tol: float = 1e-8,
    strict: bool = True,
) -> AKSReport:
    """Pair nonzero ``c_1``-eigenvalues at ``T = 1`` with critical values.

    Zero eigenvalues are not expected to come from the torus; they are
    counted and left to the vanishing sphere.
    """
    if points is None:
        points = closed_form_critical_points(spec.n)
    eig = c1_spectrum(table, 1.0)
    scale = max(1.0, float(np.abs(eig).max(initial=0.0)))
    nonzero = eig[np.abs(eig) > 1e-8 * scale]
    zeros = len(eig) - len(nonzero)
    vals = np.array([p.value for p in points], dtype=complex)
    cost = np.abs(nonzero[:, None] - vals[None, :])
    rows, cols = linear_sum_assignment(cost) if cost.size else (np.array([], int), np.array([], int))
    pairs, errs = [], []
    used_r, used_c = set(), set()
    for r, c in zip(rows, cols):
        if cost[r, c] <= tol:
            pairs.append((complex(nonzero[r]), complex(vals[c])))
            errs.append(float(cost[r, c]))
            used_r.add(r)
            used_c.add(c)
    rep = AKSReport(
        pairs=pairs,
        max_error=max(errs, default=0.0),
        zero_eigenvalues=zeros,
        unmatched_eigenvalues=[complex(nonzero[r]) for r in range(len(nonzero)) if r not in used_r],
        unmatched_values=[complex(vals[c]) for c in range(len(vals)) if c not in used_c],
        tol=tol,
    )
    if strict and not rep.ok:
        raise AKSMismatch(
            f"{len(rep.unmatched_eigenvalues)} eigenvalue(s) and "
            f"{len(rep.unmatched_values)} critical value(s) left unpaired"
        )
    return rep
