"""Point model of the quadric, Gelfand-Zeitlin values and the Biran lift.

A point of ``Q^n`` is a representative ``z`` in ``C^{n+2}`` with
``|z|^2 = 2`` and ``sum z_j^2 = 0``, taken modulo the phase ``S^1``.
Coordinates are 1-based in docstrings (``z_1 ... z_{n+2}``) and 0-based in
arrays.

With ``A(z) = (lam/|z|^2) * i (z z^H - conj(z) z^T) = -2 (lam/|z|^2) Im(z z^H)``
(a real skew matrix of rank at most 2) the GZ values are

* ``lam^(2) = A_12``, signed,
* ``lam^(k) = nu`` where ``+/- i nu`` are the eigenvalues of the top-left
  ``k x k`` block, ``k = 3 .. n+1``.

The monotone torus is the fiber over ``u* = (0, 2/n, 4/n, ..., 2(n-1)/n)``
and the vanishing sphere ``{(x, i) : x in S^n}`` maps to the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GeometryConfig:
    lam: float = 2.0
    norm2: float = 2.0
    lam0: float = 2 * np.pi
    point_tol: float = 1e-9

    def __post_init__(self):
        for k in ("lam", "norm2", "lam0", "point_tol"):
            if not getattr(self, k) > 0:
                raise ValueError(f"{k} must be positive")


DEFAULT = GeometryConfig()


class InvalidPoint(ValueError):
    pass


def constraint_residuals(z) -> tuple[float, float]:
    z = np.asarray(z, dtype=complex)
    return abs(float(np.vdot(z, z).real) - 2.0), abs(complex(np.sum(z * z)))


def check_point(z, cfg: GeometryConfig = DEFAULT) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    r_norm = abs(float(np.vdot(z, z).real) - cfg.norm2)
    r_quad = abs(complex(np.sum(z * z)))
    if r_norm > cfg.point_tol or r_quad > cfg.point_tol:
        raise InvalidPoint(f"not on the quadric: | |z|^2 - {cfg.norm2} | = {r_norm:.2e}, |sum z^2| = {r_quad:.2e}")
    return z


def fiber_target(n: int) -> np.ndarray:
    return np.array([0.0] + [2.0 * k / n for k in range(1, n)])


# -- GZ evaluators -------------------------------------------------------------

def gz_eval_closed(z, cfg: GeometryConfig = DEFAULT, check: bool = True) -> np.ndarray:
    """GZ values from the explicit formulas.

    ``lam^(k) = (lam/|z|^2) sqrt(sum_{i<j<=k} |z_i conj(z_j) - conj(z_i) z_j|^2)``;
    each summand is ``4 Im(z_i conj z_j)^2``.  Written as a sum over pairs
    the value is exactly zero when the first ``k`` coordinates share a phase.
    """
    z = check_point(z, cfg) if check else np.asarray(z, dtype=complex)
    n = z.size - 2
    scale = cfg.lam / float(np.vdot(z, z).real)
    out = np.empty(n)
    out[0] = -2.0 * scale * float(np.imag(z[0] * np.conj(z[1])))
    im = np.imag(np.outer(z, np.conj(z)))
    # cumulative sum over i < j <= k of Im(z_i conj z_j)^2
    sq = np.triu(im * im, 1)
    cum = np.cumsum(np.cumsum(sq, axis=0), axis=1)
    for k in range(3, n + 2):
        out[k - 2] = scale * 2.0 * np.sqrt(cum[k - 1, k - 1])
    return out


def gz_matrix(z, cfg: GeometryConfig = DEFAULT) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return -2.0 * cfg.lam / float(np.vdot(z, z).real) * np.imag(np.outer(z, np.conj(z)))


def gz_eval_matrix(z, cfg: GeometryConfig = DEFAULT, check: bool = True) -> np.ndarray:
    """GZ values as spectra of the nested skew blocks of ``A(z)``.

    For real skew ``B`` the matrix ``i B`` is Hermitian with eigenvalues
    ``-/+ nu``; ``nu`` is its largest eigenvalue.  The sign of ``lam^(2)``
    is the Pfaffian of the 2 x 2 block, ``A_12``.
    """
    z = check_point(z, cfg) if check else np.asarray(z, dtype=complex)
    n = z.size - 2
    A = gz_matrix(z, cfg)
    out = np.empty(n)
    out[0] = A[0, 1]
    for k in range(3, n + 2):
        nu = np.linalg.eigvalsh(1j * A[:k, :k])[-1]
        out[k - 2] = max(float(nu), 0.0)
    return out


def gz_full_value(z, cfg: GeometryConfig = DEFAULT) -> float:
    """``lam^(n+2)``: the top eigenvalue of the whole matrix, ``lam`` on the quadric."""
    A = gz_matrix(z, cfg)
    return float(np.linalg.eigvalsh(1j * A)[-1])


def gz_batch(Z: np.ndarray, cfg: GeometryConfig = DEFAULT) -> np.ndarray:
    """Closed-form GZ values for a stack of representatives, shape ``(m, n+2)``."""
    Z = np.asarray(Z, dtype=complex)
    norm = np.einsum("mi,mi->m", Z, np.conj(Z)).real
    scale = cfg.lam / norm
    im = np.imag(Z[:, :, None] * np.conj(Z[:, None, :]))
    sq = np.triu(im * im, 1)
    cum = np.cumsum(np.cumsum(sq, axis=1), axis=2)
    n = Z.shape[1] - 2
    out = np.empty((Z.shape[0], n))
    out[:, 0] = -2.0 * scale * np.imag(Z[:, 0] * np.conj(Z[:, 1]))
    for k in range(3, n + 2):
        out[:, k - 2] = 2.0 * scale * np.sqrt(cum[:, k - 1, k - 1])
    return out


# -- Biran coordinates -------------------------------------------------------

def biran_map(w, zeta: complex, cfg: GeometryConfig = DEFAULT, check: bool = True) -> np.ndarray:
    """``(w, zeta) -> ((1 - |zeta|^2/4) w - zeta^2 conj(w)/4, (1 - |zeta|^2/4)^{1/2} zeta)``.

    ``w`` is a point of ``Q^{n-1}`` (``n+1`` coordinates).  The result has
    ``|z|^2 = 2`` and ``sum z^2 = 0`` whenever ``w`` does.
    """
    w = check_point(w, cfg) if check else np.asarray(w, dtype=complex)
    a = abs(zeta) ** 2
    if a >= 2.0:
        raise ValueError("|zeta| must be below sqrt(2)")
    head = (1.0 - a / 4.0) * w - zeta**2 * np.conj(w) / 4.0
    return np.concatenate([head, [np.sqrt(1.0 - a / 4.0) * zeta]])


def monotone_radius(n: int) -> float:
    """``|zeta|`` on the monotone circle bundle over ``Q^{n-1}``: ``|zeta|^2/2 = 1/n``."""
    return float(np.sqrt(2.0 / n))


def monotone_lift(w, theta: float, cfg: GeometryConfig = DEFAULT, check: bool = True) -> np.ndarray:
    n = np.asarray(w).size - 1
    return biran_map(w, monotone_radius(n) * np.exp(1j * theta), cfg, check)


@dataclass(frozen=True)
class PolarizationSpec:
    """Biran data for a degree ``k`` polarization with monotonicity ``kappa``."""

    k: int
    kappa: float

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("degree must be positive")

    @property
    def area(self) -> float:
        return 2 * np.pi / self.k

    @property
    def r0_squared(self) -> float:
        return 2 * self.kappa / (2 * self.kappa + 1)

    @property
    def zeta_squared(self) -> float:
        """``|zeta|^2`` on the monotone circle bundle in the coordinates of
        :func:`biran_map`; it is ``2 r0^2``, so ``|zeta|^2 / 2 = r0^2``."""
        return 2 * self.r0_squared

    @classmethod
    def quadric_hyperplane(cls, n: int) -> "PolarizationSpec":
        """``Q^{n-1}`` inside ``Q^n``: degree 1, ``kappa = 1/(2(n-1))``."""
        if n < 2:
            raise ValueError("needs n >= 2")
        return cls(1, 1.0 / (2 * (n - 1)))


# -- samplers ----------------------------------------------------------------

def torus_point(n: int, phi: float, thetas) -> np.ndarray:
    """Base circle point ``(cos phi, sin phi, i)`` lifted through ``n-1`` levels."""
    z = np.array([np.cos(phi), np.sin(phi), 1j], dtype=complex)
    for th in thetas:
        z = monotone_lift(z, th, check=False)
    return z


def sample_torus(n: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` points of the monotone torus, angles uniform on the circle."""
    if n < 1:
        raise ValueError("n >= 1")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2 * np.pi, size=(count, n))
    return np.array([torus_point(n, a[0], a[1:]) for a in angles])


def sample_sphere(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Points ``(x, i)`` with ``x`` uniform on the unit sphere in ``R^{n+1}``."""
    if n < 1:
        raise ValueError("n >= 1")
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count, n + 1))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return np.concatenate([x, np.full((count, 1), 1j)], axis=1).astype(complex)


def chordal_distance(z, w) -> float:
    """Phase-minimized distance ``min_theta |z - e^{i theta} w|`` for ``|z|^2 = |w|^2 = 2``."""
    return float(np.sqrt(max(4.0 - 2.0 * abs(np.vdot(z, w)), 0.0)))


def min_chordal_distance(Z, W) -> float:
    inner = np.abs(np.asarray(Z) @ np.conj(np.asarray(W)).T)
    return float(np.sqrt(max(4.0 - 2.0 * inner.max(), 0.0)))


@dataclass
class DisjointnessReport:
    n: int
    gap: float
    threshold: float
    sphere_max_abs: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.gap >= self.threshold

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "gap": self.gap,
            "threshold": self.threshold,
            "sphere_max_abs": self.sphere_max_abs,
            "samples": self.samples,
            "passed": self.passed,
        }


def disjointness_report(n: int, count: int = 1000, seed: int = 0, target=None) -> DisjointnessReport:
    """Sup-norm distance from GZ images of sphere samples to the torus fiber."""
    if n < 2:
        raise ValueError("n >= 2")
    u = fiber_target(n) if target is None else np.asarray(target, dtype=float)
    phi = gz_batch(sample_sphere(n, count, seed))
    gap = float(np.abs(phi - u).max(axis=1).min())
    return DisjointnessReport(n, gap, 2.0 / n - 1e-8, float(np.abs(phi).max()), count)


def random_quadric_points(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Generic points: ``z = x + i y`` with ``x, y`` orthogonal of length 1."""
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(count, n + 2))
    y = rng.normal(size=(count, n + 2))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y -= np.einsum("mi,mi->m", x, y)[:, None] * x
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    phase = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(count, 1)))
    return phase * (x + 1j * y)
