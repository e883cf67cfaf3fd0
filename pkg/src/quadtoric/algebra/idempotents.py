"""Spectra, semisimplicity and primitive idempotents of table algebras.

Everything numeric happens after specializing ``T^{lambda_0} -> T_value``.
For a graded table the primitive idempotents have degree 0, so the
coordinate on a basis element of degree ``d`` is ``c * T^{-d/deg_T}``; the
exponents are recovered by fitting ``log|coord|`` against ``log T`` and
rounding onto the finest admissible lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..scalars import NovikovScalar, exponent_denominator_of
from .table import AlgebraElement, AlgebraTable, validate_table

FIT_GRID = tuple(round(0.5 + 0.1 * k, 10) for k in range(6))
SLOPE_TOL = 0.05
COORD_FLOOR = 1e-10
_GENERIC_ALPHAS = (0.3719 + 0.1177j, -0.6183 + 0.2411j, 0.8271 - 0.4397j)


class NotSemisimpleError(ValueError):
    """Raised when the specialized algebra has a nonzero radical."""

    def __init__(self, name: str, radical_dim: int):
        super().__init__(f"table {name!r} is not semisimple: radical of dimension {radical_dim}")
        self.radical_dim = radical_dim


class InvalidTableError(ValueError):
    pass


class GroupingError(ValueError):
    pass


class ExponentFitError(ValueError):
    pass


def _require_valid(t: AlgebraTable) -> None:
    rep = validate_table(t)
    if not rep.ok:
        raise InvalidTableError(
            f"table {t.name!r} fails: " + ", ".join(sorted(rep.invariants()))
        )


def c1_spectrum(t: AlgebraTable, T_value: float = 1.0, check: bool = True) -> np.ndarray:
    """Eigenvalues of ``c_1 *`` at ``T = T_value``, with multiplicity."""
    if T_value <= 0:
        raise ValueError("T_value must be positive")
    if check:
        _require_valid(t)
    return np.linalg.eigvals(t.mult_matrix(t.c1_element(), T_value))


def trace_form(t: AlgebraTable, T_value: float = 1.0) -> np.ndarray:
    """Gram matrix ``tr(L_{b_i b_j})`` of the trace pairing."""
    C = t.structure_tensor(T_value)
    # L_{b_k} has entries C[k, j, l] at (l, j); its trace is sum_j C[k, j, j]
    traces = np.einsum("kjj->k", C)
    return np.einsum("ijk,k->ij", C, traces)


def radical_dimension(t: AlgebraTable, T_value: float = 1.0, rtol: float = 1e-9) -> int:
    B = trace_form(t, T_value)
    sv = np.linalg.svd(B, compute_uv=False)
    if sv.size == 0:
        return 0
    return int(np.sum(sv <= rtol * max(sv[0], 1.0)))


def is_semisimple(t: AlgebraTable, T_value: float = 1.0) -> bool:
    """Semisimple over C iff the trace form is nondegenerate (char 0)."""
    return radical_dimension(t, T_value) == 0


def count_field_factors(t: AlgebraTable, T_value: float = 1.0) -> int:
    """Number of primitive idempotents of the specialized algebra."""
    return len(_numeric_idempotents(t, T_value)[0])


# -- numeric idempotents ------------------------------------------------------

def _min_gap(vals: np.ndarray) -> float:
    if vals.size < 2:
        return math.inf
    d = np.abs(vals[:, None] - vals[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def _candidate_generics(t: AlgebraTable, T_value: float):
    c1 = t.c1_element().evaluate(T_value)
    yield "c1", c1
    order = list(t.basis.labels)
    if "s" in order:
        order.remove("s")
        order.insert(0, "s")
    for alpha in _GENERIC_ALPHAS:
        for lab in order:
            if lab == t.basis.unit_label:
                continue
            v = c1.copy()
            v[t.basis.index(lab)] += alpha
            yield f"c1+({alpha})*{lab}", v
    rng = np.random.default_rng(0)
    for k in range(8):
        yield f"random{k}", rng.normal(size=t.dim) + 1j * rng.normal(size=t.dim)


def generic_element(t: AlgebraTable, T_value: float = 1.0, gap: float = 1e-6):
    """First candidate whose multiplication operator has simple spectrum."""
    for name, g in _candidate_generics(t, T_value):
        L = t.mult_matrix(g, T_value)
        vals = np.linalg.eigvals(L)
        scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
        if _min_gap(vals) > gap * scale:
            return name, g, vals
    raise NotSemisimpleError(t.name, radical_dimension(t, T_value))


def _numeric_idempotents(t: AlgebraTable, T_value: float):
    """Lagrange interpolation ``e_i = prod_{j != i} (g - l_j) / (l_i - l_j)``."""
    rad = radical_dimension(t, T_value)
    if rad:
        raise NotSemisimpleError(t.name, rad)
    name, g, vals = generic_element(t, T_value)
    L = t.mult_matrix(g, T_value)
    unit = np.zeros(t.dim, dtype=complex)
    unit[t.basis.unit_index] = 1.0
    eye = np.eye(t.dim)
    idems = []
    for i, li in enumerate(vals):
        v = unit
        for j, lj in enumerate(vals):
            if j != i:
                v = (L - lj * eye) @ v / (li - lj)
        idems.append(v)
    E = np.array(idems)
    C1 = t.mult_matrix(t.c1_element(), T_value)
    mus = np.array([_eigenvalue_on(C1, e) for e in E])
    return E, mus, name


def _eigenvalue_on(M: np.ndarray, e: np.ndarray) -> complex:
    return complex(np.vdot(e, M @ e) / np.vdot(e, e))


def _sort_key(mu: complex, e: np.ndarray):
    return (round(-mu.real, 8), round(-mu.imag, 8), tuple(np.round(-e.real, 8)))


def idempotent_residuals(t: AlgebraTable, E: np.ndarray, T_value: float = 1.0) -> dict:
    C = t.structure_tensor(T_value)
    prod = np.einsum("ai,bj,ijk->abk", E, E, C)
    k = E.shape[0]
    idem = max((np.abs(prod[a, a] - E[a]).max() for a in range(k)), default=0.0)
    orth = max(
        (np.abs(prod[a, b]).max() for a in range(k) for b in range(k) if a != b), default=0.0
    )
    unit = np.zeros(t.dim)
    unit[t.basis.unit_index] = 1.0
    total = float(np.abs(E.sum(axis=0) - unit).max()) if k else math.inf
    return {"idempotency": float(idem), "orthogonality": float(orth), "sum": total}


@dataclass
class IdempotentDecomposition:
    idempotents: list[AlgebraElement]
    labels: list[str]
    exponent_denominators: list[int]
    c1_eigenvalues: list[complex]
    numeric: np.ndarray
    coarse_grouping: dict[str, str] = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    generic: str = "c1"
    slopes: list = field(default_factory=list)  # raw fitted slopes, before rounding

    def slope_deviation(self) -> float:
        """Largest distance from a raw slope to its lattice point."""
        worst = 0.0
        for raw, e in zip(self.slopes, self.idempotents):
            for s, c in zip(raw, e.coords):
                if s is not None:
                    worst = max(worst, abs(s - float(c.terms[0][0])))
        return worst

    def __len__(self):
        return len(self.idempotents)

    def by_label(self, label: str) -> AlgebraElement:
        return self.idempotents[self.labels.index(label)]


def _track(t: AlgebraTable, grid) -> tuple[np.ndarray, np.ndarray, str]:
    """Idempotents at every grid value, rows matched to those at ``grid[-1]``.

    Matching walks the grid downwards from the last entry, pairing each
    idempotent with its nearest neighbour at the previous grid value.
    """
    grid = list(grid)
    E_ref, mus, generic = _numeric_idempotents(t, grid[-1])
    order = sorted(range(len(mus)), key=lambda i: _sort_key(mus[i], E_ref[i]))
    E_ref, mus = E_ref[order], mus[order]
    tracks = np.empty((len(grid),) + E_ref.shape, dtype=complex)
    tracks[-1] = E_ref
    prev = E_ref
    for gi in range(len(grid) - 2, -1, -1):
        E, _, _ = _numeric_idempotents(t, grid[gi])
        if len(E) != len(prev):
            raise ExponentFitError("number of idempotents changes along the grid")
        cost = np.linalg.norm(prev[:, None, :] - E[None, :, :], axis=2)
        rows, cols = linear_sum_assignment(cost)
        matched = np.empty_like(E)
        matched[rows] = E[cols]
        tracks[gi] = matched
        prev = matched
    return tracks, mus, generic


def fit_exponents(samples: np.ndarray, grid=FIT_GRID) -> list:
    """Least-squares log-slopes of each coordinate track.

    ``samples`` has shape ``(len(grid), dim)``.  Returns a slope per
    coordinate, or ``None`` for coordinates that vanish on the grid.
    """
    logT = np.log(np.asarray(grid, dtype=float))
    out = []
    for k in range(samples.shape[1]):
        mags = np.abs(samples[:, k])
        if mags.max() <= COORD_FLOOR:
            out.append(None)
            continue
        if mags.min() <= COORD_FLOOR:
            raise ExponentFitError(f"coordinate {k} vanishes on part of the grid")
        slope, _ = np.polyfit(logT, np.log(mags), 1)
        out.append(float(slope))
    return out


def lattice_round(slopes, m_max: int, tol: float = SLOPE_TOL) -> tuple[int, list]:
    """Smallest ``m <= m_max`` with every slope near ``(1/m) Z``.

    The rounding tolerance is ``min(tol, 1/(2 m_max^2))``: distinct fractions
    with denominators up to ``m_max`` are at least ``1/m_max^2`` apart, so
    half of that keeps the lattice assignment unambiguous.
    """
    eff = min(tol, 1.0 / (2 * m_max * m_max))
    live = [s for s in slopes if s is not None]
    for m in range(1, m_max + 1):
        rounded = [Fraction(round(s * m), m) for s in live]
        if all(abs(s - float(r)) <= eff for s, r in zip(live, rounded)):
            it = iter(rounded)
            return m, [None if s is None else next(it) for s in slopes]
    raise ExponentFitError(
        f"slopes {np.round(live, 4).tolist()} do not fit any lattice (1/m)Z with m <= {m_max}"
    )


def _m_max(t: AlgebraTable) -> int:
    return max(2, 2 * t.n)


def exponent_denominator(e, t: AlgebraTable, grid=FIT_GRID) -> int:
    """Minimal ``m`` with all exponents of ``e`` in ``(lambda_0/m) Z``.

    ``e`` may be an exact :class:`AlgebraElement` (exponents read off
    directly), an array of coordinate samples over ``grid``, or a callable
    ``T_value -> coordinate vector``.
    """
    if isinstance(e, AlgebraElement):
        m = 1
        for c in e.coords:
            m = math.lcm(m, exponent_denominator_of(c))
        return m
    if callable(e):
        samples = np.array([np.asarray(e(T), dtype=complex) for T in grid])
    else:
        samples = np.asarray(e, dtype=complex)
    m, _ = lattice_round(fit_exponents(samples, grid), _m_max(t))
    return m


def primitive_idempotents(
    t: AlgebraTable, grid=FIT_GRID, check: bool = True
) -> IdempotentDecomposition:
    """Complete set of primitive idempotents with fitted exponent lattices.

    The returned elements carry exact rational exponents (from the fit) and
    floating point coefficients (the values at ``T = grid[-1]``, which must
    be 1 for the coefficients to be read off directly).
    """
    if check:
        _require_valid(t)
    if grid[-1] != 1.0:
        raise ValueError("fit grid must end at T = 1")
    tracks, mus, generic = _track(t, grid)
    E1 = tracks[-1]
    res = idempotent_residuals(t, E1, 1.0)
    bad = {k: v for k, v in res.items() if v > 1e-8}
    if bad:
        raise ArithmeticError(f"interpolated idempotents fail checks: {bad}")

    elements, dens, raw = [], [], []
    for a in range(len(E1)):
        slopes = fit_exponents(tracks[:, a, :], grid)
        raw.append(slopes)
        m, exps = lattice_round(slopes, _m_max(t))
        coords = [
            NovikovScalar() if ex is None else NovikovScalar.monomial(complex(E1[a, k]), ex)
            for k, ex in enumerate(exps)
        ]
        elements.append(AlgebraElement(tuple(coords)))
        dens.append(m)
    labels = [f"e{a + 1}" for a in range(len(E1))]
    d = IdempotentDecomposition(
        idempotents=elements,
        labels=labels,
        exponent_denominators=dens,
        c1_eigenvalues=[complex(m) for m in mus],
        numeric=E1,
        residuals=res,
        generic=generic,
        slopes=raw,
    )
    d.coarse_grouping = coarse_grouping(d, t)
    return d


def default_coarse(t: AlgebraTable) -> dict[str, AlgebraElement]:
    if t.kind == "quadric":
        from .quadric import coarse_idempotents

        return coarse_idempotents(t)
    return {t.basis.unit_label: t.unit()}


def coarse_grouping(
    d: IdempotentDecomposition,
    t: AlgebraTable,
    coarse: Mapping[str, AlgebraElement] | None = None,
    T_values=(1.0, 0.7),
    tol: float = 1e-8,
) -> dict[str, str]:
    """Assign each fine idempotent ``e`` to the coarse ``c`` with ``e * c = e``."""
    if coarse is None:
        coarse = default_coarse(t)
    out = {}
    for lab, e in zip(d.labels, d.idempotents):
        hits = []
        for clab, c in coarse.items():
            ok = all(
                np.abs(
                    t.numeric_product(e.evaluate(T), c.evaluate(T), T) - e.evaluate(T)
                ).max()
                <= tol
                for T in T_values
            )
            if ok:
                hits.append(clab)
        if len(hits) != 1:
            raise GroupingError(f"idempotent {lab} lies under {len(hits)} coarse idempotents")
        out[lab] = hits[0]
    return out


def groups(grouping: Mapping[str, str]) -> dict[str, list[str]]:
    inv: dict[str, list[str]] = {}
    for fine, c in grouping.items():
        inv.setdefault(c, []).append(fine)
    return inv
