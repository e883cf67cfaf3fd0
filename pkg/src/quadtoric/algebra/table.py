"""Graded commutative algebras over Novikov scalars given by structure constants."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..scalars import ONE, ZERO, NovikovScalar


@dataclass(frozen=True)
class GradedBasis:
    labels: tuple[str, ...]
    degrees: tuple[int, ...]
    unit_label: str

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if len(self.labels) != len(self.degrees):
            raise ValueError("labels and degrees differ in length")

    def __len__(self):
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @property
    def unit_index(self) -> int:
        return self.labels.index(self.unit_label)


@dataclass(frozen=True)
class AlgebraElement:
    coords: tuple[NovikovScalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(NovikovScalar.coerce(c) for c in self.coords))

    def __len__(self):
        return len(self.coords)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_dims(self, other)
        return AlgebraElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _check_dims(self, other)
        return AlgebraElement(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return AlgebraElement(tuple(-a for a in self.coords))

    def scale(self, c) -> "AlgebraElement":
        c = NovikovScalar.coerce(c)
        return AlgebraElement(tuple(c * a for a in self.coords))

    __rmul__ = scale

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coords)

    def evaluate(self, T_value: float = 1.0) -> np.ndarray:
        return np.array([c.evaluate(T_value) for c in self.coords], dtype=complex)

    def chop(self, tol: float = 1e-12) -> "AlgebraElement":
        return AlgebraElement(tuple(c.chop(tol) for c in self.coords))

    def max_abs_coefficient(self) -> float:
        return max((c.max_abs_coefficient() for c in self.coords), default=0.0)


def _check_dims(x: AlgebraElement, y: AlgebraElement) -> None:
    if len(x) != len(y):
        raise ValueError(f"dimension mismatch: {len(x)} vs {len(y)}")


@dataclass(frozen=True)
class Failure:
    invariant: str
    witness: tuple
    detail: str = ""


@dataclass
class ValidationReport:
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def invariants(self) -> set[str]:
        return {f.invariant for f in self.failures}


@dataclass(frozen=True)
class AlgebraTable:
    """Structure constants ``b_i * b_j = sum_k c[i, j][k] b_k``.

    ``constants`` maps ordered index pairs to coordinate tuples; missing pairs
    are zero.  ``deg_T`` is the cohomological degree of ``T^{lambda_0}``.
    """

    name: str
    basis: GradedBasis
    constants: Mapping[tuple[int, int], tuple[NovikovScalar, ...]]
    c1: tuple[NovikovScalar, ...]
    n: int = 0
    lam0: float = 2 * np.pi
    deg_T: int = 0
    kind: str = "generic"
    validation: "ValidationReport | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "c1", tuple(NovikovScalar.coerce(c) for c in self.c1))
        object.__setattr__(
            self,
            "constants",
            {k: tuple(NovikovScalar.coerce(c) for c in v) for k, v in self.constants.items()},
        )

    @property
    def dim(self) -> int:
        return len(self.basis)

    def product_of_basis(self, i: int, j: int) -> tuple[NovikovScalar, ...]:
        return self.constants.get((i, j), (ZERO,) * self.dim)

    # -- elements --------------------------------------------------------
    def zero(self) -> AlgebraElement:
        return AlgebraElement((ZERO,) * self.dim)

    def unit(self) -> AlgebraElement:
        return self.basis_element(self.basis.unit_label)

    def basis_element(self, label: str) -> AlgebraElement:
        i = self.basis.index(label)
        return AlgebraElement(tuple(ONE if k == i else ZERO for k in range(self.dim)))

    def element(self, coeffs: Mapping[str, object]) -> AlgebraElement:
        out = [ZERO] * self.dim
        for label, c in coeffs.items():
            out[self.basis.index(label)] = NovikovScalar.coerce(c)
        return AlgebraElement(tuple(out))

    def c1_element(self) -> AlgebraElement:
        return AlgebraElement(self.c1)

    def multiply(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError(
                f"dimension mismatch: table has dim {self.dim}, got {len(x)} and {len(y)}"
            )
        out = [ZERO] * self.dim
        for i, xi in enumerate(x.coords):
            if xi.is_zero():
                continue
            for j, yj in enumerate(y.coords):
                if yj.is_zero():
                    continue
                c = self.constants.get((i, j))
                if c is None:
                    continue
                xy = xi * yj
                for k, ck in enumerate(c):
                    if not ck.is_zero():
                        out[k] = out[k] + xy * ck
        return AlgebraElement(tuple(out))

    def power(self, x: AlgebraElement, k: int) -> AlgebraElement:
        out = self.unit()
        for _ in range(k):
            out = self.multiply(out, x)
        return out

    # -- numerics --------------------------------------------------------
    def structure_tensor(self, T_value: float = 1.0) -> np.ndarray:
        """Array ``C[i, j, k]`` of structure constants specialized at ``T_value``."""
        d = self.dim
        C = np.zeros((d, d, d), dtype=complex)
        for (i, j), v in self.constants.items():
            for k, c in enumerate(v):
                if not c.is_zero():
                    C[i, j, k] = c.evaluate(T_value)
        return C

    def mult_matrix(self, x, T_value: float = 1.0) -> np.ndarray:
        """Matrix of ``y -> x * y``; ``x`` is an element or a numeric coordinate vector."""
        if isinstance(x, AlgebraElement):
            x = x.evaluate(T_value)
        C = self.structure_tensor(T_value)
        # column j holds coords of x * b_j
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=complex), C)

    def numeric_product(self, x: np.ndarray, y: np.ndarray, T_value: float = 1.0) -> np.ndarray:
        C = self.structure_tensor(T_value)
        return np.einsum("i,j,ijk->k", x, y, C)


def validate_table(t: AlgebraTable) -> ValidationReport:
    """Check every table invariant; failures are returned, not raised."""
    rep = ValidationReport()
    b = t.basis
    d = t.dim
    if len(set(b.labels)) != len(b.labels):
        rep.failures.append(Failure("unique_labels", tuple(b.labels)))
    if b.unit_label not in b.labels:
        rep.failures.append(Failure("unit_label", (b.unit_label,)))
        return rep
    u = b.unit_index
    if b.degrees[u] != 0:
        rep.failures.append(Failure("unit_degree", (u,), f"degree {b.degrees[u]}"))
    if len(t.c1) != d:
        rep.failures.append(Failure("c1_length", (len(t.c1),)))
    for key, v in t.constants.items():
        if len(v) != d:
            rep.failures.append(Failure("vector_length", key))
            return rep

    for i, j in itertools.combinations_with_replacement(range(d), 2):
        if t.product_of_basis(i, j) != t.product_of_basis(j, i):
            rep.failures.append(Failure("commutativity", (i, j)))

    for i in range(d):
        e_i = tuple(ONE if k == i else ZERO for k in range(d))
        if t.product_of_basis(u, i) != e_i or t.product_of_basis(i, u) != e_i:
            rep.failures.append(Failure("unit", (i,)))

    for (i, j), v in t.constants.items():
        for k, c in enumerate(v):
            for e, _ in c.terms:
                if e < 0:
                    rep.failures.append(Failure("positivity", (i, j, k), f"exponent {e}"))
                if t.deg_T is not None and (
                    b.degrees[i] + b.degrees[j] != b.degrees[k] + t.deg_T * e
                ):
                    rep.failures.append(
                        Failure("grading", (i, j, k), f"exponent {e} lands in degree {b.degrees[k]}")
                    )

    basis = [t.basis_element(label) for label in b.labels]
    for i, j, k in itertools.product(range(d), repeat=3):
        left = t.multiply(t.multiply(basis[i], basis[j]), basis[k])
        right = t.multiply(basis[i], t.multiply(basis[j], basis[k]))
        if left != right and not _numerically_equal(left, right):
            rep.failures.append(Failure("associativity", (i, j, k)))
    return rep


def _numerically_equal(x: AlgebraElement, y: AlgebraElement, tol: float = 1e-12) -> bool:
    diff = x - y
    scale = max(1.0, x.max_abs_coefficient(), y.max_abs_coefficient())
    return diff.max_abs_coefficient() <= tol * scale


def table_from_products(
    name: str,
    basis: GradedBasis,
    products: Mapping[tuple[str, str], Mapping[str, object]],
    c1: Mapping[str, object],
    **meta,
) -> AlgebraTable:
    """Build a table from label-keyed products, filling the unit and symmetry."""
    d = len(basis)
    lab = basis.index
    consts: dict[tuple[int, int], tuple[NovikovScalar, ...]] = {}

    def vec(m: Mapping[str, object]) -> tuple[NovikovScalar, ...]:
        out = [ZERO] * d
        for k, c in m.items():
            out[lab(k)] = out[lab(k)] + NovikovScalar.coerce(c)
        return tuple(out)

    u = basis.unit_label
    for x in basis.labels:
        consts[(lab(u), lab(x))] = vec({x: 1})
        consts[(lab(x), lab(u))] = vec({x: 1})
    for (x, y), m in products.items():
        v = vec(m)
        consts[(lab(x), lab(y))] = v
        consts[(lab(y), lab(x))] = v
    consts = {k: v for k, v in consts.items() if any(not c.is_zero() for c in v)}
    c1_vec = vec(c1)
    return AlgebraTable(name=name, basis=basis, constants=consts, c1=c1_vec, **meta)


def element_close(x: AlgebraElement, y: AlgebraElement, tol: float = 1e-9) -> bool:
    """Coefficientwise comparison for elements with float coefficients."""
    return (x - y).max_abs_coefficient() <= tol
