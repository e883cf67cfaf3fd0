"""Small quantum cohomology of the quadric ``Q^n`` and its closed-form idempotents.

Basis: ``1, h, h2, ..., h{n-1}`` (quantum powers of the hyperplane class),
the middle class ``s`` of degree ``n`` when ``n`` is even, and the point
class ``p``.  With ``T = T^{lambda_0}`` of degree ``2n`` the ring is fixed by

* ``h^n = 2p + 2T``  (classically ``h^n = 2p``),
* ``h * p = T h``, ``p * p = T^2``, hence ``h^{n+1} = 4T h``,
* ``h * s = 0``, ``s * s = 2T - 2p``, ``s * p = -T s``  (even ``n``),
* ``c_1 = n h``.

``n = 1`` is the conic ``Q^1 = CP^1``, which has no lines; there ``lambda_0``
is half the conic class, the basis is ``1, p`` with ``p * p = T^2`` and
``c_1 = h = 2p``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..scalars import ONE, T, NovikovScalar
from .table import AlgebraElement, AlgebraTable, GradedBasis, table_from_products

MAX_N = 6


def _hlabel(k: int) -> str:
    return {0: "1", 1: "h"}.get(k, f"h{k}")


def builtin_quadric_table(n: int) -> AlgebraTable:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"built-in quadric tables cover 1 <= n <= {MAX_N}, got {n}")
    meta = dict(n=n, lam0=2 * np.pi, deg_T=2 * n, kind="quadric")
    if n == 1:
        basis = GradedBasis(("1", "p"), (0, 2), "1")
        return table_from_products(
            "Q1", basis, {("p", "p"): {"1": T(2)}}, {"p": 2}, **meta
        )

    labels = [_hlabel(k) for k in range(n)]
    degrees = [2 * k for k in range(n)]
    if n % 2 == 0:
        labels.append("s")
        degrees.append(n)
    labels.append("p")
    degrees.append(2 * n)
    basis = GradedBasis(tuple(labels), tuple(degrees), "1")

    def h_power(m: int) -> dict[str, NovikovScalar]:
        # h^m as a combination of basis elements, m <= 2n - 2
        if m < n:
            return {_hlabel(m): ONE}
        if m == n:
            return {"p": NovikovScalar.monomial(2), "1": T(1, 2)}
        return {_hlabel(m - n): T(1, 4)}

    products: dict[tuple[str, str], dict[str, NovikovScalar]] = {}
    for a in range(1, n):
        for b in range(a, n):
            products[(_hlabel(a), _hlabel(b))] = h_power(a + b)
        products[(_hlabel(a), "p")] = {_hlabel(a): T(1)}
    products[("p", "p")] = {"1": T(2)}
    if n % 2 == 0:
        products[("s", "s")] = {"1": T(1, 2), "p": NovikovScalar.monomial(-2)}
        products[("s", "p")] = {"s": T(1, -1)}
        for a in range(1, n):
            products[(_hlabel(a), "s")] = {}
    return table_from_products(f"Q{n}", basis, products, {"h": n}, **meta)


def hyperplane_class(t: AlgebraTable) -> AlgebraElement:
    if t.n == 1:
        return t.element({"p": 2})
    return t.basis_element("h")


def coarse_idempotents(t: AlgebraTable) -> dict[str, AlgebraElement]:
    """``e_(+/-) = (1 +/- p t)/2`` with ``t = T^{-lambda_0}``."""
    half = Fraction(1, 2)
    one = t.unit()
    p_over_T = t.element({"p": T(-1)})
    return {"e+": (one + p_over_T).scale(half), "e-": (one - p_over_T).scale(half)}


def fine_minus_idempotents(t: AlgebraTable, prefactor=Fraction(1, 4)) -> dict[str, AlgebraElement]:
    """The two idempotents splitting ``e_-`` for even ``n``.

    ``prefactor * (1 +/- s T^{-1/2} - p T^{-1})``; the correct prefactor is
    1/4.  Passing 1/2 gives the half-prefactor variant, which fails to sum
    to ``e_-``.
    """
    if t.n % 2:
        raise ValueError("the middle class exists only for even n")
    c = NovikovScalar.coerce(prefactor)
    one = t.unit()
    s_term = t.element({"s": T(Fraction(-1, 2))})
    p_term = t.element({"p": T(-1)})
    return {
        "e-1": (one + s_term - p_term).scale(c),
        "e-2": (one - s_term - p_term).scale(c),
    }


def xi_roots(n: int) -> np.ndarray:
    """The ``n`` roots of ``xi^n = 4``, ordered by argument."""
    k = np.arange(n)
    return 4.0 ** (1.0 / n) * np.exp(2j * np.pi * k / n)


def fine_plus_idempotents(t: AlgebraTable) -> dict[str, AlgebraElement]:
    """Closed forms for the ``n`` idempotents splitting ``e_+``.

    On ``e_+`` the relation reads ``h^n = 4T``, so ``h`` acts by
    ``xi T^{1/n}`` on the factor attached to ``xi``, and
    ``e_(+,xi) = (1/n) (e_+ + sum_{k=1}^{n-1} xi^{-k} T^{-k/n} h^k)``.
    Coefficients are floats; exponents stay exact.
    """
    n = t.n
    if n < 2:
        raise ValueError("closed forms implemented for n >= 2")
    e_plus = coarse_idempotents(t)["e+"]
    out = {}
    for i, xi in enumerate(xi_roots(n)):
        acc = e_plus
        for k in range(1, n):
            acc = acc + t.element({_hlabel(k): T(Fraction(-k, n), complex(xi ** (-k)))})
        out[f"e+{i + 1}"] = acc.scale(Fraction(1, n))
    return out
