import warnings
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from quadtoric.algebra import (
    ExponentFitError,
    GradedBasis,
    InvalidTableError,
    NotSemisimpleError,
    TableParseError,
    TableValidationWarning,
    builtin_quadric_table,
    c1_spectrum,
    coarse_grouping,
    coarse_idempotents,
    count_field_factors,
    exponent_denominator,
    fine_minus_idempotents,
    fine_plus_idempotents,
    groups,
    ingest_table,
    is_semisimple,
    lattice_round,
    parse_table,
    primitive_idempotents,
    radical_dimension,
    table_from_products,
    table_to_text,
    validate_table,
    xi_roots,
)
from quadtoric.scalars import T


def s2xs2_oracle():
    """QH(S^2 x S^2) = C[a, b]/(a^2 = T, b^2 = T), built independently."""
    basis = GradedBasis(("1", "a", "b", "ab"), (0, 2, 2, 4), "1")
    products = {
        ("a", "a"): {"1": T(1)},
        ("b", "b"): {"1": T(1)},
        ("a", "b"): {"ab": 1},
        ("a", "ab"): {"b": T(1)},
        ("b", "ab"): {"a": T(1)},
        ("ab", "ab"): {"1": T(2)},
    }
    return table_from_products("S2xS2", basis, products, {"a": 2, "b": 2}, n=2, deg_T=4)


def test_q2_matches_product_of_spheres():
    q, o = builtin_quadric_table(2), s2xs2_oracle()
    # h = a + b, s = a - b, p = ab
    M = {"1": o.element({"1": 1}), "h": o.element({"a": 1, "b": 1}), "s": o.element({"a": 1, "b": -1}), "p": o.element({"ab": 1})}

    def to_oracle(x):
        acc = o.zero()
        for lab, c in zip(q.basis.labels, x.coords):
            acc = acc + M[lab].scale(c)
        return acc

    for x in q.basis.labels:
        for y in q.basis.labels:
            lhs = to_oracle(q.multiply(q.basis_element(x), q.basis_element(y)))
            rhs = o.multiply(M[x], M[y])
            assert (lhs - rhs).is_zero(), (x, y)


@pytest.mark.parametrize("n", range(1, 7))
def test_builtin_tables_valid(n):
    t = builtin_quadric_table(n)
    assert validate_table(t).ok
    expected = 2 if n == 1 else n + 1 + (n % 2 == 0)
    assert t.dim == expected


@pytest.mark.parametrize("n", range(2, 7))
def test_quantum_relations(n):
    t = builtin_quadric_table(n)
    h, p = t.basis_element("h"), t.basis_element("p")
    # h^{n+1} = 4 T h and p * p = T^2
    assert (t.power(h, n + 1) - h.scale(T(1, 4))).is_zero()
    assert (t.multiply(p, p) - t.unit().scale(T(2))).is_zero()


@pytest.mark.parametrize("n", range(1, 7))
def test_coarse_idempotents_exact(n):
    t = builtin_quadric_table(n)
    e = coarse_idempotents(t)
    assert (t.multiply(e["e+"], e["e+"]) - e["e+"]).is_zero()
    assert t.multiply(e["e+"], e["e-"]).is_zero()
    assert (e["e+"] + e["e-"] - t.unit()).is_zero()


@pytest.mark.parametrize("n", [2, 4, 6])
def test_fine_minus_quarter_prefactor(n):
    t = builtin_quadric_table(n)
    em = coarse_idempotents(t)["e-"]
    f = fine_minus_idempotents(t)
    assert (f["e-1"] + f["e-2"] - em).is_zero()
    assert t.multiply(f["e-1"], f["e-2"]).is_zero()
    for e in f.values():
        assert (t.multiply(e, e) - e).is_zero()


@pytest.mark.parametrize("n", [2, 4, 6])
def test_half_prefactor_regression(n):
    t = builtin_quadric_table(n)
    f = fine_minus_idempotents(t, prefactor=Fraction(1, 2))
    assert not (f["e-1"] + f["e-2"] - coarse_idempotents(t)["e-"]).is_zero()
    assert not (t.multiply(f["e-1"], f["e-1"]) - f["e-1"]).is_zero()


def test_fine_minus_needs_even_n():
    with pytest.raises(ValueError):
        fine_minus_idempotents(builtin_quadric_table(3))


@pytest.mark.parametrize("n", range(2, 7))
def test_c1_spectrum(n):
    eig = c1_spectrum(builtin_quadric_table(n))
    zeros = 2 if n % 2 == 0 else 1
    expected = np.concatenate([n * xi_roots(n), np.zeros(zeros)])
    cost = np.abs(eig[:, None] - expected[None, :])
    r, c = linear_sum_assignment(cost)
    assert cost[r, c].max() < 1e-9


def test_q2_spectrum_frozen():
    # S^2 x S^2: c1 = 2(a + b) has eigenvalues 2(+-1 +- 1)
    eig = sorted(c1_spectrum(builtin_quadric_table(2)).real)
    assert eig == pytest.approx([-4, 0, 0, 4], abs=1e-12)


def test_q1_is_cp1():
    eig = sorted(c1_spectrum(builtin_quadric_table(1)).real)
    assert eig == pytest.approx([-2, 2])


@pytest.mark.parametrize("n", range(1, 7))
def test_primitive_idempotents(n):
    t = builtin_quadric_table(n)
    d = primitive_idempotents(t)
    assert len(d) == t.dim
    assert max(d.residuals.values()) < 1e-10
    g = groups(d.coarse_grouping)
    if n > 1:
        assert len(g["e+"]) == n
        assert len(g["e-"]) == (2 if n % 2 == 0 else 1)
        want = {"e+": n, "e-": 2 if n % 2 == 0 else 1}
        for lab, m in zip(d.labels, d.exponent_denominators):
            assert m == want[d.coarse_grouping[lab]]
    assert d.slope_deviation() < 1e-8


@pytest.mark.parametrize("n", range(2, 7))
def test_primitive_matches_closed_forms(n):
    t = builtin_quadric_table(n)
    d = primitive_idempotents(t)
    closed = list(fine_plus_idempotents(t).values())
    if n % 2 == 0:
        closed += list(fine_minus_idempotents(t).values())
    else:
        closed.append(coarse_idempotents(t)["e-"])
    for T_val in (1.0, 0.6):
        A = np.array([e.evaluate(T_val) for e in d.idempotents])
        B = np.array([e.evaluate(T_val) for e in closed])
        dist = np.linalg.norm(A[:, None] - B[None, :], axis=2)
        assert dist.min(axis=1).max() < 1e-9


def test_coarse_denominators():
    t = builtin_quadric_table(4)
    for e in coarse_idempotents(t).values():
        assert exponent_denominator(e, t) == 1
        assert exponent_denominator(e.evaluate, t) == 1


def test_lattice_round():
    m, r = lattice_round([0.5, -0.25, None, 0.0], 8)
    assert m == 4 and r == [Fraction(1, 2), Fraction(-1, 4), None, 0]
    # a flat 0.05 window would put -1/6 on the 1/5 lattice; the tightened one does not
    m, _ = lattice_round([-1 / 6 + 0.003], 12)
    assert m == 6
    with pytest.raises(ExponentFitError):
        lattice_round([0.123456], 4)


def nilpotent_table():
    b = GradedBasis(("1", "x"), (0, 2), "1")
    return table_from_products("dual", b, {("x", "x"): {}}, {"x": 1}, n=1, deg_T=2)


def test_non_semisimple_detected():
    t = nilpotent_table()
    assert radical_dimension(t) == 1 and not is_semisimple(t)
    with pytest.raises(NotSemisimpleError) as exc:
        primitive_idempotents(t)
    assert exc.value.radical_dim == 1


def broken_table():
    b = GradedBasis(("1", "x", "y"), (0, 2, 2), "1")
    products = {("x", "x"): {"y": 1}, ("x", "y"): {"1": 1}, ("y", "y"): {"y": 1}}
    return table_from_products("bad", b, products, {"x": 1}, n=1, deg_T=2)


def test_validation_names_invariants():
    rep = validate_table(broken_table())
    assert {"associativity", "grading"} <= rep.invariants()
    with pytest.raises(InvalidTableError):
        primitive_idempotents(broken_table())


def test_semisimple_count_on_generic_table():
    # C[x]/(x^3 - T^3): three field factors
    b = GradedBasis(("1", "x", "x2"), (0, 2, 4), "1")
    prods = {("x", "x"): {"x2": 1}, ("x", "x2"): {"1": T(3)}, ("x2", "x2"): {"x": T(3)}}
    t = table_from_products("cubic", b, prods, {"x": 3}, n=1, deg_T=2)
    assert validate_table(t).ok and count_field_factors(t) == 3
    d = primitive_idempotents(t)
    assert d.exponent_denominators == [1, 1, 1]
    assert set(d.coarse_grouping.values()) == {"1"}
    assert coarse_grouping(d, t, {"all": t.unit()}) == {lab: "all" for lab in d.labels}


@pytest.mark.parametrize("n", range(1, 7))
def test_table_roundtrip(n):
    t = builtin_quadric_table(n)
    assert parse_table(table_to_text(t)) == t


def test_parse_errors_carry_line_numbers():
    txt = table_to_text(builtin_quadric_table(2))
    with pytest.raises(TableParseError, match="line 19: unknown basis label 'q'"):
        parse_table(txt.replace("h h -> p :", "h h -> q :"))
    with pytest.raises(TableParseError, match="line 4"):
        parse_table(txt.replace("deg_T: 4", "deg_T: four"))
    with pytest.raises(TableParseError, match="unknown header key"):
        parse_table("colour: red\n" + txt)


def test_ingest_warns_and_attaches(tmp_path):
    path = tmp_path / "bad.qh"
    path.write_text(table_to_text(broken_table()))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        t = ingest_table(path)
    assert any(issubclass(x.category, TableValidationWarning) for x in w)
    assert t.validation is not None and not t.validation.ok
    good = ingest_table(table_to_text(builtin_quadric_table(3)))
    assert good.validation.ok and good.kind == "quadric"
