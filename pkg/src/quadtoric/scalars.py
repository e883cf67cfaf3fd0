"""Finite Novikov sums ``sum_j a_j T^{l_j}`` with exact rational exponents.

Exponents are stored as :class:`fractions.Fraction` in units of the minimal
sphere energy ``lambda_0``; ``T^{1}`` therefore stands for ``T^{lambda_0}``.
A scalar is Laurent exactly when every exponent is an integer.

Quantum products carry nonnegative exponents ("positive energy").  The
Laurent variable ``t`` of the classical idempotent formulas is ``T^{-1}`` in
this convention; :func:`format_scalar` renders either reading.

Coefficients can be any Python number (int, Fraction, float, complex).  With
int/Fraction coefficients all arithmetic is exact.
"""

from __future__ import annotations

import numbers
from fractions import Fraction
from typing import Iterable

DEFAULT_CUTOFF = Fraction(10)


def _as_exponent(e) -> Fraction:
    if isinstance(e, Fraction):
        return e
    if isinstance(e, bool):
        raise TypeError("boolean exponent")
    if isinstance(e, numbers.Integral):
        return Fraction(int(e))
    if isinstance(e, float):
        return Fraction(e)
    if isinstance(e, str):
        return Fraction(e)
    raise TypeError(f"unsupported exponent type {type(e).__name__}")


def _is_zero(c) -> bool:
    return c == 0


class NovikovScalar:
    """Immutable canonical finite sum of monomials ``c * T^e``.

    ``terms`` is a tuple of ``(exponent, coefficient)`` pairs with strictly
    increasing exponents and no zero coefficient.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable = ()):
        acc: dict[Fraction, object] = {}
        for e, c in terms:
            e = _as_exponent(e)
            acc[e] = acc[e] + c if e in acc else c
        object.__setattr__(
            self, "terms", tuple((e, acc[e]) for e in sorted(acc) if not _is_zero(acc[e]))
        )

    def __setattr__(self, name, value):
        raise AttributeError("NovikovScalar is immutable")

    @classmethod
    def monomial(cls, coeff=1, exponent=0) -> "NovikovScalar":
        return cls([(exponent, coeff)])

    @classmethod
    def coerce(cls, x) -> "NovikovScalar":
        if isinstance(x, NovikovScalar):
            return x
        if isinstance(x, numbers.Number):
            return cls([(0, x)])
        raise TypeError(f"cannot coerce {type(x).__name__} to NovikovScalar")

    # -- structure -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(e for e, _ in self.terms)

    def coefficient(self, exponent) -> object:
        e = _as_exponent(exponent)
        for ee, c in self.terms:
            if ee == e:
                return c
        return 0

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return self.is_zero() or (len(self.terms) == 1 and self.terms[0][0] == 0)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        try:
            other = NovikovScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return NovikovScalar(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return NovikovScalar((e, -c) for e, c in self.terms)

    def __sub__(self, other):
        try:
            other = NovikovScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return NovikovScalar.coerce(other) - self

    def __mul__(self, other):
        try:
            other = NovikovScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return NovikovScalar(
            (e1 + e2, c1 * c2) for e1, c1 in self.terms for e2, c2 in other.terms
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, NovikovScalar):
            if other.is_monomial():
                (e, c), = other.terms
                return self * NovikovScalar.monomial(_reciprocal(c), -e)
            return self * nov_inverse(other)
        if isinstance(other, numbers.Number):
            return self * _reciprocal(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, numbers.Integral):
            raise TypeError("integer powers only")
        if k < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial; use nov_inverse")
            (e, c), = self.terms
            return NovikovScalar.monomial(_reciprocal(c) ** (-k), e * k)
        out = NovikovScalar.monomial(1, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, numbers.Number):
            other = NovikovScalar.coerce(other)
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"NovikovScalar({format_scalar(self)})"

    # -- numerics --------------------------------------------------------
    def evaluate(self, T_value: float) -> complex:
        """Specialize ``T^{lambda_0} -> T_value`` (``T_value > 0``)."""
        return complex(sum(complex(c) * T_value ** float(e) for e, c in self.terms))

    def chop(self, tol: float = 1e-12) -> "NovikovScalar":
        """Drop terms with ``|coefficient| <= tol`` (numeric cleanup only)."""
        return NovikovScalar((e, c) for e, c in self.terms if abs(c) > tol)

    def max_abs_coefficient(self) -> float:
        return max((abs(c) for _, c in self.terms), default=0.0)


def _reciprocal(c):
    if isinstance(c, numbers.Rational):
        return Fraction(1) / Fraction(c)
    return 1 / c


ZERO = NovikovScalar()
ONE = NovikovScalar.monomial(1, 0)


def T(exponent=1, coeff=1) -> NovikovScalar:
    """The monomial ``coeff * T^{exponent * lambda_0}``."""
    return NovikovScalar.monomial(coeff, exponent)


def nov_add(a: NovikovScalar, b: NovikovScalar) -> NovikovScalar:
    return a + b


def nov_mul(a: NovikovScalar, b: NovikovScalar) -> NovikovScalar:
    return a * b


def valuation(a: NovikovScalar) -> Fraction:
    """Smallest exponent carrying a nonzero coefficient."""
    if a.is_zero():
        raise ValueError("valuation of zero is undefined")
    return a.terms[0][0]


def nov_inverse(a: NovikovScalar, cutoff=DEFAULT_CUTOFF) -> NovikovScalar:
    """Truncated inverse of a nonzero scalar.

    Writes ``a = c T^v (1 + u)`` with ``valuation(u) > 0`` and sums the
    geometric series.  Result exponents are kept up to ``-v + cutoff``, so
    ``a * result - 1`` has valuation strictly greater than ``cutoff``.
    """
    if a.is_zero():
        raise ZeroDivisionError("inverse of zero Novikov scalar")
    cutoff = _as_exponent(cutoff)
    v, c0 = a.terms[0]
    lead_inv = NovikovScalar.monomial(_reciprocal(c0), -v)
    u = a * lead_inv - ONE
    if u.is_zero():
        return lead_inv

    def trunc(x: NovikovScalar) -> NovikovScalar:
        return NovikovScalar((e, c) for e, c in x.terms if e <= cutoff)

    neg_u = -u
    series = ONE
    power = ONE
    while True:
        power = trunc(power * neg_u)
        if power.is_zero():
            break
        series = series + power
    return NovikovScalar((e, c) for e, c in (series * lead_inv).terms if e <= cutoff - v)


def rescale_exponents(a: NovikovScalar, factor) -> NovikovScalar:
    """Multiply every exponent by ``factor`` (``t -> T^{lambda_0}`` is factor lambda_0)."""
    f = _as_exponent(factor)
    if f == 0:
        raise ValueError("rescale factor must be nonzero")
    return NovikovScalar((e * f, c) for e, c in a.terms)


def is_laurent(a: NovikovScalar, unit=1) -> bool:
    """True when every exponent lies in ``unit * Z``."""
    u = _as_exponent(unit)
    return all((e / u).denominator == 1 for e, _ in a.terms)


def exponent_denominator_of(a: NovikovScalar) -> int:
    """Least ``m >= 1`` with all exponents in ``(1/m) Z``."""
    m = 1
    for e, _ in a.terms:
        m = _lcm(m, e.denominator)
    return m


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a * b // gcd(a, b)


# -- text form ---------------------------------------------------------------

def _fmt_real(x) -> str:
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, numbers.Integral):
        return str(int(x))
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def _fmt_coeff(c) -> str:
    if isinstance(c, complex):
        return f"{repr(c.real)},{repr(c.imag)}"
    return f"{_fmt_real(c)},0"


def _parse_real(tok: str):
    tok = tok.strip()
    if "/" in tok:
        return Fraction(tok)
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def scalar_to_text(a: NovikovScalar) -> str:
    """Serialize as ``re,im @ num/den`` terms joined by ``' ; '``; zero is ``0``."""
    if a.is_zero():
        return "0"
    return " ; ".join(
        f"{_fmt_coeff(c)} @ {e.numerator}/{e.denominator}" for e, c in a.terms
    )


def scalar_from_text(s: str) -> NovikovScalar:
    s = s.strip()
    if s == "0":
        return ZERO
    terms = []
    for part in s.split(";"):
        try:
            coeff_s, exp_s = part.split("@")
            re_s, im_s = coeff_s.split(",")
            re_v, im_v = _parse_real(re_s), _parse_real(im_s)
            e = Fraction(exp_s.strip())
        except ValueError as exc:
            raise ValueError(f"malformed scalar term {part.strip()!r}") from exc
        if im_s.strip() in ("0", "0/1") and not isinstance(im_v, float):
            c = re_v
        else:
            c = complex(float(re_v), float(im_v))
        terms.append((e, c))
    return NovikovScalar(terms)


def scalars_to_text(values: Iterable[NovikovScalar]) -> str:
    return "\n".join(scalar_to_text(v) for v in values) + "\n"


def scalars_from_text(text: str) -> list[NovikovScalar]:
    return [scalar_from_text(line) for line in text.splitlines() if line.strip()]


def format_scalar(a: NovikovScalar, convention: str = "T") -> str:
    """Human-readable form; ``convention='t'`` shows ``T^{k lambda_0}`` as ``t^{-k}``."""
    if a.is_zero():
        return "0"
    var = {"T": "T", "t": "t"}[convention]
    parts = []
    for e, c in a.terms:
        shown = e if convention == "T" else -e
        if shown == 0:
            parts.append(f"{c}")
        else:
            ex = f"{shown.numerator}" if shown.denominator == 1 else f"{shown.numerator}/{shown.denominator}"
            parts.append(f"{c}*{var}^({ex})")
    return " + ".join(parts)
