"""Exact arithmetic foundation: rationals, Bernoulli data, polynomials, truncated series.

Rationals are ``fractions.Fraction`` (always reduced, positive denominator); integer
coefficients are kept as plain ``int`` where possible since Python mixes the two
transparently. Everything here is immutable and safe to share across threads.
"""
from __future__ import annotations

import json
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence, Union

from .errors import ExpWithConstantTerm, InvertAtZero, SeriesTruncationError

Rational = Fraction
Coeff = Union[int, Fraction]


def rational_to_str(x: Coeff) -> str:
    """Serialize a rational as 'p/q' (denominator always shown, e.g. '-7/192')."""
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def rational_from_str(s: str) -> Fraction:
    """Parse 'p/q', a bare integer, or a decimal string into an exact Fraction."""
    return Fraction(s.strip())


# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials (convention B_1 = -1/2, so B_m = B_m(0))
# ---------------------------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]


def bernoulli_number(m: int) -> Fraction:
    """B_m with B_1 = -1/2, via the recurrence sum_{i<=m} C(m+1,i) B_i = 0."""
    if m < 0:
        raise ValueError("Bernoulli index must be >= 0")
    while len(_BERNOULLI) <= m:
        n = len(_BERNOULLI)
        acc = Fraction(0)
        for i in range(n):
            acc += comb(n + 1, i) * _BERNOULLI[i]
        _BERNOULLI.append(-acc / (n + 1))
    return _BERNOULLI[m]


def bernoulli_polynomial(m: int) -> "ZPolynomial":
    """B_m(x) = sum_i C(m,i) B_i x^{m-i}; degree exactly m."""
    if m < 0:
        raise ValueError("Bernoulli index must be >= 0")
    coeffs = [Fraction(0)] * (m + 1)
    for i in range(m + 1):
        coeffs[m - i] = comb(m, i) * bernoulli_number(i)
    return ZPolynomial(coeffs)


# ---------------------------------------------------------------------------
# Polynomials in one variable over Q
# ---------------------------------------------------------------------------

class ZPolynomial:
    """Dense polynomial with rational coefficients, index = degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Coeff] = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Coeff, ...] = tuple(cs)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coefficient(self, d: int) -> Coeff:
        if 0 <= d < len(self.coeffs):
            return self.coeffs[d]
        return Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZPolynomial):
            return NotImplemented
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "ZPolynomial") -> "ZPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return ZPolynomial([self.coefficient(d) + other.coefficient(d) for d in range(n)])

    def __sub__(self, other: "ZPolynomial") -> "ZPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return ZPolynomial([self.coefficient(d) - other.coefficient(d) for d in range(n)])

    def __neg__(self) -> "ZPolynomial":
        return ZPolynomial([-c for c in self.coeffs])

    def __mul__(self, other: "ZPolynomial") -> "ZPolynomial":
        if not self.coeffs or not other.coeffs:
            return ZPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] += a * b
        return ZPolynomial(out)

    def scale(self, c: Coeff) -> "ZPolynomial":
        return ZPolynomial([a * c for a in self.coeffs])

    def compose_affine(self, a: Coeff, b: Coeff) -> "ZPolynomial":
        """p(a*z + b), exact, by Horner over the polynomial ring."""
        res: list[Coeff] = []
        for c in reversed(self.coeffs):
            new = [Fraction(0)] * (len(res) + 1)
            for d, pc in enumerate(res):
                new[d + 1] += pc * a
                new[d] += pc * b
            new[0] += c
            res = new
        return ZPolynomial(res)

    def __call__(self, x: Coeff) -> Fraction:
        """Exact evaluation at a rational point."""
        r = Fraction(0)
        for c in reversed(self.coeffs):
            r = r * x + c
        return r

    def __repr__(self) -> str:
        if not self.coeffs:
            return "ZPolynomial(0)"
        terms = [f"{c}*x^{d}" for d, c in enumerate(self.coeffs) if c != 0]
        return "ZPolynomial(" + " + ".join(terms) + ")"


def polynomial_compose_affine(p: ZPolynomial, a: Coeff, b: Coeff) -> ZPolynomial:
    """Return p(a*z + b) exactly."""
    return p.compose_affine(a, b)


# ---------------------------------------------------------------------------
# Truncated Laurent / power series in q
# ---------------------------------------------------------------------------

class FormalSeries:
    """Truncated Laurent series: known coefficients for exponents <= truncation_order.

    Exponents above the truncation order are *unknown*, never assumed zero; any
    attempt to read one raises ``SeriesTruncationError``. Arithmetic propagates
    the truncation metadata so a result never claims more than it knows.
    """

    __slots__ = ("low", "coeffs", "trunc")

    def __init__(self, low_exponent: int, coefficients: Sequence[Coeff], truncation_order: int):
        cs = list(coefficients)
        # strip leading zeros (raising the low exponent) and trailing zeros
        while cs and cs[0] == 0:
            cs.pop(0)
            low_exponent += 1
        while cs and cs[-1] == 0:
            cs.pop()
        if cs and low_exponent + len(cs) - 1 > truncation_order:
            raise ValueError("coefficients extend beyond the truncation order")
        if not cs:
            low_exponent = 0
        self.low = low_exponent
        self.coeffs: tuple[Coeff, ...] = tuple(cs)
        self.trunc = truncation_order

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, truncation_order: int) -> "FormalSeries":
        return cls(0, (), truncation_order)

    @classmethod
    def one(cls, truncation_order: int) -> "FormalSeries":
        return cls(0, (1,), truncation_order)

    @classmethod
    def monomial(cls, c: Coeff, exponent: int, truncation_order: int) -> "FormalSeries":
        return cls(exponent, (c,), truncation_order)

    @classmethod
    def from_terms(cls, terms: dict[int, Coeff], truncation_order: int) -> "FormalSeries":
        terms = {e: c for e, c in terms.items() if c != 0}
        if not terms:
            return cls.zero(truncation_order)
        lo = min(terms)
        hi = max(terms)
        cs = [terms.get(e, 0) for e in range(lo, hi + 1)]
        return cls(lo, cs, truncation_order)

    # -- inspection ---------------------------------------------------------

    @property
    def low_exponent(self) -> int:
        return self.low

    @property
    def truncation_order(self) -> int:
        return self.trunc

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes (the tail stays unknown)."""
        return not self.coeffs

    def coefficient(self, e: int) -> Coeff:
        if e > self.trunc:
            raise SeriesTruncationError(f"exponent {e} beyond truncation order {self.trunc}")
        if not self.coeffs or e < self.low or e > self.low + len(self.coeffs) - 1:
            return Fraction(0)
        return self.coeffs[e - self.low]

    def items(self) -> Iterable[tuple[int, Coeff]]:
        """Known nonzero (exponent, coefficient) pairs, ascending."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                yield self.low + i, c

    def assert_power_series(self) -> "FormalSeries":
        """Raise if any nonzero coefficient sits at a negative exponent."""
        if self.coeffs and self.low < 0:
            raise ValueError(f"negative-exponent coefficient survives at q^{self.low}")
        return self

    def eq_to_order(self, other: "FormalSeries", order: int) -> bool:
        """Compare all coefficients with exponent <= order (must be known on both sides)."""
        if order > self.trunc or order > other.trunc:
            raise SeriesTruncationError("comparison order beyond a truncation order")
        lo = min(self.low if self.coeffs else order, other.low if other.coeffs else order)
        return all(self.coefficient(e) == other.coefficient(e) for e in range(lo, order + 1))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return (self.low, self.coeffs, self.trunc) == (other.low, other.coeffs, other.trunc)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        terms = ", ".join(f"{e}: {c}" for e, c in self.items())
        return f"FormalSeries({{{terms}}}, O(q^{self.trunc + 1}))"

    # -- arithmetic ---------------------------------------------------------

    def _low_eff(self) -> int:
        # for truncation bookkeeping a zero series acts as O(q^{trunc+1})
        return self.low if self.coeffs else self.trunc + 1

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        t = min(self.trunc, other.trunc)
        terms: dict[int, Coeff] = {}
        for e, c in self.items():
            if e <= t:
                terms[e] = terms.get(e, 0) + c
        for e, c in other.items():
            if e <= t:
                terms[e] = terms.get(e, 0) + c
        return FormalSeries.from_terms(terms, t)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(self.low, [-c for c in self.coeffs], self.trunc)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def scale(self, c: Coeff) -> "FormalSeries":
        if c == 0:
            return FormalSeries.zero(self.trunc)
        return FormalSeries(self.low, [a * c for a in self.coeffs], self.trunc)

    def shift(self, d: int) -> "FormalSeries":
        """Multiply by q^d."""
        return FormalSeries(self.low + d, self.coeffs, self.trunc + d)

    def truncate(self, order: int) -> "FormalSeries":
        if order > self.trunc:
            raise SeriesTruncationError("cannot extend a truncated series")
        if order == self.trunc:
            return self
        cs = [c for i, c in enumerate(self.coeffs) if self.low + i <= order]
        return FormalSeries(self.low, cs, order)

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        t = min(self.trunc + other._low_eff(), other.trunc + self._low_eff())
        if not self.coeffs or not other.coeffs:
            return FormalSeries.zero(t)
        lo = self.low + other.low
        if t < lo:
            return FormalSeries.zero(t)
        out = [0] * (t - lo + 1)
        bc = other.coeffs
        blow = other.low
        for i, ca in enumerate(self.coeffs):
            if ca == 0:
                continue
            ea = self.low + i
            jmax = min(len(bc) - 1, t - ea - blow)
            for j in range(jmax + 1):
                cb = bc[j]
                if cb != 0:
                    out[ea + blow + j - lo] += ca * cb
        return FormalSeries(lo, out, t)

    def invert(self) -> "FormalSeries":
        """Multiplicative inverse; requires a nonzero lowest stored coefficient."""
        if not self.coeffs:
            raise InvertAtZero("cannot invert a series with zero leading coefficient")
        a0 = self.coeffs[0]
        la = self.low
        n_rel = self.trunc - la  # known relative orders 0..n_rel
        unit = isinstance(a0, int) and abs(a0) == 1
        out: list[Coeff] = [a0 if unit else Fraction(1) / a0]
        for t in range(1, n_rel + 1):
            acc = 0
            imax = min(t, len(self.coeffs) - 1)
            for i in range(1, imax + 1):
                ai = self.coeffs[i]
                if ai != 0:
                    acc += ai * out[t - i]
            if acc == 0:
                out.append(0)
            elif unit:
                out.append(-acc if a0 == 1 else acc)
            else:
                out.append(-Fraction(acc) / a0)
        return FormalSeries(-la, out, n_rel - la)

    def exp(self) -> "FormalSeries":
        """Series exponential; operand must have low_exponent >= 1."""
        if self.coeffs and self.low < 1:
            raise ExpWithConstantTerm("exp requires a series with no constant term")
        t = self.trunc
        if t < 0:
            return FormalSeries.zero(t)
        out: list[Coeff] = [1] + [0] * t
        a = [0] * (t + 1)
        for e, c in self.items():
            if e <= t:
                a[e] = c
        for n in range(1, t + 1):
            acc = 0
            for i in range(1, n + 1):
                if a[i] != 0:
                    acc += i * a[i] * out[n - i]
            out[n] = Fraction(acc, n) if acc != 0 else 0
        return FormalSeries(0, out, t)

    def pow_int(self, n: int) -> "FormalSeries":
        if n < 0:
            return self.invert().pow_int(-n)
        if n == 0:
            return FormalSeries.one(self.trunc)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- serialization ------------------------------------------------------

    def to_pairs(self) -> list[tuple[int, str]]:
        """JSON-friendly [(exponent, 'p/q'), ...] for the known nonzero terms."""
        return [(e, rational_to_str(c)) for e, c in self.items()]

    def to_json(self) -> str:
        return json.dumps(self.to_pairs())

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, str]], truncation_order: int) -> "FormalSeries":
        terms = {int(e): rational_from_str(s) for e, s in pairs}
        return cls.from_terms(terms, truncation_order)


def series_arith(a: FormalSeries, b: FormalSeries | None, op: str) -> FormalSeries:
    """Dispatch helper: op in {'add', 'mul', 'invert', 'exp'}."""
    if op == "add":
        assert b is not None
        return a + b
    if op == "mul":
        assert b is not None
        return a * b
    if op == "invert":
        return a.invert()
    if op == "exp":
        return a.exp()
    raise ValueError(f"unknown series operation {op!r}")
