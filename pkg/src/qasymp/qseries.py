"""Exact q-series: Pochhammer products, Jacobi theta, Andrews' theta-sum formula
for the no-k-consecutive-parts generating function, the DP partition oracle,
Euler's identities and the third-order mock theta function chi.

Everything returns a FormalSeries with exact integer/rational coefficients; the
truncation metadata guarantees no coefficient below the requested order is lost,
even though several building blocks are genuine Laurent series.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidK
from .exactcore import FormalSeries


# ---------------------------------------------------------------------------
# products of binomials (1 + eps * q^e)
# ---------------------------------------------------------------------------

def _mul_binomial(cur: dict[int, int], eps: int, e: int, cap: int) -> dict[int, int]:
    """cur * (1 + eps*q^e), keeping exponents <= cap only."""
    new: dict[int, int] = {}
    for x, c in cur.items():
        if x <= cap:
            v = new.get(x, 0) + c
            if v:
                new[x] = v
            elif x in new:
                del new[x]
        xe = x + e
        if xe <= cap:
            v = new.get(xe, 0) + eps * c
            if v:
                new[xe] = v
            elif xe in new:
                del new[xe]
    return new


def _binomial_product(factors, order: int) -> FormalSeries:
    """Exact truncated product of (1 + eps*q^e) factors; exponents may be negative.

    Negative-exponent factors are multiplied first; while any remain pending, the
    working window keeps exponents up to order - (sum of pending negative
    exponents), which is exactly what later factors can still pull back below
    the target order.
    """
    const = 1
    neg = []
    pos = []
    for eps, e in factors:
        if e == 0:
            const *= 1 + eps
            if const == 0:
                return FormalSeries.zero(order)
        elif e < 0:
            neg.append((eps, e))
        else:
            pos.append((eps, e))
    neg.sort(key=lambda t: t[1])
    s_neg = sum(e for _, e in neg)
    pos = sorted((f for f in pos if f[1] <= order - s_neg), key=lambda t: t[1])

    cur: dict[int, int] = {0: const}
    pending = s_neg
    for eps, e in neg:
        pending -= e
        cur = _mul_binomial(cur, eps, e, order - pending)
    for eps, e in pos:
        cur = _mul_binomial(cur, eps, e, order)
    return FormalSeries.from_terms(cur, order)


@dataclass(frozen=True)
class QExponentProduct:
    """The product prod_{m>=0} (1 - q^{a + m b}) with its truncation order.

    Only finitely many factors have exponent at or below the truncation order,
    so the truncated expansion is finite and exact.
    """

    a: int
    b: int
    truncation_order: int

    def __post_init__(self):
        if self.b < 1:
            raise ValueError("pochhammer base step b must be >= 1")

    def expand(self) -> FormalSeries:
        return pochhammer_series(self.a, self.b, self.truncation_order)


def pochhammer_series(a: int, b: int, order: int) -> FormalSeries:
    """(q^a; q^b)_infinity = prod_{m>=0} (1 - q^{a+mb}), exact to the given order.

    Contains the factor (1 - q^0) = 0 exactly when a <= 0 and b | a, in which
    case the zero series is returned.
    """
    if b < 1:
        raise ValueError("pochhammer base step b must be >= 1")
    if a <= 0 and a % b == 0:
        return FormalSeries.zero(order)
    factors = []
    s_neg = 0
    m = 0
    while True:
        e = a + m * b
        if e >= 0:
            break
        factors.append((-1, e))
        s_neg += e
        m += 1
    while True:
        e = a + m * b
        if e > order - s_neg:
            break
        factors.append((-1, e))
        m += 1
    return _binomial_product(factors, order)


def finite_pochhammer_series(a: int, b: int, n: int, order: int) -> FormalSeries:
    """(q^a; q^b)_n = prod_{m=0}^{n-1} (1 - q^{a+mb})."""
    if b < 1 or n < 0:
        raise ValueError("need b >= 1 and n >= 0")
    return _binomial_product([(-1, a + m * b) for m in range(n)], order)


# ---------------------------------------------------------------------------
# theta
# ---------------------------------------------------------------------------

def theta_series(m: int, t: int, order: int) -> FormalSeries:
    """theta(q^m, q^t) = sum_{n in Z} (-1)^n q^{mn + t n^2}, truncated exactly."""
    if t < 1:
        raise ValueError("theta base exponent t must be >= 1")
    terms: dict[int, int] = {}
    # exponent mn + tn^2 <= order defines a finite n-window around -m/(2t)
    n = 0
    while True:
        e = m * n + t * n * n
        if e > order and 2 * t * n > -m:
            break
        if e <= order:
            terms[e] = terms.get(e, 0) + (1 if n % 2 == 0 else -1)
        n += 1
    n = -1
    while True:
        e = m * n + t * n * n
        if e > order and 2 * t * n < -m:
            break
        if e <= order:
            terms[e] = terms.get(e, 0) + (1 if n % 2 == 0 else -1)
        n -= 1
    return FormalSeries.from_terms(terms, order)


def theta_product_check(m: int, t: int, order: int) -> bool:
    """Verify the triple-product factorization of theta(q^m, q^t) to the given order.

    The factor families per n >= 1 are (1-q^{2tn}), (1-q^{m+t(2n-1)}) and
    (1-q^{-m+t(2n-1)}); only finitely many exponents are negative.
    """
    lhs = theta_series(m, t, order)
    neg_sum = 0
    n = 1
    while True:
        e2 = m + t * (2 * n - 1)
        e3 = -m + t * (2 * n - 1)
        if e2 >= 0 and e3 >= 0:
            break
        neg_sum += min(e2, 0) + min(e3, 0)
        n += 1
    cap = order - neg_sum
    exps = []
    n = 1
    while True:
        e1 = 2 * t * n
        e2 = m + t * (2 * n - 1)
        e3 = -m + t * (2 * n - 1)
        if min(e1, e2, e3) > cap:
            break
        for e in (e1, e2, e3):
            if e <= cap:
                exps.append((-1, e))
        n += 1
    rhs = _binomial_product(exps, order)
    return lhs.eq_to_order(rhs, order)


# ---------------------------------------------------------------------------
# Andrews' theta-sum formula for g_k and the partition oracle
# ---------------------------------------------------------------------------

def _poch_neg_sum(k: int, m: int) -> int:
    """Sum of the negative exponents of (q^{k+1-km}; q^{k+1})_infinity."""
    s = 0
    j = 0
    while True:
        e = k + 1 - k * m + j * (k + 1)
        if e >= 0:
            return s
        s += e
        j += 1


def _theta_min_exp(k: int, m: int) -> int:
    """Exact minimal exponent of theta(q^{km}, q^{k(k+1)/2})."""
    t = k * (k + 1) // 2
    best = 0
    n0 = int(round(-m / (k + 1)))
    for n in range(n0 - 2, n0 + 3):
        best = min(best, k * m * n + t * n * n)
    return best


def gk_series_andrews(k: int, order: int) -> FormalSeries:
    """g_k(q) via the theta-sum representation, exact to the given order.

    The m-sum stops once the summand's exact minimal exponent
    km(m+1)/2 + (negative part of the Pochhammer factor) + (theta minimum)
    exceeds the order; each factor is expanded just far enough that the
    truncation algebra certifies the product to the requested order.
    """
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if order < 0:
        raise ValueError("order must be >= 0")
    t_base = k * (k + 1) // 2
    invf: list = [1] + [0] * order  # inverse of (q^k;q^k)_m, maintained to full order
    total = FormalSeries.zero(order)
    m = 0
    misses = 0
    while misses < 3:
        if m > 0:
            e = k * m
            if e <= order:
                for x in range(e, order + 1):
                    invf[x] += invf[x - e]
        if m > 0 and m % (k + 1) == 0:
            # (q^{k+1-km}; q^{k+1})_infinity contains the factor 1 - q^0
            m += 1
            continue
        cp = k * m * (m + 1) // 2
        s_neg = _poch_neg_sum(k, m)
        th_min = _theta_min_exp(k, m)
        min_exp = cp + s_neg + th_min
        if min_exp < 0:
            raise RuntimeError(f"negative minimal exponent {min_exp} at k={k}, m={m}")
        if min_exp > order:
            misses += 1
            m += 1
            continue
        misses = 0
        lp = order - cp - th_min
        lth = order - cp - s_neg
        li = order - cp - s_neg - th_min
        p_ser = pochhammer_series(k + 1 - k * m, k + 1, lp)
        th_ser = theta_series(k * m, t_base, lth)
        inv_ser = FormalSeries(0, invf[: li + 1], li)
        term = (p_ser * th_ser * inv_ser).shift(cp)
        if m % 2:
            term = -term
        total = total + term
        m += 1
    g = total * pochhammer_series(k, k, order).invert()
    if g.low_exponent < 0 or g.coefficient(0) != 1:
        raise RuntimeError(f"g_{k} expansion failed consistency check: low={g.low_exponent}")
    return g


def Gk_series_oracle(k: int, order: int) -> FormalSeries:
    """Generating function for partitions with no k consecutive part sizes.

    Dynamic programming over part sizes 1..order; the state is the run length
    of consecutively used sizes (0..k-1). Independent of the theta-sum formula.
    """
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if order < 0:
        raise ValueError("order must be >= 0")
    n = order
    f = [[0] * (n + 1) for _ in range(k)]
    f[0][0] = 1
    for size in range(1, n + 1):
        tot = [0] * (n + 1)
        for r in range(k):
            row = f[r]
            for x in range(n + 1):
                tot[x] += row[x]
        new = [tot]
        for r in range(1, k):
            prev = f[r - 1]
            h = [0] * (n + 1)
            for x in range(size, n + 1):
                h[x] = prev[x - size] + h[x - size]
            new.append(h)
        f = new
    out = [0] * (n + 1)
    for r in range(k):
        for x in range(n + 1):
            out[x] += f[r][x]
    return FormalSeries(0, out, order)


def gk_from_oracle(k: int, order: int) -> FormalSeries:
    """g_k = G_k * (q;q)_infinity, with G_k from the DP oracle."""
    return Gk_series_oracle(k, order) * pochhammer_series(1, 1, order)


# ---------------------------------------------------------------------------
# chi and g_2's product side
# ---------------------------------------------------------------------------

def chi_series(order: int) -> FormalSeries:
    """Ramanujan's third-order mock theta function
    chi(q) = 1 + sum_{n>=1} q^{n^2} / prod_{j<=n} (1 - q^j + q^{2j})."""
    if order < 0:
        raise ValueError("order must be >= 0")
    total = FormalSeries.one(order)
    den = [0] * (order + 1)
    den[0] = 1
    n = 1
    while n * n <= order:
        new = [0] * (order + 1)
        for x in range(order + 1):
            c = den[x]
            if c:
                new[x] += c
                if x + n <= order:
                    new[x + n] -= c
                if x + 2 * n <= order:
                    new[x + 2 * n] += c
        den = new
        term = FormalSeries(0, den, order).invert().shift(n * n)
        total = total + term
        n += 1
    return total


def g2_product_side(order: int) -> FormalSeries:
    """Product side of Andrews' mock theta identity for g_2:

        g_2(q) = chi(q) * prod_{n>=1} (1+q^{3n}) (1-q^n) / (1-q^{2n})
               = chi(q) * prod_{n>=1} (1+q^{3n}) / (1+q^n).

    Cross-checked against the theta-sum route, the DP oracle and the
    transfer-matrix probability model; equals chi * prod_{gcd(n,6)=1}(1-q^n).
    """
    plus = _binomial_product([(1, 3 * n) for n in range(1, order // 3 + 1)], order)
    ratio = pochhammer_series(1, 1, order) * pochhammer_series(2, 2, order).invert()
    return chi_series(order) * plus * ratio


def g2_product_side_as_printed(order: int) -> FormalSeries:
    """The g_2 product exactly as displayed in the source identity,
    chi(q) * prod (1+q^{3n}) / ((1-q^n)(1-q^{2n})).

    Kept for the record: this form differs from g_2 already at q^1 (and blows up
    like exp(+5 pi^2/(18 s)) as q -> 1, so it cannot equal g_2); the display has
    (1-q^n) on the wrong side of the fraction bar. See g2_product_side.
    """
    plus = _binomial_product([(1, 3 * n) for n in range(1, order // 3 + 1)], order)
    den = pochhammer_series(1, 1, order) * pochhammer_series(2, 2, order)
    return chi_series(order) * plus * den.invert()


# ---------------------------------------------------------------------------
# Euler's identities as two-variable truncated series
# ---------------------------------------------------------------------------

def _z_poly_mul(a: list[FormalSeries], b: list[FormalSeries], zmax: int, order: int):
    out = [FormalSeries.zero(order) for _ in range(zmax + 1)]
    for i, ai in enumerate(a):
        if i > zmax:
            break
        for j, bj in enumerate(b):
            if i + j > zmax:
                break
            out[i + j] = out[i + j] + ai * bj
    return out


def euler_identity_check(order: int) -> bool:
    """Check both Euler identities for (z;q)_infinity as bivariate truncated series,
    with z-degree and q-order both capped at the given order."""
    if order < 0:
        raise ValueError("order must be >= 0")
    d = order
    # A = (z;q)_infinity = prod_{m=0..d} (1 - z q^m): z-degrees beyond d are dropped
    a = [FormalSeries.one(d)] + [FormalSeries.zero(d) for _ in range(d)]
    for m in range(d + 1):
        mono = FormalSeries.monomial(1, m, d)
        for deg in range(d, 0, -1):
            a[deg] = a[deg] - mono * a[deg - 1]
    # inverse finite Pochhammer 1/(q;q)_n, built incrementally
    inv_list = []
    invf = [1] + [0] * d
    inv_list.append(FormalSeries(0, invf, d))
    for n_ in range(1, d + 1):
        invf = list(invf)
        for x in range(n_, d + 1):
            invf[x] += invf[x - n_]
        inv_list.append(FormalSeries(0, invf, d))
    # identity 1: (z;q)_inf * sum_n z^n/(q;q)_n == 1
    b = [inv_list[n_] for n_ in range(d + 1)]
    prod = _z_poly_mul(a, b, d, d)
    ok1 = prod[0].eq_to_order(FormalSeries.one(d), d) and all(
        prod[deg].is_zero() for deg in range(1, d + 1)
    )
    # identity 2: (z;q)_inf == sum_n (-1)^n z^n q^{n(n-1)/2}/(q;q)_n
    ok2 = True
    for n_ in range(d + 1):
        e = n_ * (n_ - 1) // 2
        rhs = inv_list[n_].shift(e).truncate(d) if e <= d else FormalSeries.zero(d)
        rhs = rhs if n_ % 2 == 0 else -rhs
        if not a[n_].eq_to_order(rhs, d):
            ok2 = False
            break
    return ok1 and ok2
