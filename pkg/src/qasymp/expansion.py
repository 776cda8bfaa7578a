"""The Puiseux-expansion pipeline: exact bivariate coefficients a_{n,j} of h_q(z),
the coefficients beta_k(j) of the s^{j/k} expansion of the relative error, full
expansion evaluation, rational reconstruction of coefficient ratios, and the
recovery of Zagier's k=3 rational series t1, t2.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath as mp

from .errors import DivisionByZeroBeta, InvalidK, ReconstructionFailed
from .exactcore import ZPolynomial, bernoulli_number, bernoulli_polynomial, rational_to_str
from .hires import EvalConfig, _round_to, frac_to_mpf, gamma_q_num, mpf_to_fraction
from .wright import b_k_coeff


def f2j_polynomial(k: int, j: int) -> ZPolynomial:
    """f_{2j}(z) = B_{2j} (B_{2j+1}(1+z) k^{2j} + B_{2j+1}(1 - kz/(k+1)) (k+1)^{2j})
    / (2j (2j+1)!); exact, degree 2j+1."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if j < 1:
        raise ValueError("j must be >= 1")
    bp = bernoulli_polynomial(2 * j + 1)
    p1 = bp.compose_affine(Fraction(1), Fraction(1)).scale(Fraction(k) ** (2 * j))
    p2 = bp.compose_affine(Fraction(-k, k + 1), Fraction(1)).scale(Fraction(k + 1) ** (2 * j))
    scale = bernoulli_number(2 * j) / Fraction(2 * j * factorial(2 * j + 1))
    return (p1 + p2).scale(scale)


@dataclass(frozen=True)
class BivariateExpansion:
    """Exact table a_{n,j}: h_q(z) = sum_{n,j} a_{n,j} s^j z^n with q = e^{-s}.

    Invariants (checked at build time): a_{0,0} = 1, a_{0,j} = 0 for j >= 1,
    a_{n,0} = 0 for n >= 1, and a_{n,j} = 0 for n > 2j.
    """

    k: int
    j_max: int
    table: tuple  # tuple of tuples: table[j] = z-coefficients of the s^j term

    def a(self, n: int, j: int) -> Fraction:
        if j > self.j_max:
            raise ValueError(f"a_(n,{j}) beyond computed order {self.j_max}")
        if j < 0 or n < 0:
            raise ValueError("indices must be non-negative")
        row = self.table[j]
        return row[n] if n < len(row) else Fraction(0)

    def to_json(self) -> str:
        entries = [
            [n, j, rational_to_str(c)]
            for j, row in enumerate(self.table)
            for n, c in enumerate(row)
            if c != 0
        ]
        return json.dumps({"k": self.k, "j_max": self.j_max, "entries": entries})


_BIV_CACHE: dict[int, BivariateExpansion] = {}
_BIV_LOCK = threading.Lock()


def hq_bivariate(k: int, j_max: int) -> BivariateExpansion:
    """Exact a_{n,j} for j <= j_max, from
    h_q(z) = exp(s (k z^2/(4(k+1)) - k z/2) - sum_{j>=1} f_{2j}(z) s^{2j} + ...),
    via the exponential recurrence over polynomials in z."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    with _BIV_LOCK:
        hit = _BIV_CACHE.get(k)
    if hit is not None and hit.j_max >= j_max:
        if hit.j_max == j_max:
            return hit
        return BivariateExpansion(k, j_max, hit.table[: j_max + 1])
    c: dict[int, ZPolynomial] = {
        1: ZPolynomial([Fraction(0), Fraction(-k, 2), Fraction(k, 4 * (k + 1))])
    }
    for i in range(1, j_max // 2 + 1):
        c[2 * i] = c.get(2 * i, ZPolynomial()) + (-f2j_polynomial(k, i))
    e: list[ZPolynomial] = [ZPolynomial([Fraction(1)])]
    for t in range(1, j_max + 1):
        acc = ZPolynomial()
        for i in range(1, t + 1):
            ci = c.get(i)
            if ci is not None:
                acc = acc + (ci * e[t - i]).scale(Fraction(i))
        e.append(acc.scale(Fraction(1, t)))
    # build-time verification of the structural claims the beta sum relies on
    for j, poly in enumerate(e):
        if poly.degree > 2 * j:
            raise RuntimeError(f"degree bound violated: deg a_(.,{j}) = {poly.degree} > {2*j}")
        a0 = poly.coefficient(0)
        if j == 0 and (a0 != 1 or poly.degree != 0):
            raise RuntimeError("a_(0,0) != 1")
        if j >= 1 and a0 != 0:
            raise RuntimeError(f"a_(0,{j}) = {a0} != 0")
    table = tuple(tuple(Fraction(x) for x in poly.coeffs) for poly in e)
    result = BivariateExpansion(k, j_max, table)
    with _BIV_LOCK:
        prev = _BIV_CACHE.get(k)
        if prev is None or prev.j_max < j_max:
            _BIV_CACHE[k] = result
    return result


# ---------------------------------------------------------------------------
# beta coefficients and the expansion itself
# ---------------------------------------------------------------------------

_BETA_CACHE: dict = {}
_BETA_LOCK = threading.Lock()


def beta_coeff(k: int, j: int, cfg: EvalConfig):
    """beta_k(j) = b_k(j)(k+1)^{-j} k^{j(k+1)/k}
    + sum_{kr+l=j, r>=1, l>=1} b_k(l) sum_{n=1}^{2r} a_{n,r} (-l)^n (k+1)^{n-l} k^{l(k+1)/k - n}.

    Exactly zero when k | j: the first term's sine vanishes and every
    decomposition has l = j - kr = 0 (mod k), killing all b_k(l)."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if j < 1:
        raise ValueError("j must be >= 1")
    if j % k == 0:
        return mp.mpf(0)
    key = (k, j, cfg.precision_bits)
    with _BETA_LOCK:
        hit = _BETA_CACHE.get(key)
    if hit is not None:
        return hit
    r_max = (j - 1) // k
    biv = hq_bivariate(k, max(r_max, 1))
    guard = 64
    sub = EvalConfig(cfg.precision_bits + guard)
    with mp.workprec(cfg.precision_bits + guard):
        tot = b_k_coeff(k, j, sub) * mp.power(k + 1, -j) \
            * mp.power(k, frac_to_mpf(Fraction(j * (k + 1), k)))
        for r in range(1, r_max + 1):
            ell = j - k * r
            b = b_k_coeff(k, ell, sub)
            if b == 0:
                continue
            inner = mp.mpf(0)
            for n in range(1, 2 * r + 1):
                a = biv.a(n, r)
                if a == 0:
                    continue
                inner += frac_to_mpf(a) * mp.power(-ell, n) * mp.power(k + 1, n - ell) \
                    * mp.power(k, frac_to_mpf(Fraction(ell * (k + 1), k) - n))
            tot += b * inner
        val = _round_to(tot, cfg)
    with _BETA_LOCK:
        _BETA_CACHE.setdefault(key, val)
    return val


@dataclass(frozen=True)
class PuiseuxExpansion:
    """The s -> 0 expansion object:
    g_k(e^{-s}) ~ amp * sqrt(2 pi / s) * exp(pi2_coeff * pi^2 / s + s/24)
                 * (constant + sum_{j=1}^{k N} beta_k(j) s^{j/k}).
    Prefactor data is exact; the beta coefficients carry their precision."""

    k: int
    order: int  # N: coefficients j = 1..k*N are stored
    precision_bits: int
    coefficients: tuple  # beta_k(1..kN) as mpf
    amp: Fraction  # 1/(k+1)
    pi2_coeff: Fraction  # -1/(3k(k+1)), multiplies pi^2/s in the exponent
    linear_coeff: Fraction  # 1/24, multiplies s in the exponent
    constant: Fraction  # (k+1)/k

    def to_json(self) -> str:
        digits = max(1, int(self.precision_bits * 0.30103))
        return json.dumps({
            "k": self.k,
            "order": self.order,
            "precision_bits": self.precision_bits,
            "amp": rational_to_str(self.amp),
            "pi2_coeff": rational_to_str(self.pi2_coeff),
            "linear_coeff": rational_to_str(self.linear_coeff),
            "constant": rational_to_str(self.constant),
            "beta": [mp.nstr(b, digits) for b in self.coefficients],
        })


def build_puiseux(k: int, n_order: int, cfg: EvalConfig) -> PuiseuxExpansion:
    """Assemble the expansion object with beta_k(1..k*n_order)."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if n_order < 0:
        raise ValueError("N must be >= 0")
    betas = tuple(beta_coeff(k, j, cfg) for j in range(1, k * n_order + 1))
    return PuiseuxExpansion(
        k=k, order=n_order, precision_bits=cfg.precision_bits, coefficients=betas,
        amp=Fraction(1, k + 1), pi2_coeff=Fraction(-1, 3 * k * (k + 1)),
        linear_coeff=Fraction(1, 24), constant=Fraction(k + 1, k),
    )


def expansion_eval(k: int, n_order: int, s, cfg: EvalConfig):
    """(1/(k+1)) sqrt(2 pi/s) e^{-pi^2/(3k(k+1)s) + s/24}
    ((k+1)/k + sum_{j=1}^{kN} beta_k(j) s^{j/k})."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if n_order < 0:
        raise ValueError("N must be >= 0")
    with mp.workprec(cfg.precision_bits + 64):
        sv = frac_to_mpf(s)
        if not sv > 0:
            raise ValueError("s must be positive")
        series = mp.mpf(k + 1) / k
        for j in range(1, k * n_order + 1):
            b = beta_coeff(k, j, cfg)
            if b != 0:
                series += b * mp.power(sv, mp.mpf(j) / k)
        pref = mp.sqrt(2 * mp.pi / sv) / (k + 1) \
            * mp.exp(-mp.pi ** 2 / (3 * k * (k + 1) * sv) + sv / 24)
        return _round_to(pref * series, cfg)


# ---------------------------------------------------------------------------
# rational reconstruction and Zagier's tables
# ---------------------------------------------------------------------------

_DENOMINATOR_BOUND = 1 << 64


def rational_ratio(k: int, j: int, m: int, cfg: EvalConfig) -> Fraction:
    """beta_k(j + mk)/beta_k(j) reconstructed as an exact rational via
    continued-fraction convergents (denominator bound 2^64, residual 2^{-prec/2})."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if not (1 <= j < k):
        raise ValueError("rational ratios are defined for 1 <= j < k")
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return Fraction(1)
    with mp.workprec(cfg.precision_bits + 16):
        den = beta_coeff(k, j, cfg)
        if den == 0 or abs(den) < mp.mpf(2) ** (-(cfg.precision_bits // 2)):
            raise DivisionByZeroBeta(f"beta_{k}({j}) vanishes; ratio undefined")
        num = beta_coeff(k, j + m * k, cfg)
        x = num / den
        best = mpf_to_fraction(x).limit_denominator(_DENOMINATOR_BOUND)
        resid = abs(x - frac_to_mpf(best))
        if resid > mp.mpf(2) ** (-(cfg.precision_bits // 2)):
            raise ReconstructionFailed(
                f"residual {mp.nstr(resid, 5)} too large for beta_{k}({j + m * k})/beta_{k}({j}); "
                "increase precision_bits")
        return best


def zagier_t_coeffs(m_max: int, cfg: EvalConfig):
    """Coefficient lists of Zagier's t1 and t2 through s^m_max (k = 3):
    t1[m] = beta_3(1+3m)/beta_3(1), t2[m] = 5 beta_3(2+3m)/beta_3(2)."""
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    t1 = [Fraction(1)]
    t2 = [Fraction(5)]
    for m in range(1, m_max + 1):
        t1.append(rational_ratio(3, 1, m, cfg))
        t2.append(5 * rational_ratio(3, 2, m, cfg))
    return t1, t2


def zagier_c1(cfg: EvalConfig):
    """c_1 = 3^{-1/6} Gamma(1/3) / (8 pi)."""
    with mp.workprec(cfg.precision_bits + 16):
        val = mp.power(3, frac_to_mpf(Fraction(-1, 6))) \
            * mp.gamma(frac_to_mpf(Fraction(1, 3))) / (8 * mp.pi)
        return _round_to(val, cfg)


def zagier_c2(cfg: EvalConfig):
    """c_2 = 3^{1/6} Gamma(2/3) / (32 pi)."""
    with mp.workprec(cfg.precision_bits + 16):
        val = mp.power(3, frac_to_mpf(Fraction(1, 6))) \
            * mp.gamma(frac_to_mpf(Fraction(2, 3))) / (32 * mp.pi)
        return _round_to(val, cfg)


# ---------------------------------------------------------------------------
# numeric h_q oracle (assembled from the q-Gamma layer, for cross-checks)
# ---------------------------------------------------------------------------

def hq_num(k: int, z, s, cfg: EvalConfig):
    """h_q(z) evaluated from its definition:
    q^{k^2 z^2/(2(k+1)) + kz/2} * Gamma(z+1)Gamma(1-kz/(k+1))
    / (Gamma_{q^k}(z+1) Gamma_{q^{k+1}}(1-kz/(k+1)))
    * ((1-q^{k+1})/((k+1)s))^{kz/(k+1)} * (ks/(1-q^k))^z.

    This is the independent oracle for the exact a_{n,j} table."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    guard = 48
    sub = EvalConfig(cfg.precision_bits + guard)
    with mp.workprec(cfg.precision_bits + guard):
        sv = frac_to_mpf(s)
        zv = mp.mpc(z) if isinstance(z, (complex, mp.mpc)) else frac_to_mpf(z)
        q = mp.exp(-sv)
        qk = mp.exp(-k * sv)
        qk1 = mp.exp(-(k + 1) * sv)
        pref = mp.power(q, mp.mpf(k * k) / (2 * (k + 1)) * zv * zv + mp.mpf(k) / 2 * zv)
        arg2 = 1 - mp.mpf(k) / (k + 1) * zv
        g1 = mp.gamma(zv + 1) / gamma_q_num(zv + 1, qk, sub)
        g2 = mp.gamma(arg2) / gamma_q_num(arg2, qk1, sub)
        f1 = mp.power((1 - qk1) / ((k + 1) * sv), mp.mpf(k) / (k + 1) * zv)
        f2 = mp.power(k * sv / (1 - qk), zv)
        val = pref * g1 * g2 * f1 * f2
        if not isinstance(zv, mp.mpc):
            val = mp.re(val) if isinstance(val, mp.mpc) else val
        return _round_to(val, cfg)


def hq_table_eval(biv: BivariateExpansion, z, s, cfg: EvalConfig):
    """sum_{j<=j_max} sum_n a_{n,j} s^j z^n at numeric (z, s)."""
    with mp.workprec(cfg.precision_bits + 32):
        sv = frac_to_mpf(s)
        zv = mp.mpc(z) if isinstance(z, (complex, mp.mpc)) else frac_to_mpf(z)
        tot = mp.mpf(0)
        sp = mp.mpf(1)
        for j in range(biv.j_max + 1):
            row = biv.table[j]
            acc = mp.mpf(0)
            zp = mp.mpf(1)
            for n, c in enumerate(row):
                if c != 0:
                    acc += frac_to_mpf(c) * zp
                zp = zp * zv
            tot += acc * sp
            sp = sp * sv
        return _round_to(tot, cfg)
