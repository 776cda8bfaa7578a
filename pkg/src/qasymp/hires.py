"""Arbitrary-precision evaluation at q = e^{-s} (mpmath-backed).

Public operations take an EvalConfig carrying the target precision in bits;
internally everything runs at an elevated working precision sized to absorb
known cancellation (tracked per route), and results are rounded back to the
target precision. Re-running with doubled precision therefore moves a result
by no more than the final rounding, which is the package's precision contract.

All functions are pure; the only shared state is a write-once cache of
(q^c; q^c)_infinity values guarded by a lock.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from . import qseries
from .errors import InvalidK, NonConvergent, PoleAtNonpositive, TermCapExceeded

LN2 = math.log(2.0)


@dataclass(frozen=True)
class EvalConfig:
    """Numeric evaluation knobs: precision, tail cutoff, and a term safety cap.

    ``tail_threshold=None`` means 2^-(precision_bits+32), re-derived whenever the
    precision changes (e.g. via dataclasses.replace for the doubling contract).
    """

    precision_bits: int = 256
    tail_threshold: object = None
    max_terms: int = 2_000_000

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.tail_threshold is not None:
            if not (mp.mpf(self.tail_threshold) <= mp.mpf(2) ** (-self.precision_bits)):
                raise ValueError("tail_threshold must be <= 2^-precision_bits")

    @property
    def threshold(self):
        if self.tail_threshold is not None:
            return mp.mpf(self.tail_threshold)
        return mp.mpf(2) ** (-(self.precision_bits + 32))


def frac_to_mpf(x) -> mp.mpf:
    """Exact rational (or int/str/mpf) converted at the current working precision."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def as_float(x) -> float:
    """Rough float view of any accepted real argument (for guard-bit sizing)."""
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


def mpf_to_fraction(x) -> Fraction:
    """Exact Fraction equal to the mpf value."""
    sign, man, exp, _ = mp.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    v = Fraction(man, 1) * (Fraction(2) ** exp)
    return -v if sign else v


def format_real(x, cfg: EvalConfig) -> str:
    """Decimal string carrying exactly the number of reliable digits for cfg."""
    digits = max(1, int(cfg.precision_bits * 0.30103))
    with mp.workprec(cfg.precision_bits + 8):
        return mp.nstr(mp.mpf(x), digits)


def _round_to(x, cfg: EvalConfig):
    with mp.workprec(cfg.precision_bits):
        return +x


# ---------------------------------------------------------------------------
# infinite products
# ---------------------------------------------------------------------------

_QQ_CACHE: dict = {}
_QQ_LOCK = threading.Lock()


def _qq_inf_core(s, use_transform=None):
    """(q;q)_infinity at q = e^{-s}, at the ambient working precision.

    For small s the Dedekind-eta transformation
    (q;q)_inf = sqrt(2 pi / s) exp(-pi^2/(6s) + s/24) prod_n (1 - e^{-4 pi^2 n / s})
    converges in O(1) factors; the direct product is used otherwise.
    """
    if use_transform is None:
        use_transform = s < 3
    key = (mp.mpf(s)._mpf_, bool(use_transform), mp.mp.prec)
    hit = _QQ_CACHE.get(key)
    if hit is not None:
        return hit
    cut = (mp.mp.prec + 8) * LN2
    if use_transform:
        rate = 4 * mp.pi ** 2 / s
        prod = mp.mpf(1)
        n = 1
        while rate * n < cut:
            prod *= -mp.expm1(-rate * n)
            n += 1
        val = mp.sqrt(2 * mp.pi / s) * mp.exp(-mp.pi ** 2 / (6 * s) + s / 24) * prod
    else:
        prod = mp.mpf(1)
        n = 1
        while s * n < cut:
            prod *= -mp.expm1(-s * n)
            n += 1
        val = prod
    with _QQ_LOCK:
        _QQ_CACHE.setdefault(key, val)
    return val


def _poch_inf_exps_core(start, step, s):
    """prod_{j>=0} (1 - e^{-s(start + j*step)}) for integer start (possibly <= 0)."""
    cut = (mp.mp.prec + 8) * LN2
    prod = mp.mpf(1)
    j = 0
    while True:
        e = start + j * step
        if s * e > cut:
            return prod
        prod *= -mp.expm1(-s * e)
        j += 1


def pochhammer_num(z, q, cfg: EvalConfig):
    """(z; q)_infinity by direct product, truncated by the tail threshold."""
    guard = 48
    with mp.workprec(cfg.precision_bits + guard):
        qv = frac_to_mpf(q)
        if not (0 < qv < 1):
            raise NonConvergent(f"pochhammer product needs 0 < q < 1, got q={q}")
        zq = mp.mpc(z) if isinstance(z, (complex, mp.mpc)) else mp.mpf(z)
        prod = mp.mpf(1)
        thr = cfg.threshold * (1 - qv)
        count = 0
        while abs(zq) > thr:
            prod = prod * (1 - zq)
            if prod == 0:
                break
            zq = zq * qv
            count += 1
            if count > cfg.max_terms:
                raise TermCapExceeded("pochhammer_num exceeded max_terms")
        return _round_to(prod, cfg)


def qq_infinity_num(s, cfg: EvalConfig, use_transform=None):
    """(q;q)_infinity at q = e^{-s}; transform route selectable for cross-checks."""
    with mp.workprec(cfg.precision_bits + 48):
        sv = frac_to_mpf(s)
        if not sv > 0:
            raise NonConvergent("s must be positive")
        val = _qq_inf_core(sv, use_transform)
        return _round_to(val, cfg)


def _is_nonpositive_int(x, prec) -> bool:
    if isinstance(x, int):
        return x <= 0
    if isinstance(x, Fraction):
        return x.denominator == 1 and x <= 0
    if isinstance(x, (mp.mpc, complex)):
        if mp.im(x) != 0:
            return False
        x = mp.re(x)
    xv = mp.mpf(x)
    if xv > -0.5:
        return False
    return abs(xv - mp.nint(xv)) <= mp.mpf(2) ** (-(prec // 2))


def qsubz_num(x, q, cfg: EvalConfig):
    """(q;q)_x := (q;q)_infinity / (q^{x+1}; q)_infinity, valid for non-integer x."""
    if _is_nonpositive_int(_shift_one(x), cfg.precision_bits):
        raise PoleAtNonpositive(f"(q;q)_x has a pole at x={x}")
    guard = 48
    with mp.workprec(cfg.precision_bits + guard):
        qv = frac_to_mpf(q)
        if not (0 < qv < 1):
            raise NonConvergent(f"(q;q)_x needs 0 < q < 1, got q={q}")
        s = -mp.log(qv)
        num = _qq_inf_core(s)
        xv = frac_to_mpf(x) if not isinstance(x, (complex, mp.mpc)) else mp.mpc(x)
        zpow = mp.power(qv, xv + 1)
        den = mp.mpf(1)
        thr = cfg.threshold * (1 - qv)
        count = 0
        while abs(zpow) > thr:
            den = den * (1 - zpow)
            zpow = zpow * qv
            count += 1
            if count > cfg.max_terms:
                raise TermCapExceeded("qsubz_num exceeded max_terms")
        if den == 0:
            raise PoleAtNonpositive(f"(q;q)_x hit a vanishing factor at x={x}")
        return _round_to(num / den, cfg)


def _shift_one(x):
    if isinstance(x, (int, Fraction)):
        return x + 1
    return mp.mpf(x) + 1 if not isinstance(x, (complex, mp.mpc)) else mp.mpc(x) + 1


def gamma_q_num(x, q, cfg: EvalConfig):
    """Gamma_q(x) = (q;q)_{x-1} (1-q)^{1-x}, principal branch for the power."""
    if isinstance(x, (int, Fraction)):
        xm1 = x - 1
    elif isinstance(x, (complex, mp.mpc)):
        xm1 = mp.mpc(x) - 1
    else:
        xm1 = mp.mpf(x) - 1
    guard = 48
    sub = qsubz_num(xm1, q, EvalConfig(cfg.precision_bits + guard, None, cfg.max_terms))
    with mp.workprec(cfg.precision_bits + guard):
        qv = frac_to_mpf(q)
        xv = frac_to_mpf(x) if not isinstance(x, (complex, mp.mpc)) else mp.mpc(x)
        val = sub * mp.power(1 - qv, 1 - xv)
        return _round_to(val, cfg)


# ---------------------------------------------------------------------------
# theta
# ---------------------------------------------------------------------------

def theta_num(u, s, cfg: EvalConfig, use_inversion=None):
    """theta(e^{2 pi i u}, e^{-s}) = sum_n (-1)^n e^{2 pi i u n} e^{-s n^2}.

    Direct bilateral sum, or the modular inversion
    sqrt(pi/s) * sum_{n odd} exp(-pi^2 (n+2u)^2 / (4s)).
    u may be complex (u = i*a*s/(2*pi) gives the argument q^a); inversion is the
    default for s < 1 where the direct sum converges slowly.
    """
    if not as_float(s) > 0:
        raise NonConvergent("theta_num needs s > 0")
    if use_inversion is None:
        use_inversion = as_float(s) < 1
    complex_u = isinstance(u, (complex, mp.mpc)) and mp.im(u) != 0
    with mp.workprec(cfg.precision_bits + 48):
        sv = frac_to_mpf(s)
        thr = cfg.threshold
        if use_inversion:
            uv = mp.mpc(u) if complex_u else frac_to_mpf(u)
            c = mp.pi ** 2 / (4 * sv)
            tot = mp.exp(-c * (1 + 2 * uv) ** 2) + mp.exp(-c * (1 - 2 * uv) ** 2)
            maxmag = abs(tot)
            small = 0
            n = 3
            while n < cfg.max_terms:
                t = mp.exp(-c * (n + 2 * uv) ** 2) + mp.exp(-c * (n - 2 * uv) ** 2)
                tot += t
                maxmag = max(maxmag, abs(t))
                if abs(t) < thr * max(maxmag, abs(tot)):
                    small += 1
                    if small >= 2:
                        break
                else:
                    small = 0
                n += 2
            else:
                raise TermCapExceeded("theta_num inversion exceeded max_terms")
            val = mp.sqrt(mp.pi / sv) * tot
        else:
            if complex_u:
                uv = mp.mpc(u)
                z = mp.exp(2j * mp.pi * uv)
                zi = 1 / z
                tot = mp.mpc(1)
                zp, zpi = z, zi
                maxmag = mp.mpf(1)
                small = 0
                n = 1
                while n < cfg.max_terms:
                    t = (zp + zpi) * mp.exp(-sv * n * n)
                    if n % 2:
                        t = -t
                    tot += t
                    maxmag = max(maxmag, abs(t))
                    if abs(t) < thr * max(maxmag, abs(tot)):
                        small += 1
                        if small >= 3:
                            break
                    else:
                        small = 0
                    zp *= z
                    zpi *= zi
                    n += 1
                else:
                    raise TermCapExceeded("theta_num direct exceeded max_terms")
                val = tot
            else:
                uv = frac_to_mpf(u)
                tot = mp.mpf(1)
                n = 1
                while True:
                    t = 2 * mp.cospi(2 * n * uv) * mp.exp(-sv * n * n)
                    if n % 2:
                        t = -t
                    tot += t
                    if mp.exp(-sv * n * n) < thr:
                        break
                    n += 1
                    if n > cfg.max_terms:
                        raise TermCapExceeded("theta_num direct exceeded max_terms")
                val = tot
        if complex_u:
            return _round_to(mp.mpc(val), cfg)
        return _round_to(mp.re(val) if isinstance(val, mp.mpc) else val, cfg)


# ---------------------------------------------------------------------------
# the I_n sums and g_k itself
# ---------------------------------------------------------------------------

def _pm_seeds(k, s):
    """P_r = (q^{k+1-kr}; q^{k+1})_infinity for r = 0..k (the telescoping seeds)."""
    return [_poch_inf_exps_core(k + 1 - k * r, k + 1, s) for r in range(k + 1)]


def _In_core(k, n, s, cfg):
    """I_n(s) at ambient precision; returns (value, max term magnitude).

    The (q^{k+1};q^{k+1})_{-km/(k+1)} denominators are handled through
    P_m = (q^{k+1-km}; q^{k+1})_infinity, which telescopes with period k+1:
    P_{m+k+1} = P_m * prod_{i=0}^{k-1} (1 - q^{-km - i(k+1)}).
    Terms with (k+1) | m vanish (P_m = 0) and are skipped symbolically.
    """
    qq1 = _qq_inf_core((k + 1) * s)
    seeds = _pm_seeds(k, s)
    seeds[0] = qq1
    last = list(seeds)
    poch_m = mp.mpf(1)
    acc = mp.mpc(0)
    maxmag = mp.mpf(0)
    thr = cfg.threshold
    small = 0
    m = 0
    while m < cfg.max_terms:
        if m:
            poch_m *= -mp.expm1(-s * k * m)
        r = m % (k + 1)
        if m <= k:
            pm = seeds[m]
        elif r == 0:
            m += 1
            continue
        else:
            m_prev = m - (k + 1)
            upd = mp.mpf(1)
            for i in range(k):
                upd *= -mp.expm1(s * (k * m_prev + i * (k + 1)))
            pm = last[r] * upd
            last[r] = pm
        c_m = Fraction(k * m * (k * m + k + 1), 2 * (k + 1))
        phase = mp.expjpi(frac_to_mpf(Fraction(m * (n + k + 1), k + 1) % 2))
        term = phase * mp.exp(-s * frac_to_mpf(c_m)) * pm / (poch_m * qq1)
        acc += term
        at = abs(term)
        maxmag = max(maxmag, at)
        if at < thr * maxmag:
            small += 1
            if small > 2 * (k + 1) + 2:
                return acc, maxmag
        else:
            small = 0
        m += 1
    raise TermCapExceeded(f"I_n loop exceeded max_terms at k={k}, n={n}, s={s}")


def I_n_num(k, n, s, cfg: EvalConfig):
    """I_n(s) = sum_m (-1)^m e^{i pi m n/(k+1)} q^{km(m+1)/2 - km^2/(2(k+1))}
    / ((q^k;q^k)_m (q^{k+1};q^{k+1})_{-km/(k+1)}), for odd n."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if n % 2 == 0:
        raise ValueError("I_n is defined for odd n")
    if not as_float(s) > 0:
        raise NonConvergent("I_n needs s > 0")
    guard = int(1.4427 / (k * (k + 1) * as_float(s))) + 96
    with mp.workprec(cfg.precision_bits + guard):
        val, _ = _In_core(k, n, frac_to_mpf(s), cfg)
        return _round_to(val, cfg)


_GK_SERIES_CACHE: dict = {}
_GK_SERIES_LOCK = threading.Lock()


def _gk_series(k, order):
    with _GK_SERIES_LOCK:
        have = _GK_SERIES_CACHE.get(k)
    if have is None or have.truncation_order < order:
        have = qseries.gk_series_andrews(k, order)
        with _GK_SERIES_LOCK:
            prev = _GK_SERIES_CACHE.get(k)
            if prev is None or prev.truncation_order < have.truncation_order:
                _GK_SERIES_CACHE[k] = have
    return have


def _gk_series_core(k, s, cfg):
    order = int((mp.mp.prec + 16) * LN2 / float(s)) + 16
    ser = _gk_series(k, order)
    x = mp.exp(-s)
    acc = mp.mpf(0)
    for e, c in ser.items():
        if isinstance(c, Fraction):
            acc += frac_to_mpf(c) * mp.power(x, e)
        else:
            acc += c * mp.power(x, e)
    return acc


def _gk_insum_core(k, s, cfg):
    """The theta-sum representation with the theta factors inverted and the sums
    regrouped over odd n (the exact odd-n decomposition of the relative error);
    numerically stable for small s because the e^{pi^2/(6(k+1)s)}-scale
    cancellation of the plain m-sum never appears."""
    c = mp.pi ** 2 / (2 * k * (k + 1) * s)
    tot = mp.mpf(0)
    thr = cfg.threshold
    imax = mp.mpf(1)
    n = 1
    while n < 200:
        w_n = mp.exp(-c * (n * n - 1))
        if n > 1 and w_n * imax * 16 < thr * max(abs(tot), mp.mpf(1)):
            break
        val, mm = _In_core(k, n, s, cfg)
        imax = max(imax, mm)
        tot += 2 * w_n * mp.re(val)
        n += 2
    else:
        raise NonConvergent(f"odd-n sum did not converge at k={k}, s={s}")
    ratio = _qq_inf_core((k + 1) * s) / _qq_inf_core(k * s)
    return tot * ratio * mp.sqrt(2 * mp.pi / (k * (k + 1) * s)) * mp.exp(-c)


def _gk_direct_core(k, s, cfg):
    """Plain theta-sum m-loop with each theta evaluated by its direct bilateral sum;
    kept as the cross-check oracle for the regrouped route (it carries the full
    m-sum cancellation, so the caller must provide matching guard bits)."""
    t_base = Fraction(k * (k + 1), 2)
    qqk = _qq_inf_core(k * s)
    seeds = _pm_seeds(k, s)
    last = list(seeds)
    poch_m = mp.mpf(1)
    acc = mp.mpf(0)
    maxmag = mp.mpf(0)
    thr = cfg.threshold
    small = 0
    width = math.sqrt((mp.mp.prec + 16) * LN2 / float(s) / float(t_base)) + 2
    m = 0
    while m < cfg.max_terms:
        if m:
            poch_m *= -mp.expm1(-s * k * m)
        r = m % (k + 1)
        if m <= k:
            pm = seeds[m]
        elif r == 0:
            m += 1
            continue
        else:
            m_prev = m - (k + 1)
            upd = mp.mpf(1)
            for i in range(k):
                upd *= -mp.expm1(s * (k * m_prev + i * (k + 1)))
            pm = last[r] * upd
            last[r] = pm
        center = -m / (k + 1)
        nlo = int(math.floor(center - width))
        nhi = int(math.ceil(center + width))
        th = mp.mpf(0)
        for nn in range(nlo, nhi + 1):
            e = k * m * nn + frac_to_mpf(t_base) * nn * nn
            t = mp.exp(-s * e)
            th += -t if nn % 2 else t
        term = mp.exp(-s * (k * m * (m + 1) // 2)) * pm * th / poch_m
        if m % 2:
            term = -term
        acc += term
        at = abs(term)
        maxmag = max(maxmag, at)
        if at < thr * maxmag:
            small += 1
            if small > 2 * (k + 1) + 2:
                return acc / qqk
        else:
            small = 0
        m += 1
    raise TermCapExceeded(f"direct g_k m-sum exceeded max_terms at k={k}, s={s}")


def gk_num(k, s, cfg: EvalConfig, route: str = "auto"):
    """g_k(e^{-s}) to the configured precision.

    Routes: "series" sums the exact expansion (needs O(prec/s) coefficients, the
    default for s >= 1); "insum" is the theta-sum formula with inverted thetas regrouped as
    the odd-n sum (default for s < 1); "direct" is the plain m-sum with directly
    summed thetas, kept as the independent oracle for the other two.
    """
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    sf = as_float(s)
    if not sf > 0:
        raise ValueError("s must be positive")
    if route == "auto":
        route = "series" if sf >= 1 else "insum"
    if route == "series":
        guard = 64
        with mp.workprec(cfg.precision_bits + guard):
            return _round_to(_gk_series_core(k, frac_to_mpf(s), cfg), cfg)
    if route == "insum":
        guard = int(1.4427 / (k * (k + 1) * sf)) + 96
        with mp.workprec(cfg.precision_bits + guard):
            return _round_to(_gk_insum_core(k, frac_to_mpf(s), cfg), cfg)
    if route == "direct":
        guard = int(1.4427 * math.pi ** 2 / (6 * (k + 1) * sf)
                    + 1.4427 / (k * (k + 1) * sf)) + 96
        with mp.workprec(cfg.precision_bits + guard):
            return _round_to(_gk_direct_core(k, frac_to_mpf(s), cfg), cfg)
    raise ValueError(f"unknown route {route!r}")


def relative_error_num(k, s, cfg: EvalConfig, route: str = "auto"):
    """R_k(q) = g_k(q) (q^k;q^k)_inf/(q^{k+1};q^{k+1})_inf

    * sqrt(k(k+1)s/(2 pi)) e^{pi^2/(2k(k+1)s)}, with q = e^{-s}."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    g = gk_num(k, s, EvalConfig(cfg.precision_bits + 32, None, cfg.max_terms), route=route)
    with mp.workprec(cfg.precision_bits + 64):
        sv = frac_to_mpf(s)
        ratio = _qq_inf_core(k * sv) / _qq_inf_core((k + 1) * sv)
        val = g * ratio * mp.sqrt(k * (k + 1) * sv / (2 * mp.pi)) \
            * mp.exp(mp.pi ** 2 / (2 * k * (k + 1) * sv))
        return _round_to(val, cfg)
