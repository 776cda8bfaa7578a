"""Wright's generalized Bessel function phi(rho, beta; z) = sum z^n/(n! Gamma(beta - rho n)),
its moments, the real combinations W_j, and their large-argument expansions.

Two evaluation routes for the real parts:

* direct series summation (`wright_phi`, `wright_phi_moment`) -- the imaginary
  part of phi on the relevant ray grows like exp(c w^{k+1}) while the real part
  stays O(1), so direct summation needs guard bits proportional to w^{k+1};

* an analytically reflected integral (used by `W_j_num` for large w): with
  S_j(W) = sum_{m>=1} m^j Gamma(rho m) W^m / m! one has, for z > 0,

      Re phi_j(rho, 1; z e^{i pi rho}) = [j = 0] + Im S_j(z e^{2 pi i rho}) / (2 pi),

  and S_j(W) = int_0^{e^{i psi} inf} B_j(W u^rho) e^{W u^rho} e^{-u} du / u
  (B_j = Bell polynomial, B_0-case uses expm1), where the ray angle psi is
  chosen so the integrand decays without large intermediate values. The huge
  purely-imaginary component of phi cancels in the reflection, so quadrature
  at ordinary precision suffices for any w.

rho and beta are taken as exact Fractions so that the poles of Gamma(beta - rho n)
(terms skipped exactly) are detected symbolically, never by floating comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import InvalidK, InvalidRho, NonConvergent, TermCapExceeded
from .hires import EvalConfig, as_float, frac_to_mpf, _round_to

LN2 = math.log(2.0)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 12)
    raise TypeError(f"need an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class WrightParams:
    """Parameters (rho, beta) of phi; rho < 1 is the convergent regime used here."""

    rho: Fraction
    beta: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "rho", _as_fraction(self.rho))
        object.__setattr__(self, "beta", _as_fraction(self.beta))
        if not self.rho < 1:
            raise NonConvergent(f"wright series needs rho < 1, got rho={self.rho}")


def reciprocal_gamma(x: Fraction):
    """1/Gamma(x) for exact rational x: exact zero at non-positive integers,
    reflection through Gamma(1-x) sin(pi x)/pi for x < 1/2 (sin on the exactly
    reduced fractional part, so near-pole arguments lose no accuracy)."""
    x = _as_fraction(x)
    if x.denominator == 1 and x <= 0:
        return mp.mpf(0)
    if x >= Fraction(1, 2):
        return mp.rgamma(frac_to_mpf(x))
    flo = x.numerator // x.denominator
    frac_part = x - flo
    sgn = 1 if flo % 2 == 0 else -1
    sv = sgn * mp.sinpi(frac_to_mpf(frac_part))
    return mp.gamma(frac_to_mpf(1 - x)) * sv / mp.pi


def _phi_cancel_bits(rho: Fraction, zabs: float) -> int:
    """Guard bits for direct summation: the max term is about
    exp((1-rho) rho^{rho/(1-rho)} |z|^{1/(1-rho)}) times the real part."""
    r = float(rho)
    if zabs <= 1:
        return 16
    peak = (1 - r) * (r ** (r / (1 - r))) * zabs ** (1.0 / (1 - r))
    return int(peak * 1.4427) + 16


def _phi_series_core(params: WrightParams, z, j: int, cfg: EvalConfig):
    """Direct summation of phi_j at ambient precision."""
    rho, beta = params.rho, params.beta
    zc = mp.mpc(z) if isinstance(z, (complex, mp.mpc)) else mp.mpf(z)
    zabs = abs(zc)
    n_peak = (float(rho) * float(zabs)) ** (1.0 / (1 - float(rho)))
    n_cap = min(cfg.max_terms,
                int(4 * n_peak + 0.8 * mp.mp.prec / (1 - float(rho)) + 256))
    tot = mp.mpc(0) if isinstance(zc, mp.mpc) else mp.mpf(0)
    power = mp.mpf(1)
    maxmag = mp.mpf(0)
    small = 0
    for n in range(n_cap + 1):
        if n:
            power = power * zc / n
        rg = reciprocal_gamma(beta - rho * n)
        if rg != 0:
            t = (n ** j) * power * rg if j else power * rg
            tot += t
            at = abs(t)
            maxmag = max(maxmag, at)
        else:
            # skipped pole term: bound its neighbors' size through the reflection
            # |1/Gamma(beta - rho n)| <= Gamma(1 + rho n - beta)/pi
            at = abs(power) * mp.gamma(frac_to_mpf(1 + rho * n - beta)) / mp.pi
        # absolute tail cut: on the oscillatory rays both the largest term and
        # the accumulated sum peak exponentially above the O(1) real part, so
        # any magnitude-relative cut would abandon the tail too early
        if n > 8 and at < cfg.threshold:
            small += 1
            if small >= 10:
                return tot, maxmag
        else:
            small = 0
    raise TermCapExceeded(f"wright series needed more than {n_cap} terms")


def wright_phi(params: WrightParams, z, cfg: EvalConfig):
    """phi(rho, beta; z) by direct series summation with symbolic pole skipping."""
    guard = _phi_cancel_bits(params.rho, float(abs(mp.mpc(z)))) + 64
    if guard > 1 << 22:
        raise NonConvergent("direct summation would need over 4M guard bits; "
                            "use W_j_num (quadrature route) for this argument")
    with mp.workprec(cfg.precision_bits + guard):
        val, _ = _phi_series_core(params, z, 0, cfg)
        return _round_to(val, cfg)


def wright_phi_moment(j: int, params: WrightParams, z, cfg: EvalConfig):
    """phi_j(rho, beta; z) = sum_m m^j z^m/(m! Gamma(beta - rho m)); phi_0 = phi."""
    if j < 0:
        raise ValueError("moment order must be >= 0")
    guard = _phi_cancel_bits(params.rho, float(abs(mp.mpc(z)))) + 64
    if guard > 1 << 22:
        raise NonConvergent("direct summation would need over 4M guard bits; "
                            "use W_j_num (quadrature route) for this argument")
    with mp.workprec(cfg.precision_bits + guard):
        val, _ = _phi_series_core(params, z, j, cfg)
        return _round_to(val, cfg)


# ---------------------------------------------------------------------------
# coefficients and expansions
# ---------------------------------------------------------------------------

def b_k_coeff(k: int, j: int, cfg: EvalConfig):
    """b_k(j) = (k+1)/(k pi j!) (-1)^{j+1} sin(pi j(k-1)/k) Gamma(j(k+1)/k);
    exactly zero when k | j (the sine argument is an integer multiple of pi)."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if j < 1:
        raise ValueError("j must be >= 1")
    if j % k == 0:
        return mp.mpf(0)
    with mp.workprec(cfg.precision_bits + 32):
        arg = Fraction(j * (k - 1), k)
        flo = arg.numerator // arg.denominator
        sv = (1 if flo % 2 == 0 else -1) * mp.sinpi(frac_to_mpf(arg - flo))
        sgn = -1 if j % 2 == 0 else 1
        val = mp.mpf(k + 1) / (k * mp.pi * mp.factorial(j)) * sgn * sv \
            * mp.gamma(frac_to_mpf(Fraction(j * (k + 1), k)))
        return _round_to(val, cfg)


def re_phi_expansion(rho, z, L: int, cfg: EvalConfig):
    """Truncated large-z expansion of Re phi(rho, 1; z e^{i pi rho}) for z > 0:

        1/(2 rho) + (1/(2 pi rho)) sum_{l=1}^{L-1} ((-1)^{l+1}/l!)
                    Gamma(l/rho) z^{-l/rho} sin(pi l (2 rho - 1)/rho),

    remainder O(z^{-L/rho}) (reported by order, not added to the value)."""
    rho = _as_fraction(rho)
    if not (Fraction(1, 2) <= rho < 1):
        raise InvalidRho(f"expansion valid for 1/2 <= rho < 1, got {rho}")
    if L < 1:
        raise ValueError("L must be >= 1")
    if not as_float(z) > 0:
        raise ValueError("expansion is implemented on the ray z > 0")
    with mp.workprec(cfg.precision_bits + 32):
        zv = frac_to_mpf(z)
        tot = 1 / (2 * frac_to_mpf(rho))
        for ell in range(1, L):
            sarg = Fraction(ell) * (2 * rho - 1) / rho
            if sarg.denominator == 1:
                continue
            flo = sarg.numerator // sarg.denominator
            sv = (1 if flo % 2 == 0 else -1) * mp.sinpi(frac_to_mpf(sarg - flo))
            sgn = -1 if ell % 2 == 0 else 1
            term = sgn / mp.factorial(ell) * mp.gamma(frac_to_mpf(Fraction(ell) / rho)) \
                * mp.power(zv, -frac_to_mpf(Fraction(ell) / rho)) * sv
            tot += term / (2 * mp.pi * frac_to_mpf(rho))
        return _round_to(tot, cfg)


def W0_expansion(k: int, L: int, w, cfg: EvalConfig):
    """(k+1)/k + sum_{l=1}^{L-1} b_k(l) w^{-l(k+1)/k}; remainder O(w^{-L(k+1)/k})."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    with mp.workprec(cfg.precision_bits + 32):
        tot = mp.mpf(k + 1) / k
        wv = frac_to_mpf(w)
        for ell in range(1, L):
            b = b_k_coeff(k, ell, EvalConfig(cfg.precision_bits + 32))
            if b != 0:
                tot += b * mp.power(wv, -frac_to_mpf(Fraction(ell * (k + 1), k)))
        return _round_to(tot, cfg)


def Wj_expansion(k: int, j: int, L: int, w, cfg: EvalConfig):
    """sum_{l=1}^{L-1} (-l(k+1)/k)^j b_k(l) w^{-l(k+1)/k} for j >= 1
    (the j-th moment expansion; no constant term)."""
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if j == 0:
        return W0_expansion(k, L, w, cfg)
    with mp.workprec(cfg.precision_bits + 32):
        tot = mp.mpf(0)
        wv = frac_to_mpf(w)
        for ell in range(1, L):
            b = b_k_coeff(k, ell, EvalConfig(cfg.precision_bits + 32))
            if b != 0:
                fac = mp.power(-frac_to_mpf(Fraction(ell * (k + 1), k)), j)
                tot += fac * b * mp.power(wv, -frac_to_mpf(Fraction(ell * (k + 1), k)))
        return _round_to(tot, cfg)


# ---------------------------------------------------------------------------
# W_j: stable evaluation
# ---------------------------------------------------------------------------

def _bell_poly(j: int) -> list[int]:
    """Coefficients of the Bell polynomial B_j ((x d/dx)^j e^x = B_j(x) e^x)."""
    b = [0, 1]
    for _ in range(j - 1):
        # B_{j+1} = x * (B_j + B_j')
        nb = [0] * (len(b) + 1)
        for d, c in enumerate(b):
            if c:
                nb[d + 1] += c
                if d >= 1:
                    nb[d] += d * c
        b = nb
    return b


def _ray_angle(rho: float) -> float:
    """Grid-search psi in (-pi/2, pi/2) maximizing min(cos psi, -cos(2 pi rho + rho psi))."""
    best = (-2.0, 0.0)
    for i in range(-59, 60):
        psi = math.pi * i / 120.0
        m = min(math.cos(psi), -math.cos(2 * math.pi * rho + rho * psi))
        if m > best[0]:
            best = (m, psi)
    if best[0] <= 0.05:
        raise NonConvergent(f"no usable integration ray for rho={rho}")
    return best[1]


def _Wj_quad_core(k: int, j: int, w, cfg: EvalConfig):
    rho_f = Fraction(k, k + 1)
    rho = frac_to_mpf(rho_f)
    psi = _ray_angle(float(rho_f))
    wv = frac_to_mpf(w)
    big_w = wv * mp.expjpi(frac_to_mpf(2 * rho_f % 2))
    eip = mp.exp(1j * mp.mpf(psi))
    bell = _bell_poly(j) if j >= 1 else None

    def integrand(t):
        if t <= 0:
            return mp.mpc(0)
        u = eip * t
        x = big_w * mp.power(u, rho)
        if j == 0:
            return mp.expm1(x) * mp.exp(-u) / t
        acc = mp.mpc(0)
        xp = mp.mpc(1)
        for d in range(1, len(bell)):
            xp *= x
            if bell[d]:
                acc += bell[d] * xp
        return acc * mp.exp(x - u) / t

    scale = mp.power(wv, -1 / rho)
    pts = [mp.mpf(0), scale, 10 * scale + 5, mp.inf]
    val, err = mp.quad(integrand, pts, error=True, maxdegree=10)
    target = mp.mpf(2) ** (-(cfg.precision_bits + 8))
    if err > target * max(1, abs(val)):
        val, err = mp.quad(integrand, pts, error=True, maxdegree=13)
        if err > target * max(1, abs(val)) * 256:
            raise NonConvergent(f"W_j quadrature failed to converge (err={err})")
    base = mp.mpf(2) if j == 0 else mp.mpf(0)
    return base + mp.im(val) / mp.pi


def W_j_num(k: int, j: int, w, cfg: EvalConfig, route: str = "auto"):
    """W_j(w) = 2 Re phi_j(k/(k+1), 1; e^{-i pi k/(k+1)} w) for w > 0.

    Route "series" sums the phi_j series with guard bits covering the
    exp(w^{k+1} k^k/(k+1)^{k+1}) cancellation; route "quadrature" uses the
    reflected integral (no cancellation, any w). "auto" picks by cost.
    """
    if k < 2:
        raise InvalidK(f"k must be >= 2, got {k}")
    if j < 0:
        raise ValueError("j must be >= 0")
    if not as_float(w) > 0:
        raise ValueError("W_j is evaluated for w > 0")
    rho_f = Fraction(k, k + 1)
    if route == "auto":
        bits = _phi_cancel_bits(rho_f, as_float(w))
        route = "series" if bits + cfg.precision_bits <= 2600 else "quadrature"
    if route == "series":
        guard = _phi_cancel_bits(rho_f, as_float(w)) + 64
        with mp.workprec(cfg.precision_bits + guard):
            z = frac_to_mpf(w) * mp.expjpi(-frac_to_mpf(rho_f))
            val, _ = _phi_series_core(WrightParams(rho_f), z, j, cfg)
            return _round_to(2 * mp.re(val), cfg)
    if route == "quadrature":
        with mp.workprec(cfg.precision_bits + 64):
            return _round_to(_Wj_quad_core(k, j, w, cfg), cfg)
    raise ValueError(f"unknown route {route!r}")
