import mpmath as mp
import pytest

from qasymp.hires import EvalConfig


@pytest.fixture(scope="session")
def cfg128():
    return EvalConfig(128)


@pytest.fixture(scope="session")
def cfg192():
    return EvalConfig(192)


@pytest.fixture(scope="session")
def cfg256():
    return EvalConfig(256)


def close_bits(a, b, bits, scale=None):
    """|a - b| <= 2^-bits * scale, compared at enough working precision."""
    with mp.workprec(max(bits + 64, 128)):
        aa, bb = mp.mpmathify(a), mp.mpmathify(b)
        sc = mp.mpf(scale) if scale is not None else max(abs(aa), abs(bb), mp.mpf(1))
        return abs(aa - bb) <= mp.mpf(2) ** (-bits) * sc


def rel_diff(a, b, prec=300):
    with mp.workprec(prec):
        aa, bb = mp.mpmathify(a), mp.mpmathify(b)
        return abs(aa - bb) / max(abs(aa), abs(bb), mp.mpf(2) ** (-prec))
