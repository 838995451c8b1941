import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torsor.complex import HilbertComplex, log_torsion_det
from torsor.model import (
    ZETA,
    IntervalSpectrum,
    ZetaConstants,
    cylinder_torsion,
    cylinder_torsion_product,
    interval_log_det,
    interval_torsion,
    interval_zeta_prime_zero,
    riemann_zeta_em,
    riemann_zeta_prime_em,
    tan_integral,
    verify_zeta_constants,
)
from torsor.simplicial import circle, cochain_complex


def test_zeta_constants_verified():
    assert max(verify_zeta_constants().values()) < 1e-10


def test_zeta_constants_mpmath():
    assert ZETA.zeta_R_at_0 == pytest.approx(float(mpmath.zeta(0)), abs=1e-15)
    assert ZETA.zeta_R_prime_at_0 == pytest.approx(float(mpmath.zeta(0, derivative=1)), abs=1e-15)


def test_wrong_constants_detected():
    bad = ZetaConstants(zeta_R_prime_at_0=-0.9)
    assert verify_zeta_constants(bad)["zeta_R_prime_at_0"] > 1e-3


@pytest.mark.parametrize("s", [0.3, -0.7, 2.0, 0.5 + 3j])
def test_euler_maclaurin_zeta(s):
    assert complex(riemann_zeta_em(s)) == pytest.approx(complex(mpmath.zeta(s)), abs=1e-10)


def test_euler_maclaurin_derivative():
    for s in (-0.5, 0.0, 0.25):
        assert riemann_zeta_prime_em(s) == pytest.approx(float(mpmath.zeta(s, derivative=1)), abs=1e-10)


@pytest.mark.parametrize("length", [0.5, 1.0, 2.0])
def test_interval_zeta_prime(length):
    spec = IntervalSpectrum(length)
    assert interval_zeta_prime_zero(spec) == pytest.approx(-math.log(2 * length), abs=1e-10)
    # independent oracle: derivative of the scaled zeta function at 0
    oracle = float(mpmath.diff(lambda s: (length / mpmath.pi) ** (2 * s) * mpmath.zeta(2 * s), 0))
    assert interval_zeta_prime_zero(spec) == pytest.approx(oracle, abs=1e-10)
    assert interval_log_det(spec) == pytest.approx(math.log(2 * length), abs=1e-10)


def test_interval_spectrum():
    spec = IntervalSpectrum(2.0)
    ev = spec.eigenvalues(5)
    assert np.all(np.diff(ev) > 0) and ev[0] > 0
    np.testing.assert_allclose(ev, (np.arange(1, 6) * np.pi / 2) ** 2)
    direct = float(mpmath.nsum(lambda n: ((n * mpmath.pi / 2) ** 2) ** -1.5, [1, mpmath.inf]))
    assert complex(spec.zeta(1.5)).real == pytest.approx(direct, rel=1e-10)
    with pytest.raises(ValueError):
        IntervalSpectrum(0.0)
    with pytest.raises(ValueError):
        IntervalSpectrum(1.0, "robin")


def test_interval_torsion_examples():
    assert interval_torsion(0.5) == pytest.approx(0.0, abs=1e-12)
    assert interval_torsion(1.0) == pytest.approx(0.5 * math.log(2), abs=1e-12)
    assert interval_torsion(math.e**2 / 2) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        interval_torsion(-1.0)


@given(st.floats(1e-3, 1e3))
def test_interval_torsion_scaling(length):
    assert interval_torsion(length) - interval_torsion(1.0) == pytest.approx(0.5 * math.log(length), abs=1e-10)


def base_complexes():
    return [
        HilbertComplex.build([np.array([[2.0]])]),
        cochain_complex(circle(3)),
        HilbertComplex.build([], dims=[1]),
        HilbertComplex.build([np.array([[1.0, 2.0]])]),
    ]


def test_cylinder_examples():
    acyclic, circ, point, _ = base_complexes()
    assert cylinder_torsion(point, 0.5) == pytest.approx(0.0, abs=1e-12)
    for eps in (0.1, 1.0, 7.0):
        assert cylinder_torsion(acyclic, eps) == pytest.approx(math.log(2), abs=1e-12)
        assert cylinder_torsion(circ, eps) == pytest.approx(math.log(3), abs=1e-10)
    with pytest.raises(ValueError):
        cylinder_torsion(point, 0.0)


def test_cylinder_affine_in_log_two_eps():
    for b in base_complexes():
        chi = sum((-1) ** j * n for j, n in enumerate(b.dims))
        xs = [math.log(2 * e) for e in (0.25, 1.0, 3.0)]
        ys = [cylinder_torsion(b, e) for e in (0.25, 1.0, 3.0)]
        slope, intercept = np.polyfit(xs, ys, 1)
        assert slope == pytest.approx(0.5 * chi, abs=1e-12)
        assert intercept == pytest.approx(log_torsion_det(b), abs=1e-12)
        assert np.abs(np.polyval([slope, intercept], xs) - ys).max() < 1e-12


def test_cylinder_product_form():
    for b in base_complexes():
        for eps in (0.3, 2.0):
            assert cylinder_torsion_product(b, eps) == pytest.approx(cylinder_torsion(b, eps), abs=1e-14)


def test_tan_integral():
    assert tan_integral() == pytest.approx(-0.5 * math.log(2), abs=1e-10)
    assert tan_integral(1.0) == pytest.approx(math.log(math.cos(1.0)), abs=1e-10)
