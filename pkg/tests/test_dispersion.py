import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from itw1d.dispersion import (
    BetaFamily,
    Parity,
    eval_beta,
    eval_derivative,
    eval_factor,
    eval_physical,
    factor_scaled,
    imag_bound,
    log_derivative,
    newton_residual,
    scale_exponent,
)
from itw1d.model import make_medium


def odd_m3_closed_form(z):
    # triple-angle identity: sin(3t) = 3 sin t - 4 sin^3 t
    return -4 * np.sin(np.pi * z) ** 3


def even_m3_closed_form(z):
    return 2 * np.sin(np.pi * z) * (3 - 2 * np.sin(np.pi * z) ** 2)


def test_factor_trivial_values():
    assert eval_factor(0.0, 3, Parity.ODD) == pytest.approx(0.0, abs=1e-15)
    assert complex(eval_factor(0.5, 3, Parity.ODD)) == pytest.approx(-4.0, rel=1e-14)


def test_factor_even_root_from_closed_form():
    y = math.acosh(math.sqrt(1.5)) / math.pi
    z = complex(0.5, y)
    assert abs(eval_factor(z, 3, Parity.EVEN)) < 1e-9


def test_closed_form_oracle_m3_grid():
    re = np.linspace(-2, 2, 50)
    im = np.linspace(-1, 1, 50)
    z = re[None, :] + 1j * im[:, None]
    for parity, oracle in ((Parity.ODD, odd_m3_closed_form), (Parity.EVEN, even_m3_closed_form)):
        got = eval_factor(z, 3, parity)
        want = oracle(z)
        scale = np.maximum(1.0, np.abs(want))
        assert np.max(np.abs(got - want) / scale) < 1e-12


def test_closed_form_oracle_m2_grid():
    re = np.linspace(-2, 2, 50)
    im = np.linspace(-1, 1, 50)
    z = re[None, :] + 1j * im[:, None]
    odd = 2 * np.sin(np.pi * z) * (np.cos(np.pi * z) - 1)
    even = 2 * np.sin(np.pi * z) * (np.cos(np.pi * z) + 1)
    for parity, want in ((Parity.ODD, odd), (Parity.EVEN, even)):
        got = eval_factor(z, 2, parity)
        scale = np.maximum(1.0, np.abs(want))
        assert np.max(np.abs(got - want) / scale) < 1e-12


def test_product_is_product_of_factors():
    z = complex(0.3, 0.2)
    prod = eval_factor(z, 2.5, Parity.PRODUCT)
    assert prod == pytest.approx(
        complex(eval_factor(z, 2.5, Parity.ODD)) * complex(eval_factor(z, 2.5, Parity.EVEN)),
        rel=1e-13,
    )


@given(
    z=st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    m=st.floats(min_value=1.05, max_value=10),
)
def test_oddness_and_conjugate_symmetry(z, m):
    for parity in (Parity.ODD, Parity.EVEN):
        v = complex(eval_factor(z, m, parity))
        scale = max(1.0, abs(v))
        assert abs(complex(eval_factor(-z, m, parity)) + v) <= 1e-13 * scale
        assert abs(complex(eval_factor(z.conjugate(), m, parity)) - v.conjugate()) <= 1e-13 * scale


def test_derivative_trivial_values():
    assert eval_derivative(0.0, 3, Parity.ODD, 1) == pytest.approx(0.0, abs=1e-12)
    # third derivative of -4 sin^3(pi z) at 0 is -24 pi^3
    assert eval_derivative(0.0, 3, Parity.ODD, 3) == pytest.approx(-24 * math.pi**3, rel=1e-13)
    # z=1 is a multiple root of the even factor for m=2
    assert eval_derivative(1.0, 2, Parity.EVEN, 1) == pytest.approx(0.0, abs=1e-12)


def test_derivative_matches_finite_difference():
    h = 1e-6
    for m in (2.5, 3.7):
        for parity in (Parity.ODD, Parity.EVEN, Parity.PRODUCT):
            for z in (0.23, 0.81 + 0.2j, 1.47 - 0.1j):
                fd = (complex(eval_factor(z + h, m, parity)) - complex(eval_factor(z - h, m, parity))) / (2 * h)
                an = complex(eval_derivative(z, m, parity, 1))
                assert an == pytest.approx(fd, rel=1e-6)


def test_derivative_rejects_bad_order():
    with pytest.raises(ValueError):
        eval_derivative(0.1, 3, Parity.ODD, 5)


def test_beta_family_definitional_cases():
    fam0 = BetaFamily(m=3, beta=0.0)
    for j in range(-3, 4):
        assert abs(eval_beta(j / 3, fam0)) < 1e-13
    fam_m = BetaFamily(m=3, beta=3.0, sign=1)
    for z in (0.2, 0.7 + 0.1j, 1.9):
        assert complex(eval_beta(z, fam_m)) == pytest.approx(
            complex(eval_factor(z, 3, Parity.ODD)), rel=1e-13, abs=1e-13
        )
    fam_e = BetaFamily(m=3, beta=3.0, sign=-1)
    for z in (0.2, 0.7 + 0.1j):
        assert complex(eval_beta(z, fam_e)) == pytest.approx(
            complex(eval_factor(z, 3, Parity.EVEN)), rel=1e-13, abs=1e-13
        )


def test_beta_direct_evaluation():
    fam = BetaFamily(m=2.5, beta=1.0)
    want = math.sin(0.75 * math.pi) - math.sin(0.3 * math.pi)
    assert eval_beta(0.3, fam) == pytest.approx(want, rel=1e-14)


def test_physical_residual_at_roots():
    med = make_medium(2, 2)
    assert abs(eval_physical(math.pi, med, Parity.ODD)) < 1e-12
    assert abs(eval_physical(0.0, med, Parity.ODD)) == 0.0


def test_physical_equals_scaled_factor_times_sigma_minus_one():
    med = make_medium(2, 2)
    rng = np.random.default_rng(0)
    ks = rng.uniform(0.1, 8.0, size=20) + 1j * rng.uniform(-0.5, 0.5, size=20)
    z = (med.sigma - 1) * ks * med.length / (2 * math.pi)
    for parity in (Parity.ODD, Parity.EVEN):
        lhs = eval_physical(ks, med, parity)
        rhs = (med.sigma - 1) * eval_factor(z, 3, parity)
        assert np.max(np.abs(lhs - rhs) / np.maximum(1, np.abs(rhs))) < 1e-13


def test_physical_beats_representation():
    # sin(a)cos(b) combinations of the two frequencies: the residual equals
    # minus twice the beats form of the boundary determinant
    med = make_medium(2, 2)
    s, L = med.sigma, med.length
    rng = np.random.default_rng(1)
    ks = rng.uniform(0.1, 9.0, size=100) + 1j * rng.uniform(-0.6, 0.6, size=100)
    beats = 2 * (
        np.sin(s * ks * L / 2) * np.cos(ks * L / 2)
        - s * np.sin(ks * L / 2) * np.cos(s * ks * L / 2)
    )
    lhs = eval_physical(ks, med, Parity.ODD)
    assert np.max(np.abs(lhs + beats) / np.maximum(1, np.abs(beats))) < 1e-13


def test_scaled_evaluation_matches_direct_at_moderate_height():
    z = complex(0.4, 2.0)
    m = 3.0
    direct = complex(eval_factor(z, m, Parity.ODD))
    scaled = complex(factor_scaled(z, m, Parity.ODD)) * math.exp(
        float(scale_exponent(z, m, Parity.ODD))
    )
    assert scaled == pytest.approx(direct, rel=1e-13)


def test_log_derivative_finite_on_tall_contour():
    # |Im z| large enough that the unscaled factor would overflow a double
    for m, z in ((1.002, complex(0.37, 210.0)), (3.0, complex(0.37, 200.0))):
        ld = complex(log_derivative(z, m, Parity.ODD))
        assert np.isfinite(ld.real) and np.isfinite(ld.imag)
    # far above the real axis p'/p approaches -i*m*pi once the first
    # exponential dominates the m*sin(pi*z) term
    ld = complex(log_derivative(complex(0.37, 200.0), 3.0, Parity.ODD))
    assert abs(ld + 1j * 3.0 * math.pi) < 1e-12


def test_newton_residual_multiplicity_aware():
    assert newton_residual(1.0, 3.0, Parity.ODD, multiplicity=3) < 1e-12
    assert newton_residual(0.5 + 0.2096j, 3.0, Parity.EVEN) < 1e-3


def test_imag_bound_value():
    assert imag_bound(3.0) == pytest.approx(math.log(7) / (2 * math.pi), rel=1e-15)
