import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from itw1d.dispersion import Parity, newton_residual
from itw1d.model import RationalM, problem_for
from itw1d.rational_solver import (
    FactorPolynomial,
    build_polynomial,
    lift_roots,
    solve_polynomial,
    spectrum_rational,
)


def poly_coeffs(rm, parity):
    return [Fraction(c) for c in build_polynomial(rm, parity).coefficients]


def test_build_polynomial_m3_odd_is_cube():
    # w^6 - 3w^4 + 3w^2 - 1 = (w^2 - 1)^3
    got = poly_coeffs(RationalM(3, 1, True), Parity.ODD)
    assert got == [-1, 0, 3, 0, -3, 0, 1]


def test_build_polynomial_m2():
    # odd: (w-1)^3 (w+1), even: (w-1)(w+1)^3
    assert poly_coeffs(RationalM(2, 1, True), Parity.ODD) == [-1, 2, 0, -2, 1]
    assert poly_coeffs(RationalM(2, 1, True), Parity.EVEN) == [-1, -2, 0, 2, 1]


def test_build_polynomial_monic_with_constant_minus_one():
    for p, q in ((5, 2), (7, 3), (9, 5)):
        for parity in (Parity.ODD, Parity.EVEN):
            coeffs = poly_coeffs(RationalM(p, q, True), parity)
            assert len(coeffs) == 2 * p + 1
            assert coeffs[-1] == 1 and coeffs[0] == -1
            assert abs(coeffs[p + q]) == Fraction(p, q)


def test_build_polynomial_rejects_product():
    with pytest.raises(ValueError):
        build_polynomial(RationalM(3, 1, True), Parity.PRODUCT)


def test_solve_polynomial_triple_plus_simple():
    roots = solve_polynomial(build_polynomial(RationalM(2, 1, True), Parity.ODD))
    by_mult = sorted((r.multiplicity, round(r.w.real)) for r in roots)
    assert by_mult == [(1, -1), (3, 1)]
    for r in roots:
        assert abs(r.w - round(r.w.real)) < 1e-10
        assert r.refinement_residual < 1e-10


def test_solve_polynomial_double_cube():
    roots = solve_polynomial(build_polynomial(RationalM(3, 1, True), Parity.ODD))
    assert sorted((r.multiplicity, round(r.w.real)) for r in roots) == [(3, -1), (3, 1)]


def test_solve_polynomial_degree_ten_residuals():
    poly = build_polynomial(RationalM(5, 2, True), Parity.ODD)
    roots = solve_polynomial(poly)
    assert sum(r.multiplicity for r in roots) == 10
    assert all(r.refinement_residual < 1e-10 for r in roots)


def test_solve_polynomial_roots_closed_under_conjugation_and_inversion():
    poly = build_polynomial(RationalM(7, 3, True), Parity.EVEN)
    roots = solve_polynomial(poly)
    ws = [r.w for r in roots for _ in range(r.multiplicity)]
    for w in ws:
        assert min(abs(w.conjugate() - v) for v in ws) < 1e-9
        assert min(abs(1 / w.conjugate() - v) for v in ws) < 1e-9


def test_lift_w_minus_one_gives_odd_integers():
    rm = RationalM(2, 1, True)
    problem = problem_for(3, 2)
    roots = solve_polynomial(build_polynomial(rm, Parity.EVEN))
    triple = [r for r in roots if r.multiplicity == 3][0]
    assert triple.w == pytest.approx(-1.0)
    lifted = lift_roots([triple], rm, (0.0, 6.0), problem, Parity.EVEN)
    assert sorted(complex(r.z).real for r in lifted) == pytest.approx([1.0, 3.0, 5.0])
    assert all(r.multiplicity == 3 and complex(r.z).imag == 0 for r in lifted)


def test_lift_m3_even_pair_heights():
    rm = RationalM(3, 1, True)
    problem = problem_for(2, 2)
    roots = solve_polynomial(build_polynomial(rm, Parity.EVEN))
    lifted = lift_roots(roots, rm, (0.0, 2.0), problem, Parity.EVEN)
    y = math.acosh(math.sqrt(1.5)) / math.pi
    complex_zs = sorted(
        (round(complex(r.z).real, 9), round(complex(r.z).imag, 9))
        for r in lifted
        if complex(r.z).imag != 0
    )
    want = sorted(
        (x, s * round(y, 9)) for x in (0.5, 1.5) for s in (1, -1)
    )
    assert complex_zs == pytest.approx(want)


def test_multiplicity_conservation_per_period():
    for p, q in ((3, 1), (5, 2), (7, 3)):
        rm = RationalM(p, q, True)
        problem = problem_for_m(p / q)
        for parity in (Parity.ODD, Parity.EVEN):
            roots = solve_polynomial(build_polynomial(rm, parity))
            lifted = lift_roots(roots, rm, (0.0, 2 * q), problem, parity)
            # one full period (0, 2q] holds 2p roots per factor, counting the
            # trivial family member at z=2q but not the one at z=0
            assert sum(r.multiplicity for r in lifted) == 2 * p


def problem_for_m(m):
    return problem_for((m + 1) / (m - 1), 2.0)


def test_spectrum_rational_m3():
    problem = problem_for(2, 2)
    spec = spectrum_rational(problem, RationalM(3, 1, True), (0.0, 1.0))
    assert not spec.defects
    # complex pair at 1/2 and the quadruple at z=1 map to k = pi/2, pi
    ks = sorted((complex(r.k).real, complex(r.k).imag, r.multiplicity) for r in spec.roots)
    y = math.acosh(math.sqrt(1.5))
    assert len(spec.roots) == 3
    assert ks[0] == pytest.approx((math.pi / 2, -y, 1))
    assert ks[1] == pytest.approx((math.pi / 2, y, 1))
    assert ks[2][0] == pytest.approx(math.pi)
    assert ks[2][2] == 4


def test_spectrum_rational_m2_all_quadruple():
    problem = problem_for(3, 2)
    spec = spectrum_rational(problem, RationalM(2, 1, True), (0.0, 5.0))
    assert [r.multiplicity for r in spec.roots] == [4] * 5
    assert all(r.parity is Parity.PRODUCT for r in spec.roots)
    assert all(complex(r.z).imag == 0 for r in spec.roots)


def test_spectrum_rational_quadruples_on_guide_lines():
    # quadruples sit exactly on Re k = 2*j*pi/((sigma+1)*L)
    sigma, L = 2.0, 2.0
    problem = problem_for(sigma, L)
    spec = spectrum_rational(problem, RationalM(3, 1, True), (0.0, 3.0))
    step = 2 * math.pi / ((sigma + 1) * L)
    for r in spec.roots:
        if r.multiplicity == 4:
            re_k = complex(r.k).real
            j = round(re_k / step)
            assert abs(re_k - j * step) < 1e-9


def test_spectrum_residuals_and_conjugate_closure():
    problem = problem_for_m(2.5)
    spec = spectrum_rational(problem, RationalM(5, 2, True), (0.0, 8.0))
    assert not spec.defects
    zs = [complex(r.z) for r in spec.roots]
    for r in spec.roots:
        z = complex(r.z)
        if r.parity is not Parity.PRODUCT:
            assert newton_residual(z, problem.m, r.parity, r.multiplicity) < 1e-9
        assert min(abs(z.conjugate() - w) for w in zs) < 1e-12


def test_spectrum_periodicity_in_z():
    rm = RationalM(5, 2, True)
    problem = problem_for_m(2.5)
    period = 2 * rm.q
    spec = spectrum_rational(problem, rm, (0.0, 2.0 * period))
    key = lambda z: (round(z.real, 9), round(z.imag, 9))
    first = sorted((complex(r.z) for r in spec.roots
                    if 0 < complex(r.z).real <= period), key=key)
    second = sorted((complex(r.z) for r in spec.roots
                     if period < complex(r.z).real <= 2 * period), key=key)
    assert len(first) == len(second)
    for a, b in zip(first, second):
        assert abs((a + period) - b) < 1e-9


def test_cluster_radius_configurable():
    poly = build_polynomial(RationalM(2, 1, True), Parity.ODD)
    # a huge radius merges everything into one invalid cluster, which the
    # validation then splits back into simple roots
    roots = solve_polynomial(poly, cluster_radius=10.0)
    assert sum(r.multiplicity for r in roots) == 4


def test_mismatched_contrast_rejected():
    with pytest.raises(ValueError):
        spectrum_rational(problem_for(2, 2), RationalM(2, 1, True), (0.0, 1.0))
