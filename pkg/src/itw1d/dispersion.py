"""Characteristic (dispersion) functions in scaled and physical coordinates.

The two factors of the characteristic function are

    odd  parity:  sin(m*pi*z) - m*sin(pi*z)
    even parity:  sin(m*pi*z) + m*sin(pi*z)

and a wavenumber is a transmission wavenumber iff its scaled coordinate is a
zero of one of them (the odd/even tag names the symmetry of the eigenfunction
pair).  Everything is evaluated through exponentials rescaled by
exp(-m*pi*|Im z|) so that tall certification contours never overflow; the
logarithmic derivative used by the contour counter is scale invariant.

All evaluators broadcast over numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import Medium


class Parity(Enum):
    ODD = "odd"
    EVEN = "even"
    PRODUCT = "product"

    @property
    def sign(self) -> int:
        """Sign of the m*sin(pi*z) term: -1 for ODD, +1 for EVEN."""
        if self is Parity.ODD:
            return -1
        if self is Parity.EVEN:
            return 1
        raise ValueError("PRODUCT has no single sign")

    @property
    def other(self) -> "Parity":
        if self is Parity.ODD:
            return Parity.EVEN
        if self is Parity.EVEN:
            return Parity.ODD
        raise ValueError("PRODUCT has no opposite factor")


@dataclass(frozen=True)
class BetaFamily:
    """One-parameter deformation sin(m*pi*z) - sign*beta*sin(pi*z).

    sign=+1 deforms toward the odd factor (beta=m), sign=-1 toward the even.
    """

    m: float
    beta: float
    sign: int = 1

    def __post_init__(self):
        if not self.m > 1:
            raise ValueError("contrast m must exceed 1")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


def imag_bound(m: float) -> float:
    """Upper bound log(2m+1)/(pi*(m-1)) on |Im z| over all factor zeros."""
    return math.log(2.0 * m + 1.0) / (math.pi * (m - 1.0))


def _sin_scaled(w, s):
    # sin(w)*exp(-s) for s >= |Im w|, via exponentials (no overflow)
    return (np.exp(1j * w - s) - np.exp(-1j * w - s)) / 2j


def _cos_scaled(w, s):
    return (np.exp(1j * w - s) + np.exp(-1j * w - s)) / 2


def scale_exponent(z, m: float, parity: Parity):
    """Exponent s such that the scaled evaluators return value*exp(-s)."""
    mult = 2.0 if parity is Parity.PRODUCT else 1.0
    return mult * m * np.pi * np.abs(np.imag(z))


def factor_scaled(z, m: float, parity: Parity):
    """Factor value times exp(-m*pi*|Im z|) (PRODUCT: exp(-2*m*pi*|Im z|))."""
    if parity is Parity.PRODUCT:
        return factor_scaled(z, m, Parity.ODD) * factor_scaled(z, m, Parity.EVEN)
    s = m * np.pi * np.abs(np.imag(z))
    return _sin_scaled(m * np.pi * z, s) + parity.sign * m * _sin_scaled(np.pi * z, s)


def factor_derivative_scaled(z, m: float, parity: Parity):
    """d/dz of the factor, times the same exp(-s) as :func:`factor_scaled`."""
    if parity is Parity.PRODUCT:
        return (
            factor_derivative_scaled(z, m, Parity.ODD) * factor_scaled(z, m, Parity.EVEN)
            + factor_scaled(z, m, Parity.ODD) * factor_derivative_scaled(z, m, Parity.EVEN)
        )
    s = m * np.pi * np.abs(np.imag(z))
    return m * np.pi * (_cos_scaled(m * np.pi * z, s) + parity.sign * _cos_scaled(np.pi * z, s))


def eval_factor(z, m: float, parity: Parity):
    """Value of the dispersion factor (or the product of both factors)."""
    with np.errstate(over="ignore"):
        return factor_scaled(z, m, parity) * np.exp(scale_exponent(z, m, parity))


def log_derivative(z, m: float, parity: Parity):
    """p'(z)/p(z), stable for arbitrarily large |Im z|."""
    if parity is Parity.PRODUCT:
        return log_derivative(z, m, Parity.ODD) + log_derivative(z, m, Parity.EVEN)
    return factor_derivative_scaled(z, m, parity) / factor_scaled(z, m, parity)


def newton_step(z, m: float, parity: Parity):
    """p(z)/p'(z); its modulus estimates the distance to the nearest zero."""
    return factor_scaled(z, m, parity) / factor_derivative_scaled(z, m, parity)


def newton_residual(z, m: float, parity: Parity, multiplicity: int = 1) -> float:
    """Distance-to-root estimate |p^(mu-1) / p^(mu)| at z.

    For a simple root this is the Newton step |p/p'|; for a multiplicity-mu
    root the same ratio one derivative level up, which stays well conditioned
    where |p/p'| degenerates to 0/0 noise.
    """
    if multiplicity <= 1:
        value = factor_scaled(z, m, parity)
        if value == 0:
            return 0.0
        deriv = factor_derivative_scaled(z, m, parity)
    else:
        if parity is Parity.PRODUCT:
            raise ValueError("evaluate multiple roots against their own factor")
        value = eval_derivative(z, m, parity, multiplicity - 1)
        if value == 0:
            return 0.0
        deriv = eval_derivative(z, m, parity, multiplicity)
    if deriv == 0:
        return float(abs(value))
    return float(abs(value / deriv))


def _factor_derivative(z, m: float, sign: int, order: int):
    # d^n/dz^n [sin(m*pi*z) + sign*m*sin(pi*z)] via sin(x + n*pi/2)
    shift = order * np.pi / 2
    return (m * np.pi) ** order * np.sin(m * np.pi * z + shift) + sign * m * np.pi**order * np.sin(
        np.pi * z + shift
    )


def eval_derivative(z, m: float, parity: Parity, order: int):
    """Exact analytic derivative of order 1..4 (chain rule, not finite difference)."""
    if order not in (1, 2, 3, 4):
        raise ValueError("order must be in 1..4")
    if parity is Parity.PRODUCT:
        total = 0.0
        for i in range(order + 1):
            total = total + (
                math.comb(order, i)
                * _factor_derivative(z, m, Parity.ODD.sign, i)
                * _factor_derivative(z, m, Parity.EVEN.sign, order - i)
            )
        return total
    return _factor_derivative(z, m, parity.sign, order)


def eval_beta(z, family: BetaFamily):
    """sin(m*pi*z) - sign*beta*sin(pi*z)."""
    s = family.m * np.pi * np.abs(np.imag(z))
    with np.errstate(over="ignore"):
        scaled = _sin_scaled(family.m * np.pi * z, s) - family.sign * family.beta * _sin_scaled(
            np.pi * z, s
        )
        return scaled * np.exp(s)


def eval_beta_derivative(z, family: BetaFamily):
    """d/dz of :func:`eval_beta` (the denominator of the path ODE)."""
    return family.m * np.pi * np.cos(family.m * np.pi * z) - family.sign * family.beta * np.pi * np.cos(
        np.pi * z
    )


def eval_physical(k, medium: Medium, parity: Parity):
    """Characteristic residual in physical units, left minus right:

        (sigma-1)*sin((sigma+1)*k*L/2) -/+ (sigma+1)*sin((sigma-1)*k*L/2)

    with '-' for ODD and '+' for EVEN.  Equals (sigma-1) times the scaled
    factor at z = (sigma-1)*k*L/(2*pi); PRODUCT multiplies both residuals.
    """
    s, L = medium.sigma, medium.length
    if parity is Parity.PRODUCT:
        return eval_physical(k, medium, Parity.ODD) * eval_physical(k, medium, Parity.EVEN)
    return (s - 1.0) * np.sin((s + 1.0) * k * L / 2.0) + parity.sign * (s + 1.0) * np.sin(
        (s - 1.0) * k * L / 2.0
    )
