"""Problem data and coordinate normalization.

A medium is a constant index of refraction sigma on an interval of length L.
All root finding happens in the scaled coordinate z = (sigma-1)*k*L/(2*pi),
where the characteristic equations depend on the single contrast parameter
m = (sigma+1)/(sigma-1) > 1.  Media with sigma < 1 are folded onto the
reciprocal medium 1/sigma > 1; their wavenumbers are recovered from the
identity k_j(1/sigma) = sigma * k_j(sigma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

RATIONAL_TOL = 1e-12
DEFAULT_MAX_DENOMINATOR = 1000


@dataclass(frozen=True)
class Medium:
    """Physical problem data: index of refraction and interval length."""

    sigma: float
    length: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.sigma == 1:
            raise ValueError("sigma must differ from 1")
        if not self.length > 0:
            raise ValueError("length must be positive")


@dataclass(frozen=True)
class ScaledProblem:
    """Normalized parameters in which all root finding happens.

    ``m`` is the contrast (sigma_eff+1)/(sigma_eff-1) > 1 and ``z_scale``
    maps wavenumbers to scaled roots, z = z_scale * k_eff.  When the input
    medium had sigma < 1, ``reciprocal_applied`` is set and physical
    wavenumbers pick up a factor sigma_effective.
    """

    m: float
    z_scale: float
    reciprocal_applied: bool
    sigma_effective: float

    def __post_init__(self):
        if not self.m > 1:
            raise ValueError("contrast m must exceed 1")
        if not self.z_scale > 0:
            raise ValueError("z_scale must be positive")

    @property
    def sigma(self) -> float:
        """Index of refraction of the original medium."""
        if self.reciprocal_applied:
            return 1.0 / self.sigma_effective
        return self.sigma_effective

    @property
    def length(self) -> float:
        return 2.0 * math.pi * self.z_scale / (self.sigma_effective - 1.0)


@dataclass(frozen=True)
class RationalM:
    """Reduced rational contrast m = p/q > 1; ``exact`` marks non-approximated input."""

    p: int
    q: int
    exact: bool

    def __post_init__(self):
        if self.q < 1 or self.p <= self.q:
            raise ValueError("need p > q >= 1 so that m = p/q > 1")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("p/q must be reduced")

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __float__(self) -> float:
        return self.p / self.q


def make_medium(sigma: float, length: float) -> Medium:
    """Validated constructor; rejects sigma <= 0, sigma == 1, length <= 0."""
    return Medium(float(sigma), float(length))


def normalize(medium: Medium) -> ScaledProblem:
    """Fold sigma < 1 onto the reciprocal medium and compute (m, z_scale)."""
    if medium.sigma > 1:
        sigma_eff, reciprocal = float(medium.sigma), False
    else:
        sigma_eff, reciprocal = 1.0 / medium.sigma, True
    m = (sigma_eff + 1.0) / (sigma_eff - 1.0)
    z_scale = (sigma_eff - 1.0) * medium.length / (2.0 * math.pi)
    return ScaledProblem(
        m=m,
        z_scale=z_scale,
        reciprocal_applied=reciprocal,
        sigma_effective=sigma_eff,
    )


def problem_for(sigma: float, length: float) -> ScaledProblem:
    return normalize(make_medium(sigma, length))


def z_to_k(z: complex, problem: ScaledProblem) -> complex:
    """Scaled root -> physical wavenumber (reciprocal media rescale by sigma_eff)."""
    k = z / problem.z_scale
    if problem.reciprocal_applied:
        k = k * problem.sigma_effective
    return k


def k_to_z(k: complex, problem: ScaledProblem) -> complex:
    """Inverse of :func:`z_to_k`."""
    if problem.reciprocal_applied:
        k = k / problem.sigma_effective
    return k * problem.z_scale


def contrast_from_sigma(sigma: Fraction) -> Fraction:
    """Exact contrast of a rational sigma (reciprocal rule applied)."""
    if sigma <= 0 or sigma == 1:
        raise ValueError("sigma must be positive and differ from 1")
    s = sigma if sigma > 1 else 1 / sigma
    return (s + 1) / (s - 1)


def detect_rational(
    m_input: float | Fraction | int,
    max_denominator: int = DEFAULT_MAX_DENOMINATOR,
) -> RationalM | None:
    """Recognize a rational contrast.

    Exact rational inputs pass through reduced (``exact=True``).  Floats are
    approximated by continued fractions and accepted only when the
    approximation error is below ``RATIONAL_TOL`` with denominator at most
    ``max_denominator`` (``exact=False``).  Returns None when no acceptable
    rational exists.
    """
    if isinstance(m_input, (int, Fraction)):
        frac = Fraction(m_input)
        if frac <= 1:
            raise ValueError("contrast m must exceed 1")
        return RationalM(frac.numerator, frac.denominator, exact=True)
    x = float(m_input)
    if not x > 1:
        raise ValueError("contrast m must exceed 1")
    frac = Fraction(x).limit_denominator(max_denominator)
    if frac > 1 and abs(x - float(frac)) < RATIONAL_TOL:
        return RationalM(frac.numerator, frac.denominator, exact=False)
    return None
