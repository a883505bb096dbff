"""Weak- and strong-scatterer limits and the root counting functions.

In the weak limit the characteristic equation degenerates to pi*z = +/-
sin(pi*z) (all nonzero roots complex); in the strong limit the odd family
approaches rescaled solutions of x = tan(x) and the even family the
Dirichlet-type values 2*pi*j/(sigma*L) (all roots real).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

from . import roots as rt
from .model import Medium, ScaledProblem, z_to_k

BORN_RESIDUAL_TOL = 1e-12


class NonconvergenceError(RuntimeError):
    def __init__(self, message: str, seed: complex):
        super().__init__(f"{message} (seed {seed:.6g})")
        self.seed = seed


class UncertifiedInputError(RuntimeError):
    """Counting requires a defect-free, certified spectrum."""


@dataclass(frozen=True)
class BornRoot:
    """A nonzero weak-limit root: pi*z = sign * sin(pi*z), Re z in (j, j+1)."""

    j: int
    sign: int
    z: complex

    def k(self, length: float) -> complex:
        return math.pi * self.z / length


@dataclass(frozen=True)
class CountingResult:
    window_width: float
    computed: int
    predicted: float
    real_only: bool
    convention: str = "quadruple-as-2+2"

    @property
    def deviation(self) -> float:
        return abs(self.computed - self.predicted)


def born_equation_sign(j: int) -> int:
    """Which sign's equation owns the pair in strip (j, j+1): '+' for even j.

    Determined numerically by winding/Newton checks; the commonly printed
    odd/even assignment is the mirror of this one.
    """
    return 1 if j % 2 == 0 else -1


def born_asymptotic(j: int) -> complex:
    """Printed leading-order reference value (j+1/2) + i*log(2|j+1/2|).

    The defining equation's true leading order has imaginary part
    log(2*pi*(j+1/2))/pi; see :func:`born_leading_order`.  Both are kept so the
    discrepancy is measurable.
    """
    if j in (-1, 0):
        raise ValueError("strips -1 and 0 hold only the trivial root at z=0")
    return (j + 0.5) + 1j * math.log(2.0 * abs(j + 0.5))


def born_leading_order(j: int) -> complex:
    """Leading-order root (j+1/2) + i*log(2*pi*|j+1/2|)/pi of pi*z = +/- sin(pi*z)."""
    if j in (-1, 0):
        raise ValueError("strips -1 and 0 hold only the trivial root at z=0")
    return (j + 0.5) + 1j * math.log(2.0 * math.pi * abs(j + 0.5)) / math.pi


def born_root(j: int, sign: int | None = None) -> BornRoot:
    """Upper-half root in strip (j, j+1) by Newton from the leading order."""
    if j in (-1, 0):
        raise ValueError("strips -1 and 0 hold only the trivial root at z=0")
    if sign is None:
        sign = born_equation_sign(j)
    seed = born_leading_order(j)
    z = seed
    for _ in range(200):
        f = math.pi * z - sign * cmath.sin(math.pi * z)
        fp = math.pi - sign * math.pi * cmath.cos(math.pi * z)
        step = f / fp
        z = z - step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    residual = abs(math.pi * z - sign * cmath.sin(math.pi * z))
    if residual > BORN_RESIDUAL_TOL * max(1.0, abs(z)) or not (j <= z.real <= j + 1):
        raise NonconvergenceError(
            f"weak-limit Newton failed in strip ({j}, {j + 1})", seed
        )
    return BornRoot(j=j, sign=sign, z=z)


def born_roots(j_values: Iterable[int], sign: int | None = None) -> list[BornRoot]:
    """Conjugate pairs per strip.

    ``sign=None`` assigns each strip its own equation; a fixed sign restricts
    the output to the strips that sign actually owns.
    """
    out: list[BornRoot] = []
    for j in j_values:
        own = born_equation_sign(j)
        if sign is not None and sign != own:
            continue
        upper = born_root(j, own)
        out.append(upper)
        out.append(BornRoot(j=j, sign=own, z=upper.z.conjugate()))
    return out


def _bisect_then_newton(g, dg, a: float, b: float) -> float:
    ga = g(a)
    while b - a > 1e-13 * max(1.0, abs(b)):
        mid = 0.5 * (a + b)
        gm = g(mid)
        if (ga < 0) != (gm < 0):
            b = mid
        else:
            a, ga = mid, gm
    x = 0.5 * (a + b)
    for _ in range(4):
        d = dg(x)
        if d == 0:
            break
        x = x - g(x) / d
    return x


def strong_odd_roots(j_max: int) -> list[float]:
    """Positive solutions x_j of x = tan(x), one per branch ((j-1/2)pi, (j+1/2)pi).

    Solved as x*cos(x) - sin(x) = 0, which is singularity-free on the branch;
    x = 0 is excluded.  Callers rescale by 2/((sigma-1)*L) for wavenumbers.
    """
    if j_max < 1:
        raise ValueError("j_max must be at least 1")
    g = lambda x: x * math.cos(x) - math.sin(x)
    dg = lambda x: -x * math.sin(x)
    out = []
    for j in range(1, j_max + 1):
        a, b = (j - 0.5) * math.pi + 1e-12, (j + 0.5) * math.pi - 1e-12
        out.append(_bisect_then_newton(g, dg, a, b))
    return out


def strong_even_bvp_roots(j_max: int) -> list[float]:
    """Positive solutions of the cotangent variant x = -cot(x) (even boundary family),
    one per branch (j*pi, (j+1)*pi)."""
    if j_max < 1:
        raise ValueError("j_max must be at least 1")
    g = lambda x: x * math.sin(x) + math.cos(x)
    dg = lambda x: x * math.cos(x)
    out = []
    for j in range(1, j_max + 1):
        a, b = j * math.pi + 1e-12, (j + 1) * math.pi - 1e-12
        out.append(_bisect_then_newton(g, dg, a, b))
    return out


def boundary_identity_residual(x: float, medium: Medium) -> float:
    """Residual of (L/2)*v'(L/2) = v(L/2) with v = sin(k*sigma*.) and k = 2x/(sigma*L).

    Vanishes exactly at the tan-equation solutions, tying the strong limit to
    the self-adjoint boundary value problem it converges to.
    """
    k = 2.0 * x / (medium.sigma * medium.length)
    half = medium.length / 2.0
    arg = k * medium.sigma * half
    return abs(half * k * medium.sigma * math.cos(arg) - math.sin(arg)) / max(1.0, abs(x))


def strong_even_limit(j: int, medium: Medium) -> float:
    """Dirichlet-type limit 2*pi*j/(sigma*L) of the even family."""
    if j < 1:
        raise ValueError("j must be at least 1")
    return 2.0 * math.pi * j / (medium.sigma * medium.length)


def counting(
    spectrum: rt.Spectrum,
    width: float,
    real_only: bool = False,
    *,
    require_certified: bool = True,
) -> CountingResult:
    """Number of (all or real) wavenumbers with Re k in (0, width].

    Quadruples are counted as two real plus two non-real roots.  Predictions
    are (sigma+1)*L*W/pi for all roots and (sigma-1)*L*W/pi for real ones.
    """
    problem: ScaledProblem = spectrum.problem
    if require_certified:
        if spectrum.defects:
            raise UncertifiedInputError("spectrum carries solver defects")
        if any(not r.certified for r in spectrum.roots):
            raise UncertifiedInputError("spectrum has uncertified roots")
    k_hi = complex(z_to_k(spectrum.window[1], problem)).real
    if width > k_hi + 1e-9 * max(1.0, k_hi):
        raise UncertifiedInputError(
            f"spectrum window covers Re k up to {k_hi:.6g}, counting needs {width:.6g}"
        )
    total = 0
    real = 0
    for root in spectrum.roots:
        re_k = complex(root.k).real
        if not (0.0 < re_k <= width * (1.0 + 1e-12)):
            continue
        total += root.multiplicity
        if root.multiplicity == 4:
            real += 2
        elif root.is_real:
            real += root.multiplicity
    sigma, L = problem.sigma, problem.length
    if real_only:
        predicted = abs(sigma - 1.0) * L * width / math.pi
        return CountingResult(width, real, predicted, real_only=True)
    predicted = (sigma + 1.0) * L * width / math.pi
    return CountingResult(width, total, predicted, real_only=False)
