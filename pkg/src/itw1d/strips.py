"""Strip combinatorics: predicted root content of each vertical band.

The complex plane splits into strips j/m < Re z < (j+1)/m.  Away from the
degenerate case j/m integer, every strip carries exactly two roots of the
product of factors; whether they are real or a conjugate pair, and which
factor holds them, is decided by integer containment and the parity of
j + floor(j/m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dispersion import Parity
from .model import RationalM, ScaledProblem, detect_rational

INTEGER_GUARD = 1e-12


class AmbiguousStripError(ValueError):
    """j/m is within the float guard band of an integer and m is not exactly rational."""


@dataclass(frozen=True)
class Strip:
    j: int
    lo: float
    hi: float


@dataclass(frozen=True)
class RealPair:
    """Two real roots straddling the integer k0: left factor in (lo, k0), right in (k0, hi)."""

    k0: int
    left_parity: Parity
    right_parity: Parity


@dataclass(frozen=True)
class ComplexPair:
    """A conjugate pair with nonzero imaginary part, both roots in the carrier factor."""

    carrier: Parity


@dataclass(frozen=True)
class Quadruple:
    """Total multiplicity 4 at z0 = j/m: triple in one factor, simple in the other."""

    z0: float
    triple: Parity
    simple: Parity


@dataclass(frozen=True)
class AdjacentEmpty:
    """Strip guaranteed empty because it flanks the quadruple owned by strip ``owner``."""

    owner: int


StripClass = RealPair | ComplexPair | Quadruple | AdjacentEmpty


def floor_parity(j: int, m: RationalM | float) -> int:
    """Parity (0 = even, 1 = odd) of j + floor(j/m).

    Exact integer arithmetic for a RationalM; floats carry a guard band of
    ``INTEGER_GUARD`` around integers, inside which the parity is ambiguous.
    """
    if isinstance(m, RationalM):
        return (j + (j * m.q) // m.p) % 2
    if j == 0:
        return 0
    t = j / float(m)
    if abs(t - round(t)) < INTEGER_GUARD:
        raise AmbiguousStripError(
            f"j/m = {t!r} is within {INTEGER_GUARD} of an integer for non-rational m={m!r}"
        )
    return (j + math.floor(t)) % 2


def _multiple_point(j: int, m: float, rm: RationalM | None) -> int | None:
    """The integer j/m when it is one, else None (exact for rational m)."""
    if j == 0:
        return 0
    if rm is not None:
        if (j * rm.q) % rm.p == 0:
            return (j * rm.q) // rm.p
        return None
    t = j / m
    r = round(t)
    if abs(t - r) < INTEGER_GUARD:
        raise AmbiguousStripError(
            f"j/m = {t!r} is within {INTEGER_GUARD} of integer {r} for non-rational m={m!r}"
        )
    return None


def _quadruple_parities(jpf: int) -> tuple[Parity, Parity]:
    # even floor parity: triple root sits in the odd factor
    if jpf % 2 == 0:
        return Parity.ODD, Parity.EVEN
    return Parity.EVEN, Parity.ODD


def strip_bounds(j: int, problem: ScaledProblem, rm: RationalM | None = None) -> Strip:
    if rm is not None:
        return Strip(j=j, lo=j * rm.q / rm.p, hi=(j + 1) * rm.q / rm.p)
    return Strip(j=j, lo=j / problem.m, hi=(j + 1) / problem.m)


def classify(j: int, problem: ScaledProblem, rm: RationalM | None = None) -> StripClass:
    """Predicted root content of strip j.

    ``rm=None`` auto-detects a rational contrast so that boundary decisions
    use exact integer arithmetic whenever possible.  The convention for which
    factor carries which root follows the small-deformation analysis (whose
    conclusions persist for all deformation amplitudes) and is confirmed by
    contour counting; see the certification report's convention notes.
    """
    if j < 0:
        raise ValueError("strip index must be nonnegative")
    if rm is None:
        rm = detect_rational(problem.m)
    m = problem.m

    z0 = _multiple_point(j, m, rm)
    if z0 is not None:
        if j == 0:
            # the root at z=0 has a trivial eigenfunction pair and is never reported
            return AdjacentEmpty(owner=0)
        jpf = floor_parity(j, rm if rm is not None else m)
        triple, simple = _quadruple_parities(jpf)
        return Quadruple(z0=float(z0), triple=triple, simple=simple)

    if _multiple_point(j + 1, m, rm) is not None:
        return AdjacentEmpty(owner=j + 1)

    if rm is not None:
        k0 = ((j + 1) * rm.q) // rm.p
        contains = k0 * rm.p > j * rm.q
    else:
        k0 = math.floor((j + 1) / m)
        contains = k0 > j / m
    jpf = floor_parity(j, rm if rm is not None else m)

    if contains:
        if jpf % 2 == 0:
            return RealPair(k0=k0, left_parity=Parity.ODD, right_parity=Parity.EVEN)
        return RealPair(k0=k0, left_parity=Parity.EVEN, right_parity=Parity.ODD)
    return ComplexPair(carrier=Parity.EVEN if jpf % 2 == 1 else Parity.ODD)


def predicted_root_count(sc: StripClass) -> int:
    """Multiplicity-weighted root count predicted for a strip."""
    if isinstance(sc, (RealPair, ComplexPair)):
        return 2
    if isinstance(sc, Quadruple):
        return 4
    return 0


def strips_in_window(
    problem: ScaledProblem,
    lo: float,
    hi: float,
    rm: RationalM | None = None,
) -> list[tuple[Strip, StripClass]]:
    """Contiguous strip coverage of the window Re z in (lo, hi].

    A strip is included when its open interval meets the window, or when it
    owns a quadruple point lying inside the window (quadruples sit on the
    strip's left edge, so the point can belong to the window even when the
    interval does not).
    """
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("window bounds must be finite")
    if lo < 0 or hi <= lo:
        raise ValueError("need 0 <= lo < hi")
    if rm is None:
        rm = detect_rational(problem.m)
    m = problem.m
    tol = 1e-12 * max(1.0, abs(hi))

    out: list[tuple[Strip, StripClass]] = []
    j = max(0, math.floor(lo * m) - 1)
    j_stop = math.ceil(hi * m) + 1
    while j <= j_stop:
        strip = strip_bounds(j, problem, rm)
        sc = classify(j, problem, rm)
        interval_meets = strip.lo < hi - tol and strip.hi > lo + tol
        quad_in_window = isinstance(sc, Quadruple) and lo + tol < sc.z0 <= hi + tol
        if interval_meets or quad_in_window:
            out.append((strip, sc))
        elif out:
            break
        j += 1
    return out
