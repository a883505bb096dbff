"""Strip-by-strip root finding for arbitrary contrast m > 1.

The strip classification supplies a search plan per strip: bracketed
bisection for real roots, winding-seeded Newton in a rectangle for conjugate
pairs, and closed-form quadruples at integer z = j/m.  A deformation-path
tracker mirrors the continuation argument behind the classification; it is
validation grade, the production path is bracketing plus winding counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import certify as ct
from . import roots as rt
from . import strips as st
from .dispersion import (
    BetaFamily,
    Parity,
    eval_beta,
    eval_beta_derivative,
    eval_factor,
    factor_derivative_scaled,
    factor_scaled,
    imag_bound,
    newton_residual,
)
from .model import RationalM, ScaledProblem, detect_rational

BISECTION_WIDTH = 1e-13
PAIR_RESIDUAL_TOL = 1e-12
PAIR_IMAG_FLOOR = 1e-8
COLLISION_TOL = 1e-6
PATH_RESIDUAL_TOL = 1e-9


class NoBracketError(RuntimeError):
    """No sign change found where the classification promised a real root."""


class CountMismatchError(RuntimeError):
    def __init__(self, message: str, winding: int):
        super().__init__(message)
        self.winding = winding


@dataclass(frozen=True)
class HomotopyPath:
    j: int
    m: float
    sign: int
    samples: tuple[tuple[float, complex], ...]
    terminated_by: str


def _bisect(f, a: float, b: float) -> float:
    fa, fb = f(a), f(b)
    while b - a > BISECTION_WIDTH:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fa < 0) != (fm < 0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def real_root_in(
    lo: float,
    hi: float,
    problem: ScaledProblem,
    parity: Parity,
    *,
    scan: int = 64,
) -> rt.Root:
    """The real factor root in (lo, hi): bisection to 1e-13, then Newton polish."""
    m = problem.m

    def f(x: float) -> float:
        return float(eval_factor(x, m, parity).real)

    a, b = lo, hi
    if not (f(a) < 0) != (f(b) < 0):
        grid = np.linspace(lo, hi, scan + 1)
        values = eval_factor(grid, m, parity).real
        signs = np.sign(values)
        changes = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
        if len(changes) == 0:
            raise NoBracketError(
                f"no sign change of the {parity.value} factor on ({lo}, {hi}) with m={m}"
            )
        a, b = float(grid[changes[0]]), float(grid[changes[0] + 1])
    x = _bisect(f, a, b)
    for _ in range(6):
        step = newton_residual(x, m, parity)
        dv = factor_derivative_scaled(x, m, parity)
        if dv == 0:
            break
        candidate = x - float((factor_scaled(x, m, parity) / dv).real)
        if not lo < candidate < hi:
            break
        x = candidate
        if step < 1e-15 * max(1.0, abs(x)):
            break
    return rt.make_root(x, problem, 1, parity, "analytic")


def complex_pair_in(
    strip: st.Strip,
    problem: ScaledProblem,
    parity: Parity,
) -> tuple[rt.Root, rt.Root]:
    """The conjugate pair in a strip: winding count 1 in the upper rectangle,
    Newton seeded by the zero centroid, second root by conjugation."""
    m = problem.m
    height = 1.25 * imag_bound(m)
    rect = ct.Rect(strip.lo, strip.hi, PAIR_IMAG_FLOOR, height)
    winding = ct.count_factor_zeros(m, parity, rect)
    if winding != 1:
        raise CountMismatchError(
            f"expected winding 1 for the {parity.value} factor in strip {strip.j} "
            f"(m={m}), got {winding}",
            winding,
        )
    z = ct.factor_zero_centroid(m, parity, rect, count=winding)
    for _ in range(60):
        step = factor_scaled(z, m, parity) / factor_derivative_scaled(z, m, parity)
        z = z - complex(step)
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    if newton_residual(z, m, parity) > PAIR_RESIDUAL_TOL:
        raise CountMismatchError(
            f"pair refinement in strip {strip.j} did not reach tolerance", winding
        )
    if z.imag < 0:
        z = z.conjugate()
    upper = rt.make_root(z, problem, 1, parity, "analytic")
    lower = rt.make_root(z.conjugate(), problem, 1, parity, "analytic")
    return upper, lower


def spectrum_analytic(
    problem: ScaledProblem,
    window: tuple[float, float],
    rm: RationalM | None = None,
) -> rt.Spectrum:
    """Iterate the classified strips of the window and solve each one.

    Solver errors are collected as defects alongside a partial spectrum, never
    raised past this boundary.
    """
    lo, hi = window
    if rm is None:
        rm = detect_rational(problem.m)
    found: list[rt.Root] = []
    defects: list[str] = []
    for strip, sc in st.strips_in_window(problem, lo, hi, rm):
        try:
            if isinstance(sc, st.RealPair):
                for parity, (a, b) in (
                    (sc.left_parity, (strip.lo, float(sc.k0))),
                    (sc.right_parity, (float(sc.k0), strip.hi)),
                ):
                    root = real_root_in(a, b, problem, parity)
                    if rt.in_window(root.z, lo, hi):
                        found.append(root)
            elif isinstance(sc, st.ComplexPair):
                for root in complex_pair_in(strip, problem, sc.carrier):
                    if rt.in_window(root.z, lo, hi):
                        found.append(root)
            elif isinstance(sc, st.Quadruple):
                if rt.in_window(sc.z0, lo, hi):
                    found.append(
                        rt.make_root(
                            sc.z0, problem, 4, Parity.PRODUCT, "exact-quadruple",
                            triple_parity=sc.triple,
                        )
                    )
        except (NoBracketError, CountMismatchError, ct.BoundaryZeroError, ct.NonIntegerWindingError) as exc:
            defects.append(f"strip {strip.j}: {exc}")
    return rt.Spectrum(
        problem=problem,
        window=window,
        roots=rt.sort_roots(found),
        method="analytic",
        defects=tuple(defects),
    )


def initial_slope(j: int, m: float) -> float:
    """dz/dbeta at beta=0 for the root path starting at j/m.

    Equals (-1)^(j+floor(j/m)) * |sin(j*pi/m)| / (m*pi); zero when j/m is an
    integer (both terms of the deformation vanish there, the path is pinned).
    """
    t = j / m
    if abs(t - round(t)) < 1e-12:
        return 0.0
    return (-1) ** (j + math.floor(t)) * abs(math.sin(j * math.pi / m)) / (m * math.pi)


def trace_homotopy(
    j: int,
    m: float,
    beta_end: float,
    steps: int = 100,
    sign: int = 1,
) -> HomotopyPath:
    """Predictor-corrector continuation of the root starting at j/m.

    Steps along dz/dbeta = sin(pi*z) / (m*pi*cos(m*pi*z) - beta*pi*cos(pi*z))
    with Newton correction at each beta sample; stops with ``collision`` when
    the denominator magnitude falls below ``COLLISION_TOL`` (a double root is
    forming) and with ``left_strip`` if a corrected sample escapes the closed
    strip the path entered, which the continuation argument forbids.
    """
    if beta_end <= 0 or beta_end > m:
        raise ValueError("need 0 < beta_end <= m")
    z0 = j / m
    if abs(z0 - round(z0)) < 1e-12:
        betas = np.linspace(0.0, beta_end, steps + 1)
        samples = tuple((float(b), complex(round(z0))) for b in betas)
        return HomotopyPath(j=j, m=m, sign=sign, samples=samples, terminated_by="reached_target")

    slope = initial_slope(j, m) * (1 if sign == 1 else -1)
    if slope < 0:
        strip_lo, strip_hi = (j - 1) / m, j / m
    else:
        strip_lo, strip_hi = j / m, (j + 1) / m
    pad = 1e-9 / m

    def denominator(z: complex, beta: float) -> complex:
        return complex(eval_beta_derivative(z, BetaFamily(m=m, beta=beta, sign=sign)))

    def correct(z: complex, beta: float) -> complex | None:
        fam = BetaFamily(m=m, beta=beta, sign=sign)
        for it in range(60):
            fv = complex(eval_beta(z, fam))
            dv = complex(eval_beta_derivative(z, fam))
            if dv == 0:
                return None
            z = z - fv / dv
            # keep iterating near a forming double root so the collision test
            # below sees the settled state, not a loosely converged one
            if it >= 11 and abs(dv) > 100.0 * COLLISION_TOL:
                break
        if abs(complex(eval_beta(z, fam))) > PATH_RESIDUAL_TOL * max(1.0, m):
            return None
        if not (strip_lo - pad <= z.real <= strip_hi + pad):
            return None
        return z

    betas = np.linspace(0.0, beta_end, steps + 1)
    z = complex(z0)
    samples: list[tuple[float, complex]] = [(0.0, z)]
    beta = 0.0

    def stop(reason: str) -> HomotopyPath:
        if samples[-1][0] != beta:
            samples.append((float(beta), z))
        return HomotopyPath(j, m, sign, tuple(samples), reason)

    for target in (float(b) for b in betas[1:]):
        while beta < target:
            den = denominator(z, beta)
            if abs(den) < COLLISION_TOL:
                return stop("collision")
            db = target - beta
            advanced = False
            while db > 1e-13:
                z_pred = z + db * complex(np.sin(np.pi * z)) / den
                z_new = correct(z_pred, beta + db)
                if z_new is not None:
                    z, beta = z_new, beta + db
                    advanced = True
                    break
                db *= 0.5
            if not advanced:
                if abs(denominator(z, beta)) < 1e-3:
                    return stop("collision")
                return stop("left_strip")
            if abs(denominator(z, beta)) < COLLISION_TOL:
                return stop("collision")
        samples.append((float(target), z))
    return HomotopyPath(j, m, sign, tuple(samples), "reached_target")
