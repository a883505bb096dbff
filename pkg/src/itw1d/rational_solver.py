"""Polynomial route for rational contrast m = p/q.

The substitution w = exp(i*pi*z/q) turns each dispersion factor into a monic
degree-2p polynomial with rational coefficients,

    odd:  w^(2p) - 1 - (p/q)*(w^(p+q) - w^(p-q))
    even: w^(2p) - 1 + (p/q)*(w^(p+q) - w^(p-q))

whose roots are found all at once by Ehrlich-Aberth iteration, clustered into
multiple roots, and lifted back to the periodic z-families
z0 + 2*q*t, t integer.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import roots as rt
from .dispersion import Parity, eval_factor, newton_residual
from .model import RationalM, ScaledProblem

DEFAULT_CLUSTER_RADIUS = 1e-6
DEFAULT_MAX_ITERATIONS = 200
REAL_AXIS_SNAP = 1e-10
# double-precision Aberth stagnates on a multiplicity-mu root in a mu-gon of
# radius ~ (eps*sum|c|)^(1/mu); the link radius must sit above it for mu <= 3
SPREAD_SAFETY = 8.0


class NonconvergenceError(RuntimeError):
    def __init__(self, message: str, worst_residual: float):
        super().__init__(f"{message} (worst residual {worst_residual:.3e})")
        self.worst_residual = worst_residual


@dataclass(frozen=True)
class FactorPolynomial:
    """Monic degree-2p polynomial in w for one parity; coefficients ascending, exact."""

    parity: Parity
    p: int
    q: int
    coefficients: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return 2 * self.p

    def descending_floats(self) -> np.ndarray:
        return np.array([float(c) for c in reversed(self.coefficients)])


@dataclass(frozen=True)
class ClusteredRoot:
    w: complex
    multiplicity: int
    refinement_residual: float


def build_polynomial(rm: RationalM, parity: Parity) -> FactorPolynomial:
    """Coefficients of w^(2p) - 1 -/+ (p/q)(w^(p+q) - w^(p-q)); '-' for ODD."""
    if parity is Parity.PRODUCT:
        raise ValueError("build one parity at a time")
    p, q = rm.p, rm.q
    coeffs = [Fraction(0)] * (2 * p + 1)
    coeffs[0] = Fraction(-1)
    coeffs[2 * p] = Fraction(1)
    ratio = Fraction(p, q)
    if parity is Parity.ODD:
        coeffs[p + q] += -ratio
        coeffs[p - q] += ratio
    else:
        coeffs[p + q] += ratio
        coeffs[p - q] += -ratio
    return FactorPolynomial(parity=parity, p=p, q=q, coefficients=tuple(coeffs))


def _aberth(coeffs_desc: np.ndarray, max_iterations: int) -> np.ndarray:
    n = len(coeffs_desc) - 1
    deriv_desc = coeffs_desc[:-1] * np.arange(n, 0, -1)
    radius = 1.0 + np.max(np.abs(coeffs_desc[1:]))
    angles = 2.0 * np.pi * np.arange(n) / n + 0.40137
    x = radius * np.exp(1j * angles)
    abs_coeffs = np.abs(coeffs_desc)
    eps = np.finfo(float).eps

    for _ in range(max_iterations):
        pv = np.polyval(coeffs_desc, x)
        dpv = np.polyval(deriv_desc, x)
        backward = np.polyval(abs_coeffs, np.abs(x))
        settled = np.abs(pv) <= 4.0 * eps * backward
        dpv = np.where(dpv == 0, eps, dpv)
        newton = pv / dpv
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        repulsion = np.sum(1.0 / diff, axis=1)
        step = np.where(settled, 0.0, newton / (1.0 - newton * repulsion))
        x = x - step
        if np.all(settled | (np.abs(step) < 1e-14 * (1.0 + np.abs(x)))):
            return x
    pv = np.polyval(coeffs_desc, x)
    backward = np.polyval(abs_coeffs, np.abs(x))
    worst = float(np.max(np.abs(pv) / np.maximum(backward, 1.0)))
    raise NonconvergenceError(
        f"simultaneous iteration did not settle after {max_iterations} iterations", worst
    )


def _link_clusters(points: np.ndarray, radius: float) -> list[list[int]]:
    n = len(points)
    scale = np.maximum(1.0, np.abs(points))
    link = np.abs(points[:, None] - points[None, :]) <= radius * np.maximum(
        scale[:, None], scale[None, :]
    )
    seen = np.zeros(n, dtype=bool)
    clusters = []
    for i in range(n):
        if seen[i]:
            continue
        stack, members = [i], []
        seen[i] = True
        while stack:
            a = stack.pop()
            members.append(a)
            for b in np.nonzero(link[a] & ~seen)[0]:
                seen[b] = True
                stack.append(int(b))
        clusters.append(sorted(members))
    return clusters


def _newton_polish(coeffs_desc: np.ndarray, z: complex, iterations: int = 60) -> complex:
    deriv_desc = coeffs_desc[:-1] * np.arange(len(coeffs_desc) - 1, 0, -1)
    for _ in range(iterations):
        fv = np.polyval(coeffs_desc, z)
        dv = np.polyval(deriv_desc, z)
        if dv == 0:
            break
        step = fv / dv
        z = z - step
        if abs(step) < 1e-15 * (1.0 + abs(z)):
            break
    return complex(z)


def solve_polynomial(
    poly: FactorPolynomial,
    *,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
) -> list[ClusteredRoot]:
    """All roots with multiplicities; multiplicities sum to the degree.

    Ehrlich-Aberth from points on a circle just above the Cauchy bound, then
    single-linkage clustering (cluster size = multiplicity) and refinement of
    each cluster center on the (multiplicity-1)-th derivative, which has a
    simple zero there.  A merged cluster failing the residual validation is
    split back into simple roots.
    """
    coeffs_desc = poly.descending_floats()
    points = _aberth(coeffs_desc, max_iterations)

    coeff_sum = float(np.sum(np.abs(coeffs_desc)))
    eps = np.finfo(float).eps
    spread = SPREAD_SAFETY * (eps * coeff_sum) ** (1.0 / 3.0)
    link_radius = max(cluster_radius, spread)

    derivs = [coeffs_desc]
    while len(derivs) < 6:
        prev = derivs[-1]
        derivs.append(prev[:-1] * np.arange(len(prev) - 1, 0, -1))

    out: list[ClusteredRoot] = []
    for members in _link_clusters(points, link_radius):
        mult = len(members)
        center = complex(np.mean(points[members]))
        if mult == 1:
            center = _newton_polish(coeffs_desc, center)
        else:
            # P^(mult-1) has a simple zero at a genuine multiplicity-mult root
            center = _newton_polish(derivs[min(mult - 1, len(derivs) - 1)], center)
        valid = abs(np.polyval(coeffs_desc, center)) <= 1e-8 * coeff_sum * max(1.0, abs(center)) ** poly.degree
        if mult > 1 and not valid:
            for idx in members:
                w = _newton_polish(coeffs_desc, complex(points[idx]))
                out.append(ClusteredRoot(w=w, multiplicity=1, refinement_residual=_residual(derivs, w, 1)))
            continue
        out.append(ClusteredRoot(w=center, multiplicity=mult, refinement_residual=_residual(derivs, center, mult)))

    total = sum(c.multiplicity for c in out)
    if total != poly.degree:
        raise NonconvergenceError(
            f"clustered multiplicities sum to {total}, expected {poly.degree}", math.nan
        )
    return sorted(out, key=lambda c: (c.w.real, c.w.imag))


def _residual(derivs, w: complex, mult: int) -> float:
    # Newton-step length on the derivative that has a simple zero at w
    num = np.polyval(derivs[mult - 1], w)
    den = np.polyval(derivs[mult], w)
    if num == 0:
        return 0.0
    if den == 0:
        return float(abs(num))
    return float(abs(num / den))


def _confirm_real_axis(x: float, m: float, parity: Parity) -> bool:
    # a real root of odd multiplicity produces a sign change across it
    for h in (1e-7, 1e-5, 1e-4, 1e-3):
        left = eval_factor(x - h, m, parity).real
        right = eval_factor(x + h, m, parity).real
        if left == 0.0 or right == 0.0:
            continue
        if (left < 0) != (right < 0):
            return True
    return False


def lift_roots(
    clustered: list[ClusteredRoot],
    rm: RationalM,
    window: tuple[float, float],
    problem: ScaledProblem,
    parity: Parity,
) -> list[rt.Root]:
    """Lift w-roots to every z-family member z0 + 2*q*t inside the window.

    |w| = 1 corresponds to real z; a root is snapped to the real axis only
    when |log|w|| is below ``REAL_AXIS_SNAP`` and a sign-change bracket
    confirms it, otherwise it is kept complex and flagged.
    """
    lo, hi = window
    q = rm.q
    m = float(rm)
    out: list[rt.Root] = []
    for cluster in clustered:
        logw = cmath.log(cluster.w)
        x0 = (q / math.pi) * logw.imag
        y0 = -(q / math.pi) * logw.real
        flags: tuple[str, ...] = ()
        if abs(logw.real) < REAL_AXIS_SNAP:
            if _confirm_real_axis(x0 if abs(x0) > 1e-9 else x0 + 2 * q, m, parity):
                y0 = 0.0
            else:
                flags = ("unconfirmed-real",)
        period = 2 * q
        t_min = math.floor((lo - x0) / period) - 1
        t_max = math.ceil((hi - x0) / period) + 1
        for t in range(t_min, t_max + 1):
            x = x0 + period * t
            if abs(x) < 1e-12 and y0 == 0.0:
                continue  # trivial root at z=0
            z = complex(x, y0)
            if rt.in_window(z, lo, hi):
                out.append(
                    rt.make_root(z, problem, cluster.multiplicity, parity, "rational", flags=flags)
                )
    return out


def _merge_colocated(found: list[rt.Root], problem: ScaledProblem) -> list[rt.Root]:
    # odd and even roots landing at the same z form one product root (a quadruple)
    found = sorted(found, key=lambda r: (r.z.real, r.z.imag))
    out: list[rt.Root] = []
    used = [False] * len(found)
    for i, a in enumerate(found):
        if used[i]:
            continue
        partner = None
        for j in range(i + 1, len(found)):
            if used[j]:
                continue
            b = found[j]
            if abs(b.z - a.z) > 1e-8:
                break
            if b.parity is not a.parity:
                partner = j
                break
        if partner is None:
            out.append(a)
            used[i] = True
            continue
        b = found[partner]
        triple = a if a.multiplicity >= b.multiplicity else b
        z = a.z
        if abs(z.imag) == 0.0 and abs(z.real - round(z.real)) < 1e-9:
            z = complex(round(z.real))
        out.append(
            rt.make_root(
                z,
                problem,
                a.multiplicity + b.multiplicity,
                Parity.PRODUCT,
                "rational",
                triple_parity=triple.parity,
            )
        )
        used[i] = used[partner] = True
    return out


def spectrum_rational(
    problem: ScaledProblem,
    rm: RationalM,
    window: tuple[float, float],
    *,
    cluster_radius: float = DEFAULT_CLUSTER_RADIUS,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> rt.Spectrum:
    """Union of lifted odd and even roots over the window, quadruples merged."""
    if abs(float(rm) - problem.m) > 1e-9:
        raise ValueError("rational contrast does not match the problem")
    found: list[rt.Root] = []
    for parity in (Parity.ODD, Parity.EVEN):
        poly = build_polynomial(rm, parity)
        clustered = solve_polynomial(
            poly, max_iterations=max_iterations, cluster_radius=cluster_radius
        )
        found.extend(lift_roots(clustered, rm, window, problem, parity))
    merged = _merge_colocated(found, problem)
    bad = [r for r in merged if _root_residual(r, problem.m) > 1e-9]
    defects = tuple(
        f"rational root {r.z!r} has residual above tolerance" for r in bad
    )
    return rt.Spectrum(
        problem=problem,
        window=window,
        roots=rt.sort_roots(merged),
        method="rational",
        defects=defects,
    )


def _root_residual(root: rt.Root, m: float) -> float:
    if root.parity is Parity.PRODUCT:
        triple = root.triple_parity or Parity.ODD
        return max(
            newton_residual(root.z, m, triple, multiplicity=3),
            newton_residual(root.z, m, triple.other, multiplicity=1),
        )
    return newton_residual(root.z, m, root.parity, multiplicity=root.multiplicity)
