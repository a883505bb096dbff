"""Root and spectrum records shared by the two solver routes."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .dispersion import Parity
from .model import ScaledProblem, z_to_k


@dataclass(frozen=True)
class Root:
    """A located zero, carried jointly in scaled (z) and physical (k) coordinates.

    ``parity`` names the factor the root belongs to (PRODUCT for quadruples,
    which are a triple root of ``triple_parity`` plus a simple root of the
    other factor).  ``method`` records how it was found.
    """

    z: complex
    k: complex
    multiplicity: int
    parity: Parity
    method: str
    certified: bool = False
    triple_parity: Parity | None = None
    flags: tuple[str, ...] = ()

    @property
    def is_real(self) -> bool:
        return complex(self.z).imag == 0.0

    def certify(self) -> "Root":
        return replace(self, certified=True)


@dataclass(frozen=True)
class Spectrum:
    """All roots found in a window Re z in (lo, hi], plus solver defects."""

    problem: ScaledProblem
    window: tuple[float, float]
    roots: tuple[Root, ...]
    method: str
    defects: tuple[str, ...] = ()

    @property
    def total_multiplicity(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    def with_roots(self, roots) -> "Spectrum":
        return replace(self, roots=tuple(roots))


def sort_roots(roots) -> tuple[Root, ...]:
    return tuple(sorted(roots, key=lambda r: (complex(r.z).real, complex(r.z).imag)))


def make_root(
    z: complex,
    problem: ScaledProblem,
    multiplicity: int,
    parity: Parity,
    method: str,
    triple_parity: Parity | None = None,
    flags: tuple[str, ...] = (),
) -> Root:
    return Root(
        z=complex(z),
        k=complex(z_to_k(z, problem)),
        multiplicity=multiplicity,
        parity=parity,
        method=method,
        triple_parity=triple_parity,
        flags=flags,
    )


def in_window(z: complex, lo: float, hi: float) -> bool:
    """Window membership Re z in (lo, hi] with a relative guard at both ends."""
    tol = 1e-12 * max(1.0, abs(hi))
    x = complex(z).real
    return x > lo + tol and x <= hi + tol
