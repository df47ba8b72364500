"""Sheaf cohomology of line bundles on ``P(V)`` over the projective line.

For fibre degree ``a >= 0`` the pushforward of ``O(aE + bH)`` to the base is
``Sym^a(V^*) (b)``, a sum of line bundles, and higher direct images vanish.
For ``-(r-1) <= a <= -1`` everything vanishes, and for ``a <= -r`` global
Serre duality against ``K_Y`` brings us back to ``a >= 0``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

from .chowring import CONIFOLD, BundleGeometry, DivisorClass, canonical_class
from .errors import SodError


@dataclass(frozen=True)
class CohomologyVector:
    """Dimensions ``h^0, ..., h^dim`` of a line bundle (or of Ext groups)."""

    h: tuple[int, ...]

    def __post_init__(self):
        if any(x < 0 for x in self.h):
            raise ValueError(f"negative cohomology dimension in {self.h}")

    def __getitem__(self, i: int) -> int:
        return self.h[i] if 0 <= i < len(self.h) else 0

    def __iter__(self):
        return iter(self.h)

    def __len__(self) -> int:
        return len(self.h)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * x for i, x in enumerate(self.h))

    def is_zero(self) -> bool:
        return not any(self.h)

    def reversed(self) -> "CohomologyVector":
        return CohomologyVector(self.h[::-1])

    def to_json(self) -> list[int]:
        return list(self.h)


def p1_cohomology(n: int) -> tuple[int, int]:
    """``(h^0, h^1)`` of ``O(n)`` on the projective line."""
    return max(n + 1, 0), max(-n - 1, 0)


def pushforward_summands(a: int, b: int, g: BundleGeometry = CONIFOLD) -> Counter:
    """Degrees of the line bundles making up ``pi_* O(aE + bH)``, as a multiset."""
    if a < 0:
        raise SodError("negative-fiber-degree", f"fibre degree {a} < 0")
    return Counter(sum(combo) + b for combo in combinations_with_replacement(g.dual_twists, a))


@lru_cache(maxsize=None)
def line_bundle_cohomology(d: DivisorClass, g: BundleGeometry = CONIFOLD) -> CohomologyVector:
    n, r = g.dimension, g.rank
    a, b = d.e, d.h
    if a >= 0:
        h = [0] * (n + 1)
        for deg, mult in pushforward_summands(a, b, g).items():
            h0, h1 = p1_cohomology(deg)
            h[0] += mult * h0
            h[1] += mult * h1
        return CohomologyVector(tuple(h))
    if a > -r:
        return CohomologyVector((0,) * (n + 1))
    return line_bundle_cohomology(canonical_class(g) - d, g).reversed()


def rhom_dims(src: DivisorClass, dst: DivisorClass, g: BundleGeometry = CONIFOLD) -> CohomologyVector:
    """``dim Ext^i(O(src), O(dst))`` for all ``i``."""
    return line_bundle_cohomology(dst - src, g)
