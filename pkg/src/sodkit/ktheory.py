"""K-classes of sheaves on ``Y`` and the Euler pairing via Hirzebruch-Riemann-Roch.

A :class:`KClass` is a formal integer combination of named :class:`SheafAtom`
objects.  Every atom caches its Chern character, so all numerical questions
(Euler pairings, Hilbert polynomials, class equality) reduce to arithmetic in
the Chow ring.  Shifts only flip signs; even shifts are invisible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Mapping

from .chowring import (
    CONIFOLD,
    BundleGeometry,
    ChowClass,
    CurveClass,
    DivisorClass,
    canonical_class,
    chern_character,
    intersect,
    todd_class,
)
from .errors import SodError


@dataclass(frozen=True)
class SheafAtom:
    name: str
    ch: ChowClass
    divisor: DivisorClass | None = None
    support_dim: int | None = None

    def __post_init__(self):
        g = self.ch.geometry
        if self.support_dim is None:
            object.__setattr__(self, "support_dim", g.dimension)
        if not 0 <= self.support_dim <= g.dimension:
            raise ValueError(f"support dimension {self.support_dim} out of range")
        if self.divisor is not None:
            if self.support_dim != g.dimension or self.ch != chern_character(self.divisor, g):
                raise ValueError(f"atom {self.name!r}: ch does not match its divisor")
        for k in range(g.dimension - self.support_dim):
            if not self.ch.component(k).is_zero():
                raise ValueError(f"atom {self.name!r}: ch has a codimension-{k} part but support dim {self.support_dim}")

    @property
    def geometry(self) -> BundleGeometry:
        return self.ch.geometry

    def _key(self):
        return (self.name, self.ch.terms, self.divisor is None, self.divisor and (self.divisor.e, self.divisor.h))


@dataclass(frozen=True)
class KClass:
    """Formal combination ``sum m_i [atom_i]``; ``terms`` is canonical (merged, sorted, nonzero)."""

    geometry: BundleGeometry
    terms: tuple[tuple[SheafAtom, int], ...] = ()

    @classmethod
    def of(cls, geometry: BundleGeometry, terms: Iterable[tuple[SheafAtom, int]]) -> "KClass":
        merged: dict[SheafAtom, int] = {}
        for atom, mult in terms:
            if atom.geometry != geometry:
                raise ValueError("atom lives on a different geometry")
            merged[atom] = merged.get(atom, 0) + mult
        items = sorted(((a, m) for a, m in merged.items() if m), key=lambda t: t[0]._key())
        return cls(geometry, tuple(items))

    @classmethod
    def zero(cls, geometry: BundleGeometry = CONIFOLD) -> "KClass":
        return cls(geometry)

    @classmethod
    def atom(cls, atom: SheafAtom) -> "KClass":
        return cls(atom.geometry, ((atom, 1),))

    @property
    def ch(self) -> ChowClass:
        out = self.geometry.zero()
        for atom, mult in self.terms:
            out = out + atom.ch * mult
        return out

    @property
    def rank(self) -> Fraction:
        return self.ch.coefficient(0, 0)

    def is_zero(self) -> bool:
        return self.ch.is_zero()

    def numerically_equal(self, other: "KClass") -> bool:
        return self.ch == other.ch

    def shift(self, n: int = 1) -> "KClass":
        return self if n % 2 == 0 else -self

    def __add__(self, other: "KClass") -> "KClass":
        if self.geometry != other.geometry:
            raise ValueError("K-classes live on different geometries")
        return KClass.of(self.geometry, self.terms + other.terms)

    def __neg__(self) -> "KClass":
        return KClass(self.geometry, tuple((a, -m) for a, m in self.terms))

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def __mul__(self, k: int) -> "KClass":
        return KClass.of(self.geometry, ((a, m * k) for a, m in self.terms))

    __rmul__ = __mul__

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for atom, m in self.terms:
            sign = "-" if m < 0 else ("+" if out else "")
            mag = "" if abs(m) == 1 else f"{abs(m)}"
            out += f"{' ' if out else ''}{sign}{' ' if out else ''}{mag}[{atom.name}]"
        return out


def line_bundle_atom(d: DivisorClass, g: BundleGeometry = CONIFOLD, name: str | None = None) -> SheafAtom:
    return SheafAtom(name or g.line_bundle_name(d), chern_character(d, g), d, g.dimension)


def kclass_of_line_bundle(d: DivisorClass, g: BundleGeometry = CONIFOLD, name: str | None = None) -> KClass:
    return KClass.atom(line_bundle_atom(d, g, name))


def curve_sheaf_ch(c: CurveClass, twist: int, g: BundleGeometry = CONIFOLD) -> ChowClass:
    """``ch(O_c(twist))`` for a smooth rational curve ``c``.

    The point coefficient is fixed by Riemann-Roch on the curve,
    ``chi = twist + 1``, together with ``td_1 . c = -(K_Y . c) / 2``.
    """
    k_dot_c = intersect(canonical_class(g), c, g)
    return g.curve_to_chow(c) + g.point() * (Fraction(twist + 1) + Fraction(k_dot_c, 2))


def kclass_of_curve_sheaf(
    c: CurveClass,
    twist: int,
    g: BundleGeometry = CONIFOLD,
    exceptional: Mapping[str, CurveClass] | None = None,
    name: str | None = None,
) -> KClass:
    """Class of ``O_c(twist)`` for a basis curve or a declared exceptional curve."""
    if c.genus != 0:
        raise SodError("non-reduced-curve", f"curve of genus {c.genus}; only rational curves are supported")
    known = {CurveClass(1, 0): g.curve_names[0], CurveClass(0, 1): g.curve_names[1]}
    for n, cc in (exceptional or {}).items():
        known[cc] = n
    if c not in known:
        raise SodError("non-reduced-curve", f"{g.format_curve(c)} is not a basis or declared exceptional curve")
    name = name or known[c]
    atom = SheafAtom(f"O_{name}({twist})", curve_sheaf_ch(c, twist, g), None, 1)
    return KClass.atom(atom)


def composite_atom(name: str, parts: KClass) -> SheafAtom:
    """A single atom standing for an object known only through its class, e.g. an extension."""
    return SheafAtom(name, parts.ch, None, parts.geometry.dimension)


def kclass_dual(f: KClass) -> KClass:
    atoms = []
    for atom, m in f.terms:
        d = -atom.divisor if atom.divisor is not None else None
        if d is not None:
            name = atom.geometry.line_bundle_name(d)
        elif atom.name.startswith("(") and atom.name.endswith(")^v"):
            name = atom.name[1:-3]
        else:
            name = f"({atom.name})^v"
        atoms.append((SheafAtom(name, atom.ch.dual(), d, atom.support_dim), m))
    return KClass.of(f.geometry, atoms)


def tensor_line_bundle(f: KClass, d: DivisorClass) -> KClass:
    """``f (x) O(d)``."""
    g = f.geometry
    twist = chern_character(d, g)
    atoms = []
    for atom, m in f.terms:
        if atom.divisor is not None:
            new = line_bundle_atom(atom.divisor + d, g)
        else:
            new = SheafAtom(f"{atom.name}({g.format_divisor(d, compact=True)})", atom.ch * twist, None, atom.support_dim)
        atoms.append((new, m))
    return KClass.of(g, atoms)


@lru_cache(maxsize=None)
def _pairing_form(geometry: BundleGeometry) -> dict[tuple, dict[tuple, Fraction]]:
    """``deg(m1^v m2 td)`` for basis monomials; the pairing is bilinear in ch."""
    td = todd_class(geometry)
    basis = [(i, j) for i in (0, 1) for j in range(geometry.rank)]
    form = {}
    for m1 in basis:
        row = {}
        for m2 in basis:
            v = (ChowClass.from_terms(geometry, {m1: 1}).dual() * ChowClass.from_terms(geometry, {m2: 1}) * td).degree()
            if v:
                row[m2] = v
        form[m1] = row
    return form


def euler_pairing(f: KClass, g: KClass) -> int:
    """``chi(f, g) = sum (-1)^i dim Ext^i(f, g) = deg(ch(f)^v ch(g) td)``."""
    if f.geometry != g.geometry:
        raise ValueError("K-classes live on different geometries")
    form = _pairing_form(f.geometry)
    right = g.ch.terms
    value = sum(
        (c1 * c2 * form[m1][m2] for m1, c1 in f.ch.terms for m2, c2 in right if m2 in form[m1]),
        Fraction(0),
    )
    if value.denominator != 1:
        raise SodError("non-integral-pairing", f"Euler pairing evaluated to {value}")
    return int(value)


def euler_characteristic(f: KClass) -> int:
    return euler_pairing(kclass_of_line_bundle(DivisorClass(0, 0), f.geometry), f)
