"""Exact Chow ring of a projectivized split bundle over the projective line.

For ``Y = P(O(a_1) + ... + O(a_r))`` over ``P^1`` the Chow ring is generated by
the pullback ``h`` of the point class and the tautological class ``xi`` (first
Chern class of ``O(1)``, dual to the tautological sub line bundle), subject to

    h^2 = 0,        xi^r = -(a_1 + ... + a_r) * h * xi^(r-1).

Every class is kept in the unique normal form spanned by ``h^i xi^j`` with
``i in {0, 1}`` and ``0 <= j < r``, and ``deg(h xi^(r-1)) = 1``.  Coefficients
are :class:`fractions.Fraction`; nothing here ever touches a float.

Divisors are written ``eE + hH`` with ``E -> xi`` and ``H -> h``.  Curves are
written ``cC + lL`` where ``(C, L)`` is the basis dual to ``(E, H)`` under the
intersection pairing; for the conifold preset ``C = xi^2 - 2 h xi`` and
``L = h xi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import factorial
from typing import Iterable, Mapping

from .errors import SodError

Monomial = tuple[int, int]  # (power of h, power of xi)


@dataclass(frozen=True)
class BundleGeometry:
    """``P(O(a_1) + ... + O(a_r))`` over the projective line."""

    twists: tuple[int, ...]
    divisor_names: tuple[str, str] = ("E", "H")
    curve_names: tuple[str, str] = ("C", "L")

    def __post_init__(self):
        object.__setattr__(self, "twists", tuple(int(a) for a in self.twists))
        if len(self.twists) < 2:
            raise ValueError("need at least two summands (r >= 2)")
        self._validate_dictionary()

    @property
    def rank(self) -> int:
        return len(self.twists)

    @property
    def dimension(self) -> int:
        return self.rank

    @property
    def twist_sum(self) -> int:
        return sum(self.twists)

    @property
    def dual_twists(self) -> tuple[int, ...]:
        return tuple(-a for a in self.twists)

    @cached_property
    def _curve_basis(self) -> tuple["ChowClass", "ChowClass"]:
        # dual basis to (xi, h) inside span(xi^(r-1), h xi^(r-2))
        r, s = self.rank, self.twist_sum
        c = ChowClass.from_terms(self, {(0, r - 1): 1, (1, r - 2): s})
        l = ChowClass.from_terms(self, {(1, r - 2): 1})
        return c, l

    def _validate_dictionary(self) -> None:
        xi, h = self.xi, self.h
        c, l = self._curve_basis
        table = [[(xi * c).degree(), (xi * l).degree()], [(h * c).degree(), (h * l).degree()]]
        if table != [[0, 1], [1, 0]]:
            raise ValueError(f"divisor/curve dictionary fails the pairing table: {table}")

    @property
    def h(self) -> "ChowClass":
        return ChowClass.from_terms(self, {(1, 0): 1})

    @property
    def xi(self) -> "ChowClass":
        return ChowClass.from_terms(self, {(0, 1): 1})

    def one(self) -> "ChowClass":
        return ChowClass.from_terms(self, {(0, 0): 1})

    def zero(self) -> "ChowClass":
        return ChowClass(self, ())

    def point(self) -> "ChowClass":
        return ChowClass.from_terms(self, {(1, self.rank - 1): 1})

    def divisor_to_chow(self, d: "DivisorClass") -> "ChowClass":
        return ChowClass.from_terms(self, {(0, 1): d.e, (1, 0): d.h})

    def curve_to_chow(self, c: "CurveClass") -> "ChowClass":
        cc, ll = self._curve_basis
        return cc * c.c + ll * c.l

    def format_divisor(self, d: "DivisorClass", compact: bool = False) -> str:
        return _format_lattice(((d.e, self.divisor_names[0]), (d.h, self.divisor_names[1])), compact)

    def format_curve(self, c: "CurveClass") -> str:
        return _format_lattice(((c.c, self.curve_names[0]), (c.l, self.curve_names[1])))

    def line_bundle_name(self, d: "DivisorClass") -> str:
        if d.e == 0 and d.h == 0:
            return "O"
        return f"O({self.format_divisor(d, compact=True)})"


def _format_lattice(pairs, compact: bool = False) -> str:
    out = ""
    for coeff, name in pairs:
        if coeff == 0:
            continue
        sign = "-" if coeff < 0 else ("+" if out else "")
        if out and not compact:
            sign = f" {sign} "
        mag = abs(coeff)
        out += f"{sign}{'' if mag == 1 else mag}{name}"
    return out or "0"


@dataclass(frozen=True)
class DivisorClass:
    e: int = 0
    h: int = 0

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(self.e + other.e, self.h + other.h)

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return DivisorClass(self.e - other.e, self.h - other.h)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(-self.e, -self.h)

    def __mul__(self, k: int) -> "DivisorClass":
        return DivisorClass(k * self.e, k * self.h)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"E": self.e, "H": self.h}

    @classmethod
    def from_json(cls, data: Mapping) -> "DivisorClass":
        return cls(_as_int(data.get("E", 0)), _as_int(data.get("H", 0)))


@dataclass(frozen=True)
class CurveClass:
    c: int = 0
    l: int = 0
    genus: int = field(default=0, compare=False)

    def __add__(self, other: "CurveClass") -> "CurveClass":
        return CurveClass(self.c + other.c, self.l + other.l)

    def __mul__(self, k: int) -> "CurveClass":
        return CurveClass(k * self.c, k * self.l)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"C": self.c, "L": self.l}

    @classmethod
    def from_json(cls, data: Mapping) -> "CurveClass":
        return cls(_as_int(data.get("C", 0)), _as_int(data.get("L", 0)))


def _as_int(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"expected an integer coordinate, got {value!r}")
    return value


E = DivisorClass(1, 0)
H = DivisorClass(0, 1)
C = CurveClass(1, 0)
L = CurveClass(0, 1)


@dataclass(frozen=True)
class ChowClass:
    """An element of the Chow ring, always stored in normal form.

    ``terms`` is a sorted tuple of ``((i, j), coeff)`` with nonzero Fraction
    coefficients; build instances through :meth:`from_terms` or arithmetic.
    """

    geometry: BundleGeometry
    terms: tuple[tuple[Monomial, Fraction], ...]

    @classmethod
    def from_terms(cls, geometry: BundleGeometry, terms: Mapping[Monomial, object]) -> "ChowClass":
        return _reduce(terms, geometry)

    def coefficient(self, i: int, j: int) -> Fraction:
        for mono, coeff in self.terms:
            if mono == (i, j):
                return coeff
        return Fraction(0)

    def as_dict(self) -> dict[Monomial, Fraction]:
        return dict(self.terms)

    def component(self, k: int) -> "ChowClass":
        """Homogeneous part of codimension ``k``."""
        return ChowClass(self.geometry, tuple(t for t in self.terms if sum(t[0]) == k))

    def degree(self) -> Fraction:
        return self.coefficient(1, self.geometry.rank - 1)

    def dual(self) -> "ChowClass":
        """Negate the odd-codimension components."""
        return ChowClass(self.geometry, tuple((m, -c if sum(m) % 2 else c) for m, c in self.terms))

    def vector(self) -> tuple[Fraction, ...]:
        """Coordinates in the fixed basis ``h^i xi^j`` (i outer, j inner)."""
        r = self.geometry.rank
        d = dict(self.terms)
        return tuple(d.get((i, j), Fraction(0)) for i in (0, 1) for j in range(r))

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "ChowClass") -> None:
        if self.geometry != other.geometry:
            raise ValueError("Chow classes live on different geometries")

    def __add__(self, other):
        if isinstance(other, int | Fraction):
            other = self.geometry.one() * other
        self._check(other)
        d = dict(self.terms)
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return _pack(self.geometry, d)

    __radd__ = __add__

    def __neg__(self):
        return ChowClass(self.geometry, tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int | Fraction):
            if other == 0:
                return self.geometry.zero()
            return ChowClass(self.geometry, tuple((m, c * other) for m, c in self.terms))
        self._check(other)
        d: dict[Monomial, Fraction] = {}
        for (i1, j1), c1 in self.terms:
            for (i2, j2), c2 in other.terms:
                m = (i1 + i2, j1 + j2)
                d[m] = d.get(m, 0) + c1 * c2
        return _reduce(d, self.geometry)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = self.geometry.one()
        for _ in range(n):
            out = out * self
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms, key=lambda t: (sum(t[0]), t[0])):
            mono = "*".join(
                p for p in ("h" if i == 1 else "", "xi" if j == 1 else (f"xi^{j}" if j else "")) if p
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> dict[str, str]:
        return {f"h^{i}xi^{j}": str(c) for (i, j), c in self.terms}


def _pack(geometry: BundleGeometry, d: Mapping[Monomial, Fraction]) -> ChowClass:
    return ChowClass(geometry, tuple(sorted((m, Fraction(c)) for m, c in d.items() if c != 0)))


def _reduce(expression: Mapping[Monomial, object], geometry: BundleGeometry) -> ChowClass:
    r, s = geometry.rank, geometry.twist_sum
    out: dict[Monomial, Fraction] = {}
    stack = [((int(i), int(j)), Fraction(c)) for (i, j), c in expression.items()]
    while stack:
        (i, j), c = stack.pop()
        if c == 0 or i >= 2:
            continue
        if j >= r:
            # xi^r -> -s h xi^(r-1)
            stack.append(((i + 1, j - 1), -s * c))
            continue
        out[(i, j)] = out.get((i, j), 0) + c
    return _pack(geometry, out)


CONIFOLD = BundleGeometry((-1, -1, 0))


def normal_form(expression: Mapping[Monomial, object], geometry: BundleGeometry = CONIFOLD) -> ChowClass:
    """Reduce ``{(i, j): coeff}``, meaning ``sum coeff * h^i xi^j``."""
    return _reduce(expression, geometry)


def degree(x: ChowClass) -> Fraction:
    return x.degree()


def intersect(d: DivisorClass, c: CurveClass, g: BundleGeometry = CONIFOLD) -> int:
    value = degree(g.divisor_to_chow(d) * g.curve_to_chow(c))
    assert value.denominator == 1
    return int(value)


def pairing_matrix(g: BundleGeometry = CONIFOLD) -> list[list[int]]:
    """``[[E.C, E.L], [H.C, H.L]]``."""
    return [[intersect(d, c, g) for c in (C, L)] for d in (E, H)]


def solve_divisor(constraints: Iterable[tuple[CurveClass, int]], g: BundleGeometry = CONIFOLD) -> DivisorClass:
    """Find the integral divisor ``aE + bH`` with prescribed degrees on curves."""
    rows = [([Fraction(intersect(E, c, g)), Fraction(intersect(H, c, g))], Fraction(v)) for c, v in constraints]
    # Gaussian elimination on the augmented system
    pivots: list[tuple[int, list[Fraction], Fraction]] = []
    for coeffs, rhs in rows:
        coeffs = list(coeffs)
        for col, prow, prhs in pivots:
            f = coeffs[col]
            if f:
                coeffs = [x - f * y for x, y in zip(coeffs, prow)]
                rhs -= f * prhs
        col = next((k for k, x in enumerate(coeffs) if x != 0), None)
        if col is None:
            if rhs != 0:
                raise SodError("inconsistent", "constraints have no rational solution")
            continue
        piv = coeffs[col]
        coeffs = [x / piv for x in coeffs]
        rhs /= piv
        reduced = []
        for pcol, prow, prhs in pivots:
            f = prow[col]
            reduced.append((pcol, [x - f * y for x, y in zip(prow, coeffs)], prhs - f * rhs))
        pivots = reduced + [(col, coeffs, rhs)]
    if len(pivots) < 2:
        raise SodError("underdetermined", "curve classes do not span the curve lattice")
    sol = [Fraction(0), Fraction(0)]
    for col, _, rhs in pivots:
        sol[col] = rhs
    if any(x.denominator != 1 for x in sol):
        raise SodError("non-integral", f"rational solution {sol[0]}, {sol[1]} is not integral")
    return DivisorClass(int(sol[0]), int(sol[1]))


def chern_roots(g: BundleGeometry = CONIFOLD) -> list[ChowClass]:
    """Roots ``2h, xi + a_i h`` of the tangent bundle via the relative Euler sequence."""
    return [g.h * 2] + [g.xi + g.h * a for a in g.twists]


@lru_cache(maxsize=None)
def total_chern_class(g: BundleGeometry = CONIFOLD) -> ChowClass:
    out = g.one()
    for root in chern_roots(g):
        out = out * (1 + root)
    return out


@lru_cache(maxsize=None)
def canonical_class(g: BundleGeometry = CONIFOLD) -> DivisorClass:
    c1 = total_chern_class(g).component(1)
    return DivisorClass(-int(c1.coefficient(0, 1)), -int(c1.coefficient(1, 0)))


def chern_character(d: DivisorClass, g: BundleGeometry = CONIFOLD) -> ChowClass:
    x = g.divisor_to_chow(d)
    out, power = g.zero(), g.one()
    for k in range(g.dimension + 1):
        out = out + power * Fraction(1, factorial(k))
        power = power * x
    return out


def _todd_series(n: int) -> list[Fraction]:
    # invert (1 - e^{-x})/x = sum_k (-1)^k x^k / (k+1)!
    f = [Fraction((-1) ** k, factorial(k + 1)) for k in range(n + 1)]
    inv = [Fraction(1)]
    for k in range(1, n + 1):
        inv.append(-sum(f[i] * inv[k - i] for i in range(1, k + 1)))
    return inv


@lru_cache(maxsize=None)
def todd_class(g: BundleGeometry = CONIFOLD) -> ChowClass:
    coeffs = _todd_series(g.dimension)
    out = g.one()
    for root in chern_roots(g):
        series, power = g.zero(), g.one()
        for c in coeffs:
            series = series + power * c
            power = power * root
        out = out * series
    return out


def adjunction_value(s: DivisorClass, c: CurveClass, g: BundleGeometry = CONIFOLD) -> int:
    """``(K_Y + S) . c``, i.e. ``K_S . c`` for a curve on the surface ``S``."""
    return intersect(canonical_class(g) + s, c, g)


def curve_genus(s: DivisorClass, c: CurveClass, g: BundleGeometry = CONIFOLD) -> Fraction:
    """Genus of ``c`` on the surface ``S`` by adjunction.

    Takes ``c^2`` on ``S`` to be ``S . c``, which holds when ``c = S cap S'``
    for some ``S'`` linearly equivalent to ``S``.
    """
    self_int = intersect(s, c, g)
    return Fraction(adjunction_value(s, c, g) + self_int + 2, 2)
