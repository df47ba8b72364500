"""Exceptional collections, mutations and the null category of a small contraction.

The checks here certify, at the level of Ext groups and K-classes, the
hypotheses under which a semiorthogonal decomposition of ``D^b(Y)`` descends
along a small resolution ``pi: Y -> X``:

* the collection is exceptional (``verify_exceptional``);
* every generator ``O_{E_j}(-1)`` of ``ker pi_*`` lies in a block
  (``check_compatibility``, witness plus an integral necessary condition);
* curves in different blocks do not meet (``check_disjointness``).

``induce_sod`` then reports the blocks ``pi_* A_i`` on ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .chowring import (
    BundleGeometry,
    CurveClass,
    DivisorClass,
    chern_character,
    intersect,
    todd_class,
)
from .cohom import rhom_dims
from .errors import SodError
from .ktheory import KClass, euler_pairing, kclass_of_curve_sheaf, kclass_of_line_bundle
from .lattice import integer_solve, rational_solve


@dataclass(frozen=True)
class ObjectRef:
    name: str
    kclass: KClass
    divisor: DivisorClass | None = None

    def __post_init__(self):
        if self.divisor is not None and self.kclass.ch != chern_character(self.divisor, self.kclass.geometry):
            raise ValueError(f"object {self.name!r}: class does not match divisor")

    @classmethod
    def line_bundle(cls, d: DivisorClass, g: BundleGeometry, name: str | None = None) -> "ObjectRef":
        name = name or g.line_bundle_name(d)
        return cls(name, kclass_of_line_bundle(d, g, name), d)

    @property
    def geometry(self) -> BundleGeometry:
        return self.kclass.geometry

    def to_json(self) -> dict:
        out = {"name": self.name, "ch": self.kclass.ch.to_json()}
        if self.divisor is not None:
            out["divisor"] = self.divisor.to_json()
        return out


def line_bundle_divisor(f: KClass) -> DivisorClass | None:
    """The divisor ``D`` with ``ch(f) = ch(O(D))``, if there is one."""
    ch = f.ch
    if ch.coefficient(0, 0) != 1:
        return None
    e, h = ch.coefficient(0, 1), ch.coefficient(1, 0)
    if e.denominator != 1 or h.denominator != 1:
        return None
    d = DivisorClass(int(e), int(h))
    return d if chern_character(d, f.geometry) == ch else None


@dataclass(frozen=True)
class ExceptionalCollection:
    objects: tuple[ObjectRef, ...]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))

    def __len__(self) -> int:
        return len(self.objects)

    def __getitem__(self, i):
        return self.objects[i]

    def __iter__(self):
        return iter(self.objects)

    @property
    def names(self) -> list[str]:
        return [o.name for o in self.objects]

    def reversed(self) -> "ExceptionalCollection":
        return ExceptionalCollection(self.objects[::-1])


@dataclass(frozen=True)
class Verdict:
    check: str
    passed: bool
    reason: str | None = None
    details: dict = field(default_factory=dict, compare=False, hash=False)

    def __bool__(self) -> bool:
        return self.passed

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_json(self) -> dict:
        out = {"check": self.check, "verdict": self.label}
        if self.reason:
            out["reason"] = self.reason
        out.update(self.details)
        return out


# -- Gram matrices and exceptionality ------------------------------------------


def gram_matrix(coll: ExceptionalCollection) -> list[list[int]]:
    return [[euler_pairing(a.kclass, b.kclass) for b in coll] for a in coll]


def is_upper_unitriangular(m: Sequence[Sequence[int]]) -> bool:
    return all(m[i][i] == 1 and all(m[i][j] == 0 for j in range(i)) for i in range(len(m)))


def verify_exceptional(coll: ExceptionalCollection) -> Verdict:
    """Check ``Ext^*(A_i, A_j) = 0`` for ``i > j`` and ``Ext^*(A_i, A_i) = k``.

    With line bundles only, the check runs on actual Ext dimensions.  If some
    object is known only through its K-class the check falls back to the Gram
    matrix and says so via ``details["downgraded"]``.
    """
    n = len(coll)
    if n == 0:
        return Verdict("exceptional", True, None, {"level": "ext", "ext_table": [], "failures": []})
    if any(o.divisor is None for o in coll):
        gram = gram_matrix(coll)
        failures = [
            [coll[i].name, coll[j].name, gram[i][j]]
            for i in range(n)
            for j in range(i + 1)
            if gram[i][j] != (1 if i == j else 0)
        ]
        details = {"level": "gram", "downgraded": "kclass-only", "gram": gram, "failures": failures}
        if failures:
            details["witness"] = failures[0][:2]
        return Verdict("exceptional", not failures, "not-semiorthogonal" if failures else None, details)

    g = coll[0].geometry
    table = [[rhom_dims(a.divisor, b.divisor, g).to_json() for b in coll] for a in coll]
    unit = [1] + [0] * g.dimension
    failures = []
    for i in range(n):
        for j in range(i + 1):
            expected = unit if i == j else [0] * (g.dimension + 1)
            if table[i][j] != expected:
                failures.append([coll[i].name, coll[j].name, table[i][j]])
    details = {"level": "ext", "ext_table": table, "failures": failures}
    if failures:
        details["witness"] = failures[0][:2]
    return Verdict("exceptional", not failures, "not-semiorthogonal" if failures else None, details)


# -- Mutations -----------------------------------------------------------------


def _mutated_object(name: str, kclass: KClass) -> ObjectRef:
    d = line_bundle_divisor(kclass)
    if d is not None:
        return ObjectRef.line_bundle(d, kclass.geometry)
    return ObjectRef(name, kclass)


def left_mutation_class(a: ObjectRef, b: ObjectRef) -> KClass:
    """``[L_A B] = chi(A, B) [A] - [B]``: the class of the shifted cone of evaluation."""
    return a.kclass * euler_pairing(a.kclass, b.kclass) - b.kclass


def right_mutation_class(a: ObjectRef, b: ObjectRef) -> KClass:
    """``[R_B A] = chi(A, B) [B] - [A]``."""
    return b.kclass * euler_pairing(a.kclass, b.kclass) - a.kclass


def mutate(coll: ExceptionalCollection, k: int, direction: str = "left") -> ExceptionalCollection:
    """Mutate the adjacent pair at positions ``k, k + 1`` (0-based).

    Left: ``(A, B) -> (L_A B, A)``.  Right: ``(A, B) -> (B, R_B A)``.
    """
    if not 0 <= k < len(coll) - 1:
        raise SodError("index-out-of-range", f"no adjacent pair at index {k} in a collection of {len(coll)}")
    a, b = coll[k], coll[k + 1]
    if direction == "left":
        pair = (_mutated_object(f"L_{{{a.name}}}({b.name})", left_mutation_class(a, b)), a)
    elif direction == "right":
        pair = (b, _mutated_object(f"R_{{{b.name}}}({a.name})", right_mutation_class(a, b)))
    else:
        raise ValueError(f"direction must be 'left' or 'right', not {direction!r}")
    objs = list(coll.objects)
    objs[k : k + 2] = pair
    return ExceptionalCollection(tuple(objs))


def class_base_change(old: ExceptionalCollection, new: ExceptionalCollection) -> list[list[Fraction]]:
    """Matrix whose row ``i`` expresses ``[new_i]`` in the classes ``[old_j]``."""
    columns = [o.kclass.ch.vector() for o in old]
    rows = []
    for o in new:
        sol = rational_solve(columns, o.kclass.ch.vector())
        if sol is None:
            raise ValueError(f"{o.name} is not in the span of the old classes")
        rows.append(list(sol))
    return rows


# -- Null category of the contraction ------------------------------------------


@dataclass(frozen=True)
class ContractionData:
    """Exceptional curves of ``pi: Y -> X`` with their dual intersection graph."""

    curves: tuple[tuple[str, CurveClass], ...]
    adjacency: frozenset = frozenset()
    sink: str = "X"

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple((n, c) for n, c in self.curves))
        edges = frozenset(frozenset(e) for e in self.adjacency)
        object.__setattr__(self, "adjacency", edges)
        names = [n for n, _ in self.curves]
        if len(set(names)) != len(names):
            raise ValueError("duplicate curve names")
        if len({c for _, c in self.curves}) != len(self.curves):
            raise ValueError("curve classes must be distinct")
        for e in edges:
            if len(e) != 2:
                raise ValueError("adjacency must be irreflexive")
            if not e <= set(names):
                raise ValueError(f"adjacency mentions unknown curves {sorted(e)}")

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.curves]

    def generator(self, name: str, g: BundleGeometry) -> KClass:
        """``[O_{E_j}(-1)]``."""
        curves = dict(self.curves)
        return kclass_of_curve_sheaf(curves[name], -1, g, exceptional=curves, name=name)

    def generators(self, g: BundleGeometry) -> list[KClass]:
        return [self.generator(n, g) for n in self.names]


def null_membership(f: KClass, contraction: ContractionData) -> tuple[int, ...] | None:
    """Integers ``m`` with ``ch(f) = sum m_j ch(O_{E_j}(-1))``, if any.

    This is only a necessary condition for ``f`` to lie in ``ker pi_*``.
    """
    gens = contraction.generators(f.geometry)
    return integer_solve([x.ch.vector() for x in gens], f.ch.vector())


@dataclass(frozen=True)
class HilbertPolynomial:
    """``n -> chi(f (x) O(nD))`` with exact rational coefficients, lowest degree first."""

    coefficients: tuple[Fraction, ...]

    def __call__(self, n: int) -> Fraction:
        return sum((c * n**k for k, c in enumerate(self.coefficients)), Fraction(0))

    @property
    def degree(self) -> int:
        nz = [k for k, c in enumerate(self.coefficients) if c != 0]
        return nz[-1] if nz else -1

    def __str__(self) -> str:
        parts = []
        for k in range(len(self.coefficients) - 1, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("n" if k == 1 else f"n^{k}")
            mag = abs(c)
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            parts.append(("-" if c < 0 else "+", body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coefficients[: max(self.degree, 0) + 1]]


def hilbert_polynomial(f: KClass, d: DivisorClass) -> HilbertPolynomial:
    g = f.geometry
    base = f.ch * todd_class(g)
    x = g.divisor_to_chow(d)
    coeffs, power = [], g.one()
    for k in range(g.dimension + 1):
        coeffs.append((base * power).degree() / factorial(k))
        power = power * x
    return HilbertPolynomial(tuple(coeffs))


def positivity_check(d: DivisorClass, contraction: ContractionData, g: BundleGeometry) -> Verdict:
    """Curve-level positivity: ``d . E_j > 0`` for every contracted curve and ``d . L > 0``.

    A partial test only; it is the consequence of ampleness that the null
    category argument relies on.
    """
    values = {name: intersect(d, c, g) for name, c in contraction.curves}
    values[g.curve_names[1]] = intersect(d, CurveClass(0, 1), g)
    bad = sorted(n for n, v in values.items() if v <= 0)
    return Verdict(
        "positivity",
        not bad,
        "non-positive" if bad else None,
        {"scope": "curve-level (partial)", "degrees": values, "failures": bad},
    )


# -- Decompositions ------------------------------------------------------------


@dataclass(frozen=True)
class SODSpec:
    """Blocks of generators, the block of each exceptional curve, and witnesses.

    A witness for curve ``j`` is a list of ``(object name, multiplicity)``
    whose alternating class sum equals ``[O_{E_j}(-1)]``, e.g. the terms of a
    finite resolution by objects of the block.
    """

    blocks: tuple[tuple[str, tuple[ObjectRef, ...]], ...]
    assignment: Mapping[str, int] = field(default_factory=dict, hash=False)
    witnesses: Mapping[str, tuple[tuple[str, int], ...]] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple((n, tuple(objs)) for n, objs in self.blocks))
        for curve, idx in self.assignment.items():
            if not 0 <= idx < len(self.blocks):
                raise ValueError(f"curve {curve!r} assigned to missing block {idx}")

    @property
    def geometry(self) -> BundleGeometry:
        return self.blocks[0][1][0].geometry

    def collection(self) -> ExceptionalCollection:
        return ExceptionalCollection(tuple(o for _, objs in self.blocks for o in objs))


def split_null_class(f: KClass, spec: SODSpec, contraction: ContractionData) -> list[KClass]:
    """Split a null class into per-block pieces along the curve assignment."""
    m = null_membership(f, contraction)
    if m is None:
        raise SodError("not-null", "class is not an integral combination of the O_{E_j}(-1)")
    g = f.geometry
    parts = [KClass.zero(g) for _ in spec.blocks]
    for name, mult in zip(contraction.names, m):
        if not mult:
            continue
        if name not in spec.assignment:
            raise SodError("unassigned-curve", f"curve {name!r} has no block")
        i = spec.assignment[name]
        parts[i] = parts[i] + contraction.generator(name, g) * mult
    return parts


def check_disjointness(spec: SODSpec, contraction: ContractionData) -> Verdict:
    offending = []
    for edge in contraction.adjacency:
        a, b = sorted(edge)
        if a in spec.assignment and b in spec.assignment and spec.assignment[a] != spec.assignment[b]:
            offending.append([a, b])
    offending.sort()
    return Verdict(
        "disjointness", not offending, "adjacent-curves-split" if offending else None, {"offending": offending}
    )


def check_compatibility(spec: SODSpec, contraction: ContractionData) -> Verdict:
    """Each ``O_{E_j}(-1)`` must lie in its assigned block.

    Two layers per curve: a witness whose class sum equals the generator and
    which only uses objects of the block, and the integral solve of the
    generator over the block's classes (necessary, not sufficient).
    """
    if not contraction.curves:
        return Verdict("compatibility", True, None, {"curves": {}, "witness_layer": "PASS", "necessary_layer": "PASS"})
    g = spec.geometry
    per_curve = {}
    unresolved, necessary_failed = [], []
    for name in contraction.names:
        target = contraction.generator(name, g)
        info: dict = {}
        idx = spec.assignment.get(name)
        if idx is None:
            info.update(block=None, witness="unassigned", necessary=False)
            unresolved.append(name)
            necessary_failed.append(name)
            per_curve[name] = info
            continue
        block_name, objs = spec.blocks[idx]
        info["block"] = block_name
        by_name = {o.name: o for o in objs}

        witness = spec.witnesses.get(name)
        if not witness:
            info["witness"] = "missing"
        else:
            foreign = [n for n, _ in witness if n not in by_name]
            if foreign:
                info["witness"] = "foreign-objects"
                info["foreign"] = foreign
            else:
                total = KClass.zero(g)
                for n, mult in witness:
                    total = total + by_name[n].kclass * mult
                info["witness"] = "ok" if total.ch == target.ch else "class-mismatch"
        if info["witness"] != "ok":
            unresolved.append(name)

        coeffs = integer_solve([o.kclass.ch.vector() for o in objs], target.ch.vector())
        info["necessary"] = coeffs is not None
        if coeffs is not None:
            info["coefficients"] = {o.name: c for o, c in zip(objs, coeffs)}
        else:
            necessary_failed.append(name)
        per_curve[name] = info

    passed = not unresolved and not necessary_failed
    details = {
        "curves": per_curve,
        "witness_layer": "FAIL" if unresolved else "PASS",
        "necessary_layer": "FAIL" if necessary_failed else "PASS",
    }
    reason = None
    if unresolved:
        reason = "missing-witness"
        details["unresolved"] = unresolved
    elif necessary_failed:
        reason = "not-in-lattice"
        details["not_in_lattice"] = necessary_failed
    return Verdict("compatibility", passed, reason, details)


PROJECTION_NOTE = (
    "R pi_* L pi^* = id on D^b(X) by the projection formula since R pi_* O_Y = O_X "
    "(rational singularities); blocks on X are the images R pi_* A~_i."
)


@dataclass(frozen=True)
class InducedSODReport:
    blocks: tuple[tuple[str, tuple[str, ...]], ...]
    verdicts: tuple[Verdict, ...]
    note: str = PROJECTION_NOTE

    def to_json(self) -> dict:
        return {
            "blocks": [{"name": n, "generators": list(gens)} for n, gens in self.blocks],
            "verdicts": [v.to_json() for v in self.verdicts],
            "note": self.note,
        }

    def __str__(self) -> str:
        lines = [f"{n} = <{', '.join(gens)}>" for n, gens in self.blocks]
        return "\n".join(lines)


def pushforward_name(obj: ObjectRef, sink: str) -> str:
    if obj.divisor is not None and obj.divisor == DivisorClass(0, 0):
        return f"O_{sink}"
    return f"Rpi_*{obj.name}"


def induce_sod(spec: SODSpec, contraction: ContractionData) -> InducedSODReport:
    compat = check_compatibility(spec, contraction)
    disjoint = check_disjointness(spec, contraction)
    exceptional = verify_exceptional(spec.collection())
    verdicts = (exceptional, compat, disjoint)
    failed = [v for v in verdicts if not v]
    if failed:
        raise SodError(
            "preconditions-failed",
            ", ".join(f"{v.check}: {v.reason}" for v in failed),
            verdicts=verdicts,
        )
    blocks = tuple(
        (name, tuple(pushforward_name(o, contraction.sink) for o in objs)) for name, objs in spec.blocks
    )
    return InducedSODReport(blocks, verdicts)

