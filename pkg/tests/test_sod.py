from __future__ import annotations

import random
from fractions import Fraction

import pytest

from sodkit.chowring import C, CONIFOLD, E, H, L, CurveClass, DivisorClass
from sodkit.cohom import line_bundle_cohomology
from sodkit.errors import SodError
from sodkit.ktheory import KClass, composite_atom, euler_pairing, kclass_of_curve_sheaf, kclass_of_line_bundle, tensor_line_bundle
from sodkit.lattice import determinant, integer_solve, rational_solve
from sodkit.sod import (
    ContractionData,
    ExceptionalCollection,
    ObjectRef,
    SODSpec,
    check_compatibility,
    check_disjointness,
    class_base_change,
    gram_matrix,
    hilbert_polynomial,
    induce_sod,
    is_upper_unitriangular,
    mutate,
    null_membership,
    positivity_check,
    split_null_class,
    verify_exceptional,
)

from conftest import line

g = CONIFOLD
KOSZUL = (("O(-H)", 1), ("O(-E)", -2), ("O(-2E+H)", 1))
CONIFOLD_CURVE = ContractionData((("C", C),))


def cal_e() -> ObjectRef:
    return ObjectRef("calE", KClass.atom(composite_atom("calE", line(-1, -1).kclass + line(-2, 1).kclass)))


def example_spec(witnesses=None, extra=()) -> SODSpec:
    blocks = (
        ("A1", (line(-2, 0),)),
        ("A2", (cal_e(),)),
        ("A3", (line(-2, 1), line(-1, 0), line(0, -1), *extra)),
        ("A4", (line(0, 0),)),
    )
    return SODSpec(blocks, {"C": 2}, {"C": KOSZUL} if witnesses is None else witnesses)


# -- lattice helper --------------------------------------------------------------


def test_integer_solve():
    cols = [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(3)]]
    assert integer_solve(cols, [4, 9]) == (2, 3)
    assert integer_solve(cols, [1, 0]) is None
    # dependent columns still yield some integral solution
    cols = [[Fraction(2)], [Fraction(3)]]
    x = integer_solve(cols, [1])
    assert x is not None and 2 * x[0] + 3 * x[1] == 1
    assert integer_solve([], [0, 0]) == ()
    assert integer_solve([], [1, 0]) is None
    assert integer_solve([[Fraction(1, 2)]], [Fraction(3, 2)]) == (3,)


def test_rational_solve_and_determinant():
    cols = [[Fraction(2), Fraction(0), Fraction(1)], [Fraction(0), Fraction(3), Fraction(1)]]
    assert rational_solve(cols, [1, 1, Fraction(5, 6)]) == (Fraction(1, 2), Fraction(1, 3))
    assert rational_solve(cols, [1, 1, 0]) is None
    with pytest.raises(ValueError):
        rational_solve([[1, 2], [2, 4]], [1, 2])
    with pytest.raises(ValueError):
        rational_solve([[1, 2], [2, 4]], [1, 0])
    assert determinant([[1, 2], [3, 4]]) == -2
    assert determinant([[Fraction(1, 2), 0], [0, 4]]) == 2
    assert determinant([]) == 1


# -- gram / exceptional ----------------------------------------------------------


def test_gram_matrix(six_term):
    gram = gram_matrix(six_term)
    assert is_upper_unitriangular(gram)
    assert gram_matrix(ExceptionalCollection((line(0, 0),))) == [[1]]
    assert euler_pairing(line(0, -1).kclass, line(0, 0).kclass) == 2


def test_gram_lower_entries_against_cohomology(six_term):
    gram = gram_matrix(six_term)
    for i, a in enumerate(six_term):
        for j, b in enumerate(six_term):
            assert gram[i][j] == line_bundle_cohomology(b.divisor - a.divisor).euler_characteristic()


def test_verify_exceptional(six_term):
    v = verify_exceptional(six_term)
    assert v.passed and v.details["level"] == "ext"
    table = v.details["ext_table"]
    assert all(table[i][j] == [0, 0, 0, 0] for i in range(6) for j in range(i))
    assert all(table[i][i] == [1, 0, 0, 0] for i in range(6))


def test_verify_reversed_fails_with_witness(six_term):
    v = verify_exceptional(six_term.reversed())
    assert not v.passed
    assert v.details["witness"] == ["O(-H)", "O"]


def test_verify_empty():
    assert verify_exceptional(ExceptionalCollection(())).passed


def test_verify_downgrades_without_divisors(six_term):
    coll = mutate(six_term, 1)
    v = verify_exceptional(coll)
    assert v.passed
    assert v.details["downgraded"] == "kclass-only" and v.details["level"] == "gram"


# -- mutations ---------------------------------------------------------------------


def test_left_mutation_reproduces_reordered_collection(six_term):
    m = mutate(six_term, 1, "left")
    assert [o.name for o in m][2:] == ["O(-2E+H)", "O(-E)", "O(-H)", "O"]
    assert m[0].name == "O(-2E)"
    new = m[1]
    assert new.divisor is None
    assert new.kclass.ch == -(line(-1, -1).kclass.ch + line(-2, 1).kclass.ch)
    assert new.kclass.ch == -cal_e().kclass.ch
    assert new.kclass.rank == -2


def test_right_inverts_left_everywhere(six_term):
    gram = gram_matrix(six_term)
    for k in range(len(six_term) - 1):
        for first, second in (("left", "right"), ("right", "left")):
            back = mutate(mutate(six_term, k, first), k, second)
            assert back.names == six_term.names
            assert [o.kclass.ch for o in back] == [o.kclass.ch for o in six_term]
            assert gram_matrix(back) == gram


def test_mutation_index_errors(six_term):
    for k in (-1, 5, 10):
        with pytest.raises(SodError) as exc:
            mutate(six_term, k)
        assert exc.value.code == "index-out-of-range"
    with pytest.raises(ValueError):
        mutate(six_term, 0, "sideways")


def test_random_mutation_sequences_preserve_structure(six_term):
    rng = random.Random(2024)
    for _ in range(20):
        coll = six_term
        for _ in range(rng.randint(1, 4)):
            new = mutate(coll, rng.randrange(5), rng.choice(["left", "right"]))
            assert abs(determinant(class_base_change(coll, new))) == 1
            coll = new
        gram = gram_matrix(coll)
        assert is_upper_unitriangular(gram)
        assert abs(determinant(gram)) == 1


# -- null category ---------------------------------------------------------------


def test_null_membership_examples():
    oc = kclass_of_curve_sheaf(C, -1)
    assert null_membership(oc, CONIFOLD_CURVE) == (1,)
    assert null_membership(line(0, -1).kclass, CONIFOLD_CURVE) is None
    assert null_membership(oc * 2, CONIFOLD_CURVE) == (2,)
    assert null_membership(kclass_of_line_bundle(DivisorClass(0, -1)) - 2 * line(-1, 0).kclass + line(-2, 1).kclass, CONIFOLD_CURVE) == (1,)
    # O_C(0) differs from O_C(-1) by a point class, which the single generator cannot reach
    assert null_membership(kclass_of_curve_sheaf(C, 0), CONIFOLD_CURVE) is None


def test_hilbert_polynomial_examples():
    oc = kclass_of_curve_sheaf(C, -1)
    assert str(hilbert_polynomial(oc, H)) == "n"
    assert str(hilbert_polynomial(oc, E)) == "0"
    p = hilbert_polynomial(line(0, 0).kclass, E + H)
    assert p.coefficients[3] == Fraction(5, 6)


@pytest.mark.parametrize("d", [E + H, E, H, DivisorClass(2, -1), DivisorClass(-1, 3)])
def test_hilbert_polynomial_against_direct_pairings(d):
    structure = line(0, 0).kclass
    for f in (line(0, 0).kclass, line(-2, 1).kclass, kclass_of_curve_sheaf(C, -1), kclass_of_curve_sheaf(L, 2)):
        p = hilbert_polynomial(f, d)
        for n in range(1, 5):
            assert p(n) == euler_pairing(structure, tensor_line_bundle(f, d * n))


def test_hilbert_polynomial_leading_term():
    for d in (E + H, DivisorClass(2, 1), DivisorClass(1, 3)):
        x = g.divisor_to_chow(d)
        assert hilbert_polynomial(line(0, 0).kclass, d).coefficients[3] == (x * x * x).degree() / 6


def test_null_classes_have_linear_hilbert_polynomials_without_constant():
    rng = random.Random(7)
    two = ContractionData((("C", C), ("L", L)))
    gens = two.generators(g)
    for _ in range(50):
        f = gens[0] * rng.randint(-5, 5) + gens[1] * rng.randint(-5, 5)
        d = DivisorClass(rng.randint(-5, 5), rng.randint(-5, 5))
        p = hilbert_polynomial(f, d)
        assert p.coefficients[0] == 0
        assert p.degree <= 1


def test_positivity_check():
    assert positivity_check(E + H, CONIFOLD_CURVE, g).passed
    v = positivity_check(H, CONIFOLD_CURVE, g)
    assert not v.passed and v.details["failures"] == ["L"]
    assert not positivity_check(DivisorClass(0, 0), CONIFOLD_CURVE, g).passed


# -- splitting, disjointness, compatibility ----------------------------------------


def test_split_null_class():
    spec = example_spec()
    oc = kclass_of_curve_sheaf(C, -1)
    parts = split_null_class(oc, spec, CONIFOLD_CURVE)
    assert [p.is_zero() for p in parts] == [True, True, False, True]
    assert parts[2].ch == oc.ch
    assert all(p.is_zero() for p in split_null_class(KClass.zero(g), spec, CONIFOLD_CURVE))
    with pytest.raises(SodError) as exc:
        split_null_class(line(0, 0).kclass, spec, CONIFOLD_CURVE)
    assert exc.value.code == "not-null"


def test_split_across_blocks():
    two = ContractionData((("C", C), ("L", L)))
    spec = SODSpec((("A", (line(0, 0),)), ("B", (line(1, 0),))), {"C": 0, "L": 1})
    f = two.generator("C", g) + two.generator("L", g)
    parts = split_null_class(f, spec, two)
    assert parts[0].ch == two.generator("C", g).ch
    assert parts[1].ch == two.generator("L", g).ch
    assert (parts[0] + parts[1]).ch == f.ch


def test_disjointness():
    spec = SODSpec((("A", (line(0, 0),)), ("B", (line(1, 0),))), {"C": 0, "L": 1})
    assert check_disjointness(example_spec(), CONIFOLD_CURVE).passed
    apart = ContractionData((("C", C), ("L", L)), frozenset({frozenset({"C", "L"})}))
    v = check_disjointness(spec, apart)
    assert not v.passed and v.details["offending"] == [["C", "L"]]
    same = SODSpec(spec.blocks, {"C": 0, "L": 0})
    assert check_disjointness(same, apart).passed


def test_contraction_validation():
    with pytest.raises(ValueError):
        ContractionData((("C", C), ("D", C)))
    with pytest.raises(ValueError):
        ContractionData((("C", C),), frozenset({frozenset({"C"})}))
    with pytest.raises(ValueError):
        ContractionData((("C", C),), frozenset({frozenset({"C", "Z"})}))


def test_compatibility_example():
    v = check_compatibility(example_spec(), CONIFOLD_CURVE)
    assert v.passed
    assert v.details["curves"]["C"]["coefficients"] == {"O(-2E+H)": 1, "O(-E)": -2, "O(-H)": 1}


def test_compatibility_missing_witness_keeps_necessary_layer():
    v = check_compatibility(example_spec(witnesses={}), CONIFOLD_CURVE)
    assert not v.passed
    assert v.reason == "missing-witness"
    assert v.details["unresolved"] == ["C"]
    assert v.details["necessary_layer"] == "PASS"


def test_compatibility_rejects_bad_witnesses():
    wrong = example_spec(witnesses={"C": (("O(-H)", 1), ("O(-E)", -1))})
    assert check_compatibility(wrong, CONIFOLD_CURVE).details["curves"]["C"]["witness"] == "class-mismatch"
    foreign = example_spec(witnesses={"C": (("O", 1),)})
    assert check_compatibility(foreign, CONIFOLD_CURVE).details["curves"]["C"]["witness"] == "foreign-objects"


def test_compatibility_printed_block_variant_fails_necessary_layer():
    # block <O(-2E+H), O(-2E), O(-H)> cannot produce O_C(-1) even numerically
    blocks = (("A3", (line(-2, 1), line(-2, 0), line(0, -1))),)
    spec = SODSpec(blocks, {"C": 0}, {})
    v = check_compatibility(spec, CONIFOLD_CURVE)
    assert v.details["necessary_layer"] == "FAIL"


def test_compatibility_empty_contraction():
    assert check_compatibility(example_spec(), ContractionData(())).passed


def test_compatibility_monotone():
    rng = random.Random(9)
    for _ in range(10):
        extra = tuple(line(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(1, 3)))
        names = {o.name for o in extra}
        if names & {"O(-2E+H)", "O(-E)", "O(-H)"}:
            continue
        assert check_compatibility(example_spec(extra=extra), CONIFOLD_CURVE).passed


# -- induced decomposition ---------------------------------------------------------


def test_induce_example():
    report = induce_sod(example_spec(), CONIFOLD_CURVE)
    assert [n for n, _ in report.blocks] == ["A1", "A2", "A3", "A4"]
    assert report.blocks[-1][1] == ("O_X",)
    assert report.blocks[2][1] == ("Rpi_*O(-2E+H)", "Rpi_*O(-E)", "Rpi_*O(-H)")
    assert "projection formula" in report.note


def test_induce_gated_on_disjointness():
    two = ContractionData((("C", C), ("L", L)), frozenset({frozenset({"C", "L"})}))
    spec = SODSpec(example_spec().blocks, {"C": 2, "L": 3}, {"C": KOSZUL})
    with pytest.raises(SodError) as exc:
        induce_sod(spec, two)
    assert exc.value.code == "preconditions-failed"
    failed = {v.check for v in exc.value.details["verdicts"] if not v}
    assert "disjointness" in failed


def test_induce_trivial_spec():
    spec = SODSpec((("A", (line(0, 0),)),))
    report = induce_sod(spec, ContractionData(()))
    assert report.blocks == (("A", ("O_X",)),)


def test_example_pipeline_is_deterministic():
    first = induce_sod(example_spec(), CONIFOLD_CURVE).to_json()
    second = induce_sod(example_spec(), CONIFOLD_CURVE).to_json()
    assert first == second
