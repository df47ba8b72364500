"""Numerical and homological checks for semiorthogonal decompositions induced
along small resolutions, with the resolved conifold built in."""

from .chowring import (
    C,
    CONIFOLD,
    E,
    H,
    L,
    BundleGeometry,
    ChowClass,
    CurveClass,
    DivisorClass,
    adjunction_value,
    canonical_class,
    chern_character,
    degree,
    intersect,
    normal_form,
    solve_divisor,
    todd_class,
)
from .cohom import CohomologyVector, line_bundle_cohomology, p1_cohomology, pushforward_summands, rhom_dims
from .errors import SodError
from .ktheory import (
    KClass,
    SheafAtom,
    euler_pairing,
    kclass_dual,
    kclass_of_curve_sheaf,
    kclass_of_line_bundle,
)
from .sod import (
    ContractionData,
    ExceptionalCollection,
    InducedSODReport,
    ObjectRef,
    SODSpec,
    Verdict,
    check_compatibility,
    check_disjointness,
    gram_matrix,
    hilbert_polynomial,
    induce_sod,
    mutate,
    null_membership,
    positivity_check,
    split_null_class,
    verify_exceptional,
)

__version__ = "0.1.0"
