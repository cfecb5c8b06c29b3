"""Quadratic-form systems, genus-one quartics, twisting classes and rank-0 point counts."""

from apsieve.curve_lab.delta import DeltaReport, delta_candidates, local_solubility, same_class_sets
from apsieve.curve_lab.elimination import (
    Eliminated,
    SurvivesWith,
    Unresolved,
    rank0_eliminate_tuple,
    resolve_family,
)
from apsieve.curve_lab.points import (
    RankZeroEnumeration,
    UnresolvedError,
    rank0_points,
    torsion_bound,
    torsion_order,
)
from apsieve.curve_lab.quartic import (
    GenusOneQuartic,
    WeierstrassModel,
    build_quartic,
    j_invariant,
    jacobian_model,
    neg_delta_map,
)
from apsieve.curve_lab.relations import (
    CurveFamily,
    TernaryRelation,
    backsubstitute,
    derive_family,
    pivot_system,
)

__all__ = [
    "CurveFamily",
    "DeltaReport",
    "Eliminated",
    "GenusOneQuartic",
    "RankZeroEnumeration",
    "SurvivesWith",
    "TernaryRelation",
    "Unresolved",
    "UnresolvedError",
    "WeierstrassModel",
    "backsubstitute",
    "build_quartic",
    "delta_candidates",
    "derive_family",
    "j_invariant",
    "jacobian_model",
    "local_solubility",
    "neg_delta_map",
    "pivot_system",
    "rank0_eliminate_tuple",
    "rank0_points",
    "resolve_family",
    "same_class_sets",
    "torsion_bound",
    "torsion_order",
]
