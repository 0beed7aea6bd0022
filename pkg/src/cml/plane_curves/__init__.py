"""Plane curves: Hessians, flexes, elliptic group law, torsion multisections."""

from .arith import MultisectionSize, admissible_sizes, banerjee_chen_sizes, jordan_totient
from .cubics import FlexFrame, cubic_torsion, torsion_stratum, weierstrass_frame
from .elliptic import (
    INFINITY,
    CurvePoint,
    WeierstrassCurve,
    division_polynomial,
    ec_add,
    ec_mul,
    ec_neg,
    point_distance,
    torsion_points,
)
from .forms import ProjectivePoint, TernaryForm, hausdorff, hessian, pairwise_distances, projective_distance
from .solve import FlexPoint, common_zeros, flex_points, is_smooth

__all__ = [
    "CurvePoint",
    "FlexFrame",
    "FlexPoint",
    "INFINITY",
    "MultisectionSize",
    "ProjectivePoint",
    "TernaryForm",
    "WeierstrassCurve",
    "admissible_sizes",
    "banerjee_chen_sizes",
    "common_zeros",
    "cubic_torsion",
    "division_polynomial",
    "ec_add",
    "ec_mul",
    "ec_neg",
    "flex_points",
    "hausdorff",
    "hessian",
    "is_smooth",
    "jordan_totient",
    "pairwise_distances",
    "point_distance",
    "projective_distance",
    "torsion_points",
    "torsion_stratum",
    "weierstrass_frame",
]
