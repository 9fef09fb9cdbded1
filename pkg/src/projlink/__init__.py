"""Projective linking and winding numbers of curves in P^n, minimal bounding
masses of positive holomorphic chains, and projective hull estimates."""

from .criterion import (
    CriterionConfig,
    CriterionResult,
    check_boundary_criterion,
    cross_validate_equivalences,
    estimate_minimal_mass,
    minimize_reduced_winding,
)
from .curves import CurveComponent, HoloChain, HoloPiece, ParamChain2, ParamCurve, chain_boundary_check, circle, cone_chain, disk
from .errors import (
    AllStartsRejected,
    NonIntegral,
    NonTransversal,
    NumericalError,
    ProjLinkError,
    SeedExhaustion,
    SingularPoint,
    ValidationError,
    ZeroOnCurve,
)
from .fs_core import HomogeneousSection, ProjPoint, TangentVector, coordinate_section, fs_norm, random_section
from .invariants import (
    Divisor,
    affine_linking,
    chain_mass,
    holo_intersection_count,
    intersection_count,
    necessity_check,
    projective_linking,
    reduced_linking,
    reduced_winding,
    uniqueness_criterion,
    winding_number,
)
from .qpsh_hull import HullConfig, QPSHFunction, best_constant, hull_field, qpsh_defect

__version__ = "0.1.0"
