"""Exact K-stability invariants for index-2 log del Pezzo weighted hypersurfaces."""

from .arith import (
    PiecewisePoly,
    Poly,
    Rational,
    piecewise_combine,
    piecewise_integrate,
    poly_eval,
    rat,
)
from .blowup import (
    BlowupResult,
    BlowupSpec,
    exceptional_self_intersection,
    log_discrepancy_of_e,
    transform_config,
)
from .catalog import (
    Catalog,
    FamilyInstance,
    VerificationReport,
    expected_invariants,
    instantiate,
    load_catalog,
    verify,
)
from .invariants import (
    DeltaBoundReport,
    az_s_w,
    beta,
    delta_lower_bound,
    different_log_discrepancy,
    k_basis_bound,
    proportional_bound,
    s_invariant,
)
from .surface import (
    ClassVector,
    CurveConfig,
    QuotientSingularity,
    Quintuple,
    SingularPointRecord,
    ambient_pairing,
    config_pairing,
    index_of,
    is_negative_definite,
    is_well_formed,
)
from .zariski import RayDecomposition, decompose_ray, volume_profile, zariski_decompose_at

__version__ = "0.1.0"

__all__ = [
    "BlowupResult",
    "BlowupSpec",
    "Catalog",
    "ClassVector",
    "CurveConfig",
    "DeltaBoundReport",
    "FamilyInstance",
    "PiecewisePoly",
    "Poly",
    "QuotientSingularity",
    "Quintuple",
    "Rational",
    "RayDecomposition",
    "SingularPointRecord",
    "VerificationReport",
    "ambient_pairing",
    "az_s_w",
    "beta",
    "config_pairing",
    "decompose_ray",
    "delta_lower_bound",
    "different_log_discrepancy",
    "exceptional_self_intersection",
    "expected_invariants",
    "index_of",
    "instantiate",
    "is_negative_definite",
    "is_well_formed",
    "k_basis_bound",
    "load_catalog",
    "log_discrepancy_of_e",
    "piecewise_combine",
    "piecewise_integrate",
    "poly_eval",
    "proportional_bound",
    "rat",
    "s_invariant",
    "transform_config",
    "verify",
    "volume_profile",
    "zariski_decompose_at",
]
