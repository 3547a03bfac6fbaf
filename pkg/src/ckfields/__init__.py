"""Numerical workbench for constant-length Killing fields on normal homogeneous spaces."""

__version__ = "0.1.0"

from .catalog import build_algebra, build_pair, build_product_pair, catalog_listing
from .decomposition import HomogeneousPair, cartan_involution, compact_dual, coset_reduce
from .lie_core import MatrixLieAlgebra, mat_exp
from .orbit import centralizer, is_elliptic, open_orbit_check, parabolic_profile, sample_orbit
from .verifier import VerifyConfig, carryover_check, f_xi, killing_length, verify_constant_length

__all__ = [
    "HomogeneousPair",
    "MatrixLieAlgebra",
    "VerifyConfig",
    "build_algebra",
    "build_pair",
    "build_product_pair",
    "carryover_check",
    "cartan_involution",
    "catalog_listing",
    "centralizer",
    "compact_dual",
    "coset_reduce",
    "f_xi",
    "is_elliptic",
    "killing_length",
    "mat_exp",
    "open_orbit_check",
    "parabolic_profile",
    "sample_orbit",
    "verify_constant_length",
]
