"""Gauss-reduced morphisms of powers of elliptic curves, Dirichlet approximation
certificates, lattice-model simulations and explicit constants."""

from .endring import ZZ, Content, EndRing, RingElem, content
from .morphism import (
    GaussReducedForm,
    Morphism,
    classify,
    enumerate_gauss_reduced,
    gauss_reduce,
    height,
    is_gauss_reduced,
)
from .dirichlet import ApproxCertificate, approx_gauss_reduced, dirichlet_approx
from .mwlattice import MWModel, c1_constant, min_norm_preimage, quasi_orthonormal_basis
from .constants import CurveParams, effective_bounds
from .elliptic import RatPoint, WeierstrassCurve, canonical_height, height_pairing_gram

__version__ = "0.1.0"

__all__ = [
    "ZZ",
    "Content",
    "EndRing",
    "RingElem",
    "content",
    "GaussReducedForm",
    "Morphism",
    "classify",
    "enumerate_gauss_reduced",
    "gauss_reduce",
    "height",
    "is_gauss_reduced",
    "ApproxCertificate",
    "approx_gauss_reduced",
    "dirichlet_approx",
    "MWModel",
    "c1_constant",
    "min_norm_preimage",
    "quasi_orthonormal_basis",
    "CurveParams",
    "effective_bounds",
    "RatPoint",
    "WeierstrassCurve",
    "canonical_height",
    "height_pairing_gram",
]
