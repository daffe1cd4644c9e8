"""Stable endomorphism rings and deformation-ring evidence for modules over
generalized Brauer star algebras, by exact linear algebra over GF(p)."""

__version__ = "0.1.0"

from .coeff import build_local_algebra, truncated_power_series  # noqa: E402
from .presentation import build_presentation  # noqa: E402
from .repbuild import Representation, build_band, build_projective, build_simple, build_string, parse_module_spec  # noqa: E402
from .homalg import (  # noqa: E402
    classify_component,
    ext1_dim,
    hom_space,
    iso_test,
    omega_orbit,
    projective_cover,
    stable_end_dim,
    syzygy,
)
from .deform import (  # noqa: E402
    extend_search,
    first_order_classes,
    is_trivial_lift,
    paper_lift_family,
    udr_evidence,
    verify_lift,
)

__all__ = [
    "__version__",
    "build_local_algebra",
    "truncated_power_series",
    "build_presentation",
    "Representation",
    "build_band",
    "build_projective",
    "build_simple",
    "build_string",
    "parse_module_spec",
    "classify_component",
    "ext1_dim",
    "hom_space",
    "iso_test",
    "omega_orbit",
    "projective_cover",
    "stable_end_dim",
    "syzygy",
    "extend_search",
    "first_order_classes",
    "is_trivial_lift",
    "paper_lift_family",
    "udr_evidence",
    "verify_lift",
]
