"""Symmetry-reduced sums-of-squares certificates for invariant forms."""

from .certify import SosCertificate, certify, gram_rank, rank_profile, verify
from .families import (
    QuarticCoeffs,
    SexticCoeffs,
    binary_blocks,
    quadratic_analyze,
    quadratic_sos_ratio,
    quartic_analyze,
    quartic_boundary_rank,
    sextic_blocks,
    sextic_rank3_obstructions,
)
from .gramspec import build_spectrahedron, cone_dimension, reynolds, trivial_block
from .hposet import build_poset, certify_h_pair, export_dot
from .polycore import SparsePoly, evaluate, parse_poly, render, substitute_squares
from .repsn import (
    group_closure,
    multiplicity,
    multiplicity_oracle,
    resolve_group,
    symmetric_group_rep,
)
from .sdpcore import SdpOptions, SdpProblem, Status, numerical_rank, solve
from .survey import rank_survey
from .symadapt import symmetry_adapted_basis, verify_block_structure

__all__ = [
    "QuarticCoeffs", "SexticCoeffs", "SdpOptions", "SdpProblem", "SosCertificate", "SparsePoly", "Status",
    "binary_blocks", "build_poset", "build_spectrahedron", "certify", "certify_h_pair", "cone_dimension",
    "evaluate", "export_dot", "gram_rank", "group_closure", "multiplicity", "multiplicity_oracle",
    "numerical_rank", "parse_poly", "quadratic_analyze", "quadratic_sos_ratio", "quartic_analyze",
    "quartic_boundary_rank", "rank_profile", "rank_survey", "render", "resolve_group", "reynolds",
    "sextic_blocks", "sextic_rank3_obstructions", "solve", "substitute_squares", "symmetric_group_rep",
    "symmetry_adapted_basis", "trivial_block", "verify", "verify_block_structure",
]
