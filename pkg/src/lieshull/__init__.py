"""Exact and tolerance-checked computations for lattices and syndetic hulls in
simply connected solvable Lie groups."""

from .density import (
    density_in_quotient,
    hull_via_density,
    invariant_implies_ideal,
    is_algebraically_dense_unipotent,
)
from .groups import (
    GeneratedSubgroup,
    GroupElement,
    MatrixRealization,
    adjoint_of,
    catalog,
    commutator,
    conjugate,
    group_exp,
    group_log,
    inverse,
    multiply,
    realize_adjoint,
)
from .hull import abelian_hull, hull_recursive, hull_verify, log_span_hull
from .lie import (
    LieAlgebra,
    LinearMap,
    Subspace,
    center,
    centralizer_subalg,
    derived_series,
    lie_closure,
    lower_central_series,
    normalizer_subalg,
    quotient_algebra,
    validate_structure,
)
from .rigidity import RigidityInput, check_uniqueness, extend_isomorphism
from .spectra import char_poly, classify, nilpotent_exp, unipotent_log

__version__ = "0.1.0"
