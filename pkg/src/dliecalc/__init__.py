"""Exact linear algebra over Q for D-Lie algebras and connections."""

from .finalg import (AModule, FiniteAlgebra, PrincipalParts, Report,
                     Violation, build_principal_parts, check_amodule,
                     check_pmodule, compute_derivations,
                     kahler_differentials_dim, regular_module,
                     validate_algebra)
from .lierinehart import (Cochain, FlatConnectionModule, LieRinehartAlgebra,
                          check_amultilinear, coboundary_solve,
                          derivations_lr, is_cocycle, lr_differential,
                          pullback_cocycle, trivial_coefficients, validate_lr)
from .dliealg import (DLieAlgebra, DLieMap, build_d1, canonical_quotient,
                      class_equal, classify_maps_d1, exists_dlie_map,
                      functor_F, reconstruct, splitting_data, validate_dlie,
                      validate_dlie_map)
from .conncat import (Connection, Diff1Space, LPsiConnection,
                      annihilator_ideal, build_end_extension, c_functor,
                      compute_diff1, curvature, curvature_identity_check,
                      is_flat, r_functor, split_extension,
                      validate_connection, verify_splitting)
from .workspace import Workspace, WorkspaceError, load_workspace, \
    parse_workspace

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
