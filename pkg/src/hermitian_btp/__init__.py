"""Torsion, connections, curvature and classification of left-invariant Hermitian structures."""

from .catalog import (
    CatalogEntry,
    complexified_su2,
    default_catalog,
    family_ab,
    n3_example,
    nilmanifold,
    random_2step,
    ricq_counterexample5,
    twisted_sasakian_model,
)
from .classifier import (
    ClassificationReport,
    admissible_frame,
    classify,
    corollary_sweep,
    is_btp_direct,
    theorem11_conditions,
    threefold_case,
)
from .engine import (
    bismut_connection,
    chern_connection,
    chern_torsion,
    curvature,
    derived_tensors,
    geometry,
    levi_civita,
)
from .errors import *  # noqa: F401,F403
from .forms import InvariantForm, StructureEquations, transform_structure, validate
from .identities import btp_identities, identity_suite
from .jsonio import emit, parse
from .tensor_core import DEFAULT_TOL, DenseTensor, UnitaryMatrix, change_frame

__version__ = "0.1.0"
