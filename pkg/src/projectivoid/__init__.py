"""Exact finite-precision computations on projectivoid space."""
from .cech import (
    build_cech_complex,
    cohomology_dims,
    enumerate_monomials,
    hn_basis,
    koszul_oracle,
    window_threshold,
)
from .errors import *  # noqa: F401,F403
from .field_arith import (
    CHARP,
    MIXED,
    FieldElem,
    FieldModel,
    PAdicExp,
    TiltElem,
    f_inv,
    f_mul,
    f_val,
    sharp,
    tilt_monomial,
    tilt_of,
)
from .picard import (
    PicClass,
    ResidueUnit,
    UnitCocycle,
    classify_residue_cocycle,
    coboundary,
    deformation_check,
    theta_on_twisting,
    twisting_cocycle,
    verify_cocycle,
)
from .projmaps import (
    LnDatum,
    build_map,
    check_generation,
    check_tower,
    pullback_class,
    tilt_datum,
    untilt_datum,
)
from .projmod import (
    RingSpec,
    check_idempotent,
    clear_exponents,
    jacobson_unit_check,
    nakayama_lift,
    residue_free_basis,
)
from .series import (
    TateSeries,
    evaluate,
    gauss_norm,
    invert,
    is_unit,
    multiply_back,
    normalize,
    s_add,
    s_mul,
)

__version__ = "0.1.0"
