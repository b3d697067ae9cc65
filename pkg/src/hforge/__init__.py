"""hforge: Hadamard difference sets in finite 2-groups.

Exact group-ring construction and verification of Hadamard difference sets,
signature sets, and perfect ternary arrays, plus a classification pipeline
over small-group catalogs.
"""

__version__ = "1.0.0"

from .groups import (
    AbelianGroup,
    ElemAbelianEmbedding,
    FiniteGroup,
    GroupMap,
    abelian_invariants,
    cyclic,
    dihedral,
    direct_product,
    elementary_abelian,
    find_normal_abelian_subgroup,
    find_normal_subgroups_up_to,
    generalized_quaternion,
    is_cyclic,
    is_dihedral,
    is_elementary_abelian,
    is_normal,
    modular,
    quaternion8,
    quotient,
    semidihedral,
    semidirect_cyclic,
    subgroup_as_group,
    subgroup_generated,
)
from .ring import ExponentPoly, RingElement, character_element, group_sum
from .checks import (
    HadamardParams,
    TernaryArray,
    VerificationError,
    complement_ds,
    dillon_excluded,
    hadamard_params,
    is_hadamard_ds,
    is_pta,
    is_signature_block,
    minus_one_count_check,
    turyn_excluded,
    turyn_exponent_check,
    verify_hadamard,
)
from .sigsets import (
    SignatureSet,
    abelian_signature_set,
    block_from_quotient_pta,
    hds_times_c2_signature_set,
    map_block,
    pta_search_for_signature,
    pta_signature_set,
    quaternion_signature_set,
    signature_product,
    trivial_signature_set,
)
from .assembly import (
    DriskoInstance,
    assemble_from_signature_set,
    assemble_prehadamard,
    cor_pta_ss_assemble,
    dillon_product,
    drisko_coset_reps,
    mcfarland_construct,
    modified_signature_assemble,
    original_final_assemble,
    pta_product_search,
    transfer_search,
)
from .catalog import (
    CatalogEntry,
    import_catalog,
    ClassifyConfig,
    ConstructionRecord,
    builtin_catalog_16,
    classify,
    load_records,
    read_catalog,
    save_records,
    write_catalog,
)

__all__ = [
    "CatalogEntry",
    "ClassifyConfig",
    "ConstructionRecord",
    "DriskoInstance",
    "HadamardParams",
    "SignatureSet",
    "TernaryArray",
    "VerificationError",
    "abelian_signature_set",
    "assemble_from_signature_set",
    "assemble_prehadamard",
    "block_from_quotient_pta",
    "builtin_catalog_16",
    "classify",
    "complement_ds",
    "cor_pta_ss_assemble",
    "dillon_excluded",
    "dillon_product",
    "drisko_coset_reps",
    "hadamard_params",
    "hds_times_c2_signature_set",
    "import_catalog",
    "is_hadamard_ds",
    "is_pta",
    "is_signature_block",
    "load_records",
    "map_block",
    "mcfarland_construct",
    "minus_one_count_check",
    "modified_signature_assemble",
    "original_final_assemble",
    "pta_product_search",
    "pta_search_for_signature",
    "pta_signature_set",
    "quaternion_signature_set",
    "read_catalog",
    "save_records",
    "signature_product",
    "transfer_search",
    "trivial_signature_set",
    "turyn_excluded",
    "turyn_exponent_check",
    "verify_hadamard",
    "write_catalog",
    "AbelianGroup",
    "ElemAbelianEmbedding",
    "ExponentPoly",
    "FiniteGroup",
    "GroupMap",
    "RingElement",
    "abelian_invariants",
    "character_element",
    "cyclic",
    "dihedral",
    "direct_product",
    "elementary_abelian",
    "find_normal_abelian_subgroup",
    "find_normal_subgroups_up_to",
    "generalized_quaternion",
    "group_sum",
    "is_cyclic",
    "is_dihedral",
    "is_elementary_abelian",
    "is_normal",
    "modular",
    "quaternion8",
    "quotient",
    "semidihedral",
    "semidirect_cyclic",
    "subgroup_as_group",
    "subgroup_generated",
]
