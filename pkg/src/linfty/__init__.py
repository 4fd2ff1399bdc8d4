"""Exact-arithmetic kernel for homotopy Lie and Loday structures.

Everything is computed over the rationals with sparse structure constants;
identities are verified on words of bounded length and every verdict is
"up to the stated weight".
"""
from .graded import (
    GradedSpace,
    canonical_sort,
    increasing_unshuffles,
    koszul_sign,
    permute,
    unshuffles,
)
from .multimap import (
    MultiMap,
    TruncatedCoderivation,
    TruncatedComorphism,
    balavoine_bracket,
    commutator,
    coshuffle_coproduct,
    decalage,
    decalage_inverse,
    lift_comorphism,
    lift_symmetric_coderivation,
    lift_zinbiel_coderivation,
    shifted_bracket,
    symmetrize,
    zinbiel_coproduct,
)
from .homotopy import (
    DglaOnCoder,
    EndSpace,
    HomotopyStructure,
    McElement,
    check_lie_infinity,
    check_lie_morphism,
    check_loday_infinity,
    check_loday_morphism,
    check_representation,
    coder_dgla,
    end_dgla,
    lie_to_loday,
    maurer_cartan,
    mc_residual,
    twist,
)
from .action import (
    ActionFamily,
    BiMultiMap,
    HemiProduct,
    adjoint_action,
    adjoint_representation,
    check_action,
    check_coherence,
    hemisemidirect,
    theorem_crosscheck,
)
from .tensor import (
    DeformationComplex,
    EmbeddingTensor,
    HomElement,
    adjoint_strict_check,
    centroid_check,
    check_descendent_morphism,
    check_embedding,
    check_embedding_explicit,
    check_embedding_mc,
    cohomology_rank,
    deformation_complex,
    descendent,
    extend_tensor,
    identity_tensor,
    restriction_lemma_check,
    strict_algebra_compose,
)
from .fileformat import StructureFile, parse, parse_path, serialize
from .report import CheckReport, InputError, Residual, RouteDisagreement

__all__ = [name for name in dir() if not name.startswith("_")]
