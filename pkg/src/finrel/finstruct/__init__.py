"""Finite category instances: objects, morphisms, limits, quotients, enumeration."""
from .canon import canonical_iso, canonical_object, is_isomorphic, relabel
from .closure import extend_to_hom, generate, is_closed, subalgebra
from .core import CategoryId, FinObject, Morphism, Signature
from .io import dumps, from_data, loads, to_data
from .limits import (
    Enumeration,
    SubobjectHandle,
    as_norm,
    as_xmod,
    cokernel,
    congruence_labels,
    enumerate_subalgebras,
    equalizer,
    hom_enumerate,
    image_factorize,
    kernel,
    kernel_pair_pairs,
    norm_reflection,
    product,
    pullback,
    pullback_pairs,
    quotient_by_congruence,
    subobject,
    subobject_enumerate,
    zero_object,
)
from .validate import check_homomorphism, make_object

__all__ = [
    "CategoryId", "FinObject", "Morphism", "Signature", "Enumeration", "SubobjectHandle",
    "make_object", "check_homomorphism", "generate", "subalgebra", "is_closed", "extend_to_hom",
    "canonical_iso", "canonical_object", "is_isomorphic", "relabel",
    "dumps", "loads", "to_data", "from_data",
    "product", "pullback", "pullback_pairs", "equalizer", "kernel", "image_factorize",
    "cokernel", "quotient_by_congruence", "congruence_labels", "kernel_pair_pairs",
    "subobject", "subobject_enumerate", "enumerate_subalgebras", "hom_enumerate",
    "as_xmod", "as_norm", "norm_reflection", "zero_object",
]
