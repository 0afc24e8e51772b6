"""ambiglab: certified unidentifiability witnesses for blind deconvolution.

Builds families of signal pairs that convolve to the same output while
being inequivalent under the scalar exchange, within sparse and
subspace-coded feasible cones; verifies the certificates independently and
measures the ambiguity dimension numerically.
"""

from .cones import (ConeSpec, PairType, classify_pair, coded, geometric_profile,
                    member, p_of, sample, shift_minus_one, unconstrained, zero)
from .convolution import (channel_superposition, convolve, delay_matrix,
                          in_nullspace, lift_apply, numerical_rank,
                          rank2_null_matrix)
from .generators import (AdversarialInstance, SignalPair, build_pair_from_params,
                         certificate_from_params, gen_coded_instance,
                         gen_mixed_instance, gen_sparse_instance,
                         rotational_family)
from .quotient import QuotientElement, decompose, decompose_oracle, reconstruct
from .verification import (AmbiguityFamily, DimProbeResult, VerificationReport,
                           check_pathology, estimate_unidentifiable_dim,
                           jacobian_rank, verify_instance)

__version__ = "0.1.0"

__all__ = [
    "AdversarialInstance", "AmbiguityFamily", "ConeSpec", "DimProbeResult",
    "PairType", "QuotientElement", "SignalPair", "VerificationReport",
    "build_pair_from_params", "certificate_from_params",
    "channel_superposition", "check_pathology", "classify_pair", "coded",
    "convolve", "decompose", "decompose_oracle", "delay_matrix",
    "estimate_unidentifiable_dim", "gen_coded_instance", "gen_mixed_instance",
    "gen_sparse_instance", "geometric_profile", "in_nullspace",
    "jacobian_rank", "lift_apply", "member", "numerical_rank", "p_of",
    "rank2_null_matrix", "reconstruct", "rotational_family", "sample",
    "shift_minus_one", "unconstrained", "verify_instance", "zero",
]
