"""Variable-exponent sequence spaces l^{p(.)}."""
__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    ReflexivityVerdict,
    WlurWitness,
    build_wlur_counterexample,
    check_lower_estimate,
    check_upper_estimate,
    classify_reflexivity,
    evaluate_wlur_witness,
    random_disjoint_family,
)
from .duality import (  # noqa: E402
    DualFunctional,
    SubspaceMap,
    dual_norm_bruteforce,
    extract_subspace,
    holder_pairing,
    lift_vector,
)
from .embeddings import (  # noqa: E402
    EmbeddingMap,
    build_embedding,
    certify_distortion,
    convergent_subsequence,
    op_norm_2d,
    pathological_exponents,
    universal_exponents,
)
from .errors import *  # noqa: E402,F401,F403
from .exponents import ExponentSeq, INF, as_exponent  # noqa: E402
from .norm import NormEnclosure, boxplus, dual_exponent, norm, phi_norm, seminorms  # noqa: E402
from .vectors import SeqVector, TailCertificate, project_head, project_tail, sign_flip  # noqa: E402
