"""Uncertainty quantification for sets of sampled LLM responses.

Builds pairwise semantic affinities (from contrastive embedding features or
NLI logits), derives graph-Laplacian uncertainty scores, and evaluates them
with selective-answering metrics.
"""

from .affinity import AffinityMatrix, as_affinity
from .bundles import (
    BundleFormatError,
    Dataset,
    DatasetMeta,
    ResponseBundle,
    Violation,
    load_bundles,
    validate_bundle,
    write_bundles,
)
from .css import (
    PairFeatureSet,
    PcaModel,
    fit_pca,
    hadamard_features,
    load_pca,
    normalize_embeddings,
    project_affinity,
    save_pca,
)
from .jacobi import EigenConvergenceError, jacobi_eigh
from .nli import (
    Clustering,
    NliPairScores,
    bidirectional_clusters,
    nli_affinity,
    nli_pair_scores,
    num_sem_uncertainty,
    semantic_entropy,
)
from .pipeline import (
    JoinError,
    PrerequisiteError,
    RunConfig,
    evaluate_scores,
    label_dataset,
    score_dataset,
)
from .planted import PlantedSpec, generate_planted, planted_dataset
from .selective import (
    CurvePoints,
    UndefinedMetricError,
    arc_curve,
    auarc,
    auroc,
    oracle_curve,
)
from .spectral import (
    SpectralResult,
    degree_uncertainty,
    ecc_uncertainty,
    eig_uncertainty,
    laplacian_spectrum,
    spectral_scores,
)
from .textmetrics import (
    CorrectnessLabel,
    RougeScore,
    label_correct,
    lexi_sim_uncertainty,
    rouge_l,
    tokenize,
)

__version__ = "0.1.0"
