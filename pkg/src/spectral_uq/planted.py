"""Deterministic synthetic bundles with planted cluster structure.

Embeddings are built by factoring a target cosine (Gram) matrix, so planted
within/across-cluster similarities are hit exactly whenever the embedding
width allows (d >= m) and within 0.05 otherwise.  Responses share tokens
within a cluster and none across, NLI logits encode mutual entailment
within clusters, and log-probabilities are filled in deterministically, so
every scoring method has something to chew on.
"""

from dataclasses import dataclass

import numpy as np

from .bundles import Dataset, DatasetMeta, ResponseBundle

_ENTAILING = (4.0, 0.0, -4.0)
_CONTRADICTING = (-4.0, 0.0, 4.0)
_BASE_TOKENS_PER_CLUSTER = 4


@dataclass(frozen=True)
class PlantedSpec:
    """Recipe for one synthetic bundle."""

    m: int
    d: int
    cluster_sizes: tuple
    within_cos: float = 0.97
    across_cos: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if sum(self.cluster_sizes) != self.m:
            raise ValueError(
                f"cluster sizes {self.cluster_sizes} must sum to m={self.m}"
            )
        if not (-1.0 <= self.across_cos < self.within_cos <= 1.0):
            raise ValueError("need -1 <= across_cos < within_cos <= 1")


def _cluster_assignment(sizes):
    out = []
    for cid, size in enumerate(sizes):
        out.extend([cid] * size)
    return out


def _planted_embeddings(spec, rng):
    assignment = np.array(_cluster_assignment(spec.cluster_sizes))
    same = assignment[:, None] == assignment[None, :]
    G = np.where(same, spec.within_cos, spec.across_cos)
    np.fill_diagonal(G, 1.0)

    eigvals, eigvecs = np.linalg.eigh(G)
    eigvals = np.clip(eigvals, 0.0, None)
    order = np.argsort(eigvals)[::-1]
    keep = order[: min(spec.d, spec.m)]
    coords = eigvecs[:, keep] * np.sqrt(eigvals[keep])
    if spec.d > coords.shape[1]:
        coords = np.hstack([coords, np.zeros((spec.m, spec.d - coords.shape[1]))])

    # random rotation for genericity; cosines are rotation-invariant
    Q, _ = np.linalg.qr(rng.standard_normal((spec.d, spec.d)))
    coords = coords @ Q
    norms = np.linalg.norm(coords, axis=1)
    if norms.min() <= 1e-9:
        raise ValueError(
            f"cosine targets infeasible for d={spec.d}: a response lost its "
            "embedding entirely under truncation"
        )
    coords /= norms[:, None]

    achieved = coords @ coords.T
    target = np.where(same, spec.within_cos, spec.across_cos).astype(float)
    np.fill_diagonal(target, 1.0)
    err = np.abs(achieved - target).max()
    if not np.isfinite(err) or err > 0.05:
        raise ValueError(
            f"cosine targets infeasible for d={spec.d}: worst error {err:.3f}"
        )
    return coords, assignment


def _planted_nli_logits(assignment):
    m = len(assignment)
    same = np.asarray(assignment)[:, None] == np.asarray(assignment)[None, :]
    logits = np.where(
        same[:, :, None, None],
        np.array(_ENTAILING)[None, None, None, :],
        np.array(_CONTRADICTING)[None, None, None, :],
    )
    return np.broadcast_to(logits, (m, m, 2, 3)).copy()


def generate_planted(spec, question_id="planted"):
    """One synthetic ResponseBundle realizing a PlantedSpec, seed-determined.

    The gold reference matches one seed-chosen cluster, so with several
    planted clusters the first (judged) response is sometimes wrong; that
    makes correctness correlate with uncertainty the way real selective
    answering expects.
    """
    rng = np.random.default_rng(spec.seed)
    embeddings, assignment = _planted_embeddings(spec, rng)

    base = {
        cid: [f"topic{cid}w{t}" for t in range(_BASE_TOKENS_PER_CLUSTER)]
        for cid in range(len(spec.cluster_sizes))
    }
    responses = [
        " ".join(base[cid] + [f"variant{i}"]) for i, cid in enumerate(assignment)
    ]
    ref_cluster = int(rng.integers(0, len(spec.cluster_sizes)))
    references = [" ".join(base[ref_cluster])]
    token_counts = np.array([len(r.split()) for r in responses])
    seq_logprobs = -(1.0 + 0.25 * (np.arange(spec.m) % 4)).astype(float)
    gpt_scores = np.where(assignment == ref_cluster, 0.9, 0.1).astype(float)

    return ResponseBundle(
        question_id=question_id,
        question_text=f"synthetic planted question (seed {spec.seed})",
        references=references,
        responses=responses,
        embeddings=embeddings,
        nli_logits=_planted_nli_logits(assignment),
        seq_logprobs=seq_logprobs,
        token_counts=token_counts,
        external_scores={"gpt_correctness": gpt_scores},
    )


def _near_equal_split(m, k):
    return tuple(m // k + (1 if i < m % k else 0) for i in range(k))


def planted_dataset(
    cluster_counts,
    questions,
    m=9,
    d=16,
    within_cos=0.97,
    across_cos=0.0,
    seed=0,
):
    """A dataset of planted bundles, cycling the given cluster counts.

    Per-question seeds derive from the base seed, so the whole dataset is a
    pure function of its arguments.
    """
    bundles = []
    for q in range(questions):
        k = cluster_counts[q % len(cluster_counts)]
        spec = PlantedSpec(
            m=m,
            d=d,
            cluster_sizes=_near_equal_split(m, k),
            within_cos=within_cos,
            across_cos=across_cos,
            seed=seed * 100003 + q,
        )
        bundles.append(generate_planted(spec, question_id=f"q{q:04d}"))
    meta = DatasetMeta(encoder_id="planted", nli_model_id="planted")
    return Dataset(bundles=bundles, meta=meta)
