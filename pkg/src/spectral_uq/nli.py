"""Baselines built on pairwise NLI logits: affinities, clustering, entropy.

The raw input is an (m, m, 2, 3) logit tensor: for each ordered response
pair (i, j), direction 0 treats i as premise and j as hypothesis, direction
1 the reverse, and the class axis is (entailment, neutral, contradiction).
"""

from dataclasses import dataclass

import numpy as np

from .affinity import AffinityMatrix

ENTAILMENT, NEUTRAL, CONTRADICTION = 0, 1, 2


@dataclass(eq=False)
class Clustering:
    """Partition of m responses into semantic sets.

    ``assignment[i]`` is the 0-based cluster id of response i; ids are
    contiguous from 0 and ``cluster_count`` = max id + 1.
    """

    assignment: list
    cluster_count: int


@dataclass(eq=False)
class NliPairScores:
    """Directional pair similarities s[i, j] in [0, 1] with unit diagonal."""

    s: np.ndarray


def _softmax(logits, axis=-1):
    z = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def nli_pair_scores(logits):
    """Directional similarity from the 3-class logits of each ordered pair.

    Per pair, softmax the premise-i/hypothesis-j direction and score
    s_ij = (p_entailment + (1 - p_contradiction)) / 2, so neutral counts
    as half-similar.  The logits never pin down a unique similarity
    definition; this is one stated, switchable choice.  Diagonal forced
    to 1.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not np.isfinite(logits).all():
        raise ValueError("nli logits must be finite")
    probs = _softmax(logits[:, :, 0, :], axis=-1)
    s = (probs[:, :, ENTAILMENT] + (1.0 - probs[:, :, CONTRADICTION])) / 2.0
    np.fill_diagonal(s, 1.0)
    return NliPairScores(s=s)


def nli_affinity(scores):
    """Symmetrize directional scores: w_ij = (s_ij + s_ji) / 2."""
    s = scores.s if isinstance(scores, NliPairScores) else np.asarray(scores)
    W = (s + s.T) / 2.0
    np.fill_diagonal(W, 1.0)
    return AffinityMatrix(W=W, method="nli")


def _mutually_entails(logits, i, j):
    # argmax class must be entailment in both directions of the (i, j) entry
    fwd = int(np.argmax(logits[i, j, 0]))
    rev = int(np.argmax(logits[i, j, 1]))
    return fwd == ENTAILMENT and rev == ENTAILMENT


def bidirectional_clusters(logits):
    """Greedy semantic clustering by mutual entailment.

    Response 0 seeds cluster 0; each later response joins the first
    existing cluster whose representative (its lowest-index member) it
    mutually entails, else it seeds a new cluster.  Deterministic and
    O(m * clusters).
    """
    logits = np.asarray(logits, dtype=np.float64)
    if not np.isfinite(logits).all():
        raise ValueError("nli logits must be finite")
    m = logits.shape[0]
    representatives = []  # lowest-index member per cluster
    assignment = []
    for i in range(m):
        for cid, rep in enumerate(representatives):
            if _mutually_entails(logits, i, rep):
                assignment.append(cid)
                break
        else:
            assignment.append(len(representatives))
            representatives.append(i)
    return Clustering(assignment=assignment, cluster_count=len(representatives))


def num_sem_uncertainty(clustering):
    """Count of semantically distinct responses; in {1, ..., m}."""
    return float(clustering.cluster_count)


def semantic_entropy(clustering, seq_logprobs, token_counts=None, length_normalize=False):
    """Entropy over per-cluster probability mass, averaged over clusters.

    Member log-likelihoods (optionally divided by token count) are
    aggregated per cluster by log-sum-exp; cluster masses are renormalized
    to sum to 1 (sampled sequence probabilities never do on their own),
    and the result is -(1/C) * sum_i log p(C_i).

    Zero iff everything lands in one cluster; equals ln C for C clusters
    of equal mass.
    """
    lp = np.asarray(seq_logprobs, dtype=np.float64)
    if length_normalize:
        if token_counts is None:
            raise ValueError("length normalization requires token counts")
        lp = lp / np.asarray(token_counts, dtype=np.float64)
    assignment = np.asarray(clustering.assignment)
    if assignment.shape != lp.shape:
        raise ValueError("clustering and seq_logprobs must cover the same m responses")
    n_clusters = clustering.cluster_count
    log_masses = np.empty(n_clusters)
    for c in range(n_clusters):
        member = lp[assignment == c]
        peak = member.max()
        log_masses[c] = peak + np.log(np.exp(member - peak).sum())
    total_peak = log_masses.max()
    log_total = total_peak + np.log(np.exp(log_masses - total_peak).sum())
    log_p = log_masses - log_total
    return float(-log_p.mean())
