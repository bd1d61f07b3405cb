"""Rouge-L scoring, correctness labeling, and the lexical-similarity baseline."""

import itertools
import re
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

ROUGE_L_THRESHOLD = 0.3
GPT_SCORE_THRESHOLD = 0.7
GPT_SCORE_KEY = "gpt_correctness"


@dataclass(frozen=True)
class RougeScore:
    """LCS-based precision/recall/F in [0, 1]; F is the harmonic mean."""

    precision: float
    recall: float
    fmeasure: float


@dataclass(frozen=True)
class CorrectnessLabel:
    question_id: str
    correct: bool
    criterion: str  # "rouge_l" or "gpt_score"
    score: float
    threshold: float


def tokenize(text):
    """Lowercase and split on maximal runs of non-alphanumeric characters.

    Deterministic and asset-free; underscores count as separators.
    """
    return _TOKEN_RE.findall(text.lower())


def lcs_length(a, b):
    """Length of the longest common subsequence, by dynamic programming."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                cur.append(prev[j - 1] + 1)
            else:
                cur.append(max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference):
    """Rouge-L of two token lists.

    P = LCS/|candidate| and R = LCS/|reference| (0 on empty denominators);
    F is 2PR/(P+R), or 0 when both are 0.
    """
    lcs = lcs_length(candidate, reference)
    p = lcs / len(candidate) if candidate else 0.0
    r = lcs / len(reference) if reference else 0.0
    f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
    return RougeScore(precision=p, recall=r, fmeasure=f)


def best_reference_rouge(text, references):
    """Maximum Rouge-L F of ``text`` against each reference string."""
    toks = tokenize(text)
    return max(rouge_l(toks, tokenize(ref)).fmeasure for ref in references)


def label_correct(bundle, response_index, criterion, threshold):
    """Judge one response of a bundle as correct or not.

    criterion "rouge_l" scores the response against the best-matching
    reference; "gpt_score" reads the stored external "gpt_correctness"
    value.  A response is correct iff score > threshold (strict).
    """
    if criterion == "rouge_l":
        if not bundle.references:
            raise ValueError(
                f"bundle {bundle.question_id!r}: rouge_l labeling needs references"
            )
        score = best_reference_rouge(bundle.responses[response_index], bundle.references)
    elif criterion == "gpt_score":
        ext = bundle.external_scores or {}
        if GPT_SCORE_KEY not in ext:
            raise ValueError(
                f"bundle {bundle.question_id!r}: gpt_score labeling needs "
                f"external_scores[{GPT_SCORE_KEY!r}]"
            )
        score = float(ext[GPT_SCORE_KEY][response_index])
    else:
        raise ValueError(f"unknown correctness criterion {criterion!r}")
    return CorrectnessLabel(
        question_id=bundle.question_id,
        correct=bool(score > threshold),
        criterion=criterion,
        score=float(score),
        threshold=float(threshold),
    )


def lexi_sim_uncertainty(responses):
    """1 minus the mean pairwise Rouge-L F over all unordered response pairs.

    Higher means more lexical disagreement; identical responses give 0,
    pairwise-disjoint ones give 1.
    """
    if len(responses) < 2:
        raise ValueError(f"need at least 2 responses, got {len(responses)}")
    toks = [tokenize(r) for r in responses]
    fs = [rouge_l(a, b).fmeasure for a, b in itertools.combinations(toks, 2)]
    return 1.0 - sum(fs) / len(fs)
