import numpy as np
import pytest

from spectral_uq.bundles import ResponseBundle


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_bundle(
    question_id="q1",
    m=3,
    d=4,
    rng=None,
    with_embeddings=True,
    with_logits=False,
    with_logprobs=False,
    **overrides,
):
    """A small well-formed bundle for tests; optional fields on demand."""
    rng = rng or np.random.default_rng(0)
    fields = dict(
        question_id=question_id,
        question_text="what color is the sky?",
        references=["blue"],
        responses=[f"answer number {i}" for i in range(m)],
    )
    if with_embeddings:
        E = rng.standard_normal((m, d))
        fields["embeddings"] = E / np.linalg.norm(E, axis=1)[:, None]
    if with_logits:
        fields["nli_logits"] = rng.standard_normal((m, m, 2, 3))
    if with_logprobs:
        fields["seq_logprobs"] = -rng.uniform(0.5, 5.0, size=m)
        fields["token_counts"] = rng.integers(1, 10, size=m)
    fields.update(overrides)
    return ResponseBundle(**fields)
