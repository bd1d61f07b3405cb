# Build a tiny response-bundle dataset by hand, write it to JSONL, and
# read it back -- once with inline embeddings and once with the binary
# .embed sidecar.

import tempfile
from pathlib import Path

import numpy as np

from spectral_uq import Dataset, DatasetMeta, ResponseBundle, load_bundles, write_bundles

rng = np.random.default_rng(0)

bundles = []
for qid, question in [("q-capital", "capital of france?"), ("q-planet", "largest planet?")]:
    m, d = 4, 8
    E = rng.standard_normal((m, d))
    E /= np.linalg.norm(E, axis=1)[:, None]
    bundles.append(
        ResponseBundle(
            question_id=qid,
            question_text=question,
            references=["paris" if "france" in question else "jupiter"],
            responses=[f"sampled answer {i}" for i in range(m)],
            embeddings=E,
            seq_logprobs=-rng.uniform(0.5, 4.0, size=m),
            token_counts=rng.integers(2, 6, size=m),
        )
    )

dataset = Dataset(bundles=bundles, meta=DatasetMeta(encoder_id="demo-encoder"))

workdir = Path(tempfile.mkdtemp())
inline = workdir / "inline.jsonl"
write_bundles(dataset, inline)
print("inline file:")
print(inline.read_text().splitlines()[0][:120], "...")
print("round trip equal:", load_bundles(inline) == dataset)

spilled = workdir / "spilled.jsonl"
write_bundles(dataset, spilled, sidecar=True)
print("\nwith sidecar, the jsonl line only references a byte offset:")
print(spilled.read_text().splitlines()[0][:120], "...")
print("sidecar bytes:", (workdir / "spilled.embed").stat().st_size)

# embeddings written through the sidecar are float32; everything else is exact
reloaded = load_bundles(spilled)
drift = max(
    float(np.abs(a.embeddings - b.embeddings).max())
    for a, b in zip(reloaded, dataset)
)
print("max float32 drift through sidecar:", drift)
