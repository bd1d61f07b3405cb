# The whole chain through the CLI surface: emit a planted fixture dataset,
# score it with every method, label correctness, and evaluate.  Identical
# to running:
#
#   spectral-uq fixtures --out demo.jsonl --clusters 1,2,3 --questions 12
#   spectral-uq score    --in demo.jsonl --methods ... --out-dir out
#   spectral-uq label    --in demo.jsonl --out out/labels.csv
#   spectral-uq eval     --scores out/scores.csv --labels out/labels.csv --out-dir out

import tempfile
from pathlib import Path

from spectral_uq.cli import main

workdir = Path(tempfile.mkdtemp())
bundles = workdir / "demo.jsonl"
out = workdir / "out"

steps = [
    ["fixtures", "--out", str(bundles), "--clusters", "1,2,3",
     "--questions", "12", "--m", "8", "--d", "16", "--seed", "21"],
    ["score", "--in", str(bundles),
     "--methods", "css-eig,css-deg,css-ecc,lgl-eig,lgl-deg,numsem,lexisim,se",
     "--pca-dim", "16", "--out-dir", str(out)],
    ["label", "--in", str(bundles), "--criterion", "rouge_l", "--out",
     str(out / "labels.csv")],
    ["eval", "--scores", str(out / "scores.csv"),
     "--labels", str(out / "labels.csv"), "--out-dir", str(out)],
]
for argv in steps:
    print("$ spectral-uq", " ".join(argv))
    assert main(argv) == 0

print("\nmetrics.csv:")
print((out / "metrics.csv").read_text())

print("first rows of the css-eig rejection curve:")
for line in (out / "curve_css-eig.csv").read_text().splitlines()[:6]:
    print(" ", line)
