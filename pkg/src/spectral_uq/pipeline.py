"""End-to-end orchestration: score bundles, label correctness, evaluate.

Everything here is deterministic given the configuration and input files;
repeated runs produce byte-identical outputs.  Failures surface before any
metric file is written, so output directories never hold partial results.
"""

import csv
import io
import re
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import css, nli, selective, spectral, textmetrics
from .bundles import load_bundles

KNOWN_METHODS = (
    "css-eig",
    "css-deg",
    "css-ecc",
    "lgl-eig",
    "lgl-deg",
    "lgl-ecc",
    "numsem",
    "lexisim",
    "se",
)
EXTERNAL_PREFIX = "external:"

ScoreRow = namedtuple("ScoreRow", ["question_id", "method", "uncertainty"])
LabelRow = namedtuple(
    "LabelRow", ["question_id", "response_index", "criterion", "score", "correct"]
)
MethodReport = namedtuple(
    "MethodReport", ["method", "auarc", "auroc", "n", "base_accuracy", "curve"]
)


class PrerequisiteError(ValueError):
    """A requested method needs data the input bundles do not carry."""


class JoinError(ValueError):
    """Score and label files do not cover the same question_ids."""


@dataclass(frozen=True)
class RunConfig:
    """Reproducible configuration for a scoring run."""

    input: str
    methods: tuple = ("css-eig", "css-deg", "css-ecc")
    pca_dim: int = 64
    pca_scope: str = "global"  # or "per-question"
    strategy: str = "unit-sum"
    laplacian: str = "normalized"  # or "unnormalized"
    criterion: str = "rouge_l"
    threshold: float = 0.3
    length_normalize: bool = False
    out_dir: str = "."
    seed: int = 0
    threads: int = 1
    judge: str = "first"  # or "most-probable"
    pca_model: str | None = None  # reuse a persisted fit instead of refitting
    save_pca: str | None = None  # persist the global fit for later runs

    def __post_init__(self):
        if not self.methods:
            raise ValueError("method set must be nonempty")
        if self.pca_dim < 1:
            raise ValueError("pca_dim must be >= 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.pca_scope not in ("global", "per-question"):
            raise ValueError(f"unknown pca_scope {self.pca_scope!r}")
        if self.strategy not in css.STRATEGIES:
            raise ValueError(f"unknown projection strategy {self.strategy!r}")
        if self.laplacian not in ("normalized", "unnormalized"):
            raise ValueError(f"unknown laplacian variant {self.laplacian!r}")
        if self.criterion not in ("rouge_l", "gpt_score"):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.judge not in ("first", "most-probable"):
            raise ValueError(f"unknown judge policy {self.judge!r}")
        if self.pca_model and self.pca_scope != "global":
            raise ValueError("a persisted PCA model only makes sense at global scope")
        for method in self.methods:
            if method not in KNOWN_METHODS and not method.startswith(EXTERNAL_PREFIX):
                raise ValueError(f"unknown method {method!r}")


def judged_index(bundle, judge="first"):
    """Which of the m responses is judged for correctness: index 0, or the
    highest-log-probability one under the most-probable policy."""
    if judge == "most-probable" and bundle.seq_logprobs is not None:
        return int(np.argmax(bundle.seq_logprobs))
    return 0


def _check_prerequisites(dataset, methods):
    needs_embeddings = [m for m in methods if m.startswith("css-")]
    needs_logits = [m for m in methods if m.startswith("lgl-") or m in ("numsem", "se")]
    for bundle in dataset:
        if needs_embeddings and bundle.embeddings is None:
            raise PrerequisiteError(
                f"method {needs_embeddings[0]}: bundle {bundle.question_id!r} "
                "has no embeddings"
            )
        if needs_logits and bundle.nli_logits is None:
            raise PrerequisiteError(
                f"method {needs_logits[0]}: bundle {bundle.question_id!r} "
                "has no nli_logits"
            )
        if "se" in methods and bundle.seq_logprobs is None:
            raise PrerequisiteError(
                f"method se: bundle {bundle.question_id!r} has no seq_logprobs"
            )
        for method in methods:
            if method.startswith(EXTERNAL_PREFIX):
                name = method[len(EXTERNAL_PREFIX) :]
                if name not in (bundle.external_scores or {}):
                    raise PrerequisiteError(
                        f"method {method}: bundle {bundle.question_id!r} has no "
                        f"external_scores[{name!r}]"
                    )


def _fit_css_models(dataset, config):
    """Pair features per bundle plus the PCA model(s) at the configured scope."""
    d = dataset.dim
    if config.pca_dim > d:
        raise PrerequisiteError(
            f"pca_dim {config.pca_dim} exceeds embedding width d={d}"
        )
    feature_sets = [
        css.hadamard_features(css.normalize_embeddings(b.embeddings)) for b in dataset
    ]
    if config.pca_model:
        model = css.load_pca(config.pca_model)
        if model.d != d:
            raise PrerequisiteError(
                f"persisted PCA model has d={model.d}, dataset has d={d}"
            )
        models = [model] * len(feature_sets)
    elif config.pca_scope == "global":
        pooled = np.vstack([fs.features for fs in feature_sets])
        model = css.fit_pca(pooled, config.pca_dim)
        if config.save_pca:
            css.save_pca(model, config.save_pca)
        models = [model] * len(feature_sets)
    else:
        models = [css.fit_pca(fs.features, config.pca_dim) for fs in feature_sets]
    return feature_sets, models


def _score_bundle(bundle, config, pair_features, pca_model):
    values = {}
    css_methods = [m for m in config.methods if m.startswith("css-")]
    lgl_methods = [m for m in config.methods if m.startswith("lgl-")]
    normalized = config.laplacian == "normalized"

    if css_methods:
        W = css.project_affinity(pair_features, pca_model, strategy=config.strategy)
        result = spectral.spectral_scores(
            W, normalized=normalized, label=bundle.question_id
        )
        values["css-eig"] = result.u_eig
        values["css-deg"] = result.u_deg
        values["css-ecc"] = result.u_ecc
    if lgl_methods:
        W = nli.nli_affinity(nli.nli_pair_scores(bundle.nli_logits))
        result = spectral.spectral_scores(
            W, normalized=normalized, label=bundle.question_id
        )
        values["lgl-eig"] = result.u_eig
        values["lgl-deg"] = result.u_deg
        values["lgl-ecc"] = result.u_ecc
    if "numsem" in config.methods or "se" in config.methods:
        clustering = nli.bidirectional_clusters(bundle.nli_logits)
        values["numsem"] = nli.num_sem_uncertainty(clustering)
        if "se" in config.methods:
            values["se"] = nli.semantic_entropy(
                clustering,
                bundle.seq_logprobs,
                bundle.token_counts,
                length_normalize=config.length_normalize,
            )
    if "lexisim" in config.methods:
        values["lexisim"] = textmetrics.lexi_sim_uncertainty(bundle.responses)
    for method in config.methods:
        if method.startswith(EXTERNAL_PREFIX):
            name = method[len(EXTERNAL_PREFIX) :]
            idx = judged_index(bundle, config.judge)
            values[method] = float(bundle.external_scores[name][idx])
    return [
        ScoreRow(bundle.question_id, method, float(values[method]))
        for method in config.methods
    ]


def score_dataset(dataset, config):
    """Uncertainty scores for every (question, method), higher = less sure.

    Bundles are scored on a thread pool and gathered in input order, so the
    row order never depends on scheduling.
    """
    _check_prerequisites(dataset, config.methods)
    if any(m.startswith("css-") for m in config.methods):
        feature_sets, models = _fit_css_models(dataset, config)
    else:
        feature_sets = models = [None] * len(dataset)

    def run(args):
        bundle, fs, model = args
        return _score_bundle(bundle, config, fs, model)

    jobs = list(zip(dataset, feature_sets, models))
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            per_bundle = list(pool.map(run, jobs))
    else:
        per_bundle = [run(job) for job in jobs]
    return [row for rows in per_bundle for row in rows]


def label_dataset(dataset, criterion="rouge_l", threshold=0.3, judge="first"):
    """One correctness label per question, on the judged response."""
    rows = []
    for bundle in dataset:
        idx = judged_index(bundle, judge)
        label = textmetrics.label_correct(bundle, idx, criterion, threshold)
        rows.append(LabelRow(bundle.question_id, idx, criterion, label.score, label.correct))
    return rows


# ---------------------------------------------------------------------------
# CSV persistence (fixed formats; all writes happen after computation)


def scores_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["question_id", "method", "uncertainty"])
    for r in rows:
        w.writerow([r.question_id, r.method, format(r.uncertainty, ".12g")])
    return buf.getvalue()


def labels_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["question_id", "response_index", "criterion", "score", "correct"])
    for r in rows:
        w.writerow(
            [r.question_id, r.response_index, r.criterion,
             format(r.score, ".6f"), str(bool(r.correct)).lower()]
        )
    return buf.getvalue()


def curve_to_csv(curve):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rejection_fraction", "accuracy"])
    for f, a in zip(curve.fractions, curve.accuracies):
        w.writerow([format(f, ".6f"), format(a, ".6f")])
    return buf.getvalue()


def read_scores_csv(path):
    """Scores as (method -> {question_id: uncertainty}, method order)."""
    by_method, order = {}, []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            method = rec["method"]
            if method not in by_method:
                by_method[method] = {}
                order.append(method)
            by_method[method][rec["question_id"]] = float(rec["uncertainty"])
    return by_method, order


def read_labels_csv(path):
    labels = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            labels[rec["question_id"]] = rec["correct"] == "true"
    return labels


def _safe_name(method):
    return re.sub(r"[^A-Za-z0-9._-]", "_", method)


def evaluate_scores(by_method, method_order, labels):
    """Per-method AUARC/AUROC and curves, plus the oracle curve.

    Requires the score and label files to cover exactly the same questions;
    any mismatch is reported exhaustively.
    """
    label_ids = set(labels)
    reports = []
    for method in method_order:
        scores = by_method[method]
        missing_labels = sorted(set(scores) - label_ids)
        missing_scores = sorted(label_ids - set(scores))
        if missing_labels or missing_scores:
            raise JoinError(
                f"method {method}: question_ids without labels: {missing_labels}; "
                f"labels without scores: {missing_scores}"
            )
        qids = sorted(scores)
        u = np.array([scores[q] for q in qids])
        correct = np.array([labels[q] for q in qids], dtype=bool)
        curve = selective.arc_curve(u, correct, question_ids=qids)
        try:
            roc = selective.auroc(u, correct)
        except selective.UndefinedMetricError:
            roc = None
        reports.append(
            MethodReport(
                method=method,
                auarc=selective.auarc(curve),
                auroc=roc,
                n=len(qids),
                base_accuracy=float(correct.mean()),
                curve=curve,
            )
        )
    oracle = selective.oracle_curve([labels[q] for q in sorted(labels)])
    return reports, oracle


def metrics_to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "auarc", "auroc", "n", "base_accuracy"])
    for r in reports:
        roc = "undefined" if r.auroc is None else format(r.auroc, ".6f")
        w.writerow(
            [r.method, format(r.auarc, ".6f"), roc, r.n, format(r.base_accuracy, ".6f")]
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Subcommand bodies


def cmd_score(config):
    """Score a bundle file and persist scores.csv into the output directory."""
    dataset = load_bundles(config.input)
    rows = score_dataset(dataset, config)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "scores.csv"
    out.write_text(scores_to_csv(rows), encoding="utf-8")
    return out


def cmd_label(input_path, criterion, threshold, judge, out_path):
    dataset = load_bundles(input_path)
    rows = label_dataset(dataset, criterion=criterion, threshold=threshold, judge=judge)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(labels_to_csv(rows), encoding="utf-8")
    return out_path


def cmd_eval(scores_path, labels_path, out_dir):
    by_method, order = read_scores_csv(scores_path)
    if not order:
        raise JoinError(f"no score rows found in {scores_path}")
    labels = read_labels_csv(labels_path)
    reports, oracle = evaluate_scores(by_method, order, labels)

    # all texts rendered before any file is touched
    texts = {"metrics.csv": metrics_to_csv(reports)}
    for r in reports:
        texts[f"curve_{_safe_name(r.method)}.csv"] = curve_to_csv(r.curve)
    texts["curve_oracle.csv"] = curve_to_csv(oracle)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in texts.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
