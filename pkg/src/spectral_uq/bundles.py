"""Response-bundle data model: JSONL datasets of sampled answers per question.

A bundle holds one question, its m sampled responses, gold references, and
optional per-response artifacts (encoder embeddings, pairwise NLI logits,
sequence log-probabilities, externally computed scores).  Datasets are
JSON Lines files, one bundle object per line; large embedding blocks may
live in a flat binary sidecar (``*.embed``) referenced by byte offset.
"""

import dataclasses
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SIDECAR_MAGIC = b"CSSE"
SIDECAR_VERSION = 1
FORMAT_VERSION = 1

# JSONL key order; absent optionals are omitted, never null.
_BUNDLE_KEYS = (
    "question_id",
    "question_text",
    "references",
    "responses",
    "embeddings",
    "nli_logits",
    "seq_logprobs",
    "token_counts",
    "external_scores",
)


class BundleFormatError(ValueError):
    """Raised when a bundle file or payload does not satisfy the format."""


@dataclass(frozen=True)
class Violation:
    """One invariant violation: which field and why."""

    field: str
    reason: str

    def __str__(self):
        return f"{self.field}: {self.reason}"


@dataclass(eq=False)
class ResponseBundle:
    """One question with its m sampled responses and optional artifacts.

    Attributes
    ----------
    question_id : str
        Unique within a dataset.
    question_text : str
        The input question.
    references : list[str]
        Gold answers, at least one.
    responses : list[str]
        The m >= 2 sampled responses.
    embeddings : (m, d) float64 array, optional
        One encoder vector per response.
    nli_logits : (m, m, 2, 3) float64 array, optional
        Raw 3-class logits for each ordered pair; direction 0 has response
        i as premise and j as hypothesis, direction 1 the reverse; the last
        axis is (entailment, neutral, contradiction).
    seq_logprobs : (m,) float64 array, optional
        Total sequence log-probability per response, all <= 0.
    token_counts : (m,) int array, optional
        Token count per response, all >= 1.  Required iff seq_logprobs is set.
    external_scores : dict[str, (m,) float64 array], optional
        Named per-response scores computed elsewhere (e.g. "gpt_correctness").
    """

    question_id: str
    question_text: str
    references: list
    responses: list
    embeddings: np.ndarray | None = None
    nli_logits: np.ndarray | None = None
    seq_logprobs: np.ndarray | None = None
    token_counts: np.ndarray | None = None
    external_scores: dict | None = None

    def __post_init__(self):
        if self.embeddings is not None:
            self.embeddings = np.asarray(self.embeddings, dtype=np.float64)
        if self.nli_logits is not None:
            self.nli_logits = np.asarray(self.nli_logits, dtype=np.float64)
        if self.seq_logprobs is not None:
            self.seq_logprobs = np.asarray(self.seq_logprobs, dtype=np.float64)
        if self.token_counts is not None:
            self.token_counts = np.asarray(self.token_counts, dtype=np.int64)
        if self.external_scores is not None:
            self.external_scores = {
                str(k): np.asarray(v, dtype=np.float64)
                for k, v in self.external_scores.items()
            }

    @property
    def m(self):
        """Number of sampled responses."""
        return len(self.responses)

    @property
    def dim(self):
        """Embedding width d, or None when embeddings are absent."""
        return None if self.embeddings is None else self.embeddings.shape[1]

    def __eq__(self, other):
        if not isinstance(other, ResponseBundle):
            return NotImplemented
        for f in dataclasses.fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if a is None or b is None or not np.array_equal(a, b):
                    return False
            elif f.name == "external_scores" and a is not None and b is not None:
                if a.keys() != b.keys():
                    return False
                if any(not np.array_equal(a[k], b[k]) for k in a):
                    return False
            elif a != b:
                return False
        return True


def validate_bundle(bundle):
    """Check every bundle invariant; return the list of violations.

    An empty list means the bundle is valid.  Violations are data, not
    exceptions: each one names the offending field and the reason.
    """
    out = []
    if not bundle.question_id or not isinstance(bundle.question_id, str):
        out.append(Violation("question_id", "must be a nonempty string"))
    if not isinstance(bundle.question_text, str):
        out.append(Violation("question_text", "must be a string"))
    if len(bundle.references) < 1:
        out.append(Violation("references", "need at least one gold answer"))
    if any(not isinstance(r, str) for r in bundle.references):
        out.append(Violation("references", "entries must be strings"))
    m = len(bundle.responses)
    if m < 2:
        out.append(Violation("responses", f"need m >= 2 responses, got {m}"))
    if any(not isinstance(r, str) for r in bundle.responses):
        out.append(Violation("responses", "entries must be strings"))

    E = bundle.embeddings
    if E is not None:
        if E.ndim != 2:
            out.append(Violation("embeddings", f"must be 2-D, got ndim={E.ndim}"))
        elif E.shape[0] != m:
            out.append(
                Violation("embeddings", f"row count {E.shape[0]} != m={m}")
            )
        if E.ndim == 2 and not np.isfinite(E).all():
            i, k = np.argwhere(~np.isfinite(E))[0]
            out.append(Violation("embeddings", f"non-finite at ({i},{k})"))

    L = bundle.nli_logits
    if L is not None:
        if L.ndim != 4:
            out.append(Violation("nli_logits", f"must be 4-D, got ndim={L.ndim}"))
        else:
            if L.shape[0] != m or L.shape[1] != m:
                out.append(
                    Violation("nli_logits", f"leading axes {L.shape[:2]} != ({m},{m})")
                )
            if L.shape[2] != 2:
                out.append(Violation("nli_logits", "third axis must be 2 directions"))
            if L.shape[3] != 3:
                out.append(Violation("nli_logits", "last axis must be 3"))
        if not np.isfinite(L).all():
            out.append(Violation("nli_logits", "non-finite entry"))

    lp, tc = bundle.seq_logprobs, bundle.token_counts
    if (lp is None) != (tc is None):
        out.append(
            Violation("seq_logprobs", "seq_logprobs and token_counts go together")
        )
    if lp is not None:
        if lp.shape != (m,):
            out.append(Violation("seq_logprobs", f"shape {lp.shape} != ({m},)"))
        elif not np.isfinite(lp).all():
            out.append(Violation("seq_logprobs", "non-finite entry"))
        elif (lp > 0).any():
            out.append(Violation("seq_logprobs", "entries must be <= 0"))
    if tc is not None:
        if tc.shape != (m,):
            out.append(Violation("token_counts", f"shape {tc.shape} != ({m},)"))
        elif (tc < 1).any():
            out.append(Violation("token_counts", "entries must be >= 1"))

    if bundle.external_scores is not None:
        for name, vals in bundle.external_scores.items():
            if vals.shape != (m,):
                out.append(
                    Violation(f"external_scores[{name}]", f"shape {vals.shape} != ({m},)")
                )
            elif not np.isfinite(vals).all():
                out.append(Violation(f"external_scores[{name}]", "non-finite entry"))
    return out


@dataclass
class DatasetMeta:
    """Dataset-level provenance; all fields optional except the version."""

    encoder_id: str | None = None
    nli_model_id: str | None = None
    created: str | None = None
    format_version: int = FORMAT_VERSION


@dataclass(eq=False)
class Dataset:
    """An ordered, validated collection of bundles.

    Immutable by convention after construction; safe to share read-only.
    """

    bundles: list
    meta: DatasetMeta = field(default_factory=DatasetMeta)

    def __post_init__(self):
        if not self.bundles:
            raise BundleFormatError("dataset must contain at least one bundle")
        seen = {}
        for b in self.bundles:
            errs = validate_bundle(b)
            if errs:
                raise BundleFormatError(
                    f"bundle {b.question_id!r}: " + "; ".join(map(str, errs))
                )
            if b.question_id in seen:
                raise BundleFormatError(f"duplicate question_id {b.question_id!r}")
            seen[b.question_id] = b
        dims = {b.dim for b in self.bundles if b.dim is not None}
        if len(dims) > 1:
            raise BundleFormatError(
                f"bundles disagree on embedding width d: {sorted(dims)}"
            )

    def __len__(self):
        return len(self.bundles)

    def __iter__(self):
        return iter(self.bundles)

    def __getitem__(self, i):
        return self.bundles[i]

    @property
    def dim(self):
        for b in self.bundles:
            if b.dim is not None:
                return b.dim
        return None

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.bundles == other.bundles and self.meta == other.meta


def _sidecar_path(path):
    return Path(path).with_suffix(".embed")


def _meta_path(path):
    return Path(path).with_suffix(".meta.json")


def _read_sidecar_record(blob, offset, question_id):
    header = blob[offset : offset + 8]
    if len(header) < 8:
        raise BundleFormatError(
            f"bundle {question_id!r}: sidecar offset {offset} past end of file"
        )
    m, d = struct.unpack("<II", header)
    n = m * d * 4
    data = blob[offset + 8 : offset + 8 + n]
    if len(data) < n:
        raise BundleFormatError(
            f"bundle {question_id!r}: truncated sidecar record at offset {offset}"
        )
    rows = np.frombuffer(data, dtype="<f4").reshape(m, d)
    return rows.astype(np.float64)


def _load_sidecar(path):
    blob = Path(path).read_bytes()
    if blob[:4] != SIDECAR_MAGIC:
        raise BundleFormatError(f"{path}: bad sidecar magic {blob[:4]!r}")
    (version,) = struct.unpack("<H", blob[4:6])
    if version != SIDECAR_VERSION:
        raise BundleFormatError(f"{path}: unsupported sidecar version {version}")
    return blob


def _embeddings_from_json(value, question_id, sidecar_blob, path):
    if isinstance(value, dict):
        if set(value) != {"sidecar_offset"}:
            raise BundleFormatError(
                f"bundle {question_id!r}: embeddings object must hold "
                "exactly a sidecar_offset"
            )
        if sidecar_blob is None:
            raise BundleFormatError(
                f"bundle {question_id!r}: references sidecar but "
                f"{_sidecar_path(path)} does not exist"
            )
        return _read_sidecar_record(sidecar_blob, int(value["sidecar_offset"]), question_id)
    lengths = {len(row) for row in value}
    if len(lengths) > 1:
        raise BundleFormatError(
            f"bundle {question_id!r}: embeddings rows have mixed lengths "
            f"{sorted(lengths)}"
        )
    return np.asarray(value, dtype=np.float64)


def _bundle_from_obj(obj, lineno, sidecar_blob, path):
    if not isinstance(obj, dict):
        raise BundleFormatError(f"line {lineno}: expected a JSON object")
    unknown = set(obj) - set(_BUNDLE_KEYS)
    if unknown:
        raise BundleFormatError(f"line {lineno}: unknown keys {sorted(unknown)}")
    for key in ("question_id", "question_text", "references", "responses"):
        if key not in obj:
            raise BundleFormatError(f"line {lineno}: missing required key {key!r}")
    qid = obj["question_id"]
    emb = obj.get("embeddings")
    if emb is not None:
        emb = _embeddings_from_json(emb, qid, sidecar_blob, path)
    try:
        return ResponseBundle(
            question_id=qid,
            question_text=obj["question_text"],
            references=list(obj["references"]),
            responses=list(obj["responses"]),
            embeddings=emb,
            nli_logits=obj.get("nli_logits"),
            seq_logprobs=obj.get("seq_logprobs"),
            token_counts=obj.get("token_counts"),
            external_scores=obj.get("external_scores"),
        )
    except (ValueError, TypeError) as exc:
        # ragged or non-numeric array payloads fail numpy conversion
        raise BundleFormatError(
            f"line {lineno}, bundle {qid!r}: malformed array payload: {exc}"
        ) from exc


def load_bundles(path):
    """Load and validate a JSONL bundle file into a Dataset.

    Line order is preserved.  Raises BundleFormatError with the offending
    line number (and question_id once known) on any parse or invariant
    failure; a returned Dataset always carries zero violations.
    """
    path = Path(path)
    if not path.exists():
        raise BundleFormatError(f"no such bundle file: {path}")
    sidecar_blob = None
    sp = _sidecar_path(path)
    if sp.exists():
        sidecar_blob = _load_sidecar(sp)

    bundles = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BundleFormatError(f"line {lineno}: JSON parse failure: {exc}") from exc
            bundle = _bundle_from_obj(obj, lineno, sidecar_blob, path)
            errs = validate_bundle(bundle)
            if errs:
                raise BundleFormatError(
                    f"line {lineno}, bundle {bundle.question_id!r}: "
                    + "; ".join(map(str, errs))
                )
            bundles.append(bundle)

    meta = DatasetMeta()
    mp = _meta_path(path)
    if mp.exists():
        raw = json.loads(mp.read_text(encoding="utf-8"))
        meta = DatasetMeta(
            encoder_id=raw.get("encoder_id"),
            nli_model_id=raw.get("nli_model_id"),
            created=raw.get("created"),
            format_version=raw.get("format_version", FORMAT_VERSION),
        )
    return Dataset(bundles=bundles, meta=meta)


def _bundle_to_obj(bundle, embeddings_value):
    obj = {
        "question_id": bundle.question_id,
        "question_text": bundle.question_text,
        "references": bundle.references,
        "responses": bundle.responses,
    }
    if embeddings_value is not None:
        obj["embeddings"] = embeddings_value
    if bundle.nli_logits is not None:
        obj["nli_logits"] = bundle.nli_logits.tolist()
    if bundle.seq_logprobs is not None:
        obj["seq_logprobs"] = bundle.seq_logprobs.tolist()
    if bundle.token_counts is not None:
        obj["token_counts"] = bundle.token_counts.tolist()
    if bundle.external_scores is not None:
        obj["external_scores"] = {
            k: v.tolist() for k, v in sorted(bundle.external_scores.items())
        }
    return obj


def write_bundles(dataset, path, sidecar=False):
    """Write a Dataset as JSONL, optionally spilling embeddings to a sidecar.

    With ``sidecar=True`` embeddings are stored as float32 in ``<stem>.embed``
    and each JSONL line carries only the record's byte offset.  Inline JSON
    keeps full float64 precision, so load(write(ds)) round-trips bit-exactly.
    Output bytes are a pure function of the dataset (no timestamps injected).
    """
    path = Path(path)
    sidecar_chunks = []
    sidecar_offset = 6  # magic + u16 version
    lines = []
    for bundle in dataset:
        emb_value = None
        if bundle.embeddings is not None:
            if sidecar:
                m, d = bundle.embeddings.shape
                rec = struct.pack("<II", m, d) + bundle.embeddings.astype("<f4").tobytes()
                emb_value = {"sidecar_offset": sidecar_offset}
                sidecar_chunks.append(rec)
                sidecar_offset += len(rec)
            else:
                emb_value = bundle.embeddings.tolist()
        lines.append(json.dumps(_bundle_to_obj(bundle, emb_value)))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    if sidecar_chunks:
        payload = SIDECAR_MAGIC + struct.pack("<H", SIDECAR_VERSION) + b"".join(sidecar_chunks)
        _sidecar_path(path).write_bytes(payload)
    meta = dataset.meta
    if meta != DatasetMeta():
        _meta_path(path).write_text(
            json.dumps(
                {
                    "encoder_id": meta.encoder_id,
                    "nli_model_id": meta.nli_model_id,
                    "created": meta.created,
                    "format_version": meta.format_version,
                }
            )
            + "\n",
            encoding="utf-8",
        )
