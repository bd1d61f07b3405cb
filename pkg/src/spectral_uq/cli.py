"""Command-line front door: label, score, eval, fixtures.

Configuration is layered; later layers win: built-in defaults, then a JSON
config file (--config), then SPECTRAL_UQ_* environment variables, then
explicit flags.  Any error exits nonzero without leaving partial outputs.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from .bundles import write_bundles
from .pipeline import RunConfig, cmd_eval, cmd_label, cmd_score
from .planted import planted_dataset

ENV_PREFIX = "SPECTRAL_UQ_"

_BOOL_TRUE = {"1", "true", "yes", "on"}

# RunConfig fields settable via config file / environment, with parsers.
_CONFIG_FIELDS = {
    "input": str,
    "methods": lambda v: tuple(s.strip() for s in v.split(",")) if isinstance(v, str) else tuple(v),
    "pca_dim": int,
    "pca_scope": str,
    "strategy": str,
    "laplacian": str,
    "criterion": str,
    "threshold": float,
    "length_normalize": lambda v: v if isinstance(v, bool) else str(v).lower() in _BOOL_TRUE,
    "out_dir": str,
    "seed": int,
    "threads": int,
    "judge": str,
    "pca_model": str,
    "save_pca": str,
}


def _layered_config(args):
    values = {}
    if getattr(args, "config", None):
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        unknown = set(raw) - set(_CONFIG_FIELDS)
        if unknown:
            raise ValueError(f"config file has unknown keys {sorted(unknown)}")
        for key, value in raw.items():
            values[key] = _CONFIG_FIELDS[key](value)
    for key, parse in _CONFIG_FIELDS.items():
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            values[key] = parse(env)
    for key, parse in _CONFIG_FIELDS.items():
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = parse(flag) if isinstance(flag, str) else flag
    if "input" not in values:
        raise ValueError("no input bundle file given (flag --in, config, or env)")
    return RunConfig(**values)


def _add_score_flags(p):
    p.add_argument("--in", dest="input", help="input bundle JSONL")
    p.add_argument("--methods", help="comma-separated method list")
    p.add_argument("--pca-dim", dest="pca_dim", type=int)
    p.add_argument("--pca-scope", dest="pca_scope", choices=["global", "per-question"])
    p.add_argument("--strategy", choices=["unit-sum", "prototype-cosine"])
    p.add_argument("--laplacian", choices=["normalized", "unnormalized"])
    p.add_argument("--criterion", choices=["rouge_l", "gpt_score"])
    p.add_argument("--threshold", type=float)
    p.add_argument("--length-normalize", dest="length_normalize",
                   action="store_const", const=True)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--judge", choices=["first", "most-probable"])
    p.add_argument("--pca-model", dest="pca_model",
                   help="reuse a persisted PCA fit (.cssp file)")
    p.add_argument("--save-pca", dest="save_pca",
                   help="persist the global PCA fit to this path")
    p.add_argument("--config", help="JSON config file; flags win over it")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spectral-uq",
        description="Uncertainty scores for sampled LLM answers, and their "
        "selective-answering evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="compute per-question uncertainty scores")
    _add_score_flags(p)

    p = sub.add_parser("label", help="judge correctness of each question's answer")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--criterion", choices=["rouge_l", "gpt_score"], default="rouge_l")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--judge", choices=["first", "most-probable"], default="first")
    p.add_argument("--out", required=True, help="output labels CSV")

    p = sub.add_parser("eval", help="ARC curves, AUARC, AUROC from scores + labels")
    p.add_argument("--scores", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)

    p = sub.add_parser("fixtures", help="emit a synthetic planted-cluster dataset")
    p.add_argument("--out", required=True, help="output bundle JSONL path")
    p.add_argument("--clusters", default="1,2,3",
                   help="comma list of cluster counts, cycled over questions")
    p.add_argument("--questions", type=int, default=6)
    p.add_argument("--m", type=int, default=9)
    p.add_argument("--d", type=int, default=16)
    p.add_argument("--within-cos", dest="within_cos", type=float, default=0.97)
    p.add_argument("--across-cos", dest="across_cos", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sidecar", action="store_true",
                   help="store embeddings in a binary .embed sidecar")
    return parser


def _run(args):
    if args.command == "score":
        out = cmd_score(_layered_config(args))
        print(f"wrote {out}")
    elif args.command == "label":
        threshold = args.threshold
        if threshold is None:
            threshold = 0.3 if args.criterion == "rouge_l" else 0.7
        out = cmd_label(args.input, args.criterion, threshold, args.judge, args.out)
        print(f"wrote {out}")
    elif args.command == "eval":
        for path in cmd_eval(args.scores, args.labels, args.out_dir):
            print(f"wrote {path}")
    elif args.command == "fixtures":
        counts = [int(s) for s in args.clusters.split(",")]
        dataset = planted_dataset(
            counts,
            questions=args.questions,
            m=args.m,
            d=args.d,
            within_cos=args.within_cos,
            across_cos=args.across_cos,
            seed=args.seed,
        )
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_bundles(dataset, out, sidecar=args.sidecar)
        print(f"wrote {out}")


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        _run(args)
    except Exception as exc:  # noqa: BLE001 - single reporting point for CLI
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
