"""Command-line entry points: training, evaluation, serving, data tooling."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .actions import BASE_ACTION_TERMS, BaseActionLexicon
from .config import PRESETS, ServiceConfig, embedding_dimension, model_hyper, train_config
from .dataset import corpus_stats, load_charades, save_charades, split, subsample
from .embeddings import PseudoEmbeddingProvider, TableEmbeddingProvider
from .evaluate import eval_recognition, latency_bench, mst_dispersion
from .models import MODEL_KINDS, SequenceModel, train
from .neural.checkpoint import load_checkpoint, save_checkpoint
from .synthetic import make_corpus

log = logging.getLogger("symstory")


def _provider(args, preset: str):
    if getattr(args, "embeddings", None):
        return TableEmbeddingProvider(args.embeddings)
    return PseudoEmbeddingProvider(dimension=embedding_dimension(preset), seed=0)


def _load_runtime_corpus(path):
    instances = load_charades(path)
    out = []
    for inst in instances:
        if inst.trajectory.fps != 10:
            inst = subsample(inst, src_fps=inst.trajectory.fps, dst_fps=10)
        out.append(inst)
    return out


def cmd_train(args) -> int:
    instances = _load_runtime_corpus(args.corpus)
    if not instances:
        print("corpus is empty", file=sys.stderr)
        return 1
    n_test = args.n_test if args.n_test is not None else max(1, len(instances) // 5)
    n_train = len(instances) - n_test
    ds = split(instances, seed=args.seed, n_train=n_train, n_test=n_test)
    provider = _provider(args, args.preset)
    lexicon = BaseActionLexicon.from_provider(provider)
    gold = {t: lexicon.embedding_of(t).vector for t in BASE_ACTION_TERMS}
    hyper = model_hyper(args.model, args.preset)
    if hyper.embed_dim != provider.dimension:
        hyper = type(hyper).from_dict({**hyper.to_dict(), "embed_dim": provider.dimension})
    cfg = train_config(args.model, args.preset, seed=args.seed)
    if args.epochs:
        cfg.epochs = args.epochs
    print(
        f"training {args.model} ({args.preset} preset) on {n_train}/{n_test} instances, "
        f"lr={cfg.learning_rate} batch={cfg.batch_size} epochs={cfg.epochs}"
    )
    result = train(hyper, ds.train, ds.test, cfg, gold)
    save_checkpoint(args.out, result.checkpoint)
    meta = result.checkpoint.meta
    print(f"saved {args.out}: best test loss {meta['test_loss']:.6f} at epoch {meta['epoch']}")
    return 0


def cmd_eval_recognition(args) -> int:
    instances = _load_runtime_corpus(args.corpus)
    m2a_path, m2c_path = args.checkpoints if args.checkpoints else (args.m2a, args.m2c)
    if not (m2a_path and m2c_path):
        print("need --checkpoints M2A M2C (or --m2a/--m2c)", file=sys.stderr)
        return 2
    m2a = SequenceModel.from_checkpoint(load_checkpoint(m2a_path))
    m2c = SequenceModel.from_checkpoint(load_checkpoint(m2c_path))
    provider = _provider(args, args.preset)
    lexicon = BaseActionLexicon.from_provider(provider)
    report = eval_recognition(m2a, m2c, instances, lexicon)
    agg = report.aggregates()
    print(json.dumps(agg, indent=2))
    ref = "full-scale reference gini: ours 0.12 vs hosted baselines 0.51 / 0.60"
    print(ref)
    if args.out:
        report.write_json(args.out)
        report.write_csv(Path(args.out).with_suffix(".csv"))
        print(f"wrote {args.out}")
    return 0


def cmd_eval_diversity(args) -> int:
    doc = json.loads(Path(args.embeddings).read_text())
    if "vectors" in doc:
        vectors = doc["vectors"]
    elif "entries" in doc:
        vectors = list(doc["entries"].values())
    else:
        print("embeddings file needs 'vectors' or 'entries'", file=sys.stderr)
        return 1
    report = mst_dispersion(vectors)
    print(json.dumps({k: v for k, v in report.to_dict().items() if k != "edges"}, indent=2))
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2))
        print(f"wrote {args.out}")
    return 0


def cmd_eval_latency(args) -> int:
    provider = PseudoEmbeddingProvider(dimension=embedding_dimension(args.preset), seed=0)
    lexicon = BaseActionLexicon.from_provider(provider)
    models = {
        kind: SequenceModel(
            type(model_hyper(kind, args.preset)).from_dict(
                {**model_hyper(kind, args.preset).to_dict(), "embed_dim": provider.dimension}
            ),
            seed=0,
        )
        for kind in MODEL_KINDS
    }
    report = latency_bench(models, lexicon, n_frames=args.frames)
    stats = report.stats()
    print(json.dumps(stats, indent=2))
    budget = 0.1
    verdict = "PASS" if stats["p95_s"] < budget else "FAIL"
    print(f"p95 {stats['p95_s']*1000:.2f} ms vs {budget*1000:.0f} ms budget: {verdict}")
    if args.out:
        report.write_json(args.out)
        report.write_csv(Path(args.out).with_suffix(".csv"))
        print(f"wrote {args.out}")
    return 0 if verdict == "PASS" else 1


def cmd_make_corpus(args) -> int:
    instances = make_corpus(args.count, seed=args.seed, fps=args.fps)
    save_charades(args.out, instances)
    stats = corpus_stats(instances)
    print(
        f"wrote {args.out}: {stats['count']} instances, "
        f"mean duration {stats['mean_duration_s']:.2f}s at {args.fps} fps"
    )
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    if args.config:
        config = ServiceConfig.load(args.config)
    else:
        config = ServiceConfig(preset=args.preset, seed=args.seed)
    static = Path(args.static) if args.static else None
    app = build_app(config, journal_dir=Path(args.journals) if args.journals else None,
                    static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_serve_providers(args) -> int:
    import uvicorn

    from .service import build_provider_app

    app = build_provider_app(seed=args.seed, embed_dim=args.dim)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symstory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one model kind on a corpus")
    p.add_argument("--model", choices=MODEL_KINDS, required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--preset", choices=PRESETS, default="desk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=None, help="override preset epochs")
    p.add_argument("--n-test", type=int, default=None)
    p.add_argument("--embeddings", help="JSON table of precomputed term embeddings")
    p.set_defaults(fn=cmd_train)

    pe = sub.add_parser("eval", help="evaluation harness")
    esub = pe.add_subparsers(dest="eval_command", required=True)

    p = esub.add_parser("recognition", help="gold-rank/weight-ratio/latency on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument(
        "--checkpoints",
        nargs=2,
        metavar=("M2A", "M2C"),
        help="motion2action and motion2char checkpoints",
    )
    p.add_argument("--m2a", help="motion2action checkpoint")
    p.add_argument("--m2c", help="motion2char checkpoint")
    p.add_argument("--preset", choices=PRESETS, default="desk")
    p.add_argument("--embeddings")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_eval_recognition)

    p = esub.add_parser("diversity", help="MST dispersion of an embedding set")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_eval_diversity)

    p = esub.add_parser("latency", help="per-tick pipeline latency benchmark")
    p.add_argument("--preset", choices=PRESETS, default="desk")
    p.add_argument("--frames", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_eval_latency)

    p = sub.add_parser("make-corpus", help="generate a synthetic motion corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fps", type=int, default=50)
    p.set_defaults(fn=cmd_make_corpus)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--config", help="TOML or JSON service config")
    p.add_argument("--preset", choices=PRESETS, default="desk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--journals", help="directory for session journals")
    p.add_argument("--static", help="directory of UI assets to serve")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("serve-providers", help="run the stub provider service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8001)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=32)
    p.set_defaults(fn=cmd_serve_providers)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
