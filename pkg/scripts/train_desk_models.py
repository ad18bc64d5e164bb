#!/usr/bin/env python3
"""Train all four desk-preset models on a synthetic corpus and report
recognition quality on the held-out split.

Produces checkpoints under --out-dir that `symstory serve` can load.
"""
import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from symstory.actions import BASE_ACTION_TERMS, BaseActionLexicon
from symstory.config import embedding_dimension, model_hyper, train_config
from symstory.dataset import split, subsample
from symstory.embeddings import PseudoEmbeddingProvider
from symstory.evaluate import eval_recognition
from symstory.models import MODEL_KINDS, train
from symstory.neural.checkpoint import save_checkpoint
from symstory.synthetic import make_corpus


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", default="checkpoints")
    parser.add_argument("--count", type=int, default=48)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=None, help="override preset epochs")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    instances = [subsample(i, 50, 10) for i in make_corpus(args.count, seed=args.seed)]
    n_test = max(1, len(instances) // 5)
    ds = split(instances, seed=args.seed, n_train=len(instances) - n_test, n_test=n_test)
    provider = PseudoEmbeddingProvider(dimension=embedding_dimension("desk"), seed=0)
    lexicon = BaseActionLexicon.from_provider(provider)
    gold = {t: lexicon.embedding_of(t).vector for t in BASE_ACTION_TERMS}

    models = {}
    for kind in MODEL_KINDS:
        cfg = train_config(kind, "desk", seed=args.seed)
        if args.epochs:
            cfg.epochs = args.epochs
        t0 = time.time()
        result = train(model_hyper(kind, "desk"), ds.train, ds.test, cfg, gold)
        models[kind] = result.model
        path = out_dir / f"{kind}.ckpt.json"
        save_checkpoint(path, result.checkpoint)
        meta = result.checkpoint.meta
        print(
            f"{kind:14s} {time.time()-t0:6.1f}s  best test loss {meta['test_loss']:.5f} "
            f"(epoch {meta['epoch']}) -> {path}"
        )

    report = eval_recognition(models["motion2action"], models["motion2char"], ds.test, lexicon)
    agg = report.aggregates()
    print(
        f"\nheld-out recognition over {agg['count']} instances: "
        f"mean gold rank {agg['gold_rank']['mean']:.2f}, "
        f"weight ratio {agg['weight_ratio']['mean']:.3f}, "
        f"char accuracy {agg['char_accuracy']:.2f}, "
        f"mean gini {agg['gini']['mean']:.3f}"
    )


if __name__ == "__main__":
    main()
