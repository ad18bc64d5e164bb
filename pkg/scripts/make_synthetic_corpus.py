#!/usr/bin/env python3
"""Generate a synthetic two-character motion corpus.

Equivalent to `symstory make-corpus`; kept as a script for quick edits to
corpus composition during experiments.
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from symstory.dataset import corpus_stats, save_charades
from symstory.synthetic import make_corpus


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="corpus.json")
    parser.add_argument("--count", type=int, default=60)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--fps", type=int, default=50)
    args = parser.parse_args()
    instances = make_corpus(args.count, seed=args.seed, fps=args.fps)
    save_charades(args.out, instances)
    stats = corpus_stats(instances)
    print(
        f"{args.out}: {stats['count']} instances, mean {stats['mean_duration_s']:.2f}s, "
        f"labels {len(stats['labels'])}"
    )


if __name__ == "__main__":
    main()
