#!/usr/bin/env python3
"""Replay a recorded event log through an offline session and print the
resulting story, segment by segment.
"""
import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from symstory.config import ServiceConfig, model_hyper
from symstory.session import PipelineBundle, Session


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "log",
        nargs="?",
        default=str(
            Path(__file__).resolve().parents[1]
            / "tests" / "data" / "event_logs" / "motion_first_auto.jsonl"
        ),
    )
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    events = [json.loads(line) for line in Path(args.log).read_text().splitlines() if line]
    bundle = PipelineBundle.stub(lambda kind: model_hyper(kind, "desk"), seed=args.seed)
    session = Session.replay(bundle, events, ServiceConfig(seed=args.seed))
    doc = session.export()
    print(f"settings: {doc['settings']['name0']} & {doc['settings']['name1']}")
    print(f"recorded frames: {doc['frame_count']} at {doc['fps']} fps\n")
    for seg in doc["segments"]:
        text = seg["text"] or "(pending)"
        print(f"[{seg['start']:3d}..{seg['end']:3d}) {text}")


if __name__ == "__main__":
    main()
