#!/usr/bin/env python3
"""Run the whole offline pipeline on the bundled fixture corpus.

Every stage goes through the CLI, so this doubles as a smoke test of the
exact commands a user would type. Deterministic: rerunning into the same
directory reproduces every file byte for byte.
"""

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from unirule.cli import run  # noqa: E402

FIXTURES = REPO / "tests" / "fixtures"
LANGUAGES = ("splunk", "elastic", "snort")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/mock", help="output directory")
    parser.add_argument("--n", type=int, default=2, help="instances per scenario")
    parser.add_argument("--seed", type=int, default=5)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    p = lambda name: str(out / name)  # noqa: E731

    stages = []
    corpora = []
    for language in LANGUAGES:
        stages.append([
            "ingest", "--language", language,
            "--root", str(FIXTURES / language), "--output", p(f"{language}.jsonl"),
        ])
        corpora += ["--corpus", p(f"{language}.jsonl")]
    # 0.49 on the 39 fixture rules gives a 19/20 split with all languages on
    # both sides; real corpora use the 0.8 default
    stages.append([
        "split", *corpora, "--ratio", "0.49", "--seed", "7",
        "--train", p("train.jsonl"), "--test", p("test.jsonl"),
    ])
    for dimension in ("intent", "logic"):
        stages.append([
            "translate", "--corpus", p("test.jsonl"), "--dimension", dimension,
            "--cache", p("cache"), "--output", p(f"{dimension}.jsonl"),
        ])
        stages.append([
            "index", "--corpus", p("train.jsonl"), "--dimension", dimension,
            "--cache", p("cache"), "--output", p(f"{dimension}.idx"),
        ])
    stages.append([
        "contexts", "--test", p("test.jsonl"),
        "--intent", p("intent.jsonl"), "--logic", p("logic.jsonl"),
        "--output", p("contexts.jsonl"),
    ])
    stages.append([
        "generate", "--contexts", p("contexts.jsonl"),
        "--train", p("train.jsonl"), "--test", p("test.jsonl"),
        "--intent-index", p("intent.idx"), "--logic-index", p("logic.idx"),
        "--n", str(args.n), "--seed", str(args.seed), "--output", p("traces.jsonl"),
    ])
    stages.append([
        "judge", "--traces", p("traces.jsonl"), "--test", p("test.jsonl"),
        "--judge-id", "mock-judge", "--seed", str(args.seed),
        "--fixed-time", "0", "--output", p("judgments.jsonl"),
    ])
    stages.append(["fit", "--judgments", p("judgments.jsonl")])
    stages.append([
        "report", "--judgments", p("judgments.jsonl"),
        "--output", p("report.json"), "--csv", p("forest.csv"),
    ])

    for argv in stages:
        print(f"$ unirule {' '.join(argv)}")
        code = run(argv)
        if code != 0:
            return code
    print(f"\ndone: {out}/report.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
