#!/usr/bin/env python3
"""Build a 10-comparison fixture and serve the annotation API over it.

Prints two lines to stdout, then blocks serving forever:

    PORT=<ephemeral port>
    MAP=<json: task_id -> positional label matching the judge>

The browser test presses exactly the keys in MAP, so its agreement with the
judge must come out at kappa = 1.0.
"""

import json
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "src"))

from unirule.annotate import AnnotationState, make_server  # noqa: E402
from unirule.arena import PairwiseJudgment, write_judgments  # noqa: E402
from unirule.contexts import ContextSpec  # noqa: E402
from unirule.generation import GenerationTrace, write_traces  # noqa: E402

LANGUAGE = "splunk"
CONTEXT_TYPE = "context"
OUTCOMES = ["a", "b", "a", "b", "tie", "a", "b", "a", "b", "tie"]


def build_fixture(out: Path) -> Path:
    traces = []
    judgments = []
    for i, outcome in enumerate(OUTCOMES):
        rule_id = f"r{i:02d}"
        context = ContextSpec(
            rule_id=rule_id,
            type=CONTEXT_TYPE,
            text=f"Detect suspicious process activity variant {i} on monitored hosts.",
            provenance="native",
            language=LANGUAGE,
        )
        for method in ("baseline", "unirule"):
            traces.append(
                GenerationTrace(
                    context=context,
                    target_language=LANGUAGE,
                    method=method,
                    output_rule=f"index=main variant={i} method={method} | stats count by host",
                )
            )
        judgments.append(
            PairwiseJudgment(
                scenario=(LANGUAGE, CONTEXT_TYPE),
                instance_id=rule_id,
                method_a="baseline",
                method_b="unirule",
                presented_order="ab" if i % 2 == 0 else "ba",
                outcome=outcome,
                judge_id="fixture-judge",
            )
        )
    write_traces(out / "traces.jsonl", traces)
    write_judgments(out / "judgments.jsonl", judgments)
    return out


def positional(outcome: str, order: str) -> str:
    if outcome == "tie":
        return "tie"
    if order == "ab":
        return "first" if outcome == "a" else "second"
    return "second" if outcome == "a" else "first"


def main() -> int:
    work = Path(tempfile.mkdtemp(prefix="annotation-fixture-"))
    build_fixture(work)
    state = AnnotationState.from_files(
        work / "judgments.jsonl",
        work / "traces.jsonl",
        annotators=2,
        labels_path=work / "labels.jsonl",
    )
    server = make_server(state, ui_dir=REPO / "frontend" / "dist", port=0)
    mapping = {
        task.task_id: positional(task.judge_outcome, task.presented_order)
        for task in state.tasks
    }
    print(f"PORT={server.server_address[1]}", flush=True)
    print(f"MAP={json.dumps(mapping, sort_keys=True)}", flush=True)
    server.serve_forever()
    return 0


if __name__ == "__main__":
    sys.exit(main())
