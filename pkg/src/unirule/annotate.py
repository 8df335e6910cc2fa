"""HTTP backend for blind expert labeling of judged comparisons.

Tasks come from a judgments file joined with the traces that produced the
compared rules: each task shows the context and the two candidate texts in
the exact randomized order the judge saw, with method names stripped.
Labels are positional (first/second/tie), converted back to method-relative
outcomes internally so they can be scored against the judge verdicts.

Submitted labels append to a JSONL file as they arrive; restarting the
server on the same file restores them, and re-submissions stay rejected.
"""

import json
import mimetypes
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from unirule import jsonl
from unirule.arena import cohens_kappa, read_judgments
from unirule.errors import DegenerateMarginals, UniruleError
from unirule.generation import read_traces

POSITION_LABELS = ("first", "second", "tie")


@dataclass(frozen=True)
class AnnotationTask:
    """One pairwise comparison, anonymized, in stored presentation order."""

    task_id: str
    context_text: str
    first_text: str
    second_text: str
    presented_order: str  # which method sits first, never shown to annotators
    judge_outcome: str  # a | b | tie

    def canonical(self, label: str) -> str:
        """Positional label -> method-relative outcome."""
        if label == "tie":
            return "tie"
        if self.presented_order == "ab":
            return "a" if label == "first" else "b"
        return "b" if label == "first" else "a"

    def view(self) -> dict:
        return {
            "task_id": self.task_id,
            "context": self.context_text,
            "candidate_1": self.first_text,
            "candidate_2": self.second_text,
        }


def _safe_kappa(a: list, b: list) -> float:
    """Kappa, with the all-one-category edge collapsed to exact agreement."""
    try:
        return cohens_kappa(a, b)
    except DegenerateMarginals:
        return 1.0 if a == b else 0.0


class AnnotationState:
    """Tasks plus submitted labels; all mutation under one lock."""

    def __init__(self, tasks: list, annotators: int, labels_path=None):
        if annotators < 1:
            raise ValueError("annotators must be >= 1")
        self.tasks = list(tasks)
        self.by_id = {t.task_id: t for t in self.tasks}
        if len(self.by_id) != len(self.tasks):
            raise ValueError("duplicate task ids")
        self.annotators = annotators
        self.labels: dict = {}  # (task_id, annotator) -> canonical outcome
        self.labels_path = Path(labels_path) if labels_path else None
        self.lock = threading.Lock()
        if self.labels_path and self.labels_path.exists():
            for record in jsonl.read_jsonl(self.labels_path):
                self.labels[(record["task_id"], record["annotator"])] = record[
                    "outcome"
                ]

    @classmethod
    def from_files(cls, judgments_path, traces_path, annotators, labels_path=None):
        """Join judgments with their traces' rule texts into labeling tasks."""
        texts = {}
        context_texts = {}
        for trace in read_traces(traces_path):
            key = (trace.target_language, trace.context.type, trace.context.rule_id)
            texts[key + (trace.method,)] = trace.output_rule
            context_texts[key] = trace.context.text

        tasks = []
        for i, judgment in enumerate(read_judgments(judgments_path)):
            key = (*judgment.scenario, judgment.instance_id)
            try:
                text_a = texts[key + (judgment.method_a,)]
                text_b = texts[key + (judgment.method_b,)]
            except KeyError as exc:
                raise UniruleError(
                    f"judgment {i} has no matching trace: {exc}"
                ) from None
            first, second = (
                (text_a, text_b)
                if judgment.presented_order == "ab"
                else (text_b, text_a)
            )
            tasks.append(
                AnnotationTask(
                    task_id=f"t{i:04d}",
                    context_text=context_texts[key],
                    first_text=first,
                    second_text=second,
                    presented_order=judgment.presented_order,
                    judge_outcome=judgment.outcome,
                )
            )
        if not tasks:
            raise UniruleError(f"no tasks found in {judgments_path}")
        return cls(tasks, annotators, labels_path)

    # -- queries ----------------------------------------------------------

    def next_task(self, annotator: str):
        with self.lock:
            for task in self.tasks:
                if (task.task_id, annotator) not in self.labels:
                    return task
        return None

    def labeled_by(self, annotator: str) -> int:
        with self.lock:
            return sum(1 for (_, a) in self.labels if a == annotator)

    def submit(self, task_id: str, annotator: str, label: str) -> tuple:
        """Returns (http_status, payload)."""
        if label not in POSITION_LABELS:
            return 400, {"error": f"outcome must be one of {POSITION_LABELS}"}
        task = self.by_id.get(task_id)
        if task is None:
            return 404, {"error": f"unknown task {task_id!r}"}
        outcome = task.canonical(label)
        with self.lock:
            if (task_id, annotator) in self.labels:
                return 409, {"error": f"{annotator} already labeled {task_id}"}
            self.labels[(task_id, annotator)] = outcome
            if self.labels_path:
                jsonl.append_jsonl(
                    self.labels_path,
                    {"task_id": task_id, "annotator": annotator, "outcome": outcome},
                )
        return 200, {"recorded": True, "task_id": task_id, "outcome": outcome}

    def progress(self) -> dict:
        with self.lock:
            by_annotator: dict = {}
            for (_, annotator) in self.labels:
                by_annotator[annotator] = by_annotator.get(annotator, 0) + 1
            return {
                "tasks": len(self.tasks),
                "annotators": self.annotators,
                "expected_labels": len(self.tasks) * self.annotators,
                "submitted": len(self.labels),
                "by_annotator": dict(sorted(by_annotator.items())),
            }

    def agreement(self) -> dict:
        """Kappa of each annotator against the judge and each other."""
        with self.lock:
            outcomes: dict = {}
            for (task_id, annotator), outcome in self.labels.items():
                outcomes.setdefault(annotator, {})[task_id] = outcome
        names = sorted(outcomes)
        vs_judge = {}
        for name in names:
            labeled = sorted(outcomes[name])
            a = [outcomes[name][t] for t in labeled]
            b = [self.by_id[t].judge_outcome for t in labeled]
            vs_judge[name] = {
                "kappa": round(_safe_kappa(a, b), 6),
                "agreement": round(sum(x == y for x, y in zip(a, b)) / len(a), 6),
                "n": len(a),
            }
        between = {}
        for i, one in enumerate(names):
            for other in names[i + 1 :]:
                shared = sorted(set(outcomes[one]) & set(outcomes[other]))
                if not shared:
                    continue
                a = [outcomes[one][t] for t in shared]
                b = [outcomes[other][t] for t in shared]
                between[f"{one}|{other}"] = {
                    "kappa": round(_safe_kappa(a, b), 6),
                    "agreement": round(
                        sum(x == y for x, y in zip(a, b)) / len(a), 6
                    ),
                    "n": len(shared),
                }
        payload = {"vs_judge": vs_judge, "between_annotators": between}
        if vs_judge:
            payload["avg_kappa_vs_judge"] = round(
                sum(v["kappa"] for v in vs_judge.values()) / len(vs_judge), 6
            )
        return payload


def make_server(
    state: AnnotationState, ui_dir=None, host: str = "127.0.0.1", port: int = 0
) -> ThreadingHTTPServer:
    """Build the HTTP server; the caller starts and stops it."""
    ui_root = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # tests and pipelines want quiet servers
            pass

        def _send_json(self, status: int, payload: dict) -> None:
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            url = urlparse(self.path)
            if url.path == "/api/tasks/next":
                annotator = parse_qs(url.query).get("annotator", [""])[0]
                if not annotator:
                    self._send_json(400, {"error": "annotator query param required"})
                    return
                task = state.next_task(annotator)
                self._send_json(
                    200,
                    {
                        "task": task.view() if task else None,
                        "labeled": state.labeled_by(annotator),
                        "total": len(state.tasks),
                    },
                )
                return
            if url.path == "/api/progress":
                self._send_json(200, state.progress())
                return
            if url.path == "/api/agreement":
                self._send_json(200, state.agreement())
                return
            self._send_static(url.path)

        def do_POST(self):
            url = urlparse(self.path)
            if url.path != "/api/labels":
                self._send_json(404, {"error": f"no such endpoint {url.path}"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                record = json.loads(self.rfile.read(length).decode("utf-8"))
                task_id = record["task_id"]
                annotator = record["annotator"]
                outcome = record["outcome"]
            except (ValueError, KeyError, UnicodeDecodeError):
                self._send_json(400, {"error": "body must be JSON with task_id, annotator, outcome"})
                return
            if not isinstance(annotator, str) or not annotator:
                self._send_json(400, {"error": "annotator must be a non-empty string"})
                return
            status, payload = state.submit(task_id, annotator, outcome)
            self._send_json(status, payload)

        def _send_static(self, path: str) -> None:
            if ui_root is None:
                self._send_json(404, {"error": "no UI directory configured"})
                return
            relative = path.lstrip("/") or "index.html"
            target = (ui_root / relative).resolve()
            if not target.is_relative_to(ui_root) or not target.is_file():
                self._send_json(404, {"error": f"not found: {path}"})
                return
            content_type = (
                mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            )
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    server = ThreadingHTTPServer((host, port), Handler)
    server.daemon_threads = True
    return server
