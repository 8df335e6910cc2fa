"""Annotation backend: task flow, label validation, agreement statistics.

State-level tests drive AnnotationState directly; the HTTP tests run a real
server on a loopback port, since the secondary UI depends on these exact
status codes and payload shapes.
"""

import http.client
import json
import threading

import pytest

from unirule.annotate import AnnotationState, AnnotationTask, make_server
from unirule.arena import PairwiseJudgment, write_judgments
from unirule.contexts import ContextSpec
from unirule.errors import UniruleError
from unirule.generation import GenerationTrace, write_traces

METHOD_TEXTS = {
    "baseline": "index=a | stats count",
    "unirule": "index=b | stats count",
    "std_rag": "index=c | stats count",
}


def make_task(i: int, order: str = "ab", judge: str = "a") -> AnnotationTask:
    return AnnotationTask(
        task_id=f"t{i:04d}",
        context_text=f"context {i}",
        first_text=f"first rule {i}",
        second_text=f"second rule {i}",
        presented_order=order,
        judge_outcome=judge,
    )


def build_fixture_files(tmp_path, n_instances: int = 2):
    """Traces + judgments for n instances of one scenario, three methods."""
    traces = []
    judgments = []
    orders = ("ab", "ba")
    outcomes = ("a", "b", "tie")
    for i in range(n_instances):
        context = ContextSpec(
            rule_id=f"rule-{i}",
            type="cti",
            text=f"threat narrative {i}",
            provenance="synthesized",
            language="splunk",
        )
        for method, text in METHOD_TEXTS.items():
            traces.append(
                GenerationTrace(
                    context=context,
                    target_language="splunk",
                    method=method,
                    output_rule=f"{text} variant_{i}",
                )
            )
        pairs = [("baseline", "std_rag"), ("baseline", "unirule"), ("std_rag", "unirule")]
        for p, (method_a, method_b) in enumerate(pairs):
            judgments.append(
                PairwiseJudgment(
                    scenario=("splunk", "cti"),
                    instance_id=f"rule-{i}",
                    method_a=method_a,
                    method_b=method_b,
                    presented_order=orders[(i + p) % 2],
                    outcome=outcomes[(i + p) % 3],
                    judge_id="fixture-judge",
                )
            )
    traces_path = tmp_path / "traces.jsonl"
    judgments_path = tmp_path / "judgments.jsonl"
    write_traces(traces_path, traces)
    write_judgments(judgments_path, judgments)
    return judgments_path, traces_path, judgments


class TestTaskConstruction:
    def test_tasks_join_judgments_with_trace_texts(self, tmp_path):
        judgments_path, traces_path, judgments = build_fixture_files(tmp_path)
        state = AnnotationState.from_files(judgments_path, traces_path, annotators=3)
        assert len(state.tasks) == 6
        for task, judgment in zip(state.tasks, judgments):
            assert task.judge_outcome == judgment.outcome
            assert task.presented_order == judgment.presented_order
            a_text = f"{METHOD_TEXTS[judgment.method_a]} variant_{judgment.instance_id[-1]}"
            expected_first = (
                a_text
                if judgment.presented_order == "ab"
                else f"{METHOD_TEXTS[judgment.method_b]} variant_{judgment.instance_id[-1]}"
            )
            assert task.first_text == expected_first

    def test_view_never_exposes_methods(self, tmp_path):
        judgments_path, traces_path, _ = build_fixture_files(tmp_path)
        state = AnnotationState.from_files(judgments_path, traces_path, annotators=3)
        for task in state.tasks:
            view = task.view()
            assert set(view) == {"task_id", "context", "candidate_1", "candidate_2"}
            blob = json.dumps(view)
            for method in METHOD_TEXTS:
                assert method not in blob

    def test_judgment_without_trace_fails(self, tmp_path):
        judgments_path, traces_path, judgments = build_fixture_files(tmp_path)
        extra = PairwiseJudgment(
            scenario=("splunk", "cti"),
            instance_id="rule-0",
            method_a="baseline",
            method_b="human_authored",
            presented_order="ab",
            outcome="a",
            judge_id="fixture-judge",
        )
        write_judgments(judgments_path, judgments + [extra])
        with pytest.raises(UniruleError):
            AnnotationState.from_files(judgments_path, traces_path, annotators=3)


class TestCanonicalization:
    def test_positional_labels_unscramble(self):
        task_ab = make_task(0, order="ab")
        task_ba = make_task(1, order="ba")
        assert task_ab.canonical("first") == "a"
        assert task_ab.canonical("second") == "b"
        assert task_ba.canonical("first") == "b"
        assert task_ba.canonical("second") == "a"
        assert task_ba.canonical("tie") == "tie"


class TestSubmission:
    def test_submit_then_duplicate_409(self):
        state = AnnotationState([make_task(0)], annotators=1)
        status, payload = state.submit("t0000", "e1", "first")
        assert status == 200 and payload["outcome"] == "a"
        status, payload = state.submit("t0000", "e1", "second")
        assert status == 409
        # the rejected rewrite must not overwrite the original
        assert state.labels[("t0000", "e1")] == "a"

    def test_unknown_task_404(self):
        state = AnnotationState([make_task(0)], annotators=1)
        assert state.submit("t9999", "e1", "first")[0] == 404

    def test_malformed_outcome_400(self):
        state = AnnotationState([make_task(0)], annotators=1)
        assert state.submit("t0000", "e1", "best")[0] == 400

    def test_next_task_skips_labeled(self):
        tasks = [make_task(i) for i in range(3)]
        state = AnnotationState(tasks, annotators=2)
        assert state.next_task("e1").task_id == "t0000"
        state.submit("t0000", "e1", "tie")
        assert state.next_task("e1").task_id == "t0001"
        assert state.next_task("e2").task_id == "t0000"  # isolated per annotator
        for i in range(1, 3):
            state.submit(f"t{i:04d}", "e1", "tie")
        assert state.next_task("e1") is None

    def test_labels_persist_across_restarts(self, tmp_path):
        labels = tmp_path / "labels.jsonl"
        tasks = [make_task(i) for i in range(2)]
        state = AnnotationState(tasks, annotators=1, labels_path=labels)
        state.submit("t0000", "e1", "first")
        reloaded = AnnotationState(tasks, annotators=1, labels_path=labels)
        assert reloaded.submit("t0000", "e1", "first")[0] == 409
        assert reloaded.next_task("e1").task_id == "t0001"


class TestProgressAndAgreement:
    def test_paper_panel_arithmetic(self):
        # 100 sampled comparisons, a 3-expert panel: 300 expected labels.
        tasks = [make_task(i) for i in range(100)]
        state = AnnotationState(tasks, annotators=3)
        progress = state.progress()
        assert progress["tasks"] == 100
        assert progress["expected_labels"] == 300
        state.submit("t0000", "e1", "tie")
        assert state.progress()["submitted"] == 1
        assert state.progress()["by_annotator"] == {"e1": 1}

    def test_perfect_agreement_with_judge(self):
        judge_outcomes = ["a", "b", "tie", "a", "b", "tie", "a", "b"]
        tasks = [make_task(i, judge=o) for i, o in enumerate(judge_outcomes)]
        state = AnnotationState(tasks, annotators=1)
        for task in tasks:
            label = {"a": "first", "b": "second", "tie": "tie"}[task.judge_outcome]
            assert state.submit(task.task_id, "e1", label)[0] == 200
        report = state.agreement()
        assert report["vs_judge"]["e1"] == {"kappa": 1.0, "agreement": 1.0, "n": 8}
        assert report["avg_kappa_vs_judge"] == 1.0

    def test_between_annotator_kappa(self):
        tasks = [make_task(i, judge="a") for i in range(6)]
        state = AnnotationState(tasks, annotators=2)
        # e1 and e2 agree on half the tasks, spread over all categories
        e1 = ["first", "first", "second", "tie", "second", "tie"]
        e2 = ["first", "second", "second", "first", "tie", "tie"]
        for task, l1, l2 in zip(tasks, e1, e2):
            state.submit(task.task_id, "e1", l1)
            state.submit(task.task_id, "e2", l2)
        report = state.agreement()
        between = report["between_annotators"]["e1|e2"]
        assert between["n"] == 6
        assert between["agreement"] == 0.5
        assert -1.0 <= between["kappa"] < 1.0

    def test_degenerate_single_category_reports_raw_identity(self):
        tasks = [make_task(i, judge="a") for i in range(4)]
        state = AnnotationState(tasks, annotators=1)
        for task in tasks:
            state.submit(task.task_id, "e1", "first")
        report = state.agreement()
        assert report["vs_judge"]["e1"]["kappa"] == 1.0


@pytest.fixture
def live_server(tmp_path):
    judgments_path, traces_path, judgments = build_fixture_files(tmp_path, n_instances=2)
    ui_dir = tmp_path / "ui"
    ui_dir.mkdir()
    (ui_dir / "index.html").write_text("<!doctype html><p>annotate</p>")
    state = AnnotationState.from_files(
        judgments_path, traces_path, annotators=2, labels_path=tmp_path / "labels.jsonl"
    )
    server = make_server(state, ui_dir=ui_dir, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server.server_address[1], state, judgments
    server.shutdown()
    server.server_close()


def request(port, method, path, body=None):
    connection = http.client.HTTPConnection("127.0.0.1", port, timeout=5)
    payload = json.dumps(body) if body is not None else None
    connection.request(method, path, body=payload)
    response = connection.getresponse()
    raw = response.read()
    connection.close()
    content_type = response.getheader("Content-Type", "")
    data = json.loads(raw) if "json" in content_type else raw
    return response.status, data


class TestHttpApi:
    def test_label_walkthrough_matches_judge(self, live_server):
        port, state, judgments = live_server
        to_label = {"a": "first", "b": "second", "tie": "tie"}
        while True:
            status, data = request(port, "GET", "/api/tasks/next?annotator=e1")
            assert status == 200
            if data["task"] is None:
                assert data["labeled"] == len(judgments)
                break
            task_id = data["task"]["task_id"]
            judge_outcome = state.by_id[task_id].judge_outcome
            # labeling in positional terms, exactly as the judge concluded
            if judge_outcome != "tie":
                positional = (
                    "first"
                    if state.by_id[task_id].canonical("first") == judge_outcome
                    else "second"
                )
            else:
                positional = "tie"
            status, _ = request(
                port, "POST", "/api/labels",
                {"task_id": task_id, "annotator": "e1", "outcome": positional},
            )
            assert status == 200
        status, agreement = request(port, "GET", "/api/agreement")
        assert status == 200
        assert agreement["vs_judge"]["e1"]["kappa"] == 1.0
        assert agreement["vs_judge"]["e1"]["agreement"] == 1.0

    def test_duplicate_label_409(self, live_server):
        port, _, _ = live_server
        body = {"task_id": "t0000", "annotator": "e2", "outcome": "tie"}
        assert request(port, "POST", "/api/labels", body)[0] == 200
        assert request(port, "POST", "/api/labels", body)[0] == 409

    def test_error_statuses(self, live_server):
        port, _, _ = live_server
        assert request(port, "GET", "/api/tasks/next")[0] == 400
        assert request(
            port, "POST", "/api/labels",
            {"task_id": "t9999", "annotator": "e1", "outcome": "tie"},
        )[0] == 404
        assert request(
            port, "POST", "/api/labels",
            {"task_id": "t0000", "annotator": "e1", "outcome": "maybe"},
        )[0] == 400
        assert request(port, "POST", "/api/labels", {"task_id": "t0000"})[0] == 400
        assert request(port, "GET", "/api/nope")[0] == 404

    def test_progress_endpoint(self, live_server):
        port, _, judgments = live_server
        status, progress = request(port, "GET", "/api/progress")
        assert status == 200
        assert progress["tasks"] == len(judgments)
        assert progress["expected_labels"] == len(judgments) * 2

    def test_static_ui_served(self, live_server):
        port, _, _ = live_server
        status, body = request(port, "GET", "/")
        assert status == 200
        assert b"annotate" in body

    def test_path_traversal_blocked(self, live_server):
        port, _, _ = live_server
        status, _ = request(port, "GET", "/../../etc/passwd")
        assert status == 404
