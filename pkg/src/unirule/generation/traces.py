"""Generation traces: what a method retrieved and what it produced.

A trace is the full audit record of one generation: every tool call with
its arguments and results, the deduplicated union of retrieved rules, and
the final output. Retrieval results are stored as plain record dicts (the
same shape the search tool returns) so a trace file round-trips exactly.
"""

from dataclasses import dataclass, field

from unirule.contexts import ContextSpec
from unirule.jsonl import read_jsonl, write_jsonl
from unirule.retrieval.search import SearchQuery

METHODS = (
    "unirule",
    "baseline",
    "random_rag",
    "std_rag",
    "human_authored",
    "intent_only",
    "logic_only",
)
NO_RETRIEVAL_METHODS = ("baseline", "human_authored")
AGENT_METHODS = ("unirule", "intent_only", "logic_only")


@dataclass
class AgentBudget:
    """Safety caps on the agent loop; generation quality never needs them."""

    max_iterations: int = 8
    max_total_results: int = 200
    max_output_tokens: int = 2048

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.max_total_results < 1:
            raise ValueError("max_total_results must be >= 1")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")


@dataclass
class RetrievalCall:
    iteration: int
    query: SearchQuery
    results: list  # result record dicts, as returned to the model

    def __post_init__(self):
        if self.iteration < 1:
            raise ValueError("iteration must be >= 1")

    def to_record(self) -> dict:
        return {
            "iteration": self.iteration,
            "query": self.query.to_record(),
            "results": self.results,
        }

    @classmethod
    def from_record(cls, record: dict) -> "RetrievalCall":
        q = record["query"]
        return cls(
            iteration=record["iteration"],
            query=SearchQuery(
                query=q["query"],
                space=q["space"],
                k=q["k"],
                language_filter=q.get("language_filter"),
            ),
            results=record["results"],
        )


def dedup_results(calls) -> list:
    """Set-union of call results by rule_id, keeping first-seen order."""
    seen = set()
    union = []
    for call in calls:
        for record in call.results:
            if record["rule_id"] not in seen:
                seen.add(record["rule_id"])
                union.append(record)
    return union


@dataclass
class GenerationTrace:
    context: ContextSpec
    target_language: str
    method: str
    calls: list = field(default_factory=list)
    retrieved_union: list = field(default_factory=list)
    output_rule: str = ""
    token_usage: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method in NO_RETRIEVAL_METHODS and self.calls:
            raise ValueError(f"method {self.method!r} must not record retrieval calls")
        iterations = [c.iteration for c in self.calls]
        if iterations != sorted(set(iterations)) or (iterations and iterations[0] < 1):
            raise ValueError(f"call iterations must be strictly increasing: {iterations}")
        expected = dedup_results(self.calls)
        if [r["rule_id"] for r in self.retrieved_union] != [
            r["rule_id"] for r in expected
        ]:
            raise ValueError("retrieved_union must be the dedup of call results")

    def to_record(self) -> dict:
        return {
            "context": self.context.to_record(),
            "target_language": self.target_language,
            "method": self.method,
            "calls": [c.to_record() for c in self.calls],
            "retrieved_union": self.retrieved_union,
            "output_rule": self.output_rule,
            "token_usage": self.token_usage,
        }

    @classmethod
    def from_record(cls, record: dict) -> "GenerationTrace":
        return cls(
            context=ContextSpec.from_record(record["context"]),
            target_language=record["target_language"],
            method=record["method"],
            calls=[RetrievalCall.from_record(c) for c in record["calls"]],
            retrieved_union=record["retrieved_union"],
            output_rule=record["output_rule"],
            token_usage=record["token_usage"],
        )


def write_traces(path, traces) -> int:
    return write_jsonl(path, (t.to_record() for t in traces))


def read_traces(path) -> list:
    return [GenerationTrace.from_record(r) for r in read_jsonl(path)]


def _aggregate(traces) -> dict:
    total_calls = sum(len(t.calls) for t in traces)
    total_results = sum(len(c.results) for t in traces for c in t.calls)
    return {
        "traces": len(traces),
        "mean_calls": total_calls / len(traces),
        "mean_rules_per_call": total_results / total_calls if total_calls else 0.0,
        "mean_union_size": sum(len(t.retrieved_union) for t in traces) / len(traces),
    }


def trace_stats(traces) -> dict:
    """Retrieval-effort summary, overall and sliced by method and scenario."""
    traces = list(traces)
    if not traces:
        raise ValueError("no traces to summarize")
    by_method: dict = {}
    by_scenario: dict = {}
    for t in traces:
        by_method.setdefault(t.method, []).append(t)
        key = f"{t.context.language}/{t.context.type}"
        by_scenario.setdefault(key, []).append(t)
    return {
        "overall": _aggregate(traces),
        "by_method": {m: _aggregate(g) for m, g in sorted(by_method.items())},
        "by_scenario": {s: _aggregate(g) for s, g in sorted(by_scenario.items())},
    }
