"""Pipeline orchestration: one binary, one replayable subcommand per stage.

Stages communicate only through files (JSONL corpora, indexes, traces,
judgments), so any stage can be re-run or swapped in isolation. Identical
inputs and seeds give byte-identical outputs; wall-clock timestamps exist
only in the judgment `timestamp` field and can be pinned with --fixed-time.

Exit codes: 0 success, 1 operational error (one diagnostic line on stderr),
2 usage error (argparse synopsis).
"""

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

from unirule.arena import (
    Candidate,
    build_win_matrix,
    cohens_kappa,
    derive_seed,
    enumerate_pairs,
    fit_bt,
    judge_pair,
    read_judgments,
    sandwich_se,
    scenario_report,
    write_judgments,
    write_report_csv,
)
from unirule.contexts import (
    CONTEXT_TYPES,
    MissingDescription,
    native_context,
    read_contexts,
    sample_scenario_instances,
    synthesize_cti,
    translated_context,
    write_contexts,
)
from unirule.corpus import (
    load_corpus,
    read_corpus_file,
    split_corpus,
    write_corpus_file,
)
from unirule.errors import UniruleError
from unirule.formal import search_witnesses, sim_failure_witness
from unirule.gateway import (
    ENV_API_BASE,
    ENV_API_KEY,
    ENV_CHAT_MODEL,
    ENV_EMBED_MODEL,
    OpenAIGateway,
    ProviderConfig,
    pipeline_gateway,
)
from unirule.generation import (
    AGENT_METHODS,
    METHODS,
    build_raw_index,
    generate_baseline,
    generate_unirule,
    read_traces,
    write_traces,
)
from unirule.kb import (
    DIMENSIONS,
    SemanticDescription,
    TranslationCache,
    build_index,
    load_index,
    save_index,
    translate_rule,
)
from unirule.retrieval import MCPServer
from unirule import jsonl

LANGUAGES = ("splunk", "elastic", "snort")
DEFAULT_METHODS = "unirule,baseline,random_rag,std_rag,human_authored"


@dataclass
class PipelineConfig:
    """File-loadable defaults for the pipeline flags; flags always win."""

    corpus_roots: dict = field(default_factory=dict)  # language -> directory
    split_ratio: float = 0.8
    split_seed: int = 7
    provider: str = "mock"
    index_paths: dict = field(default_factory=dict)  # dimension -> index file
    languages: str = ""  # comma list; empty means every language observed
    context_types: str = ""  # comma list; empty means all four
    instances: int = 2
    output_dir: str = "runs"

    def __post_init__(self):
        if self.instances < 1:
            raise ValueError("instances must be >= 1")

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**raw)


def make_gateway(provider: str):
    if provider == "mock":
        return pipeline_gateway()
    if provider == "openai":
        base_url = os.environ.get(ENV_API_BASE, "")
        if not base_url:
            raise UniruleError(f"provider openai needs {ENV_API_BASE} set")
        return OpenAIGateway(
            ProviderConfig(
                base_url=base_url,
                api_key=os.environ.get(ENV_API_KEY, ""),
                chat_model=os.environ.get(ENV_CHAT_MODEL, ""),
                embed_model=os.environ.get(ENV_EMBED_MODEL, ""),
            )
        )
    raise UniruleError(f"unknown provider {provider!r}")


def _note(line: str) -> None:
    print(line, file=sys.stderr)


# --------------------------------------------------------------------------
# corpus stages


def cmd_ingest(args) -> int:
    root = args.root or args.config.corpus_roots.get(args.language)
    if not root:
        raise UniruleError(f"no corpus root given for language {args.language}")
    report = load_corpus(root, args.language)
    for source, message in report.failures:
        _note(f"ingest: skipped {source}: {message}")
    if not report.rules:
        raise UniruleError(f"no parseable {args.language} rules under {root}")
    write_corpus_file(args.output, report.rules)
    print(
        f"ingest: {len(report.rules)} {args.language} rules -> {args.output} "
        f"({len(report.failures)} skipped)"
    )
    return 0


def cmd_split(args) -> int:
    rules = []
    for path in args.corpus:
        rules.extend(read_corpus_file(path))
    split = split_corpus(rules, args.ratio, args.seed)
    write_corpus_file(args.train, split.train)
    write_corpus_file(args.test, split.test)
    print(
        f"split: {len(split.train)} train / {len(split.test)} test "
        f"(ratio {args.ratio}, seed {args.seed})"
    )
    return 0


# --------------------------------------------------------------------------
# knowledge-base stages


def cmd_translate(args) -> int:
    rules = sorted(read_corpus_file(args.corpus), key=lambda r: r.id)
    gateway = make_gateway(args.provider)
    cache = TranslationCache(args.cache) if args.cache else None
    descriptions = []
    for rule in rules:
        hit = cache.get(rule, args.dimension) if cache else None
        if hit is None:
            hit = translate_rule(rule, args.dimension, gateway)
            if cache:
                cache.put(rule, args.dimension, hit)
        descriptions.append(hit)
    jsonl.write_jsonl(args.output, [d.to_record() for d in descriptions])
    print(f"translate: {len(descriptions)} {args.dimension} descriptions -> {args.output}")
    return 0


def cmd_index(args) -> int:
    rules = read_corpus_file(args.corpus)
    gateway = make_gateway(args.provider)
    cache = TranslationCache(args.cache) if args.cache else None
    index = build_index(rules, args.dimension, gateway, cache=cache)
    save_index(index, args.output)
    print(f"index: {len(index.entries)} {args.dimension} entries -> {args.output}")
    return 0


def cmd_serve_mcp(args) -> int:
    indexes = {dim: load_index(path) for dim, path in _index_paths(args).items()}
    server = MCPServer(indexes, make_gateway(args.provider))
    if args.tcp_port is not None:
        tcp = server.serve_tcp(port=args.tcp_port)
        print(f"serve-mcp: listening on {tcp.server_address[0]}:{tcp.server_address[1]}")
        try:
            tcp.serve_forever()
        finally:
            tcp.server_close()
        return 0
    server.serve_stdio()
    return 0


def _index_paths(args) -> dict:
    paths = {}
    if getattr(args, "intent_index", None):
        paths["intent"] = args.intent_index
    if getattr(args, "logic_index", None):
        paths["logic"] = args.logic_index
    if not paths:
        paths = dict(args.config.index_paths)
    if not paths:
        raise UniruleError("no index paths given (--intent-index/--logic-index)")
    return paths


# --------------------------------------------------------------------------
# scenario stages


def _read_descriptions(path) -> dict:
    """Description records keyed by rule id."""
    return {
        d.rule_id: d
        for d in (SemanticDescription.from_record(r) for r in jsonl.read_jsonl(path))
    }


def cmd_contexts(args) -> int:
    rules = sorted(read_corpus_file(args.test), key=lambda r: r.id)
    described = {
        "intent": _read_descriptions(args.intent),
        "logic": _read_descriptions(args.logic),
    }
    gateway = make_gateway(args.provider)
    specs = []
    skipped = 0
    for rule in rules:
        try:
            specs.append(native_context(rule))
        except MissingDescription:
            skipped += 1
            _note(f"contexts: {rule.id} has no native description; context type skipped")
        specs.append(synthesize_cti(rule, gateway))
        for dimension in DIMENSIONS:
            description = described[dimension].get(rule.id)
            if description is None:
                skipped += 1
                _note(f"contexts: {rule.id} lacks a {dimension} description; skipped")
                continue
            specs.append(translated_context(rule, description))
    write_contexts(args.output, specs)
    print(f"contexts: {len(specs)} contexts -> {args.output} ({skipped} skipped)")
    return 0


def _parse_methods(text: str) -> list:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    unknown = sorted(set(methods) - set(METHODS))
    if unknown:
        raise UniruleError(f"unknown methods: {', '.join(unknown)}")
    if len(set(methods)) != len(methods):
        raise UniruleError("duplicate method names")
    return methods


def _grid(args, contexts) -> tuple:
    languages = [x for x in args.languages.split(",") if x] or sorted(
        {c.language for c in contexts}
    )
    types = [x for x in args.types.split(",") if x]
    for t in types:
        if t not in CONTEXT_TYPES:
            raise UniruleError(f"unknown context type {t!r}")
    return languages, types or list(CONTEXT_TYPES)


def cmd_generate(args) -> int:
    contexts = read_contexts(args.contexts)
    methods = _parse_methods(args.methods)
    languages, types = _grid(args, contexts)
    gateway = make_gateway(args.provider)

    train = read_corpus_file(args.train) if args.train else []
    test_by_id = {}
    if args.test:
        test_by_id = {r.id: r for r in read_corpus_file(args.test)}

    indexes = None
    if any(m in AGENT_METHODS for m in methods):
        indexes = {dim: load_index(path) for dim, path in _index_paths(args).items()}
    raw_index = build_raw_index(train, gateway) if "std_rag" in methods and train else None

    traces = []
    for language in languages:
        for context_type in types:
            sampled = sample_scenario_instances(
                contexts,
                context_type,
                args.n,
                seed=derive_seed("sample", language, context_type, str(args.seed)),
                language=language,
            )
            for spec, _ in sampled:
                for method in methods:
                    traces.append(
                        _generate_one(
                            spec, language, method, gateway, indexes, train,
                            raw_index, test_by_id, args.seed,
                        )
                    )
    write_traces(args.output, traces)
    by_method = {m: sum(1 for t in traces if t.method == m) for m in methods}
    counts = ", ".join(f"{m}={n}" for m, n in by_method.items())
    print(f"generate: {len(traces)} traces -> {args.output} ({counts})")
    return 0


def _generate_one(
    spec, language, method, gateway, indexes, train, raw_index, test_by_id, seed
):
    if method in AGENT_METHODS:
        return generate_unirule(spec, language, indexes, gateway, mode=method)
    reference = None
    if method == "human_authored":
        reference = test_by_id.get(spec.rule_id)
        if reference is None:
            raise UniruleError(
                f"human_authored needs ground truth for {spec.rule_id}; pass --test"
            )
    return generate_baseline(
        spec,
        language,
        method,
        gateway,
        train_rules=train,
        raw_index=raw_index,
        reference_rule=reference,
        seed=derive_seed("random_rag", language, spec.type, spec.rule_id, str(seed)),
    )


def cmd_judge(args) -> int:
    traces = read_traces(args.traces)
    test_by_id = {r.id: r for r in read_corpus_file(args.test)}
    gateway = make_gateway(args.provider)
    clock = (lambda: args.fixed_time) if args.fixed_time is not None else time.time

    groups: dict = {}
    for trace in traces:
        key = (trace.target_language, trace.context.type, trace.context.rule_id)
        groups.setdefault(key, {})[trace.method] = trace

    judgments = []
    for (language, context_type, rule_id), by_method in sorted(groups.items()):
        if len(by_method) < 2:
            continue
        reference = test_by_id.get(rule_id)
        if reference is None:
            raise UniruleError(f"no ground-truth rule {rule_id} in {args.test}")
        context = by_method[sorted(by_method)[0]].context
        for method_a, method_b in enumerate_pairs(sorted(by_method)):
            judgments.append(
                judge_pair(
                    context,
                    Candidate(method_a, by_method[method_a].output_rule),
                    Candidate(method_b, by_method[method_b].output_rule),
                    gateway,
                    derive_seed(
                        "judge", language, context_type, rule_id,
                        method_a, method_b, str(args.seed),
                    ),
                    language=language,
                    reference_text=reference.source_text,
                    instance_id=rule_id,
                    judge_id=args.judge_id,
                    clock=clock,
                )
            )
    write_judgments(args.output, judgments)
    print(f"judge: {len(judgments)} judgments -> {args.output}")
    return 0


# --------------------------------------------------------------------------
# evaluation stages


def cmd_fit(args) -> int:
    judgments = read_judgments(args.judgments)
    matrix = build_win_matrix(judgments)
    fit = fit_bt(matrix, anchor=args.anchor)
    sandwich_se(fit, judgments)
    for i, method in enumerate(fit.methods):
        mark = "  (anchor)" if method == fit.anchor else ""
        print(
            f"{method}: ξ̂ = {fit.xi[i]:.6f} ± {fit.se[i]:.6f}{mark}"
        )
    return 0


def cmd_report(args) -> int:
    judgments = read_judgments(args.judgments)
    report = scenario_report(judgments, anchor=args.anchor)
    table = report.to_table()
    Path(args.output).write_text(
        json.dumps(table, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    rows = 0
    if args.csv:
        rows = write_report_csv(report, args.csv)
    fitted = sum(1 for cell in report.cells if cell.fit is not None)
    print(
        f"report: {fitted}/{len(report.cells)} cells fitted -> {args.output}"
        + (f", {rows} csv rows -> {args.csv}" if args.csv else "")
    )
    for cell in report.cells:
        if cell.error:
            _note(f"report: cell {cell.key} not fitted: {cell.error}")
    return 0


def cmd_formal(args) -> int:
    instance, report = sim_failure_witness()
    if args.witness:
        print(f"reference: coverage={sorted(instance.reference.coverage)}")
        print(
            f"better:    coverage={sorted(instance.better.coverage)} "
            f"d={report['d1']} sim={report['sim1']:.3f}"
        )
        print(
            f"worse:     coverage={sorted(instance.worse.coverage)} "
            f"d={report['d2']} sim={report['sim2']:.3f}"
        )
        print(
            "misranking: semantic order better<worse, "
            f"surface order worse>better = {report['valid']}"
        )
        found = search_witnesses(
            instance.universe,
            instance.context,
            instance.language,
            instance.reference.surface,
            alphabet=instance.reference.surface,
        )
        print(f"exhaustive search over the toy space agrees: {len(found)} witness(es)")
        print("PASS" if report["valid"] and found else "FAIL")
        return 0 if (report["valid"] and found) else 1
    print(
        "formal: bundled instance "
        f"d(better)={report['d1']} d(worse)={report['d2']} "
        f"sim(better)={report['sim1']:.3f} sim(worse)={report['sim2']:.3f}"
    )
    return 0


def cmd_agreement(args) -> int:
    first = _judgment_outcomes(args.labels[0])
    second = _judgment_outcomes(args.labels[1])
    shared = sorted(set(first) & set(second))
    if not shared:
        raise UniruleError("the two judgment files share no comparisons")
    kappa = cohens_kappa([first[k] for k in shared], [second[k] for k in shared])
    matched = sum(1 for k in shared if first[k] == second[k])
    print(
        f"agreement: κ = {kappa:.4f}, raw {matched}/{len(shared)} "
        f"({matched / len(shared):.1%}) over shared comparisons"
    )
    return 0


def _judgment_outcomes(path) -> dict:
    return {
        (j.scenario, j.instance_id, j.method_a, j.method_b): j.outcome
        for j in read_judgments(path)
    }


def cmd_annotate_serve(args) -> int:
    from unirule import annotate

    state = annotate.AnnotationState.from_files(
        judgments_path=args.judgments,
        traces_path=args.traces,
        annotators=args.annotators,
        labels_path=args.labels,
    )
    server = annotate.make_server(state, args.ui_dir, port=args.port)
    print(f"annotate-serve: http://127.0.0.1:{server.server_address[1]}/")
    try:
        server.serve_forever()
    finally:
        server.server_close()
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser(config: PipelineConfig) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unirule",
        description="Detection-rule generation and evaluation pipeline.",
    )
    parser.add_argument("--config", help="JSON file of flag defaults")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func, config=config)
        return p

    def provider_flag(p):
        p.add_argument(
            "--provider", choices=("mock", "openai"), default=config.provider
        )

    p = add("ingest", cmd_ingest, "parse one language's rule sources into a corpus file")
    p.add_argument("--language", required=True, choices=LANGUAGES)
    p.add_argument("--root", help="directory of rule sources")
    p.add_argument("--output", required=True)

    p = add("split", cmd_split, "seeded train/test split of corpus files")
    p.add_argument("--corpus", action="append", required=True)
    p.add_argument("--ratio", type=float, default=config.split_ratio)
    p.add_argument("--seed", type=int, default=config.split_seed)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)

    p = add("translate", cmd_translate, "describe each rule along one dimension")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dimension", required=True, choices=DIMENSIONS)
    p.add_argument("--output", required=True)
    p.add_argument("--cache", help="translation cache directory")
    provider_flag(p)

    p = add("index", cmd_index, "build one semantic index (translate + embed)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dimension", required=True, choices=DIMENSIONS)
    p.add_argument("--output", required=True)
    p.add_argument("--cache", help="translation cache directory")
    provider_flag(p)

    p = add("serve-mcp", cmd_serve_mcp, "serve search_rules over JSON-RPC")
    p.add_argument("--intent-index")
    p.add_argument("--logic-index")
    p.add_argument("--tcp-port", type=int, help="TCP port (default: stdio)")
    provider_flag(p)

    p = add("contexts", cmd_contexts, "derive the four context types per test rule")
    p.add_argument("--test", required=True, help="test-split corpus file")
    p.add_argument("--intent", required=True, help="intent descriptions file")
    p.add_argument("--logic", required=True, help="logic descriptions file")
    p.add_argument("--output", required=True)
    provider_flag(p)

    p = add("generate", cmd_generate, "produce rules for every scenario and method")
    p.add_argument("--contexts", required=True)
    p.add_argument("--train", help="train-split corpus (RAG references)")
    p.add_argument("--test", help="test-split corpus (ground truth)")
    p.add_argument("--intent-index")
    p.add_argument("--logic-index")
    p.add_argument("--methods", default=DEFAULT_METHODS)
    p.add_argument("--languages", default=config.languages)
    p.add_argument("--types", default=config.context_types)
    p.add_argument("--n", type=int, default=config.instances, help="instances per scenario")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    provider_flag(p)

    p = add("judge", cmd_judge, "pairwise-judge all traces of each instance")
    p.add_argument("--traces", required=True)
    p.add_argument("--test", required=True, help="test-split corpus (ground truth)")
    p.add_argument("--judge-id", default="unspecified")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fixed-time", type=float, help="pin judgment timestamps")
    p.add_argument("--output", required=True)
    provider_flag(p)

    p = add("fit", cmd_fit, "fit strength scores on a judgment file")
    p.add_argument("--judgments", required=True)
    p.add_argument("--anchor", default="baseline")

    p = add("report", cmd_report, "per-scenario fits, pooled slices, and forest CSV")
    p.add_argument("--judgments", required=True)
    p.add_argument("--anchor", default="baseline")
    p.add_argument("--output", required=True, help="report table (JSON)")
    p.add_argument("--csv", help="forest-plot rows (CSV)")

    p = add("formal", cmd_formal, "toy-model demo of the similarity-misranking result")
    p.add_argument("--witness", action="store_true", help="verify and print the witness")

    p = add("agreement", cmd_agreement, "Cohen's kappa between two judgment files")
    p.add_argument("--labels", action="append", required=True, help="judgment file (twice)")

    p = add("annotate-serve", cmd_annotate_serve, "HTTP backend for expert labeling")
    p.add_argument("--judgments", required=True, help="sampled pairs to label")
    p.add_argument("--traces", required=True, help="traces file with the rule texts")
    p.add_argument("--labels", required=True, help="JSONL file labels persist to")
    p.add_argument("--annotators", type=int, default=3, help="declared panel size")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--ui-dir", help="static annotation UI directory")

    return parser


def run(argv=None) -> int:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        config = (
            PipelineConfig.from_file(known.config) if known.config else PipelineConfig()
        )
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: BadConfig: {exc}", file=sys.stderr)
        return 1

    parser = build_parser(config)
    args = parser.parse_args(argv)
    if args.command == "agreement" and len(args.labels) != 2:
        parser.error("agreement needs exactly two --labels files")
    try:
        return args.func(args)
    except UniruleError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
