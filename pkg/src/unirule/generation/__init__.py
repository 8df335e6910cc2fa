"""Rule generation: the agentic loop and its reference baselines."""

from unirule.generation.agent import (
    FENCE_REPROMPT,
    SPACES_BY_MODE,
    extract_rule_block,
    generate_unirule,
    search_tool_spec,
)
from unirule.generation.baselines import (
    BASELINE_MODES,
    REFERENCE_COUNT,
    RawIndex,
    build_raw_index,
    format_references,
    generate_baseline,
    raw_top_k,
)
from unirule.generation.traces import (
    AGENT_METHODS,
    METHODS,
    NO_RETRIEVAL_METHODS,
    AgentBudget,
    GenerationTrace,
    RetrievalCall,
    dedup_results,
    read_traces,
    trace_stats,
    write_traces,
)

__all__ = [
    "AGENT_METHODS",
    "AgentBudget",
    "BASELINE_MODES",
    "FENCE_REPROMPT",
    "GenerationTrace",
    "METHODS",
    "NO_RETRIEVAL_METHODS",
    "REFERENCE_COUNT",
    "RawIndex",
    "RetrievalCall",
    "SPACES_BY_MODE",
    "build_raw_index",
    "dedup_results",
    "extract_rule_block",
    "format_references",
    "generate_baseline",
    "generate_unirule",
    "raw_top_k",
    "read_traces",
    "search_tool_spec",
    "trace_stats",
    "write_traces",
]
