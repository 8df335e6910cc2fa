"""Finite toy model of rule quality as set discrepancy.

Everything here is exactly computable: behaviors form a small finite universe,
contexts and languages are subsets, and a rule's quality is the cardinality of
the symmetric difference between what it covers and what it should cover. The
witness machinery shows constructively that token-overlap similarity can rank
a worse rule above a better one.
"""

from dataclasses import dataclass, field
from itertools import combinations

from unirule.errors import EmptyRuleSpace, UniverseMismatch

ENUMERATION_CAP = 20  # 2^20 subsets is the largest space worth enumerating


@dataclass(frozen=True)
class BehaviorUniverse:
    elements: tuple

    def __post_init__(self):
        if len(self.elements) < 1:
            raise ValueError("universe must contain at least one behavior")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("universe elements must be unique")

    def subset(self, items) -> frozenset:
        out = frozenset(items)
        if not out <= frozenset(self.elements):
            raise ValueError(f"{sorted(out)} is not a subset of the universe")
        return out


@dataclass(frozen=True)
class ToyContext:
    universe: BehaviorUniverse
    intent_set: frozenset

    def __post_init__(self):
        object.__setattr__(self, "intent_set", self.universe.subset(self.intent_set))


@dataclass(frozen=True)
class ToyLanguage:
    universe: BehaviorUniverse
    expressiveness: frozenset

    def __post_init__(self):
        object.__setattr__(
            self, "expressiveness", self.universe.subset(self.expressiveness)
        )


@dataclass(frozen=True)
class ToyRule:
    universe: BehaviorUniverse
    coverage: frozenset
    surface: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "coverage", self.universe.subset(self.coverage))
        object.__setattr__(self, "surface", tuple(self.surface))


def _check_universe(*items) -> BehaviorUniverse:
    universes = {item.universe for item in items}
    if len(universes) != 1:
        raise UniverseMismatch(
            f"operands live in {len(universes)} different universes"
        )
    return next(iter(universes))


def achievable_intent(c: ToyContext, l: ToyLanguage) -> frozenset:
    """I(c) ∩ E(l): the behaviors a rule could and should cover."""
    _check_universe(c, l)
    return c.intent_set & l.expressiveness


def discrepancy(r: ToyRule, c: ToyContext, l: ToyLanguage) -> int:
    """|Cov(r) symmetric-difference (I(c) ∩ E(l))|."""
    _check_universe(r, c, l)
    return len(r.coverage ^ achievable_intent(c, l))


def optimal_class(rule_space: list, c: ToyContext, l: ToyLanguage) -> set:
    """Every rule in rule_space achieving the minimum discrepancy."""
    if not rule_space:
        raise EmptyRuleSpace("rule_space must be non-empty")
    scores = [(discrepancy(r, c, l), r) for r in rule_space]
    best = min(score for score, _ in scores)
    return {r for score, r in scores if score == best}


def semantic_distance(
    r: ToyRule, rule_space: list, c: ToyContext, l: ToyLanguage
) -> int:
    """Excess discrepancy of r over the best achievable in rule_space."""
    if not rule_space:
        raise EmptyRuleSpace("rule_space must be non-empty")
    best = min(discrepancy(candidate, c, l) for candidate in rule_space)
    return discrepancy(r, c, l) - best


def decompose(r: ToyRule, c: ToyContext, l: ToyLanguage) -> tuple:
    """Split the discrepancy into (under-detection, over-detection) sets."""
    _check_universe(r, c, l)
    target = achievable_intent(c, l)
    return (target - r.coverage, r.coverage - target)


def all_subset_rules(universe: BehaviorUniverse) -> list:
    """Rule space of every possible coverage subset, in deterministic order."""
    if len(universe.elements) > ENUMERATION_CAP:
        raise ValueError(
            f"refusing to enumerate 2^{len(universe.elements)} subsets; "
            f"pass an explicit rule_space instead"
        )
    rules = []
    for size in range(len(universe.elements) + 1):
        for items in combinations(universe.elements, size):
            rules.append(ToyRule(universe=universe, coverage=frozenset(items)))
    return rules


def jaccard(tokens_a, tokens_b) -> float:
    """Token-set Jaccard similarity; two empty surfaces count as identical."""
    a, b = set(tokens_a), set(tokens_b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


@dataclass(frozen=True)
class WitnessInstance:
    """A configuration where surface similarity misranks two rules."""

    universe: BehaviorUniverse
    context: ToyContext
    language: ToyLanguage
    reference: ToyRule  # a member of the optimal class
    better: ToyRule  # semantically closer, textually farther (r1)
    worse: ToyRule  # semantically farther, textually closer (r2)


def verify_witness(instance: WitnessInstance, rule_space: list | None = None) -> dict:
    """Evaluate both sides of the misranking claim on a witness instance."""
    space = rule_space or all_subset_rules(instance.universe)
    d1 = semantic_distance(instance.better, space, instance.context, instance.language)
    d2 = semantic_distance(instance.worse, space, instance.context, instance.language)
    sim1 = jaccard(instance.better.surface, instance.reference.surface)
    sim2 = jaccard(instance.worse.surface, instance.reference.surface)
    report = {
        "d1": d1,
        "d2": d2,
        "sim1": sim1,
        "sim2": sim2,
        "d1_less_d2": d1 < d2,
        "sim1_less_sim2": sim1 < sim2,
    }
    report["valid"] = report["d1_less_d2"] and report["sim1_less_sim2"]
    return report


def bundled_witness() -> WitnessInstance:
    """Fixed instance: two rules watching /etc/passwd reads.

    The better rule covers exactly the intended behavior but shares no tokens
    with the reference; the worse rule covers a disjoint behavior (a null-byte
    variant) while reusing the reference's token shapes.
    """
    universe = BehaviorUniverse(elements=("passwd_read", "passwd_read_nullbyte"))
    context = ToyContext(universe=universe, intent_set=frozenset({"passwd_read"}))
    language = ToyLanguage(
        universe=universe,
        expressiveness=frozenset({"passwd_read", "passwd_read_nullbyte"}),
    )
    reference = ToyRule(
        universe=universe,
        coverage=frozenset({"passwd_read"}),
        surface=("content:", '"/etc/passwd"'),
    )
    better = ToyRule(
        universe=universe,
        coverage=frozenset({"passwd_read"}),
        surface=("detect", "passwd", "path", "read"),
    )
    worse = ToyRule(
        universe=universe,
        coverage=frozenset({"passwd_read_nullbyte"}),
        surface=("content:", '"/etc/passwd|00|"'),
    )
    return WitnessInstance(
        universe=universe,
        context=context,
        language=language,
        reference=reference,
        better=better,
        worse=worse,
    )


def sim_failure_witness() -> tuple:
    """The bundled witness instance together with its verification report."""
    instance = bundled_witness()
    return instance, verify_witness(instance)


def search_witnesses(
    universe: BehaviorUniverse,
    context: ToyContext,
    language: ToyLanguage,
    reference_surface: tuple,
    alphabet: tuple,
    limit: int | None = 1,
) -> list:
    """Exhaustively scan (coverage, surface) pairs for misranking witnesses.

    The reference rule is pinned to the optimal class with the given surface;
    r1/r2 range over every coverage subset and every subset of the alphabet
    as surface. Deterministic iteration order, so the first hit is stable.
    """
    space = all_subset_rules(universe)
    target = achievable_intent(context, language)
    reference = ToyRule(universe=universe, coverage=target, surface=reference_surface)

    surfaces = []
    for size in range(len(alphabet) + 1):
        surfaces.extend(combinations(alphabet, size))

    distance_of = {
        rule.coverage: semantic_distance(rule, space, context, language)
        for rule in space
    }
    candidates = [
        ToyRule(universe=universe, coverage=rule.coverage, surface=surface)
        for rule in space
        for surface in surfaces
    ]
    found = []
    for r1 in candidates:
        d1 = distance_of[r1.coverage]
        sim1 = jaccard(r1.surface, reference.surface)
        for r2 in candidates:
            if distance_of[r2.coverage] <= d1:
                continue
            if sim1 < jaccard(r2.surface, reference.surface):
                found.append(
                    WitnessInstance(
                        universe=universe,
                        context=context,
                        language=language,
                        reference=reference,
                        better=r1,
                        worse=r2,
                    )
                )
                if limit is not None and len(found) >= limit:
                    return found
    return found
