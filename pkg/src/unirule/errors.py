"""Exception hierarchy shared across the pipeline.

Every operational failure raises a subclass of UniruleError so the CLI can
distinguish usage errors (argparse, exit 2) from operational ones (exit 1).
"""


class UniruleError(Exception):
    """Base class for all operational errors."""


# corpus parsing / splitting

class MalformedDocument(UniruleError):
    """Input document could not be parsed at all."""


class MissingQuery(UniruleError):
    """Document parsed but carries no detection body."""


class MalformedHeader(UniruleError):
    """Snort rule header does not have the expected 7 tokens."""


class UnbalancedOptions(UniruleError):
    """Snort option block is missing parentheses or unterminated."""


class InvalidRatio(UniruleError):
    """Split ratio outside (0, 1) or empty rule list."""


# llm gateway

class ProviderError(UniruleError):
    """Provider failed after exhausting retries."""


class SchemaError(UniruleError):
    """Provider response could not be interpreted."""


class DimensionMismatch(UniruleError):
    """Embedding batch came back with ragged vector lengths."""


# semantic kb

class EmptyTranslation(UniruleError):
    """Model returned blank output for a translation request."""


class VersionMismatch(UniruleError):
    """Persisted index carries an unsupported format version."""


class ChecksumMismatch(UniruleError):
    """Persisted index is corrupt or truncated."""


# context factory

class MissingDescription(UniruleError):
    """Rule has no native description, so the Context type is unavailable."""


class InsufficientTestRules(UniruleError):
    """Scenario sample size exceeds the eligible test rules."""


class CtiLeakError(ProviderError):
    """CTI synthesis kept leaking rule source text after the retry."""


# agent generator

class BudgetExceeded(UniruleError):
    """Agent loop hit the iteration cap without a final answer."""


class MalformedOutput(UniruleError):
    """No parseable rule block in the final answer, even after reprompt."""


# formal model

class UniverseMismatch(UniruleError):
    """Sets passed to a formal-model operation live in different universes."""


class EmptyRuleSpace(UniruleError):
    """Optimal-class search over an empty rule space."""


# arena eval

class TooFewMethods(UniruleError):
    """Pair enumeration needs at least two methods."""


class InconsistentMethods(UniruleError):
    """Judgments reference methods outside the declared set."""


class UnparseableVerdict(UniruleError):
    """Judge output had no recognizable verdict, even after reprompt."""


class DisconnectedGraph(UniruleError):
    """Comparison graph is not connected through the anchor."""


class NonConvergence(UniruleError):
    """Optimizer hit its iteration cap before the gradient tolerance."""


class SingularHessian(UniruleError):
    """Hessian is singular; sandwich covariance is undefined."""


class LengthMismatch(UniruleError):
    """Kappa inputs have different lengths."""


class DegenerateMarginals(UniruleError):
    """Chance agreement is exactly 1 while observed agreement is not."""
