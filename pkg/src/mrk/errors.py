"""Exception hierarchy shared across the package."""


class MrkError(Exception):
    """Base class for all package-specific errors."""


class GraphFormatError(MrkError):
    """Malformed edge or attribute file (message carries path and line number)."""


class CoupledGraphError(MrkError):
    """A coupled multigraph violates the structural invariants of the encoding."""


class MiningBudgetError(MrkError):
    """Embedding enumeration exceeded its partial-state budget for one pattern."""

    def __init__(self, pattern_code: str, budget: int):
        self.pattern_code = pattern_code
        self.budget = budget
        super().__init__(
            f"embedding enumeration exceeded the budget of {budget} partial "
            f"states for pattern {pattern_code!r}; raise the budget or tighten "
            f"the mining parameters"
        )


class MiningInvariantError(MrkError):
    """Internal consistency check of the miner failed (should never happen)."""


class EvaluationError(MrkError):
    """Evaluation cannot proceed (e.g. a fold with no positives or negatives)."""
