"""Exception types shared across the package."""


class CareTreeError(Exception):
    """Base class for all caretree errors."""


class InvalidTreeError(CareTreeError):
    """Raised when an operation requires a structurally valid tree and got one that is not."""

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(f"{v.node_id}: {v.message}" for v in self.violations)
        super().__init__(f"tree failed structural validation: {detail}")


class UnboundLeafError(CareTreeError):
    def __init__(self, leaf_name):
        self.leaf_name = leaf_name
        super().__init__(f"no binding for leaf {leaf_name!r}")


class MissingKeyError(CareTreeError):
    def __init__(self, key):
        self.key = key
        super().__init__(f"blackboard has no key {key!r}")


class TypeMismatchError(CareTreeError):
    """A blackboard value had the wrong type for the operation; never silently false."""


class ScriptExhaustedError(CareTreeError):
    def __init__(self, leaf_name, attempts):
        self.leaf_name = leaf_name
        self.attempts = attempts
        super().__init__(
            f"scripted outcomes for leaf {leaf_name!r} exhausted after {attempts} attempts"
        )


class MissingOutcomeError(CareTreeError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"no outcome supplied for {name!r}")


class UnsupportedNodeError(CareTreeError):
    pass


class ParseError(CareTreeError):
    """Text input could not be parsed; carries line-numbered diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        shown = "; ".join(str(d) for d in self.diagnostics[:4])
        if len(self.diagnostics) > 4:
            shown += f" (+{len(self.diagnostics) - 4} more)"
        super().__init__(shown)


class ConversionError(CareTreeError):
    """A flowchart cannot be compiled to a behavior tree (cycle or unsupported shape)."""


class CorpusError(CareTreeError):
    """A bundled protocol file failed to parse, validate, or meet its assertions."""


class UnknownSessionError(CareTreeError):
    """No session with that id."""


class TerminalSessionError(CareTreeError):
    """The session already finished; it takes no more outcomes."""


class PendingMismatchError(CareTreeError):
    """The submitted leaf is not the one the session is waiting on."""

    def __init__(self, submitted: str, expected: str | None):
        self.submitted = submitted
        self.expected = expected
        waiting = f"waiting on {expected!r}" if expected else "not waiting on any leaf"
        super().__init__(f"outcome submitted for {submitted!r} but the session is {waiting}")


class BudgetExceededError(CareTreeError):
    """A run hit a tick or virtual-time limit; distinct from a protocol Failure."""

    def __init__(self, budget, limit, trace=None):
        self.budget = budget
        self.limit = limit
        self.trace = trace
        super().__init__(f"run exceeded {budget} budget ({limit})")


class DeadlockError(CareTreeError):
    """The engine is Running but nothing can advance it: no timer, no event, no leaf."""

    def __init__(self, message, trace=None):
        self.trace = trace
        super().__init__(message)


class PendingExternalError(DeadlockError):
    """A batch run blocked on an external leaf that nothing will ever answer."""

    def __init__(self, leaf_names, trace=None):
        self.leaf_names = list(leaf_names)
        super().__init__(
            f"run blocked on external leaves with no submitted outcome: {', '.join(self.leaf_names)}",
            trace,
        )
