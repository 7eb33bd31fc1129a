"""caretree: behavior trees for stepwise clinical and operational protocols.

The pieces fit together like this: `tree` holds the node model and validation,
`dsl` reads and writes the indented text format, `engine` ticks a tree against
leaf `bindings` over a `blackboard` and virtual `clock`, `sim` runs whole
scenarios, `flowchart` converts flowcharts to equivalent trees, `corpus` ships
transcribed protocols, and `service` exposes the lot over HTTP.
"""

from .bindings import (
    ConstantFailure,
    ConstantSuccess,
    External,
    LeafBehavior,
    LeafBindings,
    LeafContext,
    PredicateQuery,
    Scripted,
    Stochastic,
    behavior_from_spec,
    bindings_from_specs,
    submit_outcome,
)
from .blackboard import Blackboard
from .clock import VirtualClock
from .dsl import Diagnostic, parse_predicate, parse_tree, serialize
from .dot import export_dot
from .engine import Engine, NodeState, RuntimeState
from .corpus import ProtocolEntry, load_corpus, load_protocol
from .errors import (
    BudgetExceededError,
    CareTreeError,
    ConversionError,
    CorpusError,
    DeadlockError,
    InvalidTreeError,
    MissingKeyError,
    MissingOutcomeError,
    ParseError,
    PendingExternalError,
    PendingMismatchError,
    ScriptExhaustedError,
    TerminalSessionError,
    TypeMismatchError,
    UnboundLeafError,
    UnknownSessionError,
    UnsupportedNodeError,
)
from .flowchart import (
    EquivalenceReport,
    FlowChart,
    FlowNode,
    FlowRun,
    SYNTHETIC_LEAVES,
    check_equivalence,
    convert_to_bt,
    execute_flowchart,
    parse_flowchart,
    validate_flowchart,
)
from .generate import random_flowchart, random_outcomes, random_stateless_tree
from .oracle import evaluate_definitional
from .service import create_app
from .session import ADVANCE, Pending, Session, SessionStore, default_interactive_bindings
from .sim import (
    Scenario,
    ScheduledEvent,
    SimResult,
    estimate_success_probability,
    load_scenario,
    run,
    run_scenario,
)
from .trace import (
    BLACKBOARD_WRITE,
    EVENT_APPLIED,
    HALTED,
    NODE_ENTERED,
    NODE_RETURNED,
    ExecutionTrace,
    TraceEvent,
)
from .tree import (
    BehaviorTree,
    Node,
    NodeKind,
    NodeSpec,
    PeriodicTimer,
    Predicate,
    RepeatUntil,
    RetryLimit,
    Status,
    StructuralViolation,
    action,
    build_tree,
    ensure_valid,
    normalize,
    parallel,
    query,
    recovery,
    repeat_until,
    retry,
    selector,
    sequence,
    structural_equal,
    timer,
    validate,
)
from .values import Duration, Timestamp, TypedValue, format_duration, parse_duration

__version__ = "0.1.0"
