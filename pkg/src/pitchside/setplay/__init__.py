from .model import ActionSpec, Condition, SetplayAst, Step, Transition, TRUE, FALSE
from .language import parse_setplay, print_setplay, setplay_from_form
from .validate import Diagnostic, validate_setplay
from .conditions import WorldView, evaluate
from .executor import ExecutorState, UnboundRoleError, bind_roles, step_executor
from .casebase import (
    Case,
    CaseBase,
    ContextFeatures,
    NoCandidateError,
    cbr_select,
    feasible_setplays,
    record_outcome,
    score,
)

__all__ = [
    "ActionSpec",
    "Condition",
    "SetplayAst",
    "Step",
    "Transition",
    "TRUE",
    "FALSE",
    "parse_setplay",
    "print_setplay",
    "setplay_from_form",
    "Diagnostic",
    "validate_setplay",
    "WorldView",
    "evaluate",
    "ExecutorState",
    "UnboundRoleError",
    "bind_roles",
    "step_executor",
    "Case",
    "CaseBase",
    "ContextFeatures",
    "NoCandidateError",
    "cbr_select",
    "feasible_setplays",
    "record_outcome",
    "score",
]
