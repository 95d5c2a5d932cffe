from .config import SimConfig, DEFAULT_CONFIG
from .state import (
    AgentState,
    Command,
    CommandSet,
    DuplicateCommandError,
    Observation,
    PenaltyRecord,
    PlayMode,
    SeenObject,
    WorldState,
    agent_id,
    all_agent_ids,
)
from .skills import (
    ENVELOPES,
    IMPROVED_SPRINT_ENVELOPES,
    SkillEnvelope,
    ContractViolationError,
    resolve_skill_command,
)
from .kick import LONG_KICK, OutOfContextError, sample_kick_outcome
from .world import initial_world, observe, step_world
from .referee import referee_adjudicate
from .matchlog import LogReader, LogWriter, format_cycle_line

__all__ = [
    "SimConfig",
    "DEFAULT_CONFIG",
    "AgentState",
    "Command",
    "CommandSet",
    "Observation",
    "PenaltyRecord",
    "PlayMode",
    "SeenObject",
    "WorldState",
    "agent_id",
    "all_agent_ids",
    "ENVELOPES",
    "IMPROVED_SPRINT_ENVELOPES",
    "SkillEnvelope",
    "ContractViolationError",
    "resolve_skill_command",
    "LONG_KICK",
    "OutOfContextError",
    "sample_kick_outcome",
    "DuplicateCommandError",
    "initial_world",
    "observe",
    "step_world",
    "referee_adjudicate",
    "LogReader",
    "LogWriter",
    "format_cycle_line",
]
