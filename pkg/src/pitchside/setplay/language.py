"""Setplay source language: parser and canonical printer.

One setplay per ``.sp`` file::

    (setplay :name SYM :id INT :players (ROLE+)
      :activation COND :abort COND
      (step :id INT :wait (MIN MAX) :condition COND
        :directives ((ROLE ACTION)*)
        :transitions ((next :to INT :cond COND) | (finish :cond COND)
                      | (abort :cond COND))+)
      +)

The printer is the normative formatter: fixed keyword order, 2-space
indentation, 3-decimal coordinates and seconds.  ``parse(print(ast))`` is
structurally equal to ``ast``; printing a parsed document once reaches the
canonical fixed point.
"""

from __future__ import annotations

from .. import sexpr
from ..sexpr import FormWalker, ParseError, fmt_coord, fmt_num
from .model import (
    ACTION_KINDS,
    ActionSpec,
    Condition,
    CONDITION_OPS,
    SetplayAst,
    Step,
    TRANSITION_KINDS,
    Transition,
)


def parse_setplay(text: str) -> SetplayAst:
    form = sexpr.parse_one(text)
    return setplay_from_form(form)


def setplay_from_form(form) -> SetplayAst:
    w = FormWalker(form, "setplay")
    w.require_head("setplay")
    name = w.keyword("name")
    sid = w.keyword("id")
    if not isinstance(sid, int):
        raise ParseError(f"setplay :id must be an integer, got {sid!r}", 1, 1)
    players = w.keyword("players")
    if not isinstance(players, list) or not players or not all(isinstance(r, str) for r in players):
        raise ParseError("setplay :players must be a non-empty role list", 1, 1)
    activation = condition_from_form(w.keyword("activation", default=["true"]))
    abort = condition_from_form(w.keyword("abort"))
    steps = tuple(step_from_form(f) for f in w.sublists("step"))
    if not steps:
        raise ParseError("setplay needs at least one step", 1, 1)
    return SetplayAst(
        name=str(name),
        id=sid,
        participants=tuple(str(r) for r in players),
        activation=activation,
        abort=abort,
        steps=steps,
    )


def step_from_form(form) -> Step:
    w = FormWalker(form, "step")
    step_id = w.keyword("id")
    wait = w.keyword("wait")
    if not (isinstance(wait, list) and len(wait) == 2):
        raise ParseError(f"step {step_id}: :wait must be (min max)", 1, 1)
    condition = condition_from_form(w.keyword("condition", default=["true"]))
    directives = []
    dirs_form = w.keyword("directives", default=[])
    for d in dirs_form:
        if not (isinstance(d, list) and len(d) == 2 and isinstance(d[0], str)):
            raise ParseError(f"step {step_id}: directive must be (role action)", 1, 1)
        directives.append((d[0], action_from_form(d[1], step_id)))
    transitions_form = w.keyword("transitions")
    if not isinstance(transitions_form, list) or not transitions_form:
        raise ParseError(f"step {step_id}: needs at least one transition", 1, 1)
    transitions = tuple(transition_from_form(t, step_id) for t in transitions_form)
    return Step(
        id=step_id,
        wait_min=float(wait[0]),
        wait_max=float(wait[1]),
        condition=condition,
        directives=tuple(directives),
        transitions=transitions,
    )


def action_from_form(form, step_id) -> ActionSpec:
    if not (isinstance(form, list) and form and isinstance(form[0], str)):
        raise ParseError(f"step {step_id}: malformed action {form!r}", 1, 1)
    kind = form[0]
    if kind not in ACTION_KINDS:
        raise ParseError(f"step {step_id}: unknown action {kind!r}", 1, 1)
    w = FormWalker(form, kind)
    if kind == "pass":
        return ActionSpec(kind="pass", to_role=str(w.keyword("to")))
    if kind == "dribble":
        return ActionSpec(kind="dribble", direction_deg=float(w.keyword("dir")))
    if kind == "moveTo":
        if len(form) != 3:
            raise ParseError(f"step {step_id}: moveTo takes X Y", 1, 1)
        return ActionSpec(kind="moveTo", x=float(form[1]), y=float(form[2]))
    if len(form) != 1:
        raise ParseError(f"step {step_id}: {kind} takes no arguments", 1, 1)
    return ActionSpec(kind=kind)


def transition_from_form(form, step_id) -> Transition:
    if not (isinstance(form, list) and form and form[0] in TRANSITION_KINDS):
        raise ParseError(f"step {step_id}: malformed transition {form!r}", 1, 1)
    w = FormWalker(form, form[0])
    condition = condition_from_form(w.keyword("cond", default=["true"]))
    if form[0] == "next":
        target = w.keyword("to")
        if not isinstance(target, int):
            raise ParseError(f"step {step_id}: next :to must be a step id", 1, 1)
        return Transition(kind="next", target=target, condition=condition)
    return Transition(kind=form[0], condition=condition)


def condition_from_form(form) -> Condition:
    if not (isinstance(form, list) and form and isinstance(form[0], str)):
        raise ParseError(f"malformed condition {form!r}", 1, 1)
    op = form[0]
    if op not in CONDITION_OPS:
        raise ParseError(f"unknown condition {op!r}", 1, 1)
    args = form[1:]
    if op in ("true", "false"):
        if args:
            raise ParseError(f"({op}) takes no arguments", 1, 1)
        return Condition(op)
    if op in ("and", "or"):
        if not args:
            raise ParseError(f"({op} ...) needs at least one operand", 1, 1)
        return Condition(op, tuple(condition_from_form(a) for a in args))
    if op == "not":
        if len(args) != 1:
            raise ParseError("(not ...) takes exactly one operand", 1, 1)
        return Condition(op, (condition_from_form(args[0]),))
    if op == "play-mode-is":
        if len(args) != 1 or not isinstance(args[0], str):
            raise ParseError("(play-mode-is MODE) takes one mode symbol", 1, 1)
        return Condition(op, (args[0],))
    if op == "ball-in-region":
        if len(args) != 4:
            raise ParseError("(ball-in-region X1 Y1 X2 Y2)", 1, 1)
        return Condition(op, tuple(float(a) for a in args))
    if op == "can-pass":
        w = FormWalker(form, "can-pass")
        return Condition(op, (str(w.keyword("from")), str(w.keyword("to"))))
    if op == "clear-shot":
        if len(args) != 1 or not isinstance(args[0], str):
            raise ParseError("(clear-shot ROLE)", 1, 1)
        return Condition(op, (args[0],))
    if op == "elapsed":
        if len(args) != 1:
            raise ParseError("(elapsed SECONDS)", 1, 1)
        return Condition(op, (float(args[0]),))
    # opponents-within
    if len(args) != 5:
        raise ParseError("(opponents-within N X1 Y1 X2 Y2)", 1, 1)
    if not isinstance(args[0], int):
        raise ParseError("opponents-within count must be an integer", 1, 1)
    return Condition(op, (args[0],) + tuple(float(a) for a in args[1:]))


# --- canonical printer ----------------------------------------------------

def print_condition(cond: Condition) -> str:
    op = cond.op
    if op in ("true", "false"):
        return f"({op})"
    if op in ("and", "or", "not"):
        inner = " ".join(print_condition(c) for c in cond.args)
        return f"({op} {inner})"
    if op == "play-mode-is":
        return f"(play-mode-is {cond.args[0]})"
    if op == "ball-in-region":
        coords = " ".join(fmt_coord(a) for a in cond.args)
        return f"(ball-in-region {coords})"
    if op == "can-pass":
        return f"(can-pass :from {cond.args[0]} :to {cond.args[1]})"
    if op == "clear-shot":
        return f"(clear-shot {cond.args[0]})"
    if op == "elapsed":
        return f"(elapsed {fmt_coord(cond.args[0])})"
    coords = " ".join(fmt_coord(a) for a in cond.args[1:])
    return f"(opponents-within {cond.args[0]} {coords})"


def print_action(action: ActionSpec) -> str:
    if action.kind == "pass":
        return f"(pass :to {action.to_role})"
    if action.kind == "dribble":
        return f"(dribble :dir {fmt_num(action.direction_deg)})"
    if action.kind == "moveTo":
        return f"(moveTo {fmt_coord(action.x)} {fmt_coord(action.y)})"
    return f"({action.kind})"


def print_transition(t: Transition) -> str:
    if t.kind == "next":
        return f"(next :to {t.target} :cond {print_condition(t.condition)})"
    return f"({t.kind} :cond {print_condition(t.condition)})"


def print_step(step: Step) -> str:
    directives = " ".join(
        f"({role} {print_action(action)})" for role, action in step.directives
    )
    transitions = "\n                  ".join(print_transition(t) for t in step.transitions)
    return (
        f"  (step :id {step.id} :wait ({fmt_coord(step.wait_min)} {fmt_coord(step.wait_max)})"
        f" :condition {print_condition(step.condition)}\n"
        f"    :directives ({directives})\n"
        f"    :transitions ({transitions}))"
    )


def print_setplay(ast: SetplayAst) -> str:
    players = " ".join(ast.participants)
    lines = [
        f"(setplay :name {ast.name} :id {ast.id} :players ({players})",
        f"  :activation {print_condition(ast.activation)}",
        f"  :abort {print_condition(ast.abort)}",
    ]
    lines.extend(print_step(s) for s in ast.steps)
    return "\n".join(lines) + ")\n"
