"""Structural validation of setplay ASTs.

Diagnostics are data, not errors: an empty list means the setplay is sound
(step ids dense from 0, every transition lands on a real step, every step
reachable, a finish reachable, all roles declared, wait windows sane, abort
condition present).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import SetplayAst, condition_roles


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def validate_setplay(ast: SetplayAst) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    ids = [s.id for s in ast.steps]
    id_set = set(ids)

    for sid in sorted({i for i in ids if ids.count(i) > 1}):
        out.append(Diagnostic("duplicate-step-id", f"step id {sid} declared more than once"))
    if 0 not in id_set:
        out.append(Diagnostic("missing-step-0", "entry step 0 does not exist"))
    if sorted(id_set) != list(range(len(id_set))):
        out.append(Diagnostic("non-dense-step-ids", f"step ids {sorted(id_set)} are not dense from 0"))

    for step in ast.steps:
        if step.wait_min > step.wait_max or step.wait_min < 0:
            out.append(
                Diagnostic("bad-wait", f"step {step.id} wait ({step.wait_min}, {step.wait_max})")
            )
        if not step.transitions:
            out.append(Diagnostic("no-transitions", f"step {step.id} has no transitions"))
        for t in step.transitions:
            if t.kind == "next" and t.target not in id_set:
                out.append(
                    Diagnostic(
                        "dangling-transition",
                        f"step {step.id} -> {t.target} targets a missing step",
                    )
                )

    declared = set(ast.participants)
    used: set[str] = set()
    for step in ast.steps:
        for role, action in step.directives:
            used.add(role)
            if action.kind == "pass":
                used.add(action.to_role)
        used |= condition_roles(step.condition)
        for t in step.transitions:
            used |= condition_roles(t.condition)
    used |= condition_roles(ast.activation)
    used |= condition_roles(ast.abort)
    for role in sorted(used - declared):
        out.append(Diagnostic("undeclared-role", f"role {role!r} is not in :players"))

    if ast.abort is None:  # programmatically built ASTs only; parser requires it
        out.append(Diagnostic("missing-abort", "no abort condition"))

    # Reachability from step 0 along next transitions.
    if 0 in id_set:
        reached: set[int] = set()
        frontier = [0]
        finish_reachable = False
        while frontier:
            sid = frontier.pop()
            if sid in reached or sid not in id_set:
                continue
            reached.add(sid)
            for t in ast.step(sid).transitions:
                if t.kind == "next" and t.target in id_set:
                    frontier.append(t.target)
                elif t.kind == "finish":
                    finish_reachable = True
        for sid in sorted(id_set - reached):
            out.append(Diagnostic("unreachable-step", f"step {sid} cannot be reached from step 0"))
        if not finish_reachable:
            out.append(Diagnostic("no-finish-reachable", "no finish transition is reachable"))

    return out
