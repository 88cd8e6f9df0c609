"""Canonical CML rendering of a syntax tree. Re-parsing the output yields an equal tree."""

from __future__ import annotations

from functools import singledispatch

from . import ast as A


def _q(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _head(keyword: str, ident: A.Ident, label: str | None) -> str:
    out = f"{keyword} {ident}"
    return f"{out} {_q(label)}" if label is not None else out


def _ids(items) -> str:
    return ", ".join(str(i) for i in items)


@singledispatch
def format_statement(stmt) -> str:
    raise TypeError(f"cannot format {type(stmt).__name__}")


@format_statement.register
def _(s: A.ModelDecl) -> str:
    return "model" if s.name is None else f"model {_q(s.name)}"


@format_statement.register
def _(s: A.RoleDecl) -> str:
    out = _head("role", s.id, s.label)
    return f"{out} is_a {s.is_a}" if s.is_a else out


@format_statement.register
def _(s: A.AgentDecl) -> str:
    out = _head("agent", s.id, s.label)
    return f"{out} plays {_ids(s.plays)}" if s.plays else out


@format_statement.register
def _(s: A.GoalDecl) -> str:
    out = _head("goal", s.id, s.label)
    if s.aimed_by:
        out += f" aimedBy {s.aimed_by}"
    if s.decomposition:
        out += f" {{ {s.decomposition} [{_ids(s.subgoals)}] }}"
    return out


@format_statement.register
def _(s: A.InfoDecl) -> str:
    out = _head("info", s.id, s.label)
    if s.personal:
        out += f" personal {{ owner {s.owner} sensitivity {s.sensitivity} }}"
    else:
        out += " public"
    if s.part_of:
        out += f" partOf {s.part_of}"
    return out


@format_statement.register
def _(s: A.UseDecl) -> str:
    out = f"use {s.goal} {s.use_type} {s.info}"
    clauses = []
    if s.need:
        clauses.append(f"need {s.need}")
    if s.purpose:
        clauses.append(f"purpose {s.purpose}")
    if clauses:
        out += " { " + " ".join(clauses) + " }"
    return out


@format_statement.register
def _(s: A.PermissionDecl) -> str:
    return f"{_head('permission', s.id, s.label)} {s.permission_type} over {s.over} heldBy {s.holder}"


@format_statement.register
def _(s: A.ProvisionDecl) -> str:
    ptype = "confidential" if s.confidential else "nonconfidential"
    return f"{_head('provision', s.id, s.label)} of {s.of} from {s.by} to {s.to} {ptype}"


@format_statement.register
def _(s: A.DelegateDecl) -> str:
    head = _head(f"delegate {s.kind}", s.id, s.label)
    return f"{head} from {s.delegator} to {s.delegatee} of {s.delegatum}"


@format_statement.register
def _(s: A.AdoptDecl) -> str:
    return f"adopt {s.actor} {s.delegation}"


@format_statement.register
def _(s: A.TrustDecl) -> str:
    head = _head("trust", s.id, s.label)
    return f"{head} from {s.trustor} to {s.trustee} on {s.kind} {s.trustum} level {s.level}"


@format_statement.register
def _(s: A.MonitorDecl) -> str:
    head = _head("monitor", s.id, s.label)
    return f"{head} by {s.monitor} of {s.monitoree} on {s.kind} {s.subject}"


@format_statement.register
def _(s: A.VulnerabilityDecl) -> str:
    return f"{_head('vulnerability', s.id, s.label)} on {_ids(s.infos)}"


@format_statement.register
def _(s: A.ThreatDecl) -> str:
    lines = [f"{_head(f'threat {s.kind}', s.id, s.label)} {{"]
    if s.threatens:
        lines.append(f"  threatens {_ids(s.threatens)}")
    if s.exploits:
        lines.append(f"  exploits {_ids(s.exploits)}")
    lines += [f"  actor {a}" for a in s.actors]
    lines += [f"  method {m}" for m in s.methods]
    if s.probability:
        lines.append(f"  probability {s.probability}")
    lines += [f"  impact severity {i.severity} over {i.over}" for i in s.impacts]
    lines.append("}")
    return "\n".join(lines)


@format_statement.register
def _(s: A.AttackMethodDecl) -> str:
    return _head("attackmethod", s.id, s.label)


@format_statement.register
def _(s: A.PrivacyGoalDecl) -> str:
    out = _head("privacygoal", s.id, s.label)
    if s.mitigates:
        out += f" mitigates {_ids(s.mitigates)}"
    if s.realized_by:
        out += f" realizedBy {_ids(s.realized_by)}"
    return out


@format_statement.register
def _(s: A.PolicyDecl) -> str:
    return _head("policy", s.id, s.label)


@format_statement.register
def _(s: A.MechanismDecl) -> str:
    out = f"{_head('mechanism', s.id, s.label)} capability {s.capability}"
    return f"{out} appliedTo {_ids(s.applied_to)}" if s.applied_to else out


@format_statement.register
def _(s: A.RequirementDecl) -> str:
    out = f"{_head(f'requirement {s.kind}', s.id, s.label)} concerning {s.concerning}"
    return f"{out} interpretedBy {_ids(s.interpreted_by)}" if s.interpreted_by else out


@format_statement.register
def _(s: A.DescribesDecl) -> str:
    return f"describes {s.info} {s.goal}"


@format_statement.register
def _(s: A.SituationDecl) -> str:
    pairs = ", ".join(f"{info} {level}" for info, level in s.determines)
    return f"{_head('situation', s.id, s.label)} determines {pairs}"


def format_ast(tree: A.Ast) -> str:
    return "".join(format_statement(s) + "\n" for s in tree.statements)
