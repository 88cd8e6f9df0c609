"""Syntax tree for CML. Spans never take part in equality, so trees compare structurally."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..diagnostics import SourceSpan

_SPAN = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Ident:
    value: str
    span: SourceSpan | None = field(**_SPAN)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class ModelDecl:
    name: str | None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class RoleDecl:
    id: Ident
    label: str | None = None
    is_a: Ident | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class AgentDecl:
    id: Ident
    label: str | None = None
    plays: tuple[Ident, ...] = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class GoalDecl:
    id: Ident
    label: str | None = None
    aimed_by: Ident | None = None
    decomposition: str | None = None  # "and" | "or"
    subgoals: tuple[Ident, ...] = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class InfoDecl:
    id: Ident
    label: str | None = None
    personal: bool = False
    owner: Ident | None = None
    sensitivity: str | None = None  # R | C | S | T
    part_of: Ident | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class UseDecl:
    goal: Ident
    use_type: str
    info: Ident
    need: str | None = None  # "required" | "optional"
    purpose: str | None = None  # "compatible" | "incompatible"
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class PermissionDecl:
    id: Ident
    permission_type: str
    over: Ident
    holder: Ident
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class ProvisionDecl:
    id: Ident
    of: Ident
    by: Ident
    to: Ident
    confidential: bool
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class DelegateDecl:
    kind: str  # "goal" | "permission"
    id: Ident
    delegator: Ident
    delegatee: Ident
    delegatum: Ident
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class AdoptDecl:
    actor: Ident
    delegation: Ident
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class TrustDecl:
    id: Ident
    trustor: Ident
    trustee: Ident
    kind: str  # "goal" | "permission"
    trustum: Ident
    level: str  # "trust" | "distrust"
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class MonitorDecl:
    id: Ident
    monitor: Ident
    monitoree: Ident
    kind: str
    subject: Ident
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class VulnerabilityDecl:
    id: Ident
    infos: tuple[Ident, ...]
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class ImpactClause:
    severity: str  # L | M | H
    over: Ident
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class ThreatDecl:
    kind: str  # "intentional" | "incidental"
    id: Ident
    label: str | None = None
    threatens: tuple[Ident, ...] = ()
    exploits: tuple[Ident, ...] = ()
    actors: tuple[Ident, ...] = ()
    methods: tuple[Ident, ...] = ()
    probability: str | None = None
    impacts: tuple[ImpactClause, ...] = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class AttackMethodDecl:
    id: Ident
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class PrivacyGoalDecl:
    id: Ident
    label: str | None = None
    mitigates: tuple[Ident, ...] = ()
    realized_by: tuple[Ident, ...] = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class PolicyDecl:
    id: Ident
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class MechanismDecl:
    id: Ident
    capability: str  # "anonymize" | "unlink" | "other"
    label: str | None = None
    applied_to: tuple[Ident, ...] = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class RequirementDecl:
    kind: str
    id: Ident
    concerning: Ident
    label: str | None = None
    interpreted_by: tuple[Ident, ...] = ()
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class DescribesDecl:
    info: Ident
    goal: Ident
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class SituationDecl:
    id: Ident
    determines: tuple[tuple[Ident, str], ...]
    label: str | None = None
    span: SourceSpan | None = field(**_SPAN)


Statement = Union[
    ModelDecl,
    RoleDecl,
    AgentDecl,
    GoalDecl,
    InfoDecl,
    UseDecl,
    PermissionDecl,
    ProvisionDecl,
    DelegateDecl,
    AdoptDecl,
    TrustDecl,
    MonitorDecl,
    VulnerabilityDecl,
    ThreatDecl,
    AttackMethodDecl,
    PrivacyGoalDecl,
    PolicyDecl,
    MechanismDecl,
    RequirementDecl,
    DescribesDecl,
    SituationDecl,
]


@dataclass(frozen=True, slots=True)
class Ast:
    statements: tuple[Statement, ...] = ()
    file: str = field(default="<input>", compare=False)

    @property
    def model_name(self) -> str | None:
        for stmt in self.statements:
            if isinstance(stmt, ModelDecl):
                return stmt.name
        return None
