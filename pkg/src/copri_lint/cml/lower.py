"""Lowering of CML syntax trees into model builder calls."""

from __future__ import annotations

from dataclasses import fields
from functools import singledispatch
from pathlib import PurePath
from typing import Iterable

from ..diagnostics import Diagnostic, DiagnosticError, SourceSpan
from ..model import (
    DelegationRecord,
    ImpactRecord,
    MechanismRecord,
    ModelBuilder,
    ModelGraph,
    MonitorRecord,
    PermissionRecord,
    ProvisionRecord,
    RequirementRecord,
    ThreatRecord,
    TrustRecord,
    UseRecord,
)
from ..schema import (
    Capability,
    DelegationKind,
    ElementKind,
    Level,
    MonitorKind,
    NeedToUse,
    ProvisionType,
    PurposeOfUse,
    Relation,
    RequirementKind,
    Sensitivity,
    ThreatKind,
    TrustKind,
    TrustLevel,
    UseType,
)
from . import ast as A


def _ref_spans(node) -> dict[str, SourceSpan]:
    """Map each identifier mentioned in a statement to the span of its first mention."""
    spans: dict[str, SourceSpan] = {}

    def walk(value) -> None:
        if isinstance(value, A.Ident):
            if value.span is not None:
                spans.setdefault(value.value, value.span)
        elif isinstance(value, tuple):
            for v in value:
                walk(v)
        elif hasattr(value, "__dataclass_fields__"):
            for f in fields(value):
                if f.name != "span":
                    walk(getattr(value, f.name))

    walk(node)
    return spans


def _label(label: str | None) -> str:
    return label or ""


def _v(ident: A.Ident | None) -> str | None:
    return ident.value if ident is not None else None


class _Lowering:
    def __init__(self, builder: ModelBuilder) -> None:
        self.b = builder

    def element(self, kind: ElementKind, s, **kw) -> None:
        self.b.add_element(kind, s.id.value, _label(s.label), span=s.id.span, **kw)

    def edge(self, relation: Relation, source: A.Ident, target: A.Ident, s, **kw) -> None:
        self.b.add_edge(relation, source.value, target.value, span=s.span, ref_spans=_ref_spans(s), **kw)

    def record(self, record, s) -> None:
        self.b.add_record(record, ref_spans=_ref_spans(s))


@singledispatch
def _lower(stmt, lw: _Lowering) -> None:
    raise TypeError(f"cannot lower {type(stmt).__name__}")


@_lower.register
def _(s: A.ModelDecl, lw: _Lowering) -> None:
    pass


@_lower.register
def _(s: A.RoleDecl, lw: _Lowering) -> None:
    lw.element(ElementKind.ROLE, s)
    if s.is_a:
        lw.edge(Relation.IS_A, s.id, s.is_a, s)


@_lower.register
def _(s: A.AgentDecl, lw: _Lowering) -> None:
    lw.element(ElementKind.AGENT, s)
    for role in s.plays:
        lw.edge(Relation.PLAYS, s.id, role, s)


@_lower.register
def _(s: A.GoalDecl, lw: _Lowering) -> None:
    lw.element(ElementKind.GOAL, s)
    if s.aimed_by:
        lw.edge(Relation.AIMS, s.aimed_by, s.id, s)
    relation = Relation.AND_DECOMPOSED if s.decomposition == "and" else Relation.OR_DECOMPOSED
    for sub in s.subgoals:
        lw.edge(relation, s.id, sub, s)


@_lower.register
def _(s: A.InfoDecl, lw: _Lowering) -> None:
    if s.personal:
        lw.element(ElementKind.PERSONAL_INFORMATION, s, sensitivity=Sensitivity.from_letter(s.sensitivity))
        lw.edge(Relation.OWN, s.owner, s.id, s)
    else:
        lw.element(ElementKind.PUBLIC_INFORMATION, s)
    if s.part_of:
        lw.edge(Relation.PART_OF, s.id, s.part_of, s)


_NEED = {None: NeedToUse.REQUIRE, "required": NeedToUse.REQUIRE, "optional": NeedToUse.OPTIONAL}
_PURPOSE = {
    None: PurposeOfUse.COMPATIBLE,
    "compatible": PurposeOfUse.COMPATIBLE,
    "incompatible": PurposeOfUse.INCOMPATIBLE,
}


@_lower.register
def _(s: A.UseDecl, lw: _Lowering) -> None:
    use_type = UseType(s.use_type.capitalize())
    lw.record(UseRecord(s.goal.value, s.info.value, use_type, _NEED[s.need], _PURPOSE[s.purpose], s.span), s)


@_lower.register
def _(s: A.PermissionDecl, lw: _Lowering) -> None:
    ptype = UseType(s.permission_type.capitalize())
    rec = PermissionRecord(s.id.value, s.holder.value, ptype, s.over.value, _label(s.label), s.id.span)
    lw.record(rec, s)


@_lower.register
def _(s: A.ProvisionDecl, lw: _Lowering) -> None:
    ptype = ProvisionType.CONFIDENTIAL if s.confidential else ProvisionType.NON_CONFIDENTIAL
    rec = ProvisionRecord(s.id.value, s.of.value, s.by.value, s.to.value, ptype, _label(s.label), s.id.span)
    lw.record(rec, s)


@_lower.register
def _(s: A.DelegateDecl, lw: _Lowering) -> None:
    kind = DelegationKind.GOAL if s.kind == "goal" else DelegationKind.PERMISSION
    rec = DelegationRecord(
        s.id.value, s.delegator.value, s.delegatee.value, kind, s.delegatum.value, _label(s.label), s.id.span
    )
    lw.record(rec, s)


@_lower.register
def _(s: A.AdoptDecl, lw: _Lowering) -> None:
    lw.edge(Relation.ADOPTS, s.actor, s.delegation, s)


@_lower.register
def _(s: A.TrustDecl, lw: _Lowering) -> None:
    kind = TrustKind.GOAL if s.kind == "goal" else TrustKind.PERMISSION
    level = TrustLevel.TRUST if s.level == "trust" else TrustLevel.DISTRUST
    rec = TrustRecord(
        s.id.value, s.trustor.value, s.trustee.value, kind, s.trustum.value, level, _label(s.label), s.id.span
    )
    lw.record(rec, s)


@_lower.register
def _(s: A.MonitorDecl, lw: _Lowering) -> None:
    kind = MonitorKind.GOAL if s.kind == "goal" else MonitorKind.PERMISSION
    rec = MonitorRecord(
        s.id.value, s.monitor.value, s.monitoree.value, kind, s.subject.value, _label(s.label), s.id.span
    )
    lw.record(rec, s)


@_lower.register
def _(s: A.VulnerabilityDecl, lw: _Lowering) -> None:
    lw.element(ElementKind.VULNERABILITY, s)
    for info in s.infos:
        lw.edge(Relation.IS_SUBJECT_TO, info, s.id, s)


@_lower.register
def _(s: A.ThreatDecl, lw: _Lowering) -> None:
    kind = ThreatKind.INTENTIONAL if s.kind == "intentional" else ThreatKind.INCIDENTAL
    rec = ThreatRecord(
        id=s.id.value,
        kind=kind,
        threatens=tuple(i.value for i in s.threatens),
        exploits=tuple(i.value for i in s.exploits),
        actor=_v(s.actors[0]) if s.actors else None,
        method=_v(s.methods[0]) if s.methods else None,
        probability=Level.from_letter(s.probability) if s.probability else None,
        label=_label(s.label),
        span=s.id.span,
    )
    lw.record(rec, s)
    # repeated actor/method clauses stay visible to the cardinality check
    for actor in s.actors[1:]:
        lw.edge(Relation.INTENDS, actor, s.id, s)
    for method in s.methods[1:]:
        lw.edge(Relation.INCLUDES, s.id, method, s)
    for impact in s.impacts:
        lw.record(ImpactRecord(s.id.value, impact.over.value, Level.from_letter(impact.severity), impact.span), s)


@_lower.register
def _(s: A.AttackMethodDecl, lw: _Lowering) -> None:
    lw.element(ElementKind.ATTACK_METHOD, s)


@_lower.register
def _(s: A.PrivacyGoalDecl, lw: _Lowering) -> None:
    lw.element(ElementKind.PRIVACY_GOAL, s)
    for vuln in s.mitigates:
        lw.edge(Relation.MITIGATES, s.id, vuln, s)
    for constraint in s.realized_by:
        lw.edge(Relation.REALIZED_BY, s.id, constraint, s)


@_lower.register
def _(s: A.PolicyDecl, lw: _Lowering) -> None:
    lw.element(ElementKind.PRIVACY_POLICY, s)


@_lower.register
def _(s: A.MechanismDecl, lw: _Lowering) -> None:
    rec = MechanismRecord(
        s.id.value,
        Capability(s.capability.capitalize()),
        tuple(i.value for i in s.applied_to),
        _label(s.label),
        s.id.span,
    )
    lw.record(rec, s)


@_lower.register
def _(s: A.RequirementDecl, lw: _Lowering) -> None:
    rec = RequirementRecord(
        s.id.value,
        RequirementKind(s.kind.capitalize()),
        s.concerning.value,
        tuple(i.value for i in s.interpreted_by),
        _label(s.label),
        s.id.span,
    )
    lw.record(rec, s)


@_lower.register
def _(s: A.DescribesDecl, lw: _Lowering) -> None:
    lw.edge(Relation.DESCRIBES, s.info, s.goal, s)


@_lower.register
def _(s: A.SituationDecl, lw: _Lowering) -> None:
    lw.element(ElementKind.SITUATION, s)
    for info, level in s.determines:
        lw.edge(Relation.DETERMINES, s.id, info, s, level=Sensitivity.from_letter(level))


def default_model_name(tree: A.Ast) -> str:
    if tree.model_name is not None:
        return tree.model_name
    if tree.file.startswith("<"):
        return ""
    return PurePath(tree.file).stem


def lower(tree: A.Ast, diagnostics: Iterable[Diagnostic] = ()) -> ModelGraph:
    """Build and finalize the model described by ``tree``.

    ``diagnostics`` are earlier (lexer/parser) problems; they are merged with
    any model errors and raised together as a :class:`DiagnosticError`.
    """
    pending = list(diagnostics)
    builder = ModelBuilder(default_model_name(tree))
    lw = _Lowering(builder)
    for stmt in tree.statements:
        _lower(stmt, lw)
    try:
        graph = builder.finalize()
    except DiagnosticError as exc:
        raise DiagnosticError(pending + exc.diagnostics) from None
    if pending:
        raise DiagnosticError(pending)
    return graph
