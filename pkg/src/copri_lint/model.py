"""Typed model graph: elements, reified records, plain edges, and the builder that produces it.

A model is assembled with :class:`ModelBuilder` and frozen with
:meth:`ModelBuilder.finalize`.  Validation is deferred to ``finalize`` so one
run reports every problem at once.  The resulting :class:`ModelGraph` is
immutable and indexed for the closure queries the checkers rely on.
"""

from __future__ import annotations

import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

from .diagnostics import Diagnostic, DiagnosticError, SourceSpan, error
from .schema import (
    ACTOR,
    DelegationKind,
    ElementKind,
    Capability,
    Level,
    MonitorKind,
    NeedToUse,
    NodeKind,
    PermissionType,
    ProvisionType,
    PurposeOfUse,
    RecordKind,
    Relation,
    RequirementKind,
    Sensitivity,
    ThreatKind,
    TrustKind,
    TrustLevel,
    UseType,
)

ID_PATTERN = re.compile(r"[A-Za-z0-9_]+")

_SPAN = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Element:
    id: str
    kind: ElementKind
    label: str = ""
    sensitivity: Sensitivity | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class Edge:
    relation: Relation
    source: str
    target: str
    # only meaningful for ``determines``
    level: Sensitivity | None = None
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class UseRecord:
    goal: str
    info: str
    type_of_use: UseType
    need_to_use: NeedToUse = NeedToUse.REQUIRE
    purpose_of_use: PurposeOfUse = PurposeOfUse.COMPATIBLE
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class PermissionRecord:
    id: str
    holder: str
    permission_type: PermissionType
    over: str
    label: str = ""
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class ProvisionRecord:
    id: str
    of: str
    by: str
    to: str
    provision_type: ProvisionType
    label: str = ""
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class DelegationRecord:
    id: str
    delegator: str
    delegatee: str
    kind: DelegationKind
    delegatum: str
    label: str = ""
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class TrustRecord:
    id: str
    trustor: str
    trustee: str
    kind: TrustKind
    trustum: str
    level: TrustLevel
    label: str = ""
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class MonitorRecord:
    id: str
    monitor: str
    monitoree: str
    kind: MonitorKind
    subject: str
    label: str = ""
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class ThreatRecord:
    """Declares a threat element; its relations become edges at finalize."""

    id: str
    kind: ThreatKind
    threatens: tuple[str, ...] = ()
    exploits: tuple[str, ...] = ()
    actor: str | None = None
    method: str | None = None
    probability: Level | None = None
    label: str = ""
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class ImpactRecord:
    threat: str
    over: str
    severity: Level
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class RequirementRecord:
    id: str
    kind: RequirementKind
    concerning: str
    interpreted_by: tuple[str, ...] = ()
    label: str = ""
    span: SourceSpan | None = field(**_SPAN)


@dataclass(frozen=True, slots=True)
class MechanismRecord:
    id: str
    capability: Capability
    applied_to: tuple[str, ...] = ()
    label: str = ""
    span: SourceSpan | None = field(**_SPAN)


Record = Union[
    UseRecord,
    PermissionRecord,
    ProvisionRecord,
    DelegationRecord,
    TrustRecord,
    MonitorRecord,
    ThreatRecord,
    ImpactRecord,
    RequirementRecord,
    MechanismRecord,
]

# records with their own identity that are not elements
IDENTIFIED_RECORDS: dict[type, RecordKind] = {
    PermissionRecord: RecordKind.PERMISSION,
    ProvisionRecord: RecordKind.PROVISION,
    DelegationRecord: RecordKind.DELEGATION,
    TrustRecord: RecordKind.TRUST,
    MonitorRecord: RecordKind.MONITOR,
}

# (record type, field) -> (property, side): the field value must belong to that
# side ("domain" or "range") of the property's signature.
RECORD_FIELD_PROPERTIES: dict[tuple[type, str], tuple[str, str]] = {
    (UseRecord, "goal"): ("usedBy", "domain"),
    (UseRecord, "info"): ("usedOf", "range"),
    (PermissionRecord, "holder"): ("hasPermission", "domain"),
    (PermissionRecord, "over"): ("over", "range"),
    (ProvisionRecord, "of"): ("provisionOf", "range"),
    (ProvisionRecord, "by"): ("provideBy", "domain"),
    (ProvisionRecord, "to"): ("provideTo", "range"),
    (DelegationRecord, "delegator"): ("delegator", "domain"),
    (DelegationRecord, "delegatee"): ("delegatee", "range"),
    (TrustRecord, "trustor"): ("trustor", "domain"),
    (TrustRecord, "trustee"): ("trustee", "range"),
    (MonitorRecord, "monitor"): ("monitor", "domain"),
    (MonitorRecord, "monitoree"): ("monitoree", "range"),
    (ImpactRecord, "threat"): ("hasImpact", "domain"),
    (ImpactRecord, "over"): ("impactOver", "range"),
}

# Subject fields whose property depends on the record's kind discriminator.
SUBJECT_PROPERTIES: dict[object, tuple[str, str]] = {
    DelegationKind.GOAL: ("delegatum", "goalDelegatum"),
    DelegationKind.PERMISSION: ("delegatum", "perm.Delegatum"),
    TrustKind.GOAL: ("trustum", "goalTrustum"),
    TrustKind.PERMISSION: ("trustum", "perm.Trustum"),
    MonitorKind.GOAL: ("subject", "ofGoal"),
    MonitorKind.PERMISSION: ("subject", "ofPermission"),
}

_GOAL_SUBJECT = frozenset({DelegationKind.GOAL, TrustKind.GOAL, MonitorKind.GOAL})


def record_references(record: Record) -> Iterator[tuple[str, str]]:
    """Yield ``(field name, referenced id)`` for every reference a record makes."""
    if isinstance(record, (ThreatRecord, RequirementRecord, MechanismRecord)):
        # these expand into edges; references are checked there
        return
    for (rtype, fname), _ in RECORD_FIELD_PROPERTIES.items():
        if rtype is type(record):
            yield fname, getattr(record, fname)
    kind = getattr(record, "kind", None)
    if kind in SUBJECT_PROPERTIES:
        fname, _ = SUBJECT_PROPERTIES[kind]
        yield fname, getattr(record, fname)


def record_id(record: Record) -> str | None:
    return getattr(record, "id", None)


class UnknownElementError(KeyError):
    """A query named an id that is not in the graph, or not of the expected kind."""


class MultipleOwnersError(ValueError):
    pass


@dataclass(slots=True)
class _Staged:
    item: object
    ref_spans: Mapping[str, SourceSpan]


class ModelBuilder:
    """Single-owner staging area for a model. Nothing is validated until :meth:`finalize`."""

    def __init__(self, name: str = "") -> None:
        self.name = name
        self._items: list[_Staged] = []
        self._finalized = False

    def _stage(self, item: object, ref_spans: Mapping[str, SourceSpan] | None) -> ModelBuilder:
        if self._finalized:
            raise RuntimeError("builder already finalized")
        self._items.append(_Staged(item, dict(ref_spans or {})))
        return self

    def add_element(
        self,
        kind: ElementKind,
        id: str,
        label: str = "",
        *,
        sensitivity: Sensitivity | None = None,
        span: SourceSpan | None = None,
    ) -> ModelBuilder:
        return self._stage(Element(id, ElementKind(kind), label, sensitivity, span), None)

    def add_edge(
        self,
        relation: Relation,
        source: str,
        target: str,
        *,
        level: Sensitivity | None = None,
        span: SourceSpan | None = None,
        ref_spans: Mapping[str, SourceSpan] | None = None,
    ) -> ModelBuilder:
        return self._stage(Edge(Relation(relation), source, target, level, span), ref_spans)

    def add_record(self, record: Record, *, ref_spans: Mapping[str, SourceSpan] | None = None) -> ModelBuilder:
        return self._stage(record, ref_spans)

    def finalize(self) -> ModelGraph:
        """Validate everything staged and return the frozen graph.

        Raises :class:`DiagnosticError` carrying all problems found.
        """
        self._finalized = True
        return _Finalizer(self.name, self._items).run()


def finalize(builder: ModelBuilder) -> ModelGraph:
    return builder.finalize()


def _threat_edges(t: ThreatRecord) -> Iterator[Edge]:
    for info in t.threatens:
        yield Edge(Relation.THREATEN, t.id, info, span=t.span)
    for vuln in t.exploits:
        yield Edge(Relation.EXPLOITS, t.id, vuln, span=t.span)
    if t.actor:
        yield Edge(Relation.INTENDS, t.actor, t.id, span=t.span)
    if t.method:
        yield Edge(Relation.INCLUDES, t.id, t.method, span=t.span)


def _derived_edges(item: object) -> list[Edge]:
    if isinstance(item, ThreatRecord):
        return list(_threat_edges(item))
    if isinstance(item, RequirementRecord):
        edges = [Edge(Relation.CONCERNING, item.id, item.concerning, span=item.span)]
        edges += [Edge(Relation.INTERPRETED_BY, item.id, g, span=item.span) for g in item.interpreted_by]
        return edges
    if isinstance(item, MechanismRecord):
        return [Edge(Relation.APPLIED_TO, item.id, i, span=item.span) for i in item.applied_to]
    return []


class _Finalizer:
    def __init__(self, name: str, items: list[_Staged]) -> None:
        self.name = name
        self.items = items
        self.diagnostics: list[Diagnostic] = []
        self.kinds: dict[str, NodeKind] = {}
        self.decl_spans: dict[str, SourceSpan | None] = {}
        self.elements: dict[str, Element] = {}
        self.records_by_id: dict[str, Record] = {}

    def report(self, code: str, message: str, span: SourceSpan | None, related=()) -> None:
        self.diagnostics.append(error(code, message, span, related))

    def declare(self, ident: str, kind: NodeKind, span: SourceSpan | None) -> bool:
        if not ident or not ID_PATTERN.fullmatch(ident):
            self.report("InvalidId", f"invalid identifier {ident!r}", span)
            return False
        if ident in self.kinds:
            first = self.decl_spans[ident]
            where = f" (first declared at {first})" if first else ""
            self.report("DuplicateId", f"duplicate id '{ident}'{where}", span, [first] if first else [])
            return False
        self.kinds[ident] = kind
        self.decl_spans[ident] = span
        return True

    def ref_span(self, staged: _Staged, ident: str) -> SourceSpan | None:
        return staged.ref_spans.get(ident) or getattr(staged.item, "span", None)

    def run(self) -> ModelGraph:
        edges: list[tuple[Edge, _Staged]] = []
        records: list[tuple[Record, _Staged]] = []

        # pass 1: declarations
        for staged in self.items:
            item = staged.item
            if isinstance(item, Element):
                if self.declare(item.id, item.kind, item.span):
                    self.elements[item.id] = item
            elif isinstance(item, Edge):
                edges.append((item, staged))
            else:
                records.append((item, staged))
                kind = self._element_kind_of(item)
                if kind is not None:
                    if self.declare(item.id, kind, item.span):
                        self.elements[item.id] = Element(item.id, kind, item.label, None, item.span)
                        self.records_by_id[item.id] = item
                elif type(item) in IDENTIFIED_RECORDS:
                    if self.declare(item.id, IDENTIFIED_RECORDS[type(item)], item.span):
                        self.records_by_id[item.id] = item
                for edge in _derived_edges(item):
                    edges.append((edge, staged))

        # pass 2: references
        for edge, staged in edges:
            for ident in (edge.source, edge.target):
                self._resolve(ident, staged, f"{edge.relation.value} edge")
            if edge.relation is Relation.DETERMINES and edge.level is None:
                self.report("MissingAttribute", f"situation '{edge.source}' determines no level", edge.span)
        for record, staged in records:
            what = type(record).__name__.removesuffix("Record").lower()
            for fname, ident in record_references(record):
                self._resolve(ident, staged, f"{what} {fname}")
            self._check_subject_kind(record, staged)

        self._check_threats([r for r, _ in records if isinstance(r, ThreatRecord)], edges, records)
        self._check_owners(edges)

        if self.diagnostics:
            raise DiagnosticError(self.diagnostics)
        return ModelGraph(
            self.name,
            self.elements,
            [r for r, _ in records],
            [e for e, _ in edges],
            self.kinds,
        )

    @staticmethod
    def _element_kind_of(item: object) -> ElementKind | None:
        if isinstance(item, ThreatRecord):
            return ThreatKind(item.kind).element_kind
        if isinstance(item, RequirementRecord):
            return ElementKind.PRIVACY_REQUIREMENT
        if isinstance(item, MechanismRecord):
            return ElementKind.PRIVACY_MECHANISM
        return None

    def _resolve(self, ident: str | None, staged: _Staged, what: str) -> bool:
        if not ident:
            self.report("MissingAttribute", f"{what} is missing", getattr(staged.item, "span", None))
            return False
        if ident not in self.kinds:
            self.report("UnresolvedReference", f"{what} refers to undeclared id '{ident}'", self.ref_span(staged, ident))
            return False
        return True

    def _check_subject_kind(self, record: Record, staged: _Staged) -> None:
        kind = getattr(record, "kind", None)
        if kind not in SUBJECT_PROPERTIES:
            return
        fname, _ = SUBJECT_PROPERTIES[kind]
        ident = getattr(record, fname)
        actual = self.kinds.get(ident)
        if actual is None:
            return
        expected = ElementKind.GOAL if kind in _GOAL_SUBJECT else RecordKind.PERMISSION
        if actual is not expected:
            self.report(
                "KindMismatch",
                f"{kind.value} '{record.id}' needs a {expected.value} as {fname}, "
                f"but '{ident}' is a {actual.value}",
                self.ref_span(staged, ident),
            )

    def _check_threats(self, threats: list[ThreatRecord], edges, records) -> None:
        intended = {e.target for e, _ in edges if e.relation is Relation.INTENDS}
        with_method = {e.source for e, _ in edges if e.relation is Relation.INCLUDES}
        impacted = {r.threat for r, _ in records if isinstance(r, ImpactRecord)}
        for t in threats:
            def missing(what: str) -> None:
                self.report("MissingAttribute", f"threat '{t.id}' has no {what}", t.span)

            def forbidden(what: str) -> None:
                self.report("InvalidAttribute", f"{t.kind.value.lower()} threat '{t.id}' cannot have {what}", t.span)

            if not t.threatens:
                missing("threatened information")
            if t.id not in impacted:
                missing("impact")
            if t.kind is ThreatKind.INTENTIONAL:
                if t.id not in intended:
                    missing("threat actor")
                if t.id not in with_method:
                    missing("attack method")
                if t.probability is not None:
                    forbidden("a probability")
            else:
                if t.probability is None:
                    missing("probability")
                # stray intends/includes edges are left to the signature check
                if t.actor:
                    forbidden("a threat actor")
                if t.method:
                    forbidden("an attack method")

    def _check_owners(self, edges) -> None:
        owners: dict[str, dict[str, SourceSpan | None]] = defaultdict(dict)
        for edge, _ in edges:
            if edge.relation is Relation.OWN:
                owners[edge.target].setdefault(edge.source, edge.span)
        for info, by in owners.items():
            if len(by) > 1:
                spans = [s for s in by.values() if s]
                self.report(
                    "MultipleOwners",
                    f"information '{info}' has {len(by)} owners: {', '.join(sorted(by))}",
                    spans[-1] if spans else None,
                    spans[:-1],
                )


def _freeze(index: Mapping) -> Mapping:
    return MappingProxyType({k: tuple(v) for k, v in index.items()})


class ModelGraph:
    """Immutable, indexed model. Build it with :class:`ModelBuilder`."""

    __slots__ = (
        "name",
        "elements",
        "edges",
        "uses",
        "permissions",
        "provisions",
        "delegations",
        "trusts",
        "monitors",
        "threats",
        "impacts",
        "requirements",
        "mechanisms",
        "records_by_id",
        "_kinds",
        "_by_kind",
        "_out",
        "_in",
        "_by_relation",
        "_perms_by_holder",
    )

    def __init__(
        self,
        name: str,
        elements: Mapping[str, Element],
        records: Iterable[Record],
        edges: Iterable[Edge],
        kinds: Mapping[str, NodeKind],
    ) -> None:
        records = list(records)
        set_ = object.__setattr__
        set_(self, "name", name)
        set_(self, "elements", MappingProxyType(dict(elements)))
        set_(self, "edges", tuple(edges))
        set_(self, "_kinds", MappingProxyType(dict(kinds)))

        def of(t):
            return tuple(r for r in records if isinstance(r, t))

        set_(self, "uses", of(UseRecord))
        set_(self, "permissions", of(PermissionRecord))
        set_(self, "provisions", of(ProvisionRecord))
        set_(self, "delegations", of(DelegationRecord))
        set_(self, "trusts", of(TrustRecord))
        set_(self, "monitors", of(MonitorRecord))
        set_(self, "threats", of(ThreatRecord))
        set_(self, "impacts", of(ImpactRecord))
        set_(self, "requirements", of(RequirementRecord))
        set_(self, "mechanisms", of(MechanismRecord))
        set_(self, "records_by_id", MappingProxyType({r.id: r for r in records if record_id(r) is not None}))

        by_kind: dict[ElementKind, list[str]] = defaultdict(list)
        for el in self.elements.values():
            by_kind[el.kind].append(el.id)
        out: dict[tuple[Relation, str], list[str]] = defaultdict(list)
        inc: dict[tuple[Relation, str], list[str]] = defaultdict(list)
        by_rel: dict[Relation, list[Edge]] = defaultdict(list)
        for e in self.edges:
            out[e.relation, e.source].append(e.target)
            inc[e.relation, e.target].append(e.source)
            by_rel[e.relation].append(e)
        perms: dict[str, list[PermissionRecord]] = defaultdict(list)
        for p in self.permissions:
            perms[p.holder].append(p)
        set_(self, "_by_kind", _freeze(by_kind))
        set_(self, "_out", _freeze(out))
        set_(self, "_in", _freeze(inc))
        set_(self, "_by_relation", _freeze(by_rel))
        set_(self, "_perms_by_holder", _freeze(perms))

    def __setattr__(self, name, value):
        raise AttributeError("ModelGraph is immutable")

    def __delattr__(self, name):
        raise AttributeError("ModelGraph is immutable")

    def __repr__(self) -> str:
        return f"ModelGraph({self.name!r}, {len(self.elements)} elements, {len(self.edges)} edges)"

    def __contains__(self, ident: object) -> bool:
        return ident in self._kinds

    def kind_of(self, ident: str) -> NodeKind | None:
        return self._kinds.get(ident)

    def ids(self) -> Iterable[str]:
        return self._kinds.keys()

    def of_kind(self, *kinds: ElementKind) -> list[str]:
        result: list[str] = []
        for k in kinds:
            result.extend(self._by_kind.get(k, ()))
        return result

    def successors(self, relation: Relation, ident: str) -> tuple[str, ...]:
        return self._out.get((relation, ident), ())

    def predecessors(self, relation: Relation, ident: str) -> tuple[str, ...]:
        return self._in.get((relation, ident), ())

    def edges_of(self, relation: Relation) -> tuple[Edge, ...]:
        return self._by_relation.get(relation, ())

    def permissions_held_by(self, holder: str) -> tuple[PermissionRecord, ...]:
        return self._perms_by_holder.get(holder, ())

    def sensitivity_of(self, info: str) -> Sensitivity | None:
        el = self.elements.get(info)
        return el.sensitivity if el else None

    def is_personal(self, ident: str) -> bool:
        return self._kinds.get(ident) is ElementKind.PERSONAL_INFORMATION

    def is_actor(self, ident: str) -> bool:
        return self._kinds.get(ident) in ACTOR


def _require(graph: ModelGraph, ident: str, kinds=None) -> NodeKind:
    kind = graph.kind_of(ident)
    if kind is None:
        raise UnknownElementError(ident)
    if kinds is not None and kind not in kinds:
        raise UnknownElementError(f"{ident} is a {kind.value}, expected {sorted(k.value for k in kinds)}")
    return kind


def _reach(graph: ModelGraph, relation: Relation, starts: Iterable[str], forward: bool = True) -> set[str]:
    step = graph.successors if forward else graph.predecessors
    seen = set(starts)
    queue = deque(seen)
    while queue:
        node = queue.popleft()
        for nxt in step(relation, node):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def role_closure(graph: ModelGraph, actor: str) -> frozenset[str]:
    """Roles an actor plays, directly or through specialization.

    For an agent: roles reached by one ``plays`` edge then any number of
    ``is_a`` edges.  For a role: the role itself and its ``is_a`` ancestors.
    """
    kind = _require(graph, actor, ACTOR)
    if kind is ElementKind.ROLE:
        return frozenset(_reach(graph, Relation.IS_A, [actor]))
    return frozenset(_reach(graph, Relation.IS_A, graph.successors(Relation.PLAYS, actor)))


def transitive_parts(graph: ModelGraph, info: str) -> frozenset[str]:
    """``info`` together with everything that is (transitively) part of it."""
    _require(graph, info)
    return frozenset(_reach(graph, Relation.PART_OF, [info], forward=False))


def owner_of(graph: ModelGraph, info: str) -> str | None:
    _require(graph, info)
    owners = sorted(set(graph.predecessors(Relation.OWN, info)))
    if len(owners) > 1:
        raise MultipleOwnersError(f"{info} has owners {owners}")
    return owners[0] if owners else None


def effective_permissions(
    graph: ModelGraph, actor: str, *, parts_inherit: bool = False
) -> frozenset[tuple[UseType, str]]:
    """All ``(permission type, information)`` pairs an actor may exercise.

    Covers permissions held by the actor or any role in its role closure, plus
    every permission type over information owned by any of them.  With
    ``parts_inherit`` a permission over a composite also covers its parts.
    """
    holders = {actor} | role_closure(graph, actor)
    granted: set[tuple[UseType, str]] = set()
    for h in holders:
        for p in graph.permissions_held_by(h):
            granted.add((p.permission_type, p.over))
        for info in graph.successors(Relation.OWN, h):
            granted.update((t, info) for t in UseType)
    if parts_inherit:
        granted = {(t, part) for t, info in granted for part in transitive_parts(graph, info)}
    return frozenset(granted)
