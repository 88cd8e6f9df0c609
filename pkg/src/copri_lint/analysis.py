"""Competency-question checks and queries over a well-formed model graph.

Every check is a pure function ``graph -> list[Finding]``.  Violation checks
report privacy problems; query checks (CQ3 to CQ15) list matching rows and never
count as violations.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from functools import partial
from typing import Callable, Iterable, Sequence

from .model import ModelGraph, effective_permissions, owner_of, role_closure
from .schema import (
    ACTOR,
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


class FindingKind(str, Enum):
    DESIGN_SMELL = "DesignSmell"
    DISCLOSURE = "Disclosure"
    IDENTIFIABILITY = "Identifiability"
    LINKABILITY = "Linkability"
    OBSERVABILITY = "Observability"
    UNNOTIFIED = "Unnotified"
    UNTRANSPARENT = "Untransparent"
    UNACCOUNTABLE = "Unaccountable"
    QUERY_ROW = "QueryRow"


class CheckId(str, Enum):
    CQ1 = "CQ1"
    CQ2 = "CQ2"
    CQ3 = "CQ3"
    CQ4 = "CQ4"
    CQ5 = "CQ5"
    CQ6 = "CQ6"
    CQ7 = "CQ7"
    CQ8 = "CQ8"
    CQ9 = "CQ9"
    CQ10 = "CQ10"
    CQ11 = "CQ11"
    CQ12 = "CQ12"
    CQ13 = "CQ13"
    CQ14 = "CQ14"
    CQ15 = "CQ15"
    CQ16 = "CQ16"
    CQ17 = "CQ17"
    CQ18 = "CQ18"
    CQ19 = "CQ19"
    CQ20 = "CQ20"
    CQ21 = "CQ21"
    CQ22 = "CQ22"
    CQ23 = "CQ23"
    CQ24 = "CQ24"
    CQ25 = "CQ25"
    CQ26 = "CQ26"

    @property
    def number(self) -> int:
        return int(self.value[2:])

    @property
    def kind(self) -> FindingKind:
        return CHECK_KINDS[self]

    @property
    def slug(self) -> str:
        return CHECK_SLUGS[self]

    @property
    def is_violation(self) -> bool:
        return self.kind is not FindingKind.QUERY_ROW


_K = FindingKind
CHECK_KINDS: dict[CheckId, FindingKind] = {
    CheckId.CQ1: _K.DESIGN_SMELL,
    CheckId.CQ2: _K.DESIGN_SMELL,
    **{CheckId(f"CQ{n}"): _K.QUERY_ROW for n in range(3, 16)},
    CheckId.CQ16: _K.DISCLOSURE,
    CheckId.CQ17: _K.DISCLOSURE,
    CheckId.CQ18: _K.DISCLOSURE,
    CheckId.CQ19: _K.DISCLOSURE,
    CheckId.CQ20: _K.IDENTIFIABILITY,
    CheckId.CQ21: _K.LINKABILITY,
    CheckId.CQ22: _K.OBSERVABILITY,
    CheckId.CQ23: _K.UNNOTIFIED,
    CheckId.CQ24: _K.UNTRANSPARENT,
    CheckId.CQ25: _K.UNTRANSPARENT,
    CheckId.CQ26: _K.UNACCOUNTABLE,
}

CHECK_SLUGS: dict[CheckId, str] = {
    CheckId.CQ1: "trustless-permission-delegation",
    CheckId.CQ2: "redundant-monitoring",
    CheckId.CQ3: "by-sensitivity",
    CheckId.CQ4: "vulnerable-information",
    CheckId.CQ5: "exploiting-threats",
    CheckId.CQ6: "unmitigated-vulnerabilities",
    CheckId.CQ7: "threatened-information",
    CheckId.CQ8: "threats-by-severity",
    CheckId.CQ9: "intentional-threats",
    CheckId.CQ10: "threat-actors",
    CheckId.CQ11: "attack-methods",
    CheckId.CQ12: "incidental-threats",
    CheckId.CQ13: "threats-by-probability",
    CheckId.CQ14: "realized-privacy-goals",
    CheckId.CQ15: "applied-mechanisms",
    CheckId.CQ16: "nondisclosure-read",
    CheckId.CQ17: "confidential-provision",
    CheckId.CQ18: "need-to-know",
    CheckId.CQ19: "purpose-of-use",
    CheckId.CQ20: "anonymity",
    CheckId.CQ21: "unlinkability",
    CheckId.CQ22: "unobservability",
    CheckId.CQ23: "notice",
    CheckId.CQ24: "authentication",
    CheckId.CQ25: "authorization",
    CheckId.CQ26: "non-repudiation",
}

RISK_CHECKS = tuple(CheckId(f"CQ{n}") for n in range(4, 14))
TREATMENT_CHECKS = (CheckId.CQ14, CheckId.CQ15)
VIOLATION_CHECKS = tuple(c for c in CheckId if c.is_violation)


class AnalysisError(ValueError):
    pass


class UnknownCheckId(AnalysisError):
    def __init__(self, token: str) -> None:
        super().__init__(f"unknown check id: {token!r}")
        self.token = token


class FilterRequired(AnalysisError):
    pass


class FilterNotApplicable(AnalysisError):
    pass


@dataclass(frozen=True, slots=True)
class Finding:
    check: CheckId
    kind: FindingKind
    elements: tuple[str, ...]
    message: str

    def __post_init__(self) -> None:
        if not self.elements:
            raise ValueError("a finding must involve at least one element")
        if CHECK_KINDS[self.check] is not self.kind:
            raise ValueError(f"{self.check.value} findings have kind {CHECK_KINDS[self.check].value}")

    @property
    def is_violation(self) -> bool:
        return self.kind is not FindingKind.QUERY_ROW

    @property
    def sort_key(self) -> tuple:
        return (self.check.number, self.elements, self.message)

    def __str__(self) -> str:
        return f"{self.check.value} {self.kind.value}: {self.message} [{', '.join(self.elements)}]"

    def to_dict(self) -> dict:
        return {
            "check": self.check.value,
            "kind": self.kind.value,
            "elements": list(self.elements),
            "message": self.message,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Finding:
        return cls(CheckId(data["check"]), FindingKind(data["kind"]), tuple(data["elements"]), data["message"])


def finding(check: CheckId, elements: Sequence[str], message: str) -> Finding:
    return Finding(check, CHECK_KINDS[check], tuple(elements), message)


def sort_findings(findings: Iterable[Finding]) -> list[Finding]:
    return sorted(findings, key=lambda f: f.sort_key)


# shared helpers ------------------------------------------------------------


def goal_actors(graph: ModelGraph, goal: str) -> frozenset[str]:
    """Actors pursuing ``goal``.

    A goal with ``aims`` edges belongs to their sources.  A subgoal without
    any inherits the actors of the goals it decomposes.
    """
    seen: set[str] = set()
    stack = [goal]
    actors: set[str] = set()
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        direct = graph.predecessors(Relation.AIMS, g)
        if direct:
            actors.update(direct)
            continue
        stack.extend(graph.predecessors(Relation.AND_DECOMPOSED, g))
        stack.extend(graph.predecessors(Relation.OR_DECOMPOSED, g))
    return frozenset(actors)


class _Cache:
    """Per-run memo of actor lookups; never shared across threads."""

    def __init__(self, graph: ModelGraph, parts_inherit: bool) -> None:
        self.graph = graph
        self.parts_inherit = parts_inherit
        self._actors: dict[str, frozenset[str]] = {}
        self._perms: dict[str, frozenset] = {}

    def actors(self, goal: str) -> frozenset[str]:
        if goal not in self._actors:
            self._actors[goal] = goal_actors(self.graph, goal)
        return self._actors[goal]

    def perms(self, actor: str) -> frozenset:
        if actor not in self._perms:
            self._perms[actor] = effective_permissions(self.graph, actor, parts_inherit=self.parts_inherit)
        return self._perms[actor]


def _unpermitted_uses(
    graph: ModelGraph, check: CheckId, types: frozenset[UseType], parts_inherit: bool
) -> list[Finding]:
    cache = _Cache(graph, parts_inherit)
    out = []
    for use in graph.uses:
        if use.type_of_use not in types or not graph.is_personal(use.info):
            continue
        for actor in sorted(cache.actors(use.goal)):
            if (use.type_of_use, use.info) not in cache.perms(actor):
                verb = use.type_of_use.value.lower()
                out.append(
                    finding(
                        check,
                        [actor, use.goal, use.info],
                        f"'{actor}' uses '{use.info}' ({verb}) for goal '{use.goal}' without {verb} permission",
                    )
                )
    return sort_findings(out)


# design smells ---------------------------------------------------------------


def _trust_and_monitor(graph: ModelGraph, delegation) -> tuple[bool, bool]:
    key = (delegation.delegator, delegation.delegatee, delegation.delegatum)
    trusted = any(
        t.kind is TrustKind.PERMISSION and t.level is TrustLevel.TRUST and (t.trustor, t.trustee, t.trustum) == key
        for t in graph.trusts
    )
    monitored = any(
        m.kind is MonitorKind.PERMISSION and (m.monitor, m.monitoree, m.subject) == key for m in graph.monitors
    )
    return trusted, monitored


def cq1_trustless_permission_delegation(graph: ModelGraph) -> list[Finding]:
    out = []
    for d in graph.delegations:
        if d.kind is DelegationKind.PERMISSION and _trust_and_monitor(graph, d) == (False, False):
            out.append(finding(CheckId.CQ1, [d.id], "permission delegated without trust or monitoring"))
    return sort_findings(out)


def cq2_redundant_monitoring(graph: ModelGraph) -> list[Finding]:
    out = []
    for d in graph.delegations:
        if d.kind is DelegationKind.PERMISSION and _trust_and_monitor(graph, d) == (True, True):
            out.append(finding(CheckId.CQ2, [d.id], "monitoring of a trusted permission delegation is not required"))
    return sort_findings(out)


# queries ---------------------------------------------------------------------


def cq3_by_sensitivity(graph: ModelGraph, level: Sensitivity | None = None) -> list[Finding]:
    """Personal information by declared sensitivity; all levels when ``level`` is None."""
    out = []
    for info in graph.of_kind(ElementKind.PERSONAL_INFORMATION):
        declared = graph.sensitivity_of(info)
        if declared is not None and (level is None or declared is level):
            out.append(finding(CheckId.CQ3, [info], f"'{info}' has sensitivity {declared.value}"))
    return sort_findings(out)


def _edge_rows(graph: ModelGraph, check: CheckId, relation: Relation, message: str, flip: bool = False, where=None):
    rows = []
    for e in graph.edges_of(relation):
        if where is not None and not where(e):
            continue
        pair = (e.target, e.source) if flip else (e.source, e.target)
        rows.append(finding(check, pair, message.format(*pair)))
    return rows


def _threat_kind(graph: ModelGraph, kind: ThreatKind):
    element_kind = kind.element_kind
    return lambda e: graph.kind_of(e.source) is element_kind


def _risk_rows(graph: ModelGraph, check: CheckId, level: Level | None) -> list[Finding]:
    if check is CheckId.CQ4:
        return _edge_rows(graph, check, Relation.IS_SUBJECT_TO, "'{1}' makes '{0}' vulnerable", flip=True)
    if check is CheckId.CQ5:
        return _edge_rows(graph, check, Relation.EXPLOITS, "'{1}' exploits '{0}'", flip=True)
    if check is CheckId.CQ6:
        rows = []
        for v in graph.of_kind(ElementKind.VULNERABILITY):
            mitigators = [
                g for g in graph.predecessors(Relation.MITIGATES, v) if graph.kind_of(g) is ElementKind.PRIVACY_GOAL
            ]
            if not mitigators:
                rows.append(finding(check, [v], f"'{v}' is not mitigated by any privacy goal"))
        return rows
    if check is CheckId.CQ7:
        return _edge_rows(graph, check, Relation.THREATEN, "'{0}' threatens '{1}'")
    if check is CheckId.CQ8:
        threats = sorted({i.threat for i in graph.impacts if i.severity is level})
        return [finding(check, [t], f"'{t}' has impact severity {level.value}") for t in threats]
    if check is CheckId.CQ9:
        where = _threat_kind(graph, ThreatKind.INTENTIONAL)
        return _edge_rows(graph, check, Relation.THREATEN, "intentional threat '{0}' threatens '{1}'", where=where)
    if check is CheckId.CQ10:
        return _edge_rows(graph, check, Relation.INTENDS, "'{0}' intends '{1}'")
    if check is CheckId.CQ11:
        return _edge_rows(graph, check, Relation.INCLUDES, "'{0}' is used by '{1}'", flip=True)
    if check is CheckId.CQ12:
        where = _threat_kind(graph, ThreatKind.INCIDENTAL)
        return _edge_rows(graph, check, Relation.THREATEN, "incidental threat '{0}' threatens '{1}'", where=where)
    if check is CheckId.CQ13:
        return [
            finding(check, [t.id], f"'{t.id}' has probability {level.value}")
            for t in graph.threats
            if t.kind is ThreatKind.INCIDENTAL and t.probability is level
        ]
    raise AnalysisError(f"{check.value} is not a risk query")


def risk_query(graph: ModelGraph, kind: CheckId | str, level: Level | None = None) -> list[Finding]:
    """Run one of the risk queries CQ4 to CQ13.

    CQ8 (severity) and CQ13 (probability) need ``level``; the others reject it.
    """
    check = CheckId(kind)
    if check not in RISK_CHECKS:
        raise AnalysisError(f"{check.value} is not a risk query")
    filtered = check in (CheckId.CQ8, CheckId.CQ13)
    if filtered and level is None:
        raise FilterRequired(f"{check.value} needs a level filter")
    if not filtered and level is not None:
        raise FilterNotApplicable(f"{check.value} takes no filter")
    return sort_findings(_risk_rows(graph, check, level))


def treatment_query(graph: ModelGraph, kind: CheckId | str) -> list[Finding]:
    check = CheckId(kind)
    if check is CheckId.CQ14:
        rows = [
            finding(check, [g], f"'{g}' is realized by {', '.join(sorted(set(graph.successors(Relation.REALIZED_BY, g))))}")
            for g in graph.of_kind(ElementKind.PRIVACY_GOAL)
            if graph.successors(Relation.REALIZED_BY, g)
        ]
    elif check is CheckId.CQ15:
        rows = _edge_rows(graph, check, Relation.APPLIED_TO, "'{0}' is applied to '{1}'")
    else:
        raise AnalysisError(f"{check.value} is not a treatment query")
    return sort_findings(rows)


# confidentiality -------------------------------------------------------------


def cq16_nondisclosure_read(graph: ModelGraph, *, parts_inherit: bool = False) -> list[Finding]:
    return _unpermitted_uses(graph, CheckId.CQ16, frozenset({UseType.READ}), parts_inherit)


def cq17_confidential_provision(graph: ModelGraph) -> list[Finding]:
    out = [
        finding(CheckId.CQ17, [p.id], f"'{p.of}' is provided by '{p.by}' to '{p.to}' by non-confidential means")
        for p in graph.provisions
        if p.provision_type is ProvisionType.NON_CONFIDENTIAL and graph.is_personal(p.of)
    ]
    return sort_findings(out)


def cq18_need_to_know(graph: ModelGraph) -> list[Finding]:
    out = [
        finding(
            CheckId.CQ18,
            [u.goal, u.info],
            f"goal '{u.goal}' uses '{u.info}' ({u.type_of_use.value.lower()}) although it is not required",
        )
        for u in graph.uses
        if u.need_to_use is NeedToUse.OPTIONAL and graph.is_personal(u.info)
    ]
    return sort_findings(out)


def cq19_purpose_of_use(graph: ModelGraph) -> list[Finding]:
    out = [
        finding(
            CheckId.CQ19,
            [u.goal, u.info],
            f"goal '{u.goal}' uses '{u.info}' ({u.type_of_use.value.lower()}) for an incompatible purpose",
        )
        for u in graph.uses
        if u.purpose_of_use is PurposeOfUse.INCOMPATIBLE and graph.is_personal(u.info)
    ]
    return sort_findings(out)


# anonymity, unlinkability, unobservability -----------------------------------


def _unprotected(graph: ModelGraph, check: CheckId, req_kind: RequirementKind, capability: Capability, what: str):
    protected = {
        info for m in graph.mechanisms if m.capability is capability for info in m.applied_to
    }
    out = [
        finding(check, [r.id, r.concerning], f"'{r.concerning}' is not {what} by any mechanism")
        for r in graph.requirements
        if r.kind is req_kind and r.concerning not in protected
    ]
    return sort_findings(out)


def cq20_anonymity(graph: ModelGraph) -> list[Finding]:
    return _unprotected(graph, CheckId.CQ20, RequirementKind.ANONYMITY, Capability.ANONYMIZE, "anonymized")


def cq21_unlinkability(graph: ModelGraph) -> list[Finding]:
    return _unprotected(graph, CheckId.CQ21, RequirementKind.UNLINKABILITY, Capability.UNLINK, "made unlinkable")


def cq22_unobservability(graph: ModelGraph) -> list[Finding]:
    cache = _Cache(graph, False)
    out = []
    for r in graph.requirements:
        if r.kind is not RequirementKind.UNOBSERVABILITY or not graph.is_personal(r.concerning):
            continue
        info = r.concerning
        owner = owner_of(graph, info)
        if owner is None:
            continue
        described = [g for g in graph.successors(Relation.DESCRIBES, info) if owner in cache.actors(g)]
        if not described:
            continue
        observers = sorted(
            {
                a
                for u in graph.uses
                if u.info == info and u.type_of_use is UseType.COLLECT
                for a in cache.actors(u.goal)
                if a != owner
            }
        )
        if observers:
            out.append(
                finding(
                    CheckId.CQ22,
                    [r.id, info],
                    f"'{info}' describes activities of '{owner}' and is collected by {', '.join(observers)}",
                )
            )
    return sort_findings(out)


# notice, transparency, accountability ----------------------------------------


def cq23_notice(graph: ModelGraph, *, parts_inherit: bool = False) -> list[Finding]:
    return _unpermitted_uses(graph, CheckId.CQ23, frozenset({UseType.COLLECT}), parts_inherit)


def threat_only_actors(graph: ModelGraph) -> frozenset[str]:
    """Actors whose sole involvement in the model is intending threats.

    Such actors are outside the system's authentication boundary (an external
    attacker), so CQ24 does not report them.
    """
    involved: set[str] = set()
    for e in graph.edges:
        if e.relation is not Relation.INTENDS:
            involved.update((e.source, e.target))
    for p in graph.permissions:
        involved.add(p.holder)
    for p in graph.provisions:
        involved.update((p.by, p.to))
    for d in graph.delegations:
        involved.update((d.delegator, d.delegatee))
    for t in graph.trusts:
        involved.update((t.trustor, t.trustee))
    for m in graph.monitors:
        involved.update((m.monitor, m.monitoree))
    intending = {e.source for e in graph.edges_of(Relation.INTENDS)}
    return frozenset(intending - involved)


def cq24_authentication(graph: ModelGraph) -> list[Finding]:
    outsiders = threat_only_actors(graph)
    out = []
    for agent in graph.of_kind(ElementKind.AGENT):
        if agent not in outsiders and not role_closure(graph, agent):
            out.append(finding(CheckId.CQ24, [agent], f"agent '{agent}' plays no role and cannot be authenticated"))
    for actor in sorted({e.source for e in graph.edges_of(Relation.INTENDS)}):
        if actor not in outsiders and graph.kind_of(actor) in ACTOR:
            threats = ", ".join(sorted(set(graph.successors(Relation.INTENDS, actor))))
            out.append(finding(CheckId.CQ24, [actor], f"'{actor}' takes part in the system and intends {threats}"))
    return sort_findings(out)


def cq25_authorization(graph: ModelGraph, *, parts_inherit: bool = False) -> list[Finding]:
    return _unpermitted_uses(graph, CheckId.CQ25, frozenset(UseType), parts_inherit)


def cq26_non_repudiation(graph: ModelGraph) -> list[Finding]:
    out = [
        finding(CheckId.CQ26, [d.id], f"'{d.delegatee}' has not adopted delegation '{d.id}' from '{d.delegator}'")
        for d in graph.delegations
        if d.delegatee not in graph.predecessors(Relation.ADOPTS, d.id)
    ]
    return sort_findings(out)


# running ---------------------------------------------------------------------


@dataclass(frozen=True)
class AnalysisConfig:
    """Which checks to run and with which filters.

    ``None`` filters make CQ3, CQ8 and CQ13 list rows for every level.
    """

    checks: tuple[CheckId, ...] = tuple(CheckId)
    severity: Level | None = None
    probability: Level | None = None
    sensitivity: Sensitivity | None = None
    parts_inherit_permissions: bool = False
    concurrent: bool = False


def _runner(check: CheckId, config: AnalysisConfig) -> Callable[[ModelGraph], list[Finding]]:
    inherit = config.parts_inherit_permissions
    if check is CheckId.CQ3:
        return partial(cq3_by_sensitivity, level=config.sensitivity)
    if check in (CheckId.CQ8, CheckId.CQ13):
        chosen = config.severity if check is CheckId.CQ8 else config.probability
        levels = [chosen] if chosen is not None else list(Level)
        return lambda g: [f for lv in levels for f in risk_query(g, check, lv)]
    if check in RISK_CHECKS:
        return partial(risk_query, kind=check)
    if check in TREATMENT_CHECKS:
        return partial(treatment_query, kind=check)
    if check is CheckId.CQ16:
        return partial(cq16_nondisclosure_read, parts_inherit=inherit)
    if check is CheckId.CQ23:
        return partial(cq23_notice, parts_inherit=inherit)
    if check is CheckId.CQ25:
        return partial(cq25_authorization, parts_inherit=inherit)
    return _PLAIN[check]


_PLAIN: dict[CheckId, Callable[[ModelGraph], list[Finding]]] = {
    CheckId.CQ1: cq1_trustless_permission_delegation,
    CheckId.CQ2: cq2_redundant_monitoring,
    CheckId.CQ17: cq17_confidential_provision,
    CheckId.CQ18: cq18_need_to_know,
    CheckId.CQ19: cq19_purpose_of_use,
    CheckId.CQ20: cq20_anonymity,
    CheckId.CQ21: cq21_unlinkability,
    CheckId.CQ22: cq22_unobservability,
    CheckId.CQ24: cq24_authentication,
    CheckId.CQ26: cq26_non_repudiation,
}


def run_check(graph: ModelGraph, check: CheckId | str, config: AnalysisConfig | None = None) -> list[Finding]:
    return sort_findings(_runner(CheckId(check), config or AnalysisConfig())(graph))


def run_all(graph: ModelGraph, config: AnalysisConfig | None = None, **overrides) -> list[Finding]:
    """Run the configured checks and return all findings in report order.

    Keyword ``overrides`` replace fields of ``config``; passing
    ``checks=["CQ99"]`` raises :class:`UnknownCheckId`.
    """
    config = config or AnalysisConfig()
    if overrides:
        if "checks" in overrides and overrides["checks"] is not None:
            overrides["checks"] = _as_check_ids(overrides["checks"])
        elif "checks" in overrides:
            overrides["checks"] = tuple(CheckId)
        config = replace(config, **overrides)
    checks = _as_check_ids(config.checks)
    runners = [_runner(c, config) for c in checks]
    if config.concurrent:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda run: run(graph), runners))
    else:
        results = [run(graph) for run in runners]
    return sort_findings(f for result in results for f in result)


def _as_check_ids(items: Iterable[CheckId | str]) -> tuple[CheckId, ...]:
    out = set()
    for item in items:
        try:
            out.add(CheckId(item))
        except ValueError:
            raise UnknownCheckId(str(item)) from None
    return tuple(sorted(out, key=lambda c: c.number))


_BY_SLUG = {slug: check for check, slug in CHECK_SLUGS.items()}
_CQ = re.compile(r"(?:cq)?(\d+)", re.IGNORECASE)


def _one_check(token: str) -> CheckId:
    m = _CQ.fullmatch(token)
    if m:
        try:
            return CheckId(f"CQ{int(m.group(1))}")
        except ValueError:
            raise UnknownCheckId(token) from None
    if token.lower() in _BY_SLUG:
        return _BY_SLUG[token.lower()]
    raise UnknownCheckId(token)


def parse_check_ids(text: str) -> tuple[CheckId, ...]:
    """Parse a check list such as ``"CQ1,CQ16-CQ26,need-to-know"``.

    Ids are case-insensitive and may omit the ``CQ`` prefix; ranges are
    inclusive.  Anything unrecognised raises :class:`UnknownCheckId`.
    """
    selected: set[CheckId] = set()
    for raw in text.split(","):
        token = raw.strip()
        if not token:
            raise UnknownCheckId(raw)
        lo, sep, hi = token.partition("-")
        if sep and _CQ.fullmatch(lo.strip()) and _CQ.fullmatch(hi.strip()):
            a, b = _one_check(lo.strip()).number, _one_check(hi.strip()).number
            if a > b:
                raise UnknownCheckId(token)
            selected.update(CheckId(f"CQ{n}") for n in range(a, b + 1))
        else:
            selected.add(_one_check(token))
    return tuple(sorted(selected, key=lambda c: c.number))
