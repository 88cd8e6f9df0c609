"""Structural checks over a finalized model graph.

Each check is a pure function returning diagnostics.  Codes and severities
are fixed and form part of the command-line contract:

========================  ========  ==========================================
code                      severity  meaning
========================  ========  ==========================================
WF-SIG                    Error     relation or record field has wrong kinds
WF-CYCLE                  Error     cycle in is_a, partOf or goal decomposition
WF-CARD                   Error     cardinality restriction violated
WF-ISOLATED               Warning   element takes part in no relation
WF-SELF                   Warning   actor delegates to / trusts / monitors itself
WF-SENS-CONFLICT          Warning   situation sets a different sensitivity
========================  ========  ==========================================
"""

from __future__ import annotations

from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable

from .diagnostics import Diagnostic, Severity, SourceSpan, error, sort_diagnostics, warning
from .model import (
    RECORD_FIELD_PROPERTIES,
    SUBJECT_PROPERTIES,
    Edge,
    ModelGraph,
    record_references,
)
from .schema import (
    PROPERTY_SIGNATURES,
    ElementKind,
    Relation,
    ThreatKind,
    kind_name,
)

WF_RULES: dict[str, Severity] = {
    "WF-SIG": Severity.ERROR,
    "WF-CYCLE": Severity.ERROR,
    "WF-CARD": Severity.ERROR,
    "WF-ISOLATED": Severity.WARNING,
    "WF-SELF": Severity.WARNING,
    "WF-SENS-CONFLICT": Severity.WARNING,
}

CYCLE_GROUPS: dict[str, tuple[Relation, ...]] = {
    "is_a": (Relation.IS_A,),
    "partOf": (Relation.PART_OF,),
    "goal decomposition": (Relation.AND_DECOMPOSED, Relation.OR_DECOMPOSED),
}


def _kind_label(graph: ModelGraph, ident: str) -> str:
    kind = graph.kind_of(ident)
    return kind.value if kind is not None else "undeclared"


def check_signatures(graph: ModelGraph) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for edge in graph.edges:
        domain, range_ = PROPERTY_SIGNATURES[edge.relation.value]
        for role, ident, allowed in (("source", edge.source, domain), ("target", edge.target, range_)):
            if graph.kind_of(ident) not in allowed:
                out.append(
                    error(
                        "WF-SIG",
                        f"{edge.relation.value} {role} '{ident}' is {_kind_label(graph, ident)}, "
                        f"expected {kind_name(allowed)}",
                        edge.span,
                    )
                )

    def field_property(record, fname: str) -> tuple[str, str]:
        key = (type(record), fname)
        if key in RECORD_FIELD_PROPERTIES:
            return RECORD_FIELD_PROPERTIES[key]
        _, prop = SUBJECT_PROPERTIES[record.kind]
        return prop, "range"

    records = (
        graph.uses
        + graph.permissions
        + graph.provisions
        + graph.delegations
        + graph.trusts
        + graph.monitors
        + graph.impacts
    )
    for record in records:
        for fname, ident in record_references(record):
            prop, side = field_property(record, fname)
            domain, range_ = PROPERTY_SIGNATURES[prop]
            allowed = domain if side == "domain" else range_
            if graph.kind_of(ident) not in allowed:
                what = type(record).__name__.removesuffix("Record").lower()
                out.append(
                    error(
                        "WF-SIG",
                        f"{what} {fname} '{ident}' is {_kind_label(graph, ident)}, "
                        f"expected {kind_name(allowed)} ({prop})",
                        record.span,
                    )
                )
    return sort_diagnostics(out)


def _components(nodes: Iterable[str], succ: dict[str, list[str]]) -> list[list[str]]:
    """Strongly connected components (iterative Tarjan)."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    result: list[list[str]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, children = work[-1]
            advanced = False
            for child in children:
                if child not in index:
                    index[child] = low[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(succ.get(child, ()))))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                result.append(comp)
    return result


def _witness(start: str, members: set[str], succ: dict[str, list[str]]) -> list[str]:
    """Shortest cycle through ``start`` staying inside ``members``."""
    parent: dict[str, str] = {}
    frontier = [start]
    seen = {start}
    while frontier:
        nxt = []
        for node in frontier:
            for child in sorted(succ.get(node, ())):
                if child == start:
                    path = [node]
                    while path[-1] != start:
                        path.append(parent[path[-1]])
                    return list(reversed(path))
                if child in members and child not in seen:
                    seen.add(child)
                    parent[child] = node
                    nxt.append(child)
        frontier = nxt
    return [start]


def cyclic_groups(edges: Iterable[tuple[str, str]]) -> list[tuple[frozenset[str], tuple[str, ...]]]:
    """Every strongly connected component that contains a cycle, self-loops included.

    Returns ``(members, witness)`` pairs sorted by witness.  The witness is a
    shortest cycle through the component's lexicographically smallest member
    and starts there.
    """
    succ: dict[str, list[str]] = defaultdict(list)
    nodes: dict[str, None] = {}
    self_loops: set[str] = set()
    for a, b in edges:
        succ[a].append(b)
        nodes.setdefault(a)
        nodes.setdefault(b)
        if a == b:
            self_loops.add(a)
    groups = []
    for comp in _components(sorted(nodes), succ):
        if len(comp) == 1 and comp[0] not in self_loops:
            continue
        members = frozenset(comp)
        groups.append((members, tuple(_witness(min(members), members, succ))))
    return sorted(groups, key=lambda g: g[1])


def find_cycles(edges: Iterable[tuple[str, str]]) -> list[tuple[str, ...]]:
    """One witness cycle per cyclic component; see :func:`cyclic_groups`."""
    return [witness for _, witness in cyclic_groups(edges)]


def cyclic_components(edges: Iterable[tuple[str, str]]) -> list[frozenset[str]]:
    return [members for members, _ in cyclic_groups(edges)]


def check_cycles(graph: ModelGraph) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for group, relations in CYCLE_GROUPS.items():
        edges: list[Edge] = [e for r in relations for e in graph.edges_of(r)]
        if not edges:
            continue
        spans: dict[tuple[str, str], SourceSpan | None] = {}
        for e in edges:
            spans.setdefault((e.source, e.target), e.span)
        for members, cycle in cyclic_groups((e.source, e.target) for e in edges):
            message = f"cycle in {group}: {' -> '.join(cycle + (cycle[0],))}"
            if len(members) > len(cycle):
                message += f" (cyclic group {', '.join(sorted(members))})"
            first_edge = (cycle[0], cycle[1] if len(cycle) > 1 else cycle[0])
            out.append(error("WF-CYCLE", message, spans.get(first_edge)))
    return sort_diagnostics(out)


def check_cardinalities(graph: ModelGraph) -> list[Diagnostic]:
    out: list[Diagnostic] = []

    def card(message: str, ident: str) -> None:
        el = graph.elements.get(ident) or graph.records_by_id.get(ident)
        out.append(error("WF-CARD", message, getattr(el, "span", None)))

    for info in graph.of_kind(ElementKind.PERSONAL_INFORMATION):
        owners = set(graph.predecessors(Relation.OWN, info))
        if len(owners) != 1:
            card(f"personal information '{info}' must have exactly one owner, has {len(owners)}", info)
        if graph.sensitivity_of(info) is None:
            card(f"personal information '{info}' must have exactly one sensitivity level, has none", info)

    for d in graph.delegations:
        for role in ("delegator", "delegatee", "delegatum"):
            if not getattr(d, role):
                card(f"delegation '{d.id}' must have exactly one {role}", d.id)

    for t in graph.threats:
        if t.kind is ThreatKind.INTENTIONAL:
            actors = set(graph.predecessors(Relation.INTENDS, t.id))
            methods = set(graph.successors(Relation.INCLUDES, t.id))
            if len(actors) != 1:
                card(f"intentional threat '{t.id}' must have exactly one threat actor, has {len(actors)}", t.id)
            if len(methods) != 1:
                card(f"intentional threat '{t.id}' must have exactly one attack method, has {len(methods)}", t.id)
        elif t.probability is None:
            card(f"incidental threat '{t.id}' must have exactly one probability", t.id)
    return sort_diagnostics(out)


def participating_ids(graph: ModelGraph) -> set[str]:
    seen: set[str] = set()
    for e in graph.edges:
        seen.add(e.source)
        seen.add(e.target)
    for record in (
        graph.uses + graph.permissions + graph.provisions + graph.delegations + graph.trusts + graph.monitors
    ):
        seen.update(ident for _, ident in record_references(record))
    for impact in graph.impacts:
        seen.update((impact.threat, impact.over))
    return seen


def check_isolated(graph: ModelGraph) -> list[Diagnostic]:
    used = participating_ids(graph)
    out = [
        warning("WF-ISOLATED", f"{el.kind.value} '{el.id}' is not connected to anything", el.span)
        for el in graph.elements.values()
        if el.id not in used
    ]
    return sort_diagnostics(out)


def check_misc(graph: ModelGraph) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    for d in graph.delegations:
        if d.delegator == d.delegatee:
            out.append(warning("WF-SELF", f"'{d.delegator}' delegates '{d.delegatum}' to itself ({d.id})", d.span))
    for t in graph.trusts:
        if t.trustor == t.trustee:
            out.append(warning("WF-SELF", f"'{t.trustor}' trusts itself ({t.id})", t.span))
    for m in graph.monitors:
        if m.monitor == m.monitoree:
            out.append(warning("WF-SELF", f"'{m.monitor}' monitors itself ({m.id})", m.span))
    for p in graph.provisions:
        if p.by == p.to:
            out.append(warning("WF-SELF", f"'{p.by}' provides '{p.of}' to itself ({p.id})", p.span))
    for e in graph.edges_of(Relation.DETERMINES):
        declared = graph.sensitivity_of(e.target)
        if e.level is not None and declared is not None and e.level is not declared:
            out.append(
                warning(
                    "WF-SENS-CONFLICT",
                    f"situation '{e.source}' determines {e.level.value} for '{e.target}', "
                    f"which declares {declared.value}",
                    e.span,
                )
            )
    return sort_diagnostics(out)


CHECKS: tuple[Callable[[ModelGraph], list[Diagnostic]], ...] = (
    check_signatures,
    check_cycles,
    check_cardinalities,
    check_isolated,
    check_misc,
)


def check_wellformedness(graph: ModelGraph, *, concurrent: bool = False) -> list[Diagnostic]:
    """Run every well-formedness check and return the merged, sorted diagnostics."""
    if concurrent:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda check: check(graph), CHECKS))
    else:
        results = [check(graph) for check in CHECKS]
    return sort_diagnostics(d for result in results for d in result)
