from __future__ import annotations

import itertools

from hypothesis import given, settings

from conftest import load_fixture
from copri_lint.cml import parse_model
from copri_lint.diagnostics import Severity, sort_diagnostics
from copri_lint.wellformedness import (
    CHECKS,
    WF_RULES,
    check_cardinalities,
    check_cycles,
    check_isolated,
    check_misc,
    check_signatures,
    check_wellformedness,
    cyclic_components,
    find_cycles,
)
from copri_lint.schema import ElementKind, Relation
from strategies import model_graphs
from zoo import zoo_builder


def codes(diags):
    return [d.code for d in diags]


EMPTY = parse_model("")


def test_severities_are_fixed_per_rule():
    assert {c for c, s in WF_RULES.items() if s is Severity.ERROR} == {"WF-SIG", "WF-CYCLE", "WF-CARD"}


def test_every_check_accepts_the_empty_graph():
    for check in CHECKS:
        assert check(EMPTY) == []


def test_aal_is_well_formed():
    assert check_wellformedness(load_fixture("aal.cml")) == []


# signatures ------------------------------------------------------------------


def test_describes_from_public_information_is_sig_error():
    g = parse_model("agent A\ngoal G aimedBy A\ninfo P public\ndescribes P G")
    [d] = check_signatures(g)
    assert d.code == "WF-SIG" and d.severity is Severity.ERROR
    assert "'P'" in d.message


def test_mitigates_vulnerability_is_fine():
    g = parse_model(
        "agent A\ninfo I personal { owner A sensitivity R }\nvulnerability V on I\nprivacygoal PG mitigates V"
    )
    assert check_signatures(g) == []


def test_edge_added_through_builder_is_checked():
    b = zoo_builder()
    b.add_edge(Relation.AIMS, "G", "A")  # reversed
    diags = check_signatures(b.finalize())
    assert codes(diags) == ["WF-SIG", "WF-SIG"]


# cycles ----------------------------------------------------------------------


def test_two_role_cycle_reported_once():
    g = parse_model("role R1 is_a R2\nrole R2 is_a R1")
    [d] = check_cycles(g)
    assert d.code == "WF-CYCLE"
    assert d.message == "cycle in is_a: R1 -> R2 -> R1"


def test_five_edge_chain_has_no_cycle():
    g = parse_model("\n".join(f"role R{i} is_a R{i + 1}" for i in range(5)) + "\nrole R5")
    assert check_cycles(g) == []


def test_goal_decomposed_into_itself():
    g = parse_model("agent A\ngoal G aimedBy A { and [G] }")
    [d] = check_cycles(g)
    assert d.message == "cycle in goal decomposition: G -> G"


def test_mixed_and_or_cycle_counts_as_one_decomposition_cycle():
    g = parse_model("agent A\ngoal G1 aimedBy A { and [G2] }\ngoal G2 { or [G1] }")
    assert codes(check_cycles(g)) == ["WF-CYCLE"]


def test_cycle_groups_are_independent():
    assert find_cycles([("a", "b")]) == []
    assert find_cycles([("a", "b"), ("b", "a")]) == [("a", "b")]
    # the same two ids linked once by is_a and once by partOf form no cycle
    b = zoo_builder()
    b.add_element(ElementKind.ROLE, "R2")
    b.add_edge(Relation.IS_A, "R", "R2")
    b.add_edge(Relation.PART_OF, "R2", "R")
    assert check_cycles(b.finalize()) == []


def test_larger_component_is_named_in_full():
    edges = [("a", "b"), ("b", "a"), ("b", "c"), ("c", "a")]
    assert cyclic_components(edges) == [frozenset("abc")]
    g = parse_model("role a is_a b\nrole b is_a a\nrole c is_a a")
    g2 = parse_model("role a is_a b\nrole b is_a c\nrole c is_a a")
    assert check_cycles(g)[0].message == "cycle in is_a: a -> b -> a"
    assert check_cycles(g2)[0].message == "cycle in is_a: a -> b -> c -> a"


def test_cycle_report_starts_at_smallest_member():
    for perm in itertools.permutations(["x", "y", "z"]):
        edges = list(zip(perm, perm[1:] + perm[:1]))
        [cycle] = find_cycles(edges)
        assert cycle[0] == "x" and set(cycle) == {"x", "y", "z"}


# cardinalities ---------------------------------------------------------------


def test_unowned_personal_information():
    diags = check_cardinalities(zoo_builder().finalize())
    # zoo's "J" is deliberately unowned
    assert codes(diags) == ["WF-CARD"] and "'J'" in diags[0].message


def test_intentional_threat_with_two_methods():
    b = zoo_builder()
    b.add_element(ElementKind.ATTACK_METHOD, "AM2")
    b.add_edge(Relation.INCLUDES, "TI", "AM2")
    b.add_edge(Relation.OWN, "A", "J")
    diags = check_cardinalities(b.finalize())
    assert codes(diags) == ["WF-CARD"]
    assert "TI" in diags[0].message


# isolation -------------------------------------------------------------------


def test_unused_role_is_isolated():
    g = parse_model("role Ghost\nrole R\nagent A plays R")
    [d] = check_isolated(g)
    assert d.code == "WF-ISOLATED" and d.severity is Severity.WARNING and "Ghost" in d.message


def test_bob_taking_part_only_through_intends_is_not_isolated():
    g = load_fixture("aal.cml")
    assert "Bob" in g
    assert check_isolated(g) == []


# misc ------------------------------------------------------------------------


def test_self_trust_warns():
    g = parse_model(
        "agent Jack\ninfo I personal { owner Jack sensitivity R }\n"
        "permission P read over I heldBy Jack\n"
        "trust T from Jack to Jack on permission P level trust"
    )
    [d] = check_misc(g)
    assert d.code == "WF-SELF" and d.severity is Severity.WARNING


def test_sensitivity_conflict_warns():
    g = parse_model(
        "agent A\ninfo I1 personal { owner A sensitivity S }\nsituation Sit determines I1 T"
    )
    [d] = check_misc(g)
    assert d.code == "WF-SENS-CONFLICT"


def test_matching_situation_level_is_quiet():
    g = parse_model("agent A\ninfo I1 personal { owner A sensitivity S }\nsituation Sit determines I1 S")
    assert check_misc(g) == []


# properties ------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(model_graphs())
def test_check_order_does_not_matter(g):
    forward = sort_diagnostics(d for check in CHECKS for d in check(g))
    backward = sort_diagnostics(d for check in reversed(CHECKS) for d in check(g))
    assert forward == backward == check_wellformedness(g) == check_wellformedness(g, concurrent=True)


@settings(max_examples=100, deadline=None)
@given(model_graphs())
def test_generated_models_have_no_errors(g):
    assert not [d for d in check_wellformedness(g) if d.severity is Severity.ERROR]
