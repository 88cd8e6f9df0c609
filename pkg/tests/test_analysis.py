from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings

from conftest import load_fixture
from copri_lint.analysis import (
    CHECK_KINDS,
    AnalysisConfig,
    CheckId,
    FilterNotApplicable,
    FilterRequired,
    Finding,
    FindingKind,
    UnknownCheckId,
    cq1_trustless_permission_delegation,
    cq2_redundant_monitoring,
    cq3_by_sensitivity,
    cq16_nondisclosure_read,
    cq22_unobservability,
    cq23_notice,
    cq24_authentication,
    cq25_authorization,
    goal_actors,
    parse_check_ids,
    risk_query,
    run_all,
    run_check,
    treatment_query,
)
from copri_lint.cml import parse_model
from copri_lint.schema import Level, Sensitivity
from strategies import model_graphs

EMPTY = parse_model("")


def rows(findings):
    return {f.elements for f in findings}


# identities ------------------------------------------------------------------


def test_kinds_follow_the_violation_vocabulary():
    assert CHECK_KINDS[CheckId.CQ16] is FindingKind.DISCLOSURE
    assert CHECK_KINDS[CheckId.CQ20] is FindingKind.IDENTIFIABILITY
    assert CHECK_KINDS[CheckId.CQ24] is CHECK_KINDS[CheckId.CQ25] is FindingKind.UNTRANSPARENT
    assert {CHECK_KINDS[CheckId(f"CQ{n}")] for n in range(3, 16)} == {FindingKind.QUERY_ROW}


def test_finding_rejects_inconsistent_kind_and_empty_elements():
    with pytest.raises(ValueError):
        Finding(CheckId.CQ16, FindingKind.LINKABILITY, ("x",), "m")
    with pytest.raises(ValueError):
        Finding(CheckId.CQ16, FindingKind.DISCLOSURE, (), "m")


def test_finding_dict_round_trip():
    f = Finding(CheckId.CQ26, FindingKind.UNACCOUNTABLE, ("D1",), "not adopted")
    assert Finding.from_dict(f.to_dict()) == f
    assert str(f) == "CQ26 Unaccountable: not adopted [D1]"


def test_every_check_accepts_the_empty_graph():
    assert run_all(EMPTY) == []


# CQ1 / CQ2 -------------------------------------------------------------------

DELEGATION = """
agent Jack
agent Sarah
info Location personal { owner Jack sensitivity R }
permission PS read over Location heldBy Jack
delegate permission D from Jack to Sarah of PS
adopt Sarah D
"""
TRUSTS = {
    "none": "",
    "trust": "trust T from Jack to Sarah on permission PS level trust",
    "distrust": "trust T from Jack to Sarah on permission PS level distrust",
    "elsewhere": "trust T from Sarah to Jack on permission PS level trust",
}
MONITORS = {False: "", True: "monitor M by Jack of Sarah on permission PS"}


@pytest.mark.parametrize("trust, monitored", list(itertools.product(TRUSTS, MONITORS)))
def test_trust_and_monitor_table(trust, monitored):
    g = parse_model("\n".join([DELEGATION, TRUSTS[trust], MONITORS[monitored]]))
    trusted = trust == "trust"
    cq1, cq2 = cq1_trustless_permission_delegation(g), cq2_redundant_monitoring(g)
    assert bool(cq1) == (not trusted and not monitored)
    assert bool(cq2) == (trusted and monitored)
    assert not (cq1 and cq2)
    assert [f.elements for f in cq1 + cq2] in ([], [("D",)])


def test_goal_delegations_are_out_of_scope_for_cq1():
    g = parse_model("agent A\nagent B\ngoal G aimedBy A\ndelegate goal DG from A to B of G\nadopt B DG")
    assert cq1_trustless_permission_delegation(g) == []


# queries on AAL --------------------------------------------------------------


def test_cq3_levels(aal):
    assert rows(cq3_by_sensitivity(aal, Sensitivity.SENSITIVE)) == {("I1",)}
    assert cq3_by_sensitivity(aal, Sensitivity.SECRET) == []
    assert rows(cq3_by_sensitivity(aal)) == {("I1",), ("I2",), ("I3",), ("I4",)}


def test_cq4_vulnerable_information(aal):
    assert rows(risk_query(aal, "CQ4")) == {("V1", "I1")}


def test_cq8_and_cq13_filters(aal):
    assert rows(risk_query(aal, CheckId.CQ8, Level.MEDIUM)) == {("T1",), ("T2",)}
    assert risk_query(aal, CheckId.CQ8, Level.HIGH) == []
    assert risk_query(aal, CheckId.CQ8, Level.LOW) == []
    assert rows(risk_query(aal, CheckId.CQ13, Level.LOW)) == {("T2",)}


def test_filter_errors(aal):
    with pytest.raises(FilterRequired):
        risk_query(aal, CheckId.CQ8)
    with pytest.raises(FilterNotApplicable):
        risk_query(aal, CheckId.CQ4, Level.LOW)


def test_cq14_skips_unrealized_goals():
    g = parse_model(
        "agent A\ninfo I personal { owner A sensitivity R }\nvulnerability V on I\n"
        "policy P\nprivacygoal Done mitigates V realizedBy P\nprivacygoal Open mitigates V"
    )
    assert rows(treatment_query(g, "CQ14")) == {("Done",)}


def test_cq15_on_aal(aal):
    assert rows(treatment_query(aal, CheckId.CQ15)) == {("PC1", "I1"), ("PC2", "I1")}


def test_unfiltered_run_lists_every_level(aal):
    cq8 = run_check(aal, CheckId.CQ8)
    assert rows(cq8) == {("T1",), ("T2",)}
    only_high = run_check(aal, CheckId.CQ8, AnalysisConfig(severity=Level.HIGH))
    assert only_high == []


# use checks ------------------------------------------------------------------

USE = """
agent Jack
agent Sarah
goal Mine aimedBy Jack
goal Care aimedBy Sarah {{ and [Sub] }}
goal Sub
info I1 personal {{ owner Jack sensitivity S }}
info Pub public
{perms}
use {goal} {use} {info}
"""
TYPES = ["produce", "read", "modify", "collect"]


@pytest.mark.parametrize("use, held", list(itertools.product(TYPES, TYPES)))
def test_use_permission_enumeration(use, held):
    g = parse_model(USE.format(perms=f"permission P {held} over I1 heldBy Sarah", goal="Sub", use=use, info="I1"))
    missing = use != held
    assert bool(cq25_authorization(g)) == missing
    assert bool(cq16_nondisclosure_read(g)) == (missing and use == "read")
    assert bool(cq23_notice(g)) == (missing and use == "collect")
    if missing:
        assert rows(cq25_authorization(g)) == {("Sarah", "Sub", "I1")}


@pytest.mark.parametrize("use", TYPES)
def test_owner_needs_no_permission(use):
    g = parse_model(USE.format(perms="", goal="Mine", use=use, info="I1"))
    assert cq25_authorization(g) == []


@pytest.mark.parametrize("use", TYPES)
def test_public_information_is_out_of_scope(use):
    g = parse_model(USE.format(perms="", goal="Care", use=use, info="Pub"))
    assert cq25_authorization(g) == cq16_nondisclosure_read(g) == cq23_notice(g) == []


def test_subgoal_inherits_the_root_actor():
    g = parse_model(USE.format(perms="", goal="Sub", use="read", info="I1"))
    assert goal_actors(g, "Sub") == {"Sarah"}


@settings(max_examples=150, deadline=None)
@given(model_graphs())
def test_cq16_is_the_read_part_of_cq25(g):
    read_rows = rows(cq16_nondisclosure_read(g))
    assert read_rows <= rows(cq25_authorization(g))
    assert rows(cq23_notice(g)) <= rows(cq25_authorization(g))


@settings(max_examples=150, deadline=None)
@given(model_graphs())
def test_parts_inherit_only_removes_authorization_findings(g):
    for check in (CheckId.CQ16, CheckId.CQ23, CheckId.CQ25):
        plain = rows(run_check(g, check))
        inherited = rows(run_check(g, check, AnalysisConfig(parts_inherit_permissions=True)))
        assert inherited <= plain


def test_adding_a_permission_never_adds_findings():
    before = parse_model(USE.format(perms="", goal="Care", use="modify", info="I1"))
    after = parse_model(USE.format(perms="permission P modify over I1 heldBy Sarah", goal="Care", use="modify", info="I1"))
    for check in (CheckId.CQ16, CheckId.CQ23, CheckId.CQ25):
        assert len(run_check(after, check)) <= len(run_check(before, check))
    assert len(cq25_authorization(before)) == 1 and cq25_authorization(after) == []


# CQ22 ------------------------------------------------------------------------

OBSERVE = """
agent Jack
agent Center
goal Walk aimedBy Jack
goal Other aimedBy Center
goal Track aimedBy Center
info Loc personal {{ owner Jack sensitivity R }}
describes Loc {described}
permission P collect over Loc heldBy Center
requirement unobservability RQ concerning Loc
{collect}
"""


@pytest.mark.parametrize(
    "described, collect, expected",
    [
        ("Walk", "use Track collect Loc", {("RQ", "Loc")}),
        ("Walk", "use Track read Loc", set()),
        ("Other", "use Track collect Loc", set()),
        ("Walk", "use Walk collect Loc", set()),
    ],
)
def test_cq22_table(described, collect, expected):
    g = parse_model(OBSERVE.format(described=described, collect=collect))
    assert rows(cq22_unobservability(g)) == expected


# CQ24 ------------------------------------------------------------------------


def test_cq24_flags_roleless_agents_only(aal):
    g = parse_model("role Nurse\nagent Sarah plays Nurse\nagent Ghost")
    assert rows(cq24_authentication(g)) == {("Ghost",)}


def test_cq24_ignores_outside_attacker_on_aal(aal):
    assert cq24_authentication(aal) == []


def test_insider_threat_actor_is_flagged():
    g = load_fixture("aal_cq24_insider.cml")
    [f] = cq24_authentication(g)
    assert f.elements == ("Bob",) and "intends T1" in f.message


# locality and determinism ----------------------------------------------------


def test_isolated_role_changes_nothing(aal, fixtures_dir):
    text = (fixtures_dir / "aal.cml").read_text()
    assert run_all(parse_model(text + "\nrole Spare\n")) == run_all(aal)


def test_roleless_agent_only_touches_cq24(aal, fixtures_dir):
    text = (fixtures_dir / "aal.cml").read_text()
    extra = run_all(parse_model(text + "\nagent Drifter\n"))
    base = run_all(aal)
    added = [f for f in extra if f not in base]
    assert [f.check for f in added] == [CheckId.CQ24]
    assert [f for f in extra if f.check is not CheckId.CQ24] == [f for f in base if f.check is not CheckId.CQ24]


def test_aal_has_no_violations(aal):
    assert not [f for f in run_all(aal) if f.is_violation]


def test_no_adopt_adds_exactly_one_cq26(aal):
    base = run_all(aal)
    perturbed = run_all(load_fixture("aal_no_adopt.cml"))
    added = [f for f in perturbed if f not in base]
    assert [(f.check, f.elements) for f in added] == [(CheckId.CQ26, ("DP1",))]


# configuration ---------------------------------------------------------------


def test_parse_check_ids_forms():
    assert parse_check_ids("CQ1,cq3") == (CheckId.CQ1, CheckId.CQ3)
    assert parse_check_ids("24-26") == (CheckId.CQ24, CheckId.CQ25, CheckId.CQ26)
    assert parse_check_ids("need-to-know, CQ18") == (CheckId.CQ18,)


@pytest.mark.parametrize("text", ["CQ99", "CQ0", "bogus", "CQ5-CQ2", "CQ1,", ""])
def test_parse_check_ids_rejects(text):
    with pytest.raises(UnknownCheckId):
        parse_check_ids(text)


def test_run_all_rejects_unknown_check(aal):
    with pytest.raises(UnknownCheckId):
        run_all(aal, checks=["CQ99"])


def test_run_all_respects_check_selection(aal):
    found = run_all(aal, checks=["CQ4", "CQ15"])
    assert {f.check for f in found} == {CheckId.CQ4, CheckId.CQ15}
