from __future__ import annotations

import io
import json
import re
import subprocess
import sys
from collections import Counter

import pytest

from copri_lint.analysis import AnalysisConfig, CheckId, FindingKind, finding
from copri_lint.cli import check_file, run
from copri_lint.diagnostics import error, warning
from copri_lint.report import SCHEMA, FailOn, Report, exit_code, from_json, render_json, render_text

FINDING_LINE = re.compile(r"^(CQ\d+) (\w+): (.*) \[(.*)\]$")


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def text_multiset(text):
    found = Counter()
    for line in text.splitlines():
        m = FINDING_LINE.match(line)
        if m:
            found[m.group(1), m.group(2), m.group(3), tuple(m.group(4).split(", "))] += 1
    return found


def json_multiset(data):
    items = data if isinstance(data, list) else [data]
    return Counter(
        (f["check"], f["kind"], f["message"], tuple(f["elements"])) for r in items for f in r["findings"]
    )


# rendering -------------------------------------------------------------------


def test_empty_report_json():
    data = json.loads(render_json(Report("AAL")))
    assert data["schema"] == SCHEMA == "copri-report/1"
    assert data["model"] == "AAL" and data["findings"] == []
    assert data["counts"] == {"errors": 0, "query_rows": 0, "violations": 0, "warnings": 0}


def test_json_is_canonical():
    text = render_json(Report("M"))
    assert text.endswith("}\n") and ", " not in text and ": " not in text
    assert list(json.loads(text)) == sorted(json.loads(text))


def test_findings_sorted_by_check_then_elements():
    fs = [
        finding(CheckId.CQ26, ["D2"], "m"),
        finding(CheckId.CQ16, ["Sarah", "G5", "I1"], "m"),
        finding(CheckId.CQ26, ["D1"], "m"),
    ]
    data = json.loads(render_json(Report("M", findings=tuple(fs))))
    assert [(f["check"], f["elements"]) for f in data["findings"]] == [
        ("CQ16", ["Sarah", "G5", "I1"]),
        ("CQ26", ["D1"]),
        ("CQ26", ["D2"]),
    ]
    assert data["findings"][0]["kind"] == "Disclosure"


def test_cq1_text_line():
    report = Report("AAL", findings=(finding(CheckId.CQ1, ["DP1"], "permission delegated without trust or monitoring"),))
    assert "CQ1 DesignSmell: permission delegated without trust or monitoring [DP1]" in render_text(report).splitlines()


def test_warnings_come_before_the_summary():
    report = Report("M", diagnostics=(warning("WF-ISOLATED", "role 'R' takes part in nothing"),))
    lines = render_text(report).splitlines()
    assert lines[-1] == "0 violations, 0 query rows, 1 warnings, 0 errors"
    assert "WF-ISOLATED" in lines[-2]


def test_json_round_trip(fixtures_dir):
    for path in sorted(fixtures_dir.glob("*.cml")):
        report = check_file(str(path), AnalysisConfig())
        assert from_json(render_json(report)) == report


def test_unknown_schema_is_rejected():
    with pytest.raises(ValueError):
        from_json('{"schema":"copri-report/0","model":"M"}')


def test_text_and_json_show_the_same_findings(fixtures_dir):
    files = [str(p) for p in sorted(fixtures_dir.glob("*.cml"))]
    _, text, _ = cli("check", *files)
    _, js, _ = cli("check", "--format", "json", *files)
    assert text_multiset(text) == json_multiset(json.loads(js))
    assert sum(text_multiset(text).values()) > 0


# exit codes ------------------------------------------------------------------


def test_exit_code_table():
    clean = Report("M")
    violating = Report("M", findings=(finding(CheckId.CQ26, ["D"], "m"),))
    query = Report("M", findings=(finding(CheckId.CQ4, ["V", "I"], "m"),))
    warned = Report("M", diagnostics=(warning("WF-SELF", "m"),))
    broken = Report("M", diagnostics=(error("WF-SIG", "m"),))
    assert exit_code([clean]) == exit_code([query]) == exit_code([warned]) == 0
    assert exit_code([violating]) == 1
    assert exit_code([warned], FailOn.WARNING) == 1
    assert exit_code([violating], "never") == 0
    assert exit_code([broken], "never") == 2
    assert exit_code([clean, violating, broken]) == 2


def test_clean_aal(fixtures_dir):
    code, out, err = cli("check", str(fixtures_dir / "aal.cml"))
    assert code == 0 and err == ""
    assert out.splitlines()[-1].startswith("0 violations, ")


def test_no_adopt_exits_one(fixtures_dir):
    code, out, _ = cli("check", "--format", "json", str(fixtures_dir / "aal_no_adopt.cml"))
    assert code == 1
    violations = [f for f in json.loads(out)["findings"] if f["kind"] != FindingKind.QUERY_ROW.value]
    assert [(f["check"], f["elements"]) for f in violations] == [("CQ26", ["DP1"])]


def test_missing_file_exits_two_and_still_reports(tmp_path):
    missing = str(tmp_path / "missing.cml")
    code, out, err = cli("check", "--format", "json", missing)
    assert code == 2
    assert json.loads(out)["diagnostics"][0]["code"] == "FileNotFound"
    assert "FileNotFound" in err


def test_parse_error_exits_two(tmp_path):
    bad = tmp_path / "bad.cml"
    bad.write_text("role\n")
    code, out, err = cli("check", str(bad))
    assert code == 2 and "UnexpectedToken" in out and "UnexpectedToken" in err


def test_wellformedness_error_skips_analysis(tmp_path):
    cyclic = tmp_path / "cyclic.cml"
    cyclic.write_text("role A is_a B\nrole B is_a A\n")
    code, out, _ = cli("check", "--format", "json", str(cyclic))
    data = json.loads(out)
    assert code == 2 and data["findings"] == [] and data["diagnostics"][0]["code"] == "WF-CYCLE"


def test_multiple_files_give_an_array(fixtures_dir):
    code, out, _ = cli("check", "--format", "json", str(fixtures_dir / "aal.cml"), str(fixtures_dir / "aal_no_adopt.cml"))
    data = json.loads(out)
    assert code == 1 and [r["model"] for r in data] == ["AAL", "AAL"]


# options ---------------------------------------------------------------------


@pytest.mark.parametrize("argv", [["check", "x.cml", "--checks", "CQ99"], ["check"], ["lint"], ["check", "x", "--severity", "Q"]])
def test_usage_errors_exit_two(argv):
    code, out, err = cli(*argv)
    assert code == 2 and out == "" and err


def test_list_checks():
    code, out, _ = cli("check", "--list-checks")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 26
    assert lines[15].split() == ["CQ16", "nondisclosure-read", "Disclosure"]


def test_check_selection_and_filters(fixtures_dir):
    aal = str(fixtures_dir / "aal.cml")
    _, out, _ = cli("check", "--format", "json", "--checks", "CQ8,CQ13", "--severity", "H", "--probability", "L", aal)
    assert [(f["check"], f["elements"]) for f in json.loads(out)["findings"]] == [("CQ13", ["T2"])]
    _, out, _ = cli("check", "--format", "json", "--checks", "CQ3", "--sensitivity", "S", aal)
    assert [f["elements"] for f in json.loads(out)["findings"]] == [["I1"]]


def test_fail_on_never(fixtures_dir):
    code, _, _ = cli("check", "--fail-on", "never", str(fixtures_dir / "aal_no_adopt.cml"))
    assert code == 0


def test_parts_inherit_flag_clears_component_reads(tmp_path):
    model = tmp_path / "m.cml"
    model.write_text(
        "agent Jack\nagent Sarah\ngoal G aimedBy Sarah\n"
        "info Whole personal { owner Jack sensitivity C }\n"
        "info Part personal { owner Jack sensitivity S } partOf Whole\n"
        "permission P read over Whole heldBy Sarah\nuse G read Part\n"
    )
    assert cli("check", "--checks", "CQ16", str(model))[0] == 1
    assert cli("check", "--checks", "CQ16", "--parts-inherit-permissions", str(model))[0] == 0


def test_module_entry_point(fixtures_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "copri_lint.cli", "check", str(fixtures_dir / "aal.cml")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("model AAL")
