"""copri-lint: parse, validate and analyze COPri privacy requirements models."""

from .analysis import (
    AnalysisConfig,
    CheckId,
    Finding,
    FindingKind,
    UnknownCheckId,
    parse_check_ids,
    risk_query,
    run_all,
    treatment_query,
)
from .cml import parse_model
from .diagnostics import Diagnostic, DiagnosticError, Severity, SourceSpan
from .model import ModelBuilder, ModelGraph, effective_permissions, role_closure, transitive_parts
from .report import Report, from_json, render_json, render_text
from .wellformedness import check_wellformedness

__all__ = [
    "AnalysisConfig",
    "CheckId",
    "Diagnostic",
    "DiagnosticError",
    "Finding",
    "FindingKind",
    "ModelBuilder",
    "ModelGraph",
    "Report",
    "Severity",
    "SourceSpan",
    "UnknownCheckId",
    "check_wellformedness",
    "effective_permissions",
    "from_json",
    "parse_check_ids",
    "parse_model",
    "render_json",
    "render_text",
    "risk_query",
    "role_closure",
    "run_all",
    "transitive_parts",
    "treatment_query",
]
