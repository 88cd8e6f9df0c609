"""Recursive-descent parser for CML with statement-level error recovery."""

from __future__ import annotations

from dataclasses import replace

from ..diagnostics import Diagnostic, SourceSpan, error
from . import ast as A
from .lexer import STATEMENT_KEYWORDS, Token, TokenType, tokenize

USE_TYPES = ("produce", "read", "modify", "collect")
SENSITIVITY_LETTERS = ("R", "C", "S", "T")
LEVEL_LETTERS = ("L", "M", "H")
REQUIREMENT_KINDS = (
    "confidentiality",
    "anonymity",
    "unlinkability",
    "unobservability",
    "notice",
    "transparency",
    "accountability",
)


class _SyntaxError(Exception):
    def __init__(self, diagnostic: Diagnostic) -> None:
        self.diagnostic = diagnostic


class Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type is not TokenType.EOF:
            self.pos += 1
        return tok

    def at(self, *words: str) -> bool:
        return self.tok.type is TokenType.KEYWORD and self.tok.value in words

    def at_punct(self, ch: str) -> bool:
        return self.tok.type is TokenType.PUNCT and self.tok.value == ch

    def fail(self, code: str, message: str) -> _SyntaxError:
        span = self.tok.span
        if self.pos > 0:
            prev = self.tokens[self.pos - 1].span
            if self.tok.type is TokenType.EOF or span.line > prev.line:
                # something is missing at the end of the previous line
                span = SourceSpan(prev.file, prev.line, prev.column + prev.length, 1)
        return _SyntaxError(error(code, message, span))

    def keyword(self, *words: str) -> Token:
        if self.at(*words):
            return self.advance()
        expected = " or ".join(f"'{w}'" for w in words)
        return self._raise("MissingClause", f"expected {expected}, found {self.tok}")

    def choice(self, words: tuple[str, ...], what: str) -> str:
        if self.at(*words):
            return self.advance().value
        options = ", ".join(words)
        return self._raise("UnexpectedToken", f"expected {what} ({options}), found {self.tok}")

    def letter(self, letters: tuple[str, ...], what: str) -> str:
        if self.tok.type is TokenType.IDENT and self.tok.value in letters:
            return self.advance().value
        return self._raise("UnexpectedToken", f"expected {what} ({'|'.join(letters)}), found {self.tok}")

    def punct(self, ch: str) -> Token:
        if self.at_punct(ch):
            return self.advance()
        return self._raise("UnexpectedToken", f"expected '{ch}', found {self.tok}")

    def ident(self, what: str = "identifier") -> A.Ident:
        if self.tok.type is TokenType.IDENT:
            tok = self.advance()
            return A.Ident(tok.value, tok.span)
        return self._raise("UnexpectedToken", f"expected {what}, found {self.tok}")

    def ident_list(self, what: str = "identifier") -> tuple[A.Ident, ...]:
        items = [self.ident(what)]
        while self.at_punct(","):
            self.advance()
            items.append(self.ident(what))
        return tuple(items)

    def label(self) -> str | None:
        if self.tok.type is TokenType.STRING:
            return self.advance().value
        return None

    def _raise(self, code: str, message: str):
        raise self.fail(code, message)

    # -- driver ------------------------------------------------------------

    def _at_statement_start(self) -> bool:
        if self.tok.type is TokenType.EOF:
            return True
        if not (self.tok.type is TokenType.KEYWORD and self.tok.value in STATEMENT_KEYWORDS):
            return False
        return self.pos == 0 or self.tokens[self.pos - 1].span.line < self.tok.span.line

    def _starts_line(self) -> bool:
        return self.tok.type is TokenType.IDENT and self.tokens[self.pos - 1].span.line < self.tok.span.line

    def _synchronize(self, start: int) -> None:
        if self.pos == start:
            self.advance()
        while not self._at_statement_start():
            self.advance()

    def parse(self) -> A.Ast:
        file = self.tok.span.file
        statements: list[A.Statement] = []
        while self.tok.type is not TokenType.EOF:
            start = self.pos
            try:
                stmt = self.statement(first=not statements)
            except _SyntaxError as exc:
                self.diagnostics.append(exc.diagnostic)
                self._synchronize(start)
                continue
            statements.append(stmt)
            if not (self.tok.type is TokenType.EOF or self.at(*STATEMENT_KEYWORDS) or self._starts_line()):
                self.diagnostics.append(
                    error("UnexpectedToken", f"unexpected {self.tok} after declaration", self.tok.span)
                )
                self._synchronize(self.pos)
        return A.Ast(tuple(statements), file)

    def statement(self, first: bool) -> A.Statement:
        tok = self.tok
        if tok.type is TokenType.KEYWORD and tok.value in STATEMENT_KEYWORDS:
            if tok.value == "model" and not first:
                self._raise("UnexpectedToken", "the model header must be the first declaration")
            self.advance()
            stmt = getattr(self, "_" + tok.value)()
            return replace(stmt, span=_cover(tok.span, self.tokens[self.pos - 1].span))
        if tok.type in (TokenType.IDENT, TokenType.KEYWORD):
            raise _SyntaxError(error("UnknownKeyword", f"unknown declaration keyword '{tok.value}'", tok.span))
        raise _SyntaxError(error("UnexpectedToken", f"expected a declaration, found {tok}", tok.span))

    # -- declarations ------------------------------------------------------

    def _model(self) -> A.ModelDecl:
        return A.ModelDecl(self.label())

    def _role(self) -> A.RoleDecl:
        ident, label = self.ident("role id"), self.label()
        is_a = None
        if self.at("is_a"):
            self.advance()
            is_a = self.ident("role id")
        return A.RoleDecl(ident, label, is_a)

    def _agent(self) -> A.AgentDecl:
        ident, label = self.ident("agent id"), self.label()
        plays: tuple[A.Ident, ...] = ()
        if self.at("plays"):
            self.advance()
            plays = self.ident_list("role id")
        return A.AgentDecl(ident, label, plays)

    def _goal(self) -> A.GoalDecl:
        ident, label = self.ident("goal id"), self.label()
        aimed_by = None
        if self.at("aimedBy"):
            self.advance()
            aimed_by = self.ident("actor id")
        decomposition, subgoals = None, ()
        if self.at_punct("{"):
            self.advance()
            decomposition = self.choice(("and", "or"), "decomposition type")
            self.punct("[")
            subgoals = self.ident_list("goal id")
            self.punct("]")
            self.punct("}")
        return A.GoalDecl(ident, label, aimed_by, decomposition, subgoals)

    def _info(self) -> A.InfoDecl:
        ident, label = self.ident("information id"), self.label()
        kind = self.choice(("personal", "public"), "information type")
        owner = sensitivity = None
        if kind == "personal":
            self.punct("{")
            self.keyword("owner")
            owner = self.ident("actor id")
            self.keyword("sensitivity")
            sensitivity = self.letter(SENSITIVITY_LETTERS, "sensitivity level")
            self.punct("}")
        part_of = None
        if self.at("partOf"):
            self.advance()
            part_of = self.ident("information id")
        return A.InfoDecl(ident, label, kind == "personal", owner, sensitivity, part_of)

    def _use(self) -> A.UseDecl:
        goal = self.ident("goal id")
        use_type = self.choice(USE_TYPES, "type of use")
        info = self.ident("information id")
        need = purpose = None
        if self.at_punct("{"):
            self.advance()
            if self.at("need"):
                self.advance()
                need = self.choice(("required", "optional"), "need to use")
            if self.at("purpose"):
                self.advance()
                purpose = self.choice(("compatible", "incompatible"), "purpose of use")
            self.punct("}")
        return A.UseDecl(goal, use_type, info, need, purpose)

    def _permission(self) -> A.PermissionDecl:
        ident, label = self.ident("permission id"), self.label()
        ptype = self.choice(USE_TYPES, "permission type")
        self.keyword("over")
        over = self.ident("information id")
        self.keyword("heldBy")
        holder = self.ident("actor id")
        return A.PermissionDecl(ident, ptype, over, holder, label)

    def _provision(self) -> A.ProvisionDecl:
        ident, label = self.ident("provision id"), self.label()
        self.keyword("of")
        of = self.ident("information id")
        self.keyword("from")
        by = self.ident("actor id")
        self.keyword("to")
        to = self.ident("actor id")
        ptype = self.choice(("confidential", "nonconfidential"), "provision type")
        return A.ProvisionDecl(ident, of, by, to, ptype == "confidential", label)

    def _delegate(self) -> A.DelegateDecl:
        kind = self.choice(("goal", "permission"), "delegation type")
        ident, label = self.ident("delegation id"), self.label()
        self.keyword("from")
        delegator = self.ident("actor id")
        self.keyword("to")
        delegatee = self.ident("actor id")
        self.keyword("of")
        delegatum = self.ident(f"{kind} id")
        return A.DelegateDecl(kind, ident, delegator, delegatee, delegatum, label)

    def _adopt(self) -> A.AdoptDecl:
        return A.AdoptDecl(self.ident("actor id"), self.ident("delegation id"))

    def _trust(self) -> A.TrustDecl:
        ident, label = self.ident("trust id"), self.label()
        self.keyword("from")
        trustor = self.ident("actor id")
        self.keyword("to")
        trustee = self.ident("actor id")
        self.keyword("on")
        kind = self.choice(("goal", "permission"), "trust type")
        trustum = self.ident(f"{kind} id")
        self.keyword("level")
        level = self.choice(("trust", "distrust"), "trust level")
        return A.TrustDecl(ident, trustor, trustee, kind, trustum, level, label)

    def _monitor(self) -> A.MonitorDecl:
        ident, label = self.ident("monitor id"), self.label()
        self.keyword("by")
        monitor = self.ident("actor id")
        self.keyword("of")
        monitoree = self.ident("actor id")
        self.keyword("on")
        kind = self.choice(("goal", "permission"), "monitor type")
        subject = self.ident(f"{kind} id")
        return A.MonitorDecl(ident, monitor, monitoree, kind, subject, label)

    def _vulnerability(self) -> A.VulnerabilityDecl:
        ident, label = self.ident("vulnerability id"), self.label()
        self.keyword("on")
        return A.VulnerabilityDecl(ident, self.ident_list("information id"), label)

    def _threat(self) -> A.ThreatDecl:
        kind = self.choice(("intentional", "incidental"), "threat type")
        ident, label = self.ident("threat id"), self.label()
        self.punct("{")
        threatens: list[A.Ident] = []
        exploits: list[A.Ident] = []
        actors: list[A.Ident] = []
        methods: list[A.Ident] = []
        impacts: list[A.ImpactClause] = []
        probability = None
        # clauses may come in any order; semantic completeness is checked later
        while not self.at_punct("}"):
            if self.at("threatens"):
                self.advance()
                threatens.extend(self.ident_list("information id"))
            elif self.at("exploits"):
                self.advance()
                exploits.extend(self.ident_list("vulnerability id"))
            elif self.at("actor"):
                self.advance()
                actors.append(self.ident("actor id"))
            elif self.at("method"):
                self.advance()
                methods.append(self.ident("attack method id"))
            elif self.at("probability"):
                if probability is not None:
                    self._raise("DuplicateClause", "probability given more than once")
                self.advance()
                probability = self.letter(LEVEL_LETTERS, "probability level")
            elif self.at("impact"):
                start = self.advance().span
                self.keyword("severity")
                severity = self.letter(LEVEL_LETTERS, "severity level")
                self.keyword("over")
                over = self.ident("information id")
                impacts.append(A.ImpactClause(severity, over, _cover(start, over.span)))
            else:
                self._raise(
                    "UnexpectedToken",
                    f"expected a threat clause (threatens, exploits, actor, method, "
                    f"probability, impact) or '}}', found {self.tok}",
                )
        self.advance()
        return A.ThreatDecl(
            kind,
            ident,
            label,
            tuple(threatens),
            tuple(exploits),
            tuple(actors),
            tuple(methods),
            probability,
            tuple(impacts),
        )

    def _attackmethod(self) -> A.AttackMethodDecl:
        return A.AttackMethodDecl(self.ident("attack method id"), self.label())

    def _privacygoal(self) -> A.PrivacyGoalDecl:
        ident, label = self.ident("privacy goal id"), self.label()
        mitigates = realized_by = ()
        if self.at("mitigates"):
            self.advance()
            mitigates = self.ident_list("vulnerability id")
        if self.at("realizedBy"):
            self.advance()
            realized_by = self.ident_list("privacy constraint id")
        return A.PrivacyGoalDecl(ident, label, mitigates, realized_by)

    def _policy(self) -> A.PolicyDecl:
        return A.PolicyDecl(self.ident("policy id"), self.label())

    def _mechanism(self) -> A.MechanismDecl:
        ident, label = self.ident("mechanism id"), self.label()
        self.keyword("capability")
        capability = self.choice(("anonymize", "unlink", "other"), "capability")
        applied_to = ()
        if self.at("appliedTo"):
            self.advance()
            applied_to = self.ident_list("information id")
        return A.MechanismDecl(ident, capability, label, applied_to)

    def _requirement(self) -> A.RequirementDecl:
        kind = self.choice(REQUIREMENT_KINDS, "requirement type")
        ident, label = self.ident("requirement id"), self.label()
        self.keyword("concerning")
        concerning = self.ident("information id")
        interpreted_by = ()
        if self.at("interpretedBy"):
            self.advance()
            interpreted_by = self.ident_list("privacy goal id")
        return A.RequirementDecl(kind, ident, concerning, label, interpreted_by)

    def _describes(self) -> A.DescribesDecl:
        return A.DescribesDecl(self.ident("information id"), self.ident("goal id"))

    def _situation(self) -> A.SituationDecl:
        ident, label = self.ident("situation id"), self.label()
        self.keyword("determines")
        pairs = [(self.ident("information id"), self.letter(SENSITIVITY_LETTERS, "sensitivity level"))]
        while self.at_punct(","):
            self.advance()
            pairs.append((self.ident("information id"), self.letter(SENSITIVITY_LETTERS, "sensitivity level")))
        return A.SituationDecl(ident, tuple(pairs), label)


def _cover(start: SourceSpan, end: SourceSpan) -> SourceSpan:
    """Span from ``start`` to the end of ``end``, clipped to the first line."""
    if end.line != start.line:
        return start
    return SourceSpan(start.file, start.line, start.column, end.column + end.length - start.column)


def parse(tokens: list[Token]) -> tuple[A.Ast, list[Diagnostic]]:
    """Parse a token stream. Always returns the statements it could recover."""
    parser = Parser(tokens)
    tree = parser.parse()
    return tree, parser.diagnostics


def parse_text(text: str, file: str = "<input>") -> tuple[A.Ast, list[Diagnostic]]:
    tokens, lex_diagnostics = tokenize(text, file)
    tree, parse_diagnostics = parse(tokens)
    return tree, lex_diagnostics + parse_diagnostics
