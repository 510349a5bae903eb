"""Recursive-descent parser for the project configuration language.

The concrete syntax is keyword-introduced and LL(1); the normative grammar
lives in docs/grammar.ebnf. Parsing is total: any input (including
arbitrary bytes) produces either a structurally complete model or a
non-empty list of diagnostics, never an unhandled crash.

Keywords are contextual, not reserved, so role or category names may
coincide with keywords (``roles { admin: admin }`` is legal).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import diagnostics as diag
from .diagnostics import Diagnostic, DslError
from .model import (
    ASSIGN_MODES,
    CONFLICT_STRATEGIES,
    EVIDENCE_KINDS,
    RANKS,
    VALIDATION_TARGETS,
    AssignmentPolicy,
    CategoryDecl,
    ConfigModel,
    ConflictPolicy,
    CriterionDecl,
    DependencyRef,
    DynamicListKind,
    ListKind,
    Loc,
    PhaseDecl,
    ProjectDecl,
    RoleDecl,
    SchemeDecl,
    ScreeningDecl,
    SimpleKind,
    SourceText,
    ValidationPolicy,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>-?[0-9]+(?:\.[0-9]+)?)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<badstring>"(?:[^"\\\n]|\\.)*)
  | (?P<arrow>->)
  | (?P<punct>[{}()\[\]:,*])
""",
    re.VERBOSE,
)

_STRING_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


@dataclass
class Token:
    kind: str  # word | number | string | punct | arrow | eof
    value: str
    loc: Loc


def _decode_string(raw: str) -> str:
    out = []
    i = 1
    while i < len(raw) - 1:
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw) - 1:
            out.append(_STRING_ESCAPES.get(raw[i + 1], raw[i + 1]))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(text: str, errors: list[Diagnostic]) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            errors.append(
                diag.error(diag.E_SYNTAX, f"unexpected character {text[pos]!r}", Loc(line, col))
            )
            pos += 1
            col += 1
            continue
        kind = m.lastgroup
        value = m.group()
        loc = Loc(line, col)
        if kind == "badstring":
            errors.append(diag.error(diag.E_SYNTAX, "unterminated string literal", loc))
        elif kind == "word":
            if not re.fullmatch(r"[a-z][a-z0-9_]*", value):
                errors.append(
                    diag.error(
                        diag.E_SYNTAX,
                        f"identifiers must be lowercase snake_case, got {value!r}",
                        loc,
                    )
                )
            elif len(value) > 32:
                errors.append(
                    diag.error(diag.E_SYNTAX, f"identifier {value!r} exceeds 32 characters", loc)
                )
            tokens.append(Token("word", value.lower(), loc))
        elif kind == "string":
            tokens.append(Token("string", _decode_string(value), loc))
        elif kind == "number":
            tokens.append(Token("number", value, loc))
        elif kind in ("punct", "arrow"):
            tokens.append(Token(kind if kind == "arrow" else "punct", value, loc))
        # ws / comment: skipped
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(Token("eof", "", Loc(line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], errors: list[Diagnostic]):
        self.tokens = tokens
        self.errors = errors
        self.pos = 0

    # -- token plumbing ------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str, value: str | None = None) -> bool:
        t = self.cur
        return t.kind == kind and (value is None or t.value == value)

    def at_word(self, *values: str) -> bool:
        return self.cur.kind == "word" and self.cur.value in values

    def advance(self) -> Token:
        t = self.cur
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, message: str, loc: Loc | None = None, code: str = diag.E_SYNTAX):
        if self.cur.kind == "eof" and code == diag.E_SYNTAX and loc is None:
            code = diag.E_EOF
        self.errors.append(diag.error(code, message, loc or self.cur.loc))

    def expect(self, kind: str, value: str | None = None, what: str = "") -> Token | None:
        if self.at(kind, value):
            return self.advance()
        want = what or (value if value is not None else kind)
        got = self.cur.value or self.cur.kind
        self.fail(f"expected {want!r}, got {got!r}")
        return None

    def expect_word(self, value: str) -> Token | None:
        return self.expect("word", value)

    def expect_ident(self, what: str = "identifier") -> str | None:
        if self.cur.kind == "word":
            return self.advance().value
        self.fail(f"expected {what}, got {self.cur.value or self.cur.kind!r}")
        return None

    def expect_string(self, what: str = "quoted string") -> str | None:
        if self.cur.kind == "string":
            return self.advance().value
        self.fail(f"expected {what}, got {self.cur.value or self.cur.kind!r}")
        return None

    def expect_choice(self, options: tuple[str, ...], what: str) -> str | None:
        if self.cur.kind == "word" and self.cur.value in options:
            return self.advance().value
        self.fail(f"expected {what} (one of {', '.join(options)})")
        return None

    def expect_int(self, what: str = "integer") -> int | None:
        if self.cur.kind == "number" and "." not in self.cur.value:
            return int(self.advance().value)
        self.fail(f"expected {what}")
        if self.cur.kind == "number":
            self.advance()
        return None

    def expect_number(self, what: str = "number") -> float | None:
        if self.cur.kind == "number":
            return float(self.advance().value)
        self.fail(f"expected {what}")
        return None

    def open_brace(self) -> Loc | None:
        tok = self.expect("punct", "{")
        return tok.loc if tok else None

    def close_brace(self, open_loc: Loc | None):
        if self.at("punct", "}"):
            self.advance()
            return
        if self.cur.kind == "eof":
            # Report the unbalanced brace where it was opened.
            self.fail("unclosed '{'", loc=open_loc)
        else:
            self.fail("expected '}'")
            self.sync_to_brace()

    def sync_to_brace(self):
        """Panic-mode recovery: skip to the next '}' at this nesting level."""
        depth = 0
        while self.cur.kind != "eof":
            v = self.cur.value
            if v == "{":
                depth += 1
            elif v == "}":
                if depth == 0:
                    self.advance()
                    return
                depth -= 1
            self.advance()

    # -- grammar productions -------------------------------------------

    def parse_model(self) -> ConfigModel | None:
        project = self.parse_project()
        roles = self.parse_roles()
        screening = self.parse_screening()
        scheme = self.parse_classification()
        if self.cur.kind != "eof":
            self.fail(f"unexpected trailing input {self.cur.value!r}")
        if project is None or screening is None or scheme is None:
            return None
        project.roles = roles if roles is not None else []
        if roles is None:
            return None
        return ConfigModel(project=project, screening=screening, scheme=scheme)

    def parse_project(self) -> ProjectDecl | None:
        loc = self.cur.loc
        if not self.expect_word("project"):
            return None
        name = self.expect_ident("project name")
        label = self.expect_string("project label")
        if name is None or label is None:
            return None
        return ProjectDecl(name=name, label=label, roles=[], loc=loc)

    def parse_roles(self) -> list[RoleDecl] | None:
        if not self.expect_word("roles"):
            return None
        open_loc = self.open_brace()
        roles: list[RoleDecl] = []
        while self.cur.kind == "word":
            loc = self.cur.loc
            name = self.advance().value
            if not self.expect("punct", ":"):
                self.sync_to_brace()
                return roles
            rank = self.expect_choice(RANKS, "role rank")
            if rank is None:
                self.sync_to_brace()
                return roles
            roles.append(RoleDecl(name=name, rank=rank, loc=loc))
        if not roles:
            self.fail("at least one role is required")
        self.close_brace(open_loc)
        return roles

    def parse_screening(self) -> ScreeningDecl | None:
        loc = self.cur.loc
        if not self.expect_word("screening"):
            return None
        open_loc = self.open_brace()
        phases = self.parse_phases()
        assignment = self.parse_assign()
        conflict = self.parse_conflict()
        validation = None
        if self.at_word("validation"):
            validation = self.parse_validation()
        criteria = self.parse_exclusion()
        self.close_brace(open_loc)
        if phases is None or assignment is None or conflict is None or criteria is None:
            return None
        return ScreeningDecl(
            phases=phases,
            assignment=assignment,
            conflict=conflict,
            validation=validation,
            exclusion_criteria=criteria,
            loc=loc,
        )

    def parse_phases(self) -> list[PhaseDecl] | None:
        if not self.expect_word("phases"):
            return None
        open_loc = self.open_brace()
        phases: list[PhaseDecl] = []
        while self.cur.kind == "word" and not self.at_word(
            "assign", "conflict", "validation", "exclusion"
        ):
            loc = self.cur.loc
            name = self.advance().value
            if not self.expect("punct", ":"):
                self.sync_to_brace()
                return phases or None
            evidence = self.expect_choice(EVIDENCE_KINDS, "screening evidence")
            if evidence is None:
                self.sync_to_brace()
                return phases or None
            phases.append(PhaseDecl(name=name, evidence=evidence, loc=loc))
        if not phases:
            self.fail("at least one screening phase is required")
        self.close_brace(open_loc)
        return phases or None

    def parse_assign(self) -> AssignmentPolicy | None:
        loc = self.cur.loc
        if not self.expect_word("assign"):
            return None
        open_loc = self.open_brace()
        self.expect_word("mode")
        mode = self.expect_choice(ASSIGN_MODES, "assignment mode")
        self.expect_word("reviewers")
        count = self.expect_int("reviewer count")
        self.close_brace(open_loc)
        if mode is None or count is None:
            return None
        return AssignmentPolicy(mode=mode, reviewers_per_paper=count, loc=loc)

    def parse_conflict(self) -> ConflictPolicy | None:
        loc = self.cur.loc
        if not self.expect_word("conflict"):
            return None
        open_loc = self.open_brace()
        self.expect_word("strategy")
        strategy = self.expect_choice(CONFLICT_STRATEGIES, "conflict strategy")
        arbiter = None
        if self.at_word("arbiter"):
            self.advance()
            arbiter = self.expect_ident("arbiter role")
        elif strategy in ("unanimity", "arbiter"):
            self.fail(f"strategy {strategy!r} requires 'arbiter <role>'")
        self.close_brace(open_loc)
        if strategy is None:
            return None
        return ConflictPolicy(strategy=strategy, arbiter_role=arbiter, loc=loc)

    def parse_validation(self) -> ValidationPolicy | None:
        loc = self.cur.loc
        self.expect_word("validation")
        open_loc = self.open_brace()
        self.expect_word("percent")
        percent = self.expect_number("percentage")
        self.expect_word("target")
        target = self.expect_choice(VALIDATION_TARGETS, "validation target")
        self.expect_word("validator")
        role = self.expect_ident("validator role")
        self.close_brace(open_loc)
        if percent is None or target is None or role is None:
            return None
        return ValidationPolicy(percentage=percent, target=target, validator_role=role, loc=loc)

    def parse_exclusion(self) -> list[CriterionDecl] | None:
        if not self.expect_word("exclusion"):
            return None
        open_loc = self.open_brace()
        criteria: list[CriterionDecl] = []
        while self.cur.kind == "string":
            loc = self.cur.loc
            criteria.append(CriterionDecl(text=self.advance().value, loc=loc))
        if not criteria:
            self.fail("at least one exclusion criterion is required")
        self.close_brace(open_loc)
        return criteria or None

    def parse_classification(self) -> SchemeDecl | None:
        loc = self.cur.loc
        if not self.expect_word("classification"):
            return None
        open_loc = self.open_brace()
        categories = self.parse_categories()
        self.close_brace(open_loc)
        if categories is None:
            return None
        return SchemeDecl(categories=categories, loc=loc)

    def parse_categories(self) -> list[CategoryDecl] | None:
        cats: list[CategoryDecl] = []
        ok = True
        while self.at_word("simple", "list", "dynamiclist"):
            cat = self.parse_category()
            if cat is None:
                ok = False
                break
            cats.append(cat)
        return cats if ok else None

    def parse_category(self) -> CategoryDecl | None:
        loc = self.cur.loc
        kw = self.advance().value  # simple | list | dynamiclist
        name = self.expect_ident("category name")
        title = self.expect_string("category title")
        if not self.expect("punct", ":"):
            return None
        if kw == "simple":
            kind = self.parse_simple_type()
        else:
            choices = self.parse_string_tuple("choice")
            if choices is None:
                return None
            kind = ListKind(choices) if kw == "list" else DynamicListKind(choices)
        if kind is None or name is None or title is None:
            return None
        cat = CategoryDecl(name=name, title=title, kind=kind, loc=loc)
        if not self.parse_suffixes(cat):
            return None
        return cat

    def parse_simple_type(self) -> SimpleKind | None:
        vt = self.expect_choice(("text", "bool", "int", "real", "date"), "value type")
        if vt is None:
            return None
        kind = SimpleKind(value_type=vt)
        if vt == "text":
            if self.at("punct", "("):
                self.advance()
                kind.max_length = self.expect_int("maximum length")
                self.expect("punct", ")")
            if self.at_word("pattern"):
                self.advance()
                kind.pattern = self.expect_string("pattern")
        elif vt in ("int", "real"):
            if self.at_word("range"):
                self.advance()
                self.expect("punct", "(")
                if vt == "int":
                    lo = self.expect_int("range minimum")
                    self.expect("punct", ",")
                    hi = self.expect_int("range maximum")
                else:
                    lo = self.expect_number("range minimum")
                    self.expect("punct", ",")
                    hi = self.expect_number("range maximum")
                self.expect("punct", ")")
                if lo is None or hi is None:
                    return None
                kind.range = (lo, hi)
        return kind

    def parse_string_tuple(self, what: str) -> list[str] | None:
        if not self.expect("punct", "(", what=f"'(' opening the {what} list"):
            return None
        items: list[str] = []
        if self.cur.kind == "string":
            items.append(self.advance().value)
            while self.at("punct", ","):
                self.advance()
                s = self.expect_string(what)
                if s is None:
                    return None
                items.append(s)
        if not self.expect("punct", ")"):
            return None
        return items

    def parse_suffixes(self, cat: CategoryDecl) -> bool:
        seen_star = seen_mult = False
        while True:
            if self.at("punct", "*"):
                if seen_star:
                    self.fail("duplicate '*' suffix")
                cat.mandatory = True
                seen_star = True
                self.advance()
            elif self.at("punct", "["):
                if seen_mult:
                    self.fail("duplicate multiplicity suffix")
                self.advance()
                n = self.expect_int("multiplicity")
                self.expect("punct", "]")
                if n is None or n < 0:
                    self.fail("multiplicity must be a non-negative integer")
                    return False
                cat.multiplicity = n
                seen_mult = True
            else:
                break
        if self.at_word("depends"):
            dep = self.parse_depends()
            if dep is None:
                return False
            cat.depends_on = dep
        if self.at("punct", "{"):
            open_loc = self.advance().loc
            subs = self.parse_categories()
            self.close_brace(open_loc)
            if subs is None:
                return False
            cat.subcategories = subs
        return True

    def parse_depends(self) -> DependencyRef | None:
        loc = self.cur.loc
        self.expect_word("depends")
        self.expect_word("on")
        parent = self.expect_ident("parent category")
        if parent is None or not self.expect("punct", "("):
            return None
        mapping: dict[str, list[str]] = {}
        while True:
            key = self.expect_string("parent choice")
            if key is None or not self.expect("arrow", what="'->'"):
                return None
            open_tok = self.expect("punct", "{")
            if open_tok is None:
                return None
            allowed: list[str] = []
            if self.cur.kind == "string":
                allowed.append(self.advance().value)
                while self.at("punct", ","):
                    self.advance()
                    s = self.expect_string("allowed choice")
                    if s is None:
                        return None
                    allowed.append(s)
            self.close_brace(open_tok.loc)
            mapping[key] = allowed
            if self.at("punct", ","):
                self.advance()
                continue
            break
        if not self.expect("punct", ")"):
            return None
        return DependencyRef(parent=parent, mapping=mapping, loc=loc)


def parse(source: str | bytes | SourceText, origin: str = "<string>") -> ConfigModel:
    """Parse configuration source into a model.

    Raises DslError carrying one or more diagnostics on any failure;
    never propagates other exceptions, whatever the input bytes.
    """
    if isinstance(source, SourceText):
        origin = source.origin
        source = source.content
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DslError(
                [diag.error(diag.E_ENCODING, f"input is not valid UTF-8: {exc.reason}", Loc(1, 1))]
            ) from None
    errors: list[Diagnostic] = []
    if not source.strip():
        raise DslError([diag.error(diag.E_EOF, "empty source", Loc(1, 1))])
    tokens = tokenize(source, errors)
    model = _Parser(tokens, errors).parse_model()
    if errors:
        raise DslError(errors)
    if model is None:
        # Defensive: a None model without diagnostics must still fail loudly.
        raise DslError([diag.error(diag.E_SYNTAX, "could not parse source", Loc(1, 1))])
    return model
