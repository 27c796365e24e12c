"""Textual schema format (.ssd): one declaration per line.

    objecttype <TypeName> [weight <w>]
    relationship <TypeName> [weight <w>] roles <role>:<player> [<role>:<player> ...]
    spec <Sub> <Super>
    poly <X> <Y>

'#' starts a comment; blank lines are ignored.  Weights are non-negative
rationals written as integers, finite decimals, or p/q; omitted weights
default to 1.  Parsing is total: any input yields either a schema that
passes validation or a located SchemaParseError.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import (
    DEFAULT_WEIGHT,
    ConceptualSchema,
    SchemaError,
    Violation,
    identifier_problem,
    validate_schema,
)


class SchemaParseError(SchemaError):
    """A parse or post-parse validation failure with a source location."""

    def __init__(self, line: int, column: int, message: str,
                 violations: list[LocatedViolation] | None = None):
        self.line = line
        self.column = column
        self.violations = violations or [LocatedViolation(line, column, message)]
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class LocatedViolation:
    line: int
    column: int
    message: str


def format_weight(w: Fraction) -> str:
    """Shortest exact text for a weight: integer, finite decimal, else p/q."""
    w = Fraction(w)
    if w.denominator == 1:
        return str(w.numerator)
    den = w.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{w.numerator}/{w.denominator}"
    digits = max(twos, fives)
    scaled = w.numerator * 10**digits // w.denominator
    text = str(scaled).rjust(digits + 1, "0")
    return f"{text[:-digits]}.{text[-digits:]}"


def parse_weight(token: str) -> Fraction:
    try:
        w = Fraction(token)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad weight {token!r}") from exc
    if w < 0:
        raise ValueError(f"weight must be non-negative, got {token!r}")
    return w


def _tokenize(line: str) -> list[tuple[str, int]]:
    """Split a line into (token, 1-based column) pairs; '#' starts a comment."""
    hash_pos = line.find("#")
    if hash_pos != -1:
        line = line[:hash_pos]
    tokens = []
    col = 0
    for raw in line.split():
        col = line.index(raw, col)
        tokens.append((raw, col + 1))
        col += len(raw)
    return tokens


class _Parser:
    def __init__(self) -> None:
        self.obj_types: list[str] = []
        self.relationships: dict[str, list[tuple[str, str]]] = {}
        self.spec: list[tuple[str, str]] = []
        self.poly: list[tuple[str, str]] = []
        self.weights: dict[str, Fraction] = {}
        # source lines for error reporting
        self.decl_line: dict[str, int] = {}
        self.role_line: dict[str, int] = {}
        self.mention_line: dict[str, int] = {}

    def fail(self, line: int, col: int, message: str) -> None:
        raise SchemaParseError(line, col, message)

    def check_new_type(self, name: str, lineno: int, col: int) -> None:
        problem = identifier_problem(name)
        if problem:
            self.fail(lineno, col, problem)
        if name in self.decl_line:
            self.fail(lineno, col, f"duplicate declaration of type {name}")
        self.decl_line[name] = lineno

    def parse_line(self, lineno: int, line: str) -> None:
        tokens = _tokenize(line)
        if not tokens:
            return
        keyword, col = tokens[0]
        rest = tokens[1:]
        if keyword == "objecttype":
            self.parse_objecttype(lineno, rest)
        elif keyword == "relationship":
            self.parse_relationship(lineno, rest)
        elif keyword in ("spec", "poly"):
            self.parse_pair(lineno, keyword, rest)
        else:
            self.fail(lineno, col, f"unknown declaration keyword {keyword!r}")

    def _take_weight(self, lineno: int, tokens: list[tuple[str, int]], name: str
                     ) -> list[tuple[str, int]]:
        if tokens and tokens[0][0] == "weight":
            if len(tokens) < 2:
                self.fail(lineno, tokens[0][1], "expected a value after 'weight'")
            value, col = tokens[1]
            try:
                self.weights[name] = parse_weight(value)
            except ValueError as exc:
                self.fail(lineno, col, str(exc))
            return tokens[2:]
        return tokens

    def parse_objecttype(self, lineno: int, tokens: list[tuple[str, int]]) -> None:
        if not tokens:
            self.fail(lineno, 1, "expected a type name after 'objecttype'")
        name, col = tokens[0]
        self.check_new_type(name, lineno, col)
        self.obj_types.append(name)
        leftover = self._take_weight(lineno, tokens[1:], name)
        if leftover:
            self.fail(lineno, leftover[0][1], f"unexpected token {leftover[0][0]!r}")

    def parse_relationship(self, lineno: int, tokens: list[tuple[str, int]]) -> None:
        if not tokens:
            self.fail(lineno, 1, "expected a type name after 'relationship'")
        name, col = tokens[0]
        self.check_new_type(name, lineno, col)
        tokens = self._take_weight(lineno, tokens[1:], name)
        if not tokens or tokens[0][0] != "roles":
            where = tokens[0] if tokens else (name, col)
            self.fail(lineno, where[1], "expected 'roles' clause in relationship declaration")
        pairs = tokens[1:]
        if not pairs:
            self.fail(lineno, tokens[0][1], f"relationship {name} declares no roles")
        role_pairs = []
        for raw, pcol in pairs:
            if raw.count(":") != 1:
                self.fail(lineno, pcol, f"expected <role>:<player>, got {raw!r}")
            role, player = raw.split(":")
            problem = identifier_problem(role) or identifier_problem(player)
            if problem:
                self.fail(lineno, pcol, problem)
            if role in self.role_line:
                self.fail(lineno, pcol, f"duplicate declaration of role {role}")
            self.role_line[role] = lineno
            self.mention_line.setdefault(player, lineno)
            role_pairs.append((role, player))
        self.relationships[name] = role_pairs

    def parse_pair(self, lineno: int, kind: str, tokens: list[tuple[str, int]]) -> None:
        if len(tokens) != 2:
            col = tokens[-1][1] if tokens else 1
            self.fail(lineno, col, f"'{kind}' takes exactly two type names")
        (a, col_a), (b, col_b) = tokens
        for name, col in ((a, col_a), (b, col_b)):
            problem = identifier_problem(name)
            if problem:
                self.fail(lineno, col, problem)
        target = self.spec if kind == "spec" else self.poly
        if (a, b) in target:
            self.fail(lineno, col_a, f"duplicate {kind} pair {a} {b}")
        target.append((a, b))
        self.mention_line.setdefault(a, lineno)
        self.mention_line.setdefault(b, lineno)

    def locate(self, violation: Violation) -> tuple[int, int]:
        subject = violation.subject
        line = (
            self.decl_line.get(subject)
            or self.role_line.get(subject)
            or self.mention_line.get(subject)
        )
        return (line or 1, 1)

    def finish(self) -> ConceptualSchema:
        schema = ConceptualSchema.build(
            obj_types=self.obj_types,
            relationships=self.relationships,
            spec=self.spec,
            poly=self.poly,
            weights=self.weights,
        )
        violations = validate_schema(schema)
        if violations:
            located = [
                LocatedViolation(*self.locate(v), v.message) for v in violations
            ]
            first = located[0]
            raise SchemaParseError(first.line, first.column, first.message, located)
        return schema


def parse_schema(text: str, source_name: str = "<string>") -> ConceptualSchema:
    """Parse schema text into a validated ConceptualSchema.

    Raises SchemaParseError (with line/column, and all located violations
    on ``.violations``) for both syntax and validation failures.
    """
    parser = _Parser()
    for lineno, line in enumerate(text.splitlines(), start=1):
        parser.parse_line(lineno, line)
    return parser.finish()


def serialize_schema(schema: ConceptualSchema) -> str:
    """Canonical text for a valid schema; parse(serialize(s)) equals s.

    Sections in order: objecttype, relationship, spec, poly; names sorted
    within each section; role order within a relationship preserved;
    weight clauses omitted when the weight is 1.
    """
    lines = []
    for t in sorted(schema.obj_types):
        lines.append(f"objecttype {t}" + _weight_clause(schema, t))
    for f in sorted(schema.rel_types):
        pairs = " ".join(f"{r}:{schema.player[r]}" for r in schema.roles.get(f, ()))
        lines.append(f"relationship {f}" + _weight_clause(schema, f) + f" roles {pairs}")
    for a, b in sorted(schema.spec):
        lines.append(f"spec {a} {b}")
    for a, b in sorted(schema.poly):
        lines.append(f"poly {a} {b}")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def _weight_clause(schema: ConceptualSchema, t: str) -> str:
    w = schema.cweight.get(t, DEFAULT_WEIGHT)
    if w == DEFAULT_WEIGHT:
        return ""
    return f" weight {format_weight(w)}"
