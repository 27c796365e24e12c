"""Path expressions compiled from spider query trees.

The expression language has four forms: type atoms, role steps (forward
or reversed), concatenation, and the n-ary confluence ``[a1: e1, ...,
an: en; Head]`` that merges branch expressions at a shared head type.

A tree edge parent->child with label l compiles to

    child-expression  <connector(l, parent-type)>  parent-type

where the connector is empty for spec/poly edges, a forward role step
when the parent is the relationship type owning the role, and a reversed
role step otherwise.  An internal tree node compiles to a confluence over
its outgoing edges; a leaf compiles to its type atom.

The concrete syntax emitted by render() is stable and parseable:
atoms and forward steps are bare names, reversed steps are ~name,
concatenation is ' o ', confluence is '[a1: e1, ..., an: en; Head]'.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Union

from .engine import SpiderGraph, SpiderEdge
from .model import ConceptualSchema, SPEC_LABEL, POLY_LABEL, label_kind


class ExprError(ValueError):
    pass


class ExprParseError(ExprError):
    pass


@dataclass(frozen=True)
class TypeAtom:
    name: str


@dataclass(frozen=True)
class RoleStep:
    role: str
    reversed: bool = False


@dataclass(frozen=True)
class Concat:
    parts: tuple[PathExpression, ...]


@dataclass(frozen=True)
class Confluence:
    branches: tuple[tuple[str, PathExpression], ...]
    head: str


PathExpression = Union[TypeAtom, RoleStep, Concat, Confluence]


def concat(*parts: PathExpression) -> PathExpression:
    """Concatenation with direct nesting flattened; one part stays bare."""
    flat: list[PathExpression] = []
    for p in parts:
        if isinstance(p, Concat):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Concat(tuple(flat))


class AttrNamer:
    """Issues attribute names unique per expression tree.

    Base names (child types) get a numeric suffix starting at 1, always,
    so regenerating an expression yields identical names.
    """

    def __init__(self) -> None:
        self.counters: dict[str, int] = {}

    def fresh(self, base: str) -> str:
        n = self.counters.get(base, 1)
        self.counters[base] = n + 1
        return f"{base}{n}"


def connector(label: str, parent_type: str, schema: ConceptualSchema) -> RoleStep | None:
    """The step joining a child expression to its parent type.

    spec/poly edges need no step (plain concatenation).  A role owned by
    the parent (a relationship type) is walked forward; any other role is
    walked in reverse.
    """
    if label_kind(label) != "role":
        return None
    if label not in schema.player:
        raise ExprError(f"unknown role label {label!r}")
    if parent_type in schema.rel_types and label in schema.roles.get(parent_type, ()):
        return RoleStep(label, reversed=False)
    return RoleStep(label, reversed=True)


def path_seg(g: SpiderGraph, edge: SpiderEdge, schema: ConceptualSchema,
             namer: AttrNamer) -> PathExpression:
    """Compile one tree edge: child expression, connector, parent type."""
    step = connector(edge.label, g.node_types[edge.parent], schema)
    child = node_expr(g, edge.child, schema, namer)
    parent_atom = TypeAtom(g.node_types[edge.parent])
    if step is None:
        return concat(child, parent_atom)
    return concat(child, step, parent_atom)


def node_expr(g: SpiderGraph, n: int, schema: ConceptualSchema,
              namer: AttrNamer) -> PathExpression:
    """A leaf is its type atom; an inner node is a confluence over its edges.

    Branches follow child id order; attribute names are seeded with the
    child's type name.
    """
    kids = g.children(n)
    if not kids:
        return TypeAtom(g.node_types[n])
    branches = []
    for e in kids:
        attr = namer.fresh(g.node_types[e.child])
        branches.append((attr, path_seg(g, e, schema, namer)))
    return Confluence(tuple(branches), head=g.node_types[n])


def root_expr(g: SpiderGraph, schema: ConceptualSchema) -> PathExpression:
    """The complete path expression: the root's node expression."""
    return node_expr(g, g.root, schema, AttrNamer())


def render(e: PathExpression) -> str:
    if isinstance(e, TypeAtom):
        return e.name
    if isinstance(e, RoleStep):
        return f"~{e.role}" if e.reversed else e.role
    if isinstance(e, Concat):
        return " o ".join(render(p) for p in e.parts)
    if isinstance(e, Confluence):
        inner = ", ".join(f"{a}: {render(x)}" for a, x in e.branches)
        return f"[{inner}; {e.head}]"
    raise ExprError(f"not a path expression: {e!r}")


def type_occurrences(e: PathExpression) -> Counter:
    """Multiset of type occurrences: atoms plus confluence heads."""
    out: Counter = Counter()
    if isinstance(e, TypeAtom):
        out[e.name] += 1
    elif isinstance(e, Concat):
        for p in e.parts:
            out += type_occurrences(p)
    elif isinstance(e, Confluence):
        out[e.head] += 1
        for _, x in e.branches:
            out += type_occurrences(x)
    return out


# --- parser for the render syntax -------------------------------------------

_PUNCT = "[],;:"


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _PUNCT:
            tokens.append(("punct", c))
            i += 1
            continue
        j = i
        if text[j] == "~":
            j += 1
        start = j
        while j < len(text) and not text[j].isspace() and text[j] not in _PUNCT and text[j] != "~":
            j += 1
        if j == start:
            raise ExprParseError(f"unexpected character {text[i]!r} at offset {i}")
        name = text[start:j]
        tokens.append(("rname" if text[i] == "~" else "name", name))
        i = j
    return tokens


class _ExprParser:
    def __init__(self, tokens: list[tuple[str, str]], schema: ConceptualSchema):
        self.tokens = tokens
        self.pos = 0
        self.roles = set(schema.role_names())

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ExprParseError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, kind: str, value: str) -> None:
        tok = self.take()
        if tok != (kind, value):
            raise ExprParseError(f"expected {value!r}, got {tok[1]!r}")

    def expr(self) -> PathExpression:
        parts = [self.part()]
        while self.peek() == ("name", "o"):
            self.take()
            parts.append(self.part())
        if len(parts) == 1:
            return parts[0]
        return Concat(tuple(parts))

    def part(self) -> PathExpression:
        kind, value = self.take()
        if (kind, value) == ("punct", "["):
            return self.confluence()
        if kind == "rname":
            if value not in self.roles:
                raise ExprParseError(f"unknown role {value!r} in reversed step")
            return RoleStep(value, reversed=True)
        if kind == "name":
            if value in self.roles:
                return RoleStep(value, reversed=False)
            return TypeAtom(value)
        raise ExprParseError(f"unexpected token {value!r}")

    def confluence(self) -> PathExpression:
        branches = []
        while True:
            kind, attr = self.take()
            if kind != "name":
                raise ExprParseError(f"expected an attribute name, got {attr!r}")
            self.expect("punct", ":")
            branches.append((attr, self.expr()))
            kind, value = self.take()
            if (kind, value) == ("punct", ";"):
                break
            if (kind, value) != ("punct", ","):
                raise ExprParseError(f"expected ',' or ';', got {value!r}")
        kind, head = self.take()
        if kind != "name":
            raise ExprParseError(f"expected a head type name, got {head!r}")
        self.expect("punct", "]")
        return Confluence(tuple(branches), head=head)


def parse_expression(text: str, schema: ConceptualSchema) -> PathExpression:
    """Parse the render() syntax back into an expression tree.

    Bare names are classified with the schema: role names become forward
    steps, anything else a type atom.
    """
    parser = _ExprParser(_tokenize(text), schema)
    e = parser.expr()
    trailing = parser.peek()
    if trailing is not None:
        raise ExprParseError(f"trailing input at token {trailing[1]!r}")
    return e


# --- verbalization -----------------------------------------------------------


def _seg_shape(e: PathExpression) -> tuple[PathExpression, RoleStep | None, str] | None:
    """Decompose an edge segment into (child, step, parent type), if shaped so."""
    if not isinstance(e, Concat) or not isinstance(e.parts[-1], TypeAtom):
        return None
    if len(e.parts) == 2:
        return (e.parts[0], None, e.parts[-1].name)
    if len(e.parts) == 3 and isinstance(e.parts[1], RoleStep):
        return (e.parts[0], e.parts[1], e.parts[-1].name)
    return None


def _head_of(e: PathExpression) -> tuple[str, list[str]]:
    """(display name, nested bullet block) for a segment's child expression."""
    if isinstance(e, TypeAtom):
        return e.name, []
    if isinstance(e, Confluence):
        return e.head, _branch_block(e)
    return render(e), []


def _branch_lines(seg: PathExpression, head: str) -> list[str]:
    shape = _seg_shape(seg)
    if shape is None:
        return [render(seg)]
    child, step, _parent = shape
    name, sub = _head_of(child)
    if step is None:
        text = f"{name} which is a {head}"
    else:
        text = f"via {step.role}: {name}"
    if sub:
        text += ":"
    return [text] + sub


def _branch_block(conf: Confluence) -> list[str]:
    lines: list[str] = []
    for _attr, seg in conf.branches:
        block = _branch_lines(seg, conf.head)
        lines.append("- " + block[0])
        lines.extend("  " + l for l in block[1:])
    return lines


def verbalize(e: PathExpression, schema: ConceptualSchema) -> str:
    """Plain-language template rendering of an expression.

    Confluences become '<Head>:' plus an indented bullet per branch;
    a bare edge segment reads '<child> which is a <Parent>' for spec/poly,
    '<Parent> <role> <child>' for a forward role, and
    '<child> is <role> of <Parent>' for a reversed one.
    """
    if isinstance(e, TypeAtom):
        return e.name
    if isinstance(e, RoleStep):
        return render(e)
    if isinstance(e, Confluence):
        lines = [f"{e.head}:"] + ["  " + l for l in _branch_block(e)]
        return "\n".join(lines)
    shape = _seg_shape(e)
    if shape is None:
        return render(e)
    child, step, parent = shape
    name, sub = _head_of(child)
    if step is None:
        text = f"{name} which is a {parent}"
    elif step.reversed:
        text = f"{name} is {step.role} of {parent}"
    else:
        text = f"{parent} {step.role} {name}"
    if sub:
        text += ":"
    return "\n".join([text] + ["  " + l for l in sub])
