"""Conceptual schema fabric and its translation into a labelled graph.

A conceptual schema is a set of types split into object types and
relationship types, a partition of roles over the relationship types, a
player for every role, and two binary links between types: specialisation
(``spec``) and polymorphy (``poly``).  Every type carries a non-negative
rational conceptual weight used by the spider engine to bound expansion.

The schema maps onto an undirected labelled multigraph with one node per
type, one role-labelled edge per role (between the role's player and its
relationship type), and one marker-labelled edge per spec/poly pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

#: Marker labels for specialisation and polymorphy edges.  They live in the
#: same label namespace as role names, so both words are reserved and
#: rejected as type/role identifiers by validation.
SPEC_LABEL = "spec"
POLY_LABEL = "poly"

RESERVED_WORDS = frozenset({SPEC_LABEL, POLY_LABEL})

#: Characters that may not occur in identifiers.  The bracket/punctuation
#: characters are metacharacters of the path-expression syntax; '#' starts
#: a comment in the schema file format.
RESERVED_CHARS = frozenset(":,;[]~#")

DEFAULT_WEIGHT = Fraction(1)


class SchemaError(ValueError):
    """A schema-level failure (invalid identifier, broken invariant, ...)."""


class InvalidSchemaError(SchemaError):
    """Raised when an operation requires a valid schema but got violations."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        summary = "; ".join(v.message for v in violations[:3])
        if len(violations) > 3:
            summary += f"; ... ({len(violations)} violations)"
        super().__init__(f"invalid schema: {summary}")


@dataclass(frozen=True)
class Violation:
    """One broken schema invariant, naming the offending element."""

    code: str
    subject: str
    message: str


def identifier_problem(name: str) -> str | None:
    """Return a description of why ``name`` is not a legal identifier, or None."""
    if not name:
        return "identifier is empty"
    if any(c.isspace() for c in name):
        return f"identifier {name!r} contains whitespace"
    bad = sorted(set(name) & RESERVED_CHARS)
    if bad:
        return f"identifier {name!r} contains reserved character {bad[0]!r}"
    if name in RESERVED_WORDS:
        return f"identifier {name!r} is a reserved word"
    return None


@dataclass
class ConceptualSchema:
    """The fabric of a conceptual schema.

    ``types`` is the union of ``obj_types`` and ``rel_types``; ``roles``
    maps each relationship type to its ordered role list (the role order is
    part of the schema); ``player`` maps every role to the type at its
    base; ``spec``/``poly`` are ordered pairs whose first component is an
    object type (the second may be any type: polymorphy with a relationship
    type is allowed); ``cweight`` assigns every type its conceptual weight.

    Instances are treated as immutable after construction.  Collections are
    normalised to sorted tuples so that equal schemas compare equal and all
    derived artifacts are deterministic.  Role order within a relationship
    is preserved as declared.
    """

    types: tuple[str, ...] = ()
    rel_types: tuple[str, ...] = ()
    obj_types: tuple[str, ...] = ()
    roles: dict[str, tuple[str, ...]] = field(default_factory=dict)
    player: dict[str, str] = field(default_factory=dict)
    spec: tuple[tuple[str, str], ...] = ()
    poly: tuple[tuple[str, str], ...] = ()
    cweight: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.types = tuple(sorted(self.types))
        self.rel_types = tuple(sorted(self.rel_types))
        self.obj_types = tuple(sorted(self.obj_types))
        self.roles = {f: tuple(rs) for f, rs in sorted(self.roles.items())}
        self.player = dict(sorted(self.player.items()))
        self.spec = tuple(sorted(self.spec))
        self.poly = tuple(sorted(self.poly))
        self.cweight = {t: Fraction(w) for t, w in sorted(self.cweight.items())}

    @classmethod
    def build(
        cls,
        obj_types: Iterable[str] = (),
        relationships: Mapping[str, Iterable[tuple[str, str]]] | None = None,
        spec: Iterable[tuple[str, str]] = (),
        poly: Iterable[tuple[str, str]] = (),
        weights: Mapping[str, Fraction | int | str] | None = None,
    ) -> ConceptualSchema:
        """Assemble a schema from object types and ``{rel: [(role, player)]}``.

        Weights default to 1 for every type not listed in ``weights``.
        """
        relationships = relationships or {}
        obj = tuple(obj_types)
        rel = tuple(relationships)
        types = obj + rel
        roles = {f: tuple(r for r, _ in pairs) for f, pairs in relationships.items()}
        player = {r: p for pairs in relationships.values() for r, p in pairs}
        weights = weights or {}
        cweight = {t: Fraction(weights.get(t, DEFAULT_WEIGHT)) for t in types}
        return cls(
            types=types,
            rel_types=rel,
            obj_types=obj,
            roles=roles,
            player=player,
            spec=tuple(spec),
            poly=tuple(poly),
            cweight=cweight,
        )

    def rel_of(self, role: str) -> str:
        """The relationship type whose role list contains ``role``."""
        for f, rs in self.roles.items():
            if role in rs:
                return f
        raise SchemaError(f"unknown role {role!r}")

    def role_names(self) -> tuple[str, ...]:
        return tuple(r for rs in self.roles.values() for r in rs)


def validate_schema(schema: ConceptualSchema) -> list[Violation]:
    """Check every schema invariant; an empty result means the schema is valid.

    Violations are data, not failures: each record names the invariant and
    the offending element so callers (e.g. the file parser) can attach
    source locations.
    """
    out: list[Violation] = []
    types = set(schema.types)
    rel = set(schema.rel_types)
    obj = set(schema.obj_types)

    for name in sorted(types | set(schema.role_names())):
        problem = identifier_problem(name)
        if problem:
            out.append(Violation("bad-identifier", name, problem))

    for t in sorted(rel & obj):
        out.append(Violation("kind-overlap", t, f"type {t} is both an object type and a relationship type"))
    for t in sorted(types - (rel | obj)):
        out.append(Violation("kind-missing", t, f"type {t} is neither an object type nor a relationship type"))
    for t in sorted((rel | obj) - types):
        out.append(Violation("unknown-type", t, f"type {t} is classified but not declared"))

    seen_roles: dict[str, str] = {}
    for f in schema.roles:
        if f not in rel:
            out.append(Violation("roles-of-nonrelationship", f, f"role list given for non-relationship type {f}"))
        for r in schema.roles[f]:
            if r in seen_roles:
                out.append(
                    Violation(
                        "role-partition",
                        r,
                        f"role {r} appears in both {seen_roles[r]} and {f}",
                    )
                )
            else:
                seen_roles[r] = f
    for f in sorted(rel):
        if not schema.roles.get(f):
            out.append(Violation("empty-relationship", f, f"relationship type {f} has no roles"))

    role_universe = set(seen_roles)
    for r in sorted(role_universe):
        p = schema.player.get(r)
        if p is None:
            out.append(Violation("missing-player", r, f"role {r} has no player"))
        elif p not in types:
            out.append(Violation("unknown-player", r, f"unknown player type {p} for role {r}"))
    for r in sorted(set(schema.player) - role_universe):
        out.append(Violation("player-of-unknown-role", r, f"player given for unknown role {r}"))

    for t in sorted(role_universe & types):
        out.append(Violation("name-collision", t, f"name {t} is used both as a type and as a role"))

    for kind, pairs in (("spec", schema.spec), ("poly", schema.poly)):
        for a, b in pairs:
            if a not in obj:
                out.append(Violation(f"{kind}-source", a, f"{kind} pair ({a}, {b}): {a} is not an object type"))
            if b not in types:
                out.append(Violation(f"{kind}-target", b, f"{kind} pair ({a}, {b}): {b} is not a declared type"))

    for t in sorted(types):
        w = schema.cweight.get(t)
        if w is None:
            out.append(Violation("missing-weight", t, f"type {t} has no conceptual weight"))
        elif w < 0:
            out.append(Violation("negative-weight", t, f"type {t} has negative weight {w}"))
    for t in sorted(set(schema.cweight) - types):
        out.append(Violation("weight-of-unknown-type", t, f"weight given for unknown type {t}"))

    return out


def require_valid(schema: ConceptualSchema) -> None:
    violations = validate_schema(schema)
    if violations:
        raise InvalidSchemaError(violations)


def label_kind(label: str) -> str:
    if label == SPEC_LABEL:
        return "spec"
    if label == POLY_LABEL:
        return "poly"
    return "role"


_KIND_RANK = {"role": 0, "spec": 1, "poly": 2}


@dataclass(frozen=True)
class Edge:
    """An undirected labelled edge; endpoints are stored sorted."""

    ends: tuple[str, str]
    label: str

    def sort_key(self) -> tuple:
        return (self.ends, _KIND_RANK[label_kind(self.label)], self.label)

    def other_end(self, t: str) -> str:
        a, b = self.ends
        return b if t == a else a


@dataclass(frozen=True)
class SchemaGraph:
    """Undirected labelled multigraph over the schema's types.

    Parallel edges between one endpoint pair carry distinct labels; edges
    are kept in a canonical order (sorted endpoints, then label kind with
    role < spec < poly, then role name) so serialized graphs are
    byte-stable.
    """

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def to_doc(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [{"ends": list(e.ends), "label": e.label} for e in self.edges],
        }


def build_graph(
    schema: ConceptualSchema,
    role_edge_filter: Callable[[str], bool] | None = None,
) -> SchemaGraph:
    """Translate a valid schema into its labelled graph.

    One node per type; one edge per role between the role's player and its
    relationship type; one spec/poly-labelled edge per pair.  Identical
    (endpoint-set, label) duplicates collapse, matching the set semantics
    of the construction.

    ``role_edge_filter``, when given, keeps only role edges whose role it
    accepts (hook for excluding reference-scheme roles); marker edges are
    never filtered.  Disabled by default.
    """
    require_valid(schema)
    edges: set[Edge] = set()
    for f, rs in schema.roles.items():
        for r in rs:
            if role_edge_filter is not None and not role_edge_filter(r):
                continue
            ends = tuple(sorted((schema.player[r], f)))
            edges.add(Edge(ends, r))
    for label, pairs in ((SPEC_LABEL, schema.spec), (POLY_LABEL, schema.poly)):
        for a, b in pairs:
            edges.add(Edge(tuple(sorted((a, b))), label))
    return SchemaGraph(
        nodes=tuple(sorted(schema.types)),
        edges=tuple(sorted(edges, key=Edge.sort_key)),
    )


def incident_edges(graph: SchemaGraph, t: str) -> list[tuple[str, str]]:
    """All (neighbor, label) entries for edges touching ``t``.

    Ordered by (label kind with role < spec < poly, neighbor, role name).
    A self-loop contributes a single entry.
    """
    if t not in graph.nodes:
        raise SchemaError(f"unknown type name {t!r}")
    entries = [
        (e.other_end(t), e.label)
        for e in graph.edges
        if t in e.ends
    ]
    entries.sort(key=lambda pair: (_KIND_RANK[label_kind(pair[1])], pair[0], pair[1]))
    return entries
