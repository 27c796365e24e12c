"""Spider query construction over a schema graph.

A spider query is a directed labelled tree that fans out from a root type
over the schema graph, collecting everything conceptually nearby.  Growth
is driven by repeated expansion steps: every extendable node gains one
fresh child per incident schema edge whose far endpoint does not already
occur on the node's root path (no type repeats along a path).  A fresh
child stays extendable only while conceptual weight does not increase,
i.e. weight(child) <= weight(parent); heavier children are added but left
for the user to extend explicitly (respider).

All operations are pure: they return new SpiderGraph values and never
mutate their inputs.  Node ids are allocated monotonically and never
reused, even after pruning, so serialized ids ("n0", "n1", ...) are stable
handles for scripted sessions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .ingest import format_weight
from .model import ConceptualSchema, SchemaGraph, incident_edges


class SpiderError(ValueError):
    """A spider operation was applied outside its precondition."""


class SpiderEdge(NamedTuple):
    parent: int
    child: int
    label: str


class ExtensionCandidate(NamedTuple):
    node: int
    target_type: str
    label: str


@dataclass
class SpiderGraph:
    """A spider query tree.

    ``node_types`` maps node ids to schema types (several nodes may carry
    the same type on different legs); ``edges`` hold the directed tree
    edges, one per non-root node, ordered by child id; ``frontier`` is the
    set of nodes still eligible for automatic extension; ``next_id`` feeds
    fresh node allocation.  Treated as immutable.
    """

    node_types: dict[int, str]
    edges: tuple[SpiderEdge, ...] = ()
    root: int = 0
    frontier: frozenset[int] = frozenset()
    next_id: int = 1

    def node_ids(self) -> list[int]:
        return sorted(self.node_types)

    def children(self, n: int) -> list[SpiderEdge]:
        return [e for e in self.edges if e.parent == n]

    def parent_edge(self, n: int) -> SpiderEdge | None:
        for e in self.edges:
            if e.child == n:
                return e
        return None

    def is_leaf(self, n: int) -> bool:
        return all(e.parent != n for e in self.edges)

    def depth(self, n: int) -> int:
        parents = {e.child: e.parent for e in self.edges}
        d = 0
        while n in parents:
            n = parents[n]
            d += 1
        return d


def new_spider_graph(root_type: str) -> SpiderGraph:
    return SpiderGraph(node_types={0: root_type}, root=0,
                       frontier=frozenset({0}), next_id=1)


def path_types(g: SpiderGraph, n: int) -> frozenset[str]:
    """Types on the path from the root to ``n``, inclusive of n's own type.

    The inclusive reading blocks both revisits of ancestor types and
    self-loop repetition.
    """
    if n not in g.node_types:
        raise SpiderError(f"unknown node n{n}")
    parents = {e.child: e.parent for e in g.edges}
    seen = {g.node_types[n]}
    while n in parents:
        n = parents[n]
        seen.add(g.node_types[n])
    return frozenset(seen)


def _adjacency(graph: SchemaGraph) -> dict[str, list[tuple[str, str]]]:
    """type -> [(neighbor, label)] sorted by (neighbor, label)."""
    adj: dict[str, list[tuple[str, str]]] = {t: [] for t in graph.nodes}
    for e in graph.edges:
        a, b = e.ends
        adj[a].append((b, e.label))
        if a != b:
            adj[b].append((a, e.label))
    for entries in adj.values():
        entries.sort()
    return adj


def extension_candidates(graph: SchemaGraph, g: SpiderGraph) -> list[ExtensionCandidate]:
    """All admissible extensions of the frontier, in (node, type, label) order.

    A candidate (n, t, l) pairs a frontier node n with a schema edge
    ({type(n), t}, l) whose far type t does not yet occur on n's root
    path.
    """
    adj = _adjacency(graph)
    out: list[ExtensionCandidate] = []
    for n in sorted(g.frontier):
        blocked = path_types(g, n)
        for t, label in adj[g.node_types[n]]:
            if t not in blocked:
                out.append(ExtensionCandidate(n, t, label))
    return out


class _State:
    """Mutable working form of a SpiderGraph for the growth loop."""

    def __init__(self, g: SpiderGraph):
        self.types = dict(g.node_types)
        self.children: dict[int, list[SpiderEdge]] = {n: [] for n in self.types}
        for e in g.edges:
            self.children[e.parent].append(e)
        self.root = g.root
        self.frontier: set[int] = set(g.frontier)
        self.next_id = g.next_id
        self.path_cache: dict[int, frozenset[str]] = {
            n: path_types(g, n) for n in self.types
        }

    def candidates(self, adj: dict[str, list[tuple[str, str]]]) -> list[ExtensionCandidate]:
        out = []
        for n in sorted(self.frontier):
            blocked = self.path_cache[n]
            for t, label in adj[self.types[n]]:
                if t not in blocked:
                    out.append(ExtensionCandidate(n, t, label))
        return out

    def apply(self, cands: list[ExtensionCandidate],
              schema: ConceptualSchema, weight_rule: bool = True) -> None:
        new_frontier: set[int] = set()
        for n, t, label in cands:
            m = self.next_id
            self.next_id += 1
            self.types[m] = t
            self.children[m] = []
            self.children[n].append(SpiderEdge(n, m, label))
            self.path_cache[m] = self.path_cache[n] | {t}
            if not weight_rule or schema.cweight[t] <= schema.cweight[self.types[n]]:
                new_frontier.add(m)
        self.frontier = new_frontier

    def freeze(self) -> SpiderGraph:
        edges = tuple(sorted(
            (e for kids in self.children.values() for e in kids),
            key=lambda e: e.child,
        ))
        return SpiderGraph(
            node_types=dict(sorted(self.types.items())),
            edges=edges,
            root=self.root,
            frontier=frozenset(self.frontier),
            next_id=self.next_id,
        )


def _run(state: _State, graph: SchemaGraph, schema: ConceptualSchema,
         max_nodes: int | None) -> SpiderGraph:
    adj = _adjacency(graph)
    while True:
        cands = state.candidates(adj)
        if not cands:
            return state.freeze()
        state.apply(cands, schema)
        if max_nodes is not None and len(state.types) > max_nodes:
            raise SpiderError(f"spider query exceeded the {max_nodes}-node safety bound")


def expand_step(graph: SchemaGraph, schema: ConceptualSchema,
                g: SpiderGraph) -> SpiderGraph:
    """One expansion step: a fresh child per candidate tuple, new frontier.

    A child enters the new frontier only if its weight does not exceed its
    parent's.  Raises SpiderError when there is nothing to extend.
    """
    cands = extension_candidates(graph, g)
    if not cands:
        raise SpiderError("no extension candidates: the spider query is complete")
    state = _State(g)
    state.apply(cands, schema)
    return state.freeze()


def spider_query(graph: SchemaGraph, schema: ConceptualSchema, root_type: str,
                 max_nodes: int | None = None) -> SpiderGraph:
    """Build the full spider query tree for ``root_type``.

    Expansion always terminates: no path repeats a type, so every path is
    finite and every node has finitely many children.  The frontier left at
    the fixpoint is retained (it feeds UI extend affordances).
    ``max_nodes`` is an optional safety bound; exceeding it raises.
    """
    if root_type not in graph.nodes:
        raise SpiderError(f"unknown root type {root_type}")
    return _run(_State(new_spider_graph(root_type)), graph, schema, max_nodes)


def respider(graph: SchemaGraph, schema: ConceptualSchema, g: SpiderGraph,
             leaf: int, max_nodes: int | None = None) -> SpiderGraph:
    """Commence a new spider query from a leaf of an existing tree.

    The leaf becomes extendable regardless of the weight barrier that may
    have stopped it; growth then proceeds exactly as in spider_query, with
    the child-weight rule applied relative to each parent and ancestor
    types still excluded.  A leaf with no admissible neighbors yields the
    graph unchanged (except that the frontier becomes that fixpoint's).
    """
    if leaf not in g.node_types:
        raise SpiderError(f"unknown node n{leaf}")
    if not g.is_leaf(leaf):
        raise SpiderError(f"node n{leaf} is not a leaf")
    state = _State(SpiderGraph(
        node_types=g.node_types,
        edges=g.edges,
        root=g.root,
        frontier=frozenset({leaf}),
        next_id=g.next_id,
    ))
    return _run(state, graph, schema, max_nodes)


def prune(g: SpiderGraph, n: int) -> SpiderGraph:
    """Remove ``n``, its whole subtree, and its incoming edge.

    Node ids are never reused afterwards.  The root cannot be pruned.
    """
    if n not in g.node_types:
        raise SpiderError(f"unknown node n{n}")
    if n == g.root:
        raise SpiderError("cannot prune the root of a spider query")
    doomed = {n}
    queue = [n]
    kids: dict[int, list[int]] = {}
    for e in g.edges:
        kids.setdefault(e.parent, []).append(e.child)
    while queue:
        for child in kids.get(queue.pop(), ()):
            doomed.add(child)
            queue.append(child)
    return SpiderGraph(
        node_types={k: v for k, v in g.node_types.items() if k not in doomed},
        edges=tuple(e for e in g.edges if e.child not in doomed),
        root=g.root,
        frontier=g.frontier - frozenset(doomed),
        next_id=g.next_id,
    )


def node_name(n: int) -> str:
    return f"n{n}"


def parse_node_id(name: str) -> int:
    if name.startswith("n") and name[1:].isdigit():
        return int(name[1:])
    raise SpiderError(f"bad node id {name!r} (expected e.g. 'n3')")


def tree_doc(g: SpiderGraph, schema: ConceptualSchema) -> dict:
    """Serializable document: root plus per-node id/type/weight/children.

    Children appear in allocation (child id) order.  A node is
    ``extendable`` when it is in the frontier or is a leaf (either way the
    UI offers a spider button for it).
    """
    nodes = []
    for n in g.node_ids():
        t = g.node_types[n]
        kids = [[e.label, node_name(e.child)] for e in g.children(n)]
        nodes.append({
            "id": node_name(n),
            "type": t,
            "weight": format_weight(schema.cweight[t]),
            "children": kids,
            "extendable": n in g.frontier or not kids,
        })
    return {"root": node_name(g.root), "nodes": nodes}


def render_tree(g: SpiderGraph, schema: ConceptualSchema) -> str:
    """Human-readable indented tree; '*' marks extendable nodes."""
    lines: list[str] = []

    def emit(n: int, label: str | None, depth: int) -> None:
        t = g.node_types[n]
        star = " *" if (n in g.frontier or g.is_leaf(n)) else ""
        tag = f"[{label}] " if label is not None else ""
        lines.append(f"{'  ' * depth}{tag}{node_name(n)} {t} (w={format_weight(schema.cweight[t])}){star}")
        for e in g.children(n):
            emit(e.child, e.label, depth + 1)

    emit(g.root, None, 0)
    return "\n".join(lines) + "\n"
