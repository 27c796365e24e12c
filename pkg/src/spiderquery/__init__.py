"""Interactive query formulation over conceptual schemas.

Pipeline: parse a schema (.ssd text) -> labelled schema graph -> spider
query tree around a chosen type -> path expression with rendering and
verbalization.  A session service and CLI wrap the same pure engine.
"""

from .engine import (
    ExtensionCandidate,
    SpiderEdge,
    SpiderError,
    SpiderGraph,
    expand_step,
    extension_candidates,
    path_types,
    prune,
    respider,
    spider_query,
    tree_doc,
)
from .ingest import SchemaParseError, parse_schema, serialize_schema
from .model import (
    ConceptualSchema,
    Edge,
    InvalidSchemaError,
    SchemaError,
    SchemaGraph,
    Violation,
    build_graph,
    incident_edges,
    validate_schema,
)
from .pathexpr import (
    Concat,
    Confluence,
    PathExpression,
    RoleStep,
    TypeAtom,
    connector,
    node_expr,
    parse_expression,
    path_seg,
    render,
    root_expr,
    type_occurrences,
    verbalize,
)

__version__ = "0.1.0"

__all__ = [
    "ConceptualSchema",
    "Concat",
    "Confluence",
    "Edge",
    "ExtensionCandidate",
    "InvalidSchemaError",
    "PathExpression",
    "RoleStep",
    "SchemaError",
    "SchemaGraph",
    "SchemaParseError",
    "SpiderEdge",
    "SpiderError",
    "SpiderGraph",
    "TypeAtom",
    "Violation",
    "build_graph",
    "connector",
    "expand_step",
    "extension_candidates",
    "incident_edges",
    "node_expr",
    "parse_expression",
    "parse_schema",
    "path_seg",
    "path_types",
    "prune",
    "render",
    "respider",
    "root_expr",
    "serialize_schema",
    "spider_query",
    "tree_doc",
    "type_occurrences",
    "validate_schema",
    "verbalize",
]
