"""Command-line entry point: validate, graph, spider, serve.

Node ids referenced by --op scripts ("nK") are stable for a given schema
because the whole pipeline is deterministic, but they shift when the
schema changes; re-run with --emit tree to discover current ids.
"""

from __future__ import annotations

import sys

import click

from . import engine, pathexpr
from .ingest import SchemaParseError, parse_schema
from .model import build_graph
from .service import Store, canonical_json, create_app


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8", errors="replace") as fh:
            return fh.read()
    except OSError as err:
        raise click.ClickException(str(err))


def _load_schema(path: str):
    try:
        return parse_schema(_read_text(path), source_name=path)
    except SchemaParseError as err:
        raise click.ClickException(str(err))


@click.group()
def main() -> None:
    """Spider queries over conceptual schemas."""


@main.command()
@click.argument("schema_file", type=click.Path(exists=True, dir_okay=False))
def validate(schema_file: str) -> None:
    """Check a schema file; print violations and exit 1 if any."""
    try:
        parse_schema(_read_text(schema_file), source_name=schema_file)
    except SchemaParseError as err:
        for v in err.violations:
            click.echo(f"line {v.line}, column {v.column}: {v.message}")
        sys.exit(1)


@main.command()
@click.argument("schema_file", type=click.Path(exists=True, dir_okay=False))
def graph(schema_file: str) -> None:
    """Print the schema's labelled graph as JSON."""
    schema = _load_schema(schema_file)
    click.echo(canonical_json(build_graph(schema).to_doc()))


def _parse_op(raw: str) -> tuple[str, int]:
    kind, _, node = raw.partition(":")
    if kind not in ("prune", "respider") or not node:
        raise click.UsageError(f"bad --op {raw!r}: expected prune:nK or respider:nK")
    try:
        return kind, engine.parse_node_id(node)
    except engine.SpiderError as err:
        raise click.UsageError(str(err))


@main.command()
@click.argument("schema_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--root", required=True, help="Type to spider from.")
@click.option("--op", "ops", multiple=True,
              help="Scripted operation, prune:nK or respider:nK; repeatable, applied in order.")
@click.option("--emit", type=click.Choice(["tree", "expr", "verbal", "json"]),
              default="expr", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help="Write to a file instead of standard output.")
def spider(schema_file: str, root: str, ops: tuple[str, ...], emit: str,
           output: str | None) -> None:
    """Run a spider query, apply scripted ops, and emit the result."""
    schema = _load_schema(schema_file)
    schema_graph = build_graph(schema)
    script = [_parse_op(raw) for raw in ops]
    try:
        g = engine.spider_query(schema_graph, schema, root)
        for kind, node in script:
            if kind == "prune":
                g = engine.prune(g, node)
            else:
                g = engine.respider(schema_graph, schema, g, node)
    except engine.SpiderError as err:
        raise click.ClickException(str(err))

    if emit == "tree":
        text = engine.render_tree(g, schema)
    elif emit == "json":
        text = canonical_json(engine.tree_doc(g, schema)) + "\n"
    else:
        expr = pathexpr.root_expr(g, schema)
        if emit == "expr":
            text = pathexpr.render(expr) + "\n"
        else:
            text = pathexpr.verbalize(expr, schema) + "\n"

    if output is None:
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


@main.command()
@click.option("--host", envvar="SPIDERQUERY_HOST", default="127.0.0.1", show_default=True)
@click.option("--port", envvar="SPIDERQUERY_PORT", default=8000, type=int, show_default=True)
@click.option("--data-dir", envvar="SPIDERQUERY_DATA_DIR", default="spiderquery-data",
              show_default=True, help="Directory for persisted schemas and sessions.")
@click.option("--ui-dir", envvar="SPIDERQUERY_UI_DIR", default="frontend/dist",
              show_default=True, help="Static web UI assets; served at /ui when present.")
def serve(host: str, port: int, data_dir: str, ui_dir: str) -> None:
    """Start the HTTP session service."""
    import uvicorn

    app = create_app(Store(data_dir), ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
