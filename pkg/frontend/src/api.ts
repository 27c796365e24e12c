import type { ExpressionView, SchemaSummary, SessionView } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: unknown) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail: unknown;
    try {
      const body = await res.json();
      detail = body.detail ?? body;
    } catch {
      detail = res.statusText;
    }
    throw new ApiError(res.status, detail);
  }
  return res.json() as Promise<T>;
}

export class SpiderApi {
  constructor(public base: string = "") {}

  listSchemas(): Promise<SchemaSummary[]> {
    return fetch(`${this.base}/schemas`).then((r) => unwrap<SchemaSummary[]>(r));
  }

  createSchema(text: string): Promise<{ id: string }> {
    return fetch(`${this.base}/schemas`, {
      method: "POST",
      headers: { "content-type": "text/plain" },
      body: text,
    }).then((r) => unwrap<{ id: string }>(r));
  }

  getSchemaText(id: string): Promise<string> {
    return fetch(`${this.base}/schemas/${id}`).then(async (r) => {
      if (!r.ok) throw new ApiError(r.status, r.statusText);
      return r.text();
    });
  }

  createSession(schemaId: string, rootType: string): Promise<SessionView> {
    return fetch(`${this.base}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ schema_id: schemaId, root_type: rootType }),
    }).then((r) => unwrap<SessionView>(r));
  }

  getSession(id: string): Promise<SessionView> {
    return fetch(`${this.base}/sessions/${id}`).then((r) => unwrap<SessionView>(r));
  }

  applyOp(id: string, op: "prune" | "respider", node: string): Promise<SessionView> {
    return fetch(`${this.base}/sessions/${id}/ops`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ op, node }),
    }).then((r) => unwrap<SessionView>(r));
  }

  getExpression(id: string, format: "expr" | "verbal" | "tree"): Promise<ExpressionView> {
    return fetch(`${this.base}/sessions/${id}/expression?format=${format}`).then((r) =>
      unwrap<ExpressionView>(r),
    );
  }
}
