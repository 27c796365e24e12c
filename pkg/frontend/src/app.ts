import { ApiError, SpiderApi } from "./api.js";
import type { SessionView } from "./types.js";
import { renderModeSwitches, renderSchemaList, renderTree } from "./view.js";

/**
 * Single-page app driver.  The only state is the last server response:
 * every mutation waits for the server and re-renders from its reply, and
 * reloading a session id reproduces the identical view.
 */
export class App {
  session: SessionView | null = null;
  private inflight: Promise<void> = Promise.resolve();

  constructor(
    private root: HTMLElement,
    private api: SpiderApi,
  ) {}

  /** Resolves after every action started so far has settled. */
  whenIdle(): Promise<void> {
    return this.inflight;
  }

  private track(action: Promise<void>): void {
    this.inflight = this.inflight.then(() => action).catch(() => {});
  }

  start(sessionId: string | null): void {
    this.root.innerHTML = `
      <div class="layout">
        <aside class="sidebar">
          <h2>Schemas</h2>
          <div id="schema-list"></div>
          <textarea id="schema-input" rows="8"
            placeholder="objecttype A&#10;relationship f roles r:A ..."></textarea>
          <button id="schema-add">Add schema</button>
          <div id="mode-switches"></div>
        </aside>
        <main class="content">
          <h2 id="session-title">No session</h2>
          <div id="tree-pane"></div>
          <h3>Path expression</h3>
          <pre id="expression"></pre>
          <h3>Reading</h3>
          <pre id="verbalization"></pre>
        </main>
        <div id="toasts"></div>
      </div>`;
    this.byId("mode-switches").appendChild(renderModeSwitches());
    this.byId("schema-add").addEventListener("click", () => {
      const input = this.byId("schema-input") as HTMLTextAreaElement;
      this.track(this.addSchema(input.value));
    });
    this.track(this.refreshSchemas());
    if (sessionId) {
      this.track(this.loadSession(sessionId));
    }
  }

  private byId(id: string): HTMLElement {
    const el = this.root.querySelector(`#${id}`);
    if (!el) throw new Error(`missing element #${id}`);
    return el as HTMLElement;
  }

  private toast(message: string): void {
    const box = this.byId("toasts");
    const item = document.createElement("div");
    item.className = "toast";
    item.textContent = message;
    box.appendChild(item);
    setTimeout(() => item.remove(), 4000);
  }

  private report(err: unknown): void {
    if (err instanceof ApiError) {
      this.toast(`${err.status}: ${err.message}`);
    } else {
      this.toast(String(err));
    }
  }

  async refreshSchemas(): Promise<void> {
    try {
      const schemas = await this.api.listSchemas();
      const pane = this.byId("schema-list");
      pane.innerHTML = "";
      pane.appendChild(
        renderSchemaList(schemas, (schemaId, rootType) => {
          this.track(this.createSession(schemaId, rootType));
        }),
      );
    } catch (err) {
      this.report(err);
    }
  }

  async addSchema(text: string): Promise<void> {
    try {
      await this.api.createSchema(text);
      await this.refreshSchemas();
    } catch (err) {
      this.report(err);
    }
  }

  async createSession(schemaId: string, rootType: string): Promise<void> {
    try {
      this.render(await this.api.createSession(schemaId, rootType));
    } catch (err) {
      this.report(err);
    }
  }

  async loadSession(sessionId: string): Promise<void> {
    try {
      this.render(await this.api.getSession(sessionId));
    } catch (err) {
      this.report(err);
    }
  }

  private async mutate(op: "prune" | "respider", node: string): Promise<void> {
    if (!this.session) return;
    try {
      this.render(await this.api.applyOp(this.session.id, op, node));
    } catch (err) {
      // conflicts are non-blocking: the last rendered state stays valid
      this.report(err);
    }
  }

  /** Re-render everything from a server response; no client-side diffs. */
  private render(view: SessionView): void {
    this.session = view;
    if (typeof location !== "undefined") {
      location.hash = `session=${view.id}`;
    }
    this.byId("session-title").textContent =
      `Session ${view.id} — root ${view.root_type}`;
    const pane = this.byId("tree-pane");
    pane.innerHTML = "";
    pane.appendChild(
      renderTree(view.tree, {
        onPrune: (node) => this.track(this.mutate("prune", node)),
        onRespider: (node) => this.track(this.mutate("respider", node)),
      }),
    );
    this.byId("expression").textContent = view.expression;
    this.byId("verbalization").textContent = view.verbalization;
  }
}

export function sessionIdFromHash(hash: string): string | null {
  const match = /session=([A-Za-z0-9_-]+)/.exec(hash);
  return match ? match[1] : null;
}
